"""Price search and word-of-mouth equilibria for a duopoly market."""

from .eq_asym import solve_asym, stable_asym
from .eq_baseline import s_bar, solve_equilibria, stable_equilibrium
from .eq_variants import solve_full_diffusion
from .errors import (DivergedError, InvalidArgument, NoComparisonError,
                     NoEquilibriumError, WomlabError)
from .network import (DegreeDistribution, degenerate, mean_degree, pgf,
                      power_law, tau_tilde)
from .pricing import (MarketParams, PriceLaw, cdf, eta_baseline, expected_price,
                      firm_profit_baseline, price_law, quantile)

__version__ = "0.1.0"

__all__ = [
    "DegreeDistribution", "DivergedError", "InvalidArgument", "MarketParams",
    "NoComparisonError", "NoEquilibriumError", "PriceLaw", "WomlabError",
    "cdf", "degenerate", "eta_baseline", "expected_price", "firm_profit_baseline",
    "mean_degree", "pgf", "power_law", "price_law", "quantile", "s_bar",
    "solve_asym", "solve_equilibria", "solve_full_diffusion", "stable_asym",
    "stable_equilibrium", "tau_tilde",
]
