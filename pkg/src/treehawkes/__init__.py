"""Self-exciting growth models of online discussion trees.

A discussion tree grows as a branching point process: the post attracts
direct replies at a Weibull-shaped rate, every comment triggers replies
after lognormal delays, and the mean number of replies per comment (the
branching number) controls the cascade. The package fits this model and
three reference models (preferential attachment, dynamic Poisson,
reinforced Poisson) to observed trees, simulates and predicts growth, and
benchmarks structure and dynamics predictions.
"""

__version__ = "0.1.0"

from .errors import TreeHawkesError
from .tree import TimedTree, branching_number, depth_profile, response_times, truncate
from .kernels import (
    LognormKernel,
    WeibullIntensity,
    fit_lognormal_kernel,
    fit_weibull_intensity,
)
from .hawkes import (
    HawkesParams,
    expected_size,
    fit_hawkes,
    nll_future,
    predict_size,
    simulate_conditional,
    simulate_tree,
)
from .baselines import (
    DPParams,
    PAParams,
    RPPParams,
    fit_dp,
    fit_pa,
    fit_rpp,
    simulate_pa,
)
from .temporal import ccdf, event_series, local_variation
from .ingest import Forest, load, parse_canonical, persist
from .evaluate import EvalConfig, evaluate_forest
from .rng import substream

__all__ = [
    "__version__",
    "TreeHawkesError",
    "TimedTree",
    "branching_number",
    "depth_profile",
    "response_times",
    "truncate",
    "LognormKernel",
    "WeibullIntensity",
    "fit_lognormal_kernel",
    "fit_weibull_intensity",
    "HawkesParams",
    "expected_size",
    "fit_hawkes",
    "nll_future",
    "predict_size",
    "simulate_conditional",
    "simulate_tree",
    "DPParams",
    "PAParams",
    "RPPParams",
    "fit_dp",
    "fit_pa",
    "fit_rpp",
    "simulate_pa",
    "ccdf",
    "event_series",
    "local_variation",
    "Forest",
    "load",
    "parse_canonical",
    "persist",
    "EvalConfig",
    "evaluate_forest",
    "substream",
]
