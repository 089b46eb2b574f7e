"""Hawkes branching model of a discussion tree.

Intensity at time t given the comment history:

    lambda(t) = mu(t) + n_b * sum_{i: tau_i < t} phi(t - tau_i)

with mu a Weibull root intensity, phi a lognormal reply kernel and n_b the
branching number. The cluster representation makes simulation exact: the
root spawns Poisson(a) children at Weibull times, every comment spawns
Poisson(n_b) children at lognormal delays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientData,
    InvalidParams,
    InvalidWindow,
    NoFutureEvents,
    SimulationBlowup,
    Supercritical,
)
from .kernels import (
    LognormFit,
    LognormKernel,
    WeibullFit,
    WeibullIntensity,
    fit_lognormal_kernel,
    fit_weibull_intensity,
    logn_cdf,
    logn_pdf,
    sample_lognormal,
    sample_lognormal_truncated,
    sample_weibull,
    sample_weibull_truncated,
    weib_intensity,
    weib_mass,
)
from .temporal import event_series
from .tree import TimedTree, branching_number, node_depths, response_times, truncate

__all__ = [
    "HawkesParams",
    "HawkesFit",
    "NODE_CAP",
    "NB_CLAMP",
    "expected_size",
    "simulate_tree",
    "simulate_conditional",
    "predict_size",
    "nll_future",
    "fit_hawkes",
]

# Hard node cap per simulated tree; subcritical parameters never get close.
NODE_CAP = 10_000_000

# Degree estimates of n_b are clamped into [0, NB_CLAMP] for model use.
NB_CLAMP = 1.0 - 1e-6


@dataclass(frozen=True)
class HawkesParams:
    root: WeibullIntensity
    kernel: LognormKernel
    n_b: float

    def __post_init__(self) -> None:
        if self.n_b < 0:
            raise InvalidParams(f"n_b must be >= 0, got {self.n_b}")
        if self.n_b >= 1:
            raise Supercritical(f"n_b = {self.n_b} >= 1: tree size diverges")


@dataclass(frozen=True)
class HawkesFit:
    params: HawkesParams
    n_b_raw: float
    loglik: float
    converged: bool
    flags: tuple[str, ...] = ()


def expected_size(params: HawkesParams) -> float:
    """Expected final tree size 1 + a/(1 - n_b) (root included)."""
    if params.n_b >= 1:
        raise Supercritical(f"n_b = {params.n_b} >= 1")
    return 1.0 + params.root.a / (1.0 - params.n_b)


class _Builder:
    """Accumulates generations of nodes and finalizes a TimedTree."""

    def __init__(self) -> None:
        self.times: list[np.ndarray] = [np.zeros(1)]
        self.parents: list[np.ndarray] = [np.full(1, -1, dtype=np.int64)]
        self.depths: list[np.ndarray] = [np.zeros(1, dtype=np.int64)]
        self.count = 1

    def seed_observed(self, tree: TimedTree) -> None:
        self.times = [tree.times.copy()]
        self.parents = [tree.parents.copy()]
        self.depths = [node_depths(tree).copy()]
        self.count = tree.n

    def add(self, times: np.ndarray, parents: np.ndarray, depth: np.ndarray) -> np.ndarray:
        idx = np.arange(self.count, self.count + times.shape[0], dtype=np.int64)
        self.times.append(times)
        self.parents.append(parents)
        self.depths.append(depth)
        self.count += times.shape[0]
        if self.count > NODE_CAP:
            raise SimulationBlowup(f"simulated tree exceeded {NODE_CAP} nodes")
        return idx

    def grow(self, params: HawkesParams, frontier_times: np.ndarray, frontier_idx: np.ndarray,
             frontier_depth: np.ndarray, horizon: float, rng: np.random.Generator) -> None:
        """Expand a frontier generation by generation under the full law."""
        while frontier_times.shape[0]:
            counts = rng.poisson(params.n_b, size=frontier_times.shape[0])
            total = int(counts.sum())
            if total == 0:
                break
            delays = sample_lognormal(params.kernel, total, rng)
            child_times = np.repeat(frontier_times, counts) + delays
            child_parents = np.repeat(frontier_idx, counts)
            child_depth = np.repeat(frontier_depth, counts) + 1
            keep = child_times <= horizon
            child_times = child_times[keep]
            child_parents = child_parents[keep]
            child_depth = child_depth[keep]
            idx = self.add(child_times, child_parents, child_depth)
            frontier_times, frontier_idx, frontier_depth = child_times, idx, child_depth

    def build(self, tree_id: str = "") -> TimedTree:
        return TimedTree(
            times=np.concatenate(self.times),
            parents=np.concatenate(self.parents),
            tree_id=tree_id,
            depths=np.concatenate(self.depths),
        )


def simulate_tree(params: HawkesParams, horizon: float, rng: np.random.Generator) -> TimedTree:
    """Exact draw of a tree up to the time horizon (inf for the full tree).

    A horizon at or below 0 is not an error: nothing lands inside, so the
    result is the bare root.
    """
    b = _Builder()
    if horizon <= 0:
        return b.build()
    k = rng.poisson(params.root.a)
    root_times = sample_weibull(params.root, k, rng)
    root_times = root_times[root_times <= horizon]
    m = root_times.shape[0]
    idx = b.add(root_times, np.zeros(m, dtype=np.int64), np.ones(m, dtype=np.int64))
    b.grow(params, root_times, idx, np.ones(m, dtype=np.int64), horizon, rng)
    return b.build()


def simulate_conditional(
    params: HawkesParams,
    observed: TimedTree,
    t_learn: float,
    horizon: float,
    rng: np.random.Generator,
) -> TimedTree:
    """Continue an observed tree past t_learn by the exact conditional law.

    The root spawns residual children (thinned rate a * S_Weib(t_learn)) at
    truncated-Weibull times; every observed comment spawns residual children
    (rate n_b * S_LogN(t_learn - tau)) at truncated-lognormal delays; new
    nodes grow under the unconditional law. Observed nodes keep their indices.
    """
    if observed.n and observed.times.max() > t_learn:
        raise InvalidWindow("observed tree extends past t_learn")
    if horizon < t_learn:
        raise InvalidWindow("horizon before t_learn")
    b = _Builder()
    b.seed_observed(observed)
    depths = node_depths(observed)

    frontier_t: list[np.ndarray] = []
    frontier_i: list[np.ndarray] = []
    frontier_d: list[np.ndarray] = []

    surv_root = 1.0 if t_learn <= 0 else float(np.exp(-((t_learn / params.root.b) ** params.root.alpha)))
    k = rng.poisson(params.root.a * surv_root)
    rt = sample_weibull_truncated(params.root, t_learn, k, rng)
    rt = rt[rt <= horizon]
    idx = b.add(rt, np.zeros(rt.shape[0], dtype=np.int64), np.ones(rt.shape[0], dtype=np.int64))
    frontier_t.append(rt)
    frontier_i.append(idx)
    frontier_d.append(np.ones(rt.shape[0], dtype=np.int64))

    if observed.n > 1:
        ctimes = observed.times[1:]
        ages = t_learn - ctimes
        surv = 1.0 - logn_cdf(ages, params.kernel)
        counts = rng.poisson(params.n_b * surv)
        total = int(counts.sum())
        if total:
            lowers = np.repeat(ages, counts)
            delays = sample_lognormal_truncated(params.kernel, lowers, total, rng)
            child_times = np.repeat(ctimes, counts) + delays
            child_parents = np.repeat(np.arange(1, observed.n, dtype=np.int64), counts)
            child_depth = np.repeat(depths[1:], counts) + 1
            keep = child_times <= horizon
            idx = b.add(child_times[keep], child_parents[keep], child_depth[keep])
            frontier_t.append(child_times[keep])
            frontier_i.append(idx)
            frontier_d.append(child_depth[keep])

    ft = np.concatenate(frontier_t) if frontier_t else np.zeros(0)
    fi = np.concatenate(frontier_i) if frontier_i else np.zeros(0, dtype=np.int64)
    fd = np.concatenate(frontier_d) if frontier_d else np.zeros(0, dtype=np.int64)
    b.grow(params, ft, fi, fd, horizon, rng)
    return b.build(tree_id=observed.tree_id)


def predict_size(
    params: HawkesParams,
    observed: TimedTree,
    t_learn: float,
    runs: int,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray]:
    """Mean final size over conditional simulations (and the size draws)."""
    sizes = np.empty(runs, dtype=np.int64)
    for r in range(runs):
        sizes[r] = simulate_conditional(params, observed, t_learn, np.inf, rng).n
    return float(sizes.mean()), sizes


def nll_future(params: HawkesParams, tree: TimedTree, t_learn: float) -> float:
    """Negative log-likelihood of the comments after t_learn, given the
    realized history, up to the tree's last comment time.

    Event term: lambda at each future comment (history = all earlier
    comments). Compensator: integral of lambda over (t_learn, T_end].
    """
    if t_learn < 0:
        raise InvalidWindow(f"t_learn must be >= 0, got {t_learn}")
    series = event_series(tree)
    future = series[series > t_learn]
    if future.shape[0] == 0:
        raise NoFutureEvents(f"no comments after t_learn={t_learn}")
    t_end = float(series[-1])

    log_term = 0.0
    chunk = 512
    for lo in range(0, future.shape[0], chunk):
        blk = future[lo : lo + chunk]
        lam = weib_intensity(blk, params.root)
        diffs = blk[:, None] - series[None, :]
        lam = lam + params.n_b * np.sum(logn_pdf(diffs, params.kernel), axis=1)
        # floor against underflow with degenerate fitted params
        log_term += float(np.sum(np.log(np.maximum(lam, 1e-300))))

    comp = float(weib_mass(t_end, params.root)) - float(weib_mass(t_learn, params.root))
    comp += params.n_b * float(
        np.sum(logn_cdf(t_end - series, params.kernel) - logn_cdf(t_learn - series, params.kernel))
    )
    return comp - log_term


def fit_hawkes(
    tree: TimedTree,
    t_learn: float,
    fallback_kernel: LognormKernel | None = None,
) -> HawkesFit:
    """Fit all six parameters to the tree as observed at t_learn (inf = full).

    Root (a, b, alpha) by censored Weibull likelihood on root response times;
    (mu, sigma) by censored lognormal likelihood on comment reply delays with
    every observed non-root node as a censoring parent; n_b by the degree
    estimate (mean forward degree), clamped to [0, 1). Trees with fewer than
    two reply delays use fallback_kernel (flag "pooled_kernel") or, failing
    that, a unit default (flag "default_kernel"); with no comments at all the
    fit raises InsufficientData.
    """
    sub = truncate(tree, t_learn) if np.isfinite(t_learn) else tree
    if sub.n < 2:
        raise InsufficientData("no comments observed by t_learn")
    flags: list[str] = []
    n_b_raw = branching_number(sub)
    n_b = min(max(n_b_raw, 0.0), NB_CLAMP)
    if n_b != n_b_raw:
        flags.append("nb_clamped")

    rt = response_times(sub)
    t_obs = t_learn if np.isfinite(t_learn) else np.inf
    root_fit: WeibullFit = fit_weibull_intensity(rt.root, t_obs)

    kern_fit: LognormFit | None = None
    if rt.delays.shape[0] >= 2:
        kern_fit = fit_lognormal_kernel(rt.delays, sub.times[1:], t_obs, n_b)
        kernel = kern_fit.params
    elif fallback_kernel is not None:
        kernel = fallback_kernel
        flags.append("pooled_kernel")
    else:
        kernel = LognormKernel(mu=0.0, sigma=1.0)
        flags.append("default_kernel")

    loglik = root_fit.loglik + (kern_fit.loglik if kern_fit is not None else 0.0)
    converged = root_fit.converged and (kern_fit is None or kern_fit.converged)
    params = HawkesParams(root=root_fit.params, kernel=kernel, n_b=n_b)
    return HawkesFit(
        params=params,
        n_b_raw=n_b_raw,
        loglik=float(loglik),
        converged=bool(converged),
        flags=tuple(flags),
    )
