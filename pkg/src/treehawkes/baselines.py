"""Baseline growth models: preferential attachment (structure), dynamic
Poisson (timing), and reinforced Poisson (timing with reinforcement).

PA works on arrival order alone; DP and RPP work on the comment time series
with tree structure ignored. All fits use bounded L-BFGS-B with analytic
gradients and deterministic multi-starts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import InvalidOrder, InvalidParams, InvalidWindow, NoFutureEvents, TooFewEvents, TooSmall
from .kernels import (
    MU_BOUNDS,
    SIGMA_BOUNDS,
    TIME_FLOOR_H,
    LognormKernel,
    _multistart_minimize,
    logn_cdf,
    logn_logpdf,
    logn_quantile,
)
from .tree import TimedTree, node_depths

__all__ = [
    "PAParams",
    "PAFit",
    "DPParams",
    "DPFit",
    "RPPParams",
    "RPPFit",
    "arrival_order",
    "pa_loglik",
    "pa_loglik_grad",
    "pa_likelihood",
    "fit_pa",
    "simulate_pa",
    "dp_loglik",
    "dp_loglik_grad",
    "fit_dp",
    "dp_nll_future",
    "dp_sample_future",
    "dp_predict_size",
    "rpp_reinforcement",
    "rpp_intensity",
    "rpp_loglik",
    "rpp_loglik_grad",
    "fit_rpp",
    "rpp_nll_future",
    "rpp_sample_future",
    "rpp_predict_size",
]

BETA_BOUNDS = (1e-3, 1e3)
GAMMA_BOUNDS = (-2.0, 5.0)
TOTAL_BOUNDS = (1e-6, 1e9)
C_BOUNDS = (1e-6, 1e6)
D_BOUNDS = (1e-6, 10.0)

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


# ---------------------------------------------------------------- PA

@dataclass(frozen=True)
class PAParams:
    """Attachment weight (beta*d)^gamma_c for the root, d^gamma otherwise."""

    beta: float
    gamma_c: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise InvalidParams(f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class PAFit:
    params: PAParams
    loglik: float
    converged: bool
    n_events: int


def arrival_order(tree: TimedTree) -> np.ndarray:
    """Node indices sorted by (time, depth, index); the root arrives first."""
    d = node_depths(tree)
    return np.lexsort((np.arange(tree.n), d, tree.times))


@dataclass(frozen=True)
class _PASequence:
    """Parameter-independent attachment sequence (arrivals 2..n, 0-based 1..n-1)."""

    deg_before: np.ndarray  # parent degree before each attachment
    is_root: np.ndarray     # parent is the root
    root_before: np.ndarray  # root degree before each attachment


def _pa_sequence(tree: TimedTree, order: np.ndarray | None = None) -> _PASequence:
    if order is None:
        order = arrival_order(tree)
    n = tree.n
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    deg = np.zeros(n, dtype=np.int64)
    deg_before = np.empty(n - 1, dtype=np.int64)
    is_root = np.empty(n - 1, dtype=bool)
    root_before = np.empty(n - 1, dtype=np.int64)
    parents = tree.parents
    for m in range(1, n):
        node = order[m]
        p = parents[node]
        if pos[p] >= m:
            raise InvalidOrder("arrival order places a child before its parent")
        deg_before[m - 1] = deg[p]
        is_root[m - 1] = p == 0
        root_before[m - 1] = deg[0]
        deg[p] += 1
        deg[node] += 1
    return _PASequence(deg_before=deg_before, is_root=is_root, root_before=root_before)


def _pa_terms(theta: np.ndarray, seq: _PASequence):
    """Per-arrival weight/normalizer pieces for arrivals 3..n."""
    beta, gamma_c, gamma = theta
    d = seq.deg_before[1:].astype(np.float64)
    isr = seq.is_root[1:]
    r = seq.root_before[1:].astype(np.float64)

    # non-root weight sum S before each arrival, via cumulative deltas:
    # each earlier arrival adds a degree-1 node (weight 1) and, if it attached
    # to a non-root parent of degree q, changes that parent q^g -> (q+1)^g.
    q = seq.deg_before[:-1].astype(np.float64)
    nonroot_prev = ~seq.is_root[:-1]
    qg = np.where(nonroot_prev, np.exp(gamma * np.log(np.maximum(q, 1.0))), 0.0)
    q1g = np.where(nonroot_prev, np.exp(gamma * np.log(q + 1.0)), 0.0)
    deltas = 1.0 + (q1g - qg)
    s = np.cumsum(deltas)

    log_br = np.log(beta * r)
    root_w = np.exp(gamma_c * log_br)
    z = root_w + s
    return d, isr, r, s, log_br, root_w, z, qg, q1g, nonroot_prev, q


def pa_loglik(theta: np.ndarray, tree: TimedTree, order: np.ndarray | None = None) -> float:
    """Log-probability of the attachment sequence under (beta, gamma_c, gamma).

    The second arrival is a forced choice (only the degree-0 root exists) and
    contributes 0; trees with n < 3 therefore carry no information.
    """
    seq = _pa_sequence(tree, order)
    if seq.deg_before.shape[0] < 2:
        return 0.0
    d, isr, r, s, log_br, root_w, z, *_ = _pa_terms(np.asarray(theta, dtype=np.float64), seq)
    gamma_c, gamma = theta[1], theta[2]
    logw = np.where(isr, gamma_c * log_br, gamma * np.log(np.maximum(d, 1.0)))
    return float(np.sum(logw - np.log(z)))


def pa_loglik_grad(theta: np.ndarray, tree: TimedTree, order: np.ndarray | None = None) -> np.ndarray:
    """Gradient of pa_loglik in (beta, gamma_c, gamma)."""
    seq = _pa_sequence(tree, order)
    if seq.deg_before.shape[0] < 2:
        return np.zeros(3)
    theta = np.asarray(theta, dtype=np.float64)
    beta, gamma_c, gamma = theta
    d, isr, r, s, log_br, root_w, z, qg, q1g, nonroot_prev, q = _pa_terms(theta, seq)

    logd = np.log(np.maximum(d, 1.0))
    n_root = float(np.count_nonzero(isr))

    gbeta = (gamma_c / beta) * (n_root - np.sum(root_w / z))
    ggamma_c = float(np.sum(np.where(isr, log_br, 0.0)) - np.sum(root_w * log_br / z))

    dq1g = q1g * np.log(np.maximum(q + 1.0, 1.0))
    dqg = qg * np.where(nonroot_prev, np.log(np.maximum(q, 1.0)), 0.0)
    ds = np.cumsum(dq1g - dqg)
    ggamma = float(np.sum(np.where(isr, 0.0, logd)) - np.sum(ds / z))
    return np.array([gbeta, ggamma_c, ggamma])


def pa_likelihood(tree: TimedTree, params: PAParams, order: np.ndarray | None = None) -> float:
    """pa_loglik on named parameters."""
    return pa_loglik(np.array([params.beta, params.gamma_c, params.gamma]), tree, order)


def fit_pa(tree: TimedTree, order: np.ndarray | None = None) -> PAFit:
    """Maximum-likelihood (beta, gamma_c, gamma) for the attachment sequence."""
    if tree.n < 3:
        raise TooSmall("PA fit needs at least 3 nodes")
    seq = _pa_sequence(tree, order)

    def objective(theta):
        if seq.deg_before.shape[0] < 2:
            return 0.0, np.zeros(3)
        d, isr, r, s, log_br, root_w, z, qg, q1g, nonroot_prev, q = _pa_terms(theta, seq)
        beta, gamma_c, gamma = theta
        logd = np.log(np.maximum(d, 1.0))
        logw = np.where(isr, gamma_c * log_br, gamma * logd)
        ll = float(np.sum(logw - np.log(z)))
        n_root = float(np.count_nonzero(isr))
        gbeta = (gamma_c / beta) * (n_root - np.sum(root_w / z))
        ggamma_c = float(np.sum(np.where(isr, log_br, 0.0)) - np.sum(root_w * log_br / z))
        dq1g = q1g * np.log(np.maximum(q + 1.0, 1.0))
        dqg = qg * np.where(nonroot_prev, np.log(np.maximum(q, 1.0)), 0.0)
        ds = np.cumsum(dq1g - dqg)
        ggamma = float(np.sum(np.where(isr, 0.0, logd)) - np.sum(ds / z))
        return -ll, -np.array([gbeta, ggamma_c, ggamma])

    bounds = [BETA_BOUNDS, GAMMA_BOUNDS, GAMMA_BOUNDS]
    starts = [(1.0, 1.0, 1.0), (1.0, 0.5, 0.5), (1.0, 2.0, 1.5), (0.5, 1.0, 0.2), (2.0, 0.2, 1.0)]
    res = _multistart_minimize(objective, starts, bounds)
    params = PAParams(beta=float(res.x[0]), gamma_c=float(res.x[1]), gamma=float(res.x[2]))
    return PAFit(params=params, loglik=float(-res.fun), converged=bool(res.success), n_events=tree.n - 2)


def simulate_pa(params: PAParams, n: int, rng: np.random.Generator) -> TimedTree:
    """Structure-only tree of n nodes grown by preferential attachment.

    Node times are all 0 (PA carries no clock); node index equals arrival
    rank. The second node attaches to the root with probability 1.
    """
    if n < 1:
        raise InvalidParams(f"need n >= 1 nodes, got {n}")
    parents = np.zeros(n, dtype=np.int64)
    parents[0] = -1
    depths = np.zeros(n, dtype=np.int64)
    if n >= 2:
        depths[1] = 1
    if n >= 3:
        deg = np.zeros(n, dtype=np.int64)
        deg[0] = 1
        deg[1] = 1
        w = np.zeros(n, dtype=np.float64)
        w[0] = (params.beta * 1.0) ** params.gamma_c
        w[1] = 1.0
        for m in range(2, n):
            cs = np.cumsum(w[:m])
            u = rng.random() * cs[-1]
            k = int(np.searchsorted(cs, u, side="right"))
            k = min(k, m - 1)
            parents[m] = k
            deg[k] += 1
            deg[m] = 1
            depths[m] = depths[k] + 1
            w[k] = (params.beta * deg[0]) ** params.gamma_c if k == 0 else float(deg[k]) ** params.gamma
            w[m] = 1.0
    return TimedTree(times=np.zeros(n), parents=parents, depths=depths)


# ---------------------------------------------------------------- DP

@dataclass(frozen=True)
class DPParams:
    """Inhomogeneous Poisson: lambda(t) = total * LogN(mu, sigma) density."""

    total: float
    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not (self.total > 0 and self.sigma > 0):
            raise InvalidParams(f"DP needs total, sigma > 0, got {self}")

    def kernel(self) -> LognormKernel:
        return LognormKernel(self.mu, self.sigma)


@dataclass(frozen=True)
class DPFit:
    params: DPParams
    loglik: float
    converged: bool
    n_events: int


def dp_loglik(theta: np.ndarray, times: np.ndarray, t_obs: float) -> float:
    """Censored Poisson log-likelihood of comment times on [0, t_obs]."""
    total, mu, sigma = theta
    k = times.shape[0]
    point = k * np.log(total) + float(np.sum(logn_logpdf(times, mu, sigma)))
    f = 1.0 if np.isinf(t_obs) else float(ndtr((np.log(t_obs) - mu) / sigma))
    return point - total * f


def dp_loglik_grad(theta: np.ndarray, times: np.ndarray, t_obs: float) -> np.ndarray:
    total, mu, sigma = theta
    k = times.shape[0]
    z = (np.log(times) - mu) / sigma
    if np.isinf(t_obs):
        f, phi, y = 1.0, 0.0, 0.0
    else:
        y = (np.log(t_obs) - mu) / sigma
        f = float(ndtr(y))
        phi = float(np.exp(-0.5 * y * y) / _SQRT_2PI)
    gt = k / total - f
    gmu = float(np.sum(z)) / sigma + total * phi / sigma
    gs = float(np.sum(z * z - 1.0)) / sigma + total * phi * y / sigma
    return np.array([gt, gmu, gs])


def fit_dp(series: np.ndarray, t_learn: float) -> DPFit:
    """Maximum-likelihood (total, mu, sigma) from comments in (0, t_learn]."""
    times = np.asarray(series, dtype=np.float64)
    if np.isfinite(t_learn):
        times = times[times <= t_learn]
    times = np.maximum(times, TIME_FLOOR_H)
    k = times.shape[0]
    if k < 2:
        raise TooFewEvents("DP fit needs at least two events")
    logt = np.log(times)
    mu0 = float(np.mean(logt))
    s0 = max(float(np.std(logt)), 0.05)
    f0 = 1.0 if np.isinf(t_learn) else max(float(ndtr((np.log(t_learn) - mu0) / s0)), 1e-3)
    t0 = k / f0
    starts = [(t0, mu0, s0), (2 * t0, mu0, s0), (t0, mu0 + 0.5, 1.5 * s0), (t0, mu0 - 0.5, s0), (1.5 * t0, mu0, 2.0 * s0)]
    bounds = [TOTAL_BOUNDS, MU_BOUNDS, SIGMA_BOUNDS]

    def objective(theta):
        return -dp_loglik(theta, times, t_learn), -dp_loglik_grad(theta, times, t_learn)

    res = _multistart_minimize(objective, starts, bounds)
    params = DPParams(total=float(res.x[0]), mu=float(res.x[1]), sigma=float(res.x[2]))
    return DPFit(params=params, loglik=float(-res.fun), converged=bool(res.success), n_events=k)


def dp_nll_future(params: DPParams, series: np.ndarray, t_learn: float, t_end: float) -> float:
    """NLL of the comments in (t_learn, t_end]."""
    if t_end < t_learn:
        raise InvalidWindow(f"t_end {t_end} before t_learn {t_learn}")
    series = np.asarray(series, dtype=np.float64)
    future = series[(series > t_learn) & (series <= t_end)]
    if future.shape[0] == 0:
        raise NoFutureEvents(f"no comments after t_learn={t_learn}")
    kern = params.kernel()
    lam = params.total * np.exp(logn_logpdf(np.maximum(future, TIME_FLOOR_H), params.mu, params.sigma))
    comp = params.total * float(logn_cdf(t_end, kern) - logn_cdf(t_learn, kern))
    return comp - float(np.sum(np.log(np.maximum(lam, 1e-300))))


def dp_sample_future(params: DPParams, t_learn: float, rng: np.random.Generator) -> np.ndarray:
    """Comment times after t_learn: Poisson count with remaining mass, each
    time an independent lognormal draw conditioned above t_learn (inversion)."""
    kern = params.kernel()
    f = float(logn_cdf(t_learn, kern))
    count = int(rng.poisson(params.total * (1.0 - f)))
    if count == 0:
        return np.zeros(0)
    q = f + (1.0 - f) * rng.random(count)
    q = np.minimum(q, np.nextafter(1.0, 0.0))
    return np.sort(logn_quantile(q, kern))


def dp_predict_size(
    params: DPParams, observed_size: int, t_learn: float, runs: int, rng: np.random.Generator
) -> tuple[float, np.ndarray]:
    """Mean final size over simulated futures (observed nodes plus new
    comments). A future contributes only its event count to size, so the
    count draws are taken without materializing event times (same law as
    len(dp_sample_future(...)) per run)."""
    remaining = params.total * (1.0 - float(logn_cdf(t_learn, params.kernel())))
    sizes = observed_size + rng.poisson(remaining, size=runs)
    return float(sizes.mean()), sizes


# ---------------------------------------------------------------- RPP

@dataclass(frozen=True)
class RPPParams:
    """Reinforced Poisson: lambda(t) = c * LogN(mu, sigma) density * r(k)."""

    c: float
    mu: float
    sigma: float
    d: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and self.sigma > 0 and self.d > 0):
            raise InvalidParams(f"RPP needs c, sigma, d > 0, got {self}")

    def kernel(self) -> LognormKernel:
        return LognormKernel(self.mu, self.sigma)


@dataclass(frozen=True)
class RPPFit:
    params: RPPParams
    loglik: float
    converged: bool
    n_events: int


def rpp_reinforcement(k: np.ndarray | int, d: float) -> np.ndarray | float:
    """r(k) = sum_{i=1}^{k} exp(-d i), geometric partial sum."""
    k = np.asarray(k, dtype=np.float64)
    e = np.exp(-d)
    out = e * (1.0 - np.exp(-d * k)) / (1.0 - e)
    if out.ndim == 0:
        return float(out)
    return out


def rpp_intensity(t: np.ndarray | float, k: int, params: RPPParams) -> np.ndarray | float:
    """Intensity at t when the running event count (post included) is k."""
    pdf = np.exp(logn_logpdf(np.asarray(t, dtype=np.float64), params.mu, params.sigma))
    out = params.c * pdf * rpp_reinforcement(k, params.d)
    if out.ndim == 0:
        return float(out)
    return out


def _logn_edge_stats(edges: np.ndarray, mu: float, sigma: float):
    """CDF, standard-normal density phi(y) and phi(y)*y at log-transformed
    edge points; an edge of 0 maps to (0, 0, 0), an edge of inf to (1, 0, 0)."""
    cdf = np.zeros(edges.shape)
    phi = np.zeros(edges.shape)
    phiy = np.zeros(edges.shape)
    fin = (edges > 0) & np.isfinite(edges)
    y = (np.log(edges[fin]) - mu) / sigma
    cdf[fin] = ndtr(y)
    p = np.exp(-0.5 * y * y) / _SQRT_2PI
    phi[fin] = p
    phiy[fin] = p * y
    cdf[np.isinf(edges)] = 1.0
    return cdf, phi, phiy


def rpp_loglik(theta: np.ndarray, times: np.ndarray, t_obs: float) -> float:
    """Log-likelihood of comments in (0, t_obs]; count seeded at 1 (the post)."""
    c, mu, sigma, d = theta
    m = times.shape[0]
    kern_r = rpp_reinforcement(np.arange(1, m + 2), d)
    point = m * np.log(c) + float(np.sum(logn_logpdf(times, mu, sigma))) + float(
        np.sum(np.log(kern_r[:m]))
    )
    edges = np.concatenate([[0.0], times, [t_obs]])
    cdf, _, _ = _logn_edge_stats(edges, mu, sigma)
    comp = c * float(np.sum(kern_r * np.diff(cdf)))
    return point - comp


def rpp_loglik_grad(theta: np.ndarray, times: np.ndarray, t_obs: float) -> np.ndarray:
    c, mu, sigma, d = theta
    m = times.shape[0]
    idx = np.arange(1, m + 2, dtype=np.float64)
    expdi = np.exp(-d * idx)
    kern_r = np.cumsum(expdi)
    dr = -np.cumsum(idx * expdi)

    z = (np.log(times) - mu) / sigma
    edges = np.concatenate([[0.0], times, [t_obs]])
    cdf, phi, phiy = _logn_edge_stats(edges, mu, sigma)

    dcdf = np.diff(cdf)
    gc = m / c - float(np.sum(kern_r * dcdf))
    gd = float(np.sum(dr[:m] / kern_r[:m])) - c * float(np.sum(dr * dcdf))
    gmu = float(np.sum(z)) / sigma - c * float(np.sum(kern_r * np.diff(-phi / sigma)))
    gs = float(np.sum(z * z - 1.0)) / sigma - c * float(np.sum(kern_r * np.diff(-phiy / sigma)))
    return np.array([gc, gmu, gs, gd])


def fit_rpp(series: np.ndarray, t_learn: float) -> RPPFit:
    """Maximum-likelihood (c, mu, sigma, d) from comments in (0, t_learn]."""
    times = np.asarray(series, dtype=np.float64)
    if np.isfinite(t_learn):
        times = times[times <= t_learn]
    times = np.sort(np.maximum(times, TIME_FLOOR_H))
    m = times.shape[0]
    if m < 2:
        raise TooFewEvents("RPP fit needs at least two events")
    logt = np.log(times)
    mu0 = float(np.mean(logt))
    s0 = max(float(np.std(logt)), 0.05)

    def c_for(d0: float) -> float:
        kern_r = rpp_reinforcement(np.arange(1, m + 2), d0)
        edges = np.concatenate([[0.0], times, [t_learn]])
        cdf, _, _ = _logn_edge_stats(edges, mu0, s0)
        mass = float(np.sum(kern_r * np.diff(cdf)))
        return m / max(mass, 1e-9)

    # the (c, d) surface splits into basins by decay rate, so the starts
    # sweep d on a log grid with c matched to the observed mass at each
    starts = [
        (c_for(0.01), mu0, s0, 0.01),
        (c_for(0.03), mu0, s0, 0.03),
        (c_for(0.1), mu0, s0, 0.1),
        (c_for(0.3), mu0, s0, 0.3),
        (c_for(1.0), mu0, s0, 1.0),
        (2 * c_for(0.1), mu0 + 0.5, 1.5 * s0, 0.1),
    ]
    bounds = [C_BOUNDS, MU_BOUNDS, SIGMA_BOUNDS, D_BOUNDS]

    def objective(theta):
        return -rpp_loglik(theta, times, t_learn), -rpp_loglik_grad(theta, times, t_learn)

    res = _multistart_minimize(objective, starts, bounds)
    params = RPPParams(c=float(res.x[0]), mu=float(res.x[1]), sigma=float(res.x[2]), d=float(res.x[3]))
    return RPPFit(params=params, loglik=float(-res.fun), converged=bool(res.success), n_events=m)


def rpp_nll_future(params: RPPParams, series: np.ndarray, t_learn: float, t_end: float) -> float:
    """NLL of the comments in (t_learn, t_end]; the running count continues
    from the observed prefix (post included)."""
    if t_end < t_learn:
        raise InvalidWindow(f"t_end {t_end} before t_learn {t_learn}")
    series = np.sort(np.asarray(series, dtype=np.float64))
    past = series[series <= t_learn]
    future = series[(series > t_learn) & (series <= t_end)]
    if future.shape[0] == 0:
        raise NoFutureEvents(f"no comments after t_learn={t_learn}")
    m_obs = past.shape[0]
    mf = future.shape[0]
    g = m_obs + np.arange(1, mf + 1)  # global 1-based comment index of each future event
    rks = rpp_reinforcement(g, params.d)
    point = mf * np.log(params.c) + float(
        np.sum(logn_logpdf(np.maximum(future, TIME_FLOOR_H), params.mu, params.sigma))
    ) + float(np.sum(np.log(rks)))
    # piecewise-constant r(k) between events: k = m_obs + 1 + j on the j-th
    # inter-event interval, ending with [last future event, t_end]
    edges = np.concatenate([[t_learn], future, [t_end]])
    kern = params.kernel()
    cdf = logn_cdf(edges, kern)
    kr = rpp_reinforcement(m_obs + 1 + np.arange(mf + 1), params.d)
    comp = params.c * float(np.sum(kr * np.diff(cdf)))
    return comp - point


def _rpp_future_quantiles(
    params: RPPParams, observed_comments: int, f_learn: float, rng: np.random.Generator, cap: int
) -> np.ndarray:
    """Lognormal-CDF positions of future events, by inversion.

    In q = F(t) coordinates the process is a pure birth process with rate
    c * r(count); event k's spacing is Exp(1)/(c * r(k)) and the sample ends
    at q = 1. Spacings are drawn in blocks; terminates almost surely because
    r(k) is bounded by its geometric limit (finite remaining mass), with a
    hard cap against degenerate parameters.
    """
    pieces: list[np.ndarray] = []
    q = f_learn
    g = observed_comments
    total = 0
    block = 1024
    while total < cap:
        block = min(block, cap - total)
        r = rpp_reinforcement(np.arange(g + 1, g + block + 1, dtype=np.float64), params.d)
        u = q + np.cumsum(rng.exponential(size=block) / (params.c * r))
        hit = int(np.searchsorted(u, 1.0, side="left"))
        if hit < block:
            pieces.append(u[:hit])
            total += hit
            break
        pieces.append(u)
        total += block
        q = float(u[-1])
        g += block
    if not pieces:
        return np.zeros(0)
    return np.concatenate(pieces)


def rpp_sample_future(
    params: RPPParams,
    observed_comments: int,
    t_learn: float,
    rng: np.random.Generator,
    cap: int = 200_000,
) -> np.ndarray:
    """Future comment times after t_learn, by inversion; the running count
    continues from observed_comments."""
    kern = params.kernel()
    f = float(logn_cdf(t_learn, kern))
    qv = _rpp_future_quantiles(params, observed_comments, f, rng, cap)
    if qv.shape[0] == 0:
        return qv
    qv = np.minimum(qv, np.nextafter(1.0, 0.0))
    return logn_quantile(qv, kern)


def rpp_predict_size(
    params: RPPParams, observed_size: int, t_learn: float, runs: int, rng: np.random.Generator
) -> tuple[float, np.ndarray]:
    """Mean final size over simulated futures (observed nodes plus new
    comments). Only the event counts enter the size, so the quantile-to-time
    transform is skipped."""
    kern = params.kernel()
    f = float(logn_cdf(t_learn, kern))
    m_obs = max(observed_size - 1, 0)
    sizes = np.empty(runs, dtype=np.int64)
    for r in range(runs):
        sizes[r] = observed_size + _rpp_future_quantiles(params, m_obs, f, rng, 200_000).shape[0]
    return float(sizes.mean()), sizes
