"""Root intensity (Weibull) and reply kernel (lognormal): densities,
samplers, censored log-likelihoods with analytic gradients, and fits.

Times are hours. All likelihoods are exact point-process likelihoods on the
observation window [0, T_obs]; T_obs = inf means full observation, where the
Weibull compensator saturates at a and the lognormal kernel MLE has the
closed form (mean / population variance of log delays).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr, ndtri

from .errors import InvalidParams, InvalidWindow, OptimizerFailure, TooFewEvents

__all__ = [
    "WeibullIntensity",
    "LognormKernel",
    "WeibullFit",
    "LognormFit",
    "TIME_FLOOR_H",
    "weib_intensity",
    "weib_mass",
    "weibull_loglik",
    "weibull_loglik_grad",
    "sample_weibull",
    "sample_weibull_truncated",
    "logn_pdf",
    "logn_logpdf",
    "logn_cdf",
    "logn_quantile",
    "sample_lognormal",
    "sample_lognormal_truncated",
    "lognormal_kernel_loglik",
    "lognormal_kernel_loglik_grad",
    "fit_weibull_intensity",
    "fit_lognormal_kernel",
]

# Delays of exactly 0 (tied 1 s timestamps) are floored at half a second
# before any log is taken.
TIME_FLOOR_H = 0.5 / 3600.0

A_BOUNDS = (1e-6, 1e6)
B_BOUNDS = (1e-4, 1e4)
ALPHA_BOUNDS = (0.05, 20.0)
MU_BOUNDS = (-20.0, 20.0)
SIGMA_BOUNDS = (1e-3, 20.0)

LBFGSB_OPTIONS = {"maxiter": 500, "gtol": 1e-6}

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class WeibullIntensity:
    """Root response intensity a * Weibull(b, alpha) density; a is the
    expected number of direct replies over an infinite horizon."""

    a: float
    b: float
    alpha: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.alpha > 0):
            raise InvalidParams(f"Weibull intensity needs a, b, alpha > 0, got {self}")


@dataclass(frozen=True)
class LognormKernel:
    """Reply delay kernel LogN(mu, sigma); delays in hours."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise InvalidParams(f"kernel needs sigma > 0, got {self}")


@dataclass(frozen=True)
class WeibullFit:
    params: WeibullIntensity
    loglik: float
    converged: bool
    n_events: int


@dataclass(frozen=True)
class LognormFit:
    params: LognormKernel
    loglik: float
    converged: bool
    n_events: int


def _pow_u(t: np.ndarray | float, b: float, alpha: float) -> np.ndarray | float:
    """(t/b)^alpha computed in log space with overflow clipped to stay finite."""
    return np.exp(np.clip(alpha * np.log(np.asarray(t, dtype=np.float64) / b), -745.0, 700.0))


def weib_intensity(t: np.ndarray | float, p: WeibullIntensity) -> np.ndarray:
    """Intensity a*(alpha/b)*(t/b)^(alpha-1)*exp(-(t/b)^alpha); 0 for t <= 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    u = _pow_u(tp, p.b, p.alpha)
    out[pos] = p.a * (p.alpha / p.b) * np.exp((p.alpha - 1.0) * np.log(tp / p.b) - u)
    if out.ndim == 0:
        return float(out)
    return out


def weib_mass(t: np.ndarray | float, p: WeibullIntensity) -> np.ndarray:
    """Expected root responses by time t: a*(1 - exp(-(t/b)^alpha))."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = p.a * (-np.expm1(-_pow_u(t[pos], p.b, p.alpha)))
    if out.ndim == 0:
        return float(out)
    return out


def weibull_loglik(theta: np.ndarray, times: np.ndarray, t_obs: float, n_processes: int = 1) -> float:
    """Log-likelihood of root response times on [0, t_obs] under (a, b, alpha).

    n_processes > 1 pools several trees observed over the same window: the
    point terms use the concatenated times, the compensator is counted once
    per tree.
    """
    a, b, alpha = theta
    k = times.shape[0]
    logtb = np.log(times / b)
    u = np.exp(np.clip(alpha * logtb, -745.0, 700.0))
    point = k * np.log(a) + k * np.log(alpha / b) + np.sum((alpha - 1.0) * logtb - u)
    if np.isinf(t_obs):
        comp = a
    else:
        comp = a * (-np.expm1(-_pow_u(t_obs, b, alpha)))
    return float(point - n_processes * comp)


def weibull_loglik_grad(theta: np.ndarray, times: np.ndarray, t_obs: float, n_processes: int = 1) -> np.ndarray:
    """Gradient of weibull_loglik in (a, b, alpha)."""
    a, b, alpha = theta
    k = times.shape[0]
    logtb = np.log(times / b)
    u = np.exp(np.clip(alpha * logtb, -745.0, 700.0))
    if np.isinf(t_obs):
        ga = k / a - 1.0 * n_processes
        gb_comp = 0.0
        galpha_comp = 0.0
    else:
        logTb = np.log(t_obs / b)
        U = np.exp(np.clip(alpha * logTb, -745.0, 700.0))
        eU = np.exp(-U)
        ga = k / a - n_processes * (1.0 - eU)
        gb_comp = n_processes * a * (alpha / b) * U * eU
        galpha_comp = -n_processes * a * U * logTb * eU
    gb = -k * alpha / b + (alpha / b) * np.sum(u) + gb_comp
    galpha = k / alpha + np.sum(logtb * (1.0 - u)) + galpha_comp
    return np.array([ga, gb, galpha])


def sample_weibull(p: WeibullIntensity, count: int, rng: np.random.Generator) -> np.ndarray:
    """count draws from Weibull(b, alpha) (response times, not the rate a)."""
    return p.b * rng.weibull(p.alpha, size=count)


def sample_weibull_truncated(
    p: WeibullIntensity, lower: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draws conditioned on t > lower, by survival inversion."""
    if lower <= 0:
        return sample_weibull(p, count, rng)
    v = 1.0 - rng.random(count)
    base = (lower / p.b) ** p.alpha
    return p.b * (base - np.log(v)) ** (1.0 / p.alpha)


def logn_logpdf(t: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    z = (np.log(t) - mu) / sigma
    return -np.log(t) - np.log(sigma) - 0.5 * _LOG_2PI - 0.5 * z * z


def logn_pdf(t: np.ndarray | float, p: LognormKernel) -> np.ndarray:
    """Lognormal density; 0 for t <= 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(logn_logpdf(t[pos], p.mu, p.sigma))
    if out.ndim == 0:
        return float(out)
    return out


def logn_cdf(t: np.ndarray | float, p: LognormKernel) -> np.ndarray:
    """Lognormal CDF; 0 for t <= 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = ndtr((np.log(t[pos]) - p.mu) / p.sigma)
    if out.ndim == 0:
        return float(out)
    return out


def logn_quantile(q: np.ndarray | float, p: LognormKernel) -> np.ndarray:
    """Inverse CDF; q in (0, 1)."""
    return np.exp(p.mu + p.sigma * ndtri(q))


def sample_lognormal(p: LognormKernel, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.lognormal(p.mu, p.sigma, size=count)


def sample_lognormal_truncated(
    p: LognormKernel, lower: np.ndarray | float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draws conditioned on t > lower, by CDF inversion.

    lower may be an array of per-draw truncation points (count must match);
    entries <= 0 fall back to the unconditional law.
    """
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (count,))
    fl = logn_cdf(lower, p)
    u = rng.random(count)
    q = fl + u * (1.0 - fl)
    q = np.minimum(q, np.nextafter(1.0, 0.0))
    return logn_quantile(q, p)


def lognormal_kernel_loglik(
    theta: np.ndarray,
    delays: np.ndarray,
    parent_windows: np.ndarray,
    n_b: float,
) -> float:
    """Censored kernel log-likelihood under (mu, sigma).

    delays are realized reply delays; parent_windows are the censoring spans
    T_obs - tau_parent of EVERY candidate parent (each non-root node observed
    by T_obs), including parents with no replies. An infinite window
    contributes the constant n_b to the compensator.
    """
    mu, sigma = theta
    point = float(np.sum(logn_logpdf(delays, mu, sigma)))
    w = np.asarray(parent_windows, dtype=np.float64)
    comp = n_b * float(np.sum(logn_cdf(w, LognormKernel(mu, sigma))))
    return point - comp


def lognormal_kernel_loglik_grad(
    theta: np.ndarray,
    delays: np.ndarray,
    parent_windows: np.ndarray,
    n_b: float,
) -> np.ndarray:
    """Gradient of lognormal_kernel_loglik in (mu, sigma)."""
    mu, sigma = theta
    z = (np.log(delays) - mu) / sigma
    gmu = np.sum(z) / sigma
    gsigma = np.sum(z * z - 1.0) / sigma
    w = np.asarray(parent_windows, dtype=np.float64)
    w = w[np.isfinite(w) & (w > 0)]
    if w.size:
        y = (np.log(w) - mu) / sigma
        phi = np.exp(-0.5 * y * y) / np.sqrt(2.0 * np.pi)
        gmu += n_b * np.sum(phi) / sigma
        gsigma += n_b * np.sum(phi * y) / sigma
    return np.array([gmu, gsigma])


def _multistart_minimize(objective, starts, bounds):
    """Best of several bounded L-BFGS-B runs on a (fun, grad) objective."""
    best = None
    for x0 in starts:
        x0 = np.clip(np.asarray(x0, dtype=np.float64), [lo for lo, _ in bounds], [hi for _, hi in bounds])
        res = minimize(objective, x0, jac=True, method="L-BFGS-B", bounds=bounds, options=LBFGSB_OPTIONS)
        if not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise OptimizerFailure("no start reached a finite objective value")
    return best


def fit_weibull_intensity(
    root_times: np.ndarray,
    t_obs: float,
    n_processes: int = 1,
    fix_alpha: float | None = None,
) -> WeibullFit:
    """Maximum-likelihood (a, b, alpha) from root response times on [0, t_obs].

    Needs at least one event. Five deterministic starts around a
    moments-based initial guess; bounded quasi-Newton with the analytic
    gradient. fix_alpha pins the shape so only (a, b) are free.
    """
    times = np.maximum(np.asarray(root_times, dtype=np.float64), TIME_FLOOR_H)
    k = times.shape[0]
    if k < 1:
        raise TooFewEvents("weibull fit needs at least one root response")
    if not np.isinf(t_obs) and times.max() > t_obs:
        raise InvalidWindow("root response beyond t_obs")
    alpha_bounds = ALPHA_BOUNDS if fix_alpha is None else (fix_alpha, fix_alpha)
    bounds = [A_BOUNDS, B_BOUNDS, alpha_bounds]
    b0 = float(np.mean(times))
    a0 = k / n_processes
    starts = [
        (a0, b0, 1.0),
        (a0, 0.5 * b0, 0.6),
        (a0, 2.0 * b0, 1.5),
        (a0, 0.25 * b0, 0.8),
        (a0, 4.0 * b0, 1.2),
    ]

    def objective(theta):
        return (
            -weibull_loglik(theta, times, t_obs, n_processes),
            -weibull_loglik_grad(theta, times, t_obs, n_processes),
        )

    res = _multistart_minimize(objective, starts, bounds)
    params = WeibullIntensity(a=float(res.x[0]), b=float(res.x[1]), alpha=float(res.x[2]))
    return WeibullFit(params=params, loglik=float(-res.fun), converged=bool(res.success), n_events=k)


def fit_lognormal_kernel(
    delays: np.ndarray,
    parent_times: np.ndarray,
    t_obs: float,
    n_b: float,
) -> LognormFit:
    """Maximum-likelihood (mu, sigma) from reply delays with per-parent censoring.

    parent_times are the birth times of every candidate parent (all non-root
    nodes at or before t_obs); the compensator censors each at t_obs - birth.
    With t_obs = inf the MLE is closed-form: mean and population variance of
    the log delays (the compensator is constant there).
    """
    delays = np.maximum(np.asarray(delays, dtype=np.float64), TIME_FLOOR_H)
    k = delays.shape[0]
    if k < 2:
        raise TooFewEvents("kernel fit needs at least two reply delays")
    logd = np.log(delays)
    if np.isinf(t_obs):
        mu = float(np.mean(logd))
        sigma = float(np.sqrt(np.mean((logd - mu) ** 2)))
        sigma = min(max(sigma, SIGMA_BOUNDS[0]), SIGMA_BOUNDS[1])
        ll = lognormal_kernel_loglik(
            np.array([mu, sigma]), delays, np.full(parent_times.shape, np.inf), n_b
        )
        return LognormFit(params=LognormKernel(mu, sigma), loglik=float(ll), converged=True, n_events=k)

    windows = t_obs - np.asarray(parent_times, dtype=np.float64)
    if np.any(windows < 0):
        raise InvalidWindow("candidate parent born after t_obs")
    bounds = [MU_BOUNDS, SIGMA_BOUNDS]
    mu0 = float(np.mean(logd))
    s0 = max(float(np.std(logd)), 0.05)
    starts = [(mu0, s0), (mu0 - 0.5, s0), (mu0 + 0.5, s0), (mu0, 1.5 * s0), (mu0, 0.7 * s0)]

    def objective(theta):
        return (
            -lognormal_kernel_loglik(theta, delays, windows, n_b),
            -lognormal_kernel_loglik_grad(theta, delays, windows, n_b),
        )

    res = _multistart_minimize(objective, starts, bounds)
    params = LognormKernel(mu=float(res.x[0]), sigma=float(res.x[1]))
    return LognormFit(params=params, loglik=float(-res.fun), converged=bool(res.success), n_events=k)
