"""Benchmark harness: cohort selection, learning-window sweeps, error
metrics, log-binned median aggregation, and CSV report emission.

Two experiments. The structure experiment fits the tree model and
preferential attachment to each fully observed tree, simulates paired
replicates (each PA tree gets the node count of the tree-model draw from the
same replicate), and scores depth profiles. The dynamics experiment fits the
tree model, dynamic Poisson and reinforced Poisson on each learning window
and scores held-out comments (NLL on a shared interval) and final-size
predictions.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np

from .baselines import (
    dp_nll_future,
    dp_predict_size,
    fit_dp,
    fit_pa,
    fit_rpp,
    rpp_nll_future,
    rpp_predict_size,
    simulate_pa,
)
from .errors import EmptyProfile, InvalidParams, TreeHawkesError
from .hawkes import fit_hawkes, nll_future, predict_size, simulate_tree
from .kernels import SIGMA_BOUNDS, TIME_FLOOR_H, LognormKernel
from .rng import substream
from .temporal import event_series
from .tree import TimedTree, depth_profile, response_times, truncate

__all__ = [
    "EvalConfig",
    "ReportRow",
    "SkipRow",
    "BinRow",
    "EvalReport",
    "parse_config",
    "config_text",
    "layer_profile_errors",
    "relative_size_error",
    "select_cohorts",
    "pooled_kernel",
    "run_structure_experiment",
    "run_dynamics_experiment",
    "bin_medians",
    "evaluate_forest",
    "write_report",
]

METRICS = ("nll_future", "eps_d_min", "eps_d_max", "eps_s", "remaining_fraction")

COHORT_NAMES = ("small", "large")


@dataclass(frozen=True)
class EvalConfig:
    """Protocol knobs; the defaults are the reference protocol.

    Cohorts are closed size ranges; a tree on the shared boundary goes to
    the small cohort. bins is the number of geometric size bins per cohort.
    """

    small: tuple[int, int] = (50, 200)
    large: tuple[int, int] = (200, 2000)
    sample_cap: int = 8000
    windows: tuple[float, ...] = (4.0, 6.0, 8.0, 12.0)
    runs: int = 50
    bins: int = 10
    seed: int = 42

    def __post_init__(self) -> None:
        for name in ("small", "large"):
            lo, hi = getattr(self, name)
            if not (1 <= lo <= hi):
                raise InvalidParams(f"{name} bounds must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        if not self.windows:
            raise InvalidParams("windows must be non-empty")
        if any(w <= 0 for w in self.windows):
            raise InvalidParams(f"windows must be positive, got {self.windows}")
        if self.runs < 1:
            raise InvalidParams(f"runs must be >= 1, got {self.runs}")
        if self.bins < 1:
            raise InvalidParams(f"bins must be >= 1, got {self.bins}")
        if self.sample_cap < 1:
            raise InvalidParams(f"sample_cap must be >= 1, got {self.sample_cap}")


def parse_config(text: str, default: EvalConfig | None = None) -> EvalConfig:
    """EvalConfig from `key = value` lines; # starts a comment.

    Pair fields take two integers, windows a list of hours; unknown keys are
    rejected. Missing keys keep the values of `default` (protocol defaults
    when not given).
    """
    overrides = {}
    known = {f.name for f in fields(EvalConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"config line {lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise InvalidParams(f"config line {lineno}: unknown key {key!r}")
        parts = value.replace(",", " ").split()
        try:
            if key in ("small", "large"):
                lo, hi = (int(p) for p in parts)
                overrides[key] = (lo, hi)
            elif key == "windows":
                overrides[key] = tuple(float(p) for p in parts)
            else:
                (one,) = parts
                overrides[key] = int(one)
        except ValueError as exc:
            raise InvalidParams(f"config line {lineno}: bad value for {key}: {value.strip()!r}") from exc
    return replace(default if default is not None else EvalConfig(), **overrides)


def config_text(config: EvalConfig) -> str:
    """The config in the file format parse_config reads (round-trips)."""
    lines = [
        "small = {} {}".format(*config.small),
        "large = {} {}".format(*config.large),
        f"sample_cap = {config.sample_cap}",
        "windows = " + " ".join(_fmt_window(w) for w in config.windows),
        f"runs = {config.runs}",
        f"bins = {config.bins}",
        f"seed = {config.seed}",
    ]
    return "\n".join(lines) + "\n"


def _fmt_window(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


@dataclass(frozen=True)
class ReportRow:
    """One per-tree metric value. window is None for structure metrics
    (computed at full observation); size is the true final tree size the
    binning keys on."""

    tree_id: str
    cohort: str
    model: str
    window: float | None
    metric: str
    value: float
    size: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SkipRow:
    """One per-tree failure record; stage says how far the attempt got."""

    tree_id: str
    cohort: str
    model: str
    window: float | None
    stage: str
    error: str


@dataclass(frozen=True)
class BinRow:
    """Median of one metric over one size bin ("all" spans the cohort).

    median_abs (median of |value|) is an extra diagnostic column: signed
    medians can mask dispersion.
    """

    cohort: str
    bin: str
    lo: float
    hi: float
    model: str
    window: float | None
    metric: str
    count: int
    median: float
    median_abs: float


class EvalReport(NamedTuple):
    rows: list[ReportRow]
    bins: list[BinRow]
    skips: list[SkipRow]


# ---------------------------------------------------------------- metrics

def layer_profile_errors(sim: np.ndarray, ref: np.ndarray) -> tuple[float, float]:
    """(eps_min, eps_max): mean |layer count difference| over the shared
    depth prefix (eps_min) and over the deeper range with missing layers
    counted as 0 (eps_max)."""
    sim = np.asarray(sim, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if sim.shape[0] == 0 or ref.shape[0] == 0:
        raise EmptyProfile("both depth profiles must be non-empty")
    d_min = min(sim.shape[0], ref.shape[0])
    d_max = max(sim.shape[0], ref.shape[0])
    eps_min = float(np.mean(np.abs(sim[:d_min] - ref[:d_min])))
    pad_sim = np.zeros(d_max)
    pad_sim[: sim.shape[0]] = sim
    pad_ref = np.zeros(d_max)
    pad_ref[: ref.shape[0]] = ref
    eps_max = float(np.mean(np.abs(pad_sim - pad_ref)))
    return eps_min, eps_max


def relative_size_error(mean_predicted: float, true_size: float) -> float:
    """Signed relative error (<s_hat> - s) / s; negative = underprediction."""
    return (mean_predicted - true_size) / true_size


# ---------------------------------------------------------------- cohorts

def _effective_id(tree: TimedTree, index: int) -> str:
    return tree.tree_id if tree.tree_id else f"tree-{index}"


def select_cohorts(
    trees: list[TimedTree], config: EvalConfig
) -> dict[str, list[tuple[str, TimedTree]]]:
    """Sampled (id, tree) lists per cohort, in forest order.

    A tree is eligible for the first cohort whose closed size range contains
    it (small is checked first, so a boundary tree is small). Cohorts larger
    than sample_cap are subsampled without replacement on the seeded stream
    for that cohort.
    """
    out: dict[str, list[tuple[str, TimedTree]]] = {}
    taken = np.zeros(len(trees), dtype=bool)
    for name in COHORT_NAMES:
        lo, hi = getattr(config, name)
        idx = [i for i, t in enumerate(trees) if lo <= t.n <= hi and not taken[i]]
        for i in idx:
            taken[i] = True
        if len(idx) > config.sample_cap:
            rng = substream(config.seed, "cohort", name)
            pick = rng.choice(len(idx), size=config.sample_cap, replace=False)
            idx = [idx[j] for j in np.sort(pick)]
        out[name] = [(_effective_id(trees[i], i), trees[i]) for i in idx]
    return out


def pooled_kernel(trees: list[TimedTree]) -> LognormKernel | None:
    """Closed-form lognormal fit to all comment reply delays pooled across
    trees (full observation); None when fewer than two delays exist."""
    logs = []
    for t in trees:
        d = response_times(t).delays
        if d.shape[0]:
            logs.append(np.log(np.maximum(d, TIME_FLOOR_H)))
    if not logs:
        return None
    x = np.concatenate(logs)
    if x.shape[0] < 2:
        return None
    mu = float(np.mean(x))
    sigma = float(np.sqrt(np.mean((x - mu) ** 2)))
    sigma = min(max(sigma, SIGMA_BOUNDS[0]), SIGMA_BOUNDS[1])
    return LognormKernel(mu=mu, sigma=sigma)


# ---------------------------------------------------------------- structure

def _structure_tree(task) -> tuple[list[ReportRow], list[SkipRow]]:
    tree, tid, cohort, runs, seed, fallback = task
    rows: list[ReportRow] = []
    skips: list[SkipRow] = []
    size = tree.n
    ref = depth_profile(tree)

    try:
        hfit = fit_hawkes(tree, np.inf, fallback_kernel=fallback)
    except TreeHawkesError as exc:
        skips.append(SkipRow(tid, cohort, "hawkes", None, "fit", type(exc).__name__))
        skips.append(SkipRow(tid, cohort, "pa", None, "pairing", "NoPairedSizes"))
        return rows, skips
    try:
        pfit = fit_pa(tree)
    except TreeHawkesError as exc:
        skips.append(SkipRow(tid, cohort, "pa", None, "fit", type(exc).__name__))
        pfit = None

    rng = substream(seed, "structure", tid)
    h_errs: list[tuple[float, float]] = []
    p_errs: list[tuple[float, float]] = []
    h_flags = set(hfit.flags)
    p_flags: set[str] = set()
    for _ in range(runs):
        try:
            sim = simulate_tree(hfit.params, np.inf, rng)
        except TreeHawkesError as exc:
            skips.append(SkipRow(tid, cohort, "hawkes", None, "simulate", type(exc).__name__))
            skips.append(SkipRow(tid, cohort, "pa", None, "pairing", "NoPairedSizes"))
            return rows, skips
        try:
            h_errs.append(layer_profile_errors(depth_profile(sim), ref))
        except EmptyProfile:
            h_flags.add("empty_replicate")
        if pfit is not None:
            pa_tree = simulate_pa(pfit.params, sim.n, rng)
            try:
                p_errs.append(layer_profile_errors(depth_profile(pa_tree), ref))
            except EmptyProfile:
                p_flags.add("empty_replicate")

    for model, errs, flags in (("hawkes", h_errs, h_flags), ("pa", p_errs, p_flags)):
        if model == "pa" and pfit is None:
            continue
        if not errs:
            skips.append(SkipRow(tid, cohort, model, None, "profile", "EmptyProfile"))
            continue
        arr = np.asarray(errs)
        ftup = tuple(sorted(flags))
        rows.append(ReportRow(tid, cohort, model, None, "eps_d_min", float(arr[:, 0].mean()), size, ftup))
        rows.append(ReportRow(tid, cohort, model, None, "eps_d_max", float(arr[:, 1].mean()), size, ftup))
    return rows, skips


def run_structure_experiment(
    trees: list[TimedTree], config: EvalConfig, workers: int = 1
) -> tuple[list[ReportRow], list[SkipRow]]:
    """Paired-replicate depth-profile scores for the tree model and PA.

    Per sampled tree: fit both models on the full tree, simulate `runs`
    paired replicates (the PA replicate copies the node count of the tree
    model's draw with the same index), then report the per-tree mean
    eps_d_min / eps_d_max against the real tree. Fit or simulation failures
    become skip records, never aborts.
    """
    cohorts = select_cohorts(trees, config)
    tasks = []
    for name in COHORT_NAMES:
        picked = cohorts[name]
        fallback = pooled_kernel([t for _, t in picked])
        tasks.extend((t, tid, name, config.runs, config.seed, fallback) for tid, t in picked)
    rows: list[ReportRow] = []
    skips: list[SkipRow] = []
    for r, s in _map_tasks(_structure_tree, tasks, workers):
        rows.extend(r)
        skips.extend(s)
    return rows, skips


# ---------------------------------------------------------------- dynamics

def _dynamics_tree(task) -> tuple[list[ReportRow], list[SkipRow]]:
    tree, tid, cohort, windows, runs, seed, fallback = task
    rows: list[ReportRow] = []
    skips: list[SkipRow] = []
    size = tree.n
    series = event_series(tree)
    t_end = float(series[-1]) if series.shape[0] else 0.0

    for w in windows:
        s_obs = int(np.count_nonzero(tree.times <= w))
        rows.append(ReportRow(tid, cohort, "data", w, "remaining_fraction", (size - s_obs) / size, size))
        future = series[series > w]
        if future.shape[0] == 0:
            skips.append(SkipRow(tid, cohort, "all", w, "window", "NoFutureEvents"))
            continue

        stage = "fit"
        try:
            hfit = fit_hawkes(tree, w, fallback_kernel=fallback)
            stage = "nll"
            nll = nll_future(hfit.params, tree, w)
            stage = "predict"
            observed = truncate(tree, w)
            rng = substream(seed, "dynamics", tid, _fmt_window(w), "hawkes")
            mean_s, _ = predict_size(hfit.params, observed, w, runs, rng)
            rows.append(ReportRow(tid, cohort, "hawkes", w, "nll_future", nll, size, hfit.flags))
            rows.append(
                ReportRow(tid, cohort, "hawkes", w, "eps_s", relative_size_error(mean_s, size), size, hfit.flags)
            )
        except TreeHawkesError as exc:
            skips.append(SkipRow(tid, cohort, "hawkes", w, stage, type(exc).__name__))

        stage = "fit"
        try:
            dfit = fit_dp(series, w)
            stage = "nll"
            nll = dp_nll_future(dfit.params, series, w, t_end)
            stage = "predict"
            rng = substream(seed, "dynamics", tid, _fmt_window(w), "dp")
            mean_s, _ = dp_predict_size(dfit.params, s_obs, w, runs, rng)
            rows.append(ReportRow(tid, cohort, "dp", w, "nll_future", nll, size))
            rows.append(ReportRow(tid, cohort, "dp", w, "eps_s", relative_size_error(mean_s, size), size))
        except TreeHawkesError as exc:
            skips.append(SkipRow(tid, cohort, "dp", w, stage, type(exc).__name__))

        stage = "fit"
        try:
            rfit = fit_rpp(series, w)
            stage = "nll"
            nll = rpp_nll_future(rfit.params, series, w, t_end)
            stage = "predict"
            rng = substream(seed, "dynamics", tid, _fmt_window(w), "rpp")
            mean_s, _ = rpp_predict_size(rfit.params, s_obs, w, runs, rng)
            rows.append(ReportRow(tid, cohort, "rpp", w, "nll_future", nll, size))
            rows.append(ReportRow(tid, cohort, "rpp", w, "eps_s", relative_size_error(mean_s, size), size))
        except TreeHawkesError as exc:
            skips.append(SkipRow(tid, cohort, "rpp", w, stage, type(exc).__name__))
    return rows, skips


def run_dynamics_experiment(
    trees: list[TimedTree], config: EvalConfig, workers: int = 1
) -> tuple[list[ReportRow], list[SkipRow]]:
    """Held-out scores per tree x learning window x timing model.

    For each window: fit on the observed prefix, score the future comments
    (NLL over (t_learn, T_end] with T_end = the tree's last comment time,
    shared across models so scores are comparable) and the final size from
    `runs` sampled futures (eps_s). Also emits remaining_fraction rows
    (model "data") with the activity share left after the window.
    """
    cohorts = select_cohorts(trees, config)
    tasks = []
    for name in COHORT_NAMES:
        picked = cohorts[name]
        fallback = pooled_kernel([t for _, t in picked])
        tasks.extend(
            (t, tid, name, tuple(config.windows), config.runs, config.seed, fallback)
            for tid, t in picked
        )
    rows: list[ReportRow] = []
    skips: list[SkipRow] = []
    for r, s in _map_tasks(_dynamics_tree, tasks, workers):
        rows.extend(r)
        skips.extend(s)
    return rows, skips


def _map_tasks(fn, tasks, workers: int):
    """Order-preserving per-tree fan-out; results are identical for any
    worker count because every task owns its seeded substreams."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (workers * 4))
        return list(pool.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------- binning

def bin_medians(rows: list[ReportRow], config: EvalConfig) -> list[BinRow]:
    """Median (and median absolute) value per size bin and cohort-wide.

    Bins are a geometric progression over each cohort's size range; a row
    lands in the bin containing its tree's final size. Bin label "all"
    aggregates the whole cohort. Empty bins are omitted.
    """
    edges = {
        name: np.geomspace(*getattr(config, name), num=config.bins + 1)
        for name in COHORT_NAMES
    }
    groups: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        e = edges[row.cohort]
        b = int(np.searchsorted(e, row.size, side="right")) - 1
        b = min(max(b, 0), config.bins - 1)
        key = (row.cohort, row.model, row.window, row.metric)
        groups[key + (b,)].append(row.value)
        groups[key + (-1,)].append(row.value)

    out = []
    for key in sorted(
        groups,
        key=lambda k: (k[0], k[4], k[1], _window_sort(k[2]), k[3]),
    ):
        cohort, model, window, metric, b = key
        vals = np.asarray(groups[key])
        e = edges[cohort]
        lo, hi = (float(e[0]), float(e[-1])) if b < 0 else (float(e[b]), float(e[b + 1]))
        out.append(
            BinRow(
                cohort=cohort,
                bin="all" if b < 0 else str(b),
                lo=lo,
                hi=hi,
                model=model,
                window=window,
                metric=metric,
                count=vals.shape[0],
                median=float(np.median(vals)),
                median_abs=float(np.median(np.abs(vals))),
            )
        )
    return out


def _window_sort(w: float | None) -> float:
    return -1.0 if w is None else float(w)


# ---------------------------------------------------------------- driver

def evaluate_forest(trees: list[TimedTree], config: EvalConfig, workers: int = 1) -> EvalReport:
    """Both experiments plus binned medians on one forest."""
    rows, skips = run_structure_experiment(trees, config, workers)
    drows, dskips = run_dynamics_experiment(trees, config, workers)
    rows.extend(drows)
    skips.extend(dskips)
    return EvalReport(rows=rows, bins=bin_medians(rows, config), skips=skips)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return _fmt_window(v) if float(v).is_integer() and abs(v) < 1e16 else repr(v)
    return str(v)


def write_report(report: EvalReport, out_dir: str) -> dict[str, str]:
    """rows.csv / bins.csv / skips.csv under out_dir; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    def emit(name: str, header: list[str], records) -> None:
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for rec in records:
                w.writerow([_cell(v) for v in rec])
        paths[name] = path

    emit(
        "rows.csv",
        ["tree_id", "cohort", "model", "window", "metric", "value", "size", "flags"],
        (
            (r.tree_id, r.cohort, r.model, r.window, r.metric, repr(float(r.value)), r.size, "|".join(r.flags))
            for r in report.rows
        ),
    )
    emit(
        "bins.csv",
        ["cohort", "bin", "lo", "hi", "model", "window", "metric", "count", "median", "median_abs"],
        (
            (
                b.cohort, b.bin, repr(b.lo), repr(b.hi), b.model, b.window, b.metric,
                b.count, repr(b.median), repr(b.median_abs),
            )
            for b in report.bins
        ),
    )
    emit(
        "skips.csv",
        ["tree_id", "cohort", "model", "window", "stage", "error"],
        ((s.tree_id, s.cohort, s.model, s.window, s.stage, s.error) for s in report.skips),
    )
    return paths
