"""Command-line entry point.

Subcommands: ingest, stats, fit, simulate, predict, simulate-pa, evaluate.
Hours are the canonical time unit on every flag and in every output column;
ingestion converts from epoch seconds. Each command writes a manifest next
to its output. Exit codes: 0 success, 1 domain or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .baselines import (
    dp_nll_future,
    dp_predict_size,
    fit_dp,
    fit_pa,
    fit_rpp,
    rpp_nll_future,
    rpp_predict_size,
    simulate_pa,
    PAParams,
)
from .errors import InvalidParams, InvalidWindow, TreeHawkesError
from .evaluate import EvalConfig, config_text, evaluate_forest, parse_config, write_report
from .hawkes import HawkesParams, fit_hawkes, nll_future, predict_size, simulate_tree
from .ingest import Forest, adapt_reddit, load, parse_canonical, persist, read_canonical_jsonl
from .kernels import LognormKernel, WeibullIntensity
from .manifest import RunManifest, file_digest, write_manifest
from .rng import substream
from .temporal import ccdf, classify_comments, event_series, local_variation
from .tree import (
    TimedTree,
    branching_number,
    forward_degrees,
    max_depth,
    response_times,
    truncate,
)
from .errors import TooFewEvents

__all__ = ["main"]

log = logging.getLogger("treehawkes")

DEFAULT_SEED = 42

CCDF_MODES = ("sizes", "rootdeg", "fwddeg", "resp-root", "resp-comment")


def _parse_t_learn(value: str) -> float:
    if value.lower() in ("full", "inf"):
        return float("inf")
    try:
        t = float(value)
    except ValueError:
        raise InvalidWindow(f"--t-learn must be hours or 'full', got {value!r}") from None
    if t <= 0:
        raise InvalidWindow(f"--t-learn must be > 0, got {value}")
    return t


def _parse_kv(text: str, fields: tuple[str, ...], kind: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, eq, value = part.partition("=")
        key = key.strip()
        if not eq or key not in fields:
            raise InvalidParams(f"{kind} params: expected {','.join(fields)}; got {part!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise InvalidParams(f"{kind} params: bad number in {part!r}") from None
    missing = [f for f in fields if f not in out]
    if missing:
        raise InvalidParams(f"{kind} params: missing {', '.join(missing)}")
    return out


def _hawkes_params_from_csv(path: str) -> HawkesParams:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InvalidParams(f"no parameter rows in {path}")
    row = rows[0]
    try:
        vals = {k: float(row[k]) for k in ("a", "b", "alpha", "mu", "sigma", "n_b")}
    except (KeyError, ValueError) as exc:
        raise InvalidParams(f"{path}: need columns a,b,alpha,mu,sigma,n_b") from exc
    return HawkesParams(
        root=WeibullIntensity(vals["a"], vals["b"], vals["alpha"]),
        kernel=LognormKernel(vals["mu"], vals["sigma"]),
        n_b=vals["n_b"],
    )


def _hawkes_params(spec: str) -> HawkesParams:
    if os.path.exists(spec):
        return _hawkes_params_from_csv(spec)
    v = _parse_kv(spec, ("a", "b", "alpha", "mu", "sigma", "n_b"), "tree model")
    return HawkesParams(
        root=WeibullIntensity(v["a"], v["b"], v["alpha"]),
        kernel=LognormKernel(v["mu"], v["sigma"]),
        n_b=v["n_b"],
    )


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _fnum(x: float) -> str:
    return repr(float(x))


def _effective_id(tree: TimedTree, index: int) -> str:
    return tree.tree_id if tree.tree_id else f"tree-{index}"


def _finish(args, out_path: str, inputs: list[str], config: dict, started: float, iso: str) -> None:
    manifest = RunManifest(
        command=list(args._argv),
        config=config,
        seed=args.seed,
        inputs={p: file_digest(p) for p in inputs},
        version=__version__,
        started=iso,
        elapsed_s=round(time.monotonic() - started, 3),
    )
    write_manifest(manifest, out_path)


# ---------------------------------------------------------------- commands

def _cmd_ingest(args) -> int:
    reader = read_canonical_jsonl if args.format == "canonical" else adapt_reddit
    events, malformed = reader(args.in_path)
    forest, report = parse_canonical(
        events, strict=args.strict, malformed=malformed, source_meta=f"{args.format}:{os.path.basename(args.in_path)}"
    )
    persist(forest, args.out)
    skips = " ".join(f"{k}={v}" for k, v in report.counts.items())
    log.info("ingest trees=%d kept=%d total=%d %s out=%s", len(forest), report.kept, report.total, skips, args.out)
    _finish(args, args.out, [args.in_path], {"format": args.format, "strict": args.strict}, args._t0, args._iso)
    return 0


def _stats_rows(forest: Forest):
    for i, tree in enumerate(forest):
        n_b = _fnum(branching_number(tree)) if tree.n >= 2 else ""
        try:
            lv = _fnum(local_variation(event_series(tree)))
        except TooFewEvents:
            lv = ""
        counts = classify_comments(tree)
        yield (
            _effective_id(tree, i),
            tree.n,
            tree.root_degree,
            n_b,
            max_depth(tree),
            lv,
            counts.early,
            counts.mid,
            counts.late,
        )


def _ccdf_samples(forest: Forest, mode: str) -> np.ndarray:
    if mode == "sizes":
        return np.array([t.n for t in forest], dtype=np.float64)
    if mode == "rootdeg":
        return np.array([t.root_degree for t in forest], dtype=np.float64)
    parts = []
    for t in forest:
        if mode == "fwddeg":
            parts.append(forward_degrees(t).astype(np.float64))
        else:
            rt = response_times(t)
            parts.append(rt.root if mode == "resp-root" else rt.delays)
    return np.concatenate(parts) if parts else np.zeros(0)


def _cmd_stats(args) -> int:
    forest = load(args.forest)
    if args.ccdf is not None:
        points = ccdf(_ccdf_samples(forest, args.ccdf))
        _write_csv(args.out, ["value", "ccdf"], ((_fnum(v), _fnum(p)) for v, p in points))
        log.info("stats ccdf=%s points=%d out=%s", args.ccdf, points.shape[0], args.out)
    else:
        _write_csv(
            args.out,
            ["tree_id", "n", "d_root", "n_b", "depth", "lv", "early", "mid", "late"],
            _stats_rows(forest),
        )
        log.info("stats trees=%d out=%s", len(forest), args.out)
    _finish(args, args.out, [args.forest], {"ccdf": args.ccdf}, args._t0, args._iso)
    return 0


def _cmd_fit(args) -> int:
    forest = load(args.forest)
    t_learn = _parse_t_learn(args.t_learn)
    rows = []
    failed = 0
    for i, tree in enumerate(forest):
        tid = _effective_id(tree, i)
        try:
            if args.model == "hawkes":
                fit = fit_hawkes(tree, t_learn)
                p = fit.params
                rows.append(
                    (tid, _fnum(p.root.a), _fnum(p.root.b), _fnum(p.root.alpha), _fnum(p.kernel.mu),
                     _fnum(p.kernel.sigma), _fnum(p.n_b), _fnum(fit.loglik), int(fit.converged),
                     "|".join(fit.flags))
                )
            elif args.model == "pa":
                sub = truncate(tree, t_learn) if np.isfinite(t_learn) else tree
                fit = fit_pa(sub)
                p = fit.params
                rows.append((tid, _fnum(p.beta), _fnum(p.gamma_c), _fnum(p.gamma), _fnum(fit.loglik), int(fit.converged)))
            elif args.model == "dp":
                fit = fit_dp(event_series(tree), t_learn)
                p = fit.params
                rows.append((tid, _fnum(p.total), _fnum(p.mu), _fnum(p.sigma), _fnum(fit.loglik), int(fit.converged)))
            else:
                fit = fit_rpp(event_series(tree), t_learn)
                p = fit.params
                rows.append((tid, _fnum(p.c), _fnum(p.mu), _fnum(p.sigma), _fnum(p.d), _fnum(fit.loglik), int(fit.converged)))
        except TreeHawkesError as exc:
            failed += 1
            log.warning("fit skip tree=%s kind=%s msg=%s", tid, type(exc).__name__, exc)
    headers = {
        "hawkes": ["tree_id", "a", "b", "alpha", "mu", "sigma", "n_b", "loglik", "converged", "flags"],
        "pa": ["tree_id", "beta", "gamma_c", "gamma", "loglik", "converged"],
        "dp": ["tree_id", "total", "mu", "sigma", "loglik", "converged"],
        "rpp": ["tree_id", "c", "mu", "sigma", "d", "loglik", "converged"],
    }
    _write_csv(args.out, headers[args.model], rows)
    log.info("fit model=%s fitted=%d skipped=%d out=%s", args.model, len(rows), failed, args.out)
    _finish(args, args.out, [args.forest], {"model": args.model, "t_learn": args.t_learn}, args._t0, args._iso)
    return 0


def _cmd_simulate(args) -> int:
    params = _hawkes_params(args.params)
    horizon = float("inf") if args.horizon.lower() == "inf" else float(args.horizon)
    trees = []
    for i in range(args.runs):
        rng = substream(args.seed, "simulate", i)
        tree = simulate_tree(params, horizon, rng)
        tree.tree_id = f"sim-{i:06d}"
        trees.append(tree)
    persist(Forest(trees=trees, source_meta="simulate"), args.out)
    sizes = np.array([t.n for t in trees])
    log.info("simulate runs=%d mean_size=%.2f out=%s", args.runs, float(sizes.mean()), args.out)
    inputs = [args.params] if os.path.exists(args.params) else []
    _finish(args, args.out, inputs, {"params": args.params, "horizon": args.horizon, "runs": args.runs},
            args._t0, args._iso)
    return 0


def _cmd_simulate_pa(args) -> int:
    v = _parse_kv(args.params, ("beta", "gamma_c", "gamma"), "PA")
    params = PAParams(beta=v["beta"], gamma_c=v["gamma_c"], gamma=v["gamma"])
    trees = []
    for i in range(args.runs):
        rng = substream(args.seed, "simulate-pa", i)
        tree = simulate_pa(params, args.n, rng)
        tree.tree_id = f"pa-{i:06d}"
        trees.append(tree)
    persist(Forest(trees=trees, source_meta="simulate-pa"), args.out)
    log.info("simulate-pa runs=%d n=%d out=%s", args.runs, args.n, args.out)
    _finish(args, args.out, [], {"params": args.params, "n": args.n, "runs": args.runs}, args._t0, args._iso)
    return 0


def _cmd_predict(args) -> int:
    forest = load(args.forest)
    t_learn = _parse_t_learn(args.t_learn)
    if not np.isfinite(t_learn):
        raise InvalidWindow("predict needs a finite --t-learn")
    rows = []
    failed = 0
    for i, tree in enumerate(forest):
        tid = _effective_id(tree, i)
        try:
            series = event_series(tree)
            s_obs = int(np.count_nonzero(tree.times <= t_learn))
            rng = substream(args.seed, "predict", args.model, tid)
            if args.model == "hawkes":
                fit = fit_hawkes(tree, t_learn)
                nll = nll_future(fit.params, tree, t_learn)
                mean_s, _ = predict_size(fit.params, truncate(tree, t_learn), t_learn, args.runs, rng)
            elif args.model == "dp":
                fit = fit_dp(series, t_learn)
                nll = dp_nll_future(fit.params, series, t_learn, float(series[-1]))
                mean_s, _ = dp_predict_size(fit.params, s_obs, t_learn, args.runs, rng)
            else:
                fit = fit_rpp(series, t_learn)
                nll = rpp_nll_future(fit.params, series, t_learn, float(series[-1]))
                mean_s, _ = rpp_predict_size(fit.params, s_obs, t_learn, args.runs, rng)
            rows.append((tid, s_obs, tree.n, _fnum(mean_s), _fnum(nll)))
        except TreeHawkesError as exc:
            failed += 1
            log.warning("predict skip tree=%s kind=%s msg=%s", tid, type(exc).__name__, exc)
    _write_csv(args.out, ["tree_id", "observed_size", "true_size", "mean_predicted", "nll"], rows)
    log.info("predict model=%s predicted=%d skipped=%d out=%s", args.model, len(rows), failed, args.out)
    _finish(args, args.out, [args.forest], {"model": args.model, "t_learn": args.t_learn, "runs": args.runs},
            args._t0, args._iso)
    return 0


def _cmd_evaluate(args) -> int:
    forest = load(args.forest)
    default = EvalConfig(seed=args.seed)
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            config = parse_config(fh.read(), default=default)
    else:
        config = default
    report = evaluate_forest(list(forest), config, workers=args.workers)
    write_report(report, args.out)
    log.info(
        "evaluate trees=%d rows=%d bins=%d skips=%d out=%s",
        len(forest), len(report.rows), len(report.bins), len(report.skips), args.out,
    )
    inputs = [args.forest] + ([args.config] if args.config else [])
    _finish(args, args.out, inputs, {"config": config_text(config)}, args._t0, args._iso)
    return 0


# ---------------------------------------------------------------- dispatch

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="global RNG seed (default: $TREEHAWKES_SEED or 42)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes for per-tree fan-out (default: CPU count)")
    common.add_argument("--quiet", action="store_true", help="warnings and errors only")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="treehawkes",
        description="Fit, simulate and evaluate self-exciting growth models of discussion trees.",
    )
    parser.add_argument("--version", action="version", version=f"treehawkes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="build a forest from raw event records")
    p.add_argument("--format", choices=("canonical", "reddit"), required=True)
    p.add_argument("--in", dest="in_path", required=True, metavar="PATH")
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true", help="fail on the first bad record")
    p.set_defaults(run=_cmd_ingest)

    p = sub.add_parser("stats", parents=[common], help="per-tree statistics or pooled CCDFs")
    p.add_argument("--forest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ccdf", choices=CCDF_MODES, default=None,
                   help="emit the pooled CCDF of this quantity instead of per-tree rows")
    p.set_defaults(run=_cmd_stats)

    p = sub.add_parser("fit", parents=[common], help="fit a model per tree")
    p.add_argument("--forest", required=True)
    p.add_argument("--t-learn", default="full", help="learning window in hours, or 'full'")
    p.add_argument("--model", choices=("hawkes", "pa", "dp", "rpp"), default="hawkes")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_fit)

    p = sub.add_parser("simulate", parents=[common], help="simulate trees from tree-model parameters")
    p.add_argument("--params", required=True,
                   help="a=..,b=..,alpha=..,mu=..,sigma=..,n_b=.. or a fit CSV path (first row)")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--horizon", default="inf", help="observation horizon in hours, or 'inf'")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_simulate)

    p = sub.add_parser("predict", parents=[common], help="predict final sizes from a learning window")
    p.add_argument("--forest", required=True)
    p.add_argument("--t-learn", required=True, help="learning window in hours")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--model", choices=("hawkes", "dp", "rpp"), default="hawkes")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_predict)

    p = sub.add_parser("simulate-pa", parents=[common], help="grow preferential-attachment trees")
    p.add_argument("--n", type=int, required=True, help="nodes per tree")
    p.add_argument("--params", default="beta=1,gamma_c=1,gamma=1",
                   help="beta=..,gamma_c=..,gamma=..")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_simulate_pa)

    p = sub.add_parser("evaluate", parents=[common], help="run the benchmark experiments")
    p.add_argument("--forest", required=True)
    p.add_argument("--config", default=None, help="key = value protocol file (defaults otherwise)")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(run=_cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)

    level = logging.INFO
    if args.quiet:
        level = logging.WARNING
    if args.verbose:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(message)s")

    if args.seed is None:
        env = os.environ.get("TREEHAWKES_SEED", "")
        args.seed = int(env) if env else DEFAULT_SEED
    if args.workers is None:
        args.workers = os.cpu_count() or 1
    args._argv = ["treehawkes"] + argv
    args._t0 = time.monotonic()
    args._iso = datetime.now(timezone.utc).isoformat(timespec="seconds")

    try:
        return args.run(args)
    except TreeHawkesError as exc:
        log.error("error kind=%s msg=%s", type(exc).__name__, exc)
        return 1
    except OSError as exc:
        log.error("error kind=IoFailure msg=%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
