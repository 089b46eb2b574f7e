"""Regenerate the bundled synthetic fixture (tests/data/forest100.jsonl).

Trees are drawn from the same heterogeneous law the acceptance experiments
use, then flattened to canonical JSONL records with epoch-second
timestamps. Deterministic: rerunning produces the identical file.
"""

from __future__ import annotations

import json
import os

import numpy as np

from treehawkes.hawkes import HawkesParams, simulate_tree
from treehawkes.kernels import LognormKernel, WeibullIntensity
from treehawkes.rng import substream

EPOCH = 1577836800  # 2020-01-01T00:00:00Z
SEED = 42
COUNT = 100


def sample_params(rng: np.random.Generator) -> HawkesParams:
    """Per-tree parameter draw: lognormal root mass, uniform branching."""
    a = float(np.exp(rng.normal(np.log(20.0), 0.9)))
    n_b = float(rng.uniform(0.5, 0.9))
    return HawkesParams(
        root=WeibullIntensity(a=a, b=1.0, alpha=0.65),
        kernel=LognormKernel(mu=-0.7, sigma=1.8),
        n_b=n_b,
    )


def tree_records(tree_index: int, rng: np.random.Generator) -> list[dict]:
    tree = simulate_tree(sample_params(rng), float("inf"), rng)
    thread = f"t{tree_index:05d}"
    ids = [f"{thread}.{i}" for i in range(tree.n)]
    records = []
    for i in range(tree.n):
        records.append(
            {
                "thread": thread,
                "id": ids[i],
                "parent": None if i == 0 else ids[int(tree.parents[i])],
                "ts": EPOCH + int(round(tree.times[i] * 3600.0)),
            }
        )
    return records


def main() -> None:
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "forest100.jsonl")
    out = os.path.normpath(out)
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for i in range(COUNT):
            rng = substream(SEED, "fixture", i)
            for rec in tree_records(i, rng):
                fh.write(json.dumps(rec, separators=(",", ":"), sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
