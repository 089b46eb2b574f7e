"""Timed discussion trees and their structural statistics.

A tree is stored as parallel node arrays in an order where every parent
precedes its children (index 0 is the root/post). Times are hours since the
post, so times[0] == 0 and a child is never earlier than its parent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateTree, InvalidTree, InvalidWindow

__all__ = [
    "TimedTree",
    "ResponseTimes",
    "node_depths",
    "depth_profile",
    "max_depth",
    "forward_degrees",
    "branching_number",
    "children_lists",
    "response_times",
    "truncate",
]


@dataclass(eq=False)
class TimedTree:
    """Node arrays of one discussion tree.

    times:     float64 hours since the post; times[0] == 0.
    parents:   int64 parent indices; parents[0] == -1 and parents[i] < i,
               so any prefix of the arrays is itself a valid tree.
    tree_id:    source thread id ("" for simulated trees).
    node_keys:  optional stable uint64 node identifiers (hashed source ids).
    depths:     optional cached node depths (root = 0); builders that know
                depths anyway store them to avoid recomputation.
    orig_index: optional int64 map back to node indices of the tree this one
                was cut from (set by truncate).
    """

    times: np.ndarray
    parents: np.ndarray
    tree_id: str = ""
    node_keys: np.ndarray | None = None
    depths: np.ndarray | None = field(default=None, repr=False)
    orig_index: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.times = np.ascontiguousarray(self.times, dtype=np.float64)
        self.parents = np.ascontiguousarray(self.parents, dtype=np.int64)
        n = self.times.shape[0]
        if self.times.ndim != 1 or self.parents.shape != (n,):
            raise InvalidTree("times and parents must be 1-d arrays of equal length")
        if n == 0:
            raise InvalidTree("a tree has at least the root node")
        if self.parents[0] != -1:
            raise InvalidTree("node 0 must be the root (parent -1)")
        if self.times[0] != 0.0:
            raise InvalidTree("root time must be 0")
        if n > 1:
            par = self.parents[1:]
            idx = np.arange(1, n)
            if np.any(par < 0) or np.any(par >= idx):
                raise InvalidTree("each parent index must precede its child")
            if np.any(self.times[1:] < self.times[par]):
                raise InvalidTree("child time before parent time")
            if np.any(self.times[1:] < 0.0):
                raise InvalidTree("negative node time")
        if self.node_keys is not None:
            self.node_keys = np.ascontiguousarray(self.node_keys, dtype=np.uint64)
            if self.node_keys.shape != (n,):
                raise InvalidTree("node_keys length mismatch")
        if self.depths is not None:
            self.depths = np.ascontiguousarray(self.depths, dtype=np.int64)
            if self.depths.shape != (n,):
                raise InvalidTree("depths length mismatch")
        if self.orig_index is not None:
            self.orig_index = np.ascontiguousarray(self.orig_index, dtype=np.int64)
            if self.orig_index.shape != (n,):
                raise InvalidTree("orig_index length mismatch")

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def root_degree(self) -> int:
        """Number of direct replies to the post."""
        return int(np.count_nonzero(self.parents[1:] == 0))


class ResponseTimes(NamedTuple):
    """Realized response times split by parent kind.

    root:         times of direct replies to the post (hours), ascending.
    delays:       comment->comment reply delays (hours), ascending.
    parent_times: birth time of the replied-to comment; sorted together with
                  delays so the pairing is preserved.
    """

    root: np.ndarray
    delays: np.ndarray
    parent_times: np.ndarray


def node_depths(tree: TimedTree) -> np.ndarray:
    """Depth of every node (root = 0). Cached on the tree after first use."""
    if tree.depths is not None:
        return tree.depths
    n = tree.n
    depth = np.zeros(n, dtype=np.int64)
    par = tree.parents
    for i in range(1, n):
        depth[i] = depth[par[i]] + 1
    tree.depths = depth
    return depth


def depth_profile(tree: TimedTree) -> np.ndarray:
    """Node counts N_k per depth k = 1..max_depth (empty for a bare root)."""
    d = node_depths(tree)
    if tree.n == 1:
        return np.zeros(0, dtype=np.int64)
    return np.bincount(d)[1:]


def max_depth(tree: TimedTree) -> int:
    return int(node_depths(tree).max())


def forward_degrees(tree: TimedTree) -> np.ndarray:
    """Child counts of the non-root nodes (the root is excluded)."""
    counts = np.bincount(tree.parents[1:], minlength=tree.n)
    return counts[1:]


def branching_number(tree: TimedTree) -> float:
    """Mean forward degree over non-root nodes.

    Identical (bit for bit) to (n - 1 - root_degree)/(n - 1): the numerator is
    an exact integer sum. Needs at least one non-root node.
    """
    if tree.n < 2:
        raise DegenerateTree("branching number undefined for a bare root")
    return float(np.mean(forward_degrees(tree)))


def children_lists(tree: TimedTree) -> list[list[int]]:
    """Child indices per node, each list sorted by child time."""
    out: list[list[int]] = [[] for _ in range(tree.n)]
    par = tree.parents
    for child in range(1, tree.n):
        out[par[child]].append(child)
    t = tree.times
    for lst in out:
        if len(lst) > 1:
            lst.sort(key=lambda i: (t[i], i))
    return out


def response_times(tree: TimedTree) -> ResponseTimes:
    """Split realized responses into root responses and comment reply delays."""
    par = tree.parents[1:]
    t = tree.times[1:]
    root_mask = par == 0
    root = np.sort(t[root_mask])
    ct = t[~root_mask]
    cp = tree.times[par[~root_mask]]
    delays = ct - cp
    order = np.argsort(delays, kind="stable")
    return ResponseTimes(root=root, delays=delays[order], parent_times=cp[order])


def truncate(tree: TimedTree, t_learn: float) -> TimedTree:
    """Subtree observed by t_learn: nodes with time <= t_learn.

    The kept set is ancestor-closed because child times are never earlier
    than parent times, and node order is preserved. The result carries
    orig_index mapping its nodes back to indices in `tree` (composed through
    if `tree` is itself a cut).
    """
    if t_learn < 0:
        raise InvalidWindow(f"t_learn must be >= 0, got {t_learn}")
    keep = tree.times <= t_learn
    kept_idx = np.nonzero(keep)[0]
    new_index = np.cumsum(keep) - 1
    parents = tree.parents[keep]
    parents[1:] = new_index[parents[1:]]
    return TimedTree(
        times=tree.times[keep],
        parents=parents,
        tree_id=tree.tree_id,
        node_keys=None if tree.node_keys is None else tree.node_keys[keep],
        depths=None if tree.depths is None else tree.depths[keep],
        orig_index=kept_idx if tree.orig_index is None else tree.orig_index[keep],
    )
