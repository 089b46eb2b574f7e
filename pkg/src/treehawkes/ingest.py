"""Ingest raw event streams into forests of timed trees, and the binary
forest file format.

Canonical record: {"thread": str, "id": str, "parent": str|null, "ts": int}
with ts in epoch seconds; the root of a thread has parent null. Anomalies are
dropped and counted per reason (strict mode raises on the first one); every
input record is either kept in a tree or counted in exactly one skip bucket.
"""

from __future__ import annotations

import json
import struct
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DuplicateId,
    IngestError,
    IoFailure,
    MissingRoot,
    NonMonotoneTime,
    OrphanEvent,
    VersionMismatch,
)
from .rng import key_hash
from .tree import TimedTree

__all__ = [
    "RawEvent",
    "SkipReport",
    "Forest",
    "SKIP_REASONS",
    "read_canonical_jsonl",
    "adapt_reddit",
    "parse_canonical",
    "persist",
    "load",
]

SKIP_REASONS = (
    "malformed",
    "missing_root",
    "extra_root",
    "duplicate_id",
    "orphan",
    "non_monotone",
)

_MAGIC = b"DTFR"
_VERSION = 1


@dataclass(frozen=True)
class RawEvent:
    thread: str
    id: str
    parent: str | None
    ts: int


@dataclass
class SkipReport:
    """Where every input record went: kept + sum(counts) == total."""

    counts: dict[str, int] = field(default_factory=lambda: {r: 0 for r in SKIP_REASONS})
    kept: int = 0
    total: int = 0

    def skip(self, reason: str, n: int = 1) -> None:
        self.counts[reason] += n

    @property
    def skipped(self) -> int:
        return sum(self.counts.values())


@dataclass
class Forest:
    trees: list[TimedTree]
    source_meta: str = ""

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[TimedTree]:
        return iter(self.trees)


def read_canonical_jsonl(path: str) -> tuple[list[RawEvent], int]:
    """Events from a canonical JSONL file, plus the malformed-line count.

    Blank lines are ignored; lines that fail to parse or lack fields count
    as malformed records.
    """
    events: list[RawEvent] = []
    malformed = 0
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            ev = _canonical_event(line)
            if ev is None:
                malformed += 1
            else:
                events.append(ev)
    return events, malformed


def _canonical_event(line: str) -> RawEvent | None:
    try:
        rec = json.loads(line)
        thread = rec["thread"]
        eid = rec["id"]
        parent = rec.get("parent")
        ts = rec["ts"]
        if not isinstance(thread, str) or not isinstance(eid, str):
            return None
        if parent is not None and not isinstance(parent, str):
            return None
        if isinstance(ts, bool) or not isinstance(ts, (int, float)):
            return None
        return RawEvent(thread=thread, id=eid, parent=parent, ts=int(ts))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return None


def adapt_reddit(path: str) -> tuple[list[RawEvent], int]:
    """Map Reddit submission/comment dumps (JSONL) to canonical events.

    A record with a parent_id is a comment: thread comes from link_id, the
    parent is the referenced comment (t1_) or the post itself (t3_). A record
    without parent_id is a post and roots its own thread. Type prefixes are
    stripped; author and body are discarded. Unparseable records count as
    malformed.
    """
    events: list[RawEvent] = []
    malformed = 0
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                ts = int(float(rec["created_utc"]))
                eid = _strip_kind(str(rec["id"]))
                if "parent_id" in rec and rec["parent_id"]:
                    thread = _strip_kind(str(rec["link_id"]))
                    parent = _strip_kind(str(rec["parent_id"]))
                    events.append(RawEvent(thread=thread, id=eid, parent=parent, ts=ts))
                else:
                    events.append(RawEvent(thread=eid, id=eid, parent=None, ts=ts))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                malformed += 1
    return events, malformed


def _strip_kind(name: str) -> str:
    if len(name) > 3 and name[:3] in ("t1_", "t3_"):
        return name[3:]
    return name


def parse_canonical(
    events: Iterable[RawEvent],
    strict: bool = False,
    malformed: int = 0,
    source_meta: str = "",
) -> tuple[Forest, SkipReport]:
    """Group events by thread and build one timed tree per thread.

    Within a thread: duplicate ids keep the first record; a missing root
    drops the thread; extra roots are dropped; a child timestamped before its
    parent is dropped; events whose parent was dropped (or never existed) are
    orphans. Node order inside a tree is (time offset, depth, id), and trees
    are ordered by thread id. malformed pre-counts reader-level skips.
    """
    report = SkipReport()
    report.skip("malformed", malformed)
    report.total = malformed

    threads: dict[str, list[RawEvent]] = {}
    for ev in events:
        report.total += 1
        threads.setdefault(ev.thread, []).append(ev)

    trees: list[TimedTree] = []
    for thread_id in sorted(threads):
        tree = _build_tree(thread_id, threads[thread_id], report, strict)
        if tree is not None:
            trees.append(tree)
    return Forest(trees=trees, source_meta=source_meta), report


def _build_tree(
    thread_id: str, events: list[RawEvent], report: SkipReport, strict: bool
) -> TimedTree | None:
    by_id: dict[str, RawEvent] = {}
    for ev in events:
        if ev.id in by_id:
            if strict:
                raise DuplicateId(f"thread {thread_id}: duplicate id {ev.id}")
            report.skip("duplicate_id")
        else:
            by_id[ev.id] = ev

    roots = sorted((ev for ev in by_id.values() if ev.parent is None), key=lambda e: (e.ts, e.id))
    if not roots:
        if strict:
            raise MissingRoot(f"thread {thread_id}: no root event")
        report.skip("missing_root", len(by_id))
        return None
    root = roots[0]
    for extra in roots[1:]:
        if strict:
            raise IngestError(f"thread {thread_id}: extra root {extra.id}")
        report.skip("extra_root")
        del by_id[extra.id]

    children: dict[str, list[RawEvent]] = {}
    for ev in by_id.values():
        if ev.parent is not None:
            children.setdefault(ev.parent, []).append(ev)

    kept: list[tuple[int, int, str]] = [(0, 0, root.id)]  # (offset_s, depth, id)
    parent_of: dict[str, str] = {}
    queue: deque[tuple[RawEvent, int]] = deque([(root, 0)])
    visited = {root.id}
    while queue:
        node, depth = queue.popleft()
        for child in sorted(children.get(node.id, ()), key=lambda e: (e.ts, e.id)):
            if child.id in visited:
                continue
            if child.ts < node.ts:
                if strict:
                    raise NonMonotoneTime(
                        f"thread {thread_id}: {child.id} precedes its parent {node.id}"
                    )
                report.skip("non_monotone")
                visited.add(child.id)  # descendants become orphans
                continue
            visited.add(child.id)
            kept.append((child.ts - root.ts, depth + 1, child.id))
            parent_of[child.id] = node.id
            queue.append((child, depth + 1))

    orphans = len(by_id) - len(visited)
    if orphans:
        if strict:
            raise OrphanEvent(f"thread {thread_id}: {orphans} events with missing parents")
        report.skip("orphan", orphans)

    kept.sort()
    index = {eid: i for i, (_, _, eid) in enumerate(kept)}
    n = len(kept)
    times = np.array([offs / 3600.0 for offs, _, _ in kept], dtype=np.float64)
    depths = np.array([d for _, d, _ in kept], dtype=np.int64)
    parents = np.empty(n, dtype=np.int64)
    parents[0] = -1
    keys = np.array([key_hash(eid) for _, _, eid in kept], dtype=np.uint64)
    for i, (_, _, eid) in enumerate(kept):
        if i:
            parents[i] = index[parent_of[eid]]
    report.kept += n
    return TimedTree(times=times, parents=parents, tree_id=thread_id, node_keys=keys, depths=depths)


def persist(forest: Forest, path: str) -> None:
    """Write a forest to its binary file format (little-endian).

    Layout: magic "DTFR", u32 version, u32 meta length + UTF-8 meta,
    u64 tree count; per tree: u16 id length + UTF-8 id, u64 node count n,
    u8 has_keys, [n x u64 node keys], n x i64 parents, n x i64 times in
    seconds. Times are stored as integer seconds, so hours are quantized at
    1 s resolution on the first persist and exactly stable afterwards.
    """
    parts: list[bytes] = [_MAGIC, struct.pack("<I", _VERSION)]
    meta = forest.source_meta.encode("utf-8")
    parts.append(struct.pack("<I", len(meta)))
    parts.append(meta)
    parts.append(struct.pack("<Q", len(forest.trees)))
    for tree in forest.trees:
        tid = tree.tree_id.encode("utf-8")
        parts.append(struct.pack("<H", len(tid)))
        parts.append(tid)
        parts.append(struct.pack("<Q", tree.n))
        if tree.node_keys is None:
            parts.append(struct.pack("<B", 0))
        else:
            parts.append(struct.pack("<B", 1))
            parts.append(tree.node_keys.astype("<u8").tobytes())
        parts.append(tree.parents.astype("<i8").tobytes())
        secs = np.round(tree.times * 3600.0).astype("<i8")
        parts.append(secs.tobytes())
    try:
        with open(path, "wb") as fh:
            fh.write(b"".join(parts))
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def load(path: str) -> Forest:
    """Read a forest written by persist."""
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if buf[:4] != _MAGIC:
        raise VersionMismatch(f"{path}: not a forest file")
    (version,) = struct.unpack_from("<I", buf, 4)
    if version != _VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {_VERSION}")
    off = 8
    (meta_len,) = struct.unpack_from("<I", buf, off)
    off += 4
    meta = buf[off : off + meta_len].decode("utf-8")
    off += meta_len
    (count,) = struct.unpack_from("<Q", buf, off)
    off += 8
    trees: list[TimedTree] = []
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", buf, off)
        off += 2
        tid = buf[off : off + id_len].decode("utf-8")
        off += id_len
        (n,) = struct.unpack_from("<Q", buf, off)
        off += 8
        (has_keys,) = struct.unpack_from("<B", buf, off)
        off += 1
        keys = None
        if has_keys:
            keys = np.frombuffer(buf, dtype="<u8", count=n, offset=off).copy()
            off += 8 * n
        parents = np.frombuffer(buf, dtype="<i8", count=n, offset=off).copy()
        off += 8 * n
        secs = np.frombuffer(buf, dtype="<i8", count=n, offset=off)
        off += 8 * n
        times = secs / 3600.0
        trees.append(TimedTree(times=times, parents=parents, tree_id=tid, node_keys=keys))
    if off != len(buf):
        raise VersionMismatch(f"{path}: {len(buf) - off} trailing bytes")
    return Forest(trees=trees, source_meta=meta)
