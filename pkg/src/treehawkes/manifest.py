"""Run manifests: a JSON record next to every output with enough context to
rerun the command (argv, effective config, seed, input digests, version,
timing). Written atomically so a crash never leaves a truncated manifest.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass

from .errors import IoFailure

__all__ = ["RunManifest", "file_digest", "manifest_path_for", "write_manifest"]


@dataclass(frozen=True)
class RunManifest:
    command: list[str]
    config: dict
    seed: int
    inputs: dict[str, str]
    version: str
    started: str
    elapsed_s: float


def file_digest(path: str) -> str:
    """sha256 hex digest of a file, streamed."""
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    except OSError as exc:
        raise IoFailure(f"cannot digest {path}: {exc}") from exc
    return h.hexdigest()


def manifest_path_for(output_path: str) -> str:
    """Sibling manifest path: <file>.manifest.json, or manifest.json inside
    an output directory."""
    if os.path.isdir(output_path):
        return os.path.join(output_path, "manifest.json")
    return output_path + ".manifest.json"


def write_manifest(manifest: RunManifest, output_path: str) -> str:
    """Write the manifest next to output_path (atomic rename); returns the
    manifest path."""
    path = manifest_path_for(output_path)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write manifest {path}: {exc}") from exc
    return path
