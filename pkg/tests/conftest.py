from __future__ import annotations

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def data_dir() -> str:
    return DATA_DIR


@pytest.fixture(scope="session")
def forest100_path() -> str:
    return os.path.join(DATA_DIR, "forest100.jsonl")


@pytest.fixture(scope="session")
def dirty_path() -> str:
    return os.path.join(DATA_DIR, "dirty.jsonl")


@pytest.fixture(scope="session")
def forest100(forest100_path):
    """The bundled 100-tree fixture, ingested once per session."""
    from treehawkes.ingest import parse_canonical, read_canonical_jsonl

    events, malformed = read_canonical_jsonl(forest100_path)
    forest, report = parse_canonical(events, malformed=malformed)
    assert report.skipped == 0
    return forest


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
