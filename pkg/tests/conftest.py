from __future__ import annotations

import json
from pathlib import Path

import pytest

from satdscope.satd import PatternSet

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def default_patterns() -> PatternSet:
    return PatternSet.default()


@pytest.fixture()
def corpus_dir(tmp_path: Path) -> Path:
    """Copy of the hand-labeled fixture corpus in a temp directory."""
    import shutil

    target = tmp_path / "corpus"
    shutil.copytree(FIXTURES / "corpus", target)
    return target


def write_config(tmp_path: Path, corpus: Path, cache: Path, **overrides) -> Path:
    config = {"roots": [str(corpus)], "cache_dir": str(cache)}
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path
