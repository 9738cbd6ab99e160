from pathlib import Path

import pytest

from check_corpus import load_corpus
from pderiv.syntax import canonicalize, parse

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return REPO_ROOT / "corpus" / "default.txt"


@pytest.fixture(scope="session")
def corpus_entries(corpus_path):
    return load_corpus(str(corpus_path))


@pytest.fixture
def left_recursive():
    """mu X. 1 + X a, the left-recursive a*."""
    return canonicalize(parse("mu X. 1 + X a"))


@pytest.fixture
def right_recursive():
    return canonicalize(parse("mu X. 1 + a X"))


@pytest.fixture
def anbn():
    return canonicalize(parse("mu X. 1 + a X b"))
