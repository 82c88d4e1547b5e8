from __future__ import annotations

from pathlib import Path

import pytest

from dstkit.corpus import load_corpus, load_schema

FIXTURES = Path(__file__).parent / "fixtures"
HELPERS = Path(__file__).parent / "helpers"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def schema():
    return load_schema(FIXTURES / "schema.txt")


@pytest.fixture(scope="session")
def table1(schema):
    return load_corpus(FIXTURES / "table1.corpus", schema)


@pytest.fixture(scope="session")
def five_corpus(schema):
    return load_corpus(FIXTURES / "five.corpus", schema)
