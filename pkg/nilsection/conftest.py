"""
Shared fixtures: the bundled specs and a generated corpus, each built once per session.
"""

import pytest

from nilsection.curve import build, bundled_specs, load_spec
from nilsection.spec_generator import generate_corpus

CORPUS_SEED = 0
CORPUS_SIZE = 60


@pytest.fixture(scope="session")
def bundled():
    return {name: build(load_spec(name)) for name in bundled_specs()}


@pytest.fixture(scope="session")
def corpus_specs():
    return generate_corpus(CORPUS_SEED, CORPUS_SIZE)


@pytest.fixture(scope="session")
def corpus(corpus_specs):
    return [build(spec) for spec in corpus_specs]


@pytest.fixture(scope="session")
def hypothesis_corpus(corpus):
    """Corpus instances whose pieces all have real points."""
    return [data for data in corpus if data.hypothesis.met]
