"""
Tests for the random CurveSpec corpus.
"""

import numpy as np
import pytest

from nilsection.curve import build
from nilsection.spec_generator import (
    MAX_RANK,
    PRESETS,
    generate_corpus,
    piece_rank,
    pointless_conic,
    random_spec,
    spec_rank,
)


def test_corpus_is_deterministic():
    first = [spec.to_dict() for spec in generate_corpus(42, 10)]
    second = [spec.to_dict() for spec in generate_corpus(42, 10)]
    assert first == second
    assert first != [spec.to_dict() for spec in generate_corpus(43, 10)]


def test_corpus_names():
    specs = generate_corpus(7, 3)
    assert [spec.name for spec in specs] == ["corpus_7_000", "corpus_7_001", "corpus_7_002"]


def test_corpus_size_is_checked():
    with pytest.raises(ValueError, match="at least 1"):
        generate_corpus(0, 0)


def test_corpus_rank_budget(corpus_specs, corpus):
    for spec, data in zip(corpus_specs, corpus):
        assert spec_rank(spec) <= MAX_RANK
        assert spec_rank(spec) == data.nil2.n, spec.name


@pytest.mark.parametrize("seed", range(5))
def test_violators_glue_a_pointless_conic(seed):
    spec = random_spec("v", np.random.default_rng(seed), violator=True)
    assert spec.description.startswith("hypothesis violator")
    assert spec_rank(spec) <= MAX_RANK
    data = build(spec)
    assert not data.hypothesis.met


@pytest.mark.parametrize("seed", range(5))
def test_regular_specs_meet_the_hypothesis(seed):
    spec = random_spec("r", np.random.default_rng(seed))
    assert spec.description.startswith("random gluing")
    assert build(spec).hypothesis.met


def test_piece_ranks():
    rng = np.random.default_rng(0)
    assert piece_rank(PRESETS['conic']('c', rng)) == 0
    assert piece_rank(PRESETS['elliptic']('e', rng)) == 2
    assert piece_rank(PRESETS['mcurve']('m', rng)) == 4
    assert piece_rank(pointless_conic('p')) == 0
