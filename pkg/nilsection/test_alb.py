"""
Tests for the Alb1/Alb2 lattice quotients and the fixed-point lifting criterion.
"""

from fractions import Fraction

import numpy as np
import pytest

from nilsection.alb import (
    AlbModel,
    build_alb,
    fixed_components_alb1,
    lifts_to_alb2,
    plot_data,
    reconcile_with_delta2,
)
from nilsection.curve import CurveSpec, build
from nilsection.zcoh import h1

HALF = Fraction(1, 2)


def models(data):
    return build_alb(data, 1), build_alb(data, 2)


def test_levels_are_checked(bundled):
    with pytest.raises(ValueError, match="Unsupported Albanese level"):
        AlbModel(3, bundled["p1_minus_3_points"])
    alb1, alb2 = models(bundled["p1_minus_3_points"])
    with pytest.raises(ValueError):
        fixed_components_alb1(alb2)
    with pytest.raises(ValueError):
        lifts_to_alb2(alb1, fixed_components_alb1(alb1)[0])


def test_dimensions(bundled):
    alb1, alb2 = models(bundled["p1_minus_3_points"])
    assert alb1.dimension == 2
    assert alb2.dimension == 3
    alb1, alb2 = models(bundled["m_curve_genus_2"])
    assert (alb1.dimension, alb2.dimension) == (4, 9)


def test_thrice_punctured_line_fixed_components(bundled):
    alb1, alb2 = models(bundled["p1_minus_3_points"])
    components = fixed_components_alb1(alb1)
    assert [fc.point for fc in components] == [(0, 0), (0, HALF), (HALF, 0), (HALF, HALF)]
    lifting = {fc.point: lifts_to_alb2(alb2, fc) for fc in components}
    assert sum(bool(result) for result in lifting.values()) == 3
    corner = lifting[(HALF, HALF)]
    assert not corner
    assert corner.translation == (0, 0, HALF)
    origin = lifting[(0, 0)].witness
    assert origin == (0, 0, 0)
    assert alb2.involution(origin) == origin
    assert lifting[(HALF, 0)].witness[:2] == (HALF, 0)


def test_elliptic_curve_everything_lifts(bundled):
    alb1, alb2 = models(bundled["elliptic_2_ovals"])
    components = fixed_components_alb1(alb1)
    assert len(components) == 2
    assert all(lifts_to_alb2(alb2, fc) for fc in components)


def test_involution_on_points(bundled):
    alb1, _ = models(bundled["p1_minus_3_points"])
    assert alb1.involution((HALF, Fraction(1, 3))) == (-HALF, Fraction(-1, 3))
    with pytest.raises(ValueError, match="dimension"):
        alb1.involution((0, 0, 0))


@pytest.mark.parametrize("name", ["p1_minus_3_points", "elliptic_2_ovals", "m_curve_genus_2", "rank3_minus_i"])
def test_models_are_consistent(bundled, name):
    alb1, alb2 = models(bundled[name])
    rng = np.random.default_rng(3)
    assert alb1.check_model(rng)
    assert alb2.check_model(rng)


@pytest.mark.parametrize("name", ["p1_minus_3_points", "elliptic_2_ovals", "m_curve_genus_2", "rank3_minus_i"])
def test_reconcile_on_bundled_curves(bundled, name):
    data = bundled[name]
    report = reconcile_with_delta2(data, *models(data))
    assert report.passed
    assert report.component_count_matches
    assert list(report.table.columns) == ['component', 'h1_class', 'lifts', 'in_kernel', 'agree', 'witness', 'translation']


def test_plot_data_for_the_torus(bundled):
    alb1, alb2 = models(bundled["p1_minus_3_points"])
    flat = plot_data(alb1)
    assert len(flat['vertices']) == 4 and len(flat['edges']) == 4
    assert len(flat['identifications']) == 2
    assert len(flat['fixed_points']) == 4
    cube = plot_data(alb2)
    assert len(cube['vertices']) == 8 and len(cube['edges']) == 12
    assert len(cube['identifications']) == 3
    assert sum(1 for p in cube['fixed_points'] if p['lifts']) == 3


def test_plot_data_skips_large_domains(bundled):
    _, alb2 = models(bundled["m_curve_genus_2"])
    data = plot_data(alb2)
    assert data['vertices'] == [] and data['edges'] == []
    assert data['dimension'] == 9


def test_trivial_involution_has_a_single_fixed_component():
    spec = CurveSpec.from_dict({
        "name": "trivial_tau",
        "pieces": [{
            "name": "line", "kind": "punctured", "punctures": ["real"],
            "model": {"tau": [[1, 0], [0, 1]]},
        }],
        "gluings": [],
        "base": {"piece": "line", "component": "arc0"},
    })
    data = build(spec)
    assert h1(data.abelianization).order == 1
    alb1, alb2 = models(data)
    components = fixed_components_alb1(alb1)
    assert [fc.point for fc in components] == [(0, 0)]
    assert lifts_to_alb2(alb2, components[0])
    assert reconcile_with_delta2(data, alb1, alb2).passed


# ---------------------------------------------------------------------------
# Corpus properties
# ---------------------------------------------------------------------------

def test_corpus_component_count_is_h1(corpus):
    for data in corpus:
        alb1 = build_alb(data, 1)
        assert len(fixed_components_alb1(alb1)) == h1(data.abelianization).order, data.spec.name


def test_corpus_lifting_matches_kernel(corpus):
    for data in corpus:
        report = reconcile_with_delta2(data, *models(data))
        assert report.passed, (data.spec.name, report.to_dict())


def test_corpus_models_are_consistent(corpus):
    rng = np.random.default_rng(11)
    for data in corpus[:20]:
        alb1, alb2 = models(data)
        assert alb1.check_model(rng, samples=5), data.spec.name
        assert alb2.check_model(rng, samples=5), data.spec.name
