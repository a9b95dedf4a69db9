"""
Tests for CurveSpec parsing, gluing plans and the equivariant assembly.
"""

import json

import pytest

from nilsection.curve import (
    CurveSpec,
    DisconnectedSpecError,
    GluingError,
    SpecError,
    build,
    bundled_specs,
    check_gluing_lemmas,
    dump_spec,
    load_spec,
    pi0_real,
    plan_gluings,
    sym_pi0,
    verify_unit_adjunction,
)
from nilsection.presets import CurveModelError, build_model
from nilsection.zcoh import h1


def conic(name, ovals=1):
    return {"name": name, "kind": "proper", "genus": 0, "ovals": ovals}


def real_point(piece, component="oval0"):
    return {"piece": piece, "real": True, "component": component}


def pair_point(piece, **extra):
    return dict({"piece": piece, "real": False}, **extra)


def make_spec(pieces, gluings, base=None, name="test"):
    base = base or {"piece": pieces[0]["name"], "component": "oval0"}
    return CurveSpec.from_dict({
        "name": name,
        "pieces": pieces,
        "gluings": [{"points": list(points)} for points in gluings],
        "base": base,
    })


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------

def test_bundled_specs_are_listed():
    names = bundled_specs()
    for expected in ["p1_minus_3_points", "elliptic_2_ovals", "m_curve_genus_2", "pointless_conic_glued", "rank3_minus_i"]:
        assert expected in names


@pytest.mark.parametrize("name", ["p1_minus_3_points", "elliptic_2_ovals", "m_curve_genus_2", "pointless_conic_glued"])
def test_bundled_spec_round_trip(name, tmp_path):
    spec = load_spec(name)
    again = load_spec(dump_spec(spec, tmp_path / f"{name}.json"))
    assert again.to_dict() == spec.to_dict()


def test_corpus_round_trip(corpus_specs):
    for spec in corpus_specs:
        assert CurveSpec.from_dict(json.loads(json.dumps(spec.to_dict()))).to_dict() == spec.to_dict()


def test_schema_errors_carry_field_paths():
    with pytest.raises(SpecError, match=r"pieces\[0\]\.genus"):
        make_spec([{"name": "a", "genus": -1}], [])
    with pytest.raises(SpecError, match=r"pieces: at least one piece"):
        CurveSpec.from_dict({"pieces": [], "base": {"piece": "a", "component": "oval0"}})
    with pytest.raises(SpecError, match=r"gluings\[0\]\.points\[1\]\.component"):
        make_spec([conic("a"), conic("b")], [(real_point("a"), real_point("b", "oval7"))])
    with pytest.raises(SpecError, match=r"duplicate piece name"):
        make_spec([conic("a"), conic("a")], [])
    with pytest.raises(SpecError, match=r"pieces\[0\]\.ovals"):
        make_spec([{"name": "a", "kind": "punctured", "punctures": ["real", "real"], "ovals": 1}], [],
                  base={"piece": "a", "component": "arc0"})


def test_json_errors_carry_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "name": ,\n}\n')
    with pytest.raises(SpecError, match=r"broken\.json:2:\d+"):
        load_spec(path)


def test_missing_file_is_a_spec_error(tmp_path):
    with pytest.raises(SpecError, match="cannot read spec"):
        load_spec(tmp_path / "nothing.json")


def test_non_equivariant_gluing_is_rejected():
    spec = make_spec([conic("a"), conic("b")], [(real_point("a"), pair_point("b"))])
    with pytest.raises(GluingError, match="not G-equivariant"):
        build(spec)


def test_disconnected_spec_is_rejected():
    spec = make_spec([conic("a"), conic("b")], [])
    with pytest.raises(DisconnectedSpecError):
        build(spec)


def test_unsupported_piece_models():
    with pytest.raises(CurveModelError):
        build_model("x", "proper", 2, 2, [])
    with pytest.raises(CurveModelError):
        build_model("x", "proper", 1, 0, [])
    with pytest.raises(CurveModelError):
        build_model("x", "proper", 2, 1, [], model="nonsplit")


# ---------------------------------------------------------------------------
# Gluing plan and real components
# ---------------------------------------------------------------------------

def test_plan_attaches_pieces_before_identifications():
    spec = make_spec(
        [conic("a"), conic("b"), conic("c")],
        [
            (real_point("b"), real_point("c")),
            (real_point("a"), real_point("c")),
            (pair_point("a"), pair_point("a", conjugate=True)),
            (pair_point("a"), pair_point("b")),
            (pair_point("b"), pair_point("a", conjugate=True)),
        ],
    )
    ops = [step.operation for step in plan_gluings(spec)]
    assert ops == [
        'attach_base', 'wedge_real', 'wedge_pair',
        'real_identification', 'conjugate_identification', 'pair_identification',
    ]


def test_pi0_real_merges_wedged_components():
    spec = make_spec(
        [conic("a"), {"name": "E", "kind": "proper", "genus": 1, "ovals": 2}],
        [(real_point("a"), real_point("E", "oval1"))],
    )
    pi0 = pi0_real(spec)
    assert pi0.base == "a.oval0"
    assert len(pi0) == 2
    assert set(pi0.members[pi0.base]) == {"a.oval0", "E.oval1"}


# ---------------------------------------------------------------------------
# Bundled curves
# ---------------------------------------------------------------------------

def test_thrice_punctured_line(bundled):
    data = bundled["p1_minus_3_points"]
    assert data.nil2.n == 2
    assert data.nil2.center_rank == 1
    assert [list(col) for col in data.abelianization.tau.T] == [[-1, 0], [0, -1]]
    assert h1(data.abelianization).order == 4
    assert data.pi0.elements == ["line.arc0", "line.arc1", "line.arc2"]
    assert list(data.kappa("line.arc1").rep) == [1, 0]
    assert list(data.kappa("line.arc2").rep) == [0, 1]
    assert verify_unit_adjunction(data).passed


def test_elliptic_curve_with_two_ovals(bundled):
    data = bundled["elliptic_2_ovals"]
    assert data.nil2.n == 2
    assert data.nil2.center_rank == 0
    assert h1(data.abelianization).describe() == "Z/2"
    assert data.kappa("E.oval0").is_zero()
    assert list(data.kappa("E.oval1").rep) == [0, 1]
    assert not data.kappa("E.oval1").is_zero()


def test_m_curve_genus_two(bundled):
    data = bundled["m_curve_genus_2"]
    assert data.nil2.n == 4
    assert data.nil2.center_rank == 5
    assert h1(data.abelianization).dimension == 2
    assert len(data.pi0) == 3
    assert verify_unit_adjunction(data).passed


def test_rank_three_minus_identity(bundled):
    data = bundled["rank3_minus_i"]
    assert data.nil2.n == 3
    assert [list(col) for col in data.abelianization.tau.T] == [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    assert h1(data.abelianization).order == 8
    assert len(data.pi0) == 4


def test_pointless_conic_violates_hypothesis(bundled):
    data = bundled["pointless_conic_glued"]
    assert not data.hypothesis.met
    assert data.hypothesis.violations == ["piece 'pointless' has no real points"]
    report = verify_unit_adjunction(data)
    assert report.status == 'skipped'
    assert report.passed is False


# ---------------------------------------------------------------------------
# Gluing cases
# ---------------------------------------------------------------------------

def h1_change(data, operation):
    row = data.build_log[data.build_log['operation'] == operation].iloc[0]
    return row['h1_after'] - row['h1_before']


def test_wedge_along_conjugate_pair_adds_a_component():
    data = build(make_spec([conic("a"), conic("b")], [(pair_point("a"), pair_point("b"))]))
    assert data.nil2.n == 1
    assert h1(data.abelianization).describe() == "Z/2"
    assert len(data.pi0) == 2
    assert verify_unit_adjunction(data).passed


def test_conjugate_identification_adds_a_node_component():
    data = build(make_spec([conic("a")], [(pair_point("a"), pair_point("a", conjugate=True))]))
    assert h1_change(data, 'conjugate_identification') == 1
    assert "node0" in data.pi0.elements
    assert verify_unit_adjunction(data).passed


def test_pair_identification_leaves_h1_unchanged():
    data = build(make_spec(
        [conic("a"), conic("b")],
        [(real_point("a"), real_point("b")), (pair_point("a"), pair_point("b"))],
    ))
    assert data.nil2.n == 2
    assert h1_change(data, 'pair_identification') == 0
    assert len(data.pi0) == 1


def test_real_identification_merges_components():
    E = {"name": "E", "kind": "proper", "genus": 1, "ovals": 2}
    data = build(make_spec([E], [(real_point("E", "oval0"), real_point("E", "oval1"))], base={"piece": "E", "component": "oval0"}))
    assert data.nil2.n == 3
    assert h1_change(data, 'real_identification') == -1
    assert len(data.pi0) == 1
    assert h1(data.abelianization).order == 1


def test_build_log_columns(bundled):
    log = bundled["p1_minus_3_points"].build_log
    assert list(log.columns) == [
        'step', 'operation', 'gluing', 'piece', 'new_generators', 'h1_before', 'h1_after',
        'expected_h1_change', 'components_before', 'components_after',
    ]
    assert log.iloc[0]['operation'] == 'attach_base'


# ---------------------------------------------------------------------------
# Corpus properties
# ---------------------------------------------------------------------------

def test_corpus_ranks_are_bounded(corpus):
    assert all(data.nil2.n <= 6 for data in corpus)


def test_corpus_gluing_lemmas(corpus):
    for data in corpus:
        report = check_gluing_lemmas(data)
        assert report.passed, data.spec.name


def test_corpus_kappa_is_the_adjunction_unit(hypothesis_corpus):
    for data in hypothesis_corpus:
        report = verify_unit_adjunction(data)
        assert report.passed, (data.spec.name, report.to_dict())
        assert len(data.pi0) == 1 + h1(data.abelianization).dimension
        assert sym_pi0(data).matches_kappa


# ---------------------------------------------------------------------------
# Explicit models and unreadable input
# ---------------------------------------------------------------------------

def explicit_piece(name, model, kind="proper", genus=1, ovals=1, **extra):
    return dict({"name": name, "kind": kind, "genus": genus, "ovals": ovals, "model": model}, **extra)


def test_explicit_model_matches_standard_elliptic_curve():
    model = {"tau": [[1, 0], [0, -1]], "ovals": [{"v": [0, 0]}, {"v": [0, 1]}]}
    data = build(make_spec([explicit_piece("E", model, ovals=2)], []))
    assert data.nil2.n == 2
    assert h1(data.abelianization).describe() == "Z/2"
    assert len(data.pi0) == 2
    assert verify_unit_adjunction(data).passed


def test_explicit_punctured_model_uses_arcs():
    model = {"tau": [[-1]], "ovals": [{"v": [0]}, {"v": [1]}]}
    piece = explicit_piece("line", model, kind="punctured", genus=0, ovals=2, punctures=["real", "real"])
    data = build(make_spec([piece], [], base={"piece": "line", "component": "arc0"}))
    assert data.pi0.elements == ["line.arc0", "line.arc1"]


def test_involution_fixing_the_surface_relation_is_rejected():
    spec = make_spec([explicit_piece("E", {"tau": [[1, 0], [0, 1]]})], [])
    with pytest.raises(CurveModelError, match=r"pieces\[0\]\.model: tau must act by -1 on the surface relation"):
        build(spec)


def test_explicit_rank_must_match_genus():
    tau = [[-1 if i == j else 0 for j in range(4)] for i in range(4)]
    with pytest.raises(CurveModelError, match=r"pieces\[0\]\.model\.tau: rank 4.*genus 1 has rank 2"):
        build(make_spec([explicit_piece("E", {"tau": tau})], []))


@pytest.mark.parametrize("oval, path", [
    ({"z": []}, r"ovals\[1\]\.v: every oval needs"),
    ({"v": [0, 1, 0]}, r"ovals\[1\]\.v: expected a list of 2 integers"),
    ({"v": [0, "1"]}, r"ovals\[1\]\.v: expected a list of 2 integers"),
])
def test_bad_oval_sections_name_their_field(oval, path):
    model = {"tau": [[1, 0], [0, -1]], "ovals": [{"v": [0, 0]}, oval]}
    with pytest.raises(CurveModelError, match=r"pieces\[0\]\.model\." + path):
        build(make_spec([explicit_piece("E", model, ovals=2)], []))


def test_invalid_utf8_is_a_spec_error(tmp_path):
    path = tmp_path / "binary.json"
    path.write_bytes(b'\xff\xfe{"name":')
    with pytest.raises(SpecError, match="not valid UTF-8"):
        load_spec(path)


# ---------------------------------------------------------------------------
# Relabeling
# ---------------------------------------------------------------------------

def relabeled(spec, prefix="r_"):
    """Same curve with pieces renamed and listed in reverse order."""
    doc = spec.to_dict()
    doc["pieces"] = [dict(p, name=prefix + p["name"]) for p in reversed(doc["pieces"])]
    for gluing in doc["gluings"]:
        for point in gluing["points"]:
            point["piece"] = prefix + point["piece"]
    doc["base"]["piece"] = prefix + doc["base"]["piece"]
    return CurveSpec.from_dict(doc)


def invariants(data):
    H1 = h1(data.abelianization)
    return (
        data.nil2.n,
        data.nil2.center_rank,
        H1.describe(),
        len(data.pi0),
        len({data.kappa(c).coordinates() for c in data.pi0.elements}),
        data.hypothesis.met,
    )


def test_build_is_functorial_under_relabeling(corpus_specs, corpus):
    for spec, data in zip(corpus_specs, corpus):
        assert invariants(build(relabeled(spec))) == invariants(data), spec.name
