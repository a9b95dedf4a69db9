"""
Tests for integer linear algebra and Z/2 cohomology.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilsection.zcoh import (
    CocycleError,
    CohClass,
    EquivarianceError,
    IntegerLattice,
    InvolutiveLattice,
    LatticeError,
    as_matrix,
    as_vector,
    check_cup_wedge_injective,
    coboundary_matrix,
    cocycle_matrix,
    cup_h1_h1,
    exterior_square,
    f2_rank,
    h1,
    h2,
    hermite_rows,
    identity,
    integer_det,
    kernel_basis,
    mat_mul,
    pushforward,
    reduce_mod_lattice,
    smith_normal_form,
    solve_f2,
    solve_integer,
    tate_h0,
    tensor_square,
    wedge_class,
    wedge_quotient_matrix,
    zeros,
)

small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def integer_matrices(draw, max_rows=4, max_cols=4):
    m = draw(st.integers(min_value=1, max_value=max_rows))
    n = draw(st.integers(min_value=1, max_value=max_cols))
    return as_matrix(draw(st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=m, max_size=m)))


# Involutions up to conjugacy are sums of the three indecomposables Z+, Z-, Z[G].
INVOLUTION_BLOCKS = {
    'plus': [[1]],
    'minus': [[-1]],
    'swap': [[0, 1], [1, 0]],
}


def block_involution(blocks):
    size = sum(len(INVOLUTION_BLOCKS[b]) for b in blocks)
    tau = zeros(size, size)
    at = 0
    for b in blocks:
        block = INVOLUTION_BLOCKS[b]
        k = len(block)
        tau[at:at + k, at:at + k] = as_matrix(block)
        at += k
    return InvolutiveLattice(size, tau, '+'.join(blocks))


@st.composite
def involutive_lattices(draw, max_blocks=3):
    blocks = draw(st.lists(st.sampled_from(sorted(INVOLUTION_BLOCKS)), min_size=1, max_size=max_blocks))
    M = block_involution(blocks)
    # conjugate by a unimodular shear to leave the block basis
    n = M.rank
    S = identity(n)
    for i, j in itertools.permutations(range(n), 2):
        if draw(st.booleans()) and i < j:
            S[i, j] = draw(st.integers(min_value=-2, max_value=2))
    S_inv = as_matrix(np.round(np.linalg.inv(S.astype(float))).astype(int))
    return InvolutiveLattice(n, mat_mul(mat_mul(S, M.tau), S_inv), f"shear({M.label})")


# ---------------------------------------------------------------------------
# Smith normal form and integer solving
# ---------------------------------------------------------------------------

def test_smith_normal_form_example():
    U, D, V = smith_normal_form([[2, 0], [0, 3]])
    assert [D[0, 0], D[1, 1]] == [1, 6]
    assert np.array_equal(mat_mul(mat_mul(U, as_matrix([[2, 0], [0, 3]])), V), D)


def test_smith_normal_form_trivial_cases():
    U, D, V = smith_normal_form(zeros(2, 3))
    assert np.array_equal(D, zeros(2, 3))
    assert np.array_equal(U, identity(2)) and np.array_equal(V, identity(3))
    _, D, _ = smith_normal_form([[1]])
    assert D[0, 0] == 1


@settings(max_examples=1000, deadline=None)
@given(integer_matrices(max_rows=8, max_cols=8))
def test_smith_normal_form_properties(A):
    U, D, V = smith_normal_form(A)
    assert np.array_equal(mat_mul(mat_mul(U, A), V), D)
    assert abs(integer_det(U)) == 1
    assert abs(integer_det(V)) == 1
    m, n = D.shape
    assert all(D[i, j] == 0 for i in range(m) for j in range(n) if i != j)
    diagonal = [D[i, i] for i in range(min(m, n)) if D[i, i] != 0]
    assert all(d > 0 for d in diagonal)
    assert all(b % a == 0 for a, b in zip(diagonal, diagonal[1:]))


@given(integer_matrices())
def test_kernel_basis_is_annihilated(A):
    K = kernel_basis(A)
    assert K.shape[0] == A.shape[1]
    assert not any(mat_mul(A, K).flat)


@given(integer_matrices(), st.data())
def test_solve_integer_recovers_a_solution(A, data):
    x = as_vector(data.draw(st.lists(small_ints, min_size=A.shape[1], max_size=A.shape[1])))
    b = mat_mul(A, x)
    y = solve_integer(A, b)
    assert y is not None
    assert np.array_equal(mat_mul(A, y), b)


def test_solve_integer_zero_and_unsolvable():
    assert not any(solve_integer([[2, 0], [0, 2]], [0, 0]))
    assert solve_integer([[2, 0], [0, 2]], [1, 0]) is None


def test_integer_det():
    assert integer_det([[2, 1], [7, 4]]) == 1
    assert integer_det([[0, 1, 0], [1, 0, 0], [0, 0, 5]]) == -5
    assert integer_det(zeros(0, 0)) == 1


def test_as_matrix_rejects_non_integers():
    with pytest.raises(LatticeError):
        as_matrix([[1.5, 0]])


# ---------------------------------------------------------------------------
# Echelon lattices
# ---------------------------------------------------------------------------

@given(integer_matrices(max_rows=3, max_cols=3), st.data())
def test_lattice_reduction_is_canonical(A, data):
    lattice = IntegerLattice.from_rows(A)
    n = A.shape[1]
    x = as_vector(data.draw(st.lists(small_ints, min_size=n, max_size=n)))
    coeffs = as_vector(data.draw(st.lists(small_ints, min_size=A.shape[0], max_size=A.shape[0])))
    shifted = x + mat_mul(coeffs, A)
    assert np.array_equal(lattice.reduce(shifted), lattice.reduce(x))
    assert mat_mul(coeffs, A) in lattice


def test_hermite_rows_and_reduction():
    rows = hermite_rows([[2, 4], [0, 6]])
    assert rows.shape == (2, 2)
    assert rows[0, 0] == 2 and rows[1, 0] == 0 and rows[1, 1] == 6
    assert list(reduce_mod_lattice([3, 7], [[2, 4], [0, 6]])) == [1, 3]


# ---------------------------------------------------------------------------
# Cohomology groups
# ---------------------------------------------------------------------------

def test_h1_examples():
    assert h1(InvolutiveLattice.from_matrix([[-1, 0], [0, -1]])).invariants == (2, 2)
    assert h1(InvolutiveLattice.from_matrix([[1]])).order == 1
    assert h1(InvolutiveLattice.from_matrix([[1, 0], [0, -1]])).describe() == "Z/2"


def test_h2_examples():
    assert h2(InvolutiveLattice.from_matrix([[1]])).describe() == "Z/2"
    assert h2(InvolutiveLattice.from_matrix([[-1]])).order == 1
    M = InvolutiveLattice.from_matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    H2 = h2(M)
    assert H2.describe() == "Z/2"
    assert not CohClass(2, [0, 0, 1], M).is_zero()
    assert CohClass(2, [1, 1, 0], M).is_zero()


def test_tate_h0_examples():
    assert tate_h0(InvolutiveLattice.from_matrix([[1]])).order == 2
    assert tate_h0(InvolutiveLattice.from_matrix([[-1]])).order == 1
    # Z[G] is induced, so its Tate cohomology vanishes
    assert tate_h0(InvolutiveLattice.from_matrix([[0, 1], [1, 0]])).order == 1


def test_involution_is_validated():
    with pytest.raises(LatticeError):
        InvolutiveLattice.from_matrix([[1, 1], [0, 1]])


def test_cocycle_condition_is_validated():
    M = InvolutiveLattice.from_matrix([[1, 0], [0, -1]])
    with pytest.raises(CocycleError):
        CohClass(1, [1, 0], M)
    with pytest.raises(CocycleError):
        CohClass(2, [0, 1], M)


def brute_force_order(M, degree):
    """Count classes directly: twice every cocycle is a coboundary, so K·{0,1}^k meets every class."""
    K = kernel_basis(cocycle_matrix(M, degree))
    boundaries = IntegerLattice.from_rows(coboundary_matrix(M, degree).T, M.rank)
    classes = set()
    for bits in itertools.product((0, 1), repeat=K.shape[1]):
        rep = mat_mul(K, as_vector(bits))
        classes.add(tuple(int(v) for v in boundaries.reduce(rep)))
    return len(classes)


@settings(max_examples=40)
@given(involutive_lattices())
def test_group_order_matches_enumeration(M):
    for degree in (1, 2):
        group = h1(M) if degree == 1 else h2(M)
        assert all(d == 2 for d in group.invariants)
        assert brute_force_order(M, degree) == group.order


@settings(max_examples=40)
@given(involutive_lattices())
def test_elements_are_distinct_classes(M):
    H1 = h1(M)
    coords = [x.coordinates() for x in H1.elements()]
    assert len(set(coords)) == H1.order


@settings(max_examples=40)
@given(involutive_lattices(), st.data())
def test_class_is_independent_of_coboundaries(M, data):
    H1 = h1(M)
    for x in H1.elements():
        w = as_vector(data.draw(st.lists(small_ints, min_size=M.rank, max_size=M.rank)))
        shifted = CohClass(1, x.rep + mat_mul(M.tau - identity(M.rank), w), M)
        assert shifted == x
        assert np.array_equal(shifted.canonical().rep, x.canonical().rep)


# ---------------------------------------------------------------------------
# Cup products and pushforward
# ---------------------------------------------------------------------------

def test_cup_product_examples():
    M = InvolutiveLattice.from_matrix([[-1, 0], [0, -1]])
    e1, e2 = CohClass(1, [1, 0], M), CohClass(1, [0, 1], M)
    zero = CohClass(1, [0, 0], M)
    assert cup_h1_h1(zero, zero).is_zero()
    c = cup_h1_h1(e1, e2)
    assert list(c.rep) == [0, -1, 0, 0]
    assert not c.is_zero()
    assert wedge_class(cup_h1_h1(e1, e1), M).is_zero()
    assert not wedge_class(c, M).is_zero()


@settings(max_examples=25)
@given(involutive_lattices(max_blocks=2))
def test_cup_product_is_bilinear_and_alternating_on_wedges(M):
    classes = list(h1(M).elements())
    for x, y, z in itertools.product(classes, repeat=3):
        assert cup_h1_h1(x + y, z) == cup_h1_h1(x, z) + cup_h1_h1(y, z)
    for x in classes:
        assert wedge_class(cup_h1_h1(x, x), M).is_zero()


def test_pushforward_examples():
    M = InvolutiveLattice.from_matrix([[-1, 0], [0, -1]])
    x = CohClass(1, [1, 1], M)
    assert pushforward(identity(2), x, M) == x
    assert pushforward(zeros(2, 2), x, M).is_zero()
    T = tensor_square(M)
    e12 = CohClass(2, [0, 1, 0, 0], T)
    image = pushforward(wedge_quotient_matrix(2), e12, exterior_square(M))
    assert list(image.rep) == [1]


def test_pushforward_rejects_non_equivariant_maps():
    M = InvolutiveLattice.from_matrix([[-1]])
    N = InvolutiveLattice.from_matrix([[1]])
    with pytest.raises(EquivarianceError):
        pushforward([[1]], CohClass(1, [1], M), N)


def test_derived_lattices_are_cached():
    M = InvolutiveLattice.from_matrix([[0, 1], [1, 0]])
    assert tensor_square(M) is tensor_square(M)
    assert exterior_square(M) is exterior_square(M)


@settings(max_examples=30)
@given(involutive_lattices(max_blocks=2))
def test_cup_wedge_injective(M):
    report = check_cup_wedge_injective(M)
    assert report.passed
    assert report.to_dict()['h1_dimension'] == h1(M).dimension


# ---------------------------------------------------------------------------
# F2 linear algebra
# ---------------------------------------------------------------------------

def test_f2_rank_and_solve():
    assert f2_rank([]) == 0
    assert f2_rank([(1, 0, 1), (0, 1, 1), (1, 1, 0)]) == 2
    x = solve_f2([[1, 0], [0, 1], [1, 1]], [1, 0, 1])
    assert list(x) == [1, 0]
    assert solve_f2([[1, 0], [0, 1], [1, 1]], [1, 1, 1]) is None
