import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistred.lie_core import SUPPORTED_RANKS, build_algebra, diagram_automorphism
from twistred.product_twist import CouplingVector, ProductSpace
from twistred.quantum_spectrum import (
    WeightError,
    casimir_brute_force,
    casimir_value,
    contragredient,
    dimension,
    dominant_conjugate,
    enumerate_levels,
    singlet_dimension,
    singlet_dimension_by_weights,
    spin_potential_matrix,
    su2_irrep,
    su2_singlet_by_weights,
    su2_singlet_dimension,
    tensor_multiplicity,
    twist_weight,
    weight_form,
    weight_multiplicities,
    weyl_constant,
)
from twistred.realization import su_realization

tol = 1e-12

A1 = build_algebra("A", 1)
A2 = build_algebra("A", 2)


def test_su2_singlet_examples():
    assert su2_singlet_dimension(1, 1, 2) == 1
    assert su2_singlet_dimension(1, 1, 1) == 0
    assert su2_singlet_dimension(0, 0, 0) == 1
    assert su2_singlet_dimension(2, 2, 2) == 1
    assert su2_singlet_dimension(1, 1, 4) == 0


def test_su2_singlet_methods_agree():
    for a, b, c in itertools.product(range(13), repeat=3):
        expected = su2_singlet_by_weights(a, b, c)
        assert su2_singlet_dimension(a, b, c) == expected
        assert singlet_dimension(A1, (a,), (b,), (c,)) == expected


@pytest.mark.parametrize("labels,frozen", [((0,), 0.0), ((1,), -1.5), ((2,), -4.0), ((3,), -7.5)])
def test_su2_casimir_frozen(labels, frozen):
    assert casimir_value(A1, [labels]) == pytest.approx(frozen, abs=tol)


def test_casimir_against_representation_matrices():
    for m in range(21):
        assert abs(casimir_brute_force(su2_irrep(A1, m)) - casimir_value(A1, [(m,)])) < tol * max(1, m * m)


def test_su3_defining_casimir_from_realization():
    real = su_realization(A2)
    c = sum(B @ B for B in real.basis)
    assert np.abs(c + 8 / 3 * np.eye(3)).max() < tol
    assert casimir_value(A2, [(1, 0)]) == pytest.approx(-8 / 3, abs=tol)
    assert casimir_value(A2, [(0, 1)]) == pytest.approx(-8 / 3, abs=tol)
    assert casimir_value(A2, [(1, 1)]) == pytest.approx(-6.0, abs=tol)


def test_su2_irrep_is_a_representation():
    rep = su2_irrep(A1, 3)
    for a, b in itertools.product(range(3), repeat=2):
        comm = rep[a] @ rep[b] - rep[b] @ rep[a]
        expected = np.einsum("c,cij->ij", A1.bracket(np.eye(3)[a], np.eye(3)[b]), rep)
        assert np.abs(comm - expected).max() < tol
    for r in rep:
        assert np.abs(r + r.conj().T).max() < tol


def test_casimir_grows_along_dominant_chain():
    values = [casimir_value(A2, [(k, k)]) for k in range(6)]
    assert np.all(np.diff(values) < 0)
    assert casimir_value(A1, [(2,), (2,)], [2.0, 4.0]) == pytest.approx(-4 / 2 - 4 / 4, abs=tol)


def test_weyl_constant_frozen_and_independent_of_sites():
    assert weyl_constant(A1) == pytest.approx(-0.25, abs=tol)
    assert weyl_constant(A2) == pytest.approx(-1.0, abs=tol)
    assert weyl_constant(A2, 3, [1.0, 2.0, 0.5]) == weyl_constant(A2)


def test_rejects_non_dominant_weights():
    with pytest.raises(WeightError):
        casimir_value(A2, [(1, -1)])
    with pytest.raises(WeightError):
        dimension(A2, (1,))


def test_weight_form_is_exact():
    assert weight_form(A2, (1, 0), (1, 0)) == Fraction(2, 3)
    assert weight_form(A1, (1,), (1,)) == Fraction(1, 2)


@pytest.mark.parametrize(
    "family,rank,labels,dim",
    [("A", 2, (1, 0), 3), ("A", 2, (2, 0), 6), ("A", 2, (1, 1), 8), ("A", 3, (0, 1, 0), 6), ("A", 3, (1, 0, 1), 15),
     ("G2", 2, (1, 0), 7), ("G2", 2, (0, 1), 14), ("D", 4, (0, 1, 0, 0), 28)],
)
def test_dimensions_frozen(family, rank, labels, dim):
    assert dimension(build_algebra(family, rank), labels) == dim


@pytest.mark.parametrize("family,rank", [(f, r) for f, rs in SUPPORTED_RANKS.items() for r in rs if r <= 4])
def test_multiplicities_sum_to_weyl_dimension(family, rank):
    alg = build_algebra(family, rank)
    for i in range(rank):
        labels = tuple(int(j == i) for j in range(rank))
        assert sum(weight_multiplicities(alg, labels).values()) == dimension(alg, labels)
    adjoint = weight_multiplicities(alg, _highest_root_labels(alg))
    assert sum(adjoint.values()) == alg.dim
    assert adjoint[(0,) * rank] == rank


def _highest_root_labels(alg):
    # the adjoint representation is the irrep of largest dimension among small labels
    best = None
    for labels in itertools.product(range(3), repeat=alg.rank):
        if dimension(alg, labels) == alg.dim:
            best = labels
            break
    return best


def test_contragredient_and_twist():
    assert contragredient(A2, (2, 1)) == (1, 2)
    assert contragredient(A1, (3,)) == (3,)
    assert dominant_conjugate(A2, (-1, 0)) == (0, 1)
    gamma = diagram_automorphism(A2, 2)
    assert twist_weight(gamma, (2, 1)) == (1, 2)


def test_tensor_products_su3():
    assert tensor_multiplicity(A2, (1, 0), (0, 1), (0, 0)) == 1
    assert tensor_multiplicity(A2, (1, 0), (0, 1), (1, 1)) == 1
    assert tensor_multiplicity(A2, (1, 1), (1, 1), (1, 1)) == 2
    assert singlet_dimension(A2, (1, 0), (1, 0), (1, 0)) == 1
    assert singlet_dimension(A2, (1, 1), (1, 1), (1, 1)) == 2


@pytest.mark.parametrize("family,rank", [("A", 2), ("A", 3), ("B", 2), ("G2", 2)])
def test_singlet_matches_weight_convolution(family, rank):
    alg = build_algebra(family, rank)
    labels = list(itertools.product(range(2), repeat=rank))
    for a, b, c in itertools.product(labels, repeat=3):
        assert singlet_dimension(alg, a, b, c) == singlet_dimension_by_weights(alg, a, b, c)


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.tuples(st.integers(0, 2), st.integers(0, 2))] * 3))
def test_property_singlet_symmetric(triple):
    a, b, c = triple
    base = singlet_dimension(A2, a, b, c)
    for perm in itertools.permutations((a, b, c)):
        assert singlet_dimension(A2, *perm) == base


# spectral levels


def test_levels_single_site_su2():
    levels = enumerate_levels(A1, None, [1.0], [(0,)], 9.0)
    assert [lv.energy for lv in levels] == pytest.approx([m * (m + 2) / 4 for m in range(6)], abs=tol)
    assert all(lv.multiplicity == 1 for lv in levels)


def test_levels_two_equal_sites_force_equal_weights():
    levels = enumerate_levels(A1, None, [2.0, 2.0], [(0,), (0,)], 4.0)
    assert [lv.weights for lv in levels] == [((m,), (m,)) for m in range(4)]
    assert [lv.energy for lv in levels] == pytest.approx([m * (m + 2) / 4 for m in range(4)], abs=tol)


def test_levels_energy_is_minus_half_casimir():
    lambdas = [1.5, 0.7]
    for lv in enumerate_levels(A2, None, lambdas, [(1, 0), (0, 1)], 8.0):
        assert lv.energy == pytest.approx(-0.5 * casimir_value(A2, lv.weights, lambdas), abs=tol)
        assert lv.energy <= 8.0 + tol


def test_levels_stable_under_cyclic_relabelling():
    a = enumerate_levels(A1, None, [1.0, 3.0], [(2,), (0,)], 6.0)
    b = enumerate_levels(A1, None, [3.0, 1.0], [(0,), (2,)], 6.0)
    assert [(lv.energy, lv.multiplicity) for lv in a] == pytest.approx([(lv.energy, lv.multiplicity) for lv in b])
    assert len(a) > 0


def test_levels_empty_below_zero_cutoff():
    assert enumerate_levels(A2, None, [1.0], [(0, 0)], -0.5) == []


def test_levels_with_twist():
    gamma = diagram_automorphism(A2, 2)
    levels = enumerate_levels(A2, gamma, [1.0], [(0, 0)], 6.0)
    for lv in levels:
        (w,) = lv.weights
        assert singlet_dimension(A2, twist_weight(gamma, contragredient(A2, w)), w, (0, 0)) == lv.multiplicity
    # with the outer twist the closing factor is V_Lambda (x) V_Lambda, so only self-dual weights survive
    assert [lv.weights for lv in levels] == [((0, 0),), ((1, 1),)]


# spin potential


def su2_space(weights):
    return ProductSpace.build(A1, CouplingVector.from_weights(weights))


@pytest.mark.parametrize("m", [0, 2, 4, 6])
def test_spin_potential_single_site(m):
    q = np.array([0.9])
    V = spin_potential_matrix(su2_space([1.0]), q, [(m,)])
    theta = np.sqrt(2) * q[0]
    assert V.shape == (1, 1)
    # Casimir on the zero-weight vector with R = 1 / (4 sin^2(theta / 2)) on the root plane
    assert V[0, 0].real == pytest.approx(m * (m + 2) / (16 * np.sin(theta / 2) ** 2), abs=tol)


def test_spin_potential_zero_spin_and_odd_parity():
    space = su2_space([1.0, 2.0])
    q = np.array([1.1])
    V0 = spin_potential_matrix(space, q, [(0,), (0,)])
    assert V0.shape == (1, 1) and abs(V0[0, 0]) < tol
    assert spin_potential_matrix(space, q, [(1,), (0,)]).shape == (0, 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 4.2), st.integers(0, 3), st.integers(0, 3), st.floats(0.5, 2.0))
def test_property_spin_potential_hermitian_psd(x, a, b, lam):
    V = spin_potential_matrix(su2_space([1.0, lam]), np.array([x]), [(a,), (b,)])
    if V.size == 0:
        return
    assert np.abs(V - V.conj().T).max() < tol
    assert np.linalg.eigvalsh(V).min() > -1e-10 * max(1, np.abs(V).max())
