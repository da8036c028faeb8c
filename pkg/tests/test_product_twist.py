import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from twistred.lie_core import build_algebra
from twistred.product_twist import (
    ConstraintInfeasibleError,
    CouplingVector,
    ProductSpace,
    SingularityError,
    subspace_angle,
)

tol = 1e-10

CASES = [("A", 1, 1, 1), ("A", 1, 1, 3), ("A", 2, 1, 2), ("A", 2, 2, 2), ("A", 3, 2, 3), ("B", 2, 1, 2), ("G2", 2, 1, 1), ("D", 4, 3, 2)]


def make_space(family, rank, order, N, seed=0):
    rng = np.random.default_rng(seed)
    coupling = CouplingVector.from_weights(rng.uniform(0.5, 2.0, N))
    return ProductSpace.build(build_algebra(family, rank), coupling, order)


@pytest.fixture(params=CASES, ids=lambda c: "{}{}-g{}-N{}".format(*c))
def space(request):
    return make_space(*request.param)


def test_coupling_validation():
    with pytest.raises(ValueError):
        CouplingVector((2.0, 3.0))
    with pytest.raises(ValueError):
        CouplingVector((-2.0, 2.0))
    lam = CouplingVector.from_weights([1.0, 2.0, 5.0])
    assert abs(np.sum(1 / lam.array) - 1) < 1e-12
    marks = CouplingVector.from_marks([0.1, 0.4, 0.9])
    assert np.allclose(marks.array, [1 / 0.2, 1 / 0.3, 1 / 0.5])


def test_twist_identity_for_single_untwisted_site():
    sp = ProductSpace.build(build_algebra("A", 2), CouplingVector((1.0,)))
    x = np.random.default_rng(0).standard_normal((1, 8))
    assert np.array_equal(sp.twist_apply(x), x)
    assert np.array_equal(sp.twist_transpose(x), x)


def test_uniform_transpose_shifts_left():
    sp = ProductSpace.build(build_algebra("A", 1), CouplingVector((3.0, 3.0, 3.0)))
    x = np.arange(9, dtype=float).reshape(3, 3)
    assert np.array_equal(sp.twist_transpose(x), np.roll(x, -1, axis=0))


def test_transpose_property(space):
    rng = np.random.default_rng(1)
    for _ in range(100):
        x, y = rng.standard_normal((2, space.N, space.d))
        assert abs(space.inner(space.twist_apply(x), y) - space.inner(x, space.twist_transpose(y))) < 1e-12 * 10


def test_projections(space):
    rng = np.random.default_rng(2)
    x, y = rng.standard_normal((2, space.N, space.d))
    k = space.project_K(x)
    assert np.abs(space.project_K(k) - k).max() < tol
    assert abs(space.inner(space.project_K(x), y - space.project_K(y))) < tol
    assert abs(space.inner(space.project_Q(x), y - space.project_Q(y))) < tol
    dims = space.K_basis.shape[1], space.Q_basis.shape[1], space.gamma.fixed_rank
    assert dims[0] == dims[1] == dims[2]


def test_Q_in_kernel_of_constraint_map(space):
    q = space.alcove.sample(np.random.default_rng(3), margin=0.01)
    L = space.constraint_matrix(q)
    assert np.abs(L @ space.Q_basis).max() < tol


def test_Z_rank_kernel_and_image(space):
    rng = np.random.default_rng(4)
    for _ in range(5):
        q = space.alcove.sample(rng, margin=0.01)
        L = space.constraint_matrix(q)
        s = np.linalg.svd(L, compute_uv=False)
        assert int(np.sum(s > 1e-8 * s[0])) == space.size - space.gamma.fixed_rank
        assert subspace_angle(scipy.linalg.null_space(L, rcond=1e-8), space.Q_basis) < 1e-8
        assert subspace_angle(scipy.linalg.orth(L, rcond=1e-8), space.K_perp_basis) < 1e-8
        assert np.linalg.matrix_rank(space.Z_operator(q)) == space.size - space.gamma.fixed_rank


def test_Z_determinant_su2_half_period():
    sp = ProductSpace.build(build_algebra("A", 1), CouplingVector((1.0,)))
    q = np.array([np.pi / np.sqrt(2)])
    Z = sp.Z_operator(q)
    assert abs(np.linalg.det(Z) - 4.0) < 1e-12


def test_guard_band_rejects_walls():
    sp = ProductSpace.build(build_algebra("A", 1), CouplingVector((1.0,)))
    with pytest.raises(SingularityError):
        sp.Z_operator(np.array([1e-10]))


def test_Z_equivariance():
    sp = make_space("A", 2, 1, 3, seed=5)
    rng = np.random.default_rng(5)
    q = sp.alcove.sample(rng, margin=0.05)
    t = rng.standard_normal(2)
    eta = sp.project_K_perp(rng.standard_normal((3, 8)))
    lhs = sp.Z_solve(q, sp.K_action(t, eta))
    rhs = sp.K_action(t, sp.Z_solve(q, eta))
    assert np.abs(lhs - rhs).max() < tol


def test_constraint_solution(space):
    rng = np.random.default_rng(6)
    for _ in range(10):
        pt = space.random_reduced_point(rng)
        J = space.solve_momentum_constraint(pt.q, pt.p, pt.xi)
        assert np.abs(space.momentum_residual(pt.q, J, pt.xi)).max() < tol * max(1, np.abs(pt.xi).max())


def test_zero_spin_gives_free_current(space):
    rng = np.random.default_rng(7)
    pt = space.random_reduced_point(rng)
    J = space.solve_momentum_constraint(pt.q, pt.p, np.zeros_like(pt.xi))
    assert np.abs(J - space.lift(pt.p[None, :] / space.lambdas[:, None])).max() < 1e-14
    h = space.H_S_operator_form(pt.q, pt.p, np.zeros_like(pt.xi))
    assert h == pytest.approx(0.5 * pt.p @ pt.p, abs=1e-14)


def test_constraint_against_least_squares():
    sp = ProductSpace.build(build_algebra("A", 1), CouplingVector((2.0, 2.0)))
    rng = np.random.default_rng(8)
    pt = sp.random_reduced_point(rng)
    J = sp.solve_momentum_constraint(pt.q, pt.p, pt.xi)
    # least-squares: minimize |L J + xi| subject to the Q-component of J fixed by p
    L = sp.constraint_matrix(pt.q)
    A = np.vstack([L, (sp.Q_basis * sp.metric_diag[:, None]).T])
    b = np.concatenate([-pt.xi.ravel(), sp.Q_basis.T @ (sp.metric_diag * J.ravel())])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    assert np.abs(sol.reshape(J.shape) - J).max() < tol


def test_infeasible_spin_rejected():
    sp = make_space("A", 1, 1, 2)
    xi = np.zeros((2, 3))
    xi[:, 0] = 1.0
    with pytest.raises(ConstraintInfeasibleError):
        sp.H_S_operator_form(np.array([1.0]), np.array([0.0]), xi)


def test_hamiltonian_forms_agree(space):
    rng = np.random.default_rng(9)
    for _ in range(20):
        pt = space.random_reduced_point(rng)
        h1 = space.H_S_operator_form(pt.q, pt.p, pt.xi)
        h2 = space.H_S_U_form(pt.q, pt.p, pt.xi)
        assert abs(h1 - h2) < tol * max(1, abs(h1))


def test_hamiltonian_residual_gauge_invariance(space):
    rng = np.random.default_rng(10)
    pt = space.random_reduced_point(rng)
    F = space.gamma.fixed_cartan
    t = F @ rng.standard_normal(F.shape[1])
    h1 = space.H_S_operator_form(pt.q, pt.p, pt.xi)
    h2 = space.H_S_operator_form(pt.q, pt.p, space.K_action(t, pt.xi))
    assert abs(h1 - h2) < tol * max(1, abs(h1))


def test_hamiltonian_cartan_basis_independence():
    rng = np.random.default_rng(11)
    rot = scipy.linalg.expm(np.array([[0.0, 0.7], [-0.7, 0.0]]))
    coupling = CouplingVector.from_weights([1.0, 3.0])
    a = ProductSpace.build(build_algebra("A", 2), coupling)
    b = ProductSpace.build(build_algebra("A", 2, cartan_rotation=rot), coupling)
    pt = a.random_reduced_point(rng)
    # the same abstract point in coordinates of the rotated Cartan basis
    R = np.eye(8)
    R[:2, :2] = rot.T
    ha = a.H_S_operator_form(pt.q, pt.p, pt.xi)
    hb = b.H_S_operator_form(rot.T @ pt.q, rot.T @ pt.p, pt.xi @ R.T)
    assert abs(ha - hb) < tol * max(1, abs(ha))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 4))
def test_property_constraint_and_forms(seed, N):
    rng = np.random.default_rng(seed)
    sp = ProductSpace.build(build_algebra("A", 2), CouplingVector.from_weights(rng.uniform(0.3, 3, N)))
    pt = sp.random_reduced_point(rng)
    J = sp.solve_momentum_constraint(pt.q, pt.p, pt.xi)
    assert np.abs(sp.momentum_residual(pt.q, J, pt.xi)).max() < 1e-9 * max(1, np.abs(J).max())
    h1, h2 = sp.H_S_operator_form(pt.q, pt.p, pt.xi), sp.H_S_U_form(pt.q, pt.p, pt.xi)
    assert abs(h1 - h2) < tol * max(1, abs(h1))
