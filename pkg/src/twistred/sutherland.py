"""Closed-form spin Sutherland Hamiltonian for the untwisted case.

The operator ``U(q)^T U(q)`` is diagonal in the root decomposition: on the
Cartan block it acts through ``Lambda^-1 M(0)`` and on each root space
through ``Lambda^-1 M(i theta)``.  The inverses of these N x N matrices are
known in closed form, which gives an explicit Hamiltonian and its gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .product_twist import ProductSpace, ReducedPoint

ARG_GUARD = 1e-8
INTEGRATION_GUARD = 1e-6


class SingularArgumentError(ValueError):
    pass


def _lams(coupling) -> np.ndarray:
    return np.asarray(getattr(coupling, "lambdas", coupling), dtype=float)


def _b(lam) -> np.ndarray:
    b = np.cumsum(1.0 / lam)
    return b[:, None] - b[None, :]


def M_matrix(x: float, coupling) -> np.ndarray:
    """Cyclic tridiagonal matrix ``M(ix)``; indices wrap modulo N."""
    lam = _lams(coupling)
    n = len(lam)
    m = np.zeros((n, n), dtype=complex)
    for i in range(n):
        nxt = (i + 1) % n
        m[i, i] += lam[i] + lam[nxt]
        m[i, (i - 1) % n] -= lam[i] * np.exp(-1j * x / lam[i])
        m[i, nxt] -= lam[nxt] * np.exp(1j * x / lam[nxt])
    return m


def _check_arg(x):
    x = np.asarray(x, dtype=float)
    dist = np.abs(np.remainder(x + np.pi, 2 * np.pi) - np.pi)
    if np.any(dist < ARG_GUARD):
        raise SingularArgumentError("argument is too close to a multiple of 2 pi")


def P_matrix(x, coupling) -> np.ndarray:
    """Closed-form inverse of ``M(ix)``.  ``x`` may be an array; the matrix
    axes are appended."""
    _check_arg(x)
    x = np.asarray(x, dtype=float)[..., None, None]
    b = _b(_lams(coupling))
    half = x / 2
    s2 = np.sin(half) ** 2
    cot = np.cos(half) / np.sin(half)
    return np.exp(-1j * b * x) * (0.25 / s2 + 0.5j * b * cot - 0.5 * np.abs(b))


def P_matrix_derivative(x, coupling) -> np.ndarray:
    """Derivative of :func:`P_matrix` with respect to the real argument."""
    _check_arg(x)
    x = np.asarray(x, dtype=float)[..., None, None]
    b = _b(_lams(coupling))
    half = x / 2
    csc2 = 1.0 / np.sin(half) ** 2
    cot = np.cos(half) / np.sin(half)
    phase = np.exp(-1j * b * x)
    inner = 0.25 * csc2 + 0.5j * b * cot - 0.5 * np.abs(b)
    dinner = -0.25 * csc2 * cot - 0.25j * b * csc2
    return phase * (-1j * b * inner + dinner)


def P_prime(coupling) -> np.ndarray:
    b = _b(_lams(coupling))
    return 0.5 * (b**2 - np.abs(b))


def null_projector(coupling) -> np.ndarray:
    """Projection onto the complement of ``span(1,...,1)`` orthogonal for
    the inner product ``x^* Lambda y``."""
    lam = _lams(coupling)
    n = len(lam)
    return np.eye(n) - np.outer(np.ones(n), lam) / lam.sum()


def M0_pseudo_inverse(coupling) -> np.ndarray:
    lam = _lams(coupling)
    pi = null_projector(lam)
    return pi @ P_prime(lam) @ np.diag(lam) @ pi


# -----------------------------------------------------------------------------


def _require_untwisted(space: ProductSpace):
    if not space.gamma.is_identity:
        raise NotImplementedError("the closed-form Hamiltonian is only available for the trivial twist")


def _root_coefficients(space: ProductSpace, x):
    """Complex coefficients of ``x`` along ``X_phi`` for phi in (Phi+, Phi-).

    Uses ``a_phi = kappa(x, X_{-phi}) = -<x, X_{-phi}>``.
    """
    alg = space.alg
    P = alg.n_pos
    rv = alg.root_vectors
    neg = np.concatenate([rv[P:], rv[:P]])
    return -(np.asarray(x) @ neg.T)  # (..., N, 2P)


def I_operator_apply(space: ProductSpace, q, x) -> np.ndarray:
    """Action of ``U(q)^T U(q)`` (extended to the whole product) in closed form."""
    _require_untwisted(space)
    alg = space.alg
    r, P = alg.rank, alg.n_pos
    lam = space.lambdas
    x = space._shape(x)
    out = np.zeros_like(x)
    m0 = M_matrix(0.0, lam).real / lam[:, None]
    out[:, :r] = m0 @ x[:, :r]
    theta = alg.root_values(q)
    a = _root_coefficients(space, x)  # (N, 2P)
    new = np.empty_like(a)
    for k in range(P):
        mk = M_matrix(theta[k], lam) / lam[:, None]
        new[:, k] = mk @ a[:, k]
        new[:, P + k] = mk.conj() @ a[:, P + k]
    # x = sum a_phi X_phi -> back to (Y, Z)
    ap, am = new[:, :P], new[:, P:]
    out[:, r : r + P] = ((ap + am) / (np.sqrt(2) * 1j)).real
    out[:, r + P :] = ((ap - am) / np.sqrt(2)).real
    return out


@dataclass(frozen=True)
class SpinChargeBlock:
    """Pairings of the spin variables with the product basis vectors.

    ``roots[phi, I] = <X_phi^I, xi>_lambda`` for phi in (Phi+, Phi-) and
    ``cartan[j, I] = <T_j^I, xi_{K-perp}>_lambda``.
    """

    cartan: np.ndarray
    roots: np.ndarray

    @classmethod
    def from_xi(cls, space: ProductSpace, xi) -> "SpinChargeBlock":
        xi = space.project_K_perp(xi)
        lam = space.lambdas
        r = space.alg.rank
        cartan = (lam[:, None] * xi[:, :r]).T
        roots = (lam[:, None] * (xi @ space.alg.root_vectors.T)).T
        return cls(cartan=cartan, roots=roots)


def H_S_closed_form(space: ProductSpace, q, p, xi) -> float:
    _require_untwisted(space)
    q = space.check_q(q)
    p = np.asarray(p, dtype=float)
    block = SpinChargeBlock.from_xi(space, space.check_xi(xi))
    return 0.5 * float(p @ p) + _potential(space, q, block)


def _potential(space, q, block) -> float:
    lam = space.lambdas
    P = space.alg.n_pos
    pp = P_prime(lam)
    cartan_part = 0.5 * np.einsum("jI,IJ,jJ->", block.cartan, pp, block.cartan)
    theta = space.alg.root_values(q)
    args = np.concatenate([theta, -theta])
    Pm = P_matrix(args, lam)
    c = block.roots
    c_neg = np.concatenate([c[P:], c[:P]])
    root_part = -0.5 * np.einsum("fI,fIJ,fJ->", c, Pm, c_neg)
    return float(cartan_part + root_part.real)


def H_S_gradients(space: ProductSpace, q, p, xi):
    """Returns ``(dH/dq, dH/dp, dH/dxi)``; the last is the coordinate
    gradient, shape (N, d)."""
    _require_untwisted(space)
    alg = space.alg
    r, P = alg.rank, alg.n_pos
    lam = space.lambdas
    xi = np.asarray(xi, dtype=float)
    block = SpinChargeBlock.from_xi(space, xi)
    theta = alg.root_values(q)
    args = np.concatenate([theta, -theta])
    Pm = P_matrix(args, lam)
    dPm = P_matrix_derivative(args, lam)
    c = block.roots
    c_neg = np.concatenate([c[P:], c[:P]])

    dtheta = np.einsum("fI,fIJ,fJ->f", c, dPm, c_neg)
    dq = -0.5 * ((dtheta[:P] - dtheta[P:]) @ alg.root_matrix).real

    grad = np.zeros((space.N, space.d))
    pi = null_projector(lam)
    t = block.cartan  # (r, N), already projected
    grad[:, :r] = np.diag(lam) @ pi @ P_prime(lam) @ t.T
    # root part: dc_phi^I / dxi_I = lam_I X_phi
    v1 = np.einsum("fIJ,fJ->fI", Pm, c_neg)  # (P_phi c_{-phi})_I
    v2 = np.einsum("fIJ,fI->fJ", Pm, c)  # (P_phi^T c_phi)_J
    Xc = alg.root_vectors
    Xc_neg = np.concatenate([Xc[P:], Xc[:P]])
    g = -0.5 * lam[:, None] * (np.einsum("fI,fa->Ia", v1, Xc) + np.einsum("fJ,fa->Ja", v2, Xc_neg))
    grad += g.real
    return dq, np.asarray(p, dtype=float).copy(), grad


def reduced_vector_field(space: ProductSpace, q, p, xi):
    """``(qdot, pdot, xidot)`` for the reduced Hamiltonian."""
    dq, dp, grad = H_S_gradients(space, q, p, xi)
    lam = space.lambdas
    xi = np.asarray(xi, dtype=float)
    xidot = space.alg.bracket(grad / lam[:, None], xi)
    return dp, -dq, xidot


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    xi: np.ndarray  # (T, N, d)
    energy: np.ndarray
    status: str

    def point(self, i: int) -> ReducedPoint:
        return ReducedPoint(self.q[i], self.p[i], self.xi[i])


def integrate_reduced(
    space: ProductSpace,
    point: ReducedPoint,
    t_grid,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    method: str = "DOP853",
) -> Trajectory:
    """Integrate the reduced equations on the given time grid.

    Integration stops early (status ``"alcove_exit"``) when a root value
    approaches a wall closer than the guard band.
    """
    _require_untwisted(space)
    r = space.alg.rank
    shape = (space.N, space.d)
    t_grid = np.asarray(t_grid, dtype=float)

    def rhs(_t, y):
        qd, pd, xd = reduced_vector_field(space, y[:r], y[r : 2 * r], y[2 * r :].reshape(shape))
        return np.concatenate([qd, pd, xd.ravel()])

    def wall(_t, y):
        return space.alcove.wall_distances(y[:r]).min() - INTEGRATION_GUARD

    wall.terminal = True
    wall.direction = -1

    y0 = np.concatenate([point.q, point.p, np.asarray(point.xi, float).ravel()])
    sol = solve_ivp(
        rhs, (t_grid[0], t_grid[-1]), y0, method=method, t_eval=t_grid, rtol=rtol, atol=atol, events=wall
    )
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    status = "alcove_exit" if sol.status == 1 else "ok"
    ys = sol.y.T
    q = ys[:, :r]
    p = ys[:, r : 2 * r]
    xi = ys[:, 2 * r :].reshape((-1,) + shape)
    energy = np.array([0.5 * pk @ pk + _potential(space, qk, SpinChargeBlock.from_xi(space, xk))
                       for qk, pk, xk in zip(q, p, xi)])
    return Trajectory(t=sol.t, q=q, p=p, xi=xi, energy=energy, status=status)


# -----------------------------------------------------------------------------
# Spinless limit


def kks_spin(real, nu: float) -> np.ndarray:
    """Rank-one spin ``i c (v v^* - I)`` with ``v = (1, ..., 1)`` and
    ``c = sqrt(8) nu``, as algebra coordinates.  Its diagonal vanishes, so it
    lies on the slice for a single site."""
    n = real.n
    c = np.sqrt(8.0) * nu
    v = np.ones(n)
    return real.from_matrix(1j * c * (np.outer(v, v) - np.eye(n)))


def particle_coordinates(real, q) -> np.ndarray:
    """Particle positions ``q_k`` with ``vec(q) = diag(2 i q_k)`` (centre of mass zero)."""
    m = real.to_matrix(real.alg.embed_cartan(q))
    return np.diag(m).imag / 2


def particle_momenta(real, p) -> np.ndarray:
    """Particle momenta ``p_k`` with ``vec(p) = diag(i p_k)``."""
    m = real.to_matrix(real.alg.embed_cartan(p))
    return np.diag(m).imag


def sutherland_spinless(x, momenta, nu: float) -> float:
    """``(1/2) sum p_k^2 + sum_{i != j} nu^2 / sin^2(x_i - x_j)``."""
    x = np.asarray(x, dtype=float)
    momenta = np.asarray(momenta, dtype=float)
    diff = x[:, None] - x[None, :]
    off = ~np.eye(len(x), dtype=bool)
    return 0.5 * float(momenta @ momenta) + float(np.sum(nu**2 / np.sin(diff[off]) ** 2))
