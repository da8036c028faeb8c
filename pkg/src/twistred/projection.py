"""Projection method for SU(n): exact reduced trajectories from the free flow.

Unreduced points live on ``G^N x g^N x orbits`` in the defining matrix
representation.  A free geodesic is pushed back to the gauge slice by
diagonalizing the monodromy and reconstructing the remaining gauge factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .product_twist import ProductSpace, ReducedPoint
from .realization import SUnRealization, random_unitary, su_realization

GAP_TOL = 1e-8


class NonGenericError(ValueError):
    """The monodromy has (nearly) degenerate eigenvalues."""


@dataclass(frozen=True)
class UnreducedPoint:
    """``(g, J, xi)``: each an array of shape (N, n, n)."""

    g: np.ndarray
    J: np.ndarray
    xi: np.ndarray


@dataclass(frozen=True)
class ProjectionSystem:
    """Group-level companion of a :class:`ProductSpace` over su(n)."""

    space: ProductSpace
    real: SUnRealization

    @classmethod
    def build(cls, space: ProductSpace) -> "ProjectionSystem":
        return cls(space, su_realization(space.alg, space.gamma))

    @property
    def N(self) -> int:
        return self.space.N

    @property
    def lambdas(self) -> np.ndarray:
        return self.space.lambdas

    # -- conversions ------------------------------------------------------

    def to_matrices(self, x) -> np.ndarray:
        return self.real.to_matrix(np.asarray(x))

    def to_coords(self, m) -> np.ndarray:
        return self.real.from_matrix(np.asarray(m))

    def conjugate(self, g, x) -> np.ndarray:
        """Sitewise ``g_k X_k g_k^-1`` on matrices."""
        return np.einsum("kij,kjl,klm->kim", g, x, np.linalg.inv(g))

    # -- group operations -------------------------------------------------

    def twist_group(self, eta) -> np.ndarray:
        """``Gamma(eta) = gamma(eta_N) + eta_1 + ... + eta_{N-1}``."""
        eta = np.asarray(eta)
        out = np.empty_like(eta)
        out[0] = self.real.twist_group(eta[-1])
        out[1:] = eta[:-1]
        return out

    def twisted_conjugate(self, eta, g) -> np.ndarray:
        ge = self.twist_group(eta)
        return np.einsum("kij,kjl,klm->kim", ge, g, np.linalg.inv(eta))

    def act(self, eta, point: UnreducedPoint) -> UnreducedPoint:
        """Lifted action on the extended phase space."""
        ge = self.twist_group(eta)
        return UnreducedPoint(
            g=self.twisted_conjugate(eta, point.g),
            J=self.conjugate(ge, point.J),
            xi=self.conjugate(eta, point.xi),
        )

    @staticmethod
    def monodromy(g) -> np.ndarray:
        out = g[0]
        for gk in g[1:]:
            out = out @ gk
        return out

    def momentum_map(self, point: UnreducedPoint) -> np.ndarray:
        """Coordinates (N, d) of ``Gamma'^T J - Ad_{g^-1} J + xi``."""
        J = self.to_coords(point.J)
        ginv = np.linalg.inv(point.g)
        adj = self.to_coords(self.conjugate(ginv, point.J))
        return self.space.twist_transpose(J) - adj + self.to_coords(point.xi)

    def hamiltonian(self, point: UnreducedPoint) -> float:
        return 0.5 * float(self.space.norm2(self.to_coords(point.J)))

    def free_flow(self, t: float, point: UnreducedPoint) -> UnreducedPoint:
        flows = np.stack([scipy.linalg.expm(t * Jk) for Jk in point.J])
        return UnreducedPoint(g=np.einsum("kij,kjl->kil", flows, point.g), J=point.J, xi=point.xi)

    # -- slice <-> unreduced ----------------------------------------------

    def exp_q_vector(self, q) -> np.ndarray:
        return np.stack([self.real.exp(self.space.alg.embed_cartan(np.asarray(q) / lam)) for lam in self.lambdas])

    def lift(self, point: ReducedPoint) -> UnreducedPoint:
        """The slice point ``(e^{vec q}, J, xi)`` with J solving the constraint."""
        J = self.space.solve_momentum_constraint(point.q, point.p, point.xi)
        return UnreducedPoint(
            g=self.exp_q_vector(point.q), J=self.to_matrices(J), xi=self.to_matrices(point.xi)
        )

    def alcove_project(self, m):
        """Return ``(q, w)`` with ``w m w^-1 = exp(q)`` and ``q`` in the open alcove."""
        if not self.space.gamma.is_identity:
            raise NotImplementedError("alcove projection is only implemented for the trivial twist")
        n = self.real.n
        tri, vecs = scipy.linalg.schur(m, output="complex")
        vals = np.diag(tri)
        theta = np.remainder(np.angle(vals), 2 * np.pi)
        order = np.argsort(-theta)
        theta = theta[order]
        vecs = vecs[:, order]
        gaps = np.abs(np.diff(np.concatenate([theta, [theta[0] - 2 * np.pi]])))
        if gaps.min() < GAP_TOL or np.any(theta < GAP_TOL):
            raise NonGenericError("monodromy has a degenerate spectrum")
        shift = int(round(theta.sum() / (2 * np.pi)))
        phases = np.concatenate([theta[shift:], theta[:shift] - 2 * np.pi])
        vecs = np.concatenate([vecs[:, shift:], vecs[:, :shift]], axis=1)
        w = vecs.conj().T
        w = w * np.exp(-1j * np.angle(np.linalg.det(w)) / n)
        q = self.to_coords(np.diag(1j * phases))[: self.space.alg.rank]
        if not self.space.alcove.contains(q):
            raise NonGenericError("projected point is on an alcove wall")
        return q, w

    def reconstruct_gauge(self, g, eta_last, g_target=None) -> np.ndarray:
        """Solve ``g_target = Gamma(eta) g eta^-1`` for eta given its last entry.

        With ``g_target = g`` this produces the isotropy element determined
        by ``eta_last``.
        """
        g = np.asarray(g)
        if g_target is None:
            g_target = g
        eta = np.empty_like(g, dtype=complex)
        eta[-1] = eta_last
        for k in range(self.N - 1, 0, -1):
            eta[k - 1] = g_target[k] @ eta[k] @ np.linalg.inv(g[k])
        return eta

    def reduce_point(self, point: UnreducedPoint, tol: float = 1e-8) -> ReducedPoint:
        psi = self.momentum_map(point)
        if np.abs(psi).max() > tol * max(1.0, np.abs(self.to_coords(point.J)).max()):
            raise ValueError(f"momentum constraint violated ({np.abs(psi).max():.3e})")
        q, w = self.alcove_project(self.monodromy(point.g))
        target = self.exp_q_vector(q)
        eta = self.reconstruct_gauge(point.g, w, target)
        moved = self.act(eta, point)
        J = self.to_coords(moved.J)
        xi = self.to_coords(moved.xi)
        F = self.space.gamma.fixed_cartan
        p = F @ (F.T @ J[:, : self.space.alg.rank].sum(axis=0))
        xi = self.space.project_K_perp(xi)
        return ReducedPoint(q=q, p=p, xi=xi)

    def trajectory(self, point: ReducedPoint, t_grid, dress=None) -> list[ReducedPoint]:
        """Reduced trajectory through ``point`` by projecting the free flow.

        ``dress`` optionally moves the initial unreduced point off the slice
        by a gauge transformation before flowing.
        """
        start = self.lift(point)
        if dress is not None:
            start = self.act(dress, start)
        return [self.reduce_point(self.free_flow(t, start)) for t in t_grid]

    def random_group_element(self, rng) -> np.ndarray:
        return np.stack([random_unitary(self.real.n, rng) for _ in range(self.N)])


# -- gauge invariant observables ---------------------------------------------


def slice_observables(space: ProductSpace, point: ReducedPoint) -> np.ndarray:
    """Functions of a slice point that are invariant under the residual torus.

    Concatenates q, p, Cartan parts of xi and squared moduli of the root
    coefficients of every xi_k.
    """
    r = space.alg.rank
    xi = np.asarray(point.xi)
    coeff = xi @ space.alg.root_vectors.T
    return np.concatenate([point.q, point.p, xi[:, :r].ravel(), np.abs(coeff).ravel() ** 2])


# -- conserved family and Poisson brackets ----------------------------------


@dataclass(frozen=True)
class Gradient:
    """Right-trivialized derivative of a phase-space function.

    ``dg``, ``dJ`` and ``dxi`` are product-vector coordinates (N, d), all
    representing gradients with respect to the lambda-weighted product.
    """

    dg: np.ndarray
    dJ: np.ndarray
    dxi: np.ndarray


@dataclass(frozen=True)
class Invariant:
    """An Ad-invariant function on the product algebra with its gradient."""

    name: str
    degree: int

    def value(self, system: ProjectionSystem, x) -> float:
        if self.degree == 2:
            return 0.5 * float(system.space.norm2(x))
        m = system.to_matrices(x)
        c = 1j**self.degree
        return float(sum(np.real(c * np.trace(np.linalg.matrix_power(mk, self.degree))) for mk in m))

    def gradient(self, system: ProjectionSystem, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.degree == 2:
            return x.copy()
        m = system.to_matrices(x)
        c = 1j**self.degree * self.degree
        out = []
        for mk, lam in zip(m, system.lambdas):
            b = c * np.linalg.matrix_power(mk, self.degree - 1)
            a = -(b - b.conj().T) / (2 * lam)
            a = a - np.trace(a) / len(a) * np.eye(len(a))
            out.append(a)
        return system.to_coords(np.array(out))


def quadratic_invariant() -> Invariant:
    return Invariant("half_norm", 2)


def power_trace(degree: int) -> Invariant:
    return Invariant(f"trace{degree}", degree)


def phi_u(system: ProjectionSystem, point: UnreducedPoint, u: float) -> np.ndarray:
    """``-g^-1 J g + xi / u`` in product coordinates."""
    if u == 0:
        raise ValueError("u must be nonzero")
    ginv = np.linalg.inv(point.g)
    return system.to_coords(-system.conjugate(ginv, point.J) + point.xi / u)


def phi_gradient(system: ProjectionSystem, point: UnreducedPoint, u: float, a) -> Gradient:
    """Gradient of ``F = h o phi_u`` given ``a = grad h(phi_u)``."""
    gag = system.to_coords(system.conjugate(point.g, system.to_matrices(a)))
    J = system.to_coords(point.J)
    alg = system.space.alg
    return Gradient(dg=alg.bracket(J, gag), dJ=-gag, dxi=np.asarray(a) / u)


def poisson_bracket(system: ProjectionSystem, point: UnreducedPoint, F: Gradient, G: Gradient) -> float:
    sp = system.space
    alg = sp.alg
    J = system.to_coords(point.J)
    xi = system.to_coords(point.xi)
    return float(
        sp.inner(F.dg, G.dJ)
        - sp.inner(F.dJ, G.dg)
        + sp.inner(J, alg.bracket(F.dJ, G.dJ))
        + sp.inner(xi, alg.bracket(F.dxi, G.dxi))
    )


def involution_check(system, h1: Invariant, u: float, h2: Invariant, v: float, point: UnreducedPoint) -> float:
    """``{h1 o phi_u, h2 o phi_v}`` evaluated from the canonical brackets."""
    if u == v:
        raise ValueError("u and v must differ")
    a = h1.gradient(system, phi_u(system, point, u))
    b = h2.gradient(system, phi_u(system, point, v))
    return poisson_bracket(system, point, phi_gradient(system, point, u, a), phi_gradient(system, point, v, b))


def component_bracket_residual(system, point: UnreducedPoint, u: float, v: float, X, Y) -> float:
    """Residual of the bracket relation for the linear components of phi_u, phi_v."""
    if u == v or u == 0 or v == 0:
        raise ValueError("need distinct nonzero u, v")
    sp = system.space
    lhs = poisson_bracket(system, point, phi_gradient(system, point, u, X), phi_gradient(system, point, v, Y))
    comb = (u - 1) / (u - v) * phi_u(system, point, u) + (v - 1) / (v - u) * phi_u(system, point, v)
    rhs = float(sp.inner(comb, sp.alg.bracket(X, Y)))
    return abs(lhs - rhs)


def numerical_gradient(system: ProjectionSystem, func, point: UnreducedPoint, h: float = 1e-6) -> Gradient:
    """Finite-difference gradient of ``func(point)`` (central differences)."""
    sp = system.space
    shape = (sp.N, sp.d)
    lam = sp.lambdas

    def grad_along(make):
        out = np.zeros(shape)
        for k in range(sp.N):
            for a in range(sp.d):
                e = np.zeros(shape)
                e[k, a] = h
                out[k, a] = (func(make(e)) - func(make(-e))) / (2 * h) / lam[k]
        return out

    def move_g(e):
        exps = np.stack([system.real.exp(ek) for ek in e])
        return UnreducedPoint(np.einsum("kij,kjl->kil", exps, point.g), point.J, point.xi)

    def move_J(e):
        return UnreducedPoint(point.g, point.J + system.to_matrices(e), point.xi)

    def move_xi(e):
        return UnreducedPoint(point.g, point.J, point.xi + system.to_matrices(e))

    return Gradient(dg=grad_along(move_g), dJ=grad_along(move_J), dxi=grad_along(move_xi))
