"""N-fold product algebra with the cyclic twist and the momentum constraint.

Product vectors are arrays of shape ``(N, d)``; row ``k`` is the component
in the k-th copy of the algebra.  Dense operators act on the flattened
(row-major) vector of length ``N * d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .lie_core import Alcove, DiagramAutomorphism, SimpleLieAlgebra, alcove, diagram_automorphism

SINGULAR_GUARD = 1e-8
CONSTRAINT_TOL = 1e-10


class SingularityError(ValueError):
    """q is on (or beyond) an alcove wall where the constraint map degenerates."""


class ConstraintInfeasibleError(ValueError):
    """The spin variables have a nonzero component along the diagonal torus."""


@dataclass(frozen=True)
class CouplingVector:
    """Positive scale factors ``lambda_k`` with ``sum 1/lambda_k = 1``."""

    lambdas: tuple

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or len(lam) == 0:
            raise ValueError("lambdas must be a non-empty list")
        if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
            raise ValueError("lambdas must be positive and finite")
        if abs(np.sum(1.0 / lam) - 1.0) > 1e-12:
            raise ValueError(f"sum of 1/lambda_k must equal 1, got {float(np.sum(1.0 / lam))!r}")
        object.__setattr__(self, "lambdas", tuple(float(x) for x in lam))

    @classmethod
    def from_weights(cls, weights) -> "CouplingVector":
        """Rescale positive weights so that the reciprocals sum to one."""
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        lam = w * np.sum(1.0 / w)
        # absorb the last rounding error into the final entry
        rest = np.sum(1.0 / lam[:-1])
        if rest < 1:
            lam[-1] = 1.0 / (1.0 - rest)
        return cls(tuple(lam))

    @classmethod
    def from_marks(cls, marks) -> "CouplingVector":
        """Couplings from ordered points ``x_1 < ... < x_N`` on a unit circle:
        ``lambda_k = 1 / (x_k - x_{k-1})`` with ``x_0 = x_N - 1``."""
        x = np.asarray(marks, dtype=float)
        gaps = np.diff(np.concatenate([[x[-1] - 1.0], x]))
        if np.any(gaps <= 0):
            raise ValueError("marks must be strictly increasing within one period")
        return cls(tuple(1.0 / gaps))

    @classmethod
    def uniform(cls, n: int) -> "CouplingVector":
        return cls(tuple([float(n)] * n))

    @property
    def N(self) -> int:
        return len(self.lambdas)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.lambdas)

    @property
    def b(self) -> np.ndarray:
        """Partial sums ``b_I = sum_{k <= I} 1/lambda_k``; the last one is 1."""
        return np.cumsum(1.0 / self.array)

    @property
    def b_matrix(self) -> np.ndarray:
        b = self.b
        return b[:, None] - b[None, :]

    def to_dict(self) -> dict:
        return {"lambdas": list(self.lambdas)}


@dataclass(frozen=True)
class ReducedPoint:
    """Point ``(q, p, xi)`` of the gauge slice.

    ``q`` and ``p`` are in T-coordinates of the full Cartan subalgebra (they
    must be fixed by the twist); ``xi`` has shape ``(N, d)``.
    """

    q: np.ndarray
    p: np.ndarray
    xi: np.ndarray

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist(), "xi": self.xi.tolist()}

    @classmethod
    def from_dict(cls, data) -> "ReducedPoint":
        return cls(np.asarray(data["q"], float), np.asarray(data["p"], float), np.asarray(data["xi"], float))


def _orthonormal_complement(basis: np.ndarray, n: int) -> np.ndarray:
    """Columns spanning the Euclidean orthogonal complement of ``basis``."""
    if basis.shape[1] == 0:
        return np.eye(n)
    q, _ = np.linalg.qr(basis, mode="complete")
    return q[:, basis.shape[1]:]


@dataclass(frozen=True)
class ProductSpace:
    alg: SimpleLieAlgebra
    gamma: DiagramAutomorphism
    coupling: CouplingVector
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def build(cls, alg, coupling, gamma=None) -> "ProductSpace":
        if gamma is None:
            gamma = diagram_automorphism(alg, 1)
        elif isinstance(gamma, int):
            gamma = diagram_automorphism(alg, gamma)
        if not isinstance(coupling, CouplingVector):
            coupling = CouplingVector(tuple(coupling))
        return cls(alg, gamma, coupling)

    @property
    def N(self) -> int:
        return self.coupling.N

    @property
    def d(self) -> int:
        return self.alg.dim

    @property
    def size(self) -> int:
        return self.N * self.d

    @property
    def lambdas(self) -> np.ndarray:
        return self.coupling.array

    @cached_property
    def alcove(self) -> Alcove:
        return alcove(self.alg, self.gamma)

    @cached_property
    def metric_diag(self) -> np.ndarray:
        return np.repeat(self.lambdas, self.d)

    # -- scalar product and twist --------------------------------------------

    def _shape(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-2:] != (self.N, self.d):
            raise ValueError(f"expected product vector of shape ({self.N}, {self.d}), got {x.shape}")
        return x

    def inner(self, x, y) -> float:
        x, y = self._shape(x), self._shape(y)
        return np.einsum("k,...ka,...ka->...", self.lambdas, x, y)

    def norm2(self, x) -> float:
        return self.inner(x, x)

    def twist_apply(self, x) -> np.ndarray:
        x = self._shape(x)
        out = np.empty_like(x)
        out[..., 0, :] = self.gamma.apply(x[..., -1, :])
        out[..., 1:, :] = x[..., :-1, :]
        return out

    def twist_transpose(self, x) -> np.ndarray:
        x = self._shape(x)
        lam = self.lambdas
        out = np.empty_like(x)
        out[..., :-1, :] = (lam[1:] / lam[:-1])[:, None] * x[..., 1:, :]
        out[..., -1, :] = lam[0] / lam[-1] * self.gamma.apply_inverse(x[..., 0, :])
        return out

    @cached_property
    def twist_matrix(self) -> np.ndarray:
        eye = np.eye(self.size).reshape(self.size, self.N, self.d)
        return self.twist_apply(eye).reshape(self.size, self.size).T

    @cached_property
    def twist_transpose_matrix(self) -> np.ndarray:
        eye = np.eye(self.size).reshape(self.size, self.N, self.d)
        return self.twist_transpose(eye).reshape(self.size, self.size).T

    def vector_q(self, q) -> np.ndarray:
        """The product vector ``q/lambda_1 + ... + q/lambda_N`` (Cartan part only)."""
        q = np.asarray(q, dtype=float)
        return q[None, :] / self.lambdas[:, None]

    def lift(self, t) -> np.ndarray:
        """Embed Cartan coordinates per site, shape (N, r) -> (N, d)."""
        t = np.atleast_2d(t)
        out = np.zeros((self.N, self.d))
        out[:, : self.alg.rank] = t
        return out

    def exp_ad_q(self, q, x, s: float = 1.0) -> np.ndarray:
        """``exp(s ad_{vec q}) x`` blockwise."""
        x = self._shape(x)
        out = np.empty_like(x)
        for k, lam in enumerate(self.lambdas):
            out[..., k, :] = self.alg.exp_ad_cartan(np.asarray(q) / lam, x[..., k, :], s)
        return out

    def exp_ad_q_matrix(self, q, s: float = 1.0) -> np.ndarray:
        blocks = [self.alg.exp_ad_cartan_matrix(np.asarray(q) / lam, s) for lam in self.lambdas]
        return scipy.linalg.block_diag(*blocks)

    def constraint_matrix(self, q) -> np.ndarray:
        """Dense matrix of ``Gamma'^T - exp(-ad_{vec q})`` on the flat space."""
        return self.twist_transpose_matrix - self.exp_ad_q_matrix(q, -1.0)

    # -- subalgebras K and Q -------------------------------------------------

    @cached_property
    def K_basis(self) -> np.ndarray:
        """lambda-orthonormal basis (columns) of the diagonal fixed torus."""
        F = self.gamma.fixed_cartan
        cols = []
        for j in range(F.shape[1]):
            v = self.lift(np.tile(F[:, j], (self.N, 1))).ravel()
            cols.append(v / np.sqrt(np.sum(self.lambdas)))
        return np.array(cols).T.reshape(self.size, F.shape[1])

    @cached_property
    def Q_basis(self) -> np.ndarray:
        F = self.gamma.fixed_cartan
        cols = [self.lift(self.vector_q(F[:, j])).ravel() for j in range(F.shape[1])]
        return np.array(cols).T.reshape(self.size, F.shape[1])

    def _complement(self, basis):
        s = np.sqrt(self.metric_diag)
        comp = _orthonormal_complement(s[:, None] * basis, self.size)
        return comp / s[:, None]

    @cached_property
    def K_perp_basis(self) -> np.ndarray:
        return self._complement(self.K_basis)

    @cached_property
    def Q_perp_basis(self) -> np.ndarray:
        return self._complement(self.Q_basis)

    def _project(self, basis, x):
        x = self._shape(x)
        flat = x.reshape(x.shape[:-2] + (self.size,))
        coeff = (flat * self.metric_diag) @ basis
        return (coeff @ basis.T).reshape(x.shape)

    def project_K(self, x):
        return self._project(self.K_basis, x)

    def project_Q(self, x):
        return self._project(self.Q_basis, x)

    def project_K_perp(self, x):
        return self._shape(x) - self.project_K(x)

    def project_Q_perp(self, x):
        return self._shape(x) - self.project_Q(x)

    def K_component(self, x) -> np.ndarray:
        """lambda-orthonormal coordinates of the K-part of ``x``."""
        flat = self._shape(x).reshape(self.size)
        return (flat * self.metric_diag) @ self.K_basis

    # -- the constraint map ---------------------------------------------------

    def check_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.alg.rank,):
            raise ValueError(f"q must have {self.alg.rank} Cartan coordinates")
        if not self.alcove.is_fixed(q):
            raise ValueError("q is not fixed by the diagram automorphism")
        dist = self.alcove.wall_distances(q).min()
        if dist <= SINGULAR_GUARD:
            raise SingularityError(
                f"q is not in the open alcove (wall distance {dist:.3e}); the constraint map is singular"
            )
        return q

    def Z_operator(self, q) -> np.ndarray:
        """Matrix of the bijection Q-perp -> K-perp in the orthonormal bases."""
        q = self.check_q(q)
        key = ("Z", q.tobytes())
        if key not in self._cache:
            L = self.constraint_matrix(q)
            self._cache.clear()
            self._cache[key] = self.K_perp_basis.T @ (self.metric_diag[:, None] * (L @ self.Q_perp_basis))
        return self._cache[key]

    def Z_solve(self, q, eta) -> np.ndarray:
        eta = self._shape(eta)
        if np.abs(self.K_component(eta)).max(initial=0.0) > CONSTRAINT_TOL * max(1.0, np.abs(eta).max()):
            raise ConstraintInfeasibleError("right-hand side has a K component")
        Z = self.Z_operator(q)
        rhs = self.K_perp_basis.T @ (self.metric_diag * eta.ravel())
        coeff = np.linalg.solve(Z, rhs)
        return (self.Q_perp_basis @ coeff).reshape(self.N, self.d)

    def U_operator(self, q) -> np.ndarray:
        """Matrix of ``(id - exp(-ad_{vec q}) Gamma')`` from K-perp to Q-perp."""
        q = self.check_q(q)
        op = np.eye(self.size) - self.exp_ad_q_matrix(q, -1.0) @ self.twist_matrix
        return self.Q_perp_basis.T @ (self.metric_diag[:, None] * (op @ self.K_perp_basis))

    def check_p(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.alg.rank,):
            raise ValueError(f"p must have {self.alg.rank} Cartan coordinates")
        if not self.alcove.is_fixed(p, tol=1e-9):
            raise ValueError("p is not fixed by the diagram automorphism")
        return p

    def check_xi(self, xi) -> np.ndarray:
        xi = self._shape(xi)
        kc = self.K_component(xi)
        if kc.size and np.abs(kc).max() > CONSTRAINT_TOL * max(1.0, np.abs(xi).max()):
            raise ConstraintInfeasibleError(
                f"spin variables have a K component of size {np.abs(kc).max():.3e}"
            )
        return xi

    def solve_momentum_constraint(self, q, p, xi) -> np.ndarray:
        """The current ``J`` on the gauge slice for given ``(q, p, xi)``."""
        p = self.check_p(p)
        xi = self.check_xi(xi)
        J_perp = -self.Z_solve(q, self.project_K_perp(xi))
        return self.lift(self.vector_q(p)) + J_perp

    def momentum_residual(self, q, J, xi) -> np.ndarray:
        J = self._shape(J)
        return self.twist_transpose(J) - self.exp_ad_q(q, J, -1.0) + self._shape(xi)

    def H_S_operator_form(self, q, p, xi) -> float:
        p = self.check_p(p)
        xi = self.check_xi(xi)
        w = self.Z_solve(q, self.project_K_perp(xi))
        return 0.5 * float(p @ p) + 0.5 * float(self.norm2(w))

    def H_S_U_form(self, q, p, xi) -> float:
        p = self.check_p(p)
        xi = self.check_xi(xi)
        U = self.U_operator(q)
        c = self.K_perp_basis.T @ (self.metric_diag * xi.ravel())
        y = np.linalg.solve(U, np.linalg.solve(U.T, c))
        return 0.5 * float(p @ p) + 0.5 * float(c @ y)

    def K_action(self, t, xi) -> np.ndarray:
        """Residual gauge action of ``exp(t)``, ``t`` in the fixed torus."""
        t = np.asarray(t, dtype=float)
        return np.stack([self.alg.exp_ad_cartan(t, xk) for xk in self._shape(xi)])

    # -- seeded test points ---------------------------------------------------

    def random_orbit_point(self, seeds, rng, spread: float = 1.0, max_iter: int = 200) -> np.ndarray:
        """Random point of the product orbit through ``seeds`` with zero K-part.

        Each seed is conjugated by ``exp`` of a random algebra element; the
        K-component is then removed by Gauss-Newton steps along the orbit.
        """
        seeds = self._shape(seeds)
        xi = np.stack([scipy.linalg.expm(spread * self.alg.ad_of(rng.standard_normal(self.d))) @ s for s in seeds])
        return self.enforce_zero_K(xi, rng)

    def enforce_zero_K(self, xi, rng=None, max_iter: int = 200) -> np.ndarray:
        xi = self._shape(xi).copy()
        kb = self.K_basis
        if kb.shape[1] == 0:
            return xi
        ad = self.alg.ad
        for _ in range(max_iter):
            mu = self.K_component(xi)
            if np.abs(mu).max() < 1e-14 * max(1.0, np.abs(xi).max()):
                return xi
            # d mu / d X_k = lambda_k K^T [X_k, xi_k]
            jac = np.zeros((kb.shape[1], self.size))
            for k in range(self.N):
                adxi = -np.einsum("c,cba->ba", xi[k], ad)  # X -> [X, xi_k] = -ad_{xi_k} X
                sl = slice(k * self.d, (k + 1) * self.d)
                jac[:, sl] = (self.lambdas[k] * kb[sl].T) @ adxi
            step, *_ = np.linalg.lstsq(jac, -mu, rcond=None)
            step = step.reshape(self.N, self.d)
            for k in range(self.N):
                xi[k] = scipy.linalg.expm(self.alg.ad_of(step[k])) @ xi[k]
        raise RuntimeError("could not remove the K component of the spin variables")

    def random_reduced_point(self, rng, seeds=None, margin: float = 0.05, p_scale: float = 1.0) -> ReducedPoint:
        """Seeded random slice point; ``seeds`` default to random algebra elements."""
        if seeds is None:
            seeds = rng.standard_normal((self.N, self.d))
        q = self.alcove.sample(rng, margin=margin)
        F = self.gamma.fixed_cartan
        p = F @ (p_scale * rng.standard_normal(F.shape[1]))
        xi = self.random_orbit_point(seeds, rng)
        return ReducedPoint(q=q, p=p, xi=xi)


def subspace_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between column spans."""
    if a.shape[1] == 0 and b.shape[1] == 0:
        return 0.0
    if a.shape[1] != b.shape[1]:
        return np.pi / 2
    return float(np.max(scipy.linalg.subspace_angles(a, b)))
