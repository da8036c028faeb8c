"""Defining representation of su(n) matched to the abstract real basis.

Root vectors are rebuilt from elementary matrices by matrix commutators, so
the structure constants of :mod:`twistred.lie_core` can be checked against an
honest matrix algebra.  The representation also supplies the group-level
objects (exponentials, twisted automorphism of SU(n)) used by the projection
method and the gauge-theory bridge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .lie_core import DiagramAutomorphism, SimpleLieAlgebra, diagram_automorphism


def _unit(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


@dataclass(frozen=True)
class SUnRealization:
    """su(n) as traceless anti-Hermitian matrices.

    ``basis[a]`` is the matrix of the a-th real basis element; coordinates of
    a matrix ``X`` are ``-tr(basis[a] @ X)`` because the basis is orthonormal
    for ``<X, Y> = -tr(X Y)``.
    """

    alg: SimpleLieAlgebra
    n: int
    basis: np.ndarray  # (d, n, n)
    twist_matrix: np.ndarray | None = None  # S with gamma(g) = S conj(g) S^-1

    def to_matrix(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x), self.basis, axes=(-1, 0))

    def from_matrix(self, m) -> np.ndarray:
        m = np.asarray(m)
        coords = -np.einsum("aij,...ji->...a", self.basis, m)
        return coords.real

    def exp(self, x) -> np.ndarray:
        return scipy.linalg.expm(self.to_matrix(x))

    def Ad(self, g, x) -> np.ndarray:
        """Coordinates of ``g X g^-1``."""
        m = self.to_matrix(x)
        return self.from_matrix(g @ m @ np.linalg.inv(g))

    def twist_group(self, g) -> np.ndarray:
        """Group automorphism whose differential is the diagram automorphism."""
        if self.twist_matrix is None:
            return g
        s = self.twist_matrix
        return s @ np.conj(g) @ np.linalg.inv(s)

    def twist_group_inverse(self, g) -> np.ndarray:
        if self.twist_matrix is None:
            return g
        s = self.twist_matrix
        return np.conj(np.linalg.inv(s) @ g @ s)

    def with_twist(self, gamma: DiagramAutomorphism) -> "SUnRealization":
        if gamma.is_identity:
            return SUnRealization(self.alg, self.n, self.basis, None)
        return SUnRealization(self.alg, self.n, self.basis, _twist_matrix(self, gamma))


def su_realization(alg: SimpleLieAlgebra, gamma: DiagramAutomorphism | None = None) -> SUnRealization:
    if alg.family != "A":
        raise ValueError("matrix realization is only provided for type A")
    n = alg.rank + 1
    r, P = alg.rank, alg.n_pos
    parent = alg.chevalley["parent"]
    e = [None] * P
    f = [None] * P
    for i in range(r):
        e[i] = _unit(n, i, i + 1)
        f[i] = _unit(n, i + 1, i)
    for k in range(r, P):
        i0, kb = parent[k]
        e[k] = e[i0] @ e[kb] - e[kb] @ e[i0]
        f[k] = f[i0] @ f[kb] - f[kb] @ f[i0]
    h = [_unit(n, i, i) - _unit(n, i + 1, i + 1) for i in range(r)]
    chev = np.array(h + e + f)
    cb = alg.chevalley["basis"]
    basis = np.einsum("xa,xij->aij", cb, chev)
    real = SUnRealization(alg, n, basis, None)
    if gamma is not None and not gamma.is_identity:
        real = real.with_twist(gamma)
    return real


def _twist_matrix(real: SUnRealization, gamma: DiagramAutomorphism) -> np.ndarray:
    """Solve ``S conj(X_a) = gamma(X_a) S`` for all basis elements."""
    n = real.n
    rows = []
    eye = np.eye(n)
    for a in range(real.alg.dim):
        lhs = np.kron(eye, np.conj(real.basis[a]).T)  # S conj(X) in row-major vec
        img = real.to_matrix(gamma.matrix[:, a])
        rhs = np.kron(img, eye)
        rows.append(lhs - rhs)
    A = np.vstack(rows)
    _, s, vh = np.linalg.svd(A)
    if s[-1] > 1e-9 or (len(s) > 1 and s[-2] < 1e-9):
        raise AssertionError("twist is not induced by a unique conjugation")
    S = vh[-1].conj().reshape(n, n)
    S = S / np.abs(np.linalg.det(S)) ** (1.0 / n)
    # fix the overall phase so that det S = 1 where possible
    S = S * np.exp(-1j * np.angle(np.linalg.det(S)) / n)
    return S


def random_unitary(n: int, rng, special: bool = True) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, rr = np.linalg.qr(z)
    q = q * (np.diag(rr) / np.abs(np.diag(rr)))
    if special:
        q = q * np.exp(-1j * np.angle(np.linalg.det(q)) / n)
    return q


__all__ = ["SUnRealization", "su_realization", "random_unitary", "diagram_automorphism"]
