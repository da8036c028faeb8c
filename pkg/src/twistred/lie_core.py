"""Compact simple Lie algebras built from Cartan data.

The complex algebra is generated from the Cartan matrix height by height:
a root vector ``e_a`` of height >= 2 is fixed by the vector of its brackets
with the lowering generators ``f_j``, which is injective on the positive
nilpotent part of a simple algebra.  No matrix realization is used, so the
matrix realizations in :mod:`twistred.realization` act as independent
oracles for the tables built here.

Everything downstream works in the real orthonormal basis

    (T_1, ..., T_r, Y_1, ..., Y_P, Z_1, ..., Z_P)

of the compact form, with ``<X, Y> = -kappa(X, Y)`` and ``kappa`` the
Killing form rescaled so that long roots have squared length 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg

SUPPORTED_RANKS = {
    "A": range(1, 7),
    "B": range(2, 5),
    "C": range(2, 5),
    "D": range(4, 5),
    "G2": range(2, 3),
}

ALCOVE_TOL = 1e-12


class UnsupportedAlgebraError(ValueError):
    pass


def cartan_matrix(family: str, rank: int) -> np.ndarray:
    """Cartan matrix with entries ``a[i, j] = <alpha_i^vee, alpha_j>``.

    Bourbaki numbering: for B the last simple root is short, for C it is
    long, for D4 node 1 (0-based) is the branch node, for G2 node 0 is short.
    """
    family = family.upper()
    if family not in SUPPORTED_RANKS or rank not in SUPPORTED_RANKS[family]:
        raise UnsupportedAlgebraError(
            f"unsupported algebra {family}{rank}; supported: "
            + ", ".join(f"{f} ranks {min(r)}-{max(r)}" for f, r in SUPPORTED_RANKS.items())
        )
    a = 2 * np.eye(rank, dtype=int)
    if family == "G2":
        return np.array([[2, -3], [-1, 2]])
    if family == "D":
        for i, j in [(0, 1), (1, 2), (1, 3)]:
            a[i, j] = a[j, i] = -1
        return a
    for i in range(rank - 1):
        a[i, i + 1] = a[i + 1, i] = -1
    if family == "B":
        a[rank - 1, rank - 2] = -2
    elif family == "C":
        a[rank - 2, rank - 1] = -2
    return a


def _symmetrizer(a: np.ndarray) -> list[Fraction]:
    """Half squared lengths ``d_i`` with ``d_i a_ij`` symmetric, longest = 1."""
    r = len(a)
    d: list[Fraction | None] = [None] * r
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(r):
            if j != i and a[i, j] != 0 and d[j] is None:
                d[j] = d[i] * int(a[i, j]) / int(a[j, i])
                stack.append(j)
    top = max(d)
    return [x / top for x in d]


def positive_roots(a: np.ndarray) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates, sorted by height.

    Uses the root-string rule: with ``p`` maximal such that ``beta - p alpha_i``
    is a root, ``beta + alpha_i`` is a root iff ``p - <beta, alpha_i^vee> > 0``.
    """
    r = len(a)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = list(simple)
    known = set(roots)
    level = simple
    while level:
        nxt = []
        for beta in level:
            for i in range(r):
                pairing = sum(beta[j] * a[i, j] for j in range(r))
                p = 0
                shifted = list(beta)
                while True:
                    shifted[i] -= 1
                    if tuple(shifted) in known:
                        p += 1
                    else:
                        break
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in known:
                        known.add(up)
                        nxt.append(up)
        nxt.sort()
        roots.extend(nxt)
        level = nxt
    return roots


@dataclass(frozen=True)
class SimpleLieAlgebra:
    """A compact simple Lie algebra with its orthonormal real basis.

    Attributes
    ----------
    ad : ndarray, shape (d, d, d)
        ``ad[a]`` is the matrix of ``ad`` of basis element ``a``; the bracket
        of coordinate vectors is ``einsum('a,abc,c->b', x, ad, y)``.
    root_matrix : ndarray, shape (P, r)
        Row ``k`` gives ``-i phi_k(q) = root_matrix[k] @ q`` for ``q`` in
        T-coordinates.
    root_vectors : ndarray, shape (2P, d), complex
        Coordinates of ``X_phi`` for phi in (positive roots, negative roots).
    """

    family: str
    rank: int
    cartan: np.ndarray
    roots: tuple  # positive roots, simple-root coordinates
    normalization_constant: float
    ad: np.ndarray
    root_matrix: np.ndarray
    root_vectors: np.ndarray
    chevalley: dict = field(repr=False)

    @property
    def name(self) -> str:
        return self.family if self.family == "G2" else f"{self.family}{self.rank}"

    @property
    def dim(self) -> int:
        return self.rank + 2 * len(self.roots)

    @property
    def n_pos(self) -> int:
        return len(self.roots)

    @property
    def simple_roots(self) -> list[tuple[int, ...]]:
        return list(self.roots[: self.rank])

    @cached_property
    def root_labels(self) -> np.ndarray:
        """Positive roots in Dynkin-label (fundamental weight) coordinates."""
        return np.array(self.roots) @ self.cartan.T

    @cached_property
    def highest_root(self) -> int:
        return int(np.argmax([sum(r) for r in self.roots]))

    @cached_property
    def weight_gram(self) -> np.ndarray:
        """kappa on fundamental weights, as exact Fractions (object array)."""
        return self.chevalley["weight_gram"]

    @cached_property
    def root_gram(self) -> np.ndarray:
        return self.chevalley["root_gram"]

    def cartan_slice(self) -> slice:
        return slice(0, self.rank)

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x)
        y = np.asarray(y)
        if x.shape[-1] != self.dim or y.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}")
        return np.einsum("...a,abc,...c->...b", x, self.ad, y)

    def ad_of(self, x) -> np.ndarray:
        return np.einsum("a,abc->bc", np.asarray(x), self.ad)

    def inner(self, x, y) -> float:
        return np.sum(np.asarray(x) * np.asarray(y), axis=-1)

    def root_values(self, q) -> np.ndarray:
        """``-i phi(q)`` for all positive roots phi."""
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != self.rank:
            raise ValueError(f"Cartan element must have {self.rank} coordinates")
        return q @ self.root_matrix.T

    def embed_cartan(self, q) -> np.ndarray:
        x = np.zeros(self.dim)
        x[: self.rank] = q
        return x

    def exp_ad_cartan(self, q, x, s: float = 1.0) -> np.ndarray:
        """``exp(s ad_q) x`` for Cartan ``q``; acts by plane rotations.

        ``x`` may carry leading batch axes.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}")
        theta = s * self.root_values(q)
        c, sn = np.cos(theta), np.sin(theta)
        r, P = self.rank, self.n_pos
        out = x.copy()
        y = x[..., r : r + P]
        z = x[..., r + P :]
        out[..., r : r + P] = c * y + sn * z
        out[..., r + P :] = -sn * y + c * z
        return out

    def exp_ad_cartan_matrix(self, q, s: float = 1.0) -> np.ndarray:
        return self.exp_ad_cartan(q, np.eye(self.dim), s).T

    def killing(self, x, y) -> float:
        return float(np.trace(self.ad_of(x) @ self.ad_of(y)))

    def orbit_invariants(self, x) -> np.ndarray:
        """Sorted squared frequencies of ``ad_x`` (spectrum of ``-ad_x^2``)."""
        adx = self.ad_of(x)
        return np.sort(np.linalg.eigvalsh(-adx @ adx))

    def random_element(self, rng) -> np.ndarray:
        return rng.standard_normal(self.dim)

    def random_cartan(self, rng) -> np.ndarray:
        return rng.standard_normal(self.rank)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "roots": [list(map(int, r)) for r in self.roots],
            "cartan_matrix": self.cartan.tolist(),
            "normalization_constant": self.normalization_constant,
        }


def _build_chevalley(a: np.ndarray, roots: list[tuple[int, ...]]):
    """Adjoint matrices in the basis (h_1..h_r, e_alpha, f_alpha)."""
    r = len(a)
    P = len(roots)
    index = {root: k for k, root in enumerate(roots)}
    height = [sum(root) for root in roots]

    def shift(root, i, sign):
        out = list(root)
        out[i] += sign
        return tuple(out)

    def pairing(root, i):
        return sum(root[j] * int(a[i, j]) for j in range(r))

    # parent[k] = (i0, beta): e_k := [e_{i0}, e_beta]
    parent: dict[int, tuple[int, int]] = {}
    ecoef: dict[tuple[int, int], Fraction] = {}  # [e_i, e_beta] = c e_{beta+alpha_i}
    fcoef: dict[tuple[int, int], Fraction] = {}  # [f_j, e_alpha] = c e_{alpha-alpha_j}

    for k, alpha in enumerate(roots):
        if height[k] == 1:
            continue
        images = {}
        for i in range(r):
            beta = shift(alpha, i, -1)
            if beta not in index:
                continue
            kb = index[beta]
            img: dict[int, Fraction] = {}
            for j in range(r):
                target = shift(alpha, j, -1)
                if target not in index:
                    continue
                val = Fraction(0)
                if i == j:
                    val -= pairing(beta, i)
                if height[kb] == 1:
                    if beta == tuple(int(m == j) for m in range(r)):
                        # [e_i, -h_j] = a[j, i] e_i
                        val += int(a[j, i])
                else:
                    lower = shift(beta, j, -1)
                    if lower in index and (j, kb) in fcoef:
                        kl = index[lower]
                        if (i, kl) in ecoef:
                            val += fcoef[(j, kb)] * ecoef[(i, kl)]
                if val != 0:
                    img[j] = val
            images[i] = (kb, img)
        i0 = min(images)
        kb0, img0 = images[i0]
        parent[k] = (i0, kb0)
        ecoef[(i0, kb0)] = Fraction(1)
        for j, v in img0.items():
            fcoef[(j, k)] = v
        ref_j = next(iter(img0))
        for i, (kb, img) in images.items():
            if i == i0:
                continue
            c = img.get(ref_j, Fraction(0)) / img0[ref_j]
            for j in set(img) | set(img0):
                if img.get(j, 0) != c * img0.get(j, 0):
                    raise AssertionError("inconsistent root space construction")
            if c != 0:
                ecoef[(i, kb)] = c

    d = r + 2 * P
    E = lambda k: r + k  # noqa: E731
    F = lambda k: r + P + k  # noqa: E731

    def gen_e(i):
        m = np.zeros((d, d))
        for kk in range(r):
            m[E(i), kk] = -a[kk, i]
        for kb in range(P):
            up = shift(roots[kb], i, +1)
            if up in index and (i, kb) in ecoef:
                m[E(index[up]), E(kb)] = float(ecoef[(i, kb)])
            if roots[kb] == tuple(int(m_ == i) for m_ in range(r)):
                m[i, F(kb)] = 1.0
            else:
                down = shift(roots[kb], i, -1)
                if down in index and (i, kb) in fcoef:
                    m[F(index[down]), F(kb)] = float(fcoef[(i, kb)])
        return m

    def gen_f(i):
        m = np.zeros((d, d))
        for kk in range(r):
            m[F(i), kk] = a[kk, i]
        for kb in range(P):
            up = shift(roots[kb], i, +1)
            if up in index and (i, kb) in ecoef:
                m[F(index[up]), F(kb)] = float(ecoef[(i, kb)])
            if roots[kb] == tuple(int(m_ == i) for m_ in range(r)):
                m[i, E(kb)] = -1.0
            else:
                down = shift(roots[kb], i, -1)
                if down in index and (i, kb) in fcoef:
                    m[E(index[down]), E(kb)] = float(fcoef[(i, kb)])
        return m

    def gen_h(i):
        diag = np.zeros(d)
        for kb in range(P):
            diag[E(kb)] = pairing(roots[kb], i)
            diag[F(kb)] = -pairing(roots[kb], i)
        return np.diag(diag)

    ad = np.zeros((d, d, d))
    for i in range(r):
        ad[i] = gen_h(i)
        ad[E(i)] = gen_e(i)
        ad[F(i)] = gen_f(i)
    for k in range(r, P):
        i0, kb = parent[k]
        ad[E(k)] = ad[E(i0)] @ ad[E(kb)] - ad[E(kb)] @ ad[E(i0)]
        ad[F(k)] = ad[F(i0)] @ ad[F(kb)] - ad[F(kb)] @ ad[F(i0)]
    return ad, parent, ecoef


def build_algebra(family: str, rank: int | None = None, cartan_rotation=None) -> SimpleLieAlgebra:
    """Build the compact real form of a simple Lie algebra.

    Parameters
    ----------
    family : {"A", "B", "C", "D", "G2"}
    rank : int
        A: 1-6, B/C: 2-4, D: 4, G2: 2.
    cartan_rotation : (r, r) orthogonal matrix, optional
        Rotates the orthonormal Cartan basis ``T_j``.  Any choice is
        admissible; downstream quantities must not depend on it.
    """
    family = family.upper()
    if family == "G2" and rank is None:
        rank = 2
    a = cartan_matrix(family, rank)
    r = rank
    roots = positive_roots(a)
    P = len(roots)
    d = r + 2 * P
    ad, parent, _ = _build_chevalley(a, roots)

    killing = np.einsum("aij,bji->ab", ad, ad)
    gh = killing[:r, :r]
    root_fn = np.array(roots) @ a.T  # alpha(h_i) = <alpha, alpha_i^vee>
    lengths = np.einsum("ki,ij,kj->k", root_fn, np.linalg.inv(gh), root_fn)
    C = lengths.max() / 2.0
    kappa = C * killing

    # Orthonormal Cartan basis H_j of the real span of coroots; T_j = i H_j.
    chol = np.linalg.cholesky(kappa[:r, :r])
    hbasis = np.linalg.inv(chol).T  # columns: H_j in coroot coordinates
    if cartan_rotation is not None:
        hbasis = hbasis @ np.asarray(cartan_rotation, dtype=float)
    root_matrix = root_fn @ hbasis

    # X_phi = c e_phi, X_{-phi} = -omega(X_phi) with omega(e_a) = (-1)^ht f_a
    heights = np.array([sum(x) for x in roots])
    signs = (-1.0) ** heights
    kef = np.array([kappa[r + k, r + P + k] for k in range(P)])
    c2 = -signs / kef
    if np.any(c2 <= 0):
        raise AssertionError("compact real form normalization failed")
    c = np.sqrt(c2)

    basis = np.zeros((d, d), dtype=complex)  # columns: real basis in Chevalley coords
    basis[:r, :r] = 1j * hbasis
    for k in range(P):
        xp = np.zeros(d, dtype=complex)
        xm = np.zeros(d, dtype=complex)
        xp[r + k] = c[k]
        xm[r + P + k] = -signs[k] * c[k]
        basis[:, r + k] = 1j * (xp + xm) / np.sqrt(2)
        basis[:, r + P + k] = (xp - xm) / np.sqrt(2)
    binv = np.linalg.inv(basis)
    ad_c = np.einsum("xa,xij->aij", basis, ad)
    ad_real = np.einsum("ix,axy,yj->aij", binv, ad_c, basis)
    if np.abs(ad_real.imag).max() > 1e-10:
        raise AssertionError("structure constants of the compact form are not real")
    ad_real = ad_real.real

    root_vectors = np.zeros((2 * P, d), dtype=complex)
    for k in range(P):
        root_vectors[k, r + P + k] = 1 / np.sqrt(2)
        root_vectors[k, r + k] = -1j / np.sqrt(2)
        root_vectors[P + k, r + P + k] = -1 / np.sqrt(2)
        root_vectors[P + k, r + k] = -1j / np.sqrt(2)

    d_half = _symmetrizer(a)
    root_gram = np.array(
        [[d_half[i] * int(a[i, j]) for j in range(r)] for i in range(r)], dtype=object
    )
    cart_f = np.array([[Fraction(int(x)) for x in row] for row in a], dtype=object)
    # alpha_i = sum_j a[j, i] omega_j  ->  omega = inv(a^T) alpha
    inv_at = _fraction_inverse(cart_f.T)
    weight_gram = inv_at @ root_gram @ inv_at.T

    chevalley = {
        "ad": ad,
        "basis": basis,
        "basis_inv": binv,
        "parent": parent,
        "root_scale": c,
        "height_signs": signs,
        "cartan_basis": hbasis,
        "kappa": kappa,
        "root_gram": root_gram,
        "weight_gram": weight_gram,
    }
    return SimpleLieAlgebra(
        family="G2" if family == "G2" else family,
        rank=r,
        cartan=a,
        roots=tuple(roots),
        normalization_constant=float(C),
        ad=ad_real,
        root_matrix=root_matrix,
        root_vectors=root_vectors,
        chevalley=chevalley,
    )


def _fraction_inverse(m: np.ndarray) -> np.ndarray:
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return np.array([row[n:] for row in aug], dtype=object)


# ----------------------------------------------------------------------------
# Diagram automorphisms


_PERMUTATIONS = {
    ("A", 2): lambda r: [r - 1 - i for i in range(r)],
    ("D", 2): lambda r: [0, 1, 3, 2],
    ("D", 3): lambda r: [2, 1, 3, 0],
}


@dataclass(frozen=True)
class DiagramAutomorphism:
    """A Dynkin diagram symmetry and the algebra automorphism it induces.

    ``matrix`` acts on real coordinates; on the root block it is a signed
    permutation, on the Cartan block an orthogonal matrix.
    """

    order: int
    permutation: tuple
    matrix: np.ndarray
    root_permutation: tuple
    root_signs: np.ndarray
    fixed_cartan: np.ndarray  # (r, r_gamma) orthonormal basis of T^gamma

    @property
    def is_identity(self) -> bool:
        return self.order == 1

    @property
    def fixed_rank(self) -> int:
        return self.fixed_cartan.shape[1]

    def apply(self, x) -> np.ndarray:
        return np.asarray(x) @ self.matrix.T

    def apply_inverse(self, x) -> np.ndarray:
        return np.asarray(x) @ self.matrix

    def label_permute(self, labels) -> tuple:
        """Dynkin labels of ``Lambda o gamma'``."""
        return tuple(int(labels[self.permutation[i]]) for i in range(len(labels)))


def diagram_automorphism(alg: SimpleLieAlgebra, order: int = 1) -> DiagramAutomorphism:
    r = alg.rank
    if order == 1:
        perm = list(range(r))
    else:
        key = (alg.family, order)
        if key not in _PERMUTATIONS or (alg.family == "A" and r < 2):
            raise UnsupportedAlgebraError(
                f"no diagram automorphism of order {order} for {alg.name}"
            )
        perm = _PERMUTATIONS[key](r)

    P = alg.n_pos
    index = {root: k for k, root in enumerate(alg.roots)}
    parent = alg.chevalley["parent"]
    ad = alg.chevalley["ad"]
    d = alg.dim

    def proot(root):
        out = [0] * r
        for i in range(r):
            out[perm[i]] = root[i]
        return tuple(out)

    rperm = [index[proot(root)] for root in alg.roots]
    scale = np.ones(P)  # gamma'(e_a) = scale[a] e_{pi a}
    for k in range(r, P):
        i0, kb = parent[k]
        # gamma'(e_k) = [e_{pi i0}, scale[kb] e_{pi kb}]
        col = ad[r + perm[i0]] @ np.eye(d)[r + rperm[kb]]
        scale[k] = scale[kb] * col[r + rperm[k]]
        resid = col.copy()
        resid[r + rperm[k]] = 0
        if np.abs(resid).max() > 1e-12:
            raise AssertionError("diagram automorphism does not map root spaces")
    gc = np.zeros((d, d))
    for i in range(r):
        gc[perm[i], i] = 1.0
    for k in range(P):
        gc[r + rperm[k], r + k] = scale[k]
        gc[r + P + rperm[k], r + P + k] = scale[k]
    basis = alg.chevalley["basis"]
    binv = alg.chevalley["basis_inv"]
    m = binv @ gc @ basis
    if np.abs(m.imag).max() > 1e-10:
        raise AssertionError("automorphism does not preserve the compact form")
    m = m.real
    root_block = m[r:, r:]
    rounded = np.round(root_block)
    if np.abs(root_block - rounded).max() > 1e-10:
        raise AssertionError("automorphism is not a signed permutation on root planes")
    m[r:, r:] = rounded
    m[:r, r:] = 0.0
    m[r:, :r] = 0.0
    signs = np.array([m[r + rperm[k], r + k] for k in range(P)])

    cart = m[:r, :r]
    w, v = np.linalg.eig(cart)
    fixed = np.real(v[:, np.abs(w - 1) < 1e-9])
    fixed, _ = np.linalg.qr(fixed) if fixed.size else (np.zeros((r, 0)), None)
    return DiagramAutomorphism(
        order=order,
        permutation=tuple(perm),
        matrix=m,
        root_permutation=tuple(rperm),
        root_signs=signs,
        fixed_cartan=fixed,
    )


# ----------------------------------------------------------------------------
# Alcove


def _orbit_data(alg: SimpleLieAlgebra, gamma: DiagramAutomorphism):
    """Singular-wall bound for each positive root under ``gamma``.

    On an orbit of length m the map gamma' - exp(ad_q) degenerates iff
    exp(i m theta) equals the eigenvalue of gamma'^m on X_phi, so the first
    positive wall sits at 2 pi / m or pi / m.
    """
    P = alg.n_pos
    bounds = np.empty(P)
    for k in range(P):
        orbit = [k]
        sign = gamma.root_signs[k]
        j = gamma.root_permutation[k]
        while j != k:
            orbit.append(j)
            sign *= gamma.root_signs[j]
            j = gamma.root_permutation[j]
        m = len(orbit)
        bounds[k] = 2 * np.pi / m if sign > 0 else np.pi / m
    return bounds


@dataclass(frozen=True)
class Alcove:
    """Open (twisted) Weyl alcove inside the fixed Cartan subalgebra."""

    alg: SimpleLieAlgebra
    gamma: DiagramAutomorphism
    bounds: np.ndarray
    rep_roots: tuple  # one simple root per gamma-orbit of simple roots
    vertices: np.ndarray  # (r_gamma + 1, r) in T-coordinates

    def is_fixed(self, q, tol: float = 1e-10) -> bool:
        q = np.asarray(q, dtype=float)
        return np.abs(self.gamma.matrix[: self.alg.rank, : self.alg.rank] @ q - q).max() <= tol

    def wall_distances(self, q) -> np.ndarray:
        theta = self.alg.root_values(q)
        return np.minimum(theta, self.bounds - theta)

    def contains(self, q, tol: float = ALCOVE_TOL) -> bool:
        if not self.is_fixed(q):
            raise ValueError("q is not fixed by the diagram automorphism")
        return bool(np.all(self.wall_distances(q) > tol))

    def sample(self, rng, margin: float = 0.0, max_tries: int = 10000) -> np.ndarray:
        k = len(self.vertices)
        for _ in range(max_tries):
            w = rng.dirichlet(np.ones(k))
            q = w @ self.vertices
            if self.wall_distances(q).min() > margin:
                return q
        raise RuntimeError("alcove sampling failed")


def alcove(alg: SimpleLieAlgebra, gamma: DiagramAutomorphism | None = None) -> Alcove:
    if gamma is None:
        gamma = diagram_automorphism(alg, 1)
    r = alg.rank
    bounds = _orbit_data(alg, gamma)
    seen = set()
    reps = []
    for i in range(r):
        if i in seen:
            continue
        j = i
        while j not in seen:
            seen.add(j)
            j = gamma.permutation[j]
        reps.append(i)
    F = gamma.fixed_cartan
    A = alg.root_matrix[reps] @ F  # (r_gamma, r_gamma)
    coeff = np.linalg.solve(A, np.eye(len(reps)))  # columns: y = e_i
    axes = (F @ coeff).T  # q for unit y_i
    verts = [np.zeros(r)]
    for axis in axes:
        n = alg.root_values(axis)
        mask = n > 1e-12
        t = np.min(bounds[mask] / n[mask])
        verts.append(t * axis)
    return Alcove(alg=alg, gamma=gamma, bounds=bounds, rep_roots=tuple(reps), vertices=np.array(verts))


def alcove_contains(alg: SimpleLieAlgebra, gamma: DiagramAutomorphism | None, q) -> bool:
    """Membership in the open alcove; for gamma = id this is
    ``0 < -i alpha_j(q)`` for simple roots and ``-i theta(q) < 2 pi``."""
    return alcove(alg, gamma).contains(q)


def check_jacobi(alg: SimpleLieAlgebra, x, y, z) -> float:
    b = alg.bracket
    res = b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))
    return float(np.abs(res).max())


def expm_ad(alg: SimpleLieAlgebra, x) -> np.ndarray:
    """Matrix of ``Ad_{exp x}`` on real coordinates."""
    return scipy.linalg.expm(alg.ad_of(x))
