"""Representation theory behind the quantum spectrum of the reduced system.

Weights are integer tuples of Dynkin labels.  The invariant form on weights
is the one induced by the normalized Killing form (long roots of squared
length 2) and is evaluated exactly with fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lie_core import DiagramAutomorphism, SimpleLieAlgebra, diagram_automorphism


class WeightError(ValueError):
    pass


def _check_dominant(alg: SimpleLieAlgebra, labels) -> tuple:
    labels = tuple(int(x) for x in labels)
    if len(labels) != alg.rank or any(x < 0 for x in labels):
        raise WeightError(f"not a dominant integral weight of {alg.name}: {labels}")
    return labels


def weight_form(alg: SimpleLieAlgebra, mu, nu) -> Fraction:
    """Invariant form of two weights given by Dynkin labels."""
    G = alg.weight_gram
    r = alg.rank
    return sum((Fraction(int(mu[i])) * G[i][j] * int(nu[j]) for i in range(r) for j in range(r)), Fraction(0))


def weyl_vector(alg: SimpleLieAlgebra) -> tuple:
    return (1,) * alg.rank


def casimir_value(alg: SimpleLieAlgebra, weights, lambdas=None) -> float:
    """``-sum_k kappa(Lambda_k + 2 delta, Lambda_k) / lambda_k``."""
    weights = [_check_dominant(alg, w) for w in weights]
    if lambdas is None:
        lambdas = [1.0] * len(weights)
    if len(lambdas) != len(weights):
        raise ValueError("one coupling per weight is required")
    total = 0.0
    for w, lam in zip(weights, lambdas):
        shifted = tuple(x + 2 for x in w)
        total -= float(weight_form(alg, shifted, w)) / lam
    return total


def weyl_constant(alg: SimpleLieAlgebra, N: int | None = None, lambdas=None) -> float:
    """Additive constant ``-kappa(delta, delta)/2``; it does not depend on the
    number of sites or the couplings, which are accepted only for symmetry
    with the other spectral functions."""
    d = weyl_vector(alg)
    return -0.5 * float(weight_form(alg, d, d))


# -----------------------------------------------------------------------------
# Weyl group and weight multiplicities


def _simple_root_labels(alg) -> np.ndarray:
    """Row i: Dynkin labels of the simple root alpha_i."""
    return alg.cartan.T.copy()


def reflect(alg, labels, i) -> tuple:
    a = _simple_root_labels(alg)
    n = labels[i]
    return tuple(int(x) for x in np.asarray(labels) - n * a[i])


def dominant_conjugate(alg, labels) -> tuple:
    mu = tuple(int(x) for x in labels)
    while True:
        neg = [i for i, x in enumerate(mu) if x < 0]
        if not neg:
            return mu
        mu = reflect(alg, mu, neg[0])


def contragredient(alg, labels) -> tuple:
    """Highest weight of the dual representation."""
    return dominant_conjugate(alg, tuple(-int(x) for x in labels))


def twist_weight(gamma: DiagramAutomorphism, labels) -> tuple:
    """Labels of ``Lambda o gamma'``."""
    return gamma.label_permute(labels)


@lru_cache(maxsize=None)
def _weyl_orbit_signed(alg_key, labels):
    alg = _ALGS[alg_key]
    start = tuple(labels)
    seen = {start: 1}
    frontier = [start]
    while frontier:
        nxt = []
        for mu in frontier:
            for i in range(alg.rank):
                nu = reflect(alg, mu, i)
                if nu not in seen:
                    seen[nu] = -seen[mu]
                    nxt.append(nu)
        frontier = nxt
    return seen


_ALGS: dict = {}


def _key(alg) -> tuple:
    k = (alg.family, alg.rank)
    _ALGS.setdefault(k, alg)
    return k


def _in_root_cone(alg, diff) -> tuple | None:
    n = np.linalg.solve(alg.cartan.astype(float), np.asarray(diff, dtype=float))
    rounded = np.round(n)
    if np.abs(n - rounded).max() > 1e-9 or np.any(rounded < 0):
        return None
    return tuple(int(x) for x in rounded)


@lru_cache(maxsize=None)
def _multiplicities(alg_key, highest):
    """Freudenthal recursion; returns {weight labels: multiplicity}."""
    alg = _ALGS[alg_key]
    highest = tuple(highest)
    a = _simple_root_labels(alg)
    pos_labels = [tuple(int(x) for x in row) for row in alg.root_labels]
    delta = weyl_vector(alg)
    top = weight_form(alg, tuple(h + d for h, d in zip(highest, delta)), tuple(h + d for h, d in zip(highest, delta)))

    def is_weight(mu):
        return _in_root_cone(alg, np.subtract(highest, dominant_conjugate(alg, mu))) is not None

    # generate weights by depth
    layers = [[highest]]
    known = {highest}
    while True:
        nxt = []
        for mu in layers[-1]:
            for i in range(alg.rank):
                nu = tuple(int(x) for x in np.asarray(mu) - a[i])
                if nu not in known and is_weight(nu):
                    known.add(nu)
                    nxt.append(nu)
        if not nxt:
            break
        layers.append(nxt)

    mult = {highest: 1}
    for layer in layers[1:]:
        for mu in layer:
            md = tuple(m + d for m, d in zip(mu, delta))
            denom = top - weight_form(alg, md, md)
            acc = Fraction(0)
            for alpha in pos_labels:
                k = 1
                while True:
                    nu = tuple(m + k * x for m, x in zip(mu, alpha))
                    if nu not in mult:
                        if nu not in known:
                            break
                        k += 1
                        continue
                    acc += mult[nu] * weight_form(alg, nu, alpha)
                    k += 1
            value = 2 * acc / denom
            if value.denominator != 1:
                raise AssertionError("non-integral weight multiplicity")
            if value:
                mult[mu] = int(value)
    return mult


def weight_multiplicities(alg: SimpleLieAlgebra, labels) -> dict:
    return dict(_multiplicities(_key(alg), _check_dominant(alg, labels)))


def dimension(alg: SimpleLieAlgebra, labels) -> int:
    """Weyl dimension formula."""
    labels = _check_dominant(alg, labels)
    delta = weyl_vector(alg)
    num = Fraction(1)
    for root in alg.root_labels:
        # (Lambda + delta, alpha) / (delta, alpha) via coroot pairing
        num *= weight_form(alg, tuple(l + d for l, d in zip(labels, delta)), root) / weight_form(alg, delta, root)
    if num.denominator != 1:
        raise AssertionError("Weyl dimension is not an integer")
    return int(num)


def tensor_multiplicity(alg, lam, mu, nu) -> int:
    """Multiplicity of V_nu in V_lam (x) V_mu (Brauer-Klimyk / Racah sum)."""
    key = _key(alg)
    m = _multiplicities(key, tuple(lam))
    delta = weyl_vector(alg)
    target = tuple(n + d for n, d in zip(nu, delta))
    orbit = _weyl_orbit_signed(key, target)
    total = 0
    for w_target, sign in orbit.items():
        weight = tuple(x - y - d for x, y, d in zip(w_target, mu, delta))
        total += sign * m.get(weight, 0)
    if total < 0:
        raise AssertionError("negative tensor multiplicity")
    return total


def singlet_dimension(alg: SimpleLieAlgebra, a, b, c) -> int:
    """``dim (V_a (x) V_b (x) V_c)^G``."""
    a, b, c = (_check_dominant(alg, x) for x in (a, b, c))
    if alg.family == "A" and alg.rank == 1:
        return su2_singlet_dimension(a[0], b[0], c[0])
    return _singlet_general(_key(alg), a, b, c)


@lru_cache(maxsize=None)
def _singlet_general(key, a, b, c):
    alg = _ALGS[key]
    return tensor_multiplicity(alg, a, b, contragredient(alg, c))


def su2_singlet_dimension(a: int, b: int, c: int) -> int:
    """Triangle rule for su(2) labels (twice the spins)."""
    if a < 0 or b < 0 or c < 0:
        raise WeightError("labels must be nonnegative")
    return int(abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0)


def su2_singlet_by_weights(a: int, b: int, c: int) -> int:
    """Brute-force oracle: zero-weight minus weight-two multiplicity of the
    triple tensor product, from the convolution of the weight multisets."""

    def chars(m):
        v = np.zeros(2 * m + 1, dtype=np.int64)
        v[0::2] = 1  # weights -m, -m+2, ..., m at offsets 0..2m
        return v

    conv = np.convolve(np.convolve(chars(a), chars(b)), chars(c))
    offset = a + b + c  # index of weight zero
    zero = conv[offset] if offset < len(conv) else 0
    two = conv[offset + 2] if offset + 2 < len(conv) else 0
    return int(zero - two)


# -----------------------------------------------------------------------------
# Level enumeration


@dataclass(frozen=True)
class SpectralLevel:
    weights: tuple
    energy: float
    multiplicity: int


def _dominant_below(alg, bound: float, lam: float) -> list:
    """Dominant weights with ``kappa(L + 2 delta, L) / (2 lam) <= bound``."""
    out = []
    start = (0,) * alg.rank
    seen = {start}
    stack = [start]

    def energy(w):
        return float(weight_form(alg, tuple(x + 2 for x in w), w)) / (2 * lam)

    while stack:
        w = stack.pop()
        if energy(w) > bound + 1e-12:
            continue
        out.append(w)
        for i in range(alg.rank):
            nxt = tuple(x + (j == i) for j, x in enumerate(w))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return sorted(out)


def enumerate_levels(alg, gamma, lambdas, nus, energy_cutoff: float) -> list[SpectralLevel]:
    """Eigenvalues ``-C_2 / 2`` with multiplicity from the chained singlet spaces."""
    if gamma is None or isinstance(gamma, int):
        gamma = diagram_automorphism(alg, gamma or 1)
    lambdas = [float(x) for x in lambdas]
    N = len(lambdas)
    nus = [_check_dominant(alg, nu) for nu in nus]
    if len(nus) != N:
        raise ValueError("one spin weight per site is required")
    if energy_cutoff < 0:
        return []
    candidates = [_dominant_below(alg, energy_cutoff, lam) for lam in lambdas]

    def site_energy(w, lam):
        return float(weight_form(alg, tuple(x + 2 for x in w), w)) / (2 * lam)

    levels = []

    def dfs(chosen, energy, mult):
        k = len(chosen)
        if k == N:
            last = twist_weight(gamma, contragredient(alg, chosen[0]))
            m = singlet_dimension(alg, last, chosen[-1], nus[-1])
            if m:
                levels.append(SpectralLevel(tuple(chosen), energy, mult * m))
            return
        for w in candidates[k]:
            e = energy + site_energy(w, lambdas[k])
            if e > energy_cutoff + 1e-12:
                continue
            m = 1
            if k >= 1:
                m = singlet_dimension(alg, contragredient(alg, w), chosen[-1], nus[k - 1])
                if not m:
                    continue
            dfs(chosen + [w], e, mult * m)

    dfs([], 0.0, 1)
    levels.sort(key=lambda lv: (lv.energy, lv.weights))
    return levels


# -----------------------------------------------------------------------------
# su(2) representations and the quantum spin potential


def su2_irrep(alg: SimpleLieAlgebra, m: int) -> np.ndarray:
    """Matrices of the basis elements in the irreducible representation with
    highest weight ``m`` (dimension m + 1), shape (3, m+1, m+1)."""
    if alg.family != "A" or alg.rank != 1:
        raise ValueError("su2_irrep requires A1")
    dim = m + 1
    h = np.diag([m - 2 * k for k in range(dim)]).astype(complex)
    e = np.zeros((dim, dim), dtype=complex)
    f = np.zeros((dim, dim), dtype=complex)
    # orthonormal weight basis: e v_k = sqrt(k (m - k + 1)) v_{k-1} and f = e^*
    for k in range(1, dim):
        e[k - 1, k] = np.sqrt(k * (m - k + 1))
    f = e.conj().T
    chev = np.array([h, e, f])
    basis = alg.chevalley["basis"]
    return np.einsum("xa,xij->aij", basis, chev)


def casimir_brute_force(rep: np.ndarray) -> float:
    """Scalar value of ``sum_a rho(T_a)^2`` on an irreducible representation."""
    c = np.einsum("aij,ajk->ik", rep, rep)
    val = np.trace(c).real / len(c)
    if np.abs(c - val * np.eye(len(c))).max() > 1e-9 * max(1.0, abs(val)):
        raise AssertionError("representation is not irreducible")
    return float(val)


def spin_potential_matrix(space, q, nus) -> np.ndarray:
    """Quantum spin potential on the torus-invariant subspace (su(2) only).

    Returns the Hermitian matrix of ``-(1/2) sum_ab R_ab rho(T_a) rho(T_b)``
    where ``T_a`` is an orthonormal basis of the complement of the diagonal
    torus and ``R`` the inverse of ``U^T U`` restricted there.  The minus
    sign turns the anti-Hermitian generators into a positive operator.
    """
    alg = space.alg
    if alg.family != "A" or alg.rank != 1:
        raise ValueError("spin potential is implemented for su(2)")
    if not space.gamma.is_identity:
        raise NotImplementedError("spin potential requires the trivial twist")
    nus = [int(np.asarray(n).ravel()[0]) for n in nus]
    reps = [su2_irrep(alg, n) for n in nus]
    dims = [n + 1 for n in nus]
    total = int(np.prod(dims))
    if total > 100 * 100:
        raise ValueError("spin space too large")

    def embed(site, mat):
        out = np.array([[1.0]], dtype=complex)
        for k, dk in enumerate(dims):
            out = np.kron(out, mat if k == site else np.eye(dk))
        return out

    # zero total weight subspace = invariants of the diagonal torus
    weights = np.zeros(1)
    for n in nus:
        weights = np.add.outer(weights, np.arange(n, -n - 1, -2)).ravel()
    inv_idx = np.where(weights == 0)[0]
    if len(inv_idx) == 0:
        return np.zeros((0, 0))

    U = space.U_operator(q)
    R = np.linalg.inv(U.T @ U)
    B = space.K_perp_basis  # columns: orthonormal product vectors
    d = alg.dim
    ops = []
    for col in B.T:
        vec = col.reshape(space.N, d)
        m = sum(embed(k, np.einsum("a,aij->ij", vec[k], reps[k])) for k in range(space.N))
        ops.append(m)
    V = np.zeros((total, total), dtype=complex)
    for a, oa in enumerate(ops):
        for b, ob in enumerate(ops):
            if R[a, b] != 0:
                V -= 0.5 * R[a, b] * (oa @ ob)
    V = V[np.ix_(inv_idx, inv_idx)]
    return 0.5 * (V + V.conj().T)


def singlet_dimension_by_weights(alg: SimpleLieAlgebra, a, b, c) -> int:
    """Brute-force singlet count from the convolved weight multiset of the
    triple product, extracted with the alternating Weyl-orbit sum at zero."""
    key = _key(alg)
    total: dict = {(0,) * alg.rank: 1}
    for labels in (a, b, c):
        m = _multiplicities(key, _check_dominant(alg, labels))
        nxt: dict = {}
        for w1, m1 in total.items():
            for w2, m2 in m.items():
                w = tuple(x + y for x, y in zip(w1, w2))
                nxt[w] = nxt.get(w, 0) + m1 * m2
        total = nxt
    delta = weyl_vector(alg)
    count = 0
    for w_delta, sign in _weyl_orbit_signed(key, delta).items():
        count += sign * total.get(tuple(x - d for x, d in zip(w_delta, delta)), 0)
    return count
