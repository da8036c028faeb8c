"""Gauge fields on the cylinder and their link with the finite-dimensional slice.

On the slice the connection is a constant ``chi`` and the electric field is
determined on each interval between charges by its right-hand limit at the
left end.  Those limits correspond to the currents of the product-group
picture through ``E_{k-1}^+ = lambda_k J_k`` with ``1/lambda_k`` the length
of the k-th interval.

Wilson lines and the gauge fixing to a constant connection work in the
defining representation of SU(n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .lie_core import DiagramAutomorphism, SimpleLieAlgebra, diagram_automorphism
from .product_twist import ConstraintInfeasibleError, CouplingVector, ProductSpace, ReducedPoint
from .realization import SUnRealization

QUADRATURE_POINTS = 1000


@dataclass(frozen=True)
class FieldConfig:
    """Slice data: marks ``x_1 < ... < x_N`` in (0, 1), charges ``zeta_k``,
    constant connection ``chi`` and limits ``E_0^+, ..., E_{N-1}^+``.

    ``E_0^+`` is the field just right of ``x_0 = x_N - 1``.
    """

    marks: np.ndarray
    charges: np.ndarray  # (N, d)
    chi: np.ndarray  # (r,)
    plus_limits: np.ndarray  # (N, d)

    def __post_init__(self):
        x = np.asarray(self.marks, dtype=float)
        if np.any(np.diff(x) <= 0) or x[0] <= 0 or x[-1] >= 1:
            raise ValueError("marks must satisfy 0 < x_1 < ... < x_N < 1")

    @property
    def N(self) -> int:
        return len(self.marks)

    @property
    def lengths(self) -> np.ndarray:
        """``x_k - x_{k-1}`` for k = 1..N with ``x_0 = x_N - 1``."""
        x = np.asarray(self.marks, dtype=float)
        return np.diff(np.concatenate([[x[-1] - 1.0], x]))

    @property
    def coupling(self) -> CouplingVector:
        return CouplingVector.from_marks(self.marks)

    def to_dict(self) -> dict:
        return {
            "marks": np.asarray(self.marks).tolist(),
            "charges": np.asarray(self.charges).tolist(),
            "chi": np.asarray(self.chi).tolist(),
            "plus_limits": np.asarray(self.plus_limits).tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> "FieldConfig":
        return cls(
            marks=np.asarray(data["marks"], float),
            charges=np.asarray(data["charges"], float),
            chi=np.asarray(data["chi"], float),
            plus_limits=np.asarray(data["plus_limits"], float),
        )


def _gamma(alg, gamma):
    if gamma is None:
        return diagram_automorphism(alg, 1)
    if isinstance(gamma, int):
        return diagram_automorphism(alg, gamma)
    return gamma


def slice_space(alg: SimpleLieAlgebra, marks, gamma=None) -> ProductSpace:
    return ProductSpace.build(alg, CouplingVector.from_marks(marks), _gamma(alg, gamma))


def to_finite(alg, config: FieldConfig, gamma=None):
    """Map slice data to ``(space, q, J, xi)`` of the product picture."""
    space = slice_space(alg, config.marks, gamma)
    lam = space.lambdas
    xi = np.asarray(config.charges) / lam[:, None]
    J = np.asarray(config.plus_limits) / lam[:, None]
    return space, np.asarray(config.chi, dtype=float), J, xi


def from_finite(space: ProductSpace, q, J, xi, first_mark: float) -> FieldConfig:
    """Inverse of :func:`to_finite`; marks are fixed up to a translation,
    so the position of the first one must be supplied."""
    lam = space.lambdas
    marks = first_mark + np.concatenate([[0.0], np.cumsum(1.0 / lam[1:])])
    return FieldConfig(
        marks=marks,
        charges=np.asarray(xi) * lam[:, None],
        chi=np.asarray(q, dtype=float),
        plus_limits=np.asarray(J) * lam[:, None],
    )


def solve_slice(alg, chi, marks, charges, p, gamma=None) -> FieldConfig:
    """Electric field on the slice solving the jump conditions."""
    marks = np.asarray(marks, dtype=float)
    space = slice_space(alg, marks, gamma)
    lam = space.lambdas
    xi = np.asarray(charges, dtype=float) / lam[:, None]
    try:
        J = space.solve_momentum_constraint(np.asarray(chi, float), np.asarray(p, float), xi)
    except ConstraintInfeasibleError as exc:
        raise ConstraintInfeasibleError(f"charges are infeasible: {exc}") from None
    return FieldConfig(
        marks=marks,
        charges=np.asarray(charges, dtype=float),
        chi=np.asarray(chi, dtype=float),
        plus_limits=J * lam[:, None],
    )


def field_at(alg, config: FieldConfig, x: float, gamma=None) -> np.ndarray:
    """``E(x)`` for x in [0, 1) away from the marks."""
    g = _gamma(alg, gamma)
    marks = np.asarray(config.marks)
    left = np.concatenate([[marks[-1] - 1.0], marks])
    k = int(np.searchsorted(marks, x, side="right"))  # interval (x_k, x_{k+1}) with x_0 shifted
    if k == len(marks):
        # beyond x_N: the field is tau'(E_0^+) propagated from x_N
        start = g.apply_inverse(config.plus_limits[0])
        return alg.exp_ad_cartan(config.chi, start, -(x - marks[-1]))
    return alg.exp_ad_cartan(config.chi, config.plus_limits[k], -(x - left[k]))


def minus_limits(alg, config: FieldConfig) -> np.ndarray:
    """``E_k^-`` for k = 1..N."""
    return np.stack([
        alg.exp_ad_cartan(config.chi, config.plus_limits[k - 1], -config.lengths[k - 1])
        for k in range(1, config.N + 1)
    ])


def jump_residual(alg, config: FieldConfig, gamma=None) -> float:
    """Max-norm of ``zeta_k + E_k^+ - E_k^-`` over k = 1..N."""
    g = _gamma(alg, gamma)
    plus = np.concatenate([config.plus_limits[1:], [g.apply_inverse(config.plus_limits[0])]])
    res = np.asarray(config.charges) + plus - minus_limits(alg, config)
    return float(np.abs(res).max())


def componentwise_residual(space: ProductSpace, q, J, xi) -> float:
    """Residual of ``xi_k + (lambda_{k+1}/lambda_k) J_{k+1} - exp(-ad_{q/lambda_k}) J_k``."""
    lam = space.lambdas
    J = np.asarray(J)
    nxt = np.concatenate([J[1:], [space.gamma.apply_inverse(J[0])]])
    ratio = np.concatenate([lam[1:], [lam[0]]]) / lam
    rot = np.stack([space.alg.exp_ad_cartan(np.asarray(q) / lk, Jk, -1.0) for lk, Jk in zip(lam, J)])
    return float(np.abs(np.asarray(xi) + ratio[:, None] * nxt - rot).max())


def field_energy(config: FieldConfig) -> float:
    """``int_0^1 <E, E> dx``; the integrand is constant between marks."""
    E = np.asarray(config.plus_limits)
    return float(np.sum(config.lengths * np.einsum("ka,ka->k", E, E)))


def field_energy_quadrature(alg, config: FieldConfig, points: int = QUADRATURE_POINTS, gamma=None) -> float:
    """Gauss-Legendre quadrature of ``<E(x), E(x)>`` interval by interval."""
    nodes, weights = np.polynomial.legendre.leggauss(points)
    marks = np.asarray(config.marks)
    left = np.concatenate([[marks[-1] - 1.0], marks[:-1]])
    total = 0.0
    for k in range(config.N):
        a, b = left[k], marks[k]
        xs = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        vals = np.stack([alg.exp_ad_cartan(config.chi, config.plus_limits[k], -(x - a)) for x in xs])
        total += 0.5 * (b - a) * np.sum(weights * np.einsum("ia,ia->i", vals, vals))
    return float(total)


def theta_pairing_check(alg, config: FieldConfig, p, gamma=None) -> float:
    """Norm of ``sum_k (x_k - x_{k-1}) P(E_{k-1}^+) - p`` with P the projection
    onto the fixed Cartan subalgebra."""
    g = _gamma(alg, gamma)
    F = g.fixed_cartan
    r = alg.rank
    weighted = np.sum(config.lengths[:, None] * np.asarray(config.plus_limits)[:, :r], axis=0)
    return float(np.linalg.norm(F @ (F.T @ weighted) - np.asarray(p)))


# -----------------------------------------------------------------------------
# Wilson lines (defining representation)

_C1 = 0.5 - np.sqrt(3) / 6
_C2 = 0.5 + np.sqrt(3) / 6
_A1 = 0.25 + np.sqrt(3) / 6
_A2 = 0.25 - np.sqrt(3) / 6
UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class ConnectionSample:
    """Piecewise smooth connection on [0, 1] in matrix form.

    ``pieces[i]`` evaluates A on ``(breaks[i], breaks[i+1])``; values at
    other x are obtained from quasi-periodicity.
    """

    breaks: np.ndarray
    pieces: tuple
    real: SUnRealization

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        if b[0] != 0.0 or b[-1] != 1.0 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must increase from 0 to 1")
        if len(self.pieces) != len(b) - 1:
            raise ValueError("need one evaluator per interval")

    def interval(self, x: float) -> int:
        i = int(np.searchsorted(self.breaks, x, side="right")) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def __call__(self, x: float, interval: int | None = None) -> np.ndarray:
        shift = int(np.floor(x))
        base = x - shift
        if interval is None:
            interval = self.interval(base)
        value = self.pieces[interval](base)
        for _ in range(shift):
            value = self.real.twist_group_inverse(value)
        for _ in range(-shift):
            value = self.real.twist_group(value)
        return value

    @classmethod
    def constant(cls, real, matrix) -> "ConnectionSample":
        m = np.asarray(matrix)
        return cls(np.array([0.0, 1.0]), (lambda _x: m,), real)

    @classmethod
    def piecewise_constant(cls, real, breaks, matrices) -> "ConnectionSample":
        pieces = tuple((lambda _x, m=np.asarray(m): m) for m in matrices)
        return cls(np.asarray(breaks, float), pieces, real)

    @classmethod
    def from_function(cls, real, func: Callable, breaks=None) -> "ConnectionSample":
        if breaks is None:
            breaks = [0.0, 1.0]
        return cls(np.asarray(breaks, float), tuple([func] * (len(breaks) - 1)), real)


def random_fourier_connection(real: SUnRealization, rng, modes: int = 3, scale: float = 1.0):
    """Smooth periodic connection ``sum_m a_m cos(2 pi m x) + b_m sin(2 pi m x)``.

    Returns the connection and the coefficient arrays.
    """
    d = real.alg.dim
    a = scale * rng.standard_normal((modes + 1, d)) / (1 + np.arange(modes + 1))[:, None]
    b = scale * rng.standard_normal((modes + 1, d)) / (1 + np.arange(modes + 1))[:, None]
    b[0] = 0.0
    ks = 2 * np.pi * np.arange(modes + 1)

    def coords(x):
        return np.cos(ks * x) @ a + np.sin(ks * x) @ b

    def func(x):
        return real.to_matrix(coords(x))

    return ConnectionSample.from_function(real, func), coords


def _cf4_step(y, A, x, h, interval):
    a1 = A(x + _C1 * h, interval)
    a2 = A(x + _C2 * h, interval)
    return y @ scipy.linalg.expm(h * (_A1 * a1 + _A2 * a2)) @ scipy.linalg.expm(h * (_A2 * a1 + _A1 * a2))


def _reunitarize(y):
    err = np.abs(y.conj().T @ y - np.eye(len(y))).max()
    if err > UNITARITY_TOL:
        u, _, vh = np.linalg.svd(y)
        return u @ vh
    return y


@dataclass
class WilsonLine:
    """Fundamental solution of ``y' = y A`` with ``y(0) = 1`` sampled on a grid.

    Intermediate values are obtained by integrating from the nearest stored
    node to the left.
    """

    connection: ConnectionSample
    xs: np.ndarray
    ys: np.ndarray
    step: float

    def at(self, x: float) -> np.ndarray:
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        i = min(max(i, 0), len(self.xs) - 1)
        return _integrate_between(self.connection, self.ys[i], self.xs[i], x, self.step)

    def monodromy(self, period_end: float = 1.0) -> np.ndarray:
        return self.at(period_end)

    def dump_rows(self):
        """Rows ``x, re(y_11), im(y_11), re(y_12), ...`` (row-major)."""
        for x, y in zip(self.xs, self.ys):
            flat = y.ravel()
            inter = np.empty(2 * flat.size)
            inter[0::2] = flat.real
            inter[1::2] = flat.imag
            yield [float(x)] + inter.tolist()


def _breakpoints(conn: ConnectionSample, a: float, b: float) -> np.ndarray:
    pts = [a, b]
    for shift in range(int(np.floor(a)), int(np.ceil(b)) + 1):
        pts.extend(conn.breaks + shift)
    pts = np.array(sorted(set(p for p in pts if a <= p <= b)))
    return pts


def _integrate_between(conn, y, a, b, step):
    if b <= a:
        return y
    pts = _breakpoints(conn, a, b)
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 0:
            continue
        mid = 0.5 * (lo + hi)
        interval = conn.interval(mid - np.floor(mid))
        n = max(1, int(np.ceil((hi - lo) / step - 1e-9)))
        h = (hi - lo) / n
        for j in range(n):
            y = _reunitarize(_cf4_step(y, conn, lo + j * h, h, interval))
    return y


def wilson_line(conn: ConnectionSample, x_end: float = 1.0, steps: int = 400) -> WilsonLine:
    """Integrate ``y' = y A`` from 0 to ``x_end`` with commutator-free
    fourth-order exponential steps, restarting at every break point."""
    step = 1.0 / steps
    grid = _breakpoints(conn, 0.0, x_end)
    fine = [0.0]
    for lo, hi in zip(grid[:-1], grid[1:]):
        n = max(1, int(np.ceil((hi - lo) / step)))
        fine.extend(np.linspace(lo, hi, n + 1)[1:])
    xs = np.array(fine)
    ys = [np.eye(conn.real.n, dtype=complex)]
    for lo, hi in zip(xs[:-1], xs[1:]):
        ys.append(_integrate_between(conn, ys[-1], lo, hi, step))
    return WilsonLine(conn, xs, np.array(ys), step)


@dataclass
class ConstantGauge:
    """Gauge transformation ``g(x) = exp(-x chi) w y(x)`` to a constant connection."""

    chi: np.ndarray  # Cartan coordinates
    chi_matrix: np.ndarray
    w: np.ndarray
    line: WilsonLine

    def g(self, x: float) -> np.ndarray:
        return scipy.linalg.expm(-x * self.chi_matrix) @ self.w @ self.line.at(x)


def gauge_to_constant(system, conn: ConnectionSample, steps: int = 400, x_end: float = 2.0) -> ConstantGauge:
    """Find ``chi`` in the alcove and the gauge transformation taking A to it.

    ``system`` is a :class:`twistred.projection.ProjectionSystem` with a
    single site (only its alcove projection is used).
    """
    if not system.space.gamma.is_identity:
        raise NotImplementedError("gauge fixing to a constant is implemented for the trivial twist only")
    line = wilson_line(conn, x_end=x_end, steps=steps)
    q, w = system.alcove_project(line.at(1.0))
    chi_m = system.real.to_matrix(system.space.alg.embed_cartan(q))
    return ConstantGauge(chi=q, chi_matrix=chi_m, w=w, line=line)


def gauge_identity_residual(gauge: ConstantGauge, conn: ConnectionSample, x: float, h: float = 1e-3) -> float:
    """``|g A g^-1 - g' g^-1 - chi|`` with g' from a five-point stencil."""
    gs = [gauge.g(x + k * h) for k in (-2, -1, 1, 2)]
    dg = (gs[0] - 8 * gs[1] + 8 * gs[2] - gs[3]) / (12 * h)
    g0 = gauge.g(x)
    ginv = np.linalg.inv(g0)
    res = g0 @ conn(x) @ ginv - dg @ ginv - gauge.chi_matrix
    return float(np.abs(res).max())


def gauge_periodicity_residual(gauge: ConstantGauge, real: SUnRealization, x: float) -> float:
    return float(np.abs(gauge.g(x + 1.0) - real.twist_group_inverse(gauge.g(x))).max())


def gauge_transform_connection(real: SUnRealization, conn: ConnectionSample, gfun, dgfun) -> ConnectionSample:
    """``A^g = g A g^-1 - g' g^-1`` for smooth periodic g given with its derivative."""

    def piece_factory(i):
        def piece(x):
            g = gfun(x)
            gi = np.linalg.inv(g)
            return g @ conn.pieces[i](x) @ gi - dgfun(x) @ gi
        return piece

    return ConnectionSample(conn.breaks, tuple(piece_factory(i) for i in range(len(conn.pieces))), real)


def random_periodic_gauge(real: SUnRealization, rng, modes: int = 2, scale: float = 0.5):
    """Smooth periodic ``g = exp(X(x))`` and its exact derivative."""
    d = real.alg.dim
    a = scale * rng.standard_normal((modes + 1, d))
    b = scale * rng.standard_normal((modes + 1, d))
    b[0] = 0.0
    ks = 2 * np.pi * np.arange(modes + 1)

    def X(x):
        return real.to_matrix(np.cos(ks * x) @ a + np.sin(ks * x) @ b)

    def dX(x):
        return real.to_matrix((-ks * np.sin(ks * x)) @ a + (ks * np.cos(ks * x)) @ b)

    def g(x):
        return scipy.linalg.expm(X(x))

    def dg(x):
        return scipy.linalg.expm_frechet(X(x), dX(x), compute_expm=False)

    return g, dg
