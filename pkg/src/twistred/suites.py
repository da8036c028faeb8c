"""Runnable verification suites with machine-readable residual maxima."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import quantum_spectrum as qs
from .lie_core import build_algebra, diagram_automorphism
from .product_twist import CouplingVector, ProductSpace, subspace_angle
from .projection import (
    ProjectionSystem,
    component_bracket_residual,
    involution_check,
    phi_u,
    power_trace,
    quadratic_invariant,
    slice_observables,
)
from .realization import su_realization
from .sutherland import (
    H_S_closed_form,
    M0_pseudo_inverse,
    M_matrix,
    P_matrix,
    integrate_reduced,
    null_projector,
)
from .ym_bridge import (
    from_finite,
    field_energy,
    gauge_identity_residual,
    gauge_periodicity_residual,
    gauge_to_constant,
    jump_residual,
    random_fourier_connection,
    slice_space,
    solve_slice,
    theta_pairing_check,
    to_finite,
)


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    residuals: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(np.isfinite(v) and v < self.tolerance for v in self.residuals.values())

    def record(self, key: str, value: float) -> None:
        self.residuals[key] = max(self.residuals.get(key, 0.0), float(value))

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "tolerance": self.tolerance, "residuals": self.residuals}


def _setup(config):
    alg = build_algebra(config.family, config.rank)
    gamma = diagram_automorphism(alg, config.gamma)
    space = ProductSpace.build(alg, config.coupling(), gamma)
    return alg, gamma, space


def twist_transpose(config, tol: float) -> SuiteResult:
    """The closed-form transpose is the adjoint of the twist for the weighted product."""
    res = SuiteResult("twist_transpose", tol)
    rng = np.random.default_rng(config.seed)
    _, gamma, space = _setup(config)
    period = np.linalg.matrix_power(space.twist_matrix, space.N * gamma.order)
    res.record("period", np.abs(period - np.eye(space.size)).max())
    for _ in range(config.samples):
        x = rng.standard_normal((space.N, space.d))
        y = rng.standard_normal((space.N, space.d))
        res.record("adjoint", abs(space.inner(space.twist_apply(x), y) - space.inner(x, space.twist_transpose(y))))
    return res


def bijectivity(config, tol: float) -> SuiteResult:
    """Kernel and range of the constraint map and invertibility of its restriction."""
    res = SuiteResult("bijectivity", tol)
    rng = np.random.default_rng(config.seed)
    _, _, space = _setup(config)
    for _ in range(config.samples):
        q = space.alcove.sample(rng, margin=config.margin)
        L = space.constraint_matrix(q)
        s = np.linalg.svd(L, compute_uv=False)
        rank = int(np.sum(s > 1e-8 * s[0]))
        res.record("rank_defect", abs(rank - (space.size - space.Q_basis.shape[1])))
        res.record("kernel_angle", subspace_angle(scipy.linalg.null_space(L, rcond=1e-8), space.Q_basis))
        res.record("range_angle", subspace_angle(scipy.linalg.orth(L, rcond=1e-8), space.K_perp_basis))
        Z = space.Z_operator(q)
        eta = space.project_K_perp(rng.standard_normal((space.N, space.d)))
        x = space.Z_solve(q, eta)
        res.record("solve", np.abs((L @ x.ravel()).reshape(eta.shape) - eta).max())
        res.record("singular", float(np.linalg.svd(Z, compute_uv=False).min() < 1e-12))
    return res


def inverse(config, tol: float) -> SuiteResult:
    """Closed-form inverse of M and of its degenerate zero-argument block."""
    res = SuiteResult("inverse", tol)
    rng = np.random.default_rng(config.seed)
    lam = np.asarray(config.coupling().lambdas)
    N = len(lam)
    for _ in range(config.samples):
        x = rng.uniform(1e-3, 2 * np.pi - 1e-3)
        res.record("M_P", np.linalg.norm(M_matrix(x, lam) @ P_matrix(x, lam) - np.eye(N)))
    A = M_matrix(0.0, lam).real / lam[:, None]
    res.record("kernel", np.abs(A @ np.ones(N)).max())
    res.record("rank_defect", abs(np.linalg.matrix_rank(A) - (N - 1)))
    res.record("pseudo_inverse", np.abs(M0_pseudo_inverse(lam) @ A - null_projector(lam)).max())
    return res


def hamiltonian(config, tol: float) -> SuiteResult:
    """Agreement of the available forms of the reduced Hamiltonian."""
    res = SuiteResult("hamiltonian", tol)
    rng = np.random.default_rng(config.seed)
    _, gamma, space = _setup(config)
    for _ in range(config.samples):
        pt = space.random_reduced_point(rng, margin=config.margin)
        h1 = space.H_S_operator_form(pt.q, pt.p, pt.xi)
        h2 = space.H_S_U_form(pt.q, pt.p, pt.xi)
        values = [h1, h2]
        if gamma.is_identity:
            values.append(H_S_closed_form(space, pt.q, pt.p, pt.xi))
        scale = max(1.0, abs(h1))
        res.record("deviation", (max(values) - min(values)) / scale)
    return res


def projection(config, tol: float) -> SuiteResult:
    """Projected free motion against direct integration of the reduced equations."""
    res = SuiteResult("projection", tol)
    rng = np.random.default_rng(config.seed)
    alg, gamma, space = _setup(config)
    if not gamma.is_identity or alg.family != "A":
        raise NotImplementedError("the projection suite needs su(n) and the trivial twist")
    system = ProjectionSystem.build(space)
    grid = config.time_grid.points()
    for _ in range(max(1, config.samples // 2)):
        pt = space.random_reduced_point(rng, margin=0.3)
        ref = integrate_reduced(space, pt, grid)
        traj = system.trajectory(pt, ref.t, dress=system.random_group_element(rng))
        for i, p in enumerate(traj):
            res.record("observables", np.abs(slice_observables(space, p) - slice_observables(space, ref.point(i))).max())
        hs = [space.H_S_operator_form(p.q, p.p, p.xi) for p in traj]
        res.record("energy_drift", np.ptp(hs) / max(1.0, abs(hs[0])))
    return res


def involution(config, tol: float) -> SuiteResult:
    """Brackets among the conserved family and flow invariance of phi_u."""
    res = SuiteResult("involution", tol)
    rng = np.random.default_rng(config.seed)
    alg, gamma, space = _setup(config)
    if alg.family != "A":
        raise NotImplementedError("the involution suite uses the su(n) realization")
    system = ProjectionSystem.build(space)
    n = alg.rank + 1
    gens = [quadratic_invariant()] + [power_trace(k) for k in range(2, n + 1)]
    for _ in range(config.samples):
        pt = system.act(system.random_group_element(rng), system.lift(space.random_reduced_point(rng)))
        u, v = rng.uniform(0.3, 3.0, 2) * rng.choice([-1, 1], 2)
        h1, h2 = gens[rng.integers(len(gens))], gens[rng.integers(len(gens))]
        res.record("involution", abs(involution_check(system, h1, u, h2, v, pt)))
        X, Y = rng.standard_normal((2, space.N, space.d))
        res.record("component_bracket", component_bracket_residual(system, pt, u, v, X, Y))
        moved = system.free_flow(rng.uniform(0, 1), pt)
        res.record("flow_invariance", np.abs(phi_u(system, moved, u) - phi_u(system, pt, u)).max())
    return res


def bridge(config, tol: float) -> SuiteResult:
    """Finite system against gauge field data on the circle."""
    res = SuiteResult("bridge", tol)
    rng = np.random.default_rng(config.seed)
    alg = build_algebra(config.family, config.rank)
    gamma = diagram_automorphism(alg, config.gamma)
    N = config.N
    for _ in range(config.samples):
        marks = np.sort(rng.uniform(0, 1, N))
        space = slice_space(alg, marks, gamma)
        pt = space.random_reduced_point(rng)
        cfg = solve_slice(alg, pt.q, marks, pt.xi * space.lambdas[:, None], pt.p, gamma)
        sp, q, J, xi = to_finite(alg, cfg, gamma)
        back = from_finite(sp, q, J, xi, marks[0])
        res.record(
            "round_trip",
            max(
                np.abs(back.marks - cfg.marks).max(),
                np.abs(back.charges - cfg.charges).max(),
                np.abs(back.plus_limits - cfg.plus_limits).max(),
            ),
        )
        res.record("jump", jump_residual(alg, cfg, gamma))
        res.record("energy", abs(field_energy(cfg) - sp.norm2(J)) / max(1.0, sp.norm2(J)))
        res.record("theta_pairing", theta_pairing_check(alg, cfg, pt.p, gamma))
    return res


def gauge(config, tol: float, steps: int = 1200) -> SuiteResult:
    """Gauge transformation of smooth connections to constant ones."""
    res = SuiteResult("gauge", tol)
    rng = np.random.default_rng(config.seed)
    alg = build_algebra(config.family, config.rank)
    if alg.family != "A":
        raise NotImplementedError("the gauge suite uses the su(n) realization")
    real = su_realization(alg)
    system = ProjectionSystem.build(ProductSpace.build(alg, CouplingVector((1.0,))))
    for _ in range(max(1, config.samples // 2)):
        conn, _ = random_fourier_connection(real, rng)
        g = gauge_to_constant(system, conn, steps=steps)
        xs = rng.uniform(0, 1, 3)
        res.record("identity", max(gauge_identity_residual(g, conn, x) for x in xs))
        res.record("periodicity", max(gauge_periodicity_residual(g, real, x) for x in xs))
    return res


def quantum(config, tol: float) -> SuiteResult:
    """Casimir values and singlet counting against independent oracles."""
    res = SuiteResult("quantum", tol)
    a1 = build_algebra("A", 1)
    for m in range(0, 11):
        c = qs.casimir_brute_force(qs.su2_irrep(a1, m))
        res.record("casimir", abs(c - qs.casimir_value(a1, [(m,)])) / max(1.0, abs(c)))
    for a in range(9):
        for b in range(9):
            for c in range(9):
                res.record(
                    "singlet",
                    abs(qs.su2_singlet_dimension(a, b, c) - qs.su2_singlet_by_weights(a, b, c))
                    + abs(qs.tensor_multiplicity(a1, (a,), (b,), (c,)) - qs.su2_singlet_dimension(a, b, c)),
                )
    res.record("weyl_su2", abs(qs.weyl_constant(a1) + 0.25))
    res.record("weyl_su3", abs(qs.weyl_constant(build_algebra("A", 2)) + 1.0))
    return res


SUITES = {
    "twist_transpose": twist_transpose,
    "bijectivity": bijectivity,
    "inverse": inverse,
    "hamiltonian": hamiltonian,
    "projection": projection,
    "involution": involution,
    "bridge": bridge,
    "gauge": gauge,
    "quantum": quantum,
}
