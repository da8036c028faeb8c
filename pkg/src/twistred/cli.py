"""Command line harness: ``twistred <command> --config FILE [--seed N] [--out DIR]``.

Exit codes: 0 pass, 1 invalid input, 2 numerical failure, 3 non-generic input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import quantum_spectrum as qs
from .config import SCHEMA_VERSION, ConfigError, RunConfig
from .lie_core import UnsupportedAlgebraError, alcove, build_algebra, diagram_automorphism
from .product_twist import ConstraintInfeasibleError, ProductSpace, ReducedPoint, SingularityError
from .projection import NonGenericError, ProjectionSystem, slice_observables
from .suites import SUITES
from .sutherland import SingularArgumentError, H_S_closed_form, integrate_reduced
from .ym_bridge import (
    field_energy,
    from_finite,
    jump_residual,
    slice_space,
    solve_slice,
    theta_pairing_check,
    to_finite,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_NON_GENERIC = 3


class CommandResult:
    def __init__(self, results: dict, exit_code: int = EXIT_OK, tables: dict | None = None, scripts=None):
        self.results = results
        self.exit_code = exit_code
        self.tables = tables or {}
        self.scripts = scripts or {}


def _setup(config: RunConfig):
    alg = build_algebra(config.family, config.rank)
    gamma = diagram_automorphism(alg, config.gamma)
    space = ProductSpace.build(alg, config.coupling(), gamma)
    return alg, gamma, space


def _initial_point(config: RunConfig, space: ProductSpace, rng) -> ReducedPoint:
    pt = space.random_reduced_point(rng, seeds=config.orbit_seeds, margin=config.margin, p_scale=config.p_scale)
    q = pt.q if config.initial_q is None else np.asarray(config.initial_q, dtype=float)
    p = pt.p if config.initial_p is None else np.asarray(config.initial_p, dtype=float)
    xi = np.zeros_like(pt.xi) if config.zero_spin else pt.xi
    if q.shape != pt.q.shape or p.shape != pt.p.shape:
        raise ConfigError(f"initial_q and initial_p need {space.alg.rank} entries")
    return ReducedPoint(q=space.check_q(q), p=space.check_p(p), xi=space.check_xi(xi))


# -- commands -----------------------------------------------------------------


def cmd_algebra(config: RunConfig, workers: int = 1) -> CommandResult:
    alg, gamma, space = _setup(config)
    alc = alcove(alg, gamma)
    info = alg.descriptor()
    info.update(
        {
            "dimension": alg.dim,
            "gamma_order": gamma.order,
            "gamma_permutation": list(map(int, gamma.permutation)),
            "fixed_rank": gamma.fixed_rank,
            "alcove_vertices": np.asarray(alc.vertices).tolist(),
            "couplings": list(space.lambdas),
            "weyl_constant": qs.weyl_constant(alg),
        }
    )
    return CommandResult(info)


def cmd_hamiltonian(config: RunConfig, workers: int = 1) -> CommandResult:
    rng = np.random.default_rng(config.seed)
    alg, gamma, space = _setup(config)
    pt = _initial_point(config, space, rng)
    values = {
        "operator_form": space.H_S_operator_form(pt.q, pt.p, pt.xi),
        "U_form": space.H_S_U_form(pt.q, pt.p, pt.xi),
        "closed_form": H_S_closed_form(space, pt.q, pt.p, pt.xi) if gamma.is_identity else None,
    }
    present = [v for v in values.values() if v is not None]
    deviation = max(present) - min(present)
    tol = config.tolerance("hamiltonian") * max(1.0, abs(present[0]))
    return CommandResult(
        {"values": values, "max_deviation": deviation, "tolerance": tol, "point": pt.to_dict(), "passed": deviation < tol},
        EXIT_OK if deviation < tol else EXIT_NUMERICAL,
    )


def _trajectory_rows(space, points, times):
    rows = []
    for t, pt in zip(times, points):
        energy = space.H_S_operator_form(pt.q, pt.p, pt.xi)
        rows.append([t, *pt.q, *pt.p, energy, *slice_observables(space, pt)[2 * space.alg.rank :]])
    return rows


def cmd_simulate(config: RunConfig, workers: int = 1) -> CommandResult:
    rng = np.random.default_rng(config.seed)
    alg, gamma, space = _setup(config)
    if alg.family != "A" or not gamma.is_identity:
        raise ConfigError("simulate requires su(n) with the trivial twist")
    system = ProjectionSystem.build(space)
    pt = _initial_point(config, space, rng)
    ref = integrate_reduced(space, pt, config.time_grid.points())
    times = ref.t
    truncated = ref.status != "ok"
    if truncated:
        # keep the projection on grid points strictly inside the guard band
        keep = [i for i in range(len(times)) if space.alcove.wall_distances(ref.q[i]).min() > 1e-3]
        times = times[keep]
        ref_points = [ref.point(i) for i in keep]
    else:
        ref_points = [ref.point(i) for i in range(len(times))]
    proj = system.trajectory(pt, times, dress=system.random_group_element(rng))
    deviation = max(
        (np.abs(slice_observables(space, a) - slice_observables(space, b)).max() for a, b in zip(proj, ref_points)),
        default=0.0,
    )
    energies = [space.H_S_operator_form(p.q, p.p, p.xi) for p in proj]
    drift = float(np.ptp(energies)) if energies else 0.0
    r = alg.rank
    header = (
        ["t"]
        + [f"q{j}" for j in range(r)]
        + [f"p{j}" for j in range(r)]
        + ["energy"]
        + [f"obs{j}" for j in range(len(slice_observables(space, pt)) - 2 * r)]
    )
    tables = {
        "projection.csv": (header, _trajectory_rows(space, proj, times)),
        "integrated.csv": (header, _trajectory_rows(space, ref_points, times)),
    }
    passed = deviation < config.tolerance("simulate") and drift < config.tolerance("energy_drift") * max(
        1.0, abs(energies[0]) if energies else 1.0
    )
    code = EXIT_NON_GENERIC if truncated else (EXIT_OK if passed else EXIT_NUMERICAL)
    script = "\n".join(
        [
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set xlabel 't'",
            "plot "
            + ", ".join(
                f"'projection.csv' using 1:{2 + j} with lines, 'integrated.csv' using 1:{2 + j} with points"
                for j in range(r)
            ),
            "",
        ]
    )
    return CommandResult(
        {
            "status": ref.status,
            "truncated": truncated,
            "samples": len(times),
            "max_observable_deviation": deviation,
            "energy_drift": drift,
            "passed": passed and not truncated,
        },
        code,
        tables,
        {"simulate.gp": script},
    )


def _run_suite(name, config):
    tol = config.tolerance("verify")
    try:
        return SUITES[name](config, tol).to_dict()
    except NotImplementedError as exc:
        return {"name": name, "passed": True, "skipped": str(exc), "tolerance": tol, "residuals": {}}


def cmd_verify(config: RunConfig, workers: int = 1) -> CommandResult:
    names = list(SUITES) if config.suite == "all" else [config.suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite {unknown[0]!r}; choose from {sorted(SUITES)} or 'all'")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(lambda n: _run_suite(n, config), names))
    passed = all(r["passed"] for r in reports)
    return CommandResult({"suites": reports, "passed": passed}, EXIT_OK if passed else EXIT_NUMERICAL)


def cmd_ym(config: RunConfig, workers: int = 1) -> CommandResult:
    rng = np.random.default_rng(config.seed)
    alg = build_algebra(config.family, config.rank)
    gamma = diagram_automorphism(alg, config.gamma)
    if config.marks is not None:
        marks = np.asarray(config.marks, dtype=float)
    else:
        inv = 1.0 / np.asarray(config.coupling().lambdas)
        marks = np.cumsum(inv) - inv[0] / 2
    space = slice_space(alg, marks, gamma)
    pt = _initial_point(config, space, rng)
    cfg = solve_slice(alg, pt.q, marks, pt.xi * space.lambdas[:, None], pt.p, gamma)
    sp, q, J, xi = to_finite(alg, cfg, gamma)
    back = from_finite(sp, q, J, xi, marks[0])
    round_trip = max(
        np.abs(back.marks - cfg.marks).max(),
        np.abs(back.charges - cfg.charges).max(),
        np.abs(back.plus_limits - cfg.plus_limits).max(),
        np.abs(back.chi - cfg.chi).max(),
    )
    e_field, e_finite = field_energy(cfg), sp.norm2(J)
    residuals = {
        "round_trip": float(round_trip),
        "jump": jump_residual(alg, cfg, gamma),
        "energy": abs(e_field - e_finite),
        "theta_pairing": theta_pairing_check(alg, cfg, pt.p, gamma),
    }
    tol = config.tolerance("ym")
    passed = all(v < tol * max(1.0, e_finite) for v in residuals.values())
    return CommandResult(
        {"residuals": residuals, "field_energy": e_field, "finite_energy": e_finite, "field": cfg.to_dict(), "passed": passed},
        EXIT_OK if passed else EXIT_NUMERICAL,
    )


def cmd_spectrum(config: RunConfig, workers: int = 1) -> CommandResult:
    alg = build_algebra(config.family, config.rank)
    gamma = diagram_automorphism(alg, config.gamma)
    lambdas = config.coupling().lambdas
    nus = config.spin_weights or [(0,) * alg.rank] * len(lambdas)
    levels = qs.enumerate_levels(alg, gamma, lambdas, nus, config.energy_cutoff)
    rows = [[lv.energy, lv.multiplicity, " ".join("-".join(map(str, w)) for w in lv.weights)] for lv in levels]
    return CommandResult(
        {
            "weyl_constant": qs.weyl_constant(alg),
            "levels": [{"energy": lv.energy, "multiplicity": lv.multiplicity, "weights": lv.weights} for lv in levels],
        },
        tables={"levels.csv": (["energy", "multiplicity", "weights"], rows)},
    )


COMMANDS = {
    "algebra": cmd_algebra,
    "hamiltonian": cmd_hamiltonian,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "ym": cmd_ym,
    "spectrum": cmd_spectrum,
}


# -- I/O ----------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistred", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("suite", nargs="?", default=None, help="suite name or 'all'")
        p.add_argument("--config", required=name != "spectrum" and name != "verify", help="JSON configuration file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=1, help="bound on parallel workers")
        p.add_argument("--set", action="append", default=[], metavar="KEY=JSON", help="override a config field")
    return parser


def _load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {args.config}: {exc}") from exc
    if not args.config:
        data["lambdas"] = [1.0]
    for item in args.set:
        key, _, value = item.partition("=")
        try:
            data[key] = json.loads(value)
        except json.JSONDecodeError:
            data[key] = value
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    if getattr(args, "suite", None):
        data["suite"] = args.suite
    return RunConfig.from_dict(data)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    meta = {"schema_version": SCHEMA_VERSION, "command": args.command, "version": __version__}
    config = None
    try:
        config = _load_config(args)
        meta["seed"] = config.seed
        meta["config"] = config.to_dict()
        result = COMMANDS[args.command](config, workers=args.workers)
    except (SingularityError, NonGenericError, SingularArgumentError, ConstraintInfeasibleError) as exc:
        result = CommandResult({"error": str(exc), "kind": "non_generic"}, EXIT_NON_GENERIC)
    except (ConfigError, UnsupportedAlgebraError, ValueError) as exc:
        result = CommandResult({"error": str(exc), "kind": "validation"}, EXIT_VALIDATION)
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        result = CommandResult({"error": str(exc), "kind": "numerical"}, EXIT_NUMERICAL)
    report = _jsonable({**meta, "exit_code": result.exit_code, "results": result.results})
    text = json.dumps(report, indent=2, sort_keys=True)
    stdout.write(text + "\n")
    out = config.output_dir if config is not None else args.out
    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{args.command}.json").write_text(text + "\n")
        for fname, (header, rows) in result.tables.items():
            _write_csv(outdir / fname, header, rows)
        for fname, body in result.scripts.items():
            (outdir / fname).write_text(body)
    return result.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
