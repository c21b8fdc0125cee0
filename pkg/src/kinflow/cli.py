"""Batch front end: ``describe``, ``check-stability`` and ``run``.

Exit codes: 0 success, 1 configuration or stability rejection,
2 solver non-convergence during a run.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from kinflow import __version__
from kinflow.config import Config, config_hash, dump_config, help_text, parse_config
from kinflow.errors import ConfigurationError, ConvergenceError, StabilityError
from kinflow.euler import (
    euler_density,
    euler_impulse,
    euler_velocity,
    step_budget,
    unit_velocity_field,
    vorticity,
)
from kinflow.grid import build_space_grid, build_time_grid, build_velocity_grid
from kinflow.scenario import (
    CollisionParams,
    collision_boundary,
    constant_boundary,
    empty_initial,
    uniform_initial,
)
from kinflow.scheme import zero_boundary
from kinflow.solver import (
    KineticProblem,
    SolverSettings,
    nor_bound,
    optimal_s,
    run_simulation,
    worst_node,
)

EXIT_OK, EXIT_REJECTED, EXIT_DIVERGED = 0, 1, 2


def fmt(x) -> str:
    return "%.17g" % x


def build_problem(cfg: Config) -> tuple[KineticProblem, np.ndarray]:
    sg = build_space_grid(cfg.L1, cfg.L2, cfg.M1, cfg.M2)
    vg = build_velocity_grid(cfg.ah1, cfg.ah2, cfg.MR1, cfg.PR1, cfg.MR2, cfg.PR2)
    tg = build_time_grid(cfg.T, cfg.N)
    if cfg.scenario == "collision":
        params = CollisionParams(
            ramp_rate=cfg.ramp_rate,
            base_height=cfg.base_height,
            band_mode=cfg.band_mode,
            sides_enabled=tuple(c in cfg.sides for c in "LRBT"),
        )
        bd = collision_boundary(params, sg, vg)
        u0 = empty_initial(sg, vg)
    elif cfg.scenario == "uniform":
        bd = constant_boundary(sg, vg, cfg.uniform_value)
        u0 = uniform_initial(sg, vg, cfg.uniform_value)
    else:
        bd = zero_boundary(sg, vg)
        u0 = empty_initial(sg, vg)
    workers = cfg.threads or os.cpu_count() or 1
    return KineticProblem(sg, vg, tg, cfg.nu, cfg.kappa, bd, workers=workers), u0


def settings_from(cfg: Config) -> SolverSettings:
    return SolverSettings(
        s=cfg.s,
        tol_linear=cfg.tol_linear,
        max_linear_iters=cfg.max_linear_iters,
        tol_picard=cfg.tol_picard,
        max_picard_iters=cfg.max_picard_iters,
    )


def stability_lines(problem: KineticProblem) -> list[str]:
    c = problem.coeffs
    nor = nor_bound(c)
    l1, l2 = worst_node(c)
    node = c.at(l1, l2)
    return [
        f"NOR = {nor:.10g}",
        f"s_opt = {optimal_s(c):.10g}",
        f"d = {c.d:.10g}",
        f"d1 = {c.d1:.10g}",
        f"lambda1 = {c.lambda1:.10g}",
        f"lambda2 = {c.lambda2:.10g}",
        f"mu1 = {c.mu1:.10g}",
        f"mu2 = {c.mu2:.10g}",
        f"worst_l = ({l1}, {l2})",
        f"worst_coefficients = a1 {node.a1:.10g}, b1 {node.b1:.10g}, "
        f"a2 {node.a2:.10g}, b2 {node.b2:.10g}",
    ]


def cmd_describe(cfg: Config) -> int:
    problem, _ = build_problem(cfg)
    sg, vg, tg = problem.sg, problem.vg, problem.tg
    print(dump_config(cfg), end="")
    print("# derived")
    print(f"h1 = {sg.h1:.10g}")
    print(f"h2 = {sg.h2:.10g}")
    print(f"tau = {tg.tau:.10g}")
    print(f"velocity_nodes = {vg.n1} x {vg.n2} (q+1 = {vg.q + 1})")
    print(f"velocity_rectangle = [{vg.D1:g}, {vg.G1:g}] x [{vg.D2:g}, {vg.G2:g}]")
    print(f"unknowns = {sg.M1 * sg.M2 * (vg.q + 1)}")
    for line in stability_lines(problem):
        print(line)
    print(f"config_sha256 = {config_hash(cfg)}")
    return EXIT_OK


def cmd_check_stability(cfg: Config) -> int:
    problem, _ = build_problem(cfg)
    for line in stability_lines(problem):
        print(line)
    if nor_bound(problem.coeffs) < 1.0:
        print("stable: NOR < 1")
        return EXIT_OK
    print(f"UNSTABLE: NOR >= 1 at velocity node l = {worst_node(problem.coeffs)}")
    return EXIT_REJECTED


class Recorder:
    """Collects per-step diagnostics and writes snapshot files."""

    def __init__(self, cfg: Config, problem: KineticProblem, out: Path):
        self.cfg = cfg
        self.problem = problem
        self.out = out
        self.snapshots = set(cfg.snapshots) if cfg.snapshots else {cfg.N}
        self.files: list[str] = []
        self.budget_rows: list[str] = []
        self.report_rows: list[str] = []
        self.prev: np.ndarray | None = None

    def __call__(self, n: int, u: np.ndarray, report) -> None:
        p = self.problem
        tau = p.tg.tau
        if n > 0:
            b = step_budget(self.prev, u, n - 1, p.boundary, p.sg, p.vg, p.weights, p.kappa, p.nu, tau)
            self.budget_rows.append(
                ",".join([str(n), fmt(n * tau)] + [fmt(x) for x in (b.mass, b.dm_dt, b.impulse_flux, b.diffusive_flux, b.residual)])
            )
            self.report_rows.append(
                ",".join(
                    [str(n), fmt(n * tau), str(report.picard_iters), str(report.linear_iters_total)]
                    + [fmt(report.final_picard_delta), fmt(report.final_linear_residual), fmt(report.nor)]
                )
            )
            print(f"step {n}/{p.tg.N} picard {report.picard_iters} mass {b.mass:.6e}", flush=True)
        self.prev = u
        if n in self.snapshots:
            self.write_snapshot(n, u)

    def _write(self, name: str, header: str, rows) -> None:
        with open(self.out / name, "w", newline="\n") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        if name not in self.files:
            self.files.append(name)

    def write_snapshot(self, n: int, u: np.ndarray) -> None:
        p = self.problem
        sg = p.sg
        rho = euler_density(u, p.weights, p.kappa)
        imp = euler_impulse(u, p.vg, p.weights, p.kappa)
        v, defined = euler_velocity(imp, rho, self.cfg.eps_div)
        unit, unit_ok = unit_velocity_field(v, defined, self.cfg.eps_div)
        omega, omega_ok = vorticity(v, defined, sg)
        x1, x2 = sg.x1, sg.x2
        idx = [(k1, k2) for k1 in range(sg.M1) for k2 in range(sg.M2)]
        self._write(
            f"euler_{n}.csv",
            "k1,k2,x1,x2,rho,p1,p2,v1,v2,defined",
            (
                ",".join(
                    [str(k1), str(k2), fmt(x1[k1]), fmt(x2[k2]), fmt(rho[k1, k2]),
                     fmt(imp[k1, k2, 0]), fmt(imp[k1, k2, 1]), fmt(v[k1, k2, 0]),
                     fmt(v[k1, k2, 1]), str(int(defined[k1, k2]))]
                )
                for k1, k2 in idx
            ),
        )
        self._write(
            f"unitvec_{n}.csv",
            "x1,x2,u1,u2",
            (
                ",".join([fmt(x1[k1]), fmt(x2[k2]), fmt(unit[k1, k2, 0]), fmt(unit[k1, k2, 1])])
                for k1, k2 in idx
                if unit_ok[k1, k2]
            ),
        )
        self._write(
            f"vorticity_{n}.csv",
            "k1,k2,x1,x2,omega,defined",
            (
                ",".join([str(k1), str(k2), fmt(x1[k1]), fmt(x2[k2]), fmt(omega[k1, k2]), str(int(omega_ok[k1, k2]))])
                for k1, k2 in idx
            ),
        )

    def finish(self, complete: bool) -> None:
        self._write(
            "massbudget.csv",
            "step,t,mass,dm_dt,impulse_flux,diffusive_flux,residual",
            self.budget_rows,
        )
        self._write(
            "report.csv",
            "step,t,picard_iters,linear_iters_total,final_picard_delta,final_linear_residual,nor",
            self.report_rows,
        )
        (self.out / "config.txt").write_text(dump_config(self.cfg, include_runtime=False))
        if "config.txt" not in self.files:
            self.files.append("config.txt")
        lines = [
            f"version = {__version__}",
            f"config_sha256 = {config_hash(self.cfg)}",
            f"complete = {'true' if complete else 'false'}",
            f"steps_done = {len(self.report_rows)}",
        ]
        lines += [f"file = {name}" for name in sorted(self.files)]
        (self.out / "MANIFEST").write_text("\n".join(lines) + "\n")


def cmd_run(cfg: Config) -> int:
    problem, u0 = build_problem(cfg)
    nor = nor_bound(problem.coeffs)
    if not nor < 1.0:
        print(
            f"refusing to run: NOR = {nor:.6g} >= 1 at velocity node l = {worst_node(problem.coeffs)}",
            file=sys.stderr,
        )
        return EXIT_REJECTED
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    rec = Recorder(cfg, problem, out)
    try:
        run_simulation(problem, u0, settings_from(cfg), observers=[rec])
    except ConvergenceError as err:
        rec.finish(complete=False)
        print(f"solver failed: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    rec.finish(complete=True)
    return EXIT_OK


COMMANDS = {"describe": cmd_describe, "check-stability": cmd_check_stability, "run": cmd_run}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinflow",
        description="Kinetic turbulence model simulator (2D space x 2D velocity).",
        epilog="config keys (key = value, '#' comments):\n" + help_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="config file (omit for all defaults)")
    parser.add_argument("--output", help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, help="mixer worker threads, 0 = all (overrides config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text)
        if args.output is not None:
            cfg.output = args.output
        if args.threads is not None:
            if args.threads < 0:
                raise ConfigurationError("threads: must be ≥ 0")
            cfg.threads = args.threads
    except (ConfigurationError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_REJECTED
    try:
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, StabilityError) as err:
        print(f"rejected: {err}", file=sys.stderr)
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
