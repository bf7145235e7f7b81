"""Command-line interface: optimize, simulate, certify.

Each command loads a scenario config (JSON), runs the requested pipeline,
and writes a report.json plus delimited data files (and figures, unless
--no-figures) into the output directory.  Exit status: 0 on success, 1 on
usage or configuration errors, 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .baselines import backstepping_kernel, fourier_coefficients, uncontrolled_exact
from .errors import BlowUpError, KernelOptError
from .model import Decision, ScenarioSpec, Theta, kernel_eval, scenario_from_dict
from .objective import char_function
from .optimizer import OptimizerConfig, optimize
from .reports import RunReport, write_matrix_csv, write_table_csv
from .solvers import solve_state
from .spectral import certify, eigenvalues, find_roots

CHARFUN_SPAN = 12.0 * np.pi
CHARFUN_SAMPLES = 1201
KERNEL_SAMPLES = 200
EXACT_MODES = 50


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kernelopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", action="append", required=True,
                       help="scenario config JSON (repeatable for optimize)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--n", type=int, help="override spatial intervals")
        p.add_argument("--m", type=int, help="override temporal intervals")
        p.add_argument("--T", type=float, help="override time horizon")
        p.add_argument("--epsilon", type=float, help="override stability margin")
        p.add_argument("--span-N", type=int, default=14, dest="span_n",
                       help="mode count for the span check")
        p.add_argument("--span-threshold", type=float, default=1e-3,
                       help="span residual threshold for the certificate")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")

    p_opt = sub.add_parser("optimize", help="run the kernel optimization and certify")
    common(p_opt)
    p_opt.add_argument("--max-iters", type=int, default=500)
    p_opt.add_argument("--parallel", type=int, default=0, metavar="WORKERS",
                       help="run multiple configs concurrently")

    p_sim = sub.add_parser("simulate", help="forward-solve at fixed kernel coefficients")
    common(p_sim)
    p_sim.add_argument("--theta1", type=float, default=0.0)
    p_sim.add_argument("--theta2", type=float, default=0.0)

    p_cert = sub.add_parser("certify", help="stand-alone stability certificate")
    common(p_cert)
    p_cert.add_argument("--theta1", type=float, required=True)
    p_cert.add_argument("--theta2", type=float, required=True)
    p_cert.add_argument("--alpha", type=float, default=None,
                        help="candidate smallest root (default: the computed one)")
    p_cert.add_argument("--alpha-tol", type=float, default=None,
                        help="absolute tolerance for the smallest-root check")
    p_cert.add_argument("--feasibility-tol", type=float, default=1e-5)
    return parser


def load_scenario(path: str | Path, args) -> ScenarioSpec:
    """Read a config file and apply command-line overrides."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"config {path} must contain a JSON object")
    for key in ("n", "m", "T", "epsilon"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    return scenario_from_dict(doc, name=path.stem)


def _write_state_artifacts(report, out_dir, spec, state, figures):
    from . import plots

    grid = spec.grid
    state_path = out_dir / "state.csv"
    write_matrix_csv(state_path, state.y.values)
    report.artifacts["state_csv"] = str(state_path)
    control_path = out_dir / "control.csv"
    t = grid.t_nodes()
    write_table_csv(control_path, ["t", "u"], zip(t.tolist(), state.u.tolist()))
    report.artifacts["control_csv"] = str(control_path)
    if figures:
        p = out_dir / "state.png"
        plots.save_state_surface(state.y.values, grid.x_nodes(), t, p,
                                 f"{spec.name}: closed-loop response")
        report.artifacts["state_png"] = str(p)
        p = out_dir / "control.png"
        plots.save_control_curve(t, state.u, p)
        report.artifacts["control_png"] = str(p)


def _write_charfun_artifacts(report, out_dir, theta, roots, figures):
    from . import plots

    alphas = np.linspace(0.0, CHARFUN_SPAN, CHARFUN_SAMPLES)
    values = char_function(theta, alphas)
    path = out_dir / "charfun.csv"
    write_table_csv(path, ["alpha", "g3"], zip(alphas.tolist(), values.tolist()))
    report.artifacts["charfun_csv"] = str(path)
    if figures:
        p = out_dir / "charfun.png"
        plots.save_charfun_curve(alphas, values, roots, p)
        report.artifacts["charfun_png"] = str(p)


def run_optimize(spec: ScenarioSpec, out_dir: Path, *, span_n=14, span_threshold=1e-3,
                 max_iters=500, figures=True) -> RunReport:
    from . import plots

    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(scenario=spec.name, command="optimize", timing_seconds=0.0)
    start = time.perf_counter()
    config = OptimizerConfig(max_iters=max_iters, span_modes=span_n,
                             span_threshold=span_threshold)
    result = optimize(spec, config)
    theta = result.decision.theta
    state = solve_state(spec, theta)
    report.timing_seconds = time.perf_counter() - start

    history_path = out_dir / "history.csv"
    write_table_csv(
        history_path,
        ["iteration", "theta1", "theta2", "alpha", "cost", "violation", "step"],
        (
            (r.iteration, r.decision.theta.theta1, r.decision.theta.theta2,
             r.decision.alpha, r.cost, r.constraint_violation, r.step_length)
            for r in result.history
        ),
    )
    report.artifacts["history_csv"] = str(history_path)

    _write_state_artifacts(report, out_dir, spec, state, figures)

    xi = np.linspace(0.0, 1.0, KERNEL_SAMPLES)
    k_opt = kernel_eval(theta, xi)
    k_back = np.array([backstepping_kernel(spec.c, v) for v in xi])
    kernel_path = out_dir / "kernel.csv"
    write_table_csv(kernel_path, ["xi", "k_optimized", "k_backstepping"],
                    zip(xi.tolist(), k_opt.tolist(), k_back.tolist()))
    report.artifacts["kernel_csv"] = str(kernel_path)

    _write_charfun_artifacts(report, out_dir, theta, result.spectral.roots.roots, figures)

    if figures:
        p = out_dir / "kernel.png"
        plots.save_kernel_curves(xi, k_opt, k_back, p)
        report.artifacts["kernel_png"] = str(p)
        if result.history:
            p = out_dir / "history.png"
            plots.save_history_curves(
                np.array([r.iteration for r in result.history]),
                np.array([r.cost for r in result.history]),
                np.array([r.constraint_violation for r in result.history]),
                p,
            )
            report.artifacts["history_png"] = str(p)

    report.payload = {
        "decision": {
            "theta1": theta.theta1,
            "theta2": theta.theta2,
            "alpha": result.decision.alpha,
        },
        "cost": {
            "state_term": result.cost_breakdown.state_term,
            "kernel_term": result.cost_breakdown.kernel_term,
            "total": result.cost_breakdown.total,
        },
        "history_summary": {
            "iterations": result.iterations,
            "converged": result.converged,
            "message": result.message,
            "constraint_violation": result.constraint_violation,
            "projected_gradient_norm": result.projected_gradient_norm,
        },
        "spectral": result.spectral.to_dict(),
    }
    report.write(out_dir / "report.json")
    return report


def run_simulate(spec: ScenarioSpec, theta: Theta, out_dir: Path, *, figures=True) -> RunReport:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(scenario=spec.name, command="simulate", timing_seconds=0.0)
    start = time.perf_counter()
    state = solve_state(spec, theta)
    report.timing_seconds = time.perf_counter() - start
    _write_state_artifacts(report, out_dir, spec, state, figures)
    report.payload = {
        "decision": {"theta1": theta.theta1, "theta2": theta.theta2},
        "max_abs_state": float(np.abs(state.y.values).max()),
        "max_abs_control": float(np.abs(state.u).max()),
    }

    if theta.theta1 == 0.0 and theta.theta2 == 0.0:
        fi = fourier_coefficients(spec.y0, EXACT_MODES, 4096)
        exact = uncontrolled_exact(fi, spec.c, spec.grid)
        exact_path = out_dir / "exact.csv"
        write_matrix_csv(exact_path, exact.values)
        report.artifacts["exact_csv"] = str(exact_path)
        discrepancy = float(np.abs(state.y.values - exact.values).max())
        report.payload["exact_discrepancy_max_norm"] = discrepancy

    report.write(out_dir / "report.json")
    return report


def run_certify(spec: ScenarioSpec, theta: Theta, alpha: float | None, out_dir: Path, *,
                span_n=14, span_threshold=1e-3, alpha_tol=None,
                feasibility_tol=1e-5, figures=True) -> RunReport:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(scenario=spec.name, command="certify", timing_seconds=0.0)
    start = time.perf_counter()
    if alpha is None:
        alpha = float(find_roots(theta, 1).roots[0])
    decision = Decision(theta, alpha)
    spectral = certify(spec, decision, span_threshold=span_threshold,
                       mode_count=span_n, alpha_match_tol=alpha_tol,
                       feasibility_tol=feasibility_tol)
    report.timing_seconds = time.perf_counter() - start

    roots = spectral.roots.roots
    sigma = eigenvalues(spectral.roots, spec.c)
    roots_path = out_dir / "roots.csv"
    write_table_csv(
        roots_path,
        ["n", "alpha", "alpha_over_pi", "sigma", "Y", "residual"],
        (
            (i + 1, float(roots[i]), float(roots[i] / np.pi), float(sigma[i]),
             float(spectral.span_coefficients[i]), float(spectral.roots.residuals[i]))
            for i in range(roots.size)
        ),
    )
    report.artifacts["roots_csv"] = str(roots_path)
    _write_charfun_artifacts(report, out_dir, theta, roots, figures)

    report.payload = {
        "decision": {"theta1": theta.theta1, "theta2": theta.theta2, "alpha": alpha},
        "spectral": spectral.to_dict(),
    }
    report.write(out_dir / "report.json")
    return report


def _optimize_worker(config_path: str, out_dir: str, overrides: dict, options: dict) -> str:
    args = argparse.Namespace(**overrides)
    spec = load_scenario(config_path, args)
    run_optimize(spec, Path(out_dir), **options)
    return spec.name


def _write_error_report(out_dir: Path, scenario: str, command: str, exc: Exception) -> None:
    doc = {
        "scenario": scenario,
        "command": command,
        "error": str(exc),
        "error_type": type(exc).__name__,
    }
    if isinstance(exc, BlowUpError):
        doc["time_index"] = exc.time_index
        doc["quantity"] = exc.quantity
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "report.json", "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError:
        pass


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    overrides = {k: getattr(args, k) for k in ("n", "m", "T", "epsilon")}
    figures = not args.no_figures
    out_root = Path(args.out)

    try:
        if args.command == "optimize":
            configs = args.config
            options = dict(span_n=args.span_n, span_threshold=args.span_threshold,
                           max_iters=args.max_iters, figures=figures)
            if len(configs) > 1:
                jobs = []
                for cfg_path in configs:
                    sub = out_root / Path(cfg_path).stem
                    jobs.append((cfg_path, str(sub), overrides, options))
                if args.parallel > 1:
                    with ProcessPoolExecutor(max_workers=args.parallel) as pool:
                        names = list(pool.map(_optimize_worker, *zip(*jobs)))
                else:
                    names = [_optimize_worker(*job) for job in jobs]
                for name in names:
                    print(f"optimized {name}")
                return 0
            spec = load_scenario(configs[0], args)
            scenario, command, out_dir = spec.name, "optimize", out_root
            report = run_optimize(spec, out_dir, **options)
            summary = report.payload["history_summary"]
            print(f"{spec.name}: cost {report.payload['cost']['total']:.6g}, "
                  f"stable {report.payload['spectral']['stable']}, "
                  f"converged {summary['converged']} ({summary['iterations']} iterations)")
            return 0

        spec = load_scenario(args.config[0], args)
        scenario, command, out_dir = spec.name, args.command, out_root
        if args.command == "simulate":
            report = run_simulate(spec, Theta(args.theta1, args.theta2), out_dir,
                                  figures=figures)
            msg = f"{spec.name}: simulated, max |y| = {report.payload['max_abs_state']:.6g}"
            if "exact_discrepancy_max_norm" in report.payload:
                msg += f", discrepancy vs exact = {report.payload['exact_discrepancy_max_norm']:.6g}"
            print(msg)
            return 0

        report = run_certify(spec, Theta(args.theta1, args.theta2), args.alpha, out_dir,
                             span_n=args.span_n, span_threshold=args.span_threshold,
                             alpha_tol=args.alpha_tol,
                             feasibility_tol=args.feasibility_tol, figures=figures)
        spectral = report.payload["spectral"]
        print(f"{spec.name}: stable {spectral['stable']}, "
              f"J = {spectral['span_residual_J']:.6g}, reasons {spectral['reasons']}")
        return 0

    except KernelOptError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        try:
            _write_error_report(out_dir, scenario, command, exc)
        except NameError:
            pass
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
