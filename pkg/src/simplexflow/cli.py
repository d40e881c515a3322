"""Batch command-line front end.

Every run resolves its configuration from defaults, an optional JSON
config file (--config), and explicit flags (highest precedence), embeds
the resolved config in the output for reproducibility, and writes JSON or
CSV to --out or stdout.  Exit codes: 0 success, 1 validation error,
2 numerical failure.
"""

import argparse
import csv
import io
import json
import os
import sys

from . import _backend
from .dynamics import FlowConfig, flow
from .energy import energy_report, euler_lagrange_residual
from .geometry import make_unit_simplex
from .kernel import PowerLawParams
from .measure import DiscreteMeasure
from .minimize import MinimizeConfig, energy_of_candidates, minimize_global
from .transport import wasserstein_inf, wasserstein_p
from .verify import (
    PerturbationConfig,
    gamma_convergence_experiment,
    isodiametric_sweep,
    jung_report,
    local_min_perturbation_test,
    scan_local_threshold,
    vertex_potential_argmin,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


class CLIError(Exception):
    """Configuration or input problem; maps to exit code 1."""


class NumericalFailure(Exception):
    """Run-level numerical breakdown; maps to exit code 2."""


# command -> {key: (type, default)}; None default means required
SCHEMAS = {
    "energy": {
        "measure": (str, None),
        "alpha": (float, None),
        "beta": (float, None),
        "hard": (bool, False),
        "seed": (int, 0),
    },
    "flow": {
        "measure": (str, None),
        "alpha": (float, None),
        "beta": (float, None),
        "dt": (float, 0.1),
        "t_max": (float, 200.0),
        "integrator": (str, "rk4"),
        "adapt": (bool, True),
        "grad_tol": (float, 1e-8),
        "record_every": (int, 10),
        "seed": (int, 0),
    },
    "minimize": {
        "n": (int, None),
        "alpha": (float, None),
        "beta": (float, None),
        "atoms": (int, None),
        "restarts": (int, 8),
        "init_radius": (float, -1.0),  # -1: use the zero radius of the profile
        "cluster_tol": (float, 0.02),
        "polish_iters": (int, 40),
        "seed": (int, 0),
    },
    "metric": {
        "p": (str, None),  # "1", "2", or "inf"
        "a": (str, None),
        "b": (str, None),
        "seed": (int, 0),
    },
    "verify-variance": {
        "n": (int, None),
        "clouds": (int, 1000),
        "seed": (int, 0),
    },
    "verify-vertex-potential": {
        "beta": (float, None),
        "n": (int, None),
        "grid_h": (float, 0.01),
        "seed": (int, 0),
    },
    "verify-local-min": {
        "beta": (float, None),
        "alpha": (float, None),
        "masses": (str, None),  # comma-separated
        "n": (int, None),
        "radius": (float, 1e-2),
        "trials": (int, 1000),
        "split_factor": (int, 2),
        "seed": (int, 0),
    },
    "verify-jung": {
        "n_max": (int, 6),
        "samples": (int, 200),
        "seed": (int, 0),
    },
    "verify-gamma": {
        "beta": (float, None),
        "alphas": (str, None),  # comma-separated
        "n": (int, None),
        "atoms": (int, 40),
        "restarts": (int, 6),
        "seed": (int, 0),
    },
    "scan-threshold": {
        "masses": (str, None),
        "n": (int, None),
        "bracket_tol": (float, 0.25),
        "beta": (float, 2.0),
        "radius": (float, 0.05),
        "seed": (int, 0),
    },
    "candidates": {
        "n": (int, None),
        "alpha": (float, None),
        "beta": (float, None),
        "sphere_atoms": (int, 720),
        "seed": (int, 0),
    },
}

CSV_COMMANDS = {"flow", "verify-gamma", "candidates", "scan-threshold"}


def _parse_masses(text):
    try:
        masses = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise CLIError(f"cannot parse mass list {text!r}: {exc}")
    if not masses:
        raise CLIError("empty mass list")
    return masses


def _load_measure(path):
    if not os.path.exists(path):
        raise CLIError(f"measure file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            return DiscreteMeasure.from_dict(json.load(fh))
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise CLIError(f"invalid measure file {path}: {exc}")


def _resolve_config(command, flag_values, config_path):
    schema = SCHEMAS[command]
    resolved = {k: default for k, (_t, default) in schema.items()}
    if config_path is not None:
        if not os.path.exists(config_path):
            raise CLIError(f"config file not found: {config_path}")
        with open(config_path, encoding="utf-8") as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise CLIError(f"config file is not valid JSON: {exc}")
        if not isinstance(file_cfg, dict):
            raise CLIError("config file must hold a JSON object")
        unknown = sorted(set(file_cfg) - set(schema))
        if unknown:
            raise CLIError(f"unknown config keys for {command}: {unknown}")
        for key, value in file_cfg.items():
            typ, _default = schema[key]
            if isinstance(value, bool) and typ is not bool:
                raise CLIError(f"config key {key!r}: expected {typ.__name__}, got a boolean")
            try:
                resolved[key] = typ(value)
            except (TypeError, ValueError) as exc:
                raise CLIError(f"config key {key!r}: {exc}")
    for key, value in flag_values.items():
        if key in schema and value is not None:
            resolved[key] = value
    missing = [k for k, v in resolved.items() if v is None]
    if missing:
        raise CLIError(f"missing required options for {command}: {sorted(missing)}")
    return resolved


def _params_from(cfg):
    try:
        if cfg.get("hard"):
            return PowerLawParams.hard_confinement(cfg["beta"])
        return PowerLawParams(cfg["alpha"], cfg["beta"])
    except ValueError as exc:
        raise CLIError(str(exc))


def _run_energy(cfg, threads):
    mu = _load_measure(cfg["measure"])
    params = _params_from(cfg)
    report = energy_report(mu, params, threads)
    result = report.to_dict()
    if not params.hard:
        el = euler_lagrange_residual(mu, params, threads=threads)
        result["el_spread"] = el.spread
        result["el_deficit"] = el.deficit
        result["probe_violations"] = el.probe_violations
    return result, EXIT_OK


def _run_flow(cfg, threads):
    mu = _load_measure(cfg["measure"])
    params = _params_from(cfg)
    try:
        fc = FlowConfig(
            dt_init=cfg["dt"],
            t_max=cfg["t_max"],
            integrator=cfg["integrator"],
            adapt=cfg["adapt"],
            grad_tol=cfg["grad_tol"],
            record_every=cfg["record_every"],
        )
        trace = flow(mu, params, fc, seed=cfg["seed"], threads=threads)
    except ValueError as exc:
        raise CLIError(str(exc))
    code = EXIT_NUMERICAL if trace.terminated_by == "step_failure" else EXIT_OK
    return trace.to_dict(), code


def _run_minimize(cfg, threads):
    params = _params_from(cfg)
    try:
        mc = MinimizeConfig(
            n=cfg["n"],
            atoms=cfg["atoms"],
            restarts=cfg["restarts"],
            init_radius=None if cfg["init_radius"] < 0 else cfg["init_radius"],
            cluster_tol=cfg["cluster_tol"],
            polish_iters=cfg["polish_iters"],
            seed=cfg["seed"],
        )
    except ValueError as exc:
        raise CLIError(str(exc))
    try:
        report = minimize_global(params, mc, threads=threads)
    except ValueError as exc:
        raise CLIError(str(exc))
    except RuntimeError as exc:
        raise NumericalFailure(str(exc))
    return report.to_dict(), EXIT_OK


def _run_metric(cfg, threads):
    mu = _load_measure(cfg["a"])
    nu = _load_measure(cfg["b"])
    p = str(cfg["p"]).lower()
    try:
        if p == "inf":
            dist, plan = wasserstein_inf(mu, nu)
        elif p in ("1", "2"):
            dist, plan = wasserstein_p(mu, nu, int(p))
        else:
            raise CLIError(f"p must be 1, 2, or inf, got {cfg['p']!r}")
    except ValueError as exc:
        raise CLIError(str(exc))
    return {"p": p, "distance": dist, "plan": plan.to_dict()}, EXIT_OK


def _run_verify_variance(cfg, threads):
    rep = isodiametric_sweep(cfg["n"], cfg["clouds"], seed=cfg["seed"])
    return rep.to_dict(), EXIT_OK


def _run_verify_vertex_potential(cfg, threads):
    try:
        rep = vertex_potential_argmin(cfg["beta"], cfg["n"], cfg["grid_h"])
    except ValueError as exc:
        raise CLIError(str(exc))
    return rep.to_dict(), EXIT_OK


def _run_verify_local_min(cfg, threads):
    masses = _parse_masses(cfg["masses"])
    n = cfg["n"]
    if len(masses) != n + 1:
        raise CLIError(f"need n+1 = {n + 1} masses, got {len(masses)}")
    try:
        spec = make_unit_simplex(n, centered=True)
        mu_hat = DiscreteMeasure(spec.vertices, sorted(masses))
        params = PowerLawParams(cfg["alpha"], cfg["beta"])
        pc = PerturbationConfig(
            radius=cfg["radius"],
            trials=cfg["trials"],
            split_factor=cfg["split_factor"],
            seed=cfg["seed"],
        )
        rep = local_min_perturbation_test(mu_hat, params, pc, threads=threads)
    except ValueError as exc:
        raise CLIError(str(exc))
    return rep.to_dict(), EXIT_OK


def _run_verify_jung(cfg, threads):
    rep = jung_report(cfg["n_max"], samples=cfg["samples"], seed=cfg["seed"])
    return rep.to_dict(), EXIT_OK


def _run_verify_gamma(cfg, threads):
    alphas = _parse_masses(cfg["alphas"])  # same comma-list parsing
    try:
        mc = MinimizeConfig(
            n=cfg["n"], atoms=cfg["atoms"], restarts=cfg["restarts"], seed=cfg["seed"]
        )
        rep = gamma_convergence_experiment(cfg["beta"], alphas, cfg["n"], mc, threads=threads)
    except ValueError as exc:
        raise CLIError(str(exc))
    except RuntimeError as exc:
        raise NumericalFailure(str(exc))
    return rep.to_dict(), EXIT_OK


def _run_scan_threshold(cfg, threads):
    masses = _parse_masses(cfg["masses"])
    try:
        est = scan_local_threshold(
            masses,
            n=cfg["n"],
            bracket_tol=cfg["bracket_tol"],
            beta=cfg["beta"],
            r=cfg["radius"],
            seed=cfg["seed"],
            threads=threads,
        )
    except ValueError as exc:
        raise CLIError(str(exc))
    except RuntimeError as exc:
        raise NumericalFailure(str(exc))
    return est.to_dict(), EXIT_OK


def _run_candidates(cfg, threads):
    params = _params_from(cfg)
    try:
        rows = energy_of_candidates(params, cfg["n"], sphere_atoms=cfg["sphere_atoms"])
    except ValueError as exc:
        raise CLIError(str(exc))
    return {"rows": rows}, EXIT_OK


RUNNERS = {
    "energy": _run_energy,
    "flow": _run_flow,
    "minimize": _run_minimize,
    "metric": _run_metric,
    "verify-variance": _run_verify_variance,
    "verify-vertex-potential": _run_verify_vertex_potential,
    "verify-local-min": _run_verify_local_min,
    "verify-jung": _run_verify_jung,
    "verify-gamma": _run_verify_gamma,
    "scan-threshold": _run_scan_threshold,
    "candidates": _run_candidates,
}


def _rows_for_csv(command, result):
    if command == "flow":
        return ["t", "energy"], list(zip(result["times"], result["energies"]))
    if command == "verify-gamma":
        header = ["alpha", "distance", "is_unit_simplex", "energy", "atoms"]
        return header, [[r[h] for h in header] for r in result["rows"]]
    if command == "candidates":
        return ["name", "energy", "atoms"], [
            [r["name"], r["energy"], r.get("atoms", "")] for r in result["rows"]
        ]
    if command == "scan-threshold":
        return ["alpha", "descent_found"], [[a, f] for a, f in result["probes"]]
    raise CLIError(f"csv output is not defined for {command}")


def _emit(command, config, threads, result, out_path, fmt):
    if fmt == "json":
        payload = {"command": command, "config": config, "threads": threads, "result": result}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        header, rows = _rows_for_csv(command, result)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        text = buf.getvalue()
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_schema_flags(parser, command):
    for key, (typ, _default) in SCHEMAS[command].items():
        flag = "--" + key.replace("_", "-")
        if typ is bool:
            parser.add_argument(flag, action="store_const", const=True, default=None)
        else:
            parser.add_argument(flag, type=typ, default=None)


def _global_flags(parser, suppress):
    # defined on the main parser and again on each subparser (suppressed
    # defaults) so they are accepted on either side of the command word
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--threads", type=int, default=default,
        help="internal parallelism (default: SIMPLEXFLOW_THREADS or 1)",
    )
    parser.add_argument("--out", type=str, default=default, help="output file (default: stdout)")
    parser.add_argument(
        "--format", choices=("json", "csv"),
        default=argparse.SUPPRESS if suppress else "json",
    )
    parser.add_argument("--config", type=str, default=default, help="JSON config file; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexflow",
        description="interaction-energy minimization, aggregation flow, transport metrics, and theorem checks",
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command")

    for name in ("energy", "flow", "minimize", "metric", "scan-threshold", "candidates"):
        p = sub.add_parser(name)
        _global_flags(p, suppress=True)
        _add_schema_flags(p, name)

    pv = sub.add_parser("verify")
    pv.add_argument("check", choices=("variance", "vertex-potential", "local-min", "jung", "gamma"))
    _global_flags(pv, suppress=True)
    seen = set()
    for check in ("variance", "vertex-potential", "local-min", "jung", "gamma"):
        for key, (typ, _default) in SCHEMAS[f"verify-{check}"].items():
            if key in seen:
                continue
            seen.add(key)
            flag = "--" + key.replace("_", "-")
            if typ is bool:
                pv.add_argument(flag, action="store_const", const=True, default=None)
            else:
                pv.add_argument(flag, type=typ, default=None)
    return parser


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION

    command = args.command
    if command == "verify":
        command = f"verify-{args.check}"

    threads = args.threads
    if threads is None:
        env = os.environ.get("SIMPLEXFLOW_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                print(f"error: SIMPLEXFLOW_THREADS={env!r} is not an integer", file=sys.stderr)
                return EXIT_VALIDATION
        else:
            threads = 1
    if threads < 1:
        print(f"error: --threads must be >= 1, got {threads}", file=sys.stderr)
        return EXIT_VALIDATION
    _backend.set_num_threads(threads)

    flag_values = {k: v for k, v in vars(args).items() if k in SCHEMAS[command]}
    try:
        config = _resolve_config(command, flag_values, args.config)
        result, code = RUNNERS[command](config, threads)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    try:
        _emit(command, config, threads, result, args.out, args.format)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if code == EXIT_NUMERICAL:
        print("numerical failure: flow step size underflowed", file=sys.stderr)
    return code


def main(argv=None) -> int:
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
