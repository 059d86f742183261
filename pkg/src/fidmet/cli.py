"""Command line front end.

Subcommands map onto the library sweep/fit/diagnostic entry points. Every
subcommand accepts --config FILE with plain "key = value" lines ('#' starts
a comment); values are converted with the same rules as the matching CLI
flag, and explicit CLI flags win over the file. Thread count resolves as
--threads, else the FIDMET_THREADS environment variable, else 1.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import __version__, analysis, eightvertex, ising, smf, sweep


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        n = value
    else:
        raw = os.environ.get("FIDMET_THREADS", "")
        try:
            n = int(raw) if raw else 1
        except ValueError as exc:
            raise SystemExit(f"FIDMET_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise SystemExit("thread count must be >= 1")
    return n


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        flags = ", ".join(f"--{n}" for n in missing)
        raise SystemExit(f"{args.command}: {flags} required (flag or config file)")


def _parse_seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from exc


def _parse_size_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from exc


def _read_config(path: str) -> dict[str, str]:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _apply_config(parser: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    """Turn config entries into parser defaults using each flag's converter."""
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, raw in cfg.items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise SystemExit(f"unknown config key {key!r}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[dest] = raw.lower() in ("1", "true", "yes", "on")
        elif action.nargs in (2, "+", "*"):
            parts = raw.replace(",", " ").split()
            conv = action.type or str
            defaults[dest] = [conv(p) for p in parts]
        else:
            conv = action.type or str
            try:
                defaults[dest] = conv(raw)
            except (TypeError, ValueError) as exc:
                raise SystemExit(f"config key {key!r}: {exc}") from exc
    parser.set_defaults(**defaults)


def _add_common(p: argparse.ArgumentParser, mc: bool = True) -> None:
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: FIDMET_THREADS or 1)")
    if mc:
        p.add_argument("--n-therm", type=int, default=200, help="thermalization sweeps")
        p.add_argument("--n-sweeps", type=int, default=2000, help="measurement sweeps")
        p.add_argument("--seed", type=_parse_seed_list, default=(1,), help="comma-separated RNG seeds")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fidmet", description="Fidelity metrics for two solvable lattice models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("smf-sweep", help="metric vs coupling for the deformed-code wavefunction")
    p.add_argument("--beta", type=float, nargs=2, metavar=("START", "STOP"), required=False, default=[0.0, 0.8])
    p.add_argument("--steps", type=int, default=9, help="grid points along beta")
    p.add_argument("--sizes", type=_parse_size_list, default=(2, 3, 4), help="comma-separated lattice sizes")
    p.add_argument("--method", choices=("enumerate", "mc"), default="enumerate")
    _add_common(p)

    # flags that a config file may supply cannot be argparse-required: the
    # second parse would fail before defaults apply; presence is checked in
    # the handlers instead
    p = sub.add_parser("ising-cv", help="specific heat: exact enumeration, sampling, or closed form")
    p.add_argument("--L", type=int, default=4, help="lattice size (0 with --method exact_formula)")
    p.add_argument("--beta", type=float, nargs="+", default=None, metavar="BETA",
                   help="one value, or START STOP for a range (with --steps)")
    p.add_argument("--steps", type=int, default=1, help="grid points along beta (ranges only)")
    p.add_argument("--method", choices=("enumerate", "mc", "exact_formula"), default="enumerate")
    _add_common(p)

    p = sub.add_parser("8v-sweep", help="metric tensor over (u, v) for the arrow-vertex wavefunction")
    p.add_argument("--u", type=float, nargs=2, metavar=("START", "STOP"), default=[0.6, 1.4])
    p.add_argument("--v", type=float, nargs=2, metavar=("START", "STOP"), default=[0.6, 1.4])
    p.add_argument("--u-steps", type=int, default=5)
    p.add_argument("--v-steps", type=int, default=5)
    p.add_argument("--sizes", type=_parse_size_list, default=(2, 3), help="comma-separated lattice sizes")
    p.add_argument("--method", choices=("enumerate", "mc"), default="enumerate")
    _add_common(p)

    p = sub.add_parser("8v-exponent", help="predicted divergence exponent at a point or over a grid")
    p.add_argument("--u", type=float, nargs="+", default=None, metavar="U",
                   help="one value for a point, or START STOP for a grid")
    p.add_argument("--v", type=float, nargs="+", default=None, metavar="V")
    p.add_argument("--u-steps", type=int, default=50)
    p.add_argument("--v-steps", type=int, default=50)
    _add_common(p, mc=False)

    p = sub.add_parser("fit", help="fit a divergence law to rows of a sweep CSV")
    p.add_argument("--csv", default=None, help="sweep CSV to read")
    p.add_argument("--model", choices=("log_divergence", "power_law"), default=None)
    p.add_argument("--observable", default=None, help="observable column value to select")
    p.add_argument("--L", type=int, default=None, help="restrict to one lattice size")
    p.add_argument("--center", type=float, default=None, help="critical coupling for log_divergence")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), default=None,
                   help="fit window on |param1 - center| (log) or param1 (power law)")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("selftest", help="fast end-to-end checks; exits nonzero on failure")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("plot-script", help="emit a standalone matplotlib script for a sweep CSV")
    p.add_argument("--csv", default=None, help="sweep CSV the script will read")
    p.add_argument("--kind", choices=sweep._PLOT_KINDS, default=None)
    p.add_argument("--out", default=None, help="path of the generated .py script")
    p.add_argument("--config", default=None, help="key = value config file")

    return parser


def _emit(rows, out_path) -> None:
    if out_path:
        sweep.write_sweep_csv(out_path, rows)
    else:
        import csv as _csv

        writer = _csv.writer(sys.stdout)
        writer.writerow(sweep.CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [r.model, r.method, r.L, sweep._fmt17(r.param1),
                 "" if r.param2 is None else sweep._fmt17(r.param2),
                 r.observable, sweep._fmt17(r.value), sweep._fmt17(r.std_error), r.seed]
            )


def _cmd_smf_sweep(args) -> int:
    spec = sweep.SweepSpec(
        model="smf",
        method=args.method,
        param1=(args.beta[0], args.beta[1], args.steps),
        param2=None,
        sizes=tuple(args.sizes),
        n_therm=args.n_therm,
        n_sweeps=args.n_sweeps,
        seeds=tuple(args.seed),
        output_path=args.out,
        threads=_resolve_threads(args.threads),
    )
    result = sweep.run_sweep(spec)
    if args.out is None:
        _emit(result.rows, None)
    return 0


def _cmd_ising_cv(args) -> int:
    _require(args, "beta")
    if len(args.beta) == 1:
        param1 = (args.beta[0], args.beta[0], 1)
    elif len(args.beta) == 2:
        param1 = (args.beta[0], args.beta[1], max(args.steps, 2))
    else:
        raise SystemExit("--beta takes one value or START STOP")
    sizes = (0,) if args.method == "exact_formula" else (args.L,)
    spec = sweep.SweepSpec(
        model="ising",
        method=args.method,
        param1=param1,
        param2=None,
        sizes=sizes,
        n_therm=args.n_therm,
        n_sweeps=args.n_sweeps,
        seeds=tuple(args.seed),
        output_path=args.out,
        threads=_resolve_threads(args.threads),
    )
    result = sweep.run_sweep(spec)
    if args.out is None:
        _emit(result.rows, None)
    return 0


def _cmd_8v_sweep(args) -> int:
    spec = sweep.SweepSpec(
        model="eight_vertex",
        method=args.method,
        param1=(args.u[0], args.u[1], args.u_steps),
        param2=(args.v[0], args.v[1], args.v_steps),
        sizes=tuple(args.sizes),
        n_therm=args.n_therm,
        n_sweeps=args.n_sweeps,
        seeds=tuple(args.seed),
        output_path=args.out,
        threads=_resolve_threads(args.threads),
    )
    result = sweep.run_sweep(spec)
    if args.out is None:
        _emit(result.rows, None)
    return 0


def _cmd_8v_exponent(args) -> int:
    _require(args, "u", "v")
    if len(args.u) == 1 and len(args.v) == 1:
        res = eightvertex.scaling_exponent(args.u[0], args.v[0])
        lines = [
            f"u = {sweep._fmt17(args.u[0])}",
            f"v = {sweep._fmt17(args.v[0])}",
            f"mu = {sweep._fmt17(res.mu)}",
            f"exponent = {sweep._fmt17(res.exponent)}",
            f"class = {res.divergence_class}",
            f"integer_pi_over_mu = {str(res.integer_exponent).lower()}",
        ]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    if len(args.u) != 2 or len(args.v) != 2:
        raise SystemExit("--u and --v take one value each (point) or START STOP each (grid)")
    spec = sweep.SweepSpec(
        model="eight_vertex",
        method="exact_formula",
        param1=(args.u[0], args.u[1], args.u_steps),
        param2=(args.v[0], args.v[1], args.v_steps),
        sizes=(0,),
        output_path=args.out,
        threads=_resolve_threads(args.threads),
    )
    result = sweep.run_sweep(spec)
    if args.out is None:
        _emit(result.rows, None)
    return 0


def _cmd_fit(args) -> int:
    _require(args, "csv", "model", "observable", "window")
    rows = sweep.read_sweep_csv(args.csv)
    window = (args.window[0], args.window[1])
    picked = [
        r for r in rows
        if r.observable == args.observable and (args.L is None or r.L == args.L)
    ]
    if not picked:
        raise SystemExit(f"no rows with observable {args.observable!r} in {args.csv}")
    samples = [(r.param1, r.value) for r in picked]
    if args.model == "log_divergence":
        if args.center is None:
            raise SystemExit("log_divergence fits need --center (the critical coupling)")
        fit = analysis.fit_log_divergence(samples, args.center, window)
    else:
        fit = analysis.fit_power_law(samples, window)
    lines = [
        f"model = {fit.model}",
        f"n_points = {fit.n_points}",
        f"amplitude = {sweep._fmt17(fit.amplitude)}",
        f"amplitude_stderr = {sweep._fmt17(fit.amplitude_stderr)}",
        f"offset = {sweep._fmt17(fit.offset)}",
    ]
    if fit.exponent is not None:
        lines.append(f"exponent = {sweep._fmt17(fit.exponent)}")
        lines.append(f"exponent_stderr = {sweep._fmt17(fit.exponent_stderr)}")
    lines.append(f"r_squared = {sweep._fmt17(fit.r_squared)}")
    lines.append(f"window = [{sweep._fmt17(window[0])}, {sweep._fmt17(window[1])}]")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _selftest_checks() -> list[tuple[str, str, float, float, float]]:
    """(model, check_name, value, tolerance, reference) rows, exact arithmetic only."""
    checks = []

    z2 = smf.partition_function(0.0, 2)
    checks.append(("smf", "uniform_state_count", z2, 1e-9, 8.0))
    f_same = smf.fidelity(0.3, 0.3, 2)
    checks.append(("smf", "self_fidelity_is_one", f_same, 1e-12, 1.0))
    g2 = smf.metric_fluctuation(0.0, 2)
    checks.append(("smf", "metric_at_zero_coupling", g2, 1e-9, 4.0))

    lhs = smf.metric_fluctuation(0.3, 3)
    rhs = smf.metric_from_specific_heat(0.3, 3)
    checks.append(("smf", "mapping_identity_L3", lhs - rhs, 1e-12, 0.0))

    n_valid = len(eightvertex._enumeration(2)[0])
    checks.append(("eight_vertex", "valid_arrow_count_L2", float(n_valid), 0.5, 32.0))
    z8 = eightvertex.z8v(eightvertex.VertexWeights(1.0, math.sqrt(2.0)), 2)
    checks.append(("eight_vertex", "partition_value_L2", z8, 1e-9, 50.0))
    res = eightvertex.scaling_exponent(1.0, 1.0)
    checks.append(("eight_vertex", "free_point_exponent", res.exponent, 0.0, 0.0))

    # truncation at delta = 1e-3 is ~2.7e-5 on g ~ 3.86; 1e-4 leaves headroom
    metric = analysis.finite_difference_metric(
        lambda a, b: smf.fidelity(float(a[0]), float(b[0]), 2),
        (0.3,), (1.0,), 1e-3,
    )
    checks.append(("smf", "fd_matches_fluctuation", metric.g - smf.metric_fluctuation(0.3, 2), 1e-4, 0.0))

    # leading high-temperature behaviour is 2 beta^2
    cv = ising.onsager_specific_heat(0.05)
    checks.append(("ising", "closed_form_low_coupling", cv, 5e-4, 2 * 0.05 ** 2))
    return checks


def _cmd_selftest(args) -> int:
    rows = []
    failures = 0
    for model, name, value, tol, ref in _selftest_checks():
        err = abs(value - ref)
        ok = err <= tol
        failures += 0 if ok else 1
        rows.append(
            sweep.SweepRow(
                model=model, method="selftest", L=0, param1=ref, param2=None,
                observable=name, value=float(value), std_error=float(tol), seed=0,
            )
        )
        print(f"[{'ok' if ok else 'FAIL'}] {model}:{name} value={value!r} reference={ref!r} tol={tol!r}", file=sys.stderr)
    _emit(rows, args.out)
    return 1 if failures else 0


def _cmd_plot_script(args) -> int:
    _require(args, "csv", "kind", "out")
    path = sweep.emit_plot_script(args.csv, args.kind, args.out)
    print(f"wrote {path}")
    return 0


_DISPATCH = {
    "smf-sweep": _cmd_smf_sweep,
    "ising-cv": _cmd_ising_cv,
    "8v-sweep": _cmd_8v_sweep,
    "8v-exponent": _cmd_8v_exponent,
    "fit": _cmd_fit,
    "selftest": _cmd_selftest,
    "plot-script": _cmd_plot_script,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # two-pass parse: config fills defaults, explicit flags still win
        sub = next(
            a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
        ).choices[args.command]
        _apply_config(sub, _read_config(args.config))
        args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
