"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (or a failed ``verify``),
2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import critical, model, oracle, sweep
from .errors import ProbeGainError

EPILOG = """\
Rates are angular-frequency rates in s^-1; no unit conversion is applied.
The drive is given as the saturation parameter --kappa (dimensionless) or as
--g-squared, the squared strong-field matrix element |G|^2 in s^-2.

Row schema (eval, map, sweep), CSV columns in this order / JSON object keys:
  x, kappa, g_squared, ratio, splitting_factor, bracket, pop_diff, region
ratio is alpha/alpha0 at line center, bracket and splitting_factor its two
factors, pop_diff the saturated n_g - rho_nn for dn_gn = 1, region I..IV.
critical emits quantity,value rows (JSON: one object); curve emits x,kappa;
optimum emits x,kappa_opt,ratio[,oracle_kappa,oracle_abs_ratio,rel_error];
verify emits one row per check: name,closed_form,oracle,rel_error,tolerance,passed.
Floats are printed with 17 significant digits in CSV.

Presets: {presets}.  Extra presets are looked up as <name>.cfg in
${env} when set.

examples:
  probegain eval --preset neon-case-1 --kappa 2 --x 4.14
  probegain critical --preset neon-case-2 --format json
  probegain optimum --preset neon-case-1 --x 4.14 --oracle
  probegain map --preset four-region --x-min 1 --x-max 3 --kappa-min 0 --kappa-max 6 --nx 200 --nk 200
  probegain sweep --preset neon-case-1 --x-list 2,4.14,8 --kappa-min 0 --kappa-max 6 --n 61
  probegain verify --seed 42 --n 100
"""


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", help="built-in or $%s preset (default: neon-case-1)" % sweep.PRESET_DIR_ENV)
    source.add_argument("--config", metavar="PATH", help="plain-text key = value config file")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    common.add_argument("--output", "-o", metavar="PATH", help="write data here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="probegain",
        description="Line-center probe gain under a resonant strong drive in a three-level medium.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG.format(presets=", ".join(sorted(sweep.PRESETS)), env=sweep.PRESET_DIR_ENV),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("eval", parents=[common], help="gain ratio, population difference and region at one point")
    drive = p.add_mutually_exclusive_group(required=True)
    drive.add_argument("--kappa", type=float)
    drive.add_argument("--g-squared", type=float, dest="g_squared")
    p.add_argument("--x", type=float, help="dn_mn/dn_gn (default: from config dn_gn, dn_mn)")

    sub.add_parser("critical", parents=[common], help="critical ratios x1, x2, x3 and condition checks")

    p = sub.add_parser("optimum", parents=[common], help="optimum drive kappa_opt(x)")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check by golden-section search")

    p = sub.add_parser("curve", parents=[common], help="critical curve kappa_i(x)")
    p.add_argument("--which", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--n", type=int, default=101)

    p = sub.add_parser("map", parents=[common], help="region map over an (x, kappa) grid")
    for name in ("--x-min", "--x-max", "--kappa-min", "--kappa-max"):
        p.add_argument(name, type=float, default=None)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--nk", type=int, default=None)
    p.add_argument("--log-kappa", action="store_true")
    p.add_argument("--plot-script", metavar="PATH", help="also write a gnuplot script (needs --output)")

    p = sub.add_parser("sweep", parents=[common], help="gain versus kappa for fixed x values")
    p.add_argument("--x-list", type=_float_list, default=None)
    p.add_argument("--kappa-min", type=float, default=None)
    p.add_argument("--kappa-max", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--log-kappa", action="store_true")
    p.add_argument("--plot-script", metavar="PATH", help="also write a gnuplot script (needs --output)")

    p = sub.add_parser("verify", parents=[common], help="run the closed-form verification suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=100, help="number of random media")
    return parser


def _load_source(args):
    """Return (name, RelaxationSet, Pumping or None, SweepSpec)."""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc.strerror}")
        r, pumping, spec = sweep.load_config(text)
        return args.config, r, pumping, spec
    name = args.preset or "neon-case-1"
    try:
        preset = sweep.get_preset(name)
    except KeyError as exc:
        raise UsageError(f"--preset: {exc.args[0]}")
    return name, preset.relaxation, None, sweep.SweepSpec()


def _pick(flag_value, config_value, flag):
    value = flag_value if flag_value is not None else config_value
    if value is None:
        raise UsageError(f"{flag} is required (not given on the command line or in the config)")
    return value


def _cmd_eval(args, r, pumping, spec):
    if args.x is not None:
        p = model.Pumping.from_ratio(args.x)
    elif pumping is not None:
        p = pumping
    else:
        raise UsageError("--x is required (or give dn_gn and dn_mn in the config)")
    if args.kappa is not None:
        d = model.Drive.from_kappa(args.kappa, r)
    else:
        d = model.Drive(args.g_squared)
    return sweep.evaluation_row(model.gain_ratio(r, d, p)), sweep.COLUMNS


def _cmd_critical(args, r, pumping, spec):
    crit = critical.critical_x(r)
    values = {
        "x1": crit.x1,
        "x2": crit.x2,
        "x3": crit.x3 if crit.x3 is not None else "absent",
        "x3_denominator": crit.x3_denominator,
        "spread_x2_x1": (crit.x2 - crit.x1) / crit.x1,
        "tau_squared": model.tau_squared(r),
        "interference_dominance": model.interference_dominance(r),
        "interference_threshold": model.interference_dominance_threshold(r),
        "Gamma_gm": r.Gamma_gm,
        "kappa_opt_asymptote": critical.kappa_opt_asymptote(r),
    }
    return values, None


def _cmd_optimum(args, r, pumping, spec):
    k = critical.kappa_opt(args.x, r)
    ev = model.gain_ratio(r, model.Drive.from_kappa(k, r), model.Pumping.from_ratio(args.x), with_region=False)
    row = {"x": args.x, "kappa_opt": k, "ratio": ev.ratio}
    columns = ["x", "kappa_opt", "ratio"]
    if args.oracle:
        k_grid, m_grid = oracle.grid_optimum(args.x, r)
        row.update(oracle_kappa=k_grid, oracle_abs_ratio=m_grid, rel_error=abs(k - k_grid) / k_grid)
        columns += ["oracle_kappa", "oracle_abs_ratio", "rel_error"]
    return [row], columns


def _cmd_curve(args, r, pumping, spec):
    crit = critical.critical_x(r)
    crit.ratio(args.which)  # absent x3 is a domain error up front
    xs = sweep.Range(args.x_min, args.x_max, args.n).values()
    rows = []
    for x in xs:
        k = crit.kappa(args.which, x) if x > crit.ratio(args.which) else None
        rows.append({"x": x, "kappa": k})
    return rows, ["x", "kappa"]


def _range(flag_lo, flag_hi, flag_n, cfg, lo, hi, n, log=False):
    base_lo = cfg.minimum if cfg else None
    base_hi = cfg.maximum if cfg else None
    base_n = cfg.count if cfg else None
    return sweep.Range(
        _pick(lo, base_lo, flag_lo), _pick(hi, base_hi, flag_hi), _pick(n, base_n, flag_n),
        log=log or bool(cfg and cfg.log),
    )


def _cmd_map(args, r, pumping, spec):
    xr = _range("--x-min", "--x-max", "--nx", spec.x_range, args.x_min, args.x_max, args.nx)
    kr = _range("--kappa-min", "--kappa-max", "--nk", spec.kappa_range,
                args.kappa_min, args.kappa_max, args.nk, log=args.log_kappa)
    grid = sweep.region_map(r, xr, kr)
    return [sweep.evaluation_row(ev) for ev in grid.rows()], sweep.COLUMNS


def _cmd_sweep(args, r, pumping, spec):
    x_values = args.x_list if args.x_list is not None else list(spec.x_values)
    if not x_values and args.x_list is None:
        raise UsageError("--x-list is required (or give x_values in the config)")
    kr = _range("--kappa-min", "--kappa-max", "--n", spec.kappa_range,
                args.kappa_min, args.kappa_max, args.n, log=args.log_kappa)
    rows = sweep.gain_vs_kappa_sweep(r, x_values, kr)
    return [sweep.evaluation_row(ev) for ev in rows], sweep.COLUMNS


_VERIFY_COLUMNS = ("name", "closed_form", "oracle", "rel_error", "tolerance", "passed")


def _render_mapping(values, fmt):
    if fmt == "json":
        clean = {k: None if v == "absent" else sweep._jsonable(v) for k, v in values.items()}
        return json.dumps(clean, indent=2) + "\n"
    return sweep.to_csv([{"quantity": k, "value": v} for k, v in values.items()], ("quantity", "value"))


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        name, r, pumping, spec = _load_source(args)
        fmt = args.format or spec.fmt
        if args.command == "verify":
            r_list = None
            if args.preset or args.config:
                r_list = [(name, r)]
            report = oracle.verify_suite(r_list, seed=args.seed, n_random=args.n)
            if fmt == "json":
                text = report.to_json() + "\n"
            else:
                text = sweep.to_csv([c.__dict__ for c in report.checks], _VERIFY_COLUMNS)
            _write(text, args.output)
            status = "PASS" if report.passed else "FAIL"
            print(
                f"{status}: {len(report.checks) - len(report.failures)}/{len(report.checks)} checks, "
                f"worst relative error {report.worst_rel_error:.3g}",
                file=sys.stderr,
            )
            return 0 if report.passed else 1

        handler = {
            "eval": _cmd_eval,
            "critical": _cmd_critical,
            "optimum": _cmd_optimum,
            "curve": _cmd_curve,
            "map": _cmd_map,
            "sweep": _cmd_sweep,
        }[args.command]
        data, columns = handler(args, r, pumping, spec)
        if columns is None:
            text = _render_mapping(data, fmt)
        else:
            rows = data if isinstance(data, list) else [data]
            text = sweep.emit(rows, fmt, columns)
        _write(text, args.output)
        plot = getattr(args, "plot_script", None)
        if plot:
            if not args.output or fmt != "csv":
                raise UsageError("--plot-script needs --output with CSV format")
            _write(sweep.gnuplot_script(args.output, args.command), plot)
        return 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ProbeGainError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
