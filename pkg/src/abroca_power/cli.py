"""Command-line interface.

Subcommands:
  test      randomization significance test for one scored CSV
  power     Monte Carlo power sweep over a condition grid
  gen-null  ABROCA draws under a no-difference data-generating process
  fit       parametric distribution fits for a column of ABROCA values

Every run that writes files also writes a ``<output>.manifest.json``
recording the resolved configuration, seed, tool version, duration,
warnings, and a SHA-256 per output file; re-running with the same
configuration reproduces every output byte for byte (for any --threads).

Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .dataset import read_csv
from .distfit import FAMILIES, fit_mle, ppf_function, qq_points
from .errors import DataError, NumericalError
from .generator import SimConfig, plan_cells
from .permutation import P_CONVENTIONS, TestConfig, randomization_test
from .power import PowerConfig, null_abroca_samples, power_sweep
from .svg import power_chart

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    pass


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    parser.add_argument("--out-dir", default=".", help="directory for default output paths")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="primary output format where applicable")
    parser.add_argument("--config", default=None,
                        help="JSON file supplying any flag; command line overrides it")


def build_parser():
    parser = _Parser(prog="abroca-power", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"abroca-power {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    subparsers = {}

    p = sub.add_parser("test", parents=[], help="randomization test on a scored CSV",
                       add_help=True)
    p.add_argument("csv_path", help="input CSV with header score,label,group")
    p.add_argument("--n-iter-test", type=int, default=1000)
    p.add_argument("--p-convention", choices=P_CONVENTIONS, default="smoothed")
    p.add_argument("--max-resample", type=int, default=100)
    p.add_argument("--null-out", default=None, help="CSV dump of the null ABROCA samples")
    p.add_argument("--out", default=None, help="write the result as JSON here")
    _add_common(p)
    subparsers["test"] = p

    p = sub.add_parser("power", help="power sweep over sample size / effect / imbalance")
    p.add_argument("--n-total", "--test-set-size", dest="n_total", nargs="+", default=None,
                   help="total test-set sizes; accepts START:STOP:STEP ranges")
    p.add_argument("--auc-diff", nargs="+", default=None,
                   help="population AUC differences (split around the baseline)")
    p.add_argument("--ratio-group", nargs="+", default=["0.5"],
                   help="fraction of instances in group 0")
    p.add_argument("--ratio-pos-case", nargs="+", default=["0.5"],
                   help="fraction of positive outcomes within each group")
    p.add_argument("--baseline-auc", type=float, default=0.725)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-iter-test", type=int, default=1000)
    p.add_argument("--n-iter-power", type=int, default=500)
    p.add_argument("--p-convention", choices=P_CONVENTIONS, default="smoothed")
    p.add_argument("--max-resample", type=int, default=100)
    p.add_argument("--out", default=None, help="curve output (default <out-dir>/power_curve.csv)")
    p.add_argument("--svg", default=None, help="also render the curve to this SVG path")
    p.add_argument("--quiet", action="store_true", help="suppress per-cell progress on stderr")
    _add_common(p)
    subparsers["power"] = p

    p = sub.add_parser("gen-null", help="simulate ABROCA draws under equal group AUCs")
    p.add_argument("--n-draws", type=int, default=None, help="number of ABROCA values")
    p.add_argument("--auc", type=float, default=0.725, help="shared population AUC")
    p.add_argument("--auc-1", type=float, default=None)
    p.add_argument("--auc-2", type=float, default=None)
    p.add_argument("--allow-alt", action="store_true",
                   help="permit auc-1 != auc-2 (draws are then not a null distribution)")
    p.add_argument("--n-total", type=int, default=1000, help="instances per simulated dataset")
    p.add_argument("--ratio-group", type=float, default=0.5)
    p.add_argument("--ratio-pos-case", type=float, default=0.5)
    p.add_argument("--out", default=None, help="output CSV (default <out-dir>/null_abroca.csv)")
    _add_common(p)
    subparsers["gen-null"] = p

    p = sub.add_parser("fit", help="fit candidate distributions to ABROCA samples")
    p.add_argument("samples_csv", help="single-column CSV of ABROCA values")
    p.add_argument("--family", nargs="+", choices=FAMILIES, default=list(FAMILIES))
    p.add_argument("--out", default=None, help="fit summary JSON (default <out-dir>/fits.json)")
    _add_common(p)
    subparsers["fit"] = p

    return parser, subparsers


def _load_config_defaults(parser, subparsers, argv):
    """Apply --config file values as defaults for the chosen subcommand."""
    args = parser.parse_args(argv)
    config_path = getattr(args, "config", None)
    if args.subcommand is None or not config_path:
        return args
    sp = subparsers[args.subcommand]
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        sp.error(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        sp.error(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        sp.error("config file must hold a JSON object of flag values")
    known = {action.dest for action in sp._actions}
    defaults = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in known:
            sp.error(f"config key {key!r} does not match any {args.subcommand} flag")
        defaults[dest] = value
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def _parse_axis(tokens, kind, flag, parser):
    """Expand axis tokens; `START:STOP:STEP` is an inclusive range."""
    if tokens is None:
        parser.error(f"{flag} is required (flag or config file)")
    if not isinstance(tokens, (list, tuple)):
        tokens = [tokens]
    values = []
    for token in tokens:
        if isinstance(token, str) and ":" in token:
            parts = token.split(":")
            if len(parts) != 3:
                parser.error(f"{flag}: range token {token!r} must be START:STOP:STEP")
            try:
                start, stop, step = (int(p) for p in parts)
            except ValueError:
                parser.error(f"{flag}: range token {token!r} must hold integers")
            if step <= 0 or stop < start:
                parser.error(f"{flag}: empty range {token!r}")
            values.extend(range(start, stop + 1, step))
        else:
            try:
                values.append(kind(token))
            except (TypeError, ValueError):
                parser.error(f"{flag}: cannot parse {token!r}")
    if not values:
        parser.error(f"{flag}: no values given")
    return values


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(primary_out, subcommand, config, seed, started, warnings, outputs):
    manifest = {
        "tool": "abroca-power",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "master_seed": seed,
        "duration_seconds": round(time.perf_counter() - started, 3),
        "warnings": list(warnings),
        "outputs": [
            {"path": str(p), "bytes": os.path.getsize(p), "sha256": _sha256(p)} for p in outputs
        ],
    }
    path = f"{primary_out}.manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _default_out(args, filename):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, filename)


def _check_threads(args, parser):
    if args.threads < 1:
        parser.error("--threads must be >= 1")


def _write_value_csv(path, header, values):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for v in values:
            fh.write(f"{float(v)!r}\n")


def cmd_test(args, parser):
    started = time.perf_counter()
    _check_threads(args, parser)
    ds, metadata = read_csv(args.csv_path)
    cfg = TestConfig(
        n_iter_test=args.n_iter_test,
        p_convention=args.p_convention,
        max_resample=args.max_resample,
        seed=args.seed,
    )
    result = randomization_test(ds, cfg)
    print(f"observed_abroca={result.observed_abroca!r}")
    print(f"p_value={result.p_value!r}")
    print(f"p_convention={result.p_convention}")
    print(f"n_iter_test={result.n_iter}")
    print(f"n_degenerate_resampled={result.n_degenerate_resampled}")
    outputs = []
    if args.null_out:
        _write_value_csv(args.null_out, "abroca", result.null_samples)
        outputs.append(args.null_out)
    if args.out:
        payload = result.to_json_dict()
        payload["n_instances"] = ds.n
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append(args.out)
    if outputs:
        warnings = []
        if result.n_degenerate_resampled:
            warnings.append(f"{result.n_degenerate_resampled} degenerate permutations redrawn")
        config = {
            "csv_path": args.csv_path,
            "csv_mappings": {k: dict(v) for k, v in metadata.items()},
            **cfg.to_json_dict(),
        }
        _write_manifest(outputs[-1] if args.out is None else args.out,
                        "test", config, args.seed, started, warnings, outputs)
    return EXIT_OK


def cmd_power(args, parser):
    started = time.perf_counter()
    _check_threads(args, parser)
    n_totals = _parse_axis(args.n_total, int, "--n-total", parser)
    auc_diffs = _parse_axis(args.auc_diff, float, "--auc-diff", parser)
    ratio_groups = _parse_axis(args.ratio_group, float, "--ratio-group", parser)
    ratio_pos = _parse_axis(args.ratio_pos_case, float, "--ratio-pos-case", parser)
    sim = SimConfig(
        auc_1=args.baseline_auc,
        auc_2=args.baseline_auc,
        n_total=max(4, n_totals[0]),
        ratio_group=ratio_groups[0],
        ratio_pos_case=ratio_pos[0],
    )
    test = TestConfig(
        n_iter_test=args.n_iter_test,
        p_convention=args.p_convention,
        max_resample=args.max_resample,
    )
    base = PowerConfig(
        sim=sim,
        test=test,
        n_iter_power=args.n_iter_power,
        alpha=args.alpha,
        master_seed=args.seed,
    )
    curve = power_sweep(
        base,
        n_totals,
        auc_diffs,
        ratio_groups,
        ratio_pos,
        baseline_auc=args.baseline_auc,
        threads=args.threads,
        progress=None if args.quiet else sys.stderr,
    )
    if all(row.error for row in curve.rows):
        raise NumericalError(
            "every sweep cell failed; first error: " + curve.rows[0].error
        )
    out = args.out or _default_out(args, "power_curve.csv" if args.format == "csv" else "power_curve.json")
    if args.format == "csv":
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            curve.to_csv(fh)
    else:
        rows = []
        for row in curve.rows:
            rows.append({
                "n_total": row.n_total,
                "auc_diff": row.auc_diff,
                "ratio_group": row.ratio_group,
                "ratio_pos_case": row.ratio_pos_case,
                "power": row.power,
                "mc_stderr": row.mc_stderr,
                "n_iter_power": row.n_iter_power,
                "n_iter_test": row.n_iter_test,
                "alpha": row.alpha,
                "baseline_auc": row.baseline_auc,
                "error": row.error,
            })
        with open(out, "w", encoding="utf-8") as fh:
            json.dump({"rows": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    outputs = [out]
    if args.svg:
        chart = power_chart(curve.rows, args.alpha, "randomization-test power")
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(chart)
        outputs.append(args.svg)
    config = {
        "n_total": n_totals,
        "auc_diff": auc_diffs,
        "ratio_group": ratio_groups,
        "ratio_pos_case": ratio_pos,
        "baseline_auc": args.baseline_auc,
        "alpha": args.alpha,
        "n_iter_test": args.n_iter_test,
        "n_iter_power": args.n_iter_power,
        "p_convention": args.p_convention,
        "max_resample": args.max_resample,
        "threads": args.threads,
    }
    _write_manifest(out, "power", config, args.seed, started, curve.warnings, outputs)
    return EXIT_OK


def cmd_gen_null(args, parser):
    started = time.perf_counter()
    _check_threads(args, parser)
    if args.n_draws is None or args.n_draws < 1:
        parser.error("--n-draws must be a positive integer")
    auc_1 = args.auc if args.auc_1 is None else args.auc_1
    auc_2 = args.auc if args.auc_2 is None else args.auc_2
    if auc_1 != auc_2 and not args.allow_alt:
        parser.error("--auc-1 and --auc-2 differ; pass --allow-alt to simulate an alternative")
    sim = SimConfig(
        auc_1=auc_1,
        auc_2=auc_2,
        n_total=args.n_total,
        ratio_group=args.ratio_group,
        ratio_pos_case=args.ratio_pos_case,
    )
    values = null_abroca_samples(sim, args.n_draws, args.seed, threads=args.threads)
    default_name = "null_abroca.csv" if args.format == "csv" else "null_abroca.json"
    out = args.out or _default_out(args, default_name)
    if args.format == "csv":
        _write_value_csv(out, "abroca", values)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump([float(v) for v in values], fh)
            fh.write("\n")
    config = {**sim.to_json_dict(), "n_draws": args.n_draws, "threads": args.threads}
    config.pop("seed", None)
    warnings = list(plan_cells(sim).warnings)
    _write_manifest(out, "gen-null", config, args.seed, started, warnings, [out])
    return EXIT_OK


def _read_sample_column(path):
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip().split(",")[0]
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise DataError(f"line {lineno}: {token!r} is not a number") from None
    if not values:
        raise DataError(f"{path} holds no numeric samples")
    return np.array(values, dtype=np.float64)


def cmd_fit(args, parser):
    started = time.perf_counter()
    samples = _read_sample_column(args.samples_csv)
    results = {}
    fits = {}
    errors = []
    for family in args.family:
        try:
            fit = fit_mle(samples, family, restart_seed=args.seed)
        except (DataError, NumericalError) as exc:
            results[family] = {"error": f"{type(exc).__name__}: {exc}"}
            errors.append(exc)
        else:
            fits[family] = fit
            results[family] = fit.to_json_dict()
    if not fits:
        raise errors[0]
    out = args.out or _default_out(args, "fits.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump({"n_samples": int(samples.size), "families": results}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    outputs = [out]
    os.makedirs(args.out_dir, exist_ok=True)
    for family, fit in fits.items():
        points = qq_points(samples, ppf_function(family, fit.params))
        qq_path = os.path.join(args.out_dir, f"qq_{family}.csv")
        with open(qq_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("theoretical,sample\n")
            for theo, sample in points:
                fh.write(f"{float(theo)!r},{float(sample)!r}\n")
        outputs.append(qq_path)
    warnings = [f"{family}: {entry['error']}" for family, entry in results.items()
                if "error" in entry]
    config = {"samples_csv": args.samples_csv, "families": list(args.family)}
    _write_manifest(out, "fit", config, args.seed, started, warnings, outputs)
    for family in args.family:
        entry = results[family]
        if "error" in entry:
            print(f"{family}: {entry['error']}")
        else:
            params = ", ".join(f"{k}={v:.6g}" for k, v in entry["params"].items())
            print(f"{family}: logLik={entry['log_likelihood']:.3f} "
                  f"D={entry['ks_statistic']:.5f} p={entry['ks_p_value']:.3g} ({params})")
    return EXIT_OK


_COMMANDS = {
    "test": cmd_test,
    "power": cmd_power,
    "gen-null": cmd_gen_null,
    "fit": cmd_fit,
}


def main(argv=None) -> int:
    parser, subparsers = build_parser()
    args = _load_config_defaults(parser, subparsers, sys.argv[1:] if argv is None else list(argv))
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    sp = subparsers[args.subcommand]
    try:
        return _COMMANDS[args.subcommand](args, sp)
    except DataError as exc:
        print(f"abroca-power {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"abroca-power {args.subcommand}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"abroca-power {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
