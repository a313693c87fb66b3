"""``ndcwt`` command-line entry point.

Exit codes: 0 success, 1 failed self-check, 2 invalid arguments or input,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import io as nio
from .features import (
    FeatureSettings,
    adjust_feature_vectors,
    extract_batch,
)
from .filters import UnknownFilterError, available_filters, get_filter, load_filter_file, register_filter
from .phase import phase_averages
from .selfsim import FbmSpec, simulate_fbm_1d, simulate_fbm_2d
from .spectra import InsufficientLevelsError, fit_spectrum, logscale_1d, logscale_2d, parse_level_range
from .transform1d import DepthError, SignalTooShortError, build_plan_1d, forward_1d
from .transform2d import ShiftRangeError, build_plan_2d, forward_2d


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _positive_threads(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _common(p):
    p.add_argument("--threads", type=_positive_threads, default=None,
                   help="cap on internal threads (default: $NDCWT_THREADS or all cores)")


def _wavelet_args(p):
    p.add_argument("--wavelet", default="cdaub6", help=f"filter name ({'|'.join(available_filters())})")
    p.add_argument("--filter-file", default=None,
                   help="custom low-pass taps, one 're im' pair per line (overrides --wavelet)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ndcwt", description="Non-decimated complex wavelet spectral tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate fractional Brownian motion")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--fbm1d", action="store_true")
    kind.add_argument("--fbm2d", action="store_true")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--length", type=int, required=True, help="samples (1-D) or rows (2-D)")
    p.add_argument("--cols", type=int, default=None, help="columns (2-D, default = --length)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("transform1d", help="1-D transform to JSON")
    p.add_argument("--input", required=True)
    _wavelet_args(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("transform2d", help="2-D scale-mixing transform to binary")
    p.add_argument("--input", required=True, help="PGM or CSV matrix")
    _wavelet_args(p)
    p.add_argument("--col-wavelet", default=None, help="different filter for columns")
    p.add_argument("--depth-rows", type=int, required=True)
    p.add_argument("--depth-cols", type=int, required=True)
    p.add_argument("--precision", choices=("complex64", "complex128"), default="complex128")
    p.add_argument("--out", required=True)
    _common(p)

    for name, helptext in (("spectra", "wavelet spectrum and Hurst estimate"),
                           ("phase", "per-level phase averages")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", required=True)
        _wavelet_args(p)
        p.add_argument("--depth", type=int, required=True)
        p.add_argument("--depth-cols", type=int, default=None, help="2-D column depth (default = --depth)")
        p.add_argument("--mode", choices=("1d", "2d"), default="1d")
        p.add_argument("--shift", type=int, default=0)
        if name == "spectra":
            p.add_argument("--levels", default=None, help="fit range j_lo:j_hi (inclusive)")
            p.add_argument("--fit", choices=("ols", "wls", "robust"), default="ols")
            p.add_argument("--detrend", choices=("none", "endpoints"), default="none")
            p.add_argument("--plot-data", default=None, help="also write level,log2_energy CSV")
        else:
            p.add_argument("--statistic", choices=("arithmetic", "circular"), default="arithmetic")
        p.add_argument("--out", required=True)
        _common(p)

    p = sub.add_parser("features", help="feature table from a manifest of signals/images")
    p.add_argument("--manifest", required=True, help="CSV with columns path, group, subject")
    _wavelet_args(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--segment", default=None, help="window:step for 1-D inputs, e.g. 1024:100")
    p.add_argument("--levels", default=None)
    p.add_argument("--fit", choices=("ols", "wls", "robust"), default="ols")
    p.add_argument("--detrend", choices=("none", "endpoints"), default="none")
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--adjust-subjects", action="store_true")
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("verify", help="run built-in oracle suites")
    p.add_argument("--quick", action="store_true", help="small instances only")
    p.add_argument("--bench", action="store_true", help="also time the 1-D and 2-D transforms")
    p.add_argument("--out", default=None, help="write results as JSON")
    _common(p)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "threads"}
    cfg["threads"] = args.threads
    return cfg


def _envelope(args, **payload):
    return {"version": __version__, "config": _config(args), **payload}


def _wavelet(args):
    if args.filter_file:
        try:
            pair = load_filter_file(args.filter_file)
        except ValueError as exc:
            raise UsageError("--filter-file", str(exc)) from None
        register_filter(pair)
        return pair.name
    try:
        return get_filter(args.wavelet).name
    except UnknownFilterError as exc:
        raise UsageError("--wavelet", str(exc)) from None


def _plan_1d(m, depth, wavelet):
    try:
        return build_plan_1d(m, depth, wavelet)
    except SignalTooShortError as exc:
        raise UsageError("--input", str(exc)) from None
    except DepthError as exc:
        raise UsageError("--depth", str(exc)) from None


def _plan_2d(shape, p1, p2, wavelet, col_wavelet=None, flags=("--depth", "--depth-cols")):
    try:
        build_plan_1d(shape[0], p1, wavelet)
    except DepthError as exc:
        raise UsageError(flags[0], str(exc)) from None
    except SignalTooShortError as exc:
        raise UsageError("--input", str(exc)) from None
    try:
        build_plan_1d(shape[1], p2, col_wavelet or wavelet)
    except DepthError as exc:
        raise UsageError(flags[1], str(exc)) from None
    except SignalTooShortError as exc:
        raise UsageError("--input", str(exc)) from None
    return build_plan_2d(shape[0], shape[1], p1, p2, wavelet, col_wavelet)


def _read_input(args, mode):
    try:
        x = nio.read_signal(args.input) if mode == "1d" else nio.read_image(args.input)
    except nio.FormatError as exc:
        raise UsageError("--input", str(exc)) from None
    return x


def cmd_simulate(args):
    if not 0 < args.hurst < 1:
        raise UsageError("--hurst", "must lie strictly between 0 and 1")
    if args.length < 1 or (args.cols is not None and args.cols < 1):
        raise UsageError("--length", "sizes must be positive")
    cfg = {"version": __version__, **_config(args)}
    if args.fbm1d:
        y = simulate_fbm_1d(FbmSpec(args.hurst, args.length, seed=args.seed))
        nio.write_signal_csv(args.out, y, cfg)
    else:
        cols = args.cols or args.length
        try:
            A = simulate_fbm_2d(FbmSpec(args.hurst, args.length, cols, seed=args.seed))
        except ValueError as exc:
            raise UsageError("--length", str(exc)) from None
        nio.write_matrix_csv(args.out, A, cfg)


def cmd_transform1d(args):
    y = _read_input(args, "1d")
    plan = _plan_1d(len(y), args.depth, _wavelet(args))
    c = forward_1d(plan, y)
    nio.write_json(args.out, _envelope(
        args,
        meta=c.meta(),
        smooth=nio.complex_pairs(c.smooth),
        detail={str(j): nio.complex_pairs(c.level(j)) for j in c.levels},
    ))


def cmd_transform2d(args):
    A = _read_input(args, "2d")
    wavelet = _wavelet(args)
    col = None
    if args.col_wavelet:
        try:
            col = get_filter(args.col_wavelet).name
        except UnknownFilterError as exc:
            raise UsageError("--col-wavelet", str(exc)) from None
    plan = _plan_2d(A.shape, args.depth_rows, args.depth_cols, wavelet, col,
                    flags=("--depth-rows", "--depth-cols"))
    coeffs = forward_2d(plan, A)
    nio.write_coeffs_bin(args.out, coeffs, 8 if args.precision == "complex64" else 16)
    nio.write_json(args.out + ".json", _envelope(args, meta=coeffs.meta(), format="ndcwt-2d-bin/1"))


def _coeffs(args):
    x = _read_input(args, args.mode)
    wavelet = _wavelet(args)
    if args.mode == "1d":
        if x.ndim != 1:
            raise UsageError("--mode", "1d mode needs a single-column signal")
        if getattr(args, "detrend", "none") == "endpoints":
            from .features import detrend_endpoints

            x = detrend_endpoints(x)
        return forward_1d(_plan_1d(len(x), args.depth, wavelet), x)
    plan = _plan_2d(x.shape, args.depth, args.depth_cols or args.depth, wavelet)
    return forward_2d(plan, x)


def cmd_spectra(args):
    coeffs = _coeffs(args)
    try:
        levels = parse_level_range(args.levels)
    except ValueError as exc:
        raise UsageError("--levels", str(exc)) from None
    try:
        diagram = logscale_1d(coeffs) if args.mode == "1d" else logscale_2d(coeffs, args.shift)
    except ShiftRangeError as exc:
        raise UsageError("--shift", str(exc)) from None
    fit = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            fit = fit_spectrum(diagram, levels, args.fit)
        except InsufficientLevelsError as exc:
            # degenerate input (e.g. constant): report the diagram without a fit
            warnings.warn(f"no spectral fit: {exc}")
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    nio.write_json(args.out, _envelope(
        args, meta=coeffs.meta(), diagram=diagram.to_dict(),
        fit=fit.to_dict() if fit else None, hurst=fit.hurst if fit else None,
    ))
    if args.plot_data:
        rows = ["level,log2_energy"] + [f"{j},{s!r}" for j, s in diagram.points if np.isfinite(s)]
        nio.atomic_write(args.plot_data, "\n".join(rows) + "\n")


def cmd_phase(args):
    coeffs = _coeffs(args)
    try:
        summary = phase_averages(coeffs, args.shift, args.statistic)
    except ShiftRangeError as exc:
        raise UsageError("--shift", str(exc)) from None
    if summary.zero_counts.any():
        print(f"warning: {int(summary.zero_counts.sum())} zero coefficients given phase 0", file=sys.stderr)
    nio.write_json(args.out, _envelope(args, meta=coeffs.meta(), phase=summary.to_dict()))


def _read_manifest(path):
    base = os.path.dirname(os.path.abspath(path))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"path", "group", "subject"} - set(reader.fieldnames or [])
        if missing:
            raise UsageError("--manifest", f"missing columns: {', '.join(sorted(missing))}")
        rows = list(reader)
    items = []
    for row in rows:
        p = row["path"]
        full = p if os.path.isabs(p) else os.path.join(base, p)
        try:
            if full.lower().endswith(".pgm"):
                x = nio.read_pgm(full)
            else:
                try:
                    x = nio.read_signal(full)
                except nio.FormatError:
                    x = nio.read_matrix_csv(full)
        except nio.FormatError as exc:
            raise UsageError("--manifest", str(exc)) from None
        items.append((p, row["group"], row["subject"], x))
    return items


def cmd_features(args):
    wavelet = _wavelet(args)
    window = step = None
    if args.segment:
        try:
            window, step = (int(v) for v in args.segment.split(":"))
        except ValueError:
            raise UsageError("--segment", "expected window:step, e.g. 1024:100") from None
    try:
        levels = parse_level_range(args.levels)
    except ValueError as exc:
        raise UsageError("--levels", str(exc)) from None
    settings = FeatureSettings(wavelet=wavelet, depth=args.depth, level_range=levels,
                               fit=args.fit, shift=args.shift, detrend=args.detrend)
    items = _read_manifest(args.manifest)
    try:
        vectors = extract_batch(items, settings, window, step or 100)
    except (DepthError, SignalTooShortError, ShiftRangeError, ValueError) as exc:
        raise UsageError("--depth" if isinstance(exc, DepthError) else "--manifest", str(exc)) from None
    degenerate = [v.source for v in vectors if v.degenerate]
    if degenerate:
        print(f"warning: degenerate spectra (zero-energy levels) in {len(degenerate)} inputs", file=sys.stderr)
    adjusted = None
    if args.adjust_subjects:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            adjusted = adjust_feature_vectors(vectors)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)

    nlev = max(len(v.phase_means) for v in vectors) if vectors else 0
    levels_hdr = [int(j) for j in vectors[0].levels] if vectors else []
    header = ["id", "group", "subject", "slope", "hurst"] + [f"phase_{j}" for j in levels_hdr]
    if adjusted is not None:
        header += ["slope_adj", "hurst_adj"] + [f"phase_{j}_adj" for j in levels_hdr]
    lines = ["# ndcwt-config: " + json.dumps({"version": __version__, **_config(args)}, sort_keys=True),
             ",".join(header)]
    for k, v in enumerate(vectors):
        row = [v.source, v.group, v.subject, repr(v.slope), repr(v.hurst)]
        row += [repr(float(x)) for x in v.phase_means] + [""] * (nlev - len(v.phase_means))
        if adjusted is not None:
            a = adjusted[k]
            row += [repr(a.slope), repr(a.hurst)] + [repr(float(x)) for x in a.phase_means]
        lines.append(",".join(str(c) for c in row))
    nio.atomic_write(args.out, "\n".join(lines) + "\n")


def cmd_verify(args):
    from .verify import bench, run_suites

    checks = run_suites(quick=args.quick)
    for c in checks:
        print(c.line())
    result = {"checks": [vars(c) for c in checks]}
    if args.bench:
        times = bench()
        result["bench"] = times
        print(f"bench: 1-D forward (m=1024, p=4, cdaub6) {times['forward_1d'] * 1e3:.2f} ms "
              f"[plan {times['plan_1d'] * 1e3:.1f} ms]")
        print(f"bench: 2-D forward (1024x1024, p1=p2=4, cdaub6) {times['forward_2d']:.2f} s "
              f"[plan {times['plan_2d']:.2f} s]")
    if args.out:
        nio.write_json(args.out, _envelope(args, **result))
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "transform1d": cmd_transform1d,
    "transform2d": cmd_transform2d,
    "spectra": cmd_spectra,
    "phase": cmd_phase,
    "features": cmd_features,
    "verify": cmd_verify,
}


def _thread_limit(args):
    n = args.threads
    if n is None and os.environ.get("NDCWT_THREADS"):
        try:
            n = _positive_threads(os.environ["NDCWT_THREADS"])
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError("NDCWT_THREADS", "must be a positive integer") from None
    args.threads = n
    if n is None:
        import contextlib

        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with _thread_limit(args):
            rc = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ndcwt {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ndcwt {args.command}: I/O error: {exc}", file=sys.stderr)
        return 3
    return int(rc or 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
