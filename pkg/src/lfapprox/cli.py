"""Command-line interface.

Subcommands: coeffs (coefficient generation/caching), zfunc (Z grids and
the accompanying figure), zeros (scan + refine + compare), oracle-check
(dual-definition equivalence), equidist (log-prime-ratio diagnostics),
fetch (optional network download of coefficient data).

Exit codes: 0 success, 2 usage error, 3 precision/convergence failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from mpmath import mp

from . import __version__
from .approximation import ApproxConfig, choose_cutoff, lambda_N, z_function
from .eigenform import (
    CoefficientTable,
    EigenformSpec,
    delta_coefficients,
    delta_spec,
    format_header,
    load_coefficients,
    parse_header,
    save_coefficients,
)
from .errors import (
    AmbiguityError,
    ConvergenceError,
    CutoffError,
    NormalizationError,
    ParseError,
    PoleError,
    PrecisionError,
    RegimeError,
    ResourceError,
    SearchError,
    SeparationError,
    ToleranceError,
)
from .numerics import PrecisionContext
from .regularization import default_truncation, equidist_probe, lambda_N_regularized
from .reporting import build_document, num_str, render
from .zerofinder import compare_zero_lists, refine_zero, scan_sign_changes

CACHE_ENV = "LFAPPROX_CACHE_DIR"

_PRECISION_ERRORS = (
    PrecisionError,
    ConvergenceError,
    ToleranceError,
    RegimeError,
    CutoffError,
    PoleError,
    SeparationError,
    SearchError,
    AmbiguityError,
)
_IO_ERRORS = (ParseError, NormalizationError, ResourceError, OSError)

DEFAULTS: Dict[str, object] = {
    "form": "delta",
    "coeff_file": None,
    "weight": None,
    "level": 1,
    "sign": 0,
    "bits": 256,
    "target_error": "1e-30",
    "format": "csv",
    "out": None,
    "cache_dir": None,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--form", help="builtin form name (delta) [default: delta]")
    parser.add_argument("--coeff-file", dest="coeff_file", help="coefficient file path")
    parser.add_argument("--weight", type=int, help="weight k (required with --coeff-file)")
    parser.add_argument("--level", type=int, help="level C [default: 1]")
    parser.add_argument("--sign", type=int, choices=(0, 1),
                        help="functional-equation sign exponent P [default: 0]")
    parser.add_argument("--bits", type=int, help="working precision in bits [default: 256]")
    parser.add_argument("--target-error", dest="target_error",
                        help="absolute series error target [default: 1e-30]")
    parser.add_argument("--format", choices=("csv", "json"), help="output format [default: csv]")
    parser.add_argument("--out", help="output path ('-' = stdout) [default: stdout]")
    parser.add_argument("--cache-dir", dest="cache_dir", help="coefficient cache directory")
    parser.add_argument("--config", help="key=value config file (flags still win)")


def _read_config_file(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args) -> Dict[str, object]:
    """Precedence: flags > config file > defaults."""
    resolved = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        file_values = _read_config_file(config_path)
        for key, value in file_values.items():
            if key not in DEFAULTS:
                print(f"warning: ignoring unknown config key {key!r}", file=sys.stderr)
                continue
            if key in ("bits", "weight", "level", "sign"):
                resolved[key] = int(value)
            else:
                resolved[key] = value
    for key in DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
    if resolved["cache_dir"] is None:
        resolved["cache_dir"] = os.environ.get(
            CACHE_ENV, str(Path.home() / ".cache" / "lfapprox")
        )
    return resolved


def _spec_from(resolved: Dict[str, object]) -> EigenformSpec:
    if resolved["coeff_file"]:
        if resolved["weight"] is None:
            raise ValueError("--weight is required with --coeff-file")
        return EigenformSpec(
            weight_k=int(resolved["weight"]),
            level_C=int(resolved["level"]),
            sign_exponent_P=int(resolved["sign"]),
        )
    if resolved["form"] != "delta":
        raise ValueError(f"unknown builtin form {resolved['form']!r}")
    return delta_spec()


def _cache_path(resolved: Dict[str, object], spec: EigenformSpec) -> Path:
    name = f"{resolved['form']}_k{spec.weight_k}_C{spec.level_C}_P{spec.sign_exponent_P}.txt"
    return Path(str(resolved["cache_dir"])) / name


def _cached_nmax(path: Path) -> int:
    """nmax recorded in a cache file header; 0 when absent/unreadable."""
    if not path.exists():
        return 0
    try:
        with open(path, "r", encoding="ascii") as fh:
            fields = parse_header(fh.readline().rstrip("\n"))
        return int(fields["nmax"]) if fields and "nmax" in fields else 0
    except (OSError, ParseError, KeyError):
        return 0


def _delta_table(resolved: Dict[str, object], spec: EigenformSpec, n_max: int,
                 ctx: PrecisionContext) -> CoefficientTable:
    cache = _cache_path(resolved, spec)
    if _cached_nmax(cache) >= n_max:
        full = load_coefficients(cache, spec, ctx)
        if full.n_max == n_max:
            return full
        return CoefficientTable(n_max=n_max, coeffs=tuple(full.coeffs[: n_max + 1]),
                                source=full.source)
    table = delta_coefficients(n_max)
    cache.parent.mkdir(parents=True, exist_ok=True)
    save_coefficients(table, spec, cache)
    return table


def _table_for(resolved: Dict[str, object], spec: EigenformSpec, n_max: int,
               ctx: PrecisionContext) -> CoefficientTable:
    if resolved["coeff_file"]:
        table = load_coefficients(str(resolved["coeff_file"]), spec, ctx)
        if table.n_max < n_max:
            raise CutoffError(
                f"coefficient file covers n <= {table.n_max}, need {n_max}"
            )
        return table
    return _delta_table(resolved, spec, n_max, ctx)


def _parse_modes(text: str) -> List[object]:
    modes: List[object] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        modes.append("full" if token == "full" else int(token))
    if not modes:
        raise ValueError("at least one mode is required")
    return modes


def _mode_label(mode) -> str:
    return "Z" if mode == "full" else f"Z_{mode}"


def _meta(resolved: Dict[str, object], **extra) -> Dict[str, object]:
    meta = {
        "tool": "lfapprox",
        "version": __version__,
        "form": resolved["form"] if not resolved["coeff_file"] else str(resolved["coeff_file"]),
        "bits": resolved["bits"],
        "target_abs_error": str(resolved["target_error"]),
    }
    meta.update(extra)
    return meta


def _maybe_plot(resolved: Dict[str, object], args, draw) -> Optional[str]:
    """Render a figure next to the delimited output unless disabled."""
    if getattr(args, "no_plot", False):
        return None
    explicit = getattr(args, "plot", None)
    out = resolved["out"]
    if explicit:
        path = explicit
    elif out and out != "-":
        path = str(Path(out).with_suffix(".png"))
    else:
        return None
    draw(path)
    return path


# ----------------------------------------------------------------------
# subcommands

def cmd_coeffs(args) -> int:
    resolved = _resolve(args)
    spec = _spec_from(resolved)
    ctx = PrecisionContext(bits=int(resolved["bits"]))
    if resolved["coeff_file"]:
        table = load_coefficients(str(resolved["coeff_file"]), spec, ctx)
        if table.n_max < args.nmax:
            raise CutoffError(f"file covers n <= {table.n_max}, need {args.nmax}")
        table = CoefficientTable(n_max=args.nmax, coeffs=tuple(table.coeffs[: args.nmax + 1]),
                                 source=table.source)
    else:
        table = _delta_table(resolved, spec, args.nmax, ctx)
    out = resolved["out"] or "-"
    if out == "-":
        sys.stdout.write(format_header(spec, table.n_max) + "\n")
        for n in range(1, table.n_max + 1):
            sys.stdout.write(f"{n} {table.coeffs[n]}\n")
    else:
        save_coefficients(table, spec, out)
    return 0


def cmd_zfunc(args) -> int:
    resolved = _resolve(args)
    spec = _spec_from(resolved)
    ctx = PrecisionContext(bits=int(resolved["bits"]))
    cfg = ApproxConfig(N=1, target_abs_error=str(resolved["target_error"]))
    modes = _parse_modes(args.modes)
    with ctx.work():
        cutoff = choose_cutoff(mp.mpc(mp.mpf(spec.weight_k) / 2, 0), spec, cfg, ctx)
    table = _table_for(resolved, spec, max(cutoff, 16), ctx)

    with ctx.work():
        t_lo, t_hi, step = mp.mpf(args.t_lo), mp.mpf(args.t_hi), mp.mpf(args.step)
        ts = []
        t = t_lo
        while t <= t_hi + step / 2:
            ts.append(t)
            t += step
        series = {}
        for mode in modes:
            try:
                series[_mode_label(mode)] = [
                    z_function(t, mode, table, spec, cfg, ctx) for t in ts
                ]
            except PrecisionError as exc:
                raise PrecisionError(f"{exc} (mode {_mode_label(mode)})") from exc

    columns = ["t"] + list(series)
    rows = [[ts[i]] + [series[label][i] for label in series] for i in range(len(ts))]
    doc = build_document(
        _meta(resolved, command="zfunc", t_lo=str(args.t_lo), t_hi=str(args.t_hi),
              step=str(args.step), modes=args.modes, series_cutoff=cutoff),
        columns, rows, bits=int(resolved["bits"]),
    )
    text = render(doc, str(resolved["format"]), resolved["out"])
    if not resolved["out"] or resolved["out"] == "-":
        sys.stdout.write(text)

    def draw(path):
        from .plotting import plot_z_grid

        plot_z_grid(ts, series, path)

    _maybe_plot(resolved, args, draw)
    return 0


def cmd_zeros(args) -> int:
    resolved = _resolve(args)
    spec = _spec_from(resolved)
    ctx = PrecisionContext(bits=int(resolved["bits"]))
    cfg = ApproxConfig(N=1, target_abs_error=str(resolved["target_error"]))
    modes = _parse_modes(args.modes)
    with ctx.work():
        cutoff = choose_cutoff(mp.mpc(mp.mpf(spec.weight_k) / 2, 0), spec, cfg, ctx)
    table = _table_for(resolved, spec, max(cutoff, 16), ctx)

    zero_lists = {}
    for mode in modes:
        scan = scan_sign_changes(args.t_lo, args.t_hi, args.step, mode, table, spec, cfg, ctx)
        zero_lists[mode] = [
            refine_zero(bracket, mode, args.tol, table, spec, cfg, ctx)
            for bracket in scan.brackets
        ]

    ref_mode = modes[0]
    ref = zero_lists[ref_mode]
    columns = ["index", f"t0({_mode_label(ref_mode)})", "refined_error"]
    rows = [[i + 1, rec.t, rec.refined_error] for i, rec in enumerate(ref)]
    for mode in modes[1:]:
        label = _mode_label(mode)
        columns += [f"t0'({label})", f"t0-t0'({label})"]
        matches = compare_zero_lists(
            [rec.t for rec in ref], [rec.t for rec in zero_lists[mode]],
            match_window=args.match_window, ctx=ctx,
        )
        for row, match in zip(rows, matches):
            row += [match.t0_ref, match.error]
    doc = build_document(
        _meta(resolved, command="zeros", t_lo=str(args.t_lo), t_hi=str(args.t_hi),
              step=str(args.step), tol=str(args.tol), modes=args.modes,
              series_cutoff=cutoff),
        columns, rows, bits=int(resolved["bits"]),
    )
    text = render(doc, str(resolved["format"]), resolved["out"])
    if not resolved["out"] or resolved["out"] == "-":
        sys.stdout.write(text)

    if len(modes) > 1 and rows and rows[0][-1] is not None:
        def draw(path):
            from .plotting import plot_zero_errors

            errs = [row[-1] for row in rows if row[-1] is not None]
            plot_zero_errors(range(1, len(errs) + 1), errs, path)

        _maybe_plot(resolved, args, draw)
    return 0


def cmd_oracle_check(args) -> int:
    import random

    resolved = _resolve(args)
    spec = _spec_from(resolved)
    ctx = PrecisionContext(bits=int(resolved["bits"]))
    cfg = ApproxConfig(N=args.N, target_abs_error=str(resolved["target_error"]))
    with ctx.work():
        target = cfg.target(ctx)
        t_trunc = mp.mpf(args.T) if args.T else default_truncation(args.N, spec, ctx, target)
        cutoff = choose_cutoff(mp.mpc(mp.mpf(spec.weight_k) / 2, 0), spec, cfg, ctx)
    table = _table_for(resolved, spec, max(cutoff + 8, 32), ctx)

    rng = random.Random(0x5EED + args.N)
    rows = []
    worst_ratio = 0.0
    ok = True
    with ctx.work():
        for _ in range(args.samples):
            s = mp.mpc(mp.mpf(spec.weight_k) / 2 + (rng.random() - 0.5) * 4,
                       (rng.random() - 0.5) * 6)
            reg = lambda_N_regularized(s, args.N, t_trunc, table, spec, ctx)
            ser = lambda_N(s, table, spec, cfg, ctx)
            budget = (reg.tail + 2 * target) * mp.mpf(str(args.budget_scale))
            diff = abs(reg.value - ser)
            passed = diff <= budget
            ok = ok and passed
            worst_ratio = max(worst_ratio, float(diff / budget)) if budget > 0 else float("inf")
            rows.append([s, diff, budget, "PASS" if passed else "FAIL"])
    doc = build_document(
        _meta(resolved, command="oracle-check", N=args.N,
              T_trunc=num_str(t_trunc, int(resolved["bits"])),
              series_cutoff=cutoff, budget_scale=str(args.budget_scale),
              result="PASS" if ok else "FAIL"),
        ["s", "abs_difference", "budget", "status"], rows, bits=int(resolved["bits"]),
    )
    text = render(doc, str(resolved["format"]), resolved["out"])
    if not resolved["out"] or resolved["out"] == "-":
        sys.stdout.write(text)
    print(f"oracle-check: {'PASS' if ok else 'FAIL'} "
          f"(worst |diff|/budget = {worst_ratio:.3g})", file=sys.stderr)
    return 0 if ok else 3


def cmd_equidist(args) -> int:
    resolved = _resolve(args)
    ctx = PrecisionContext(bits=int(resolved["bits"]))
    report = equidist_probe(args.p, args.q, args.M, ctx)
    doc = build_document(
        _meta(resolved, command="equidist"),
        ["p", "q", "M", "min_scaled", "argmin", "discrepancy"],
        [[report.p, report.q, report.M, report.min_scaled, report.argmin,
          report.discrepancy]],
        bits=int(resolved["bits"]),
    )
    text = render(doc, str(resolved["format"]), resolved["out"])
    if not resolved["out"] or resolved["out"] == "-":
        sys.stdout.write(text)
    return 0


def cmd_fetch(args) -> int:
    """Download coefficient data (JSON array or 'n value' text) and write
    the normalized coefficient file.  Acceptance runs never need this."""
    import json
    import urllib.request

    resolved = _resolve(args)
    spec = _spec_from(resolved)
    with urllib.request.urlopen(args.url) as response:
        payload = response.read().decode("utf-8")
    values: List[str]
    try:
        data = json.loads(payload)
        if isinstance(data, dict):
            data = data.get("data", data.get("coefficients"))
        values = [str(v) for v in data]
    except (json.JSONDecodeError, TypeError):
        values = [line.split()[1] for line in payload.splitlines()
                  if line.strip() and not line.startswith("#")]
    out = resolved["out"]
    if not out or out == "-":
        raise ValueError("fetch requires --out FILE")
    with open(out, "w", encoding="ascii") as fh:
        fh.write(format_header(spec, len(values)) + "\n")
        for n, v in enumerate(values, start=1):
            fh.write(f"{n} {v}\n")
    print(f"wrote {len(values)} coefficients to {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfapprox",
        description="Truncated-Euler-product approximations to completed "
                    "L-functions: evaluation, error analysis, zero finding.",
    )
    parser.add_argument("--version", action="version", version=f"lfapprox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="generate or re-serve Fourier coefficients")
    _add_common(p)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("zfunc", help="tabulate Z(t) and approximations on a grid")
    _add_common(p)
    p.add_argument("--t-lo", dest="t_lo", default="0")
    p.add_argument("--t-hi", dest="t_hi", default="30")
    p.add_argument("--step", default="0.25")
    p.add_argument("--modes", default="full,1,2,3",
                   help="comma list: full and/or Euler-factor counts")
    p.add_argument("--plot", help="explicit figure path (PNG)")
    p.add_argument("--no-plot", dest="no_plot", action="store_true")
    p.set_defaults(func=cmd_zfunc)

    p = sub.add_parser("zeros", help="locate and compare critical-line zeros")
    _add_common(p)
    p.add_argument("--t-lo", dest="t_lo", default="0")
    p.add_argument("--t-hi", dest="t_hi", default="30")
    p.add_argument("--step", default="0.05")
    p.add_argument("--tol", default="1e-12")
    p.add_argument("--modes", default="full,3")
    p.add_argument("--match-window", dest="match_window", default="0.5")
    p.add_argument("--plot", help="explicit figure path (PNG)")
    p.add_argument("--no-plot", dest="no_plot", action="store_true")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("oracle-check",
                       help="compare the series and regularization definitions")
    _add_common(p)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--T", help="pole-sum truncation height (default: derived)")
    p.add_argument("--budget-scale", dest="budget_scale", default="1.0",
                   help="scale the pass budget (0 forces FAIL; harness self-test)")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("equidist", help="log-prime-ratio equidistribution probe")
    _add_common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, default=100_000)
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser("fetch", help="download coefficients from a database export URL")
    _add_common(p)
    p.add_argument("--url", required=True)
    p.set_defaults(func=cmd_fetch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except _PRECISION_ERRORS as exc:
        print(f"precision/convergence failure: {exc}", file=sys.stderr)
        return 3
    except _IO_ERRORS as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
