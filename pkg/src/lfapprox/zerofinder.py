"""Critical-line zero location: grid scan for sign changes, hybrid
bisection/secant refinement, order classification, and list comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .approximation import ApproxConfig, Mode, derivative, z_function
from .eigenform import CoefficientTable, EigenformSpec
from .errors import AmbiguityError, ToleranceError
from .euler import _gamma_factor_w

__all__ = [
    "ZeroRecord",
    "ScanResult",
    "ZeroMatch",
    "scan_sign_changes",
    "refine_zero",
    "classify_order",
    "compare_zero_lists",
    "even_order_minimum_probe",
]

# |Z| at an accepted zero may sit this many propagated-error units above noise
ACCEPT_FACTOR = 1000


@dataclass(frozen=True)
class ZeroRecord:
    """A refined critical-line zero of Z (or Z_N)."""

    t: object
    mode: Mode
    refined_error: object
    order: int
    bracket: Tuple[object, object]


@dataclass
class ScanResult:
    """Grid values of Z plus the sign-change brackets they produced."""

    ts: List[object] = field(default_factory=list)
    values: List[object] = field(default_factory=list)
    brackets: List[Tuple[object, object]] = field(default_factory=list)


def _z_evaluator(mode: Mode, table, spec, cfg, ctx) -> Callable:
    return lambda t: z_function(t, mode, table, spec, cfg, ctx)


def scan_sign_changes(
    t_lo,
    t_hi,
    step,
    mode: Mode,
    table: CoefficientTable,
    spec: EigenformSpec,
    cfg: ApproxConfig,
    ctx,
) -> ScanResult:
    """Evaluate Z on the grid t_lo, t_lo + step, ... and collect every
    consecutive pair with opposite signs.  Grid values are kept in the
    result for reuse (plotting, finer rescans)."""
    with ctx.work():
        t = mp.mpf(t_lo)
        t_hi = mp.mpf(t_hi)
        step = mp.mpf(step)
        if step <= 0:
            raise ValueError("step must be positive")
        zfun = _z_evaluator(mode, table, spec, cfg, ctx)
        result = ScanResult()
        while t <= t_hi + step / 2:
            result.ts.append(ctx.finalize(t))
            result.values.append(zfun(t))
            t += step
        for (t0, v0), (t1, v1) in zip(
            zip(result.ts, result.values), zip(result.ts[1:], result.values[1:])
        ):
            if v0 == 0:
                result.brackets.append((t0, t0))
            elif v0 * v1 < 0:
                result.brackets.append((t0, t1))
        return result


def refine_zero(
    bracket: Tuple,
    mode: Mode,
    tol,
    table: CoefficientTable,
    spec: EigenformSpec,
    cfg: ApproxConfig,
    ctx,
) -> ZeroRecord:
    """Shrink a sign-change bracket below tol: secant steps accepted while
    they keep contracting, bisection otherwise.

    ToleranceError signals that the propagated evaluation noise cannot
    support the requested tol: either the bracket slope says the zero is
    only locatable to noise/slope > tol, or the refined point fails the
    |Z| <= ACCEPT_FACTOR * noise acceptance threshold.
    """
    with ctx.work():
        lo = mp.mpf(bracket[0])
        hi = mp.mpf(bracket[1])
        tol = mp.mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        if hi < lo:
            lo, hi = hi, lo
        zfun = _z_evaluator(mode, table, spec, cfg, ctx)
        flo = zfun(lo)
        fhi = zfun(hi)
        if flo == 0:
            return ZeroRecord(t=ctx.finalize(lo), mode=mode, refined_error=ctx.finalize(tol),
                              order=1, bracket=(ctx.finalize(lo), ctx.finalize(hi)))
        if flo * fhi > 0:
            raise ValueError("bracket endpoints must have opposite signs")
        if tol < 8 * mp.eps * max(1, abs(hi)):
            raise ToleranceError("tol below representable spacing at this precision")
        noise = _noise_floor((lo + hi) / 2, spec, cfg, ctx)
        slope = abs(fhi - flo) / (hi - lo)
        if slope == 0 or 4 * noise / slope > tol:
            raise ToleranceError(
                f"evaluation noise {mpmath.nstr(noise, 4)} over bracket slope "
                f"{mpmath.nstr(slope, 4)} cannot resolve tol {mpmath.nstr(tol, 4)}; "
                f"increase bits or loosen tol"
            )
        prev_width = hi - lo
        stall = 0
        t_best = (lo + hi) / 2
        while hi - lo > tol:
            width = hi - lo
            secant = hi - fhi * (hi - lo) / (fhi - flo)
            use_secant = (stall < 2) and (lo + width / 64 < secant < hi - width / 64)
            t_best = secant if use_secant else (lo + hi) / 2
            f_next = zfun(t_best)
            if f_next == 0:
                lo = hi = t_best
                break
            if (f_next < 0) == (flo < 0):
                lo, flo = t_best, f_next
            else:
                hi, fhi = t_best, f_next
            stall = stall + 1 if (hi - lo) > prev_width * mp.mpf("0.6") else 0
            prev_width = hi - lo
        t_best = (lo + hi) / 2
        final = zfun(t_best)
        if abs(final) > ACCEPT_FACTOR * max(noise, slope * (hi - lo)):
            raise ToleranceError(
                f"|Z({mpmath.nstr(t_best, 12)})| = {mpmath.nstr(abs(final), 4)} exceeds the "
                f"zero acceptance threshold; not resolvable at this precision"
            )
        return ZeroRecord(
            t=ctx.finalize(t_best),
            mode=mode,
            refined_error=ctx.finalize((hi - lo) / 2),
            order=1,
            bracket=(ctx.finalize(lo), ctx.finalize(hi)),
        )


def _noise_floor(t, spec, cfg, ctx):
    """Propagated evaluation error of Z at ordinate t."""
    s = mp.mpc(mp.mpf(spec.weight_k) / 2, mp.mpf(t))
    return 8 * cfg.target(ctx) / abs(_gamma_factor_w(s, spec, ctx))


def classify_order(
    t0,
    mode: Mode,
    table: CoefficientTable,
    spec: EigenformSpec,
    cfg: ApproxConfig,
    ctx,
    max_order: int = 8,
    derivative_eval: Optional[Callable] = None,
) -> int:
    """Order of the zero at k/2 + i t0: the smallest m whose derivative
    magnitude clears the noise band.

    Derivative magnitudes below the propagated noise count as zero, above
    ACCEPT_FACTOR * noise as nonzero; anything in between is ambiguous.
    ``derivative_eval(order) -> value`` may replace the default evaluator
    (harness self-tests use this).
    """
    with ctx.work():
        s0 = mp.mpc(mp.mpf(spec.weight_k) / 2, mp.mpf(t0))
        radius = mp.mpf(1) / 2
        if derivative_eval is None:
            derivative_eval = lambda order: derivative(s0, order, mode, table, spec, cfg, ctx)
        for m in range(1, max_order + 1):
            value = derivative_eval(m)
            noise = 4 * cfg.target(ctx) * mpmath.factorial(m) / radius**m
            if abs(value) > ACCEPT_FACTOR * noise:
                return m
            if abs(value) > noise:
                raise AmbiguityError(
                    f"derivative order {m} at t0={mpmath.nstr(mp.mpf(t0), 12)} lies in the "
                    f"noise band [{mpmath.nstr(noise, 4)}, {mpmath.nstr(ACCEPT_FACTOR * noise, 4)}]"
                )
        raise AmbiguityError(f"no derivative up to order {max_order} cleared the noise band")


def even_order_minimum_probe(
    t_lo,
    t_hi,
    step,
    mode: Mode,
    table: CoefficientTable,
    spec: EigenformSpec,
    cfg: ApproxConfig,
    ctx,
) -> List[Tuple[object, object]]:
    """Candidate even-order zeros: grid points where |Z| has a local minimum
    below the acceptance threshold without a sign change.

    Off the default path (sign-change scanning covers the expected simple
    zeros); run on request when a dip without crossing needs checking.
    Returns (t, |Z(t)|) pairs.
    """
    scan = scan_sign_changes(t_lo, t_hi, step, mode, table, spec, cfg, ctx)
    with ctx.work():
        candidates = []
        for i in range(1, len(scan.ts) - 1):
            prev_v, cur_v, next_v = scan.values[i - 1], scan.values[i], scan.values[i + 1]
            if abs(cur_v) <= abs(prev_v) and abs(cur_v) <= abs(next_v):
                if prev_v * next_v > 0:  # no crossing
                    threshold = ACCEPT_FACTOR * _noise_floor(scan.ts[i], spec, cfg, ctx)
                    if abs(cur_v) <= threshold:
                        candidates.append((scan.ts[i], ctx.finalize(abs(cur_v))))
        return candidates


@dataclass(frozen=True)
class ZeroMatch:
    """One row of a zero-list comparison: t0, its match t0', and t0 - t0'."""

    t0: object
    t0_ref: Optional[object]
    error: Optional[object]

    @property
    def matched(self) -> bool:
        return self.t0_ref is not None


def compare_zero_lists(
    found: Sequence, reference: Sequence, match_window, ctx
) -> List[ZeroMatch]:
    """Greedy nearest matching of two sorted zero lists within a window;
    unmatched entries are flagged with an empty reference column."""
    with ctx.work():
        window = mp.mpf(match_window)
        refs = [mp.mpf(r) for r in reference]
        used = [False] * len(refs)
        rows: List[ZeroMatch] = []
        for t in found:
            t = mp.mpf(t)
            best_j = None
            best_d = None
            for j, r in enumerate(refs):
                if used[j]:
                    continue
                d = abs(t - r)
                if d <= window and (best_d is None or d < best_d):
                    best_j, best_d = j, d
            if best_j is None:
                rows.append(ZeroMatch(t0=ctx.finalize(t), t0_ref=None, error=None))
            else:
                used[best_j] = True
                rows.append(
                    ZeroMatch(
                        t0=ctx.finalize(t),
                        t0_ref=ctx.finalize(refs[best_j]),
                        error=ctx.finalize(t - refs[best_j]),
                    )
                )
        return rows
