"""Production evaluation path: the completed L-function, its truncated
approximations, the error series, certified tail bounds, derivatives,
and the critical-line Z-function.

Everything here is the absolutely convergent incomplete-gamma series

    F(s) = sum_n w_n [ x_n^-s Gamma(s, x_n) + (-1)^P x_n^-(k-s) Gamma(k-s, x_n) ],
    x_n = 2 pi n / sqrt(C),

with weights w_n = a_n (full function), b_n^(N) (approximation), or
c_n^(N) (error series).  The s <-> k-s symmetry is term-by-term exact,
so the functional equation holds to rounding, not merely to the series
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import mpmath
from mpmath import mp

from .eigenform import CoefficientTable, EigenformSpec, complement_series, smooth_subseries
from .errors import CutoffError, PoleError, PrecisionError, RegimeError
from .euler import _gamma_factor_w
from .numerics import PrecisionContext, _gamma_w, _upper_inc_gamma_w, cauchy_derivative, decay_threshold
from .primes import nth_prime

__all__ = [
    "ApproxConfig",
    "Mode",
    "lambda_term",
    "lambda_full",
    "lambda_N",
    "error_series",
    "tail_bound",
    "first_term_bound",
    "first_term_bound_rosser",
    "choose_cutoff",
    "z_function",
    "derivative",
]

Mode = Union[str, int]  # "full" or an Euler-factor count N >= 1

MAX_CUTOFF = 1 << 22


@dataclass(frozen=True)
class ApproxConfig:
    """Evaluation policy: Euler-factor count, target error, optional cutoff."""

    N: int
    target_abs_error: object = "1e-30"
    n_cutoff_override: Optional[int] = None

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be >= 0")
        if self.n_cutoff_override is not None and self.n_cutoff_override < 1:
            raise ValueError("n_cutoff_override must be >= 1")

    def target(self, ctx: PrecisionContext):
        t = ctx.mpf(self.target_abs_error)
        if t <= 0:
            raise ValueError("target_abs_error must be positive")
        return t


def _x_of(n, spec: EigenformSpec):
    return 2 * mp.pi * n / mpmath.sqrt(mp.mpf(spec.level_C))


def _term_parts_w(s, ks, x, ctx: PrecisionContext, gamma_s=None, gamma_ks=None):
    """The two addends of one summand at working precision; gamma values are
    passed in so a series evaluation at fixed s computes them at most once."""
    left = x ** (-s) * _upper_inc_gamma_w(s, x, ctx, gamma_s=gamma_s)
    right = x ** (-ks) * _upper_inc_gamma_w(ks, x, ctx, gamma_s=gamma_ks)
    return left, right


def _term_w(s, ks, x, spec: EigenformSpec, ctx: PrecisionContext, gamma_s=None, gamma_ks=None):
    left, right = _term_parts_w(s, ks, x, ctx, gamma_s=gamma_s, gamma_ks=gamma_ks)
    return left + spec.sign * right


def lambda_term(s, n: int, spec: EigenformSpec, ctx: PrecisionContext):
    """x^-s Gamma(s, x) + (-1)^P x^-(k-s) Gamma(k-s, x) at x = 2 pi n / sqrt(C)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with ctx.work():
        s = mp.mpc(s)
        ks = spec.weight_k - s
        val = _term_w(s, ks, _x_of(n, spec), spec, ctx)
    return ctx.finalize(val)


def _tail_bound_w(n_start: int, s, spec: EigenformSpec, ctx: PrecisionContext,
                  m_sigma=None, m_k_sigma=None):
    """Certified bound on sum_{n >= n_start} |a_n| |term_n(s)|.

    Uses |a_n| <= d(n) n^((k-1)/2) <= n^((k+1)/2) and, once
    x = 2 pi n / sqrt(C) clears the decay thresholds of both exponents,
    |Gamma(z, x)| <= 2 e^(-x/2); the remaining sum is dominated by a
    geometric series.
    """
    k = spec.weight_k
    sigma = mpmath.re(mp.mpc(s))
    if m_sigma is None:
        m_sigma = decay_threshold(sigma, ctx)
    if m_k_sigma is None:
        m_k_sigma = decay_threshold(k - sigma, ctx)
    sqrt_c = mpmath.sqrt(mp.mpf(spec.level_C))
    x0 = 2 * mp.pi * n_start / sqrt_c
    if x0 <= max(m_sigma, m_k_sigma):
        raise RegimeError(
            f"tail bound invalid at n_start={n_start}: x={mpmath.nstr(x0, 6)} "
            f"below the decay threshold; raise n_start"
        )
    lam = mp.pi / sqrt_c
    base = 2 * mp.pi / sqrt_c
    total = mp.mpf(0)
    for w, c in (
        (mp.mpf(k + 1) / 2 - sigma, base ** (-sigma)),
        (sigma - mp.mpf(k - 1) / 2, base ** (sigma - k)),
    ):
        ratio = mpmath.exp(-lam)
        if w > 0:
            ratio *= (1 + mp.mpf(1) / n_start) ** w
        if ratio >= 1:
            raise RegimeError(
                f"tail bound not geometric at n_start={n_start}; raise n_start"
            )
        first = c * mp.mpf(n_start) ** w * mpmath.exp(-lam * n_start)
        total += first / (1 - ratio)
    return 2 * total


def tail_bound(n_start: int, s, spec: EigenformSpec, ctx: PrecisionContext):
    """Upper bound on the neglected series tail starting at n_start."""
    if n_start < 1:
        raise ValueError("n_start must be >= 1")
    with ctx.work():
        val = _tail_bound_w(n_start, s, spec, ctx)
    return ctx.finalize(val)


def choose_cutoff(s, spec: EigenformSpec, cfg: ApproxConfig, ctx: PrecisionContext) -> int:
    """Smallest n_cut with tail_bound(n_cut + 1) <= target/2, by doubling
    then bisection.  Honors cfg.n_cutoff_override."""
    if cfg.n_cutoff_override is not None:
        return cfg.n_cutoff_override
    with ctx.work():
        target = cfg.target(ctx) / 2
        sigma = mpmath.re(mp.mpc(s))
        m_sigma = decay_threshold(sigma, ctx)
        m_k_sigma = decay_threshold(spec.weight_k - sigma, ctx)

        def ok(n_cut: int) -> bool:
            try:
                return _tail_bound_w(n_cut + 1, s, spec, ctx,
                                     m_sigma=m_sigma, m_k_sigma=m_k_sigma) <= target
            except RegimeError:
                return False

        hi = 4
        while not ok(hi):
            hi *= 2
            if hi > MAX_CUTOFF:
                raise CutoffError("no certified cutoff below the search limit")
        lo = hi // 2
        while lo + 1 < hi:  # smallest good cutoff in (lo, hi]
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi


def _series_sum_w(s, weights: Sequence, cutoff: int, spec: EigenformSpec,
                  ctx: PrecisionContext, with_scale: bool = False):
    """Weighted series at working precision; with_scale additionally returns
    sum |w_n| (|left_n| + |right_n|), the magnitude the rounding noise rides on."""
    k = spec.weight_k
    ks = k - s
    gamma_s = None
    gamma_ks = None
    sqrt_c = mpmath.sqrt(mp.mpf(spec.level_C))
    split_below = max(abs(s), abs(ks)) + 1  # series regime needs Gamma(s), Gamma(k-s)
    if 2 * mp.pi / sqrt_c < split_below:
        gamma_s = _gamma_w(s)
        gamma_ks = _gamma_w(ks)
    terms = []
    scale = mp.mpf(0)
    for n in range(1, cutoff + 1):
        w = weights[n]
        if w == 0:
            continue
        left, right = _term_parts_w(s, ks, _x_of(n, spec), ctx,
                                    gamma_s=gamma_s, gamma_ks=gamma_ks)
        terms.append(w * (left + spec.sign * right))
        if with_scale:
            scale += abs(mp.mpf(w)) * (abs(left) + abs(right))
    total = mpmath.fsum(terms, absolute=False) if terms else mp.mpc(0)
    return (total, scale) if with_scale else total


class _WeightCache:
    """Mask application is O(n_max); cache per (table, mode)."""

    def __init__(self):
        self._store = {}

    def get(self, table: CoefficientTable, mode: Mode, kind: str = "smooth"):
        key = (id(table), mode, kind)
        hit = self._store.get(key)
        if hit is not None and hit[0] is table:
            return hit[1]
        if kind == "smooth":
            weights = smooth_subseries(table, int(mode))
        else:
            weights = complement_series(table, int(mode))
        self._store[key] = (table, weights)
        return weights


_weights = _WeightCache()


def lambda_full(s, table: CoefficientTable, spec: EigenformSpec,
                cfg: ApproxConfig, ctx: PrecisionContext):
    """Completed L-function via the full-coefficient series; the neglected
    tail is certified <= target_abs_error."""
    with ctx.work():
        s = mp.mpc(s)
        cutoff = choose_cutoff(s, spec, cfg, ctx)
        if cutoff > table.n_max:
            raise CutoffError(
                f"certified cutoff {cutoff} exceeds table n_max {table.n_max}"
            )
        val = _series_sum_w(s, table.coeffs, cutoff, spec, ctx)
    return ctx.finalize(val)


def lambda_N(s, table: CoefficientTable, spec: EigenformSpec,
             cfg: ApproxConfig, ctx: PrecisionContext):
    """The N-factor approximation: the same series over p_N-smooth indices."""
    if cfg.N < 1:
        raise ValueError("lambda_N needs cfg.N >= 1")
    with ctx.work():
        s = mp.mpc(s)
        cutoff = choose_cutoff(s, spec, cfg, ctx)
        if cutoff > table.n_max:
            raise CutoffError(
                f"certified cutoff {cutoff} exceeds table n_max {table.n_max}"
            )
        weights = _weights.get(table, cfg.N, "smooth")
        val = _series_sum_w(s, weights, cutoff, spec, ctx)
    return ctx.finalize(val)


def error_series(s, table: CoefficientTable, spec: EigenformSpec, N: int,
                 cfg: ApproxConfig, ctx: PrecisionContext):
    """sum c_n^(N) term_n(s): equals lambda_full - lambda_N to 2x target."""
    if N < 1:
        raise ValueError("N must be >= 1")
    with ctx.work():
        s = mp.mpc(s)
        cutoff = choose_cutoff(s, spec, cfg, ctx)
        if cutoff > table.n_max:
            raise CutoffError(
                f"certified cutoff {cutoff} exceeds table n_max {table.n_max}"
            )
        weights = _weights.get(table, N, "complement")
        val = _series_sum_w(s, weights, cutoff, spec, ctx)
    return ctx.finalize(val)


def first_term_bound(N: int, s, spec: EigenformSpec, ctx: PrecisionContext,
                     p_next: Optional[int] = None):
    """Explicit bound on the first (n = p_{N+1}) term of the error series.

    Once x = 2 pi p / sqrt(C) clears the decay thresholds of sigma and
    k - sigma this is the closed exponential form

        4 e^(-x/2) p^((k-1)/2) (x^-sigma + x^(sigma-k));

    below the threshold the sharper integrand-modulus form
    2 p^((k-1)/2) (x^-sigma Gamma(sigma, x) + x^(sigma-k) Gamma(k-sigma, x))
    applies instead (|Gamma(z, x)| <= Gamma(Re z, x) for x > 0).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    p = p_next if p_next is not None else nth_prime(N + 1)
    with ctx.work():
        k = spec.weight_k
        sigma = mpmath.re(mp.mpc(s))
        x = _x_of(p, spec)
        deligne = 2 * mp.mpf(p) ** (mp.mpf(k - 1) / 2)
        if x > max(decay_threshold(sigma, ctx), decay_threshold(k - sigma, ctx)):
            val = deligne * 2 * mpmath.exp(-x / 2) * (x ** (-sigma) + x ** (sigma - k))
        else:
            val = deligne * (
                x ** (-sigma) * abs(_upper_inc_gamma_w(mp.mpc(sigma), x, ctx))
                + x ** (sigma - k) * abs(_upper_inc_gamma_w(mp.mpc(k - sigma), x, ctx))
            )
    return ctx.finalize(val)


def first_term_bound_rosser(N: int, s, spec: EigenformSpec, ctx: PrecisionContext):
    """first_term_bound with p_{N+1} replaced by its prime-counting interval
    (n log n, n (log n + log log n)), n = N + 1: valid for N >= 5 and s in
    the open strip 0 < Re(s) < k.  Decays superexponentially in N."""
    if N < 5:
        raise RegimeError("Rosser interval needs N >= 5")
    with ctx.work():
        k = spec.weight_k
        sigma = mpmath.re(mp.mpc(s))
        if not (0 < sigma < k):
            raise RegimeError("Rosser-form bound needs 0 < Re(s) < k")
        n = mp.mpf(N + 1)
        p_lo = n * mpmath.log(n)
        p_hi = n * (mpmath.log(n) + mpmath.log(mpmath.log(n)))
        x_lo = 2 * mp.pi * p_lo / mpmath.sqrt(mp.mpf(spec.level_C))
        if x_lo <= max(decay_threshold(sigma, ctx), decay_threshold(k - sigma, ctx)):
            raise RegimeError("Rosser-form bound below decay threshold; increase N")
        val = 4 * mpmath.exp(-x_lo / 2) * p_hi ** (mp.mpf(k - 1) / 2) \
            * (x_lo ** (-sigma) + x_lo ** (sigma - k))
    return ctx.finalize(val)


def _mode_eval(mode: Mode, table, spec, cfg: ApproxConfig, ctx) -> Callable:
    if mode == "full":
        return lambda s: lambda_full(s, table, spec, cfg, ctx)
    N = int(mode)
    mode_cfg = cfg if cfg.N == N else ApproxConfig(N=N, target_abs_error=cfg.target_abs_error,
                                                   n_cutoff_override=cfg.n_cutoff_override)
    return lambda s: lambda_N(s, table, spec, mode_cfg, ctx)


def z_function(t, mode: Mode, table: CoefficientTable, spec: EigenformSpec,
               cfg: ApproxConfig, ctx: PrecisionContext):
    """Z(t) = F(k/2 + it) / |g(k/2 + it)| for F the selected evaluator.

    Real by the functional equation (for odd sign the quotient is rotated
    by -i first).  Two precision assertions guard the result: the series
    rounding noise -- the magnitude the terms ride on times 2^-work_bits --
    must stay below the target error, and the imaginary residual of the
    quotient must stay below the propagated error.  Either failure raises
    PrecisionError naming the ordinate and the bits actually needed.
    """
    with ctx.work():
        t = mp.mpf(t)
        s = mp.mpc(mp.mpf(spec.weight_k) / 2, t)
        cutoff = choose_cutoff(s, spec, cfg, ctx)
        if cutoff > table.n_max:
            raise CutoffError(
                f"certified cutoff {cutoff} exceeds table n_max {table.n_max}"
            )
        if mode == "full":
            weights: Sequence = table.coeffs
        else:
            if int(mode) < 1:
                raise ValueError("approximation mode needs N >= 1")
            weights = _weights.get(table, int(mode), "smooth")
        value, scale = _series_sum_w(s, weights, cutoff, spec, ctx, with_scale=True)
        target = cfg.target(ctx)
        noise = scale * mp.mpf(2) ** (-ctx.work_bits + 4)
        if noise > target:
            need = int(mpmath.ceil(mpmath.log(scale / target, 2))) + 4 + ctx.guard_bits
            raise PrecisionError(
                f"Z({mpmath.nstr(t, 12)}): rounding noise {mpmath.nstr(noise, 4)} exceeds "
                f"the target error {mpmath.nstr(target, 4)}; need about {need} bits"
            )
        g_abs = abs(_gamma_factor_w(s, spec, ctx))
        if g_abs == 0:
            raise PoleError("gamma factor vanished on the critical line")
        rot = mp.mpc(0, -1) ** spec.sign_exponent_P
        quot = rot * value / g_abs
        tol_im = (8 * target + noise * 16) / g_abs
        if abs(mpmath.im(quot)) > tol_im:
            raise PrecisionError(
                f"Z({mpmath.nstr(t, 12)}): imaginary residual "
                f"{mpmath.nstr(abs(mpmath.im(quot)), 5)} exceeds tolerance "
                f"{mpmath.nstr(tol_im, 5)}; increase bits"
            )
        result = mpmath.re(quot)
    return ctx.finalize(result)


def derivative(s0, order: int, mode: Mode, table: CoefficientTable,
               spec: EigenformSpec, cfg: ApproxConfig, ctx: PrecisionContext):
    """order-th s-derivative of the selected evaluator at s0, by Cauchy-circle
    differentiation.  Radius 1/2 (the integrand is entire; a small circle
    keeps the series cutoff uniform along it); the agreement tolerance
    accounts for the series error amplified by order!/radius^order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    f = _mode_eval(mode, table, spec, cfg, ctx)
    with ctx.work():
        radius = mp.mpf(1) / 2
        amplification = mpmath.factorial(order) / radius**order
        abs_tol = 4 * cfg.target(ctx) * amplification
    return cauchy_derivative(
        f, s0, order, radius, 32 * (order + 1), ctx,
        rel_tol=mp.mpf(2) ** (-ctx.bits + 8), abs_tol=abs_tol,
    )
