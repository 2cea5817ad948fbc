"""Independent oracle construction: principal parts of the truncated
Euler product at its pole set, the regularized ("ingoing") function and
its symmetrization, sparse rectangular contours, the vertical-line error
integral, and equidistribution diagnostics for log-prime ratios.

The infinite pole sum is truncated at ordinate T_trunc (which also caps
the archimedean pole count); every truncated value is returned together
with an estimate of the neglected tail, driven by the gamma-decay of the
measured leading Laurent coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .approximation import ApproxConfig, _series_sum_w, choose_cutoff
from .eigenform import CoefficientTable, EigenformSpec
from .errors import PoleError, RegimeError, SearchError, SeparationError
from .euler import (
    LocalFactor,
    PoleLattice,
    _gamma_factor_w,
    _lattice_points_w,
    _truncated_euler_w,
    make_local_factor,
    pole_lattice,
)
from .numerics import PrecisionContext
from .primes import first_n_primes, is_prime, nth_prime

__all__ = [
    "PrincipalPart",
    "TruncatedValue",
    "SparseContour",
    "PpBoundReport",
    "EquidistReport",
    "laurent_principal_part",
    "principal_part_sum",
    "lambda_N_regularized",
    "default_truncation",
    "sparse_contour",
    "pp_bound_probe",
    "error_integral",
    "equidist_probe",
]


@dataclass(frozen=True)
class PrincipalPart:
    """Singular Laurent data at one pole (or coincidence cluster).

    ``coeffs`` holds rho^(-order), ..., rho^(-1).
    """

    pole: object
    order: int
    coeffs: Tuple[object, ...]

    def __post_init__(self):
        if self.order != len(self.coeffs) or self.order < 1:
            raise ValueError("coeffs must hold exactly `order` entries, order >= 1")

    def eval(self, s):
        u = 1 / (s - self.pole)
        acc = mp.mpc(0)
        for c in self.coeffs:  # deepest first
            acc = (acc + c) * u
        return acc


@dataclass(frozen=True)
class TruncatedValue:
    """A truncated infinite sum plus the estimate of its neglected tail."""

    value: object
    tail: object


# ----------------------------------------------------------------------
# numeric Laurent coefficients on a circle

def _contour_laurent_w(f: Callable, center, radius, max_order: int, ctx: PrecisionContext):
    """Principal-part coefficients rho^(-1)..rho^(-max_order) of f about
    ``center`` by the trapezoid rule on |s - center| = radius, doubling the
    resolution (with sample reuse) until successive results agree.

    Returns (coeffs ordered rho^(-1)..rho^(-max_order), max |f| on circle).
    """
    agree_tol = mp.mpf(2) ** (-ctx.bits + 16)
    samples: Dict[object, object] = {}

    def coefficients(m_points: int):
        acc = [mp.mpc(0)] * max_order
        max_abs = mp.mpf(0)
        for j in range(m_points):
            frac = mp.mpf(j) / m_points
            val = samples.get(frac)
            if val is None:
                val = f(center + radius * mpmath.expjpi(2 * frac))
                samples[frac] = val
            max_abs = max(max_abs, abs(val))
            for m in range(1, max_order + 1):
                acc[m - 1] += val * mpmath.expjpi(2 * frac * m)
        scale = [radius**m / m_points for m in range(1, max_order + 1)]
        return [a * sc for a, sc in zip(acc, scale)], max_abs

    prev = None
    m_points = max(32, 8 * (max_order + 1))
    for _ in range(8):
        cur, max_abs = coefficients(m_points)
        if prev is not None:
            # a coefficient below the rounding floor is structurally zero;
            # only demand relative agreement above it
            floors = [max_abs * radius**m * mp.mpf(2) ** (-ctx.bits)
                      for m in range(1, max_order + 1)]
            if all(
                abs(c - p) <= max(agree_tol * abs(c), floor)
                for c, p, floor in zip(cur, prev, floors)
            ):
                return cur, max_abs
        prev = cur
        m_points *= 2
    raise SeparationError(
        f"Laurent coefficients did not stabilize at {m_points // 2} circle points"
    )


def _trim_order(coeffs, max_abs, radius, ctx: PrecisionContext) -> Tuple[object, ...]:
    """Drop trailing coefficients indistinguishable from quadrature noise;
    returns rho^(-order)..rho^(-1) order."""
    noise = [max_abs * radius**m * mp.mpf(2) ** (-ctx.bits + 24) for m in range(1, len(coeffs) + 1)]
    order = len(coeffs)
    while order > 1 and abs(coeffs[order - 1]) <= noise[order - 1]:
        order -= 1
    return tuple(reversed(coeffs[:order]))


# ----------------------------------------------------------------------
# pole model for a fixed truncation

def _euler_evaluator(N: int, spec, table, ctx) -> Tuple[Callable, List[LocalFactor]]:
    factors = [make_local_factor(p, table, spec, ctx) for p in first_n_primes(N)]

    def f(s):
        return _truncated_euler_w(s, N, spec, factors, ctx)

    return f, factors


def _cluster_poles(points: Sequence[Tuple[object, int]], tol) -> List[Tuple[object, int]]:
    """Merge points closer than tol (locations averaged, orders added)."""
    merged: List[List] = []
    for loc, order in sorted(points, key=lambda it: (mpmath.im(it[0]), mpmath.re(it[0]))):
        if merged and abs(loc - merged[-1][0]) < tol:
            prev_loc, prev_order = merged[-1]
            merged[-1] = [(prev_loc * prev_order + loc * order) / (prev_order + order),
                          prev_order + order]
        else:
            merged.append([loc, order])
    return [(loc, order) for loc, order in merged]


class _RegularizedModel:
    """Principal parts of the truncated Euler product inside |Im| <= T_trunc,
    with a measured-envelope estimate for what the truncation drops."""

    def __init__(self, N: int, T_trunc, table: CoefficientTable,
                 spec: EigenformSpec, ctx: PrecisionContext):
        self.N = N
        self.spec = spec
        self.ctx = ctx
        self.table = table  # keeps the cache key's id() valid
        with ctx.work():
            self.T = mp.mpf(T_trunc)
            if self.T <= 4:
                raise ValueError("T_trunc too small to cover the central poles")
            self.euler_eval, self.factors = _euler_evaluator(N, spec, table, ctx)
            finite = []
            for factor in self.factors:
                lattice = pole_lattice(factor, ctx)
                finite.extend(_lattice_points_w(lattice, self.T))
            finite = _cluster_poles(finite, ctx.coincidence_tol)
            self.n_gamma = int(mpmath.floor(self.T))
            gamma_poles = [(mp.mpc(-n, 0), 1) for n in range(0, self.n_gamma + 1)]
            all_points = finite + gamma_poles
            locations = [loc for loc, _ in all_points]
            self.parts: List[PrincipalPart] = []
            for loc, order in all_points:
                dmin = min(
                    (abs(loc - other) for other in locations if other is not loc),
                    default=mp.mpf(1),
                )
                if dmin < 16 * ctx.coincidence_tol:
                    raise SeparationError(
                        f"pole at {mpmath.nstr(loc, 8)} inseparable after clustering"
                    )
                radius = min(dmin / 8, mp.mpf(1) / 4)
                coeffs, max_abs = _contour_laurent_w(
                    self.euler_eval, loc, radius, order, ctx
                )
                trimmed = _trim_order(coeffs, max_abs, radius, ctx)
                self.parts.append(
                    PrincipalPart(pole=loc, order=len(trimmed), coeffs=trimmed)
                )
            self._fit_tail_envelope()

    def _fit_tail_envelope(self):
        """Calibrate |rho^(-1)| ~ A (1+|t|)^q e^(-pi t / 2) on the computed
        lattice parts; the tail estimate integrates this beyond T."""
        k = self.spec.weight_k
        self._env_q = mp.mpf(k - 1) / 2 + mp.mpf("1.5")  # gamma polynomial + near-coincidence slack
        A = mp.mpf(0)
        re_line = mp.mpf(k - 1) / 2
        for part in self.parts:
            t = abs(mpmath.im(part.pole))
            if abs(mpmath.re(part.pole) - re_line) > mp.mpf(1) / 2:
                continue  # gamma poles handled separately
            lead = abs(part.coeffs[-1])
            A = max(A, lead * mpmath.exp(mp.pi * t / 2) / (1 + t) ** self._env_q)
        self._env_A = A
        # per-step decay of the slowest lattice (largest spacing = smallest prime)
        spacing_min = 2 * mp.pi / mpmath.log(mp.mpf(nth_prime(self.N))) if self.N >= 1 else mp.mpf(2)
        self._env_step = min(spacing_min, mp.mpf(2))
        # archimedean side: residues fall at least as fast as x/(n+1) per step
        gamma_parts = [p for p in self.parts if abs(mpmath.im(p.pole)) < mp.mpf(1) / 2
                       and mpmath.re(p.pole) <= 0]
        self._gamma_last = abs(gamma_parts[-1].coeffs[-1]) if gamma_parts else mp.mpf(0)
        self._gamma_ratio = 2 * mp.pi / (mpmath.sqrt(mp.mpf(self.spec.level_C)) * (self.n_gamma + 1))

    def tail_estimate(self, s):
        """Estimated magnitude of the neglected principal parts at s."""
        safety = mp.mpf(64)
        k = self.spec.weight_k
        # distance from s to the un-enumerated part of the lattice lines
        d_lat = max(self.T - abs(mpmath.im(s)), abs(mpmath.re(s) - mp.mpf(k - 1) / 2), mp.mpf(1) / 2)
        step = self._env_step
        ratio = mpmath.exp(-mp.pi * step / 2) * ((1 + self.T + step) / (1 + self.T)) ** self._env_q
        fin = mp.mpf(0)
        if self._env_A > 0 and ratio < 1:
            first = self._env_A * (1 + self.T) ** self._env_q * mpmath.exp(-mp.pi * self.T / 2)
            families = 2 * max(self.N, 1) * 2  # families per prime, both half-lines
            fin = families * first * ratio / (1 - ratio) / d_lat
        d_gam = max(abs(s + self.n_gamma + 1), mp.mpf(1) / 2)
        gam = mp.mpf(0)
        if self._gamma_last > 0 and self._gamma_ratio < 1:
            gam = self._gamma_last * self._gamma_ratio / (1 - self._gamma_ratio) / d_gam
        return safety * (fin + gam)

    def min_distance(self, s):
        return min(abs(s - part.pole) for part in self.parts)

    def pp_sum(self, s):
        total = mpmath.fsum((part.eval(s) for part in self.parts), absolute=False)
        return total


_MODEL_CACHE: Dict[tuple, _RegularizedModel] = {}


def _get_model(N: int, T_trunc, table, spec, ctx) -> _RegularizedModel:
    key = (id(table), table.n_max, spec, N, mpmath.nstr(mp.mpf(T_trunc), 20), ctx.work_bits)
    model = _MODEL_CACHE.get(key)
    if model is None:
        model = _RegularizedModel(N, T_trunc, table, spec, ctx)
        _MODEL_CACHE[key] = model
    return model


# ----------------------------------------------------------------------
# public operations

def laurent_principal_part(
    s_star,
    order_hint: int,
    N: int,
    table: CoefficientTable,
    spec: EigenformSpec,
    ctx: PrecisionContext,
    radius=None,
) -> PrincipalPart:
    """Principal part of the truncated Euler product at s_star, computed
    from circle integrals rho^(-m) = 1/(2 pi i) * contour of f(s)(s-s_star)^(m-1) ds.

    The circle must stay within half the distance to the nearest other
    pole; with no explicit radius, a quarter of that distance is used.
    The reported order is the largest coefficient index above quadrature
    noise (capped by order_hint + 1 probes).
    """
    if order_hint < 1:
        raise ValueError("order_hint must be >= 1")
    with ctx.work():
        s_star = mp.mpc(s_star)
        f, factors = _euler_evaluator(N, spec, table, ctx)
        # neighbors: lattice points near the target ordinate plus gamma poles
        window = abs(mpmath.im(s_star)) + 24
        neighbors: List[object] = [mp.mpc(-n, 0) for n in range(0, int(window) + 2)]
        for factor in factors:
            neighbors.extend(loc for loc, _ in _lattice_points_w(pole_lattice(factor, ctx), window))
        dists = sorted(abs(s_star - other) for other in neighbors)
        # drop the distance(s) to s_star itself / its cluster
        dmin = next((d for d in dists if d > 16 * ctx.coincidence_tol), None)
        if dmin is None:
            raise SeparationError("no isolating distance around s_star")
        if radius is None:
            radius = dmin / 4
        else:
            radius = mp.mpf(radius)
            if not 0 < radius < dmin / 2:
                raise SeparationError(
                    f"radius {mpmath.nstr(radius, 6)} not inside (0, {mpmath.nstr(dmin / 2, 6)})"
                )
        coeffs, max_abs = _contour_laurent_w(f, s_star, radius, order_hint + 1, ctx)
        trimmed = _trim_order(coeffs, max_abs, radius, ctx)
        finalized = tuple(ctx.finalize(c) for c in trimmed)
        return PrincipalPart(pole=ctx.finalize(s_star), order=len(finalized), coeffs=finalized)


def principal_part_sum(
    s, N: int, T_trunc, table: CoefficientTable, spec: EigenformSpec, ctx: PrecisionContext
) -> TruncatedValue:
    """Sum of all principal parts with |Im(pole)| <= T_trunc (and as many
    archimedean poles), evaluated at s, with the truncation tail estimate."""
    model = _get_model(N, T_trunc, table, spec, ctx)
    with ctx.work():
        s = mp.mpc(s)
        if model.min_distance(s) < 4 * ctx.coincidence_tol:
            raise PoleError("principal-part sum evaluated on the pole set")
        value = model.pp_sum(s)
        tail = model.tail_estimate(s)
    return TruncatedValue(value=ctx.finalize(value), tail=ctx.finalize(tail))


def lambda_N_regularized(
    s, N: int, T_trunc, table: CoefficientTable, spec: EigenformSpec, ctx: PrecisionContext
) -> TruncatedValue:
    """The approximation via regularization and symmetrization:

        (E - pp)(s) + (-1)^P (E - pp)(k - s),

    E the truncated Euler product.  Exact up to the reported tails."""
    model = _get_model(N, T_trunc, table, spec, ctx)
    with ctx.work():
        s = mp.mpc(s)
        k = spec.weight_k
        total = mp.mpc(0)
        tail = mp.mpf(0)
        for point, weight in ((s, 1), (k - s, spec.sign)):
            if model.min_distance(point) < 4 * ctx.coincidence_tol:
                raise PoleError("evaluation point on the pole set")
            ingoing = model.euler_eval(point) - model.pp_sum(point)
            total += weight * ingoing
            tail += model.tail_estimate(point)
    return TruncatedValue(value=ctx.finalize(total), tail=ctx.finalize(tail))


def default_truncation(N: int, spec: EigenformSpec, ctx: PrecisionContext, target) -> object:
    """Smallest tested T with the decay envelope of the dropped principal
    parts below target/8 (stepping T up by 25% per trial)."""
    with ctx.work():
        target = mp.mpf(target)
        k = spec.weight_k
        slack = mp.mpf(256) * max(N, 1)
        T = mp.mpf(24)
        for _ in range(200):
            env_fin = slack * (1 + T) ** (mp.mpf(k - 1) / 2 + 2) \
                * abs(_gamma_factor_w(mp.mpc(mp.mpf(k - 1) / 2, T), spec, ctx))
            n = int(mpmath.floor(T))
            env_gam = slack * (2 * mp.pi / mpmath.sqrt(mp.mpf(spec.level_C))) ** n \
                / mpmath.factorial(n)
            if max(env_fin, env_gam) <= target / 8:
                return ctx.finalize(T)
            T *= mp.mpf("1.25")
        raise SearchError("no truncation height satisfied the target")


# ----------------------------------------------------------------------
# sparse contours

@dataclass(frozen=True)
class SparseContour:
    """Axis-aligned rectangle keeping distance >= a from finite-place poles
    and >= b = 1/2 from the archimedean poles."""

    sigma1: object
    sigma2: object
    tau1: object
    tau2: object
    a: object
    b: object

    def boundary_samples(self, per_side: int) -> List[object]:
        pts = []
        for i in range(per_side):
            frac = mp.mpf(2 * i + 1) / (2 * per_side)
            pts.append(mp.mpc(self.sigma1 + frac * (self.sigma2 - self.sigma1), self.tau1))
            pts.append(mp.mpc(self.sigma1 + frac * (self.sigma2 - self.sigma1), self.tau2))
            pts.append(mp.mpc(self.sigma1, self.tau1 + frac * (self.tau2 - self.tau1)))
            pts.append(mp.mpc(self.sigma2, self.tau1 + frac * (self.tau2 - self.tau1)))
        return pts


def sparse_guarantee(N: int) -> object:
    """a = pi / (2 N log p_N + (4N + 2) pi): the guaranteed clearance."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return mp.pi / (2 * N * mpmath.log(mp.mpf(nth_prime(N))) + (4 * N + 2) * mp.pi)


def _scan_clear_ordinate(interval_lo, interval_hi, ordinates, a):
    """A tau in [lo, hi] at distance >= a from every listed ordinate, by
    checking midpoints of the gaps; None if no gap is wide enough."""
    inside = sorted([t for t in ordinates if interval_lo - a <= t <= interval_hi + a])
    candidates = [interval_lo, interval_hi]
    for left, right in zip(inside, inside[1:]):
        mid = (left + right) / 2
        if interval_lo <= mid <= interval_hi:
            candidates.append(mid)
    best, best_d = None, mp.mpf(-1)
    for cand in candidates:
        d = min((abs(cand - t) for t in inside), default=mp.mpf("inf"))
        if d > best_d:
            best, best_d = cand, d
    if best is None or best_d < a:
        return None
    return best


def sparse_contour(
    N: int,
    min_extent,
    spec: EigenformSpec,
    lattices: Sequence[PoleLattice],
    ctx: PrecisionContext,
) -> SparseContour:
    """An (a, 1/2)-sparse rectangle with all four sides at least min_extent
    from the origin.  Vertical sides sit at half-integer abscissae (clear of
    the archimedean poles by construction); horizontal sides are found by
    scanning a unit interval of ordinates for a point >= a from every pole
    ordinate, which the lattice counting argument guarantees to exist."""
    if min_extent <= spec.weight_k:
        raise SearchError("min_extent must exceed the weight")
    with ctx.work():
        ext = mp.mpf(min_extent)
        a = sparse_guarantee(N)
        b = mp.mpf(1) / 2
        sigma1 = -mpmath.floor(ext) - b
        sigma2 = max(ext, mp.mpf(spec.weight_k + 1)) + b
        ordinates: List[object] = []
        for lattice in lattices:
            height = ext + 2
            for base in lattice.base_ordinates:
                n_lo = int(mpmath.ceil((-height - base) / lattice.spacing))
                n_hi = int(mpmath.floor((height - base) / lattice.spacing))
                ordinates.extend(base + n * lattice.spacing for n in range(n_lo, n_hi + 1))
        tau2 = _scan_clear_ordinate(ext, ext + 1, ordinates, a)
        tau1 = _scan_clear_ordinate(-ext - 1, -ext, ordinates, a)
        if tau1 is None or tau2 is None:
            raise SearchError("no sparse ordinate found in the scan interval")
        return SparseContour(
            sigma1=ctx.finalize(sigma1), sigma2=ctx.finalize(sigma2),
            tau1=ctx.finalize(tau1), tau2=ctx.finalize(tau2),
            a=ctx.finalize(a), b=ctx.finalize(b),
        )


@dataclass(frozen=True)
class PpBoundReport:
    """Empirical constant for the (1+|s|)-weighted principal-part bound."""

    K_estimate: object
    K_larger: object
    contour: SparseContour
    contour_larger: SparseContour
    samples_per_side: int

    @property
    def stable(self) -> bool:
        return self.K_larger <= 2 * self.K_estimate


def pp_bound_probe(
    contour: SparseContour,
    N: int,
    T_trunc,
    samples: int,
    table: CoefficientTable,
    spec: EigenformSpec,
    ctx: PrecisionContext,
) -> PpBoundReport:
    """max over boundary samples of (1 + |s|) |pp(s)|, on the given contour
    and on a ~50% larger sparse contour, as a stability check."""
    if samples < 16:
        raise ValueError("samples must be >= 16 per side")
    model = _get_model(N, T_trunc, table, spec, ctx)
    lattices = [pole_lattice(f, ctx) for f in model.factors]

    def probe(c: SparseContour):
        with ctx.work():
            worst = mp.mpf(0)
            for s in c.boundary_samples(samples):
                worst = max(worst, (1 + abs(s)) * abs(model.pp_sum(s)))
            return worst

    with ctx.work():
        ext_larger = mpmath.ceil(mp.mpf(15) * max(abs(contour.sigma1), abs(contour.tau2)) / 10)
    larger = sparse_contour(N, ext_larger, spec, lattices, ctx)
    return PpBoundReport(
        K_estimate=ctx.finalize(probe(contour)),
        K_larger=ctx.finalize(probe(larger)),
        contour=contour,
        contour_larger=larger,
        samples_per_side=samples,
    )


# ----------------------------------------------------------------------
# vertical-line error integral

def error_integral(
    s0,
    sigma,
    N: int,
    quad_extent,
    table: CoefficientTable,
    spec: EigenformSpec,
    ctx: PrecisionContext,
    tol=None,
    _diff_cache: Optional[dict] = None,
):
    """Numerical value of

        1/(2 pi i) * integral over Re(s) = sigma of
            (Lambda(s) - E_N(s)) (1/(s - s0) + (-1)^P/(s - k + s0)) ds

    which equals Lambda(s0) - Lambda_N(s0).  Lambda runs through the
    series engine, E_N through the Euler-product path; the integration
    extent must put the gamma-decay tail of the integrand below tol.

    The result carries the quadrature tolerance, not 2^-bits, so the
    whole computation runs at a precision matched to tol."""
    with ctx.work():
        if tol is None:
            tol = mp.mpf(2) ** (-(ctx.bits // 2))
        tol = ctx.mpf(tol)
        tol_bits = int(mpmath.ceil(-mpmath.log(tol, 2)))
    qctx = ctx
    if tol_bits + 48 < ctx.bits:
        qctx = PrecisionContext(bits=max(96, tol_bits + 48), guard_bits=ctx.guard_bits)
    with qctx.work():
        s0 = mp.mpc(s0)
        sigma = mp.mpf(sigma)
        k = spec.weight_k
        tol = mp.mpf(tol)
        if sigma <= max(mpmath.re(s0), k - mpmath.re(s0), mp.mpf(k + 1) / 2):
            raise RegimeError(
                "sigma must exceed Re(s0), Re(k - s0) and (k+1)/2 for the line integral"
            )
        extent = mp.mpf(quad_extent)
        cfg = ApproxConfig(N=N, target_abs_error=tol / 256)
        cutoff = choose_cutoff(mp.mpc(sigma, 0), spec, cfg, qctx)
        if cutoff > table.n_max:
            raise RegimeError(f"table too short for the line integral (needs {cutoff})")
        euler_eval, _ = _euler_evaluator(N, spec, table, qctx)
        cache = _diff_cache if _diff_cache is not None else {}

        def diff(tau):
            key = (qctx.bits, mpmath.nstr(sigma, 40), mpmath.nstr(tau, 40))
            hit = cache.get(key)
            if hit is None:
                s = mp.mpc(sigma, tau)
                hit = _series_sum_w(s, table.coeffs, cutoff, spec, qctx) - euler_eval(s)
                cache[key] = hit
            return hit

        sign = spec.sign

        def integrand(tau):
            s = mp.mpc(sigma, tau)
            kern = 1 / (s - s0) + sign / (s - k + s0)
            return diff(tau) * kern

        # panel breaks independent of s0 so the diff cache is shared across calls
        pts: List[object] = [mp.mpf(0)]
        w = mp.mpf(4)
        while w < extent:
            pts.append(w)
            w *= 2
        pts.append(extent)
        panels = [-p for p in reversed(pts)] + pts[1:]
        integral = mpmath.quad(integrand, panels)
        value = integral / (2 * mp.pi)  # ds = i d tau and the 1/(2 pi i) normalization
    return ctx.finalize(value)


# ----------------------------------------------------------------------
# equidistribution diagnostics

@dataclass(frozen=True)
class EquidistReport:
    """Scan of n^2 * ||n log q / log p|| and the discrepancy of the
    fractional parts {n log q / log p}."""

    p: int
    q: int
    M: int
    min_scaled: object
    argmin: int
    discrepancy: float


def _star_discrepancy(values: List[float]) -> float:
    values = sorted(values)
    m = len(values)
    worst = 0.0
    for i, x in enumerate(values, start=1):
        worst = max(worst, x - (i - 1) / m, i / m - x)
    return worst


def equidist_probe(p: int, q: int, M: int, ctx: PrecisionContext) -> EquidistReport:
    """min over 1 <= n <= M of n^2 * (distance of n log q / log p to the
    nearest integer), plus the star discrepancy of the fractional parts.

    High precision matters here: a double-precision fractional part of
    n * log q / log p has absolute error ~ n * 2^-53, enough to fake a
    near-vanishing term at large n.
    """
    if p == q:
        raise ValueError("p and q must be distinct primes")
    if not (is_prime(p) and is_prime(q)):
        raise ValueError("p and q must be prime")
    if M < 1000:
        raise ValueError("M must be >= 1000")
    with ctx.work():
        ratio = mpmath.log(mp.mpf(q)) / mpmath.log(mp.mpf(p))
        half = mp.mpf(1) / 2
        best = None
        best_n = 0
        fracs: List[float] = []
        for n in range(1, M + 1):
            fpart = mpmath.frac(n * ratio)
            fracs.append(float(fpart))
            dist = fpart if fpart <= half else 1 - fpart
            scaled = n * n * dist
            if best is None or scaled < best:
                best, best_n = scaled, n
        return EquidistReport(
            p=p, q=q, M=M,
            min_scaled=ctx.finalize(best),
            argmin=best_n,
            discrepancy=_star_discrepancy(fracs),
        )
