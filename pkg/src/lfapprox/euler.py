"""Local Euler factors, their reciprocal roots and pole lattices, the
archimedean factor, and the truncated Euler product.

Each good-prime factor is the reciprocal of a quadratic in p^-s whose
roots alpha_1, alpha_2 satisfy alpha_1 + alpha_2 = a_p and
alpha_1 alpha_2 = chi(p) p^(k-1), with |alpha_i| = p^((k-1)/2).  Its
poles form one or two arithmetic progressions on the vertical line
Re(s) = (k-1)/2 with spacing 2 pi / log p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from .eigenform import CoefficientTable, EigenformSpec
from .errors import PoleError, ToleranceError
from .numerics import PrecisionContext, _gamma_w, _near_nonpositive_integer
from .primes import first_n_primes

__all__ = [
    "LocalFactor",
    "PoleLattice",
    "Coincidence",
    "local_roots",
    "make_local_factor",
    "local_factor_eval",
    "gamma_factor_eval",
    "truncated_euler_eval",
    "pole_lattice",
    "enumerate_poles",
    "detect_coincident_poles",
]


@dataclass(frozen=True)
class LocalFactor:
    """One Euler factor L_p(s) = (1 - a_p p^-s + chi(p) p^(k-1) p^-2s)^-1."""

    p: int
    a_p: object
    chi_p: object
    weight_k: int
    alpha1: object  # larger-magnitude reciprocal root
    alpha2: object

    @property
    def degenerate(self) -> bool:
        """True when chi(p) = 0 (p divides the level): degree <= 1."""
        return self.chi_p == 0


def local_roots(p: int, a_p, chi_p, k: int, ctx: PrecisionContext):
    """Roots of X^2 - a_p X + chi(p) p^(k-1), larger magnitude first.

    Uses the numerically stable form: the dominant root from the
    quadratic formula with the non-cancelling sign, the companion from
    the product identity.  For p not dividing the level the Petersson
    bound |alpha_i| = p^((k-1)/2) is asserted to 2^-(bits/2); failure
    signals bad coefficient data.
    """
    with ctx.work():
        a_p = mp.mpc(a_p)
        c = mp.mpc(chi_p) * mp.mpf(p) ** (k - 1)
        disc = mpmath.sqrt(a_p * a_p - 4 * c)
        if mpmath.re(mpmath.conj(a_p) * disc) < 0:
            disc = -disc
        alpha1 = (a_p + disc) / 2
        alpha2 = (c / alpha1) if alpha1 != 0 else mp.mpc(0)
        if chi_p != 0:
            target = mp.mpf(p) ** (mp.mpf(k - 1) / 2)
            rel = max(abs(abs(alpha1) - target), abs(abs(alpha2) - target)) / target
            if rel > ctx.coincidence_tol:
                raise ToleranceError(
                    f"local roots at p={p} violate |alpha| = p^((k-1)/2) "
                    f"(relative deviation {mpmath.nstr(rel, 5)}); check the coefficient data"
                )
        return ctx.finalize(alpha1), ctx.finalize(alpha2)


def make_local_factor(
    p: int, table: CoefficientTable, spec: EigenformSpec, ctx: PrecisionContext
) -> LocalFactor:
    if p > table.n_max:
        raise IndexError(f"coefficient table too short for prime {p}")
    a_p = table.a(p)
    chi_p = spec.chi_value(p)
    alpha1, alpha2 = local_roots(p, a_p, chi_p, spec.weight_k, ctx)
    return LocalFactor(p=p, a_p=a_p, chi_p=chi_p, weight_k=spec.weight_k,
                       alpha1=alpha1, alpha2=alpha2)


def _local_factor_w(factor: LocalFactor, s, ctx: PrecisionContext):
    """L_p(s) at working precision; PoleError near a lattice point."""
    p = mp.mpf(factor.p)
    u = p ** (-s)
    logp = mpmath.log(p)
    tol = ctx.coincidence_tol * logp
    den = mp.mpc(1)
    for alpha in (factor.alpha1, factor.alpha2):
        if alpha == 0:
            continue
        d = 1 - alpha * u
        # |1 - alpha p^-s| ~ log(p) |s - s_star| near a pole
        if abs(d) < tol:
            raise PoleError(
                f"local factor p={factor.p}: s within pole tolerance "
                f"(|1 - alpha p^-s| = {mpmath.nstr(abs(d), 5)})"
            )
        den *= d
    return 1 / den


def local_factor_eval(factor: LocalFactor, s, ctx: PrecisionContext):
    """Value of L_p at s (s off the pole lattice)."""
    with ctx.work():
        val = _local_factor_w(factor, mp.mpc(s), ctx)
    return ctx.finalize(val)


def _gamma_factor_w(s, spec: EigenformSpec, ctx: PrecisionContext):
    """g(s) = C^(s/2) (2 pi)^-s Gamma(s) at working precision."""
    if _near_nonpositive_integer(s, ctx.coincidence_tol):
        raise PoleError(f"gamma factor evaluated at a pole: s = {mpmath.nstr(s, 10)}")
    c_half = mp.mpf(spec.level_C) ** (s / 2)
    return c_half * (2 * mp.pi) ** (-s) * _gamma_w(s)


def gamma_factor_eval(s, spec: EigenformSpec, ctx: PrecisionContext):
    with ctx.work():
        val = _gamma_factor_w(mp.mpc(s), spec, ctx)
    return ctx.finalize(val)


def _truncated_euler_w(
    s, N: int, spec: EigenformSpec, factors: Sequence[LocalFactor], ctx: PrecisionContext
):
    val = _gamma_factor_w(s, spec, ctx)
    for factor in factors[:N]:
        val *= _local_factor_w(factor, s, ctx)
    return val


def truncated_euler_eval(
    s,
    N: int,
    spec: EigenformSpec,
    table: CoefficientTable,
    ctx: PrecisionContext,
    factors: Optional[Sequence[LocalFactor]] = None,
):
    """g(s) * prod over the first N Euler factors; N = 0 gives g(s) alone."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if factors is None:
        factors = [make_local_factor(p, table, spec, ctx) for p in first_n_primes(N)]
    with ctx.work():
        val = _truncated_euler_w(mp.mpc(s), N, spec, factors, ctx)
    return ctx.finalize(val)


@dataclass(frozen=True)
class PoleLattice:
    """Arithmetic progressions of poles of one local factor.

    Each family j is {re_line + (I_j + 2 pi n / log p) i : n integer};
    base ordinates use the principal branch, I_j in (-pi/log p, pi/log p].
    ``double_poles`` marks the two families coinciding mod the spacing.
    """

    p: int
    re_line: object
    base_ordinates: Tuple[object, ...]
    spacing: object
    double_poles: bool

    @property
    def family_order(self) -> int:
        return 2 if self.double_poles else 1


def pole_lattice(factor: LocalFactor, ctx: PrecisionContext) -> PoleLattice:
    """Pole lattice of L_p from its reciprocal roots (alpha p^-s = 1)."""
    with ctx.work():
        p = mp.mpf(factor.p)
        logp = mpmath.log(p)
        spacing = 2 * mp.pi / logp
        bases = []
        re_line = None
        for alpha in (factor.alpha1, factor.alpha2):
            if alpha == 0:
                continue
            w = mpmath.log(mp.mpc(alpha)) / logp  # principal branch
            re_line = mpmath.re(w)
            bases.append(mpmath.im(w))
        if re_line is None:
            # chi(p) = 0 and a_p = 0: the factor is identically 1
            return PoleLattice(p=factor.p, re_line=ctx.mpf(0), base_ordinates=(),
                               spacing=ctx.finalize(spacing), double_poles=False)
        double = False
        if len(bases) == 2:
            delta = (bases[0] - bases[1]) / spacing
            delta -= mpmath.nint(delta)
            double = abs(delta) * spacing < ctx.coincidence_tol
            if double:
                bases = bases[:1]
        return PoleLattice(
            p=factor.p,
            re_line=ctx.finalize(re_line),
            base_ordinates=tuple(ctx.finalize(b) for b in bases),
            spacing=ctx.finalize(spacing),
            double_poles=double,
        )


def _lattice_points_w(lattice: PoleLattice, T) -> List[Tuple[object, int]]:
    """Lattice points with |Im| <= T at working precision, sorted, with
    cross-family coincidences merged into higher-order points."""
    points: List[Tuple[object, int]] = []
    for base in lattice.base_ordinates:
        n_lo = int(mpmath.ceil((-T - base) / lattice.spacing))
        n_hi = int(mpmath.floor((T - base) / lattice.spacing))
        for n in range(n_lo, n_hi + 1):
            im = base + n * lattice.spacing
            if abs(im) <= T:
                points.append((mp.mpc(lattice.re_line, im), lattice.family_order))
    points.sort(key=lambda item: mpmath.im(item[0]))
    merged: List[Tuple[object, int]] = []
    for loc, order in points:
        if merged and abs(loc - merged[-1][0]) < mp.mpf(2) ** (-mp.prec // 2):
            merged[-1] = (merged[-1][0], merged[-1][1] + order)
        else:
            merged.append((loc, order))
    return merged


def enumerate_poles(factor: LocalFactor, T, ctx: PrecisionContext) -> List[Tuple[object, int]]:
    """All poles of L_p with |Im| <= T as (location, order), sorted by ordinate.

    Order 2 where the two root families coincide within 2^-(bits/2).
    """
    lattice = pole_lattice(factor, ctx)
    with ctx.work():
        T = mp.mpf(T)
        if T <= 0:
            raise ValueError("T must be positive")
        return [(ctx.finalize(loc), order) for loc, order in _lattice_points_w(lattice, T)]


@dataclass(frozen=True)
class Coincidence:
    """A pair of poles from different primes closer than tolerance."""

    p: int
    q: int
    location_p: object
    location_q: object
    distance: object


def detect_coincident_poles(
    lattices: Sequence[PoleLattice], T, tol, ctx: PrecisionContext
) -> List[Coincidence]:
    """All cross-prime pole pairs within distance tol, |Im| <= T.

    The tolerance must be at least 2^-(bits/2): closer pairs are not
    numerically distinguishable from true coincidences.
    """
    with ctx.work():
        T = mp.mpf(T)
        tol = mp.mpf(tol)
        if tol < ctx.coincidence_tol:
            raise ValueError("tol must be >= 2^-(bits/2)")
        enumerated = [(lat.p, _lattice_points_w(lat, T)) for lat in lattices]
        found: List[Coincidence] = []
        for i, (p, poles_p) in enumerate(enumerated):
            for q, poles_q in enumerated[i + 1 :]:
                if p == q:
                    continue
                for loc_p, _ in poles_p:
                    for loc_q, _ in poles_q:
                        dist = abs(loc_p - loc_q)
                        if dist <= tol:
                            found.append(
                                Coincidence(p=p, q=q,
                                            location_p=ctx.finalize(loc_p),
                                            location_q=ctx.finalize(loc_q),
                                            distance=ctx.finalize(dist))
                            )
        return found
