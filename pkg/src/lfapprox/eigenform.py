"""Fourier coefficients a_n and their smooth/complement subsequences.

The modular discriminant's coefficients (the Ramanujan tau sequence) are
generated exactly from the eta-product; other eigenforms load from a
plain ``n value`` text format compatible with LMFDB exports.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import mpmath
from mpmath import mp

from .errors import NormalizationError, ParseError, ResourceError
from .numerics import PrecisionContext
from .primes import greatest_prime_factors, nth_prime

__all__ = [
    "EigenformSpec",
    "CoefficientTable",
    "SubseriesMask",
    "HeckeReport",
    "delta_spec",
    "delta_coefficients",
    "load_coefficients",
    "save_coefficients",
    "smooth_subseries",
    "complement_series",
    "hecke_consistency_check",
]

# eta-product expansion beyond this needs more memory than a desk run should take
DELTA_NMAX_LIMIT = 500_000

Coefficient = Union[int, mpmath.mpf]


@dataclass(frozen=True)
class EigenformSpec:
    """Identifies the L-function: weight k, level C, sign exponent P, nebentypus.

    ``chi`` maps residues mod C to unit-modulus complex values; None means
    the trivial character.  The completed function satisfies
    F(s) = (-1)^P F(k - s).
    """

    weight_k: int
    level_C: int = 1
    sign_exponent_P: int = 0
    chi: Optional[Dict[int, complex]] = None

    def __post_init__(self):
        if self.weight_k <= 0 or self.weight_k % 2 != 0:
            raise ValueError("weight_k must be a positive even integer")
        if self.level_C < 1:
            raise ValueError("level_C must be >= 1")
        if self.sign_exponent_P not in (0, 1):
            raise ValueError("sign_exponent_P must be 0 or 1")

    @property
    def sign(self) -> int:
        """(-1)^P as an exact integer."""
        return 1 if self.sign_exponent_P == 0 else -1

    def chi_value(self, r: int):
        """Character value at r; 0 exactly when gcd(r, C) > 1."""
        if math.gcd(r, self.level_C) > 1:
            return 0
        if self.chi is None:
            return 1
        return self.chi[r % self.level_C]

    def validate_chi(self, ctx: PrecisionContext) -> None:
        """Check the supplied character table: support, modulus, multiplicativity."""
        if self.chi is None:
            return
        C = self.level_C
        tol = ctx.mpf(2) ** (-ctx.bits + 8)
        with ctx.work():
            for r, v in self.chi.items():
                if math.gcd(r, C) > 1:
                    if v != 0:
                        raise ValueError(f"chi({r}) must be 0 (gcd(r, C) > 1)")
                elif abs(abs(mp.mpc(v)) - 1) > tol:
                    raise ValueError(f"chi({r}) must have unit modulus")
            units = [r for r in self.chi if math.gcd(r, C) == 1]
            for r in units:
                for t in units:
                    u = (r * t) % C
                    if u in self.chi and abs(mp.mpc(self.chi[r]) * self.chi[t] - self.chi[u]) > tol:
                        raise ValueError(f"chi not multiplicative at ({r}, {t})")


def delta_spec() -> EigenformSpec:
    """The modular discriminant: weight 12, level 1, even sign."""
    return EigenformSpec(weight_k=12, level_C=1, sign_exponent_P=0)


@dataclass(frozen=True)
class CoefficientTable:
    """Fourier coefficients a_1..a_n_max, Hecke-normalized (a_1 = 1).

    ``coeffs`` is stored 1-indexed with a zero placeholder at index 0;
    eta-product tables are exact integers.
    """

    n_max: int
    coeffs: Tuple[Coefficient, ...]
    source: str  # "eta_product" | "file"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if len(self.coeffs) != self.n_max + 1:
            raise ValueError("coeffs must have length n_max + 1 (index 0 unused)")
        if self.coeffs[1] != 1:
            raise NormalizationError("a_1 must equal 1 (Hecke normalization)")

    def a(self, n: int) -> Coefficient:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"coefficient index {n} outside 1..{self.n_max}")
        return self.coeffs[n]


def _jacobi_cube_terms(deg: int) -> List[Tuple[int, int]]:
    """Sparse terms of prod (1-q^m)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)."""
    terms = []
    k = 0
    while k * (k + 1) // 2 <= deg:
        terms.append((k * (k + 1) // 2, (2 * k + 1) if k % 2 == 0 else -(2 * k + 1)))
        k += 1
    return terms


def delta_coefficients(n_max: int, limit: int = DELTA_NMAX_LIMIT) -> CoefficientTable:
    """Exact tau(1..n_max) from q * prod_{m>=1} (1 - q^m)^24.

    The 24th power is built as the 8th power of the sparse cube series,
    folding one sparse factor per pass into a dense big-integer array:
    O(sqrt(n_max) * n_max) integer operations instead of the O(n_max^2)
    of dense squaring.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > limit:
        raise ResourceError(f"n_max = {n_max} exceeds the eta-product budget ({limit})")
    deg = n_max - 1
    terms = _jacobi_cube_terms(deg)
    cur = [0] * (deg + 1)
    cur[0] = 1
    for _ in range(8):
        new = [0] * (deg + 1)
        for t, c in terms:
            block = cur[: deg + 1 - t]
            if c == 1:
                seg = new[t:]
                new[t:] = [x + y for x, y in zip(seg, block)]
            else:
                seg = new[t:]
                new[t:] = [x + c * y for x, y in zip(seg, block)]
        cur = new
    coeffs = (0, *cur[:n_max])  # shift by q
    return CoefficientTable(n_max=n_max, coeffs=coeffs, source="eta_product")


_INT_RE = re.compile(r"^[+-]?\d+$")

HEADER_PREFIX = "# eigenform"


def format_header(spec: EigenformSpec, n_max: int) -> str:
    return (
        f"{HEADER_PREFIX} k={spec.weight_k} C={spec.level_C} "
        f"P={spec.sign_exponent_P} nmax={n_max}"
    )


def parse_header(line: str) -> Optional[Dict[str, int]]:
    """Parse a cache header line; None if it is an ordinary comment."""
    if not line.startswith(HEADER_PREFIX):
        return None
    fields = {}
    for token in line[len(HEADER_PREFIX):].split():
        key, _, value = token.partition("=")
        try:
            fields[key] = int(value)
        except ValueError as exc:
            raise ParseError(f"bad header token {token!r}") from exc
    return fields


def load_coefficients(
    path, spec: EigenformSpec, ctx: Optional[PrecisionContext] = None
) -> CoefficientTable:
    """Read 'n value' lines (ASCII decimal, '#' comments) into a table.

    Indices must be contiguous from 1; a_1 must equal 1.  Non-integer
    values are parsed as decimal strings at context precision.
    """
    ctx = ctx or PrecisionContext()
    coeffs: List[Coefficient] = [0]
    expected = 1
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'n value', got {line!r}")
            try:
                n = int(parts[0])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad index {parts[0]!r}") from exc
            if n != expected:
                raise ParseError(
                    f"{path}:{lineno}: index {n} out of order (expected {expected})"
                )
            if _INT_RE.match(parts[1]):
                value: Coefficient = int(parts[1])
            else:
                try:
                    value = ctx.mpf(parts[1])
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: bad value {parts[1]!r}") from exc
            coeffs.append(value)
            expected += 1
    if expected == 1:
        raise ParseError(f"{path}: no coefficient lines")
    if coeffs[1] != 1:
        raise NormalizationError(f"{path}: a_1 = {coeffs[1]!r}, expected 1")
    return CoefficientTable(n_max=expected - 1, coeffs=tuple(coeffs), source="file")


def save_coefficients(table: CoefficientTable, spec: EigenformSpec, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_header(spec, table.n_max) + "\n")
        for n in range(1, table.n_max + 1):
            value = table.coeffs[n]
            text = str(value) if isinstance(value, int) else mpmath.nstr(value, 40)
            fh.write(f"{n} {text}\n")


@dataclass(frozen=True)
class SubseriesMask:
    """Flags over 1..n_max marking the p_N-smooth indices."""

    N: int
    p_N: int
    flags: Tuple[bool, ...]  # index 0 unused

    def is_smooth(self, n: int) -> bool:
        return self.flags[n]


def build_mask(n_max: int, N: int) -> SubseriesMask:
    if N < 1:
        raise ValueError("N must be >= 1")
    p_N = nth_prime(N)
    gpf = greatest_prime_factors(n_max)
    flags = tuple(False if n == 0 else gpf[n] <= p_N for n in range(n_max + 1))
    return SubseriesMask(N=N, p_N=p_N, flags=flags)


def smooth_subseries(table: CoefficientTable, N: int) -> List[Coefficient]:
    """b_n = a_n when n is p_N-smooth, else 0 (1-indexed, slot 0 unused)."""
    mask = build_mask(table.n_max, N)
    return [0] + [table.coeffs[n] if mask.flags[n] else 0 for n in range(1, table.n_max + 1)]


def complement_series(table: CoefficientTable, N: int) -> List[Coefficient]:
    """c_n = a_n when n has a prime factor > p_N, else 0."""
    mask = build_mask(table.n_max, N)
    return [0] + [0 if mask.flags[n] else table.coeffs[n] for n in range(1, table.n_max + 1)]


@dataclass
class HeckeReport:
    """Multiplicativity violations found in a coefficient table."""

    coprime_violations: List[Tuple[int, int]] = field(default_factory=list)
    prime_power_violations: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.coprime_violations and not self.prime_power_violations


def hecke_consistency_check(
    table: CoefficientTable, spec: EigenformSpec, ctx: Optional[PrecisionContext] = None
) -> HeckeReport:
    """Check a_{mn} = a_m a_n (gcd(m,n)=1) and the prime-power recursion
    a_{p^{r+1}} = a_p a_{p^r} - chi(p) p^{k-1} a_{p^{r-1}} over the table range.

    Violations are data, not errors: they come back in the report.
    """
    if table.n_max < 4:
        raise ValueError("table too short for a meaningful check (need n_max >= 4)")
    ctx = ctx or PrecisionContext()
    a = table.coeffs
    exact = all(isinstance(v, int) for v in a[1:])
    report = HeckeReport()

    with ctx.work():
        tol = mp.mpf(2) ** (-ctx.bits + 16)

        def differs(x, y) -> bool:
            if exact:
                return x != y
            scale = max(abs(mp.mpf(x)), abs(mp.mpf(y)), mp.mpf(1))
            return abs(mp.mpf(x) - mp.mpf(y)) > tol * scale

        for m in range(2, table.n_max // 2 + 1):
            for n in range(m + 1, table.n_max // m + 1):
                if math.gcd(m, n) == 1 and differs(a[m * n], a[m] * a[n]):
                    report.coprime_violations.append((m, n))

        k = spec.weight_k
        gpf = greatest_prime_factors(table.n_max)
        primes = [p for p in range(2, table.n_max + 1) if gpf[p] == p]
        for p in primes:
            chi_p = spec.chi_value(p)
            r = 1
            while p ** (r + 1) <= table.n_max:
                lhs = a[p ** (r + 1)]
                rhs = a[p] * a[p**r] - chi_p * p ** (k - 1) * a[p ** (r - 1)]
                if differs(lhs, rhs):
                    report.prime_power_violations.append((p, r))
                r += 1
    return report
