"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.  Everything here uses
the builtin discriminant form at >= 256 bits with the tolerances stated
inline; expected wall time is a few minutes.
"""

import random

import mpmath
import pytest
from mpmath import mp

from lfapprox import (
    equidist_probe,
    error_series,
    error_integral,
    first_term_bound,
    gamma,
    hecke_consistency_check,
    lambda_N,
    lambda_N_regularized,
    lambda_full,
    upper_incomplete_gamma,
)
from lfapprox.approximation import ApproxConfig
from lfapprox.numerics import PrecisionContext
from lfapprox.primes import nth_prime, primes_up_to
from lfapprox.regularization import default_truncation
from lfapprox.zerofinder import refine_zero, scan_sign_changes

from oracles import eta_power_24, quad_gamma, quad_lower_gamma, quad_upper_gamma

# Reference table: the first eight critical-line zeros of the completed
# discriminant L-function, the corresponding zeros of its three-factor
# approximation, and their differences.  The full-function column and the
# difference column hold at their printed precision; rows 6-8 of the
# approximation column carry an error floor of the order 2e-23 in the
# underlying function values (see test_criterion_2_reference_zero_column).
ZEROS_FULL = [
    "9.2223793999211",
    "13.907549861392",
    "17.442776978234",
    "19.656513141954",
    "22.336103637209",
    "25.274636548112",
    "26.804391158350",
    "28.831682624186",
]
ZEROS_N3 = [
    "9.2223793999323",
    "13.907549860287",
    "17.442777058770",
    "19.656511952233",
    "22.336129046421",
    "25.273041434242",
    "26.818461412067",
    "28.705434564429",
]
ZERO_DIFFS = [
    "-1.11e-11",
    "1.10e-9",
    "-8.05e-8",
    "1.18e-6",
    "-2.54e-5",
    "1.59e-3",
    "-1.40e-2",
    "1.26e-1",
]

BITS = 256


@pytest.fixture(scope="module")
def actx():
    return PrecisionContext(bits=BITS)


@pytest.fixture(scope="module")
def zero_records(actx, table100, spec):
    """Scan [0, 30] at step 0.05 and refine every sign change, both modes."""
    cfg = ApproxConfig(N=3, target_abs_error="1e-32")
    records = {}
    for mode in ("full", 3):
        scan = scan_sign_changes(0, 30, "0.05", mode, table100, spec, cfg, actx)
        records[mode] = [
            refine_zero(bracket, mode, "1e-13", table100, spec, cfg, actx)
            for bracket in scan.brackets
        ]
    return records


def test_criterion_1_table_of_zeros(zero_records, actx):
    found = zero_records["full"]
    assert len(found) == 8, f"expected 8 zeros below 30, found {len(found)}"
    with actx.work():
        worst = mp.mpf(0)
        for record, expected in zip(found, ZEROS_FULL):
            gap = abs(record.t - mp.mpf(expected))
            worst = max(worst, gap)
            assert gap <= mp.mpf("1e-10"), f"zero {expected}: off by {mpmath.nstr(gap, 3)}"
    print(f"\nPASS criterion 1: eight zeros match to 1e-10 (worst gap {mpmath.nstr(worst, 3)})")


def test_criterion_2_reference_zero_column(zero_records, actx):
    """Three-factor zeros against the reference column at 1e-9, all rows.

    KNOWN RED at rows 6-8.  The computed zeros there differ from the
    reference column by 1.9e-9 / 1.8e-8 / 1.4e-7; two independent
    constructions of the three-factor approximation in this package (the
    incomplete-gamma series and the pole-sum regularization) agree with
    each other to ~1e-46 at those heights and place the zeros where this
    suite finds them.  The deviation pattern matches a fixed absolute
    error floor of roughly 2e-23 in the reference values themselves,
    amplified by the exponential decay of the archimedean factor as t
    grows; rows 1-5 and the whole difference column are unaffected at
    their printed precision (see the companion test).
    """
    found = zero_records[3]
    assert len(found) == 8
    with actx.work():
        worst = mp.mpf(0)
        for row, (record, expected) in enumerate(zip(found, ZEROS_N3), start=1):
            gap = abs(record.t - mp.mpf(expected))
            worst = max(worst, gap)
            assert gap <= mp.mpf("1e-9"), (
                f"row {row}: computed three-factor zero {mpmath.nstr(record.t, 18)} vs "
                f"reference {expected} (gap {mpmath.nstr(gap, 3)}); the computed value is "
                f"dual-path verified -- see this test's docstring"
            )
    print(f"PASS criterion 2 (zero column): eight three-factor zeros within 1e-9 "
          f"(worst {mpmath.nstr(worst, 3)})")


def test_criterion_2_error_column_and_resolved_rows(zero_records, actx, table100, spec):
    """The attainable half of criterion 2, plus the evidence for the rest:
    rows 1-5 of the reference zero column hold at 1e-9, the difference
    column reproduces to two significant figures with correct signs on
    all eight rows, and at the first disputed height the two independent
    constructions of the approximation agree to far below the deviation.
    """
    found = zero_records[3]
    with actx.work():
        for record, expected in zip(found[:5], ZEROS_N3[:5]):
            assert abs(record.t - mp.mpf(expected)) <= mp.mpf("1e-9")
        worst_rel = mp.mpf(0)
        for full_rec, n3_rec, expected in zip(zero_records["full"], found, ZERO_DIFFS):
            diff = full_rec.t - n3_rec.t
            ref = mp.mpf(expected)
            assert mpmath.sign(diff) == mpmath.sign(ref), f"sign flip at {expected}"
            # the reference column carries three digits; 1.5% covers
            # agreement to two significant figures
            rel = abs(diff / ref - 1)
            worst_rel = max(worst_rel, rel)
            assert rel <= mp.mpf("0.015"), f"difference {mpmath.nstr(diff, 4)} vs {expected}"
        # the approximation-quality trend: |t0 - t0'| grows monotonically
        diffs = [abs(full_rec.t - n3_rec.t)
                 for full_rec, n3_rec in zip(zero_records["full"], found)]
        assert all(b > a for a, b in zip(diffs, diffs[1:]))
        # dual-path check at the first disputed row: series vs regularization
        cfg = ApproxConfig(N=3, target_abs_error="1e-34")
        s = mp.mpc(6, found[5].t)
        ser = lambda_N(s, table100, spec, cfg, actx)
        reg = lambda_N_regularized(s, 3, 70, table100, spec, actx)
        assert abs(reg.value - ser) <= reg.tail + 2 * cfg.target(actx)
        assert abs(reg.value - ser) <= mp.mpf("1e-40")
    print(f"PASS criterion 2 (differences): rows 1-5 of the zero column at 1e-9; difference "
          f"column to two significant figures with correct signs on all rows "
          f"(worst rel {mpmath.nstr(worst_rel, 3)}); independent constructions agree at the "
          f"disputed height")


def test_criterion_3_functional_equation(actx, table100, spec):
    rng = random.Random(0xFE01)
    cfg_full = ApproxConfig(N=1, target_abs_error="1e-30")
    with actx.work():
        tol = 4 * cfg_full.target(actx)
        worst = mp.mpf(0)
        evaluators = [("full", lambda s: lambda_full(s, table100, spec, cfg_full, actx))]
        for N in (1, 2, 3):
            cfg_n = ApproxConfig(N=N, target_abs_error="1e-30")
            evaluators.append(
                (N, lambda s, c=cfg_n: lambda_N(s, table100, spec, c, actx))
            )
        points = []
        while len(points) < 200:
            radius = 20 * mpmath.sqrt(mp.mpf(rng.random()))
            angle = 2 * mp.pi * mp.mpf(rng.random())
            points.append(6 + radius * mpmath.expj(angle))
        for label, evaluate in evaluators:
            for s in points:
                gap = abs(evaluate(s) - evaluate(12 - s))
                worst = max(worst, gap)
                assert gap <= tol, f"mode {label}: |F(s) - F(12-s)| = {mpmath.nstr(gap, 3)}"
    print(f"PASS criterion 3: functional equation within 4e-30 for the full function and "
          f"three approximations at 200 points (worst {mpmath.nstr(worst, 3)})")


def test_criterion_4_dual_definition_equivalence(actx, table100, spec):
    rng = random.Random(0xD0A1)
    with actx.work():
        worst_ratio = mp.mpf(0)
        for N in (1, 2):
            cfg = ApproxConfig(N=N, target_abs_error="1e-30")
            t_trunc = default_truncation(N, spec, actx, cfg.target(actx))
            for _ in range(10):
                # sample within |s - k/2| <= 5
                s = mp.mpc(6 + (rng.random() - 0.5) * 7, (rng.random() - 0.5) * 7)
                reg = lambda_N_regularized(s, N, t_trunc, table100, spec, actx)
                ser = lambda_N(s, table100, spec, cfg, actx)
                budget = reg.tail + 2 * cfg.target(actx)
                gap = abs(reg.value - ser)
                worst_ratio = max(worst_ratio, gap / budget)
                assert gap <= budget, (
                    f"N={N}, s={mpmath.nstr(s, 6)}: |reg - series| = {mpmath.nstr(gap, 3)} "
                    f"exceeds budget {mpmath.nstr(budget, 3)}"
                )
    print(f"PASS criterion 4: regularization vs series within combined budgets at 20 points "
          f"(worst |diff|/budget = {mpmath.nstr(worst_ratio, 3)})")


def test_criterion_5_error_formulas(actx, table100, table10k, spec):
    rng = random.Random(0x50E5)
    cfg = ApproxConfig(N=2, target_abs_error="1e-30")
    with actx.work():
        tol_series = 2 * cfg.target(actx)
        worst = mp.mpf(0)
        for _ in range(20):
            s = mp.mpc(6 + (rng.random() - 0.5) * 10, (rng.random() - 0.5) * 12)
            err = error_series(s, table100, spec, 2, cfg, actx)
            direct = lambda_full(s, table100, spec, cfg, actx) \
                - lambda_N(s, table100, spec, cfg, actx)
            gap = abs(err - direct)
            worst = max(worst, gap)
            assert gap <= tol_series
        quad_tol = mp.mpf("1e-14")
        cache = {}
        worst_quad = mp.mpf(0)
        for s0 in (mp.mpc(6), mp.mpc(6, 2), mp.mpc(5, -1), mp.mpc("4.5", 3), mp.mpc(7, "0.5")):
            integral = error_integral(s0, 8, 2, 48, table10k, spec, actx,
                                      tol=quad_tol, _diff_cache=cache)
            direct = lambda_full(s0, table100, spec, cfg, actx) \
                - lambda_N(s0, table100, spec, cfg, actx)
            gap = abs(integral - direct)
            worst_quad = max(worst_quad, gap)
            assert gap <= 2 * quad_tol, f"s0={mpmath.nstr(s0, 4)}: gap {mpmath.nstr(gap, 3)}"
    print(f"PASS criterion 5: series error formula within 2e-30 (worst {mpmath.nstr(worst, 3)}); "
          f"integral form within quadrature tolerance (worst {mpmath.nstr(worst_quad, 3)})")


def test_criterion_6_convergence_trend(actx, table100, spec):
    with actx.work():
        for s0 in (mp.mpc(6), mp.mpc(6, 10), mp.mpc(2)):
            cfg = ApproxConfig(N=1, target_abs_error="1e-65")
            reference = lambda_full(s0, table100, spec, cfg, actx)
            errors = []
            for N in range(1, 9):
                cfg_n = ApproxConfig(N=N, target_abs_error="1e-65")
                errors.append(abs(reference - lambda_N(s0, table100, spec, cfg_n, actx)))
            assert all(b < a for a, b in zip(errors[1:], errors[2:])), (
                f"s0={mpmath.nstr(s0, 4)}: not eventually decreasing"
            )
            assert errors[-1] <= 2 * first_term_bound(8, s0, spec, actx)
            for N in range(5, 9):
                # superexponential regime: the log-error sits below the
                # -pi p_{N+1} / sqrt(C) envelope, and p_n > n log n
                assert mpmath.log(errors[N - 1]) <= -mp.pi * nth_prime(N + 1)
    print("PASS criterion 6: approximation errors decrease, end below 2x the first-term "
          "bound, and decay superexponentially for N in the prime-counting regime")


def test_criterion_7_special_function_oracles(actx):
    rng = random.Random(0x07AC)
    with actx.work():
        tol = mp.mpf(2) ** (-BITS + 16)
        worst = mp.mpf(0)
        for _ in range(50):
            s = mp.mpc(mp.mpf("0.75") + 11 * mp.mpf(rng.random()),
                       16 * (mp.mpf(rng.random()) - mp.mpf("0.5")))
            value = gamma(s, actx)
            expected = quad_gamma(s, actx.work_bits)
            gap = abs(value - expected) / abs(expected)
            worst = max(worst, gap)
            assert gap <= tol
        for _ in range(50):
            s = mp.mpc(-8 + 20 * mp.mpf(rng.random()),
                       16 * (mp.mpf(rng.random()) - mp.mpf("0.5")))
            a = mp.mpf("0.5") + 50 * mp.mpf(rng.random())
            value = upper_incomplete_gamma(s, a, actx)
            expected = quad_upper_gamma(s, a, actx.work_bits)
            gap = abs(value - expected) / abs(expected)
            worst = max(worst, gap)
            assert gap <= tol
        # recurrence at 1000 points
        rec_tol = mp.mpf(2) ** (-BITS + 4)
        checked = 0
        while checked < 1000:
            s = mp.mpc((rng.random() - 0.5) * 100, (rng.random() - 0.5) * 100)
            if s.real <= 0.5 and abs(s - mpmath.nint(s.real)) < mp.mpf("0.01"):
                continue
            assert abs(s * gamma(s, actx) - gamma(s + 1, actx)) \
                <= rec_tol * abs(gamma(s + 1, actx))
            checked += 1
        # splitting identity against the lower-integral oracle
        split_tol = mp.mpf(2) ** (-BITS + 8)
        for s, a in [(mp.mpc(3, 2), mp.mpf(5)), (mp.mpc("0.8", -4), mp.mpf(2)),
                     (mp.mpc(9, 1), 2 * mp.pi)]:
            total = upper_incomplete_gamma(s, a, actx) + quad_lower_gamma(s, a, actx.work_bits)
            assert abs(total - gamma(s, actx)) <= split_tol * abs(gamma(s, actx))
    print(f"PASS criterion 7: gamma and incomplete gamma agree with quadrature oracles at "
          f"50 points each to 2^-240 (worst {mpmath.nstr(worst, 3)}); recurrence and "
          f"splitting identities hold")


def test_criterion_8_equidistribution(actx):
    with actx.work():
        worst_min = None
        for p in primes_up_to(13):
            for q in primes_up_to(13):
                if p == q:
                    continue
                report = equidist_probe(p, q, 100_000, actx)
                assert report.min_scaled > 0, f"(p, q) = ({p}, {q})"
                if worst_min is None or report.min_scaled < worst_min:
                    worst_min = report.min_scaled
        d3 = equidist_probe(2, 3, 1000, actx).discrepancy
        d4 = equidist_probe(2, 3, 10_000, actx).discrepancy
        d5 = equidist_probe(2, 3, 100_000, actx).discrepancy
        assert d5 < d4 < d3
    print(f"PASS criterion 8: n^2 ||n log q / log p|| > 0 for all prime pairs <= 13 "
          f"(min {mpmath.nstr(worst_min, 3)}); discrepancy decreases "
          f"({d3:.4f} > {d4:.4f} > {d5:.4f})")


def test_criterion_9_eta_product_and_hecke(table10k, spec):
    report = hecke_consistency_check(table10k, spec)
    assert report.ok, (
        f"violations: {report.coprime_violations[:3]} {report.prime_power_violations[:3]}"
    )
    assert list(table10k.coeffs[:101]) == eta_power_24(100)
    for p in primes_up_to(10_000):
        assert table10k.coeffs[p] ** 2 <= 4 * p**11
    print("PASS criterion 9: tau to 10^4 passes the Hecke consistency check; values match "
          "the brute-force expansion to n = 100; prime coefficients obey the growth bound")
