import random

import mpmath
import pytest
from mpmath import mp

from lfapprox import (
    detect_coincident_poles,
    enumerate_poles,
    gamma_factor_eval,
    local_factor_eval,
    local_roots,
    make_local_factor,
    truncated_euler_eval,
)
from lfapprox.errors import PoleError, ToleranceError
from lfapprox.euler import PoleLattice, pole_lattice

from oracles import contour_residue


@pytest.fixture(scope="module")
def factor2(table100, spec, ctx128):
    return make_local_factor(2, table100, spec, ctx128)


@pytest.fixture(scope="module")
def factor3(table100, spec, ctx128):
    return make_local_factor(3, table100, spec, ctx128)


def test_local_roots_delta_p2(ctx128):
    a1, a2 = local_roots(2, -24, 1, 12, ctx128)
    with ctx128.work():
        tol = ctx128.eps * 256
        assert abs(a1 + a2 + 24) <= tol * 24
        assert abs(a1 * a2 - 2048) <= tol * 2048
        target = mp.mpf(2) ** mp.mpf("5.5")
        assert abs(abs(a1) - target) <= tol * target
        assert abs(abs(a2) - target) <= tol * target


def test_local_roots_ap_zero_is_pure_imaginary(ctx128):
    a1, a2 = local_roots(5, 0, 1, 12, ctx128)
    with ctx128.work():
        expected = mp.mpf(5) ** mp.mpf("5.5")
        assert abs(a1 - mp.mpc(0, expected)) <= ctx128.eps * 256 * expected
        assert abs(a2 + a1) <= ctx128.eps * 256 * expected


def test_local_roots_bad_prime_degenerates(ctx128):
    a1, a2 = local_roots(11, -7, 0, 2, ctx128)
    assert a2 == 0
    assert abs(a1 + 7) <= ctx128.eps * 64


def test_local_roots_petersson_violation_raises(ctx128):
    with pytest.raises(ToleranceError):
        local_roots(2, 10**7, 1, 12, ctx128)  # far beyond 2 * 2^5.5


def test_local_factor_value_is_exact_rational(factor2, ctx128):
    # 1/(1 + 24/128 + 2048/16384) = 16/21 at s = 7
    value = local_factor_eval(factor2, 7, ctx128)
    with ctx128.work():
        assert abs(value - mp.mpf(16) / 21) <= ctx128.eps * 64


def test_local_factor_matches_quadratic_form(factor2, ctx128):
    rng = random.Random(3)
    with ctx128.work():
        for _ in range(100):
            s = mp.mpc(2 + 10 * rng.random(), -20 + 40 * rng.random())
            via_roots = local_factor_eval(factor2, s, ctx128)
            u = mp.mpf(2) ** (-s)
            direct = 1 / (1 + 24 * u + 2048 * u * u)
            assert abs(via_roots - direct) <= ctx128.eps * 512 * abs(direct)


def test_local_factor_tends_to_one_far_right(factor2, ctx128):
    value = local_factor_eval(factor2, 200, ctx128)
    assert abs(value - 1) <= mp.mpf(2) ** -190


def test_local_factor_periodicity(factor2, ctx128):
    rng = random.Random(4)
    with ctx128.work():
        period = 2 * mp.pi / mpmath.log(2)
        for _ in range(100):
            s = mp.mpc(8 * rng.random(), 30 * (rng.random() - 0.5))
            v1 = local_factor_eval(factor2, s, ctx128)
            v2 = local_factor_eval(factor2, s + mp.mpc(0, period), ctx128)
            assert abs(v1 - v2) <= ctx128.eps * 1024 * abs(v1)


def test_local_factor_conjugation(factor2, ctx128):
    with ctx128.work():
        s = mp.mpc(4, 9)
        assert abs(local_factor_eval(factor2, mpmath.conj(s), ctx128)
                   - mpmath.conj(local_factor_eval(factor2, s, ctx128))) <= ctx128.eps * 64


def test_gamma_factor_values(spec, ctx128):
    with ctx128.work():
        assert abs(gamma_factor_eval(1, spec, ctx128) - 1 / (2 * mp.pi)) <= ctx128.eps * 16
        assert abs(gamma_factor_eval(2, spec, ctx128) - (2 * mp.pi) ** -2) <= ctx128.eps * 16


def test_gamma_factor_precision_stability(spec):
    from lfapprox import PrecisionContext

    lo, hi = PrecisionContext(bits=128), PrecisionContext(bits=192)
    with hi.work():
        s = mp.mpc(6, mp.mpf("9.2223794"))
        v_lo = gamma_factor_eval(s, spec, lo)
        v_hi = gamma_factor_eval(s, spec, hi)
        assert abs(v_lo - v_hi) <= mp.mpf(2) ** (-lo.bits + 2) * abs(v_hi)


def test_gamma_factor_pole(spec, ctx128):
    with pytest.raises(PoleError):
        gamma_factor_eval(-3, spec, ctx128)


def test_truncated_euler_empty_product_is_gamma_factor(table100, spec, ctx128):
    s = ctx128.mpc(5, 2)
    assert truncated_euler_eval(s, 0, spec, table100, ctx128) == gamma_factor_eval(s, spec, ctx128)


def test_truncated_euler_associativity(table100, spec, ctx128):
    factors = [make_local_factor(p, table100, spec, ctx128) for p in (2, 3, 5)]
    with ctx128.work():
        s = mp.mpc(4, 7)
        full = truncated_euler_eval(s, 3, spec, table100, ctx128, factors=factors)
        stepwise = truncated_euler_eval(s, 2, spec, table100, ctx128, factors=factors) \
            * local_factor_eval(factors[2], s, ctx128)
        assert abs(full - stepwise) <= ctx128.eps * 8 * abs(full)


def test_truncated_euler_dirichlet_identity(table10k, spec, ctx128):
    # E_1(s)/g(s) = sum over m of a_{2^m} 2^(-ms) on Re(s) = 8, with the
    # tail below sum_{m>13} (m+1) 2^(5.5-8)m
    with ctx128.work():
        s = mp.mpc(8, 0)
        lhs = truncated_euler_eval(s, 1, spec, table10k, ctx128) / gamma_factor_eval(s, spec, ctx128)
        rhs = mpmath.fsum(table10k.coeffs[2**m] * mp.mpf(2) ** (-8 * m) for m in range(14))
        tail = mpmath.fsum((m + 1) * mp.mpf(2) ** (mp.mpf("-2.5") * m) for m in range(14, 40))
        assert abs(lhs - rhs) <= tail


def test_truncated_euler_conjugation(table100, spec, ctx128):
    with ctx128.work():
        s = mp.mpc(3, 11)
        assert abs(
            truncated_euler_eval(mpmath.conj(s), 2, spec, table100, ctx128)
            - mpmath.conj(truncated_euler_eval(s, 2, spec, table100, ctx128))
        ) <= ctx128.eps * 512 * abs(truncated_euler_eval(s, 2, spec, table100, ctx128))


def test_truncated_euler_pole_reported(table100, spec, ctx128):
    pole = enumerate_poles(make_local_factor(2, table100, spec, ctx128), 10, ctx128)[0][0]
    with pytest.raises(PoleError) as err:
        truncated_euler_eval(pole, 1, spec, table100, ctx128)
    assert "p=2" in str(err.value)


def test_pole_lattice_structure(factor2, ctx128):
    lattice = pole_lattice(factor2, ctx128)
    with ctx128.work():
        assert abs(lattice.re_line - mp.mpf("5.5")) <= ctx128.eps * 64
        assert abs(lattice.spacing - 2 * mp.pi / mpmath.log(2)) <= ctx128.eps * 64
    assert not lattice.double_poles
    assert len(lattice.base_ordinates) == 2
    # principal branch: inside (-pi/log p, pi/log p]
    with ctx128.work():
        bound = mp.pi / mpmath.log(2)
        for base in lattice.base_ordinates:
            assert -bound < base <= bound


def test_enumerate_poles_count_and_line(factor2, ctx128):
    T = 100
    poles = enumerate_poles(factor2, T, ctx128)
    with ctx128.work():
        expected = 2 * (2 * T * mpmath.log(2) / (2 * mp.pi))
        assert abs(len(poles) - expected) <= 4
        for loc, order in poles:
            assert order == 1
            assert abs(mpmath.re(loc) - mp.mpf("5.5")) <= ctx128.eps * 256
            # the defining equation at the lattice point
            assert abs(1 - factor2.alpha1 * mp.mpf(2) ** (-loc)) * abs(
                1 - factor2.alpha2 * mp.mpf(2) ** (-loc)
            ) <= mp.mpf(2) ** (-ctx128.bits + 8)


def test_single_factor_residue_oracle(factor2, ctx128):
    # residue of (1 - alpha 2^-s)^-1 at each lattice pole is 1/log 2
    with ctx128.work():
        alpha = factor2.alpha1
        f = lambda s: 1 / (1 - alpha * mp.mpf(2) ** (-s))
        expected = 1 / mpmath.log(2)
        for loc, _ in enumerate_poles(factor2, 12, ctx128):
            if abs(1 - alpha * mp.mpf(2) ** (-loc)) > mp.mpf("1e-20"):
                continue  # pole of the other family
            res = contour_residue(f, loc, mp.mpf(1), ctx128.work_bits)
            assert abs(res - expected) <= mp.mpf(2) ** (-ctx128.bits + 24) * expected


def test_coincident_poles_bounded_between_2_and_3(factor2, factor3, ctx128):
    lattices = [pole_lattice(factor2, ctx128), pole_lattice(factor3, ctx128)]
    tol = ctx128.mpf(2) ** -40
    found = detect_coincident_poles(lattices, 100, tol, ctx128)
    assert len(found) <= 4


def test_coincident_poles_single_lattice_empty(factor2, ctx128):
    lattices = [pole_lattice(factor2, ctx128)]
    assert detect_coincident_poles(lattices, 50, ctx128.mpf(2) ** -40, ctx128) == []


def test_coincident_poles_forged_identical_lattices(factor2, ctx128):
    real = pole_lattice(factor2, ctx128)
    forged = PoleLattice(p=3, re_line=real.re_line, base_ordinates=real.base_ordinates,
                         spacing=real.spacing, double_poles=real.double_poles)
    found = detect_coincident_poles([real, forged], 30, ctx128.mpf(2) ** -40, ctx128)
    points = sum(1 for _ in enumerate_poles(factor2, 30, ctx128))
    assert len(found) == points


def test_coincidence_tolerance_floor(factor2, ctx128):
    with pytest.raises(ValueError):
        detect_coincident_poles([pole_lattice(factor2, ctx128)], 10,
                                ctx128.mpf(2) ** -200, ctx128)
