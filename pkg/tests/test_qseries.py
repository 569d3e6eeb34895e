import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qexptheta.errors import DomainError, SingularityError
from qexptheta.qseries import (
    QBase,
    euler_qexp_series,
    pochhammer_finite,
    pochhammer_infinite,
    pochhammer_infinite_minus_one,
    q1_limit_probe,
    qbinomial_check,
    qbinomial_series,
)
from qexptheta.xnum import PrecisionContext, rel_diff

from . import oracles

CTX = PrecisionContext(512)
MP = CTX.mp
HALF = Fraction(1, 2)
# (1/2; 1/2)_inf, frozen from mpmath.qp at 200 digits
QQ_HALF = "0.28878809508660242127889972192923078008891190484068578411474"


def test_qbase_validation():
    assert QBase("0.5").q == HALF
    for bad in (0, 1, "1.5", -0.2):
        with pytest.raises(DomainError):
            QBase(bad)


def test_finite_examples():
    assert pochhammer_finite((3, 7), HALF, 0, CTX) == 1
    assert pochhammer_finite(0.5, HALF, 2, CTX) == MP.mpf(0.375)
    assert pochhammer_finite(0.25, HALF, -1, CTX) == 2


def test_finite_negative_pole_names_factor():
    with pytest.raises(SingularityError, match="q\\^\\(-1\\)"):
        pochhammer_finite(0.5, HALF, -1, CTX)
    with pytest.raises(SingularityError):
        pochhammer_finite(0.25, HALF, -3, CTX)


def test_finite_negative_matches_definition():
    a, q = (Fraction(2, 3), Fraction(1, 5)), Fraction(3, 4)
    M = oracles.context()
    av, qv = oracles.num(M, a), oracles.num(M, q)
    want = 1 / M.fprod(1 - av * qv ** (-k) for k in range(1, 6))
    assert rel_diff(pochhammer_finite(a, q, -5, CTX), want, CTX) <= MP.mpf(2) ** -500


def test_infinite_examples():
    assert pochhammer_infinite(0, Fraction(3, 10), CTX) == 1
    assert pochhammer_infinite(1, Fraction(3, 10), CTX) == 0
    value = pochhammer_infinite(0.5, HALF, CTX)
    assert abs(value - MP.mpf(QQ_HALF)) < MP.mpf("1e-58")
    assert rel_diff(value, oracles.qp(0.5, 0.5), CTX) <= CTX.tol


def test_infinite_exact_zero_only_for_exact_root():
    # 1/q^2 is exactly 4 for q = 1/2, so the third factor vanishes
    assert pochhammer_infinite(4, HALF, CTX) == 0
    near = MP.mpf(4) * (1 + MP.mpf(2) ** -400)
    assert pochhammer_infinite(near, HALF, CTX) != 0


@pytest.mark.parametrize("q", [Fraction(1, 10), HALF, Fraction(9, 10)])
@pytest.mark.parametrize("a", [(Fraction(1, 3), 0), (-5, 2), (40, -30)])
def test_infinite_matches_mpmath(a, q):
    assert rel_diff(pochhammer_infinite(a, q, CTX), oracles.qp(a, q), CTX) <= CTX.tol


@pytest.mark.parametrize("q", [Fraction(99, 100), Fraction(999, 1000)])
@pytest.mark.parametrize("a", [(Fraction(1, 3), 0), (-5, 2)])
def test_infinite_near_one_matches_direct_product(a, q):
    # the logarithmic tail takes over here; compare with the plain product
    assert rel_diff(pochhammer_infinite(a, q, CTX), oracles.product(a, q), CTX) <= CTX.tol


@pytest.mark.parametrize("a", [Fraction(1, 1000), (Fraction(-1, 3), Fraction(1, 7)), Fraction(2, 5) ** 60])
def test_minus_one_keeps_relative_accuracy(a):
    q = Fraction(7, 10)
    M = oracles.context(400)
    want = M.qp(oracles.num(M, a), oracles.num(M, q)) - 1
    assert rel_diff(pochhammer_infinite_minus_one(a, q, CTX), want, CTX) <= CTX.tol


def test_euler_examples():
    assert euler_qexp_series(0, HALF, CTX) == 1
    for z, q in [(0.5, HALF), ((-2, 1), Fraction(3, 10))]:
        d = rel_diff(euler_qexp_series(z, q, CTX), pochhammer_infinite(z, q, CTX), CTX)
        assert d <= MP.mpf("1e-60")


def test_qbinomial_examples():
    assert qbinomial_check(0, 0.5, HALF, CTX) <= MP.mpf("1e-60")
    q = Fraction(3, 10)
    z = (Fraction(1, 2), Fraction(1, 5))
    assert qbinomial_check(q, z, q, CTX) <= MP.mpf("1e-60")
    M = oracles.context()
    zv = oracles.num(M, z)
    assert rel_diff(qbinomial_series(q, z, q, CTX), 1 / (1 - zv), CTX) <= CTX.tol
    assert qbinomial_series(1, z, q, CTX) == 1
    assert qbinomial_check(1, z, q, CTX) == 0
    with pytest.raises(DomainError):
        qbinomial_check(2, 1, HALF, CTX)


def test_limit_probe_examples():
    probe = q1_limit_probe(0, Fraction(9, 10), CTX)
    assert probe.value == 1 and probe.deviation == 0 and probe.bound_ok
    assert q1_limit_probe(1, Fraction(999, 1000), CTX).deviation < MP.mpf("1e-2")
    assert q1_limit_probe(1, Fraction(999999, 1000000), CTX).deviation < MP.mpf("1e-5")
    assert q1_limit_probe((3, 2), Fraction(9, 10), CTX).bound_ok


def test_limit_probe_monotone():
    devs = [q1_limit_probe(1, 1 - Fraction(1, 10**j), CTX).deviation for j in range(1, 7)]
    assert all(a > b for a, b in zip(devs, devs[1:]))


@pytest.mark.parametrize("q", [Fraction(1, 10), Fraction(1, 2), Fraction(9, 10), Fraction(99, 100)])
def test_term_bound(q):
    # (1 - q)^k q^(k(k-1)/2) / (q; q)_k <= 1/k!
    mp = CTX.mp
    qv = mp.mpf(q.numerator) / q.denominator
    poch = mp.mpf(1)
    for k in range(1, 201):
        poch *= 1 - qv**k
        term = (1 - qv) ** k * qv ** (k * (k - 1) // 2) / poch
        assert term <= 1 / mp.factorial(k) * (1 + CTX.tol)


small = st.fractions(min_value=-3, max_value=3, max_denominator=50)
bases = st.sampled_from([Fraction(1, 10), Fraction(1, 2), Fraction(9, 10), Fraction(99, 100)])


@given(small, small, bases, st.integers(0, 30), st.integers(0, 30))
def test_splitting_identity(re, im, q, m, n):
    a = (re, im)
    whole = pochhammer_finite(a, q, m + n, CTX)
    aqm = (re * q**m, im * q**m)
    parts = pochhammer_finite(a, q, m, CTX) * pochhammer_finite(aqm, q, n, CTX)
    if whole == 0:
        assert abs(parts) <= MP.mpf(2) ** -400
    else:
        assert rel_diff(whole, parts, CTX) <= 8 * MP.mpf(2) ** -512


@given(st.floats(-2, 1), st.floats(0, 2 * math.pi), bases)
def test_euler_identity(log_r, arg, q):
    z = complex(10**log_r * math.cos(arg), 10**log_r * math.sin(arg))
    series = euler_qexp_series(z, q, CTX)
    product = pochhammer_infinite(z, q, CTX)
    if product == 0:
        # z = q^-k exactly: the series cancels down to rounding level
        assert abs(series) <= MP.mpf(2) ** -400
    else:
        assert rel_diff(series, product, CTX) <= 8 * CTX.tol


@given(
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False),
    st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=100),
)
def test_qbinomial_property(a, z, q):
    assert qbinomial_check(a, z, q, CTX) <= 8 * CTX.tol
