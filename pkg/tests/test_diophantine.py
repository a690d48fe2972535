from fractions import Fraction

import pytest
from mpmath import mp, mpf, log, floor

from tricollatz.diophantine import (
    CaseTag,
    Interval,
    PairKind,
    PrecisionGuardError,
    epsilon_budget,
    floor_k_log2_3,
    frac_part,
    log2_3,
    prefix_order,
    prefix_target,
    record_pairs,
    steer_inequality,
    steering_pairs,
)
from tricollatz.triadic import TriadicRational as T


@pytest.fixture(autouse=True)
def fifty_digits():
    with mp.workdps(50):
        yield


def _mp(x: Fraction):
    return mpf(x.numerator) / x.denominator


def test_log2_3_encloses_reference():
    ref = log(3) / log(2)
    for bits in (8, 16, 64, 150):
        enc = log2_3(bits)
        assert enc.width <= Fraction(1, 2**bits)
        assert _mp(enc.lo) < ref < _mp(enc.hi)
    assert abs(float(log2_3(16).mid) - 1.5849625) < 2**-16


def test_log2_3_certified_by_powers():
    # 3**28 > 2**44 means log2 3 > 44/28
    assert 3**28 == 22876792454961 and 2**44 == 17592186044416
    assert log2_3(16).hi > Fraction(44, 28)
    enc = log2_3(8)
    assert 2 ** enc.lo < 3 < 2 ** enc.hi


def test_log2_3_guards():
    with pytest.raises(ValueError):
        log2_3(4)
    with pytest.raises(PrecisionGuardError):
        log2_3(10**6 + 1)


@pytest.mark.parametrize("k, n, approx", [(1, 1, 0.585), (2, 3, 0.170), (12, 19, 0.019)])
def test_frac_part_examples(k, n, approx):
    got_n, frac = frac_part(k)
    assert got_n == n
    assert abs(float(frac.mid) - approx) < 1e-3
    assert frac.width <= Fraction(1, 2**64)
    ref = k * log(3) / log(2)
    assert _mp(frac.lo) <= ref - floor(ref) <= _mp(frac.hi)


def test_floor_k_log2_3_exact():
    for k in range(0, 10**4 + 1, 7):
        n = floor_k_log2_3(k)
        assert 2**n <= 3**k < 2 ** (n + 1)


def _record_oracle(k_max):
    L = log(3) / log(2)
    best, out = mpf(-1), []
    for k in range(1, k_max + 1):
        f = k * L - floor(k * L)
        if f > best:
            best = f
            out.append((k, int(floor(k * L)) + 1))
    return out


def test_record_pairs_small():
    assert [p.k for p in record_pairs(6)] == [1, 3, 5]


def test_record_pairs_fifty():
    pairs = record_pairs(50)
    assert [(p.k, p.n) for p in pairs] == [(1, 2), (3, 5), (5, 8), (17, 27), (29, 46), (41, 65)]
    assert [(p.k, p.n) for p in pairs] == _record_oracle(50)
    for p in pairs:
        assert p.kind is PairKind.RECORD
        assert 2 ** (p.n - 1) < 3**p.k < 2**p.n
        assert p.certificate == (2 ** (p.n - 1), 3**p.k, 2**p.n) and p.verify()


def test_record_pairs_monotone_and_oracle_to_2000():
    pairs = record_pairs(2000)
    assert [(p.k, p.n) for p in pairs] == _record_oracle(2000)
    for a, b in zip(pairs, pairs[1:]):
        assert a.k < b.k and a.n < b.n
        assert a.frac.below(b.frac)


@pytest.mark.parametrize(
    "psi, p, psi0, case, tau",
    [
        (5, 1, T(5, 1), CaseTag.LOW, "0.7369655941662061664165804855415736671050169853321"),
        (7, 1, T(7, 1), CaseTag.HIGH, "0.63742992061529174453449142933619779112139781058118"),
        (3, 1, T(1), CaseTag.LOW, "0"),
        (2, 0, T(2), CaseTag.HIGH, "0.41503749927884381854626105605218349124018559230752"),
    ],
)
def test_prefix_target_examples(psi, p, psi0, case, tau):
    t = prefix_target(psi)
    assert (t.p, t.psi0, t.case) == (p, psi0, case)
    assert _mp(t.tau.lo) - mpf("1e-18") <= mpf(tau) <= _mp(t.tau.hi) + mpf("1e-18")
    assert abs(float(t.tau.mid) - float(tau)) < 1e-15


def test_prefix_target_tau_matches_case_form():
    L = log(3) / log(2)
    for psi in range(2, 400):
        t = prefix_target(psi)
        x = mpf(psi) / 3**t.p
        ref = log(x) / log(2) if t.case is CaseTag.LOW else log(x) / log(2) + 1 - L
        assert 0 <= t.tau.lo <= t.tau.hi < 1
        assert abs(_mp(t.tau.mid) - ref) < mpf(2) ** -60
        assert (t.case is CaseTag.LOW) == (psi < 2 * 3**t.p)


def test_prefix_target_rejects_small():
    with pytest.raises(ValueError):
        prefix_target(1)


def test_epsilon_budget():
    for p in range(4):
        ref = log(1 + mpf(3) ** (-p - 2)) / log(2)
        e = epsilon_budget(p)
        assert _mp(e.lo) <= ref <= _mp(e.hi)


def _steer_oracle(psi, k_max):
    """Every (k, n) with |3**(k+p)/2**n * s - psi| < 1/3, s = 1 (LOW) or 3/2 (HIGH), by scan over n."""
    t = prefix_target(psi)
    out = []
    for k in range(1, k_max + 1):
        for n in range(1, 2 * (k + t.p) + 8):
            if t.case is CaseTag.LOW:
                v = Fraction(3 ** (k + t.p), 2**n)
            else:
                v = Fraction(3 ** (k + t.p + 1), 2 ** (n + 1))
            if abs(v - psi) < Fraction(1, 3):
                out.append((k, n))
    return out


def test_steering_psi_two_is_high_case():
    t = prefix_target(2)
    assert t.case is CaseTag.HIGH
    pairs = steering_pairs(t, 4, 200)
    assert [(p.k, p.n) for p in pairs] == [(1, 1), (2, 3), (4, 6), (6, 9)]
    # (2, 3) checked against the LOW form would fail: 5 * 8 = 40 > 27
    assert not (5 * 2**3 < 3**3)


@pytest.mark.parametrize("psi", [2, 3, 4, 5, 7, 8, 13, 22, 26])
def test_steering_matches_scan_oracle(psi):
    want = _steer_oracle(psi, 120)
    got = steering_pairs(prefix_target(psi), 10**6, 120)
    assert [(p.k, p.n) for p in got] == want


def test_steering_psi_three_instantiation():
    t = prefix_target(3)
    for p in steering_pairs(t, 5, 500):
        assert 8 * 2**p.n < 3 ** (p.k + 2) < 10 * 2**p.n


def test_steering_certificates_reverify():
    for psi in range(2, 31):
        t = prefix_target(psi)
        for pair in steering_pairs(t, 3, 5000):
            assert pair.kind is PairKind.STEER
            assert pair.certificate == steer_inequality(t, pair.k, pair.n)
            assert pair.verify()
            if t.case is CaseTag.LOW:
                assert abs(Fraction(3 ** (pair.k + t.p), 2**pair.n) - psi) < Fraction(1, 3)


def test_steering_short_result_is_not_an_error():
    assert steering_pairs(prefix_target(26), 5, 3) == []


def test_prefix_order_examples():
    assert prefix_order(2, 26)
    assert prefix_order(5, 17)
    assert prefix_order(9, 9)
    assert not prefix_order(26, 2)
    assert not prefix_order(6, 2)  # 20_3 is not a prefix of 2_3


def test_prefix_order_is_digit_prefix():
    from oracles import base3
    for phi in range(1, 250):
        for theta in range(1, 250):
            assert prefix_order(phi, theta) == base3(theta).startswith(base3(phi))


def test_prefix_order_is_partial_order():
    top = 3**6
    rel = {(a, b) for b in range(2, top + 1) for a in _prefixes(b)}
    for a, b in rel:
        assert prefix_order(a, b)
        if a != b:
            assert not prefix_order(b, a)
    for a in range(2, top + 1):
        assert prefix_order(a, a)
    # transitivity: every prefix of a prefix is a prefix
    for b in range(2, top + 1):
        for a in _prefixes(b):
            for z in _prefixes(a):
                assert prefix_order(z, b)
    # nothing else is related
    count = sum(prefix_order(a, b) for a in range(2, 200) for b in range(2, 200))
    assert count == sum(1 for a, b in rel if a < 200 and b < 200)


def _prefixes(x):
    out = []
    while x >= 2:
        out.append(x)
        x //= 3
    return out


def test_interval_arithmetic():
    a = Interval(Fraction(1), Fraction(2))
    b = Interval(Fraction(3), Fraction(5))
    assert (a + b) == Interval(Fraction(4), Fraction(7))
    assert (b - a) == Interval(Fraction(1), Fraction(4))
    assert a.scale(-2) == Interval(Fraction(-4), Fraction(-2))
    assert (a / b) == Interval(Fraction(1, 5), Fraction(2, 3))
    assert a.below(b) and not b.below(a)
    with pytest.raises(ValueError):
        Interval(Fraction(2), Fraction(1))
