"""Tests for exact rational helpers, checked against brute-force oracles."""

import fractions
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexsums.rational import (
    Fraction,
    InfeasibleExpansionError,
    Q,
    ReducedRational,
    count_fractions,
    enumerate_fractions,
    expand_to_range,
    iroot,
    mediant,
    power_exact,
    power_floor,
    power_value,
)


def oracle_enumerate(lo, hi, qmax):
    """All reduced p/q with q <= qmax in [lo, hi], the slow obvious way."""
    lo = fractions.Fraction(lo)
    hi = fractions.Fraction(hi)
    seen = set()
    for q in range(1, qmax + 1):
        for p in range(math.floor(lo * q), math.ceil(hi * q) + 1):
            v = fractions.Fraction(p, q)
            if lo <= v <= hi:
                seen.add(v)
    return sorted(seen)


class TestEnumerate:
    def test_unit_interval_qmax3(self):
        got = enumerate_fractions(Q(1, 3), Q(2, 3), 3)
        assert [(r.num, r.den) for r in got] == [(1, 3), (1, 2), (2, 3)]

    def test_count_1_2_qmax3(self):
        assert count_fractions(1, 2, 3) == 5  # 1, 4/3, 3/2, 5/3, 2

    def test_count_integers_only(self):
        assert count_fractions(1, 2, 1) == 2

    def test_density_window(self):
        # long interval: count is close to (3/pi^2) * len * qmax^2
        n = count_fractions(100, 200, 10)
        assert 0.15 * 100 * 10**2 <= n <= 0.6 * 100 * 10**2

    def test_matches_oracle(self):
        for lo, hi, qmax in [
            (Q(1, 3), Q(2, 3), 5),
            (Q(0), Q(1), 7),
            (Q(3, 7), Q(5, 7), 12),
            (Q(99, 10), Q(101, 10), 4),
        ]:
            got = enumerate_fractions(lo, hi, qmax)
            want = oracle_enumerate(lo, hi, qmax)
            assert [r.as_fraction() for r in got] == want
            assert count_fractions(lo, hi, qmax) == len(want)

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            enumerate_fractions(Q(1, 2), Q(1, 2), 5)
        with pytest.raises(ValueError):
            enumerate_fractions(Q(2, 3), Q(1, 3), 5)

    @given(
        a=st.integers(0, 40),
        b=st.integers(1, 40),
        qmax=st.integers(1, 15),
    )
    @settings(max_examples=60)
    def test_oracle_property(self, a, b, qmax):
        lo = Q(a, 7)
        hi = lo + Q(b, 11)
        got = enumerate_fractions(lo, hi, qmax)
        assert [r.as_fraction() for r in got] == oracle_enumerate(lo, hi, qmax)
        # output invariants: sorted strictly, reduced, bounded denominator
        vals = [r.as_fraction() for r in got]
        assert vals == sorted(set(vals))
        for r in got:
            assert math.gcd(r.num, r.den) == 1
            assert 1 <= r.den <= qmax
            assert lo <= r.as_fraction() <= hi


class TestMediant:
    def test_half_twothirds(self):
        m = mediant(ReducedRational(1, 2), ReducedRational(2, 3))
        assert (m.num, m.den) == (3, 5)

    def test_unreduced_inputs_not_reduced_output(self):
        m = mediant(Fraction(4, 12), Fraction(6, 12))
        assert (m.num, m.den) == (10, 24)
        assert m.reduce() == ReducedRational(5, 12)

    def test_order_enforced(self):
        with pytest.raises(ValueError):
            mediant(ReducedRational(2, 3), ReducedRational(1, 2))
        with pytest.raises(ValueError):
            mediant(ReducedRational(1, 2), ReducedRational(1, 2))

    @given(
        n1=st.integers(0, 50),
        d1=st.integers(1, 50),
        n2=st.integers(0, 50),
        d2=st.integers(1, 50),
    )
    @settings(max_examples=100)
    def test_strictly_between(self, n1, d1, n2, d2):
        f1, f2 = Fraction(n1, d1), Fraction(n2, d2)
        if fractions.Fraction(n1, d1) >= fractions.Fraction(n2, d2):
            return
        m = mediant(f1, f2)
        v = fractions.Fraction(m.num, m.den)
        assert fractions.Fraction(n1, d1) < v < fractions.Fraction(n2, d2)
        assert m.num == n1 + n2 and m.den == d1 + d2


class TestExpand:
    def test_simple(self):
        f = expand_to_range(ReducedRational(1, 2), 4, 8)
        assert (f.num, f.den) == (2, 4)

    def test_float_bounds(self):
        f = expand_to_range(ReducedRational(1, 3), 10.67, 21.33)
        assert (f.num, f.den) == (4, 12)

    def test_exact_bounds(self):
        f = expand_to_range(ReducedRational(1, 3), Q(32, 3), Q(64, 3))
        assert (f.num, f.den) == (4, 12)

    def test_infeasible(self):
        with pytest.raises(InfeasibleExpansionError):
            expand_to_range(ReducedRational(2, 3), 2, 2.5)

    @given(
        num=st.integers(0, 30),
        den=st.integers(1, 30),
        lo_num=st.integers(1, 400),
    )
    @settings(max_examples=100)
    def test_value_preserved_den_in_range(self, num, den, lo_num):
        r = ReducedRational.from_parts(num, den)
        lo = Q(lo_num, 7)
        hi = 2 * lo
        try:
            f = expand_to_range(r, lo, hi)
        except InfeasibleExpansionError:
            # oracle: no multiple of den lies in [lo, hi]
            ks = range(math.ceil(lo / r.den), math.floor(hi / r.den) + 1)
            assert not [k for k in ks if k >= 1]
            return
        assert fractions.Fraction(f.num, f.den) == r.as_fraction()
        assert lo <= f.den <= hi
        assert f.den % r.den == 0


class TestPower:
    def test_iroot_exact(self):
        for n in range(0, 200):
            for k in (2, 3, 4):
                r = iroot(n, k)
                assert r**k <= n < (r + 1) ** k

    def test_cube_root_64(self):
        # float round-trip gives 63.999999...; exact arithmetic must not
        assert power_floor(64, Q(1, 3)) == 4
        assert power_floor(4096, Q(1, 2)) == 64

    def test_power_floor_vs_float_free_oracle(self):
        for base in (2, 3, 10, 64, 100, 4096):
            for p, q in [(1, 2), (1, 3), (2, 3), (3, 4), (5, 6), (7, 12)]:
                got = power_floor(base, Q(p, q))
                # oracle: largest m with m^q <= base^p
                m = got
                assert m**q <= base**p < (m + 1) ** q

    def test_power_exact(self):
        assert power_exact(64, Q(2, 3)) == 16
        assert power_exact(64, Q(-1, 2)) == Q(1, 8)
        assert power_exact(2, Q(1, 2)) is None
        assert power_exact(10, Q(0, 1)) == 1

    def test_power_value(self):
        v, exact = power_value(64, Q(1, 3))
        assert exact and v == 4
        v, exact = power_value(2, Q(1, 2))
        assert not exact and abs(float(v) - math.sqrt(2)) < 1e-15


class TestReducedRational:
    def test_from_parts_reduces(self):
        assert ReducedRational.from_parts(10, 24) == ReducedRational(5, 12)
        assert ReducedRational.from_parts(-3, -6) == ReducedRational(1, 2)

    def test_invalid_direct_construction(self):
        with pytest.raises(ValueError):
            ReducedRational(2, 4)
        with pytest.raises(ValueError):
            ReducedRational(1, 0)

    def test_ordering(self):
        assert ReducedRational(1, 3) < ReducedRational(1, 2) < ReducedRational(2, 3)
        assert ReducedRational(1, 2) <= ReducedRational(1, 2)
