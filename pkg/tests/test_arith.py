import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szpiro_bounds import arith
from szpiro_bounds.arith import (FAILS, HOLDS, WITHIN_ERROR, LogSum, LogValue, compare, dusart_bound, factorize,
                                 gl2_order, ln, ln_int, omega_distinct, ord_p, pi_exact, prime_count_bound,
                                 prime_sieve, rad)
from szpiro_bounds.errors import DomainError, ResourceError


def trial_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, k))]


def brute_gl2(q):
    count = 0
    for a, b, c, d in itertools.product(range(q), repeat=4):
        if math.gcd((a * d - b * c) % q, q) == 1:
            count += 1
    return count


class TestSieve:
    def test_small(self):
        assert prime_sieve(10) == [2, 3, 5, 7]
        assert prime_sieve(2) == [2]

    def test_against_trial_division(self):
        assert prime_sieve(100) == trial_primes(100)
        assert len(prime_sieve(100)) == 25

    def test_pi_exact(self):
        assert pi_exact(10) == 4
        assert pi_exact(1) == 0
        assert pi_exact(10**6) == 78498

    def test_ceiling_override(self, monkeypatch):
        monkeypatch.setenv(arith.SIEVE_CEILING_ENV, "1000")
        with pytest.raises(ResourceError):
            pi_exact(2000)
        value, source = prime_count_bound(2000)
        assert source == "Dusart bound"
        assert compare(pi_exact(1000), value) == HOLDS


class TestDusart:
    def test_at_e(self):
        # ln x = 1 gives e * 2.3
        v = dusart_bound(LogValue(mpmath.e, mpmath.mpf(0)))
        assert abs(v.value - mpmath.mpf(23) / 10 * mpmath.e) < 1e-30
        assert abs(float(v) - 6.25205) < 1e-5

    def test_at_two(self):
        assert abs(float(dusart_bound(2)) - 8.296) < 1e-3

    def test_million(self):
        v = dusart_bound(10**6)
        assert abs(float(v) - 79193.39) < 0.01
        assert compare(pi_exact(10**6), v) == HOLDS

    def test_domain(self):
        with pytest.raises(DomainError):
            dusart_bound(1)


class TestFactorisation:
    def test_rad(self):
        assert rad(12) == 6
        assert rad(1) == 1
        assert rad(276480) == 30

    def test_omega(self):
        assert omega_distinct(12) == 2
        assert omega_distinct(1) == 0
        assert omega_distinct(30) == 3

    @given(st.integers(min_value=1, max_value=10**7))
    def test_factorize_roundtrip(self, n):
        fac = factorize(n)
        assert math.prod(p**k for p, k in fac.items()) == n
        assert all(arith.is_prime(p) for p in fac)

    def test_gl2(self):
        assert gl2_order(3) == brute_gl2(3) == 48
        assert gl2_order(5) == brute_gl2(5) == 480
        assert gl2_order(15) == 48 * 480 == 23040

    def test_ord_p(self):
        assert ord_p(Fraction(50, 3), 5) == 2
        assert ord_p(Fraction(2, 75), 5) == -2
        with pytest.raises(DomainError):
            ord_p(0, 3)


class TestLogValue:
    def test_exact_integers(self):
        assert LogValue.of(7).provenance == "exact"
        assert LogValue.of(Fraction(1, 3)).provenance == "approximated"

    def test_compare_verdicts(self):
        assert compare(1, 2) == HOLDS
        assert compare(2, 1) == FAILS
        assert compare(ln_int(2), ln_int(2)) == WITHIN_ERROR
        assert compare(3, 3) == HOLDS

    def test_error_scales_with_magnitude(self):
        big = ln_int(7) * 10**12
        assert big.error < mpmath.mpf(10) ** -(arith.PRECISION_DIGITS - 14)

    @given(st.integers(2, 10**6), st.integers(2, 10**6))
    def test_ln_additive_within_error(self, a, b):
        lhs = ln_int(a * b)
        rhs = ln_int(a) + ln_int(b)
        assert abs(lhs.value - rhs.value) <= lhs.error + rhs.error

    def test_ln_domain(self):
        with pytest.raises(DomainError):
            ln(0)


class TestLogSum:
    def test_log_of(self):
        assert LogSum.log_of(12) == LogSum({2: 2, 3: 1})
        assert LogSum.log_of(Fraction(5, 4)) == LogSum({5: 1, 2: -2})

    @given(st.builds(Fraction, st.integers(1, 10**6), st.integers(1, 10**6)),
           st.builds(Fraction, st.integers(1, 10**6), st.integers(1, 10**6)))
    @settings(max_examples=50)
    def test_log_of_is_a_homomorphism(self, a, b):
        assert LogSum.log_of(a * b) == LogSum.log_of(a) + LogSum.log_of(b)
        assert (LogSum.log_of(a) - LogSum.log_of(a)).is_zero()

    def test_evaluate(self):
        v = LogSum({2: Fraction(1, 2), 3: 1}).evaluate()
        assert abs(v.value - mpmath.log(3 * mpmath.sqrt(2))) <= v.error + mpmath.mpf(10) ** -40
