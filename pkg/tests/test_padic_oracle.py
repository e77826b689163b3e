from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from szpiro_bounds.errors import DomainError, PrecisionError, PrecisionExhausted, UnsupportedCase, WindowError
from szpiro_bounds.padic_oracle import (TruncatedEisensteinRing, certified_valuation, crude_analytic_bound,
                                        crude_min_term, log_series, primitive_root, required_terms,
                                        teichmuller_root, valuation)

TAME = [(p, E) for p in (3, 5, 7, 13) for E in (1, 2, 3, 4, 6) if (p - 1) % E == 0]


def hensel_root(t, E, p, N):
    """Newton iteration for x^E = 1 starting at t mod p; an independent Teichmuller oracle."""
    mod = p**N
    x = t % mod
    for _ in range(N + 2):
        fx = (pow(x, E, mod) - 1) % mod
        dfx = E * pow(x, E - 1, mod) % mod
        x = (x - fx * pow(dfx, -1, mod)) % mod
    return x


def rational_log(a: int, p: int, N: int, terms: int = 80) -> int:
    """log(1 + a) for an integer a with p | a, summed in Fractions and reduced mod p^N."""
    s = Fraction(0)
    for n in range(1, terms + 1):
        s += Fraction((-1) ** (n + 1) * a**n, n)
    num, den = s.numerator, s.denominator
    k = 0
    while den % p == 0:
        den //= p
        k -= 1
    assert k == 0 or num % p**(-k) == 0
    num //= p ** (-k) if k < 0 else 1
    mod = p**N
    return num * pow(den, -1, mod) % mod


class TestRing:
    def test_basic_valuations(self):
        ring = TruncatedEisensteinRing(5, 4, 8)
        assert valuation(ring.uniformizer()) == Fraction(1, 4)
        assert valuation(ring.scalar(5)) == 1
        assert valuation(ring.element([0, 0, 1])) == Fraction(1, 2)

    def test_uniformizer_power_is_p(self):
        ring = TruncatedEisensteinRing(7, 3, 6)
        assert (ring.uniformizer() ** 3).coeffs == ring.scalar(7).coeffs

    def test_zero_has_no_valuation(self):
        ring = TruncatedEisensteinRing(5, 2, 4)
        with pytest.raises(PrecisionExhausted):
            valuation(ring.zero())
        with pytest.raises(PrecisionExhausted):
            valuation(ring.scalar(5**4))

    def test_certified_valuation_raises_precision(self):
        v = certified_valuation(lambda r: r.scalar(5**10), 5, 1, 4)
        assert v == 10

    def test_unsupported(self):
        with pytest.raises(UnsupportedCase):
            TruncatedEisensteinRing(5, 3, 8)
        with pytest.raises(DomainError):
            TruncatedEisensteinRing(5, 2, 3)

    @given(st.sampled_from(TAME), st.lists(st.integers(0, 10**6), min_size=6, max_size=6),
           st.lists(st.integers(0, 10**6), min_size=6, max_size=6),
           st.lists(st.integers(0, 10**6), min_size=6, max_size=6))
    @settings(max_examples=60)
    def test_ring_axioms(self, pe, a, b, c):
        p, E = pe
        ring = TruncatedEisensteinRing(p, E, 6)
        x, y, z = (ring.element(v[:E]) for v in (a, b, c))
        assert (x * y).coeffs == (y * x).coeffs
        assert ((x * y) * z).coeffs == (x * (y * z)).coeffs
        assert (x * (y + z)).coeffs == (x * y + x * z).coeffs

    @given(st.sampled_from(TAME), st.integers(0, 9), st.integers(0, 9), st.integers(1, 10**4), st.integers(1, 10**4))
    @settings(max_examples=60)
    def test_valuation_is_multiplicative(self, pe, i, j, u, w):
        p, E = pe
        assume(u % p and w % p)
        ring = TruncatedEisensteinRing(p, E, 20)
        x = ring.pi_power(i) * u
        y = ring.pi_power(j) * w
        assert valuation(x * y) == valuation(x) + valuation(y)


class TestTeichmuller:
    def test_trivial_index(self):
        ring = TruncatedEisensteinRing(5, 4, 8)
        assert teichmuller_root(0, ring).coeffs[0] == 1

    def test_p5_e4(self):
        ring = TruncatedEisensteinRing(5, 4, 10)
        r1 = teichmuller_root(1, ring)
        r2 = teichmuller_root(2, ring)
        assert r2.coeffs[0] % 5 == 4
        assert (r1 * r1).coeffs == r2.coeffs

    @pytest.mark.parametrize("p,E", TAME)
    def test_matches_hensel_oracle(self, p, E):
        N = 9
        ring = TruncatedEisensteinRing(p, E, N)
        g = primitive_root(p)
        for k in range(E):
            root = teichmuller_root(k, ring)
            t = pow(g, k * (p - 1) // E, p)
            assert root.coeffs[0] == hensel_root(t, E, p, N)
            assert (root**E - 1).is_zero()

    def test_bad_index(self):
        with pytest.raises(DomainError):
            teichmuller_root(4, TruncatedEisensteinRing(5, 4, 6))


class TestLog:
    def test_log_of_one(self):
        ring = TruncatedEisensteinRing(5, 1, 6)
        assert log_series(ring.one()).is_zero()

    def test_p5(self):
        ring = TruncatedEisensteinRing(5, 1, 8)
        assert valuation(log_series(ring.scalar(6))) == 1

    def test_p2(self):
        ring = TruncatedEisensteinRing(2, 1, 10)
        assert valuation(log_series(ring.scalar(5))) == 2

    def test_domain(self):
        ring = TruncatedEisensteinRing(2, 1, 10)
        with pytest.raises(DomainError):
            log_series(ring.scalar(3))

    def test_too_few_terms(self):
        ring = TruncatedEisensteinRing(5, 1, 10)
        with pytest.raises(PrecisionError) as exc:
            log_series(ring.scalar(6), terms=3)
        assert exc.value.required == required_terms(Fraction(1), 5, 10)
        log_series(ring.scalar(6), terms=exc.value.required)

    @pytest.mark.parametrize("p,a", [(2, 4), (2, 12), (3, 3), (3, 18), (5, 5), (5, 50), (7, 14)])
    def test_matches_rational_series(self, p, a):
        N = 8
        ring = TruncatedEisensteinRing(p, 1, N)
        assert log_series(ring.scalar(1 + a)).coeffs[0] == rational_log(a, p, N)

    @given(st.sampled_from(TAME), st.integers(1, 12), st.integers(1, 12), st.integers(1, 500), st.integers(1, 500))
    @settings(max_examples=40, deadline=None)
    def test_homomorphism(self, pe, i, j, u, w):
        p, E = pe
        assume(Fraction(i, E) > Fraction(1, p - 1) and Fraction(j, E) > Fraction(1, p - 1))
        ring = TruncatedEisensteinRing(p, E, 6)
        x = ring.one() + ring.pi_power(i) * u
        y = ring.one() + ring.pi_power(j) * w
        assert log_series(x * y).coeffs == (log_series(x) + log_series(y)).coeffs

    @given(st.sampled_from(TAME), st.integers(1, 18), st.integers(1, 500))
    @settings(max_examples=60, deadline=None)
    def test_valuation_preserved(self, pe, k, u):
        p, E = pe
        assume(u % p and Fraction(1, p - 1) < Fraction(k, E) < 7)
        ring = TruncatedEisensteinRing(p, E, 8)
        a = ring.pi_power(k) * u
        assert valuation(log_series(ring.one() + a)) == Fraction(k, E)


class TestCrude:
    def test_examples(self):
        assert crude_min_term(1, 2) == 1
        assert crude_min_term(2, 3) == 2
        assert crude_min_term(Fraction(1, 2), 2) == 0
        assert abs(crude_analytic_bound(1, 2) - mpmath.mpf("0.91392867")) < 1e-7

    def test_window_too_short(self):
        with pytest.raises(WindowError):
            crude_min_term(Fraction(1, 10), 2, n_max=5)

    @given(st.fractions(min_value=1, max_value=5, max_denominator=6), st.sampled_from([2, 3, 5, 7, 11]))
    @settings(max_examples=60, deadline=None)
    def test_exact_minimum_above_analytic(self, v, p):
        m = crude_min_term(v, p)
        assert mpmath.mpf(m.numerator) / m.denominator >= crude_analytic_bound(v, p) - mpmath.mpf(10) ** -30
        brute = min(n * v - _ordp(n, p) for n in range(1, 400))
        assert m == brute


def _ordp(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k
