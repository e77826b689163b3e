import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from szpiro_bounds.arith import FAILS, ln_int, ln_pi
from szpiro_bounds.errors import DomainError, UnsupportedCase
from szpiro_bounds.local_field import LocalFieldData, ln_b
from szpiro_bounds.padic_oracle import TruncatedEisensteinRing, teichmuller_root
from szpiro_bounds.tensor_packet import (ARCHIMEDEAN, GENERAL, SMALL, UNRAMIFIED, beta_order, diff_norms,
                                         hull_radius, idempotent_set, verify_descent, worst_case_radius)

DESCENT_GRID = [
    (p, combo)
    for p in (5, 7, 13)
    for m in (1, 2, 3)
    for combo in itertools.combinations_with_replacement([e for e in (1, 2, 3, 4, 6) if (p - 1) % e == 0], m)
]


def close(x, y, tol=1e-40):
    return abs(x.value - y.value) <= x.error + y.error + tol


class TestNorms:
    def test_unramified(self):
        assert diff_norms([LocalFieldData(5), LocalFieldData(5)]) == (0, 0)

    def test_tame_pair(self):
        f = LocalFieldData(7, 3)
        assert diff_norms([f, f]) == (Fraction(4, 3), Fraction(2, 3))
        assert beta_order([f, f]) == Fraction(2, 3)

    def test_single_factor(self):
        assert beta_order([LocalFieldData(7, 6)]) == 0

    def test_mixed_primes_rejected(self):
        with pytest.raises(DomainError):
            diff_norms([LocalFieldData(5), LocalFieldData(7)])


class TestRadius:
    def test_worst_case_unramified(self):
        r = worst_case_radius([LocalFieldData(101)], 0)
        assert r.floor_term == 0
        assert close(r.ln_radius, ln_b(101))

    def test_worst_case_tame_pair(self):
        f = LocalFieldData(7, 3)
        r = worst_case_radius([f, f], 2)
        assert r.floor_term == 1
        assert close(r.ln_radius, -ln_int(7) + ln_b(7) * 2 + ln_int(3) * 2)

    def test_negative_floor(self):
        f = LocalFieldData(7, 3)
        r = worst_case_radius([f, f], 0)
        assert r.floor_term <= -1

    def test_four_cases(self):
        assert hull_radius([LocalFieldData(5), LocalFieldData(5)]).case_tag == UNRAMIFIED
        arch = hull_radius([LocalFieldData.archimedean_place()] * 2, arch=True)
        assert arch.case_tag == ARCHIMEDEAN and close(arch.ln_radius, ln_pi() * 2)
        f = LocalFieldData(7, 3)
        small = hull_radius([f, f], 2)
        assert small.case_tag == SMALL and close(small.ln_radius, -ln_int(7))
        g = LocalFieldData(7, 6)
        general = hull_radius([g, f], 0)
        assert general.case_tag == GENERAL
        fl = -1  # floor(0 - (5/6 + 2/3 - 5/6))
        assert general.floor_term == fl
        assert close(general.ln_radius, ln_int(7) + ln_b(7) * 2 + ln_int(6) + ln_int(3))

    def test_small_can_exceed_worst_case(self):
        # the small-case bound drops the m ln c_p + sum ln e term, which is negative here
        f = LocalFieldData(7, 3)
        small = hull_radius([f, f], 2).ln_radius
        worst = worst_case_radius([f, f], 2).ln_radius
        assert small.value > worst.value

    @given(st.sampled_from([5, 7, 11, 13]), st.integers(0, 20))
    def test_general_matches_worst_case(self, p, a2):
        # away from the small case the two formulas agree exactly
        f = LocalFieldData(p, p - 1)
        a = Fraction(a2, 2)
        assert close(hull_radius([f, f], a).ln_radius, worst_case_radius([f, f], a).ln_radius)

    def test_archimedean_flag_mismatch(self):
        with pytest.raises(DomainError):
            hull_radius([LocalFieldData(5)], arch=True)


def evaluate_at_roots(idem, e_list, p, N):
    """Substitute x_i = alpha_i into an idempotent numerator using plain ring arithmetic."""
    e_sorted = sorted(e_list, reverse=True)
    rest = e_sorted[1:]
    E = 1
    for e in e_sorted:
        E = E * e // __import__("math").gcd(E, e)
    ring = TruncatedEisensteinRing(p, E, N)
    zeta = teichmuller_root(1 % E, ring) if E > 1 else ring.one()
    shape = tuple(rest) + (E,)
    num = idem.numerator.reshape(shape)
    values = {}
    for target in itertools.product(*(range(e) for e in rest)):
        alphas = [zeta ** ((k * (E // e)) % E) * ring.pi_power(E // e) for e, k in zip(rest, target)]
        total = ring.zero()
        for exps in itertools.product(*(range(e) for e in rest)):
            coeff = ring.element([int(c) % ring.modulus for c in num[exps]])
            term = coeff
            for a, n in zip(alphas, exps):
                term = term * (a ** n)
            total = total + term
        values[target] = total
    return ring, values


class TestDescent:
    def test_trivial(self):
        v = verify_descent([1, 1], 5)
        assert v.passed and v.component_count == 1

    def test_quadratic_pair(self):
        v = verify_descent([2, 2], 5)
        assert v.passed
        assert v.component_count == 2
        assert v.denominator_valuation == Fraction(1, 2) == v.beta_order
        assert v.idempotent_min_valuation == -Fraction(1, 2)

    def test_cubic_pair(self):
        assert verify_descent([3, 3], 7).passed

    def test_idempotent_count(self):
        assert len(idempotent_set([4], 5)) == 1
        assert len(idempotent_set([2, 2], 5)) == 2
        assert len(idempotent_set([6, 3, 2], 7)) == 6

    def test_unsupported(self):
        with pytest.raises(UnsupportedCase):
            verify_descent([3], 5)

    @pytest.mark.parametrize("p,e_list", DESCENT_GRID)
    def test_grid(self, p, e_list):
        v = verify_descent(e_list, p)
        assert v.passed, v.checks
        assert v.denominator_valuation == v.beta_order

    @pytest.mark.parametrize("p,e_list", [(5, (2, 2)), (7, (3, 3)), (7, (6, 2)), (13, (4, 3)), (7, (3, 2, 2))])
    def test_idempotents_are_point_indicators(self, p, e_list):
        N = 6
        gs = idempotent_set(e_list, p, precision=N)
        for g in gs:
            ring, values = evaluate_at_roots(g, e_list, p, N)
            for target, val in values.items():
                expected = ring.scalar(p**g.scale if target == g.roots else 0)
                assert (val - expected).is_zero()
