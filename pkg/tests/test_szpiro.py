from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szpiro_bounds.arith import FAILS, HOLDS, LogValue, dusart_bound, ln_int, ln_pi, prime_sieve
from szpiro_bounds.errors import DomainError
from szpiro_bounds.global_model import Magnitude, ThetaDataDescriptor, descriptor_from_dict
from szpiro_bounds.synthetic import generate
from szpiro_bounds.szpiro import (EXPLICIT, PROBABILISTIC, PUBLISHED_A0, PUBLISHED_B0, all_reports,
                                  baby_product_step, baby_report, baby_threshold_exponent, derive_constants,
                                  diff_bound_step, eps_identities, eps_l, explicit_report, large_place_lemma,
                                  probabilistic_report, ramification_ceiling, ramification_ceiling_check,
                                  small_place_estimate, tautological_report)


def close(x, y, tol=1e-40):
    x, y = LogValue.of(x), LogValue.of(y)
    return abs(x.value - y.value) <= x.error + y.error + tol


class TestEps:
    def test_examples(self):
        assert eps_l(5, PROBABILISTIC) == Fraction(32, 3)
        assert 1 / (6 + eps_l(5)) == Fraction(3, 50) == (Fraction(30, 12) - 1) * Fraction(1, 10) * Fraction(4, 10)
        assert eps_l(7) == Fraction(60, 11)
        assert eps_l(5, EXPLICIT) == Fraction(128, 3)

    def test_pole(self):
        with pytest.raises(DomainError):
            eps_l(3)
        with pytest.raises(DomainError):
            eps_l(9)

    @pytest.mark.parametrize("l", [l for l in prime_sieve(199) if l >= 5])
    def test_identities(self, l):
        assert all(eps_identities(l).values())


class TestConstants:
    def test_rederivation(self):
        c = derive_constants(5, 1)
        assert c.d1 == 276480
        assert c.B == 172800000
        assert c.B0 == PUBLISHED_B0 == 316495
        assert c.A0_matches and c.A0_relative_deviation < Fraction(1, 10**5)
        assert abs(c.A0_raw.value - mpmath.mpf("84372107404.3222")) < 1e-3

    def test_ceiling(self):
        assert ramification_ceiling(5, 1) == 172800000
        assert ramification_ceiling(7, 2) == 276480 * 7**4 * 2
        assert ramification_ceiling(11, 3) == 11**4 * 23040 * 12 * 3

    def test_trace_mentions_each_step(self):
        trace = "\n".join(derive_constants(7, 2).trace)
        for token in ("23040", "276480", "A0", "B0", "eps"):
            assert token in trace


class TestSmallPlaces:
    def test_uses_dusart_above_ceiling(self):
        value, source = small_place_estimate(5, 1)
        assert source == "Dusart bound"
        assert close(value, ln_int(172800000) * dusart_bound(172800000) * 8)

    def test_monotone(self):
        prev = None
        for l in (5, 7, 11, 13):
            row = [small_place_estimate(l, d0)[0].value for d0 in (1, 2, 4)]
            assert row == sorted(row)
            if prev is not None:
                assert all(a <= b for a, b in zip(prev, row))
            prev = row

    def test_growth_like_l5_d0(self):
        ref = small_place_estimate(5, 1)[0].value / 5**5
        for l in (5, 7, 11, 13):
            for d0 in (1, 2, 4):
                ratio = small_place_estimate(l, d0)[0].value / (l**5 * d0) / ref
                assert 0.1 <= ratio <= 10


class TestLargePlaceLemma:
    def test_ramified_bad(self):
        assert large_place_lemma([(2, 1, 1)], 2) >= 1

    def test_counterexample_with_unramified_place(self):
        # one ramified place and one unramified good place: the bound drops below 1
        assert large_place_lemma([(2, 1, 0), (1, 1, 0)], 3) == Fraction(2, 3)


class TestCeilingCheck:
    def test_generated(self):
        ok, problems = ramification_ceiling_check(generate(1, 2, 5, 3))
        assert ok and problems == []

    def test_flag(self, basic_raw):
        d = descriptor_from_dict(basic_raw)
        ok, _ = ramification_ceiling_check(d)
        assert ok
        B = ramification_ceiling(5, 1)
        basic_raw["fibers"][1]["places"][0].update(eK=B + 1, diffK=f"{B}/{B + 1}")
        ok, problems = ramification_ceiling_check(descriptor_from_dict(basic_raw))
        assert not ok and "exceeds" in problems[0]


class TestBaby:
    def test_threshold(self):
        t = baby_threshold_exponent()
        assert abs(t.value - mpmath.mpf("1.2264866")) < 1e-7
        assert t.value <= 1.25

    def test_product_step_at_threshold(self):
        assert baby_product_step(ln_int(6840), ln_int(6840)) == HOLDS

    @given(st.integers(6840, 10**30), st.integers(6840, 10**12))
    @settings(max_examples=100)
    def test_product_step(self, D, d):
        assert baby_product_step(ln_int(D), ln_int(d)) == HOLDS

    def test_product_step_can_fail_below_threshold(self):
        assert baby_product_step(ln_int(20), ln_int(20)) == FAILS

    def test_small_degree_warning(self, basic_raw):
        r = baby_report(descriptor_from_dict(basic_raw))
        assert any("6840" in w for w in r.warnings)

    def test_needs_K_data(self, basic_raw):
        del basic_raw["invariants"]["deg_K"]
        with pytest.raises(DomainError):
            baby_report(descriptor_from_dict(basic_raw))

    def test_rhs(self):
        d = generate(1, 2, 5, 3)
        r = baby_report(d)
        assert close(r.rhs, ln_int(d.deg_K) * d.ln_disc_K * Fraction(25, 16) + ln_pi(), 1e-30)
        assert r.warnings == []
        assert r.checks["threshold"] == HOLDS

    @pytest.mark.parametrize("seed", range(1, 21))
    def test_diff_bound_chain(self, seed):
        d = generate(seed, 2 + seed % 3, [5, 7, 11][seed % 3], 3)
        assert diff_bound_step(d)[0] == HOLDS


class TestProbabilistic:
    def test_unramified_rhs_is_ln_pi(self, basic_raw):
        for fb in basic_raw["fibers"]:
            for v in fb["places"]:
                v.update(eK=1, diffK="0")
        r = probabilistic_report(descriptor_from_dict(basic_raw))
        assert close(r.rhs, ln_pi())

    def test_lhs_scales(self, basic_raw):
        r1 = probabilistic_report(descriptor_from_dict(basic_raw))
        basic_raw["invariants"]["delta_min"] = {"11": 6}
        basic_raw["fibers"][1]["places"][0]["bad"] = {"ord_q": 6}
        r2 = probabilistic_report(descriptor_from_dict(basic_raw))
        assert close(r2.lhs, r1.lhs * 2)
        assert close(r1.rhs, r2.rhs)

    def test_lhs(self, basic_raw):
        d = descriptor_from_dict(basic_raw)
        r = probabilistic_report(d)
        assert close(r.lhs, ln_int(11) * 3 / (6 + Fraction(32, 3)))


class TestExplicit:
    def test_constant(self):
        r = explicit_report(generate(3, 1, 5, 2))
        assert r.components["constant"] == PUBLISHED_A0 * 625 + PUBLISHED_B0

    def test_rhs_assembly(self, basic_raw):
        d = descriptor_from_dict(basic_raw)
        r = explicit_report(d)
        expected = LogValue.of(PUBLISHED_A0 * 625 + PUBLISHED_B0) + (d.ln_cond + d.ln_disc_F) * (24 + Fraction(128, 3))
        assert close(r.rhs, expected, 1e-25)
        assert close(r.lhs, d.ln_delta_min)
        assert r.components["small_source"] == "Dusart bound"
        assert r.components["large_primes"] == []


class TestTautological:
    def test_unramified_is_arch_only(self, basic_raw):
        for fb in basic_raw["fibers"]:
            for v in fb["places"]:
                v.update(eK=1, diffK="0")
        d = descriptor_from_dict(basic_raw)
        r = tautological_report(d)
        assert close(r.rhs, ln_pi() * Fraction(5, 2))
        assert close(r.lhs, -ln_int(11) * Fraction(3, 10))

    def test_budget_fallback(self):
        d = generate(1, 2, 5, 3)
        r = tautological_report(d, budget=1)
        assert all(row["source"] == "term bounds" for row in r.components["per_prime"].values())
        assert close(r.rhs, r.components["term_sum_total"], 1e-30)

    def test_all_reports(self):
        reports = all_reports(generate(1, 2, 5, 3))
        assert list(reports) == ["baby", "explicit", "probabilistic", "tautological"]
        assert all(r.verdict in (HOLDS, FAILS, "within-error") for r in reports.values())

    def test_without_K_data(self):
        d = generate(1, 2, 5, 3)
        d = ThetaDataDescriptor(d.l, d.d0, d.deg_F, d.fibers, d.delta_min, d.cond, d.disc_F)
        assert "baby" not in all_reports(d)
        assert isinstance(d.disc_F, Magnitude)
