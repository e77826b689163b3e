"""Assembly of the Szpiro-type inequalities and rederivation of their constants.

Every inequality here is conditional on an external assumption, so the functions
return reports with a verdict rather than asserting anything.  Only the exact
identities (eps_l, constant rederivation, elementary steps) are hard checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import (FAILS, HOLDS, LogSum, LogValue, ZERO, compare, fraction_str, gl2_order, is_prime,
                    ln, ln_int, ln_pi, prime_count_bound)
from .errors import BudgetError, DomainError
from .expectation import (DEFAULT_BUDGET, A_l_V, a_order, fiber_statistics, iterated_expectation_bruteforce,
                          term_breakdown)
from .global_model import ThetaDataDescriptor, j_plus_one_average, j_square_average, normalized_degree, q_pilot
from .local_field import LocalFieldData, is_small, ln_b
from .tensor_packet import hull_radius

PROBABILISTIC = "probabilistic"
EXPLICIT = "explicit"

PUBLISHED_A0 = 84372107405
PUBLISHED_B0 = 316495
GL2_Z15 = 23040
D1 = GL2_Z15 * 12
BABY_THRESHOLD = 6840
A0_TOLERANCE = Fraction(1, 10**4)


def _check_l(l: int) -> None:
    if l == 3:
        raise DomainError("l = 3 is a pole of eps_l (l^2 + l - 12 = 0)")
    if l <= 3 or not is_prime(l):
        raise DomainError(f"l must be a prime greater than 3, got {l}")


def eps_l(l: int, kind: str = PROBABILISTIC) -> Fraction:
    """24(l+3)/(l^2+l-12) for the probabilistic bound, 96(l+3)/(l^2+l-12) for the explicit one."""
    _check_l(l)
    den = l * l + l - 12
    if kind == PROBABILISTIC:
        return Fraction(24 * (l + 3), den)
    if kind == EXPLICIT:
        return Fraction(96 * (l + 3), den)
    raise DomainError(f"unknown kind {kind!r}")


def eps_identities(l: int) -> dict[str, bool]:
    """The exact identities that produce the eps_l constants."""
    _check_l(l)
    prob = (Fraction(l * (l + 1), 12) - 1) * Fraction(1, 2 * l) * Fraction(4, l + 5)
    expl = Fraction(l * l + l - 12, 24 * l * (l + 5))
    return {
        "j_square_average": j_square_average(l) == Fraction(l * (l + 1), 12),
        "j_plus_one_average": j_plus_one_average(l) == Fraction(l + 5, 4),
        "probabilistic": prob == 1 / (6 + eps_l(l, PROBABILISTIC)),
        "explicit_coefficient": (Fraction(l * (l + 1), 12) - 1) * Fraction(1, 2 * l) * Fraction(1, l + 5) == expl,
        "explicit": expl == 1 / (24 + eps_l(l, EXPLICIT)),
    }


@dataclass
class ConstantSet:
    l: int
    d0: int
    eps_prob: Fraction
    eps_explicit: Fraction
    d1: int
    B: int
    A0: int
    A0_raw: LogValue
    B0: int
    B0_raw: LogValue
    A0_relative_deviation: Fraction
    trace: list[str] = field(default_factory=list)

    @property
    def A0_matches(self) -> bool:
        return self.A0_relative_deviation <= A0_TOLERANCE

    @property
    def B0_matches(self) -> bool:
        return self.B0 == PUBLISHED_B0


def ramification_ceiling(l: int, d0: int) -> int:
    """B = l^4 * #GL_2(Z/15) * 12 * d0."""
    return l**4 * gl2_order(15) * 12 * d0


def _ceil(x: LogValue) -> int:
    c = int(mpmath.ceil(x.value))
    if c - x.value <= x.error or x.value - (c - 1) <= x.error:
        raise DomainError("ceiling undecidable within the error budget")
    return c


def derive_constants(l: int, d0: int) -> ConstantSet:
    """Recompute A0 = ceil(d1^2 (1 + 1.3/ln d1)) and B0 = ceil(d1 ln pi) from d1 = 23040*12."""
    _check_l(l)
    if d0 < 1:
        raise DomainError("d0 must be positive")
    d1 = gl2_order(15) * 12
    B = ramification_ceiling(l, d0)
    a_raw = (LogValue.of(Fraction(13, 10)) / ln_int(d1) + 1) * (d1 * d1)
    b_raw = ln_pi() * d1
    A0 = _ceil(a_raw)
    B0 = _ceil(b_raw)
    dev = abs(Fraction(A0 - PUBLISHED_A0, PUBLISHED_A0))
    trace = [
        f"#GL_2(Z/15) = #GL_2(F_3) * #GL_2(F_5) = {gl2_order(3)} * {gl2_order(5)} = {gl2_order(15)}",
        f"d1 = {gl2_order(15)} * 12 = {d1}",
        f"B = l^4 d1 d0 = {l}^4 * {d1} * {d0} = {B}",
        f"A0 raw = d1^2 (1 + 1.3/ln d1) = {a_raw.to_str(25)}; ceiling {A0}; published {PUBLISHED_A0}",
        f"B0 raw = d1 ln(pi) = {b_raw.to_str(25)}; ceiling {B0}; published {PUBLISHED_B0}",
        f"eps (probabilistic) = {fraction_str(eps_l(l, PROBABILISTIC))}, eps (explicit) = {fraction_str(eps_l(l, EXPLICIT))}",
    ]
    return ConstantSet(l, d0, eps_l(l, PROBABILISTIC), eps_l(l, EXPLICIT), d1, B, A0, a_raw, B0, b_raw, dev, trace)


# ---------------------------------------------------------------------------
# reports


@dataclass
class InequalityReport:
    kind: str
    lhs: LogValue
    rhs: LogValue
    verdict: str
    components: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def _report(kind: str, lhs: LogValue, rhs: LogValue, **kw) -> InequalityReport:
    return InequalityReport(kind, lhs, rhs, compare(lhs, rhs), **kw)


def tautological_report(desc: ThetaDataDescriptor, budget: int = DEFAULT_BUDGET) -> InequalityReport:
    """-deg(P_q) <= sum_p E_p^2(ln R) + arch, with R the four-case hull radius.

    Fibers small enough for the budget are enumerated exactly; others fall back to
    the closed-form term sum.  The term sum is reported alongside either way.
    """
    l = desc.l
    lhs = -normalized_degree(q_pilot(desc), desc.d0).evaluate()
    breakdown = term_breakdown(desc, budget)
    arch = breakdown.arch
    rhs = arch
    per_prime = {}
    warnings = []
    for fb in desc.fibers:
        fields = {id(v): v.local_field for v in fb.places}

        def ln_radius(j, vs, fields=fields):
            return hull_radius([fields[id(v)] for v in vs], a_order(j, l, vs[-1])).ln_radius

        b = breakdown.bounds[fb.p]
        term_sum = -b["I"] + b["II"] + b["III"] + b["IV"] + b["V"]
        try:
            val = iterated_expectation_bruteforce(fb, desc.d0, l, ln_radius, budget)
            source = "enumeration"
        except BudgetError as exc:
            val = term_sum
            source = "term bounds"
            warnings.append(f"p={fb.p}: enumeration needs {exc.required} evaluations; used closed-form terms")
        rhs = rhs + val
        per_prime[fb.p] = {"value": val, "source": source, "term_sum": term_sum,
                           "term_sum_verdict": compare(val, term_sum)}
    return _report("tautological", lhs, rhs,
                   components={"per_prime": per_prime, "arch": arch, "terms": breakdown,
                               "term_sum_total": breakdown.bound_sum()},
                   warnings=warnings)


def probabilistic_report(desc: ThetaDataDescriptor) -> InequalityReport:
    """ln|Delta|/((6+eps) [F:Q]) <= ln Diffbar + sum_p ln ebar_p + A."""
    l = desc.l
    eps = eps_l(l, PROBABILISTIC)
    lhs = desc.ln_delta_min / ((6 + eps) * desc.deg_F)
    ln_diffbar = ZERO
    ln_ebar = ZERO
    stats = {}
    for fb in desc.fibers:
        st = fiber_statistics(fb, desc.d0)
        stats[fb.p] = st
        ln_diffbar = ln_diffbar + st.ln_diffbar_part
        ln_ebar = ln_ebar + ln(st.ebar)
    A = A_l_V(desc)
    A_alt = A_l_V(desc, Fraction(4, l + 5))
    rhs = ln_diffbar + ln_ebar + A
    return _report("probabilistic", lhs, rhs, components={
        "eps": eps, "ln_diffbar": ln_diffbar, "sum_ln_ebar": ln_ebar, "A": A,
        "A_with_4_over_l_plus_5": A_alt, "rhs_with_4_over_l_plus_5": ln_diffbar + ln_ebar + A_alt,
        "fiber_statistics": stats,
    })


def baby_threshold_exponent() -> LogValue:
    """2/ln(6840) + 1, which must not exceed 5/4."""
    return LogValue.of(2) / ln_int(BABY_THRESHOLD) + 1


def baby_product_step(ln_D: LogValue, ln_d: LogValue) -> str:
    """(ln D + 2)(ln d + 2) <= (25/16) ln D ln d."""
    return compare((ln_D + 2) * (ln_d + 2), (ln_D * ln_d) * Fraction(25, 16))


def diff_bound_step(desc: ThetaDataDescriptor) -> tuple[str, LogValue, LogValue]:
    """ln Diffbar <= ln(rad|Disc K| [K:Q]); needs disc_K as an integer or factorization."""
    fac = desc.disc_K.factorization() if desc.disc_K is not None else None
    if fac is None or desc.deg_K is None:
        raise DomainError("the different bound needs deg_K and a factored disc_K")
    lhs = ZERO
    for fb in desc.fibers:
        lhs = lhs + fiber_statistics(fb, desc.d0).ln_diffbar_part
    rhs = LogSum.log_of(math.prod(fac.keys()) * desc.deg_K).evaluate()
    return compare(lhs, rhs), lhs, rhs


def baby_report(desc: ThetaDataDescriptor) -> InequalityReport:
    """ln|Delta|/((6+eps)[F:Q]) <= (5/4)^2 ln[K:Q] ln|Disc K| + ln(pi), with each proof step checked."""
    if desc.deg_K is None or desc.disc_K is None:
        raise DomainError("the baby bound needs deg_K and disc_K")
    l = desc.l
    eps = eps_l(l, PROBABILISTIC)
    lhs = desc.ln_delta_min / ((6 + eps) * desc.deg_F)
    ln_d = ln_int(desc.deg_K) if desc.deg_K > 1 else ZERO
    ln_D = desc.ln_disc_K
    rhs = ln_d * ln_D * Fraction(25, 16) + ln_pi()
    warnings = []
    if desc.deg_K < BABY_THRESHOLD:
        warnings.append(f"deg_K = {desc.deg_K} < {BABY_THRESHOLD}: the 5/4 exponent step is not justified")
    checks = {"threshold": compare(baby_threshold_exponent(), Fraction(5, 4))}
    prob = probabilistic_report(desc)
    fac = desc.disc_K.factorization()
    if fac is not None:
        checks["diff_bound"] = diff_bound_step(desc)[0]
        omega = omega_distinct_from(fac)
        checks["ebar_bound"] = compare(prob.components["sum_ln_ebar"], ln_d * omega)
        checks["omega_prime_support"] = compare(LogValue.of(omega), ln_D / ln_int(2))
    checks["product_step"] = baby_product_step(ln_D, ln_d)
    # the printed third step, with its own exponent and coefficient
    third = ZERO
    for fb in desc.fibers:
        st = fiber_statistics(fb, desc.d0)
        w = 1 - st.P_unr ** ((l + 1) // 4)
        if w:
            third = third + (ln_b(fb.p) + Fraction(4, l + 1)) * w
    checks["ramification_term_bound"] = compare(third, ln_D)
    checks["assembled"] = compare(prob.rhs, ln_D + ln_d + ln_D * ln_d + ln_D + ln_pi())
    checks["probabilistic_below_baby"] = compare(prob.rhs, rhs)
    return _report("baby", lhs, rhs, components={"probabilistic_rhs": prob.rhs, "ln_deg_K": ln_d, "ln_disc_K": ln_D},
                   checks=checks, warnings=warnings)


def omega_distinct_from(factors: dict[int, int]) -> int:
    return sum(1 for k in factors.values() if k)


def small_place_estimate(l: int, d0: int) -> tuple[LogValue, str]:
    """(l+3) ln(B) pi(B), with pi(B) exact below the sieve ceiling and Dusart above."""
    B = ramification_ceiling(l, d0)
    count, source = prime_count_bound(B)
    return ln_int(B) * count * (l + 3), source


def large_place_lemma(places: list[tuple[int, int, int]], deg_F: int) -> Fraction:
    """2 sum_w f(e - 1 + c) / [F:Q] over the places (e, f, c) of F above one prime."""
    return Fraction(2 * sum(f * (e - 1 + c) for e, f, c in places), deg_F)


def explicit_report(desc: ThetaDataDescriptor) -> InequalityReport:
    """ln|Delta| <= A0 d0^2 l^4 + B0 d0 + (24+eps)(ln|Cond| + ln|Disc F|)."""
    l, d0 = desc.l, desc.d0
    consts = derive_constants(l, d0)
    eps = consts.eps_explicit
    lhs = desc.ln_delta_min
    conductor_part = (desc.ln_cond + desc.ln_disc_F) * (24 + eps)
    rhs = LogValue.of(PUBLISHED_A0 * d0 * d0 * l**4 + PUBLISHED_B0 * d0) + conductor_part
    B = consts.B
    small, source = small_place_estimate(l, d0)
    infinite = ln_pi() * Fraction(l + 5, 4)
    large_primes = [fb.p for fb in desc.fibers if fb.p > B and any(v.ramified for v in fb.places)]
    large = ZERO
    for p in large_primes:
        large = large + ln_int(p)
    large = large * Fraction(l + 5, 4)
    large_bound = (desc.ln_disc_F + desc.ln_cond) / desc.deg_F * 2 * Fraction(l + 5, 4)
    # the bound before the constant was simplified, with the (24+eps) factor applied throughout
    count, _ = prime_count_bound(B)
    pre = ((ln_int(B) * count + ln_pi()) * desc.deg_F + desc.ln_disc_F + desc.ln_cond) * (24 + eps)
    k_F = desc.deg_F // d0
    lemma = {}
    for fb in desc.fibers:
        if any(v.ramified for v in fb.places):
            places = [(v.e0, k_F * v.f0, 1 if v.bad else 0) for v in fb.places]
            lemma[fb.p] = large_place_lemma(places, desc.deg_F)
    return _report("explicit", lhs, rhs, components={
        "eps": eps, "B": B, "constant": PUBLISHED_A0 * d0 * d0 * l**4 + PUBLISHED_B0 * d0,
        "conductor_part": conductor_part, "infinite": infinite, "large": large, "large_bound": large_bound,
        "large_primes": large_primes, "small": small, "small_source": source,
        "pre_result_rhs": pre, "pre_result_verdict": compare(lhs, pre),
        "large_place_lemma": lemma,
    }, checks={"ramification_ceiling": HOLDS if ramification_ceiling_check(desc)[0] else FAILS})


def ramification_ceiling_check(desc: ThetaDataDescriptor) -> tuple[bool, list[str]]:
    """Every eK <= B, and every place above p > B is small."""
    B = ramification_ceiling(desc.l, desc.d0)
    problems = []
    for fb in desc.fibers:
        for i, v in enumerate(fb.places):
            if v.eK > B:
                problems.append(f"p={fb.p} place {i}: eK = {v.eK} exceeds B = {B}")
            if fb.p > B and not is_small(LocalFieldData(fb.p, v.eK, v.fK, v.diffK)):
                problems.append(f"p={fb.p} place {i}: above the ceiling but not small")
    return not problems, problems


def all_reports(desc: ThetaDataDescriptor, budget: int = DEFAULT_BUDGET) -> dict[str, InequalityReport]:
    out = {
        "tautological": tautological_report(desc, budget),
        "probabilistic": probabilistic_report(desc),
        "explicit": explicit_report(desc),
    }
    if desc.deg_K is not None and desc.disc_K is not None:
        out["baby"] = baby_report(desc)
    return dict(sorted(out.items()))
