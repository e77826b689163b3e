"""Iterated expectations over tuples of places and the five per-prime terms.

The probability space over a prime p: j is uniform on 1..(l-1)/2 and, given j,
the tuple (v_0, ..., v_j) is drawn i.i.d. with Pr(v) = e0 f0 / d0.  Every closed
form below has a brute-force twin in :func:`iterated_expectation_bruteforce`.

Term I is returned as the positive quantity E(ord_p(q_{v_j}^{j^2/2l})) ln p; it
enters the estimate with a minus sign.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .arith import LogSum, LogValue, ZERO, compare, exp, ln, ln_int, ln_pi, power
from .errors import BudgetError, DomainError
from .global_model import Fiber, PlaceRecord, ThetaDataDescriptor, j_plus_one_average, place_probability
from .local_field import ln_b

DEFAULT_BUDGET = 10**7


def _check_l(l: int) -> None:
    if l <= 3 or l % 2 == 0:
        raise DomainError(f"l must be an odd prime greater than 3, got {l}")


@dataclass(frozen=True)
class FiberStatistics:
    p: int
    P_unr: Fraction
    ebar: Fraction
    mean_p_diff: LogValue
    diffbar: LogValue

    @property
    def ln_diffbar_part(self) -> LogValue:
        """diffbar_p ln p = ln E(p^diff)."""
        return ln(self.mean_p_diff)


def fiber_statistics(fb: Fiber, d0: int) -> FiberStatistics:
    """P_unr, average ramification index and average different order over one prime."""
    P_unr = Fraction(0)
    ebar = Fraction(0)
    mean = ZERO
    for v in fb.places:
        pr = place_probability(v, d0)
        if not v.ramified:
            P_unr += pr
        ebar += pr * v.eK
        mean = mean + power(fb.p, v.diffK) * pr
    diffbar = ln(mean) / ln_int(fb.p)
    return FiberStatistics(fb.p, P_unr, ebar, mean, diffbar)


def tuple_count(n_places: int, l: int) -> int:
    return sum(n_places ** (j + 1) for j in range(1, (l - 1) // 2 + 1))


def iterated_expectation_bruteforce(fb: Fiber, d0: int, l: int,
                                    quantity: Callable[[int, tuple[PlaceRecord, ...]], object],
                                    budget: int = DEFAULT_BUDGET):
    """E over j uniform in 1..(l-1)/2 of E over i.i.d. tuples of length j+1.

    ``quantity(j, places)`` may return a Fraction, a LogSum or a LogValue; the result
    has the same kind and is exact for the first two.
    """
    _check_l(l)
    need = tuple_count(len(fb.places), l)
    if need > budget:
        raise BudgetError(f"enumeration needs {need} evaluations, budget is {budget}", need)
    probs = [place_probability(v, d0) for v in fb.places]
    n = (l - 1) // 2
    outer = None
    for j in range(1, n + 1):
        inner = None
        for idx in itertools.product(range(len(fb.places)), repeat=j + 1):
            w = Fraction(1)
            for i in idx:
                w *= probs[i]
            val = quantity(j, tuple(fb.places[i] for i in idx))
            term = val * w
            inner = term if inner is None else inner + term
        outer = inner if outer is None else outer + inner
    return outer * Fraction(1, n)


# ---------------------------------------------------------------------------
# per-tuple quantities


def a_order(j: int, l: int, v: PlaceRecord) -> Fraction:
    """ord_p(q_v^(j^2/2l)) = j^2 ord_v(q) / (2l e0); zero away from bad places."""
    if v.bad is None:
        return Fraction(0)
    return Fraction(j * j * v.bad.ord_q, 2 * l * v.e0)


def quantity_I(l: int, p: int):
    return lambda j, vs: LogSum({p: a_order(j, l, vs[-1])})


def quantity_II(p: int):
    def q(j, vs):
        d = [v.diffK for v in vs]
        return LogSum({p: sum(d, Fraction(0)) - max(d)})
    return q


def quantity_III(j, vs) -> Fraction:
    return Fraction(1 if any(v.ramified for v in vs) else 0)


def quantity_IV(p: int):
    lb = ln_b(p)
    return lambda j, vs: lb * (j + 1) if any(v.ramified for v in vs) else ZERO


def quantity_V(j, vs) -> LogSum:
    total = LogSum()
    for v in vs:
        total = total + LogSum.log_of(v.eK)
    return total


# ---------------------------------------------------------------------------
# closed forms


def term_I(fb: Fiber, d0: int, l: int) -> LogSum:
    """l(l+1)/12 * (1/2l) * (1/d0) sum_bad ord_v(q) f0 ln p; this prime's share of deg_lgp(P_Theta)."""
    _check_l(l)
    s = sum((Fraction(v.bad.ord_q * v.f0) for v in fb.places if v.bad is not None), Fraction(0))
    return LogSum({fb.p: Fraction(l * (l + 1), 12) * Fraction(1, 2 * l) * s / d0})


def term_II_bound(stats: FiberStatistics, l: int) -> LogValue:
    """(l+1)/4 * diffbar_p * ln p."""
    return stats.ln_diffbar_part * Fraction(l + 1, 4)


def term_III(stats: FiberStatistics, l: int) -> tuple[Fraction, Fraction]:
    """(exact, bound) = (1 - (2/(l-1)) sum_j P^(j+1), 1 - P^((l+1)/2))."""
    _check_l(l)
    n = (l - 1) // 2
    P = stats.P_unr
    exact = 1 - sum((P ** (j + 1) for j in range(1, n + 1)), Fraction(0)) / n
    return exact, 1 - P ** ((l + 1) // 2)


@dataclass(frozen=True)
class TermIV:
    exact: LogValue
    displayed_bound: LogValue
    verdict: str  # holds / fails / within-error for exact <= displayed_bound


def term_IV(stats: FiberStatistics, l: int) -> TermIV:
    """ln b_p (2/(l-1)) sum_j (j+1)(1 - P^(j+1)) against (l+5)/4 ln b_p (1 - P^((l+1)/2)).

    ln b_p < 0 for every prime, so the bounding step can reverse; the verdict
    records which way it goes.
    """
    _check_l(l)
    n = (l - 1) // 2
    P = stats.P_unr
    lb = ln_b(stats.p)
    coeff = sum((Fraction(j + 1) * (1 - P ** (j + 1)) for j in range(1, n + 1)), Fraction(0)) / n
    exact = lb * coeff
    bound = lb * (Fraction(l + 5, 4) * (1 - P ** ((l + 1) // 2)))
    return TermIV(exact, bound, compare(exact, bound))


def term_V_bound(stats: FiberStatistics, l: int) -> LogValue:
    """(l+5)/4 ln(ebar_p)."""
    _check_l(l)
    return ln(stats.ebar) * Fraction(l + 5, 4)


def arch_contribution(l: int) -> LogValue:
    """(l+5)/4 ln(pi)."""
    _check_l(l)
    return ln_pi() * j_plus_one_average(l)


def A_l_V(desc: ThetaDataDescriptor, coefficient: Fraction | None = None) -> LogValue:
    """ln(pi) + sum_p (1 - P_unr^((l+1)/2)) (ln b_p + c).

    ``c`` defaults to the displayed 5/(l+4); pass 4/(l+5) for the value that comes
    out of dividing the term-III contribution by (l+5)/4.
    """
    l = desc.l
    c = Fraction(5, l + 4) if coefficient is None else coefficient
    total = ln_pi()
    for fb in desc.fibers:
        st = fiber_statistics(fb, desc.d0)
        w = 1 - st.P_unr ** ((l + 1) // 2)
        if w:
            total = total + (ln_b(fb.p) + c) * w
    return total


@dataclass
class TermBreakdown:
    """Closed-form bounds per prime, optional brute-force values, and the archimedean term."""

    bounds: dict[int, dict[str, LogValue]] = field(default_factory=dict)
    exact: dict[int, dict[str, LogValue]] = field(default_factory=dict)
    term_IV_verdict: dict[int, str] = field(default_factory=dict)
    arch: LogValue = ZERO

    def bound_sum(self) -> LogValue:
        """-I + II + III + IV + V over all primes, plus the archimedean term."""
        total = self.arch
        for p in sorted(self.bounds):
            b = self.bounds[p]
            total = total - b["I"] + b["II"] + b["III"] + b["IV"] + b["V"]
        return total


def term_breakdown(desc: ThetaDataDescriptor, budget: int = DEFAULT_BUDGET, brute: bool = True) -> TermBreakdown:
    l = desc.l
    out = TermBreakdown(arch=arch_contribution(l))
    for fb in desc.fibers:
        st = fiber_statistics(fb, desc.d0)
        t3_exact, t3_bound = term_III(st, l)
        t4 = term_IV(st, l)
        out.bounds[fb.p] = {
            "I": term_I(fb, desc.d0, l).evaluate(),
            "II": term_II_bound(st, l),
            "III": LogValue.of(t3_bound),
            "IV": t4.displayed_bound,
            "V": term_V_bound(st, l),
        }
        out.term_IV_verdict[fb.p] = t4.verdict
        if brute and tuple_count(len(fb.places), l) <= budget:
            p = fb.p
            out.exact[p] = {
                "I": iterated_expectation_bruteforce(fb, desc.d0, l, quantity_I(l, p), budget).evaluate(),
                "II": iterated_expectation_bruteforce(fb, desc.d0, l, quantity_II(p), budget).evaluate(),
                "III": LogValue.of(iterated_expectation_bruteforce(fb, desc.d0, l, quantity_III, budget)),
                "IV": iterated_expectation_bruteforce(fb, desc.d0, l, quantity_IV(p), budget),
                "V": iterated_expectation_bruteforce(fb, desc.d0, l, quantity_V, budget).evaluate(),
            }
    return out


# ---------------------------------------------------------------------------
# Jensen


@dataclass
class JensenVerdict:
    left: str
    right_literal: str
    right_standard: str
    values: dict[str, LogValue]


def jensen_check(samples: Sequence[tuple]) -> JensenVerdict:
    """Check exp(E ln X) <= E X and E X <= ln E exp(X) on weighted samples.

    ``samples`` holds (x, weight) pairs with positive x and rational weights summing
    to one.  The standard convex form exp(E X) <= E exp(X) is checked as well.
    """
    if not samples:
        raise DomainError("need at least one sample")
    total_w = sum((Fraction(w) for _, w in samples), Fraction(0))
    if total_w != 1:
        raise DomainError(f"weights sum to {total_w}, not 1")
    mean_x = ZERO
    mean_ln = ZERO
    mean_exp = ZERO
    for x, w in samples:
        w = Fraction(w)
        lx = LogValue.of(x)
        if lx.value <= 0:
            raise DomainError("samples must be positive")
        mean_x = mean_x + lx * w
        mean_ln = mean_ln + ln(x if not isinstance(x, float) else lx) * w
        mean_exp = mean_exp + exp(lx) * w
    geo = exp(mean_ln)
    return JensenVerdict(
        left=compare(geo, mean_x),
        right_literal=compare(mean_x, ln(mean_exp)),
        right_standard=compare(exp(mean_x), mean_exp),
        values={"exp_E_ln": geo, "E": mean_x, "ln_E_exp": ln(mean_exp)},
    )
