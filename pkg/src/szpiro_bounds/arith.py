"""Exact and high-precision arithmetic plus the elementary number theory helpers.

Rationals are :class:`fractions.Fraction`.  Real quantities (``ln p``, ``ln pi``,
``p**(a/b)``) are :class:`LogValue` objects: an mpmath number together with an
absolute error bound, so that every comparison downstream can be decided with an
explicit error budget.  :class:`LogSum` keeps linear combinations of logarithms of
primes exact, which lets identities such as pilot-degree relations be checked with
zero tolerance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath

from .errors import DomainError, ResourceError

PRECISION_DIGITS = 50
# guard digits on top of the advertised precision
mpmath.mp.dps = PRECISION_DIGITS + 10

DEFAULT_SIEVE_CEILING = 10**8
SIEVE_CEILING_ENV = "SZPIRO_BOUNDS_SIEVE_CEILING"

HOLDS = "holds"
FAILS = "fails"
WITHIN_ERROR = "within-error"


def approx_error(magnitude=0) -> mpmath.mpf:
    """Error bound attached to one rounded evaluation of a value of this magnitude.

    Work happens with 10 guard digits, so one rounding costs at most
    ``(1 + |v|) * 10**-(P + 8)``; for |v| < 10**12 that stays below ``10**-(P - 5)``.
    """
    return (1 + abs(mpmath.mpf(magnitude))) * mpmath.mpf(10) ** (-(PRECISION_DIGITS + 8))


def set_precision(digits: int) -> None:
    """Change the working decimal precision for all subsequent real evaluations."""
    global PRECISION_DIGITS
    if digits < 15:
        raise DomainError(f"precision must be at least 15 digits, got {digits}")
    PRECISION_DIGITS = digits
    mpmath.mp.dps = digits + 10


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"num/den"`` strings into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LogValue:
    """A real number with an absolute error bound.

    ``provenance`` is ``"exact"`` when ``value`` is the true number (error 0) and
    ``"approximated"`` otherwise.
    """

    value: mpmath.mpf
    error: mpmath.mpf = field(default_factory=lambda: mpmath.mpf(0))

    @property
    def provenance(self) -> str:
        return "exact" if self.error == 0 else "approximated"

    @classmethod
    def of(cls, x) -> "LogValue":
        """Exact integers and fractions, rounded when not representable."""
        if isinstance(x, LogValue):
            return x
        if isinstance(x, (int, Fraction)):
            q = Fraction(x)
            num = mpmath.mpf(q.numerator)
            v = num / q.denominator
            exact = num == q.numerator and q.denominator & (q.denominator - 1) == 0
            return cls(v, mpmath.mpf(0) if exact else approx_error(v))
        v = mpmath.mpf(x)
        return cls(v, approx_error(v))

    def __add__(self, other) -> "LogValue":
        o = LogValue.of(other)
        total = self.value + o.value
        err = self.error + o.error
        if total != mpmath.fadd(self.value, o.value, exact=True):
            err += approx_error(total)
        return LogValue(total, err)

    __radd__ = __add__

    def __neg__(self) -> "LogValue":
        return LogValue(-self.value, self.error)

    def __sub__(self, other) -> "LogValue":
        return self + (-LogValue.of(other))

    def __rsub__(self, other) -> "LogValue":
        return LogValue.of(other) - self

    def __mul__(self, other) -> "LogValue":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            prod = mpmath.fmul(self.value, q.numerator, exact=True)
            scaled = self.value * q.numerator / q.denominator
            err = self.error * abs(q.numerator) / q.denominator
            if scaled * q.denominator != prod:
                err += approx_error(scaled)
            return LogValue(scaled, err)
        o = LogValue.of(other)
        prod = self.value * o.value
        err = abs(self.value) * o.error + abs(o.value) * self.error + self.error * o.error
        if prod != mpmath.fmul(self.value, o.value, exact=True):
            err += approx_error(prod)
        return LogValue(prod, err)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogValue":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        o = LogValue.of(other)
        if abs(o.value) <= o.error:
            raise DomainError("division by a value indistinguishable from zero")
        lo = abs(o.value) - o.error
        quot = self.value / o.value
        err = (self.error + abs(quot) * o.error) / lo + approx_error(quot)
        return LogValue(quot, err)

    def __float__(self) -> float:
        return float(self.value)

    def to_str(self, digits: int = 30) -> str:
        return mpmath.nstr(self.value, digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf) \
            if self.value != 0 else "0"

    def __repr__(self) -> str:
        return f"LogValue({self.to_str(20)} ± {mpmath.nstr(self.error, 3)})"


ZERO = LogValue(mpmath.mpf(0))


def ln(x) -> LogValue:
    """Natural logarithm of a positive int, Fraction or LogValue."""
    if isinstance(x, LogValue):
        lo = x.value - x.error
        if lo <= 0:
            raise DomainError("ln of a value that may be non-positive")
        v = mpmath.log(x.value)
        return LogValue(v, x.error / lo + approx_error(v))
    q = as_fraction(x) if not isinstance(x, float) else None
    if q is None:
        if x <= 0:
            raise DomainError(f"ln undefined at {x}")
        v = mpmath.log(x)
        return LogValue(v, approx_error(v))
    if q <= 0:
        raise DomainError(f"ln undefined at {q}")
    if q == 1:
        return ZERO
    v = mpmath.log(q.numerator) - mpmath.log(q.denominator)
    return LogValue(v, 3 * approx_error(v))


@lru_cache(maxsize=None)
def _ln_prime_cached(p: int, digits: int) -> LogValue:
    v = mpmath.log(p)
    return LogValue(v, approx_error(v))


def ln_int(n: int) -> LogValue:
    return _ln_prime_cached(n, PRECISION_DIGITS) if n != 1 else ZERO


def ln_pi() -> LogValue:
    v = mpmath.log(mpmath.pi)
    return LogValue(v, approx_error(v))


def exp(x: LogValue) -> LogValue:
    v = mpmath.exp(x.value)
    return LogValue(v, v * (mpmath.exp(x.error) - 1) + approx_error(v))


def power(p: int, exponent: Fraction) -> LogValue:
    """``p ** exponent`` for a rational exponent, exact when the result is rational."""
    exponent = as_fraction(exponent)
    if exponent.denominator == 1:
        return LogValue.of(Fraction(p) ** exponent.numerator)
    v = mpmath.power(p, mpmath.mpf(exponent.numerator) / exponent.denominator)
    return LogValue(v, 2 * approx_error(v))


def compare(lhs, rhs) -> str:
    """Decide ``lhs <= rhs`` with both error budgets.

    Returns ``"holds"``, ``"fails"`` or ``"within-error"`` when the two intervals overlap.
    """
    a, b = LogValue.of(lhs), LogValue.of(rhs)
    slack = a.error + b.error
    if a.value + slack <= b.value:
        return HOLDS
    if a.value - slack > b.value:
        return FAILS
    if a.value <= b.value and slack == 0:
        return HOLDS
    return WITHIN_ERROR


def leq(lhs, rhs) -> bool:
    """``lhs <= rhs`` up to the error budget (overlapping intervals count as true)."""
    return compare(lhs, rhs) != FAILS


class LogSum:
    """Exact rational combination ``sum_p c_p * ln(p)`` over primes ``p``.

    Logarithms of distinct primes are linearly independent over the rationals, so
    equality of two LogSums is decidable exactly.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction] | None = None):
        self._terms = {p: Fraction(c) for p, c in (terms or {}).items() if c != 0}

    @classmethod
    def log_of(cls, n) -> "LogSum":
        """``ln n`` for a positive rational n, split over its prime factors."""
        q = as_fraction(n)
        if q <= 0:
            raise DomainError(f"ln undefined at {q}")
        terms: dict[int, Fraction] = {}
        for p, k in factorize(q.numerator).items():
            terms[p] = terms.get(p, Fraction(0)) + k
        for p, k in factorize(q.denominator).items():
            terms[p] = terms.get(p, Fraction(0)) - k
        return cls(terms)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(sorted(self._terms.items()))

    def coefficient(self, p: int) -> Fraction:
        return self._terms.get(p, Fraction(0))

    def __add__(self, other: "LogSum") -> "LogSum":
        if isinstance(other, int) and other == 0:
            return self
        out = dict(self._terms)
        for p, c in other._terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return LogSum(out)

    __radd__ = __add__

    def __neg__(self) -> "LogSum":
        return LogSum({p: -c for p, c in self._terms.items()})

    def __sub__(self, other: "LogSum") -> "LogSum":
        return self + (-other)

    def __mul__(self, k) -> "LogSum":
        k = as_fraction(k)
        return LogSum({p: c * k for p, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, k) -> "LogSum":
        return self * (1 / as_fraction(k))

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        return isinstance(other, LogSum) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def is_zero(self) -> bool:
        return not self._terms

    def evaluate(self) -> LogValue:
        total = ZERO
        for p, c in sorted(self._terms.items()):
            total = total + ln_int(p) * c
        return total

    def __repr__(self) -> str:
        body = " + ".join(f"{fraction_str(c)}*ln({p})" for p, c in sorted(self._terms.items()))
        return f"LogSum({body or '0'})"


# ---------------------------------------------------------------------------
# elementary number theory
# ---------------------------------------------------------------------------

def sieve_ceiling() -> int:
    raw = os.environ.get(SIEVE_CEILING_ENV)
    return int(raw) if raw else DEFAULT_SIEVE_CEILING


def prime_sieve(n: int) -> list[int]:
    """All primes <= n in increasing order (Eratosthenes on a bytearray)."""
    if n < 2:
        raise DomainError(f"prime_sieve needs n >= 2, got {n}")
    ceiling = sieve_ceiling()
    if n > ceiling:
        raise ResourceError(f"sieve bound {n} exceeds the configured ceiling {ceiling}")
    flags = _sieve_flags(n)
    return [i for i in range(2, n + 1) if flags[i]]


def _sieve_flags(n: int) -> bytearray:
    flags = bytearray(b"\x01") * (n + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            start = p * p
            flags[start::p] = bytes(len(range(start, n + 1, p)))
    return flags


def pi_exact(x: int) -> int:
    """Number of primes <= x."""
    if x < 1:
        raise DomainError(f"pi_exact needs x >= 1, got {x}")
    if x == 1:
        return 0
    ceiling = sieve_ceiling()
    if x > ceiling:
        raise ResourceError(f"pi({x}) exceeds the configured sieve ceiling {ceiling}")
    return _sieve_flags(x).count(1)


def dusart_bound(x) -> LogValue:
    """Upper bound ``x/ln x * (1 + 1.3/ln x)`` for pi(x), valid for x > 1."""
    xv = LogValue.of(x) if not isinstance(x, LogValue) else x
    if xv.value <= 1:
        raise DomainError(f"Dusart bound needs x > 1, got {x}")
    lx = ln(xv)
    return xv / lx * (1 + LogValue.of(Fraction(13, 10)) / lx)


def prime_count_bound(x: int) -> tuple[LogValue, str]:
    """pi(x) exactly when x fits under the sieve ceiling, else the Dusart bound."""
    if x <= sieve_ceiling():
        return LogValue.of(pi_exact(x)), "exact sieve"
    return dusart_bound(x), "Dusart bound"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation of a positive integer."""
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def rad(n: int) -> int:
    """Product of the distinct primes dividing n; rad(1) = 1."""
    return math.prod(factorize(n))


def omega_distinct(n: int) -> int:
    """Number of distinct prime divisors of n."""
    return len(factorize(n))


def ord_p(x, p: int) -> int:
    """p-adic valuation of a non-zero integer or rational."""
    q = as_fraction(x)
    if q == 0:
        raise DomainError("ord_p(0) is infinite")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def gl2_order(q: int) -> int:
    """#GL_2(Z/q) for a prime power q, or the product over a squarefree modulus."""
    if q < 2:
        raise DomainError(f"gl2_order needs q >= 2, got {q}")
    fac = factorize(q)
    if len(fac) == 1:
        return q * (q - 1) * (q * q - 1)
    if any(k > 1 for k in fac.values()):
        raise DomainError(f"composite modulus {q} must be squarefree")
    return math.prod(gl2_order(r) for r in fac)


def mean(values: Iterable[Fraction]) -> Fraction:
    vals = list(values)
    return sum(vals, Fraction(0)) / len(vals)
