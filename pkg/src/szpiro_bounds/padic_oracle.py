"""Truncated arithmetic in Z/p^N[x]/(x^E - p) for tame Kummer towers.

This is the brute-force substrate.  Everything here is plain integer arithmetic
on coefficient vectors, so the lemmas about valuations, logarithms and roots of
unity can be checked against it without trusting any closed form.

Elements are written in the basis 1, x, ..., x^(E-1) where x is the class of a
uniformiser.  Because the exponents i/E are pairwise distinct modulo 1, the
valuation of an element is exactly ``min(ord_p(c_i) + i/E)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .arith import as_fraction, factorize, is_prime, ln_int
from .errors import DomainError, PrecisionError, PrecisionExhausted, UnsupportedCase, WindowError

DEFAULT_PRECISION = 12
MAX_AUTO_PRECISION = 200


def _ord(c: int, p: int, cap: int) -> int:
    """ord_p of an integer residue, capped at ``cap`` for zero."""
    if c == 0:
        return cap
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def primitive_root(p: int) -> int:
    """Smallest generator of (Z/p)^*."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("no primitive root found")  # unreachable for prime p


@dataclass(frozen=True)
class TruncatedEisensteinRing:
    """The ring Z/p^N[x]/(x^E - p), a truncation of Z_p[p^(1/E)]."""

    p: int
    E: int
    N: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")
        if self.E < 1:
            raise DomainError(f"E must be positive, got {self.E}")
        if (self.p - 1) % self.E:
            raise UnsupportedCase(f"E = {self.E} does not divide p - 1 = {self.p - 1}")
        if self.N < 4:
            raise DomainError(f"precision N must be at least 4, got {self.N}")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def with_precision(self, N: int) -> "TruncatedEisensteinRing":
        return TruncatedEisensteinRing(self.p, self.E, N)

    def element(self, coeffs: Sequence[int]) -> "RingElement":
        if len(coeffs) > self.E:
            raise DomainError(f"expected at most {self.E} coefficients, got {len(coeffs)}")
        m = self.modulus
        padded = [c % m for c in coeffs] + [0] * (self.E - len(coeffs))
        return RingElement(self, tuple(padded))

    def scalar(self, c: int) -> "RingElement":
        return self.element([c])

    def zero(self) -> "RingElement":
        return self.scalar(0)

    def one(self) -> "RingElement":
        return self.scalar(1)

    def uniformizer(self) -> "RingElement":
        """The class of x, i.e. p^(1/E).  For E = 1 this is p itself."""
        if self.E == 1:
            return self.scalar(self.p)
        return self.element([0, 1])

    def pi_power(self, k: int) -> "RingElement":
        """pi^k for k >= 0, written directly as p^(k // E) x^(k % E)."""
        if k < 0:
            raise DomainError("negative powers of the uniformiser are not integral")
        q, r = divmod(k, self.E)
        coeffs = [0] * self.E
        coeffs[r] = pow(self.p, q, self.modulus)
        return RingElement(self, tuple(coeffs))

    def _mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        E, p, m = self.E, self.p, self.modulus
        out = [0] * E
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                k = i + j
                if k >= E:
                    out[k - E] += p * ai * bj
                else:
                    out[k] += ai * bj
        return tuple(c % m for c in out)


@dataclass(frozen=True)
class RingElement:
    ring: TruncatedEisensteinRing
    coeffs: tuple[int, ...]

    def _check(self, other: "RingElement") -> None:
        if other.ring != self.ring:
            raise DomainError("elements live in different rings")

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, int):
            return self.ring.scalar(other)
        self._check(other)
        return other

    def __add__(self, other) -> "RingElement":
        o = self._coerce(other)
        m = self.ring.modulus
        return RingElement(self.ring, tuple((a + b) % m for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        m = self.ring.modulus
        return RingElement(self.ring, tuple(-a % m for a in self.coeffs))

    def __sub__(self, other) -> "RingElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RingElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, int):
            m = self.ring.modulus
            return RingElement(self.ring, tuple(a * other % m for a in self.coeffs))
        self._check(other)
        return RingElement(self.ring, self.ring._mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RingElement":
        if n < 0:
            raise DomainError("negative exponents are not supported")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def reduce(self, N: int) -> "RingElement":
        """Image in the ring of lower precision N."""
        return self.ring.with_precision(N).element(self.coeffs)

    def lift(self, N: int) -> "RingElement":
        """Same integer representatives viewed at precision N (N may be larger)."""
        return self.ring.with_precision(N).element(self.coeffs)

    def valuation(self) -> Fraction:
        return valuation(self)


def valuation(x: RingElement) -> Fraction:
    """Exact valuation in units where ord(p) = 1.

    Raises :class:`PrecisionExhausted` when every coefficient vanishes modulo p^N,
    since then the element is only known to have valuation at least N.
    """
    ring = x.ring
    if x.is_zero():
        raise PrecisionExhausted(
            f"all coefficients vanish mod {ring.p}^{ring.N}; valuation is only >= {ring.N}",
            required=ring.N + 1,
        )
    return min(
        Fraction(_ord(c, ring.p, ring.N), 1) + Fraction(i, ring.E)
        for i, c in enumerate(x.coeffs)
        if c
    )


def certified_valuation(build: Callable[[TruncatedEisensteinRing], RingElement],
                        p: int, E: int, N: int = DEFAULT_PRECISION) -> Fraction:
    """Valuation of ``build(ring)``, raising the precision until it is determined."""
    while True:
        try:
            return valuation(build(TruncatedEisensteinRing(p, E, N)))
        except PrecisionExhausted:
            if N >= MAX_AUTO_PRECISION:
                raise
            N *= 2


def teichmuller_root(k: int, ring: TruncatedEisensteinRing) -> RingElement:
    """The E-th root of unity congruent to g^(k (p-1)/E) mod p.

    g is the smallest primitive root mod p.  The lift is the Frobenius limit
    t^(p^(N-1)), which is exact modulo p^N.
    """
    p, E = ring.p, ring.E
    if (p - 1) % E:
        raise UnsupportedCase(f"E = {E} does not divide p - 1")
    if not 0 <= k < E:
        raise DomainError(f"root index must lie in [0, {E}), got {k}")
    t = pow(primitive_root(p), k * (p - 1) // E, p)
    return ring.scalar(pow(t, p ** (ring.N - 1), ring.modulus))


def _tail_certified(T: int, v: Fraction, p: int, N: int) -> bool:
    """True when every term n > T of the log series has valuation >= N.

    Terms have valuation n v - ord_p(n) >= n v - log_p(n).  The right side is
    increasing once n v ln p >= 1, which n v >= 2 guarantees, so checking n = T+1
    suffices.  The comparison p^((T+1) v - N) >= T+1 is done in integers.
    """
    n = T + 1
    if n * v < 2:
        return False
    r = n * v - N
    if r < 0:
        return False
    return p**r.numerator >= n**r.denominator


def required_terms(v: Fraction, p: int, N: int) -> int:
    """Smallest term count whose tail is certified below p^N."""
    T = max(1, math.ceil(2 / v) - 1)
    while not _tail_certified(T, v, p, N):
        T += 1
    return T


def log_series(u: RingElement, terms: int | None = None) -> RingElement:
    """p-adic logarithm of a principal unit, truncated with a certified tail.

    Computes sum_{n<=T} (-1)^(n+1) a^n / n with a = u - 1.  The division by p-powers
    is carried out at a guard precision N + max ord_p(n), so the result is correct
    modulo p^N.  When ``terms`` is omitted the smallest certified T is used; a
    supplied T that is too small raises :class:`PrecisionError` with the required
    count in ``.required``.
    """
    ring = u.ring
    p, N = ring.p, ring.N
    a = u - 1
    if a.is_zero():
        if terms is not None and terms < 0:
            raise DomainError("term count must be non-negative")
        return ring.zero()
    v = valuation(a)
    if v <= Fraction(1, p - 1):
        raise DomainError(f"log series needs ord(u - 1) > 1/(p-1); got {v}")
    needed = required_terms(v, p, N)
    if terms is None:
        terms = needed
    elif not _tail_certified(terms, v, p, N):
        raise PrecisionError(
            f"{terms} terms leave a tail that is not below p^{N}; need {needed}",
            required=needed,
        )

    guard = max(_ord(n, p, 0) for n in range(1, terms + 1))
    W = N + guard
    big = a.lift(W)
    m_out = ring.modulus
    acc = [0] * ring.E
    power = big.ring.one()
    for n in range(1, terms + 1):
        power = power * big
        k = _ord(n, p, 0)
        unit = n // p**k
        inv = pow(unit, -1, p ** (W - k))
        sign = 1 if n % 2 else -1
        for i, c in enumerate(power.coeffs):
            if c % p**k:
                # cannot happen when ord(a) > 1/(p-1); kept as a tripwire
                raise PrecisionError(f"term {n} is not integral at guard precision {W}", required=W + 1)
            acc[i] += sign * (c // p**k) * inv
    return ring.element([c % m_out for c in acc])


def crude_min_term(v, p: int, n_max: int | None = None) -> Fraction:
    """Exact minimum over 1 <= n <= n_max of n v - ord_p(n).

    The window must reach the real minimiser 1/(v ln p) of x v - log_p(x);
    otherwise :class:`WindowError` is raised.  With ``n_max=None`` the window is
    extended until the minimum found is certified global.
    """
    v = as_fraction(v)
    if v <= 0:
        raise DomainError(f"v must be positive, got {v}")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    x_star = 1 / (mpmath.mpf(v.numerator) / v.denominator * ln_int(p).value)

    def f(n: int) -> Fraction:
        return n * v - _ord(n, p, 0)

    if n_max is not None:
        if n_max < 1 or n_max < x_star:
            raise WindowError(
                f"window n_max = {n_max} stops before the minimiser {mpmath.nstr(x_star, 8)}"
            )
        return min(f(n) for n in range(1, n_max + 1))

    n_max = max(1, int(mpmath.ceil(x_star)))
    best = min(f(n) for n in range(1, n_max + 1))
    while True:
        # every n >= n_max has f(n) >= n v - log_p n >= n_max v - log_p n_max
        r = n_max * v - best
        if r >= 0 and p**r.numerator >= n_max**r.denominator:
            return best
        best = min(best, min(f(n) for n in range(n_max + 1, 2 * n_max + 1)))
        n_max *= 2


def crude_analytic_bound(v, p: int) -> mpmath.mpf:
    """Real minimum 1/ln p + log_p(v ln p) of x v - log_p(x)."""
    v = as_fraction(v)
    lp = ln_int(p).value
    return 1 / lp + mpmath.log(mpmath.mpf(v.numerator) / v.denominator * lp) / lp
