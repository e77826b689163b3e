"""Tensor packets: different norms, the beta multiplier, CRT idempotents and hull radii.

The descent check works in the Kummer family K_i = Q_p(p^(1/e_i)) with every
e_i | p - 1.  Put E = lcm(e_i) and R = Z_p[pi], pi^E = p.  After base change of
K_1 (the factor with the largest different) to K_E = Frac(R), the algebra

    Tbar = R[x_2, ..., x_m] / (x_i^e_i - p)

splits completely: its components are indexed by root tuples (k_2, ..., k_m), the
root of x^e_i - p with index k being zeta_E^(k E/e_i) pi^(E/e_i).  The idempotent of
a tuple is prod_i f_i(x_i) / ((x_i - alpha_i) f_i'(alpha_i)); its only denominator
is D = prod_i f_i'(alpha_i).  We compute everything in Z/p^W coordinates and
check that beta = prod_i f_i'(x_i) clears that denominator.

Elements of Tbar are numpy object arrays of shape (e_2, ..., e_m, E) holding
residues mod p^W; the last axis is the pi-adic digit inside R.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arith import LogValue, ZERO, as_fraction, is_prime, ln_int, ln_pi
from .errors import DomainError, UnsupportedCase
from .local_field import LocalFieldData, is_small, ln_b
from .padic_oracle import TruncatedEisensteinRing, _ord, teichmuller_root

UNRAMIFIED = "unramified"
SMALL = "small"
GENERAL = "general"
ARCHIMEDEAN = "archimedean"
WORST_CASE = "worst-case"

DESCENT_PRECISION = 8


def _check_factors(factors: Sequence[LocalFieldData]) -> tuple[LocalFieldData, ...]:
    factors = tuple(factors)
    if not factors:
        raise DomainError("a tensor packet needs at least one factor")
    arch = {f.archimedean for f in factors}
    if len(arch) > 1:
        raise DomainError("cannot mix archimedean and non-archimedean factors")
    if len({f.p for f in factors}) > 1:
        raise DomainError("all factors must share the residue characteristic")
    return factors


def diff_norms(factors: Sequence[LocalFieldData]) -> tuple[Fraction, Fraction]:
    """(l1, l-infinity) norms of the vector of different exponents."""
    factors = _check_factors(factors)
    d = [f.diff_exp for f in factors]
    return sum(d, Fraction(0)), max(d)


def beta_order(factors: Sequence[LocalFieldData]) -> Fraction:
    """ord_p(beta) = ||diff||_1 - ||diff||_inf."""
    l1, linf = diff_norms(factors)
    return l1 - linf


@dataclass(frozen=True)
class PolyRadiusBound:
    ln_radius: LogValue
    case_tag: str
    floor_term: int | None = None


def worst_case_radius(factors: Sequence[LocalFieldData], a_ord) -> PolyRadiusBound:
    """ln R = -floor(a + ||diff||_inf - ||diff||_1) ln p + m ln c_p + sum ln e_i."""
    factors = _check_factors(factors)
    if factors[0].archimedean:
        raise DomainError("the worst-case radius is a finite-place formula")
    a = as_fraction(a_ord)
    if a < 0:
        raise DomainError(f"ord_p(a) must be non-negative, got {a}")
    p = factors[0].p
    l1, linf = diff_norms(factors)
    fl = math.floor(a + linf - l1)
    val = ln_int(p) * (-fl) + ln_b(p) * len(factors)
    for f in factors:
        val = val + ln_int(f.e)
    return PolyRadiusBound(val, WORST_CASE, fl)


def hull_radius(factors: Sequence[LocalFieldData], a_ord=0, arch: bool = False) -> PolyRadiusBound:
    """Four-case radius of the hull of one tensor packet component.

    unramified:   0 (the q-parameter contributes nothing there)
    small:        -floor(a - ord beta) ln p
    general:      -floor(a - ord beta) ln p + m ln b_p + sum ln e_i
    archimedean:  m ln(pi)
    """
    factors = _check_factors(factors)
    m = len(factors)
    if arch != factors[0].archimedean:
        raise DomainError("archimedean flag disagrees with the factor data")
    if arch:
        return PolyRadiusBound(ln_pi() * m, ARCHIMEDEAN)
    a = as_fraction(a_ord)
    if a < 0:
        raise DomainError(f"ord_p(a) must be non-negative, got {a}")
    if all(f.unramified for f in factors):
        return PolyRadiusBound(ZERO, UNRAMIFIED)
    p = factors[0].p
    fl = math.floor(a - beta_order(factors))
    base = ln_int(p) * (-fl)
    if all(is_small(f) for f in factors):
        return PolyRadiusBound(base, SMALL, fl)
    val = base + ln_b(p) * m
    for f in factors:
        val = val + ln_int(f.e)
    return PolyRadiusBound(val, GENERAL, fl)


# ---------------------------------------------------------------------------
# Brute-force algebra Tbar


class TensorAlgebra:
    """R[x_2..x_m]/(x_i^e_i - p) over R = Z/p^W[pi]/(pi^E - p)."""

    def __init__(self, p: int, E: int, dims: Sequence[int], W: int):
        self.p, self.E, self.W = p, E, W
        self.dims = tuple(dims)
        self.shape = self.dims + (E,)
        self.size = math.prod(self.shape)
        self.modulus = p**W
        self._tgt, self._pexp = _product_tables(self.shape)
        self._ppow = np.array([pow(p, k, self.modulus) for k in range(len(self.shape) + 1)], dtype=object)

    def zero(self) -> np.ndarray:
        return np.zeros(self.size, dtype=object)

    def one(self) -> np.ndarray:
        z = self.zero()
        z[0] = 1
        return z

    def index(self, exps: Sequence[int], j: int) -> int:
        return int(np.ravel_multi_index(tuple(exps) + (j,), self.shape))

    def monomial(self, exps: Sequence[int], coeff: np.ndarray) -> np.ndarray:
        """coeff (an element of R, length-E vector) times prod x_i^exps_i."""
        out = self.zero()
        for j, c in enumerate(coeff):
            if c:
                out = self.add(out, self.mul_basis(self.index(exps, 0), _scalar_at(self, j, c)))
        return out

    def mul_basis(self, t: int, a: np.ndarray) -> np.ndarray:
        """a times the basis monomial with flat index t (a permutation with p-power weights)."""
        out = self.zero()
        out[self._tgt[t]] = a * self._ppow[self._pexp[t]]
        return out % self.modulus

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = self.zero()
        for t in np.flatnonzero(b):
            out[self._tgt[t]] += a * (b[t] * self._ppow[self._pexp[t]])
        return out % self.modulus

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.modulus

    def scale(self, a: np.ndarray, c: int) -> np.ndarray:
        return a * c % self.modulus

    def coefficient_valuations(self, a: np.ndarray) -> list[Fraction | None]:
        """Valuation in R of each x-monomial coefficient (None when it vanishes mod p^W)."""
        rows = a.reshape(-1, self.E)
        out = []
        for row in rows:
            vals = [Fraction(_ord(int(c), self.p, self.W)) + Fraction(j, self.E) for j, c in enumerate(row) if c]
            out.append(min(vals) if vals else None)
        return out


def _scalar_at(alg: TensorAlgebra, j: int, c: int) -> np.ndarray:
    v = alg.zero()
    v[j] = c % alg.modulus
    return v


@lru_cache(maxsize=64)
def _product_tables(shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """For each basis monomial t: where every basis monomial s lands in s*t, and the p exponent picked up."""
    size = math.prod(shape)
    grid = np.array(list(itertools.product(*(range(n) for n in shape))), dtype=np.int64).reshape(size, len(shape))
    dims = np.array(shape, dtype=np.int64)
    tgt = np.empty((size, size), dtype=np.int64)
    pexp = np.empty((size, size), dtype=np.int64)
    for t in range(size):
        summed = grid + grid[t]
        wraps = summed >= dims
        tgt[t] = np.ravel_multi_index(tuple((summed % dims).T), shape)
        pexp[t] = wraps.sum(axis=1)
    return tgt, pexp


@dataclass
class Idempotent:
    """g = numerator * p^(-scale), indexed by its root tuple."""

    roots: tuple[int, ...]
    numerator: np.ndarray
    scale: int


@dataclass
class DescentVerdict:
    passed: bool
    e_list: tuple[int, ...]
    p: int
    precision: int
    component_count: int
    beta_order: Fraction
    denominator_valuation: Fraction
    idempotent_min_valuation: Fraction
    beta_times_g_min_valuation: Fraction
    checks: dict[str, bool] = field(default_factory=dict)


def _ordered(e_list: Sequence[int], p: int) -> tuple[int, ...]:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if not e_list:
        raise DomainError("need at least one factor")
    for e in e_list:
        if e < 1 or (p - 1) % e:
            raise UnsupportedCase(f"e = {e} does not divide p - 1 = {p - 1}")
    # the factor with the largest different goes first; it is the one base-changed
    return tuple(sorted(e_list, reverse=True))


class _Tower:
    def __init__(self, e_list: Sequence[int], p: int, N: int):
        self.e = _ordered(e_list, p)
        self.p = p
        self.E = math.lcm(*self.e)
        self.rest = self.e[1:]
        # s/E is the valuation of D; d is the common clearing scale
        self.s = sum(self.E * (e - 1) // e for e in self.rest)
        self.d = -(-self.s // self.E)
        self.N = N
        self.W = N + 2 * self.d + 1
        self.alg = TensorAlgebra(p, self.E, self.rest, self.W)
        ring = TruncatedEisensteinRing(p, self.E, self.W)
        self.ring = ring
        zeta = teichmuller_root(1 % self.E, ring).coeffs[0] if self.E > 1 else 1
        self.zeta_pows = [pow(zeta, k, ring.modulus) for k in range(self.E)]

    def r_elem(self, unit: int, pi_exp: int) -> np.ndarray:
        """unit * pi^pi_exp as a length-E vector of R."""
        q, r = divmod(pi_exp, self.E)
        v = np.zeros(self.E, dtype=object)
        v[r] = unit * pow(self.p, q, self.alg.modulus) % self.alg.modulus
        return v

    def root_power(self, e: int, k: int, n: int) -> tuple[int, int]:
        """alpha^n for alpha = zeta_E^(k E/e) pi^(E/e): returns (root of unity part, pi exponent)."""
        z = self.zeta_pows[(k * (self.E // e) * n) % self.E]
        return z, n * (self.E // e)

    def idempotent(self, roots: Sequence[int]) -> Idempotent:
        alg = self.alg
        num = alg.one()
        unit = 1
        for i, (e, k) in enumerate(zip(self.rest, roots)):
            # N_i(x) = sum_j alpha^(e-1-j) x^j
            factor = alg.zero()
            for j in range(e):
                z, pe = self.root_power(e, k, e - 1 - j)
                exps = [0] * len(self.rest)
                exps[i] = j
                factor = alg.add(factor, alg.monomial(exps, self.r_elem(z, pe)))
            num = alg.mul(num, factor)
            # f_i'(alpha) = e alpha^(e-1); collect its unit part
            z, _ = self.root_power(e, k, e - 1)
            unit = unit * e * z % alg.modulus
        # p^d / D = unit^-1 pi^(E d - s)
        u = self.r_elem(pow(unit, -1, alg.modulus), self.E * self.d - self.s)
        num = alg.mul(num, alg.monomial([0] * len(self.rest), u))
        return Idempotent(tuple(roots), num, self.d)

    def beta(self) -> np.ndarray:
        alg = self.alg
        b = alg.one()
        for i, e in enumerate(self.rest):
            exps = [0] * len(self.rest)
            exps[i] = e - 1
            b = alg.mul(b, alg.monomial(exps, self.r_elem(e, 0)))
        return b

    def denominator_valuation(self) -> Fraction:
        """Valuation of D = prod e_i alpha_i^(e_i - 1), computed in the truncated ring."""
        ring = self.ring
        D = ring.one()
        for e in self.rest:
            D = D * ring.scalar(e) * ring.pi_power(self.E * (e - 1) // e)
        return D.valuation()


def idempotent_set(e_list: Sequence[int], p: int, precision: int = DESCENT_PRECISION) -> list[Idempotent]:
    """The prod_{i>=2} e_i CRT idempotents of the base-changed tensor algebra."""
    tower = _Tower(e_list, p, precision)
    return [tower.idempotent(r) for r in itertools.product(*(range(e) for e in tower.rest))]


def _min_valuation(alg: TensorAlgebra, a: np.ndarray, shift: int) -> Fraction:
    vals = [v for v in alg.coefficient_valuations(a) if v is not None]
    return min(vals) - shift


def verify_descent(e_list: Sequence[int], p: int, precision: int = DESCENT_PRECISION) -> DescentVerdict:
    """Check beta * O_L inside the coefficient lattice for a Kummer tower.

    Checks, all modulo p^precision after clearing the common scale:
      idempotent   g^2 = g for every component
      orthogonal   g g' = 0 for distinct components
      partition    sum g = 1
      beta         beta g has integral coefficients
    and records the valuation witnesses.
    """
    tower = _Tower(e_list, p, precision)
    alg = tower.alg
    gs = [tower.idempotent(r) for r in itertools.product(*(range(e) for e in tower.rest))]
    d = tower.d
    N = precision
    pd = p**d
    target = p ** (N + 2 * d)

    def vanishes(a: np.ndarray, mod: int) -> bool:
        return all(int(c) % mod == 0 for c in a)

    idem = all(vanishes(alg.mul(g.numerator, g.numerator) - g.numerator * pd, target) for g in gs)
    orth = all(
        vanishes(alg.mul(g.numerator, h.numerator), target)
        for g, h in itertools.combinations(gs, 2)
    )
    total = alg.zero()
    for g in gs:
        total = alg.add(total, g.numerator)
    part = vanishes(total - alg.one() * pd, p ** (N + d))

    beta = tower.beta()
    beta_ok = True
    bg_min = None
    g_min = None
    for g in gs:
        prod = alg.mul(beta, g.numerator)
        beta_ok &= vanishes(prod, pd)
        v = _min_valuation(alg, prod, d)
        bg_min = v if bg_min is None else min(bg_min, v)
        w = _min_valuation(alg, g.numerator, d)
        g_min = w if g_min is None else min(g_min, w)

    factors = [LocalFieldData(p, e) for e in tower.e]
    b_ord = beta_order(factors)
    den = tower.denominator_valuation()
    checks = {
        "idempotent": idem,
        "orthogonal": orth,
        "partition": part,
        "beta_integral": beta_ok,
        "denominator_matches_beta_order": den == b_ord,
        "idempotent_denominator_sharp": g_min == -den,
    }
    return DescentVerdict(
        passed=all(checks.values()),
        e_list=tower.e,
        p=p,
        precision=N,
        component_count=len(gs),
        beta_order=b_ord,
        denominator_valuation=den,
        idempotent_min_valuation=g_min,
        beta_times_g_min_valuation=bg_min,
        checks=checks,
    )
