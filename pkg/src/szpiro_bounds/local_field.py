"""Per-field invariants: different exponents, log-image radii and log-shell radii.

Radii are returned as natural logarithms (``ln R``) so that products of radii
over tensor factors become sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import LogValue, as_fraction, is_prime, ln, ln_int, ord_p
from .errors import DomainError


def diff_exponent_eisenstein(e: int, p: int) -> Fraction:
    """ord_p of the different generated by f'(pi) = e pi^(e-1): ord_p(e) + (e-1)/e."""
    if e < 1:
        raise DomainError(f"ramification index must be positive, got {e}")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return ord_p(e, p) + Fraction(e - 1, e)


@dataclass(frozen=True)
class LocalFieldData:
    """Ramification record of a finite extension K of Q_p.

    ``diff_exp`` defaults to the Eisenstein formula; wild descriptors may supply
    their own value, which must still be at least (e-1)/e.  An archimedean place is
    represented with ``archimedean=True`` and ``p = 0``.
    """

    p: int
    e: int = 1
    f: int = 1
    diff_exp: Fraction | None = None
    archimedean: bool = False
    wild: bool = field(init=False)

    def __post_init__(self):
        if self.archimedean:
            if self.p != 0:
                raise DomainError("archimedean places carry p = 0")
            object.__setattr__(self, "diff_exp", Fraction(0))
            object.__setattr__(self, "wild", False)
            return
        if not is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")
        if self.e < 1 or self.f < 1:
            raise DomainError(f"e and f must be positive, got e={self.e}, f={self.f}")
        wild = self.e % self.p == 0
        object.__setattr__(self, "wild", wild)
        tame_value = Fraction(self.e - 1, self.e)
        if self.diff_exp is None:
            object.__setattr__(self, "diff_exp", diff_exponent_eisenstein(self.e, self.p))
            return
        d = as_fraction(self.diff_exp)
        object.__setattr__(self, "diff_exp", d)
        if d < tame_value:
            raise DomainError(f"different exponent {d} is below (e-1)/e = {tame_value}")
        if not wild and d != tame_value:
            raise DomainError(f"tame field (p={self.p}, e={self.e}) must have different exponent {tame_value}, got {d}")

    @classmethod
    def archimedean_place(cls) -> "LocalFieldData":
        return cls(p=0, archimedean=True)

    @property
    def degree(self) -> int:
        return self.e * self.f

    @property
    def unramified(self) -> bool:
        return not self.archimedean and self.e == 1


def is_small(fld: LocalFieldData) -> bool:
    """e < p - 1.  Never true at p = 2."""
    if fld.archimedean:
        return False
    return fld.e < fld.p - 1


def ln_b(p: int) -> LogValue:
    """ln b_p = ln c_p = ln(1/(exp(1) ln p)) = -1 - ln ln p."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return -1 - ln(ln_int(p))


def log_image_radius(fld: LocalFieldData) -> LogValue:
    """ln of the radius of a disc containing log(O_K^x).

    Small fields: log(O_K^x) = pi O_K, so ln R = -(1/e) ln p.
    Otherwise:    the disc of radius e b_p, so ln R = ln e + ln b_p.
    """
    if fld.archimedean:
        raise DomainError("log image radius is only defined at finite places")
    if is_small(fld):
        return ln_int(fld.p) * Fraction(-1, fld.e)
    return ln_int(fld.e) + ln_b(fld.p)


def log_shell_radius(fld: LocalFieldData) -> LogValue:
    """ln of the radius of the log-shell (1/2p) log(O_K^x): ln|2p|^-1 + log image radius."""
    if fld.archimedean:
        raise DomainError("log shell radius is only defined at finite places")
    k = ord_p(2 * fld.p, fld.p)
    return ln_int(fld.p) * k + log_image_radius(fld)
