"""Theta-data descriptors: places of F_0 with their lifts to K, pilot divisors,
normalized degrees and the consistency predicates tying them to global invariants.

A descriptor never derives arithmetic from a curve.  Every invariant is input data
and the checks below only test that the inputs hang together.

Descriptor JSON (schema 1)::

    {"schema": 1, "l": 5, "d0": 2, "deg_F": 4,
     "fibers": [{"p": 3, "places": [
         {"e0": 1, "f0": 1, "eK": 2, "fK": 1, "diffK": "1/2",
          "bad": {"ord_q": 3, "ord_delta": 3},
          "nos": {"cond": true, "disc_F": false}}, ...]}],
     "invariants": {"delta_min": ..., "cond": ..., "disc_F": ...,
                    "deg_K": 69120, "disc_K": ...}}

Each magnitude in ``invariants`` is an integer (JSON number or decimal string), a
factorization object ``{"3": 12, "5": 4}``, or is replaced by ``"ln_<name>"``
holding a decimal string for ln of the value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, Iterable, Sequence

import mpmath

from .arith import LogSum, LogValue, as_fraction, factorize, fraction_str, is_prime, ord_p
from .errors import DescriptorError, DomainError
from .local_field import LocalFieldData

SCHEMA_VERSION = 1
MAGNITUDE_KEYS = ("delta_min", "cond", "disc_F", "disc_K")
EXACT_BITS_LIMIT = 4096
BAD_PLACE_MESSAGE = "initial theta data needs a non-empty set of bad multiplicative places"


# ---------------------------------------------------------------------------
# magnitudes


@dataclass(frozen=True)
class Magnitude:
    """A positive integer known exactly, by factorization, or only through ln."""

    exact: int | None = None
    factors: tuple[tuple[int, int], ...] | None = None
    ln_text: str | None = None

    @classmethod
    def from_factors(cls, factors: dict[int, int]) -> "Magnitude":
        return cls(factors=tuple(sorted((p, k) for p, k in factors.items() if k)))

    def log_sum(self) -> LogSum | None:
        if self.factors is not None:
            return LogSum({p: Fraction(k) for p, k in self.factors})
        if self.exact is not None:
            return LogSum.log_of(self.exact)
        return None

    def ln(self) -> LogValue:
        ls = self.log_sum()
        if ls is not None:
            return ls.evaluate()
        return decimal_log(self.ln_text)

    def factorization(self) -> dict[int, int] | None:
        if self.factors is not None:
            return dict(self.factors)
        if self.exact is not None and self.exact < 10**14:
            return factorize(self.exact)
        return None

    def to_json(self) -> Any:
        if self.factors is not None:
            return {str(p): k for p, k in self.factors}
        if self.exact is not None:
            return str(self.exact)
        return self.ln_text


def decimal_log(text: str) -> LogValue:
    """A decimal string read as a rounded real: error is half a unit in the last place."""
    try:
        d = Decimal(text)
    except (InvalidOperation, TypeError):
        raise DescriptorError(f"not a decimal number: {text!r}", "schema") from None
    exp = d.as_tuple().exponent
    err = mpmath.mpf(10) ** exp / 2 if exp < 0 else mpmath.mpf(0)
    return LogValue(mpmath.mpf(text), err)


def _parse_magnitude(name: str, raw: Any) -> Magnitude:
    if isinstance(raw, bool):
        raise DescriptorError(f"{name}: expected an integer, got a boolean", "schema")
    if isinstance(raw, int) or (isinstance(raw, str) and raw.strip().isdigit()):
        n = int(raw)
        if n < 1:
            raise DescriptorError(f"{name} must be a positive integer, got {n}", "schema")
        return Magnitude(exact=n)
    if isinstance(raw, dict):
        factors = {}
        for key, k in raw.items():
            try:
                p = int(key)
            except ValueError:
                raise DescriptorError(f"{name}: factor key {key!r} is not an integer", "schema") from None
            if not is_prime(p):
                raise DescriptorError(f"{name}: factor {p} is not prime", "schema")
            if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                raise DescriptorError(f"{name}: exponent of {p} must be a non-negative integer", "schema")
            factors[p] = k
        return Magnitude.from_factors(factors)
    raise DescriptorError(f"{name}: unsupported value {raw!r}", "schema")


# ---------------------------------------------------------------------------
# places and descriptors


@dataclass(frozen=True)
class BadData:
    ord_q: int
    ord_delta: int | None = None


@dataclass(frozen=True)
class NosFlags:
    """Whether the place of F under w divides Cond(E/F), resp. Diff(F/Q)."""

    cond: bool
    disc_F: bool


@dataclass(frozen=True)
class PlaceRecord:
    p: int
    e0: int
    f0: int
    eK: int
    fK: int
    diffK: Fraction
    bad: BadData | None = None
    nos: NosFlags | None = None

    @property
    def local_field(self) -> LocalFieldData:
        return LocalFieldData(self.p, self.eK, self.fK, self.diffK)

    @property
    def weight(self) -> int:
        return self.e0 * self.f0

    @property
    def ramified(self) -> bool:
        return self.eK > 1


@dataclass(frozen=True)
class Fiber:
    p: int
    places: tuple[PlaceRecord, ...]


@dataclass(frozen=True)
class ThetaDataDescriptor:
    l: int
    d0: int
    deg_F: int
    fibers: tuple[Fiber, ...]
    delta_min: Magnitude
    cond: Magnitude
    disc_F: Magnitude
    deg_K: int | None = None
    disc_K: Magnitude | None = None

    def fiber(self, p: int) -> Fiber:
        for fb in self.fibers:
            if fb.p == p:
                return fb
        raise KeyError(p)

    @property
    def primes(self) -> list[int]:
        return [fb.p for fb in self.fibers]

    def bad_places(self) -> list[PlaceRecord]:
        return [v for fb in self.fibers for v in fb.places if v.bad is not None]

    @property
    def ln_delta_min(self) -> LogValue:
        return self.delta_min.ln()

    @property
    def ln_cond(self) -> LogValue:
        return self.cond.ln()

    @property
    def ln_disc_F(self) -> LogValue:
        return self.disc_F.ln()

    @property
    def ln_disc_K(self) -> LogValue | None:
        return None if self.disc_K is None else self.disc_K.ln()


def _require_int(obj: dict, key: str, where: str, minimum: int = 1) -> int:
    if key not in obj:
        raise DescriptorError(f"{where}: missing key {key!r}", "schema")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise DescriptorError(f"{where}: {key} must be an integer, got {val!r}", "schema")
    if val < minimum:
        raise DescriptorError(f"{where}: {key} must be >= {minimum}, got {val}", "schema")
    return val


def _parse_place(p: int, raw: Any, where: str) -> PlaceRecord:
    if not isinstance(raw, dict):
        raise DescriptorError(f"{where}: place must be an object", "schema")
    e0 = _require_int(raw, "e0", where)
    f0 = _require_int(raw, "f0", where)
    eK = _require_int(raw, "eK", where)
    fK = _require_int(raw, "fK", where)
    if "diffK" in raw:
        try:
            diffK = as_fraction(raw["diffK"])
        except (TypeError, ValueError, ZeroDivisionError):
            raise DescriptorError(f"{where}: diffK {raw['diffK']!r} is not a rational", "schema") from None
    else:
        diffK = None
    try:
        fld = LocalFieldData(p, eK, fK, diffK)
    except DomainError as exc:
        raise DescriptorError(f"{where}: {exc}", "different") from None
    bad = None
    if raw.get("bad") is not None:
        b = raw["bad"]
        if not isinstance(b, dict):
            raise DescriptorError(f"{where}: bad must be an object", "schema")
        ord_q = _require_int(b, "ord_q", where + ".bad")
        ord_delta = _require_int(b, "ord_delta", where + ".bad") if "ord_delta" in b else None
        bad = BadData(ord_q, ord_delta)
    nos = None
    if raw.get("nos") is not None:
        n = raw["nos"]
        if not isinstance(n, dict) or not all(isinstance(n.get(k), bool) for k in ("cond", "disc_F")):
            raise DescriptorError(f"{where}: nos needs boolean cond and disc_F", "schema")
        nos = NosFlags(n["cond"], n["disc_F"])
    return PlaceRecord(p, e0, f0, eK, fK, fld.diff_exp, bad, nos)


def parse_descriptor(text: str) -> ThetaDataDescriptor:
    """Parse and validate a JSON descriptor."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", "syntax") from None
    return descriptor_from_dict(raw)


def descriptor_from_dict(raw: Any) -> ThetaDataDescriptor:
    if not isinstance(raw, dict):
        raise DescriptorError("descriptor must be a JSON object", "schema")
    schema = raw.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise DescriptorError(f"unsupported schema version {schema!r}", "schema")
    l = _require_int(raw, "l", "descriptor", minimum=2)
    d0 = _require_int(raw, "d0", "descriptor")
    deg_F = _require_int(raw, "deg_F", "descriptor")
    fibers_raw = raw.get("fibers")
    if not isinstance(fibers_raw, list):
        raise DescriptorError("descriptor: fibers must be a list", "schema")
    fibers = []
    for i, fb in enumerate(fibers_raw):
        where = f"fibers[{i}]"
        if not isinstance(fb, dict):
            raise DescriptorError(f"{where}: fiber must be an object", "schema")
        p = _require_int(fb, "p", where, minimum=2)
        if not is_prime(p):
            raise DescriptorError(f"{where}: p = {p} is not prime", "schema")
        places = fb.get("places")
        if not isinstance(places, list) or not places:
            raise DescriptorError(f"{where}: places must be a non-empty list", "schema")
        fibers.append(Fiber(p, tuple(_parse_place(p, v, f"{where}.places[{k}]") for k, v in enumerate(places))))
    inv = raw.get("invariants")
    if not isinstance(inv, dict):
        raise DescriptorError("descriptor: invariants must be an object", "schema")
    mags = {}
    for name in MAGNITUDE_KEYS:
        if name in inv:
            mags[name] = _parse_magnitude(name, inv[name])
        elif "ln_" + name in inv:
            txt = inv["ln_" + name]
            if not isinstance(txt, str):
                raise DescriptorError(f"ln_{name} must be a decimal string", "schema")
            decimal_log(txt)
            mags[name] = Magnitude(ln_text=txt)
        elif name != "disc_K":
            raise DescriptorError(f"invariants: missing {name} (or ln_{name})", "schema")
    deg_K = None
    if "deg_K" in inv:
        deg_K = _require_int(inv, "deg_K", "invariants")
    desc = ThetaDataDescriptor(
        l=l, d0=d0, deg_F=deg_F,
        fibers=tuple(sorted(fibers, key=lambda f: f.p)),
        delta_min=mags["delta_min"], cond=mags["cond"], disc_F=mags["disc_F"],
        deg_K=deg_K, disc_K=mags.get("disc_K"),
    )
    validate(desc)
    return desc


def validate(desc: ThetaDataDescriptor) -> None:
    """Eager validation; raises DescriptorError naming the violated invariant."""
    l = desc.l
    if l == 3:
        raise DescriptorError("l = 3 is a pole of eps_l: l^2 + l - 12 vanishes", "l-pole")
    if l <= 3 or not is_prime(l):
        raise DescriptorError(f"l must be a prime greater than 3, got {l}", "l-prime")
    if desc.deg_F % desc.d0:
        raise DescriptorError(f"deg_F = {desc.deg_F} is not a multiple of d0 = {desc.d0}", "degree")
    primes = [fb.p for fb in desc.fibers]
    if len(set(primes)) != len(primes):
        raise DescriptorError("a prime appears in two fibers", "schema")
    for fb in desc.fibers:
        total = sum(v.weight for v in fb.places)
        if total != desc.d0:
            raise DescriptorError(
                f"fiber over p = {fb.p}: sum of e0*f0 is {total}, expected d0 = {desc.d0}", "fiber-degree")
        for v in fb.places:
            if v.bad and v.bad.ord_delta is not None and v.bad.ord_delta != v.bad.ord_q:
                raise DescriptorError(
                    f"fiber over p = {fb.p}: ord_v(Delta_min) = {v.bad.ord_delta} differs from ord_v(q) = {v.bad.ord_q}",
                    "ogg")
    if not desc.bad_places():
        raise DescriptorError(BAD_PLACE_MESSAGE, "bad-place")


def descriptor_warnings(desc: ThetaDataDescriptor) -> list[str]:
    """Soft inconsistencies that synthetic data may legitimately carry."""
    out = []
    for fb in desc.fibers:
        for i, v in enumerate(fb.places):
            tag = f"p={fb.p} place {i}"
            if v.eK < v.e0 or v.eK % v.e0:
                out.append(f"{tag}: eK = {v.eK} is not a multiple of e0 = {v.e0}")
            if v.bad is not None and not v.ramified:
                out.append(f"{tag}: bad reduction recorded at a place unramified in K")
            if v.bad is not None and fb.p == 2:
                out.append(f"{tag}: bad place of residue characteristic 2")
            if v.nos is not None and not nos_ramified_predicate(v, desc.l, v.nos.cond, v.nos.disc_F):
                out.append(f"{tag}: ramification disagrees with the conductor/different criterion")
    return out


def to_dict(desc: ThetaDataDescriptor) -> dict:
    def place(v: PlaceRecord) -> dict:
        d: dict[str, Any] = {"e0": v.e0, "f0": v.f0, "eK": v.eK, "fK": v.fK, "diffK": fraction_str(v.diffK)}
        if v.bad is not None:
            d["bad"] = {"ord_q": v.bad.ord_q}
            if v.bad.ord_delta is not None:
                d["bad"]["ord_delta"] = v.bad.ord_delta
        if v.nos is not None:
            d["nos"] = {"cond": v.nos.cond, "disc_F": v.nos.disc_F}
        return d

    inv: dict[str, Any] = {}
    for name in MAGNITUDE_KEYS:
        mag = getattr(desc, name)
        if mag is None:
            continue
        key = name if mag.ln_text is None else "ln_" + name
        inv[key] = mag.to_json()
    if desc.deg_K is not None:
        inv["deg_K"] = desc.deg_K
    return {
        "schema": SCHEMA_VERSION,
        "l": desc.l,
        "d0": desc.d0,
        "deg_F": desc.deg_F,
        "fibers": [{"p": fb.p, "places": [place(v) for v in fb.places]} for fb in desc.fibers],
        "invariants": inv,
    }


def serialize(desc: ThetaDataDescriptor) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_dict(desc), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# probabilities, divisors, degrees


def place_probability(v: PlaceRecord, d0: int) -> Fraction:
    """Pr(v) = [F_0,v : Q_p] / [F_0 : Q]."""
    return Fraction(v.weight, d0)


def fiber_probabilities(fb: Fiber, d0: int) -> list[Fraction]:
    return [place_probability(v, d0) for v in fb.places]


@dataclass(frozen=True)
class PilotEntry:
    p: int
    index: int
    f0: int
    coefficient: Fraction


@dataclass(frozen=True)
class PilotDivisor:
    entries: tuple[PilotEntry, ...] = ()


def normalized_degree(D: PilotDivisor, d0: int) -> LogSum:
    """(1/d0) sum_v c_v f0(v) ln p_v, kept exact."""
    total = LogSum()
    for ent in D.entries:
        total = total + LogSum({ent.p: ent.coefficient * ent.f0})
    return total / d0


def pullback(D: PilotDivisor, lifts: Sequence[Sequence[tuple[int, int]]]) -> PilotDivisor:
    """Pull a divisor back along an extension: [v] -> sum_w e(w/v) [w].

    ``lifts[i]`` lists (e(w/v), f(w/v)) over the places w above the i-th entry.
    """
    out = []
    for ent, ws in zip(D.entries, lifts, strict=True):
        for k, (e, f) in enumerate(ws):
            out.append(PilotEntry(ent.p, ent.index * 1000 + k, ent.f0 * f, ent.coefficient * e))
    return PilotDivisor(tuple(out))


def _bad_entries(desc: ThetaDataDescriptor, scale: Fraction) -> PilotDivisor:
    out = []
    for fb in desc.fibers:
        for i, v in enumerate(fb.places):
            if v.bad is not None:
                out.append(PilotEntry(fb.p, i, v.f0, v.bad.ord_q * scale))
    if not out:
        raise DescriptorError(BAD_PLACE_MESSAGE, "bad-place")
    return PilotDivisor(tuple(out))


def q_pilot(desc: ThetaDataDescriptor) -> PilotDivisor:
    """P_q = sum_bad ord_v(q^(1/2l)) [v]."""
    return _bad_entries(desc, Fraction(1, 2 * desc.l))


def theta_pilot(desc: ThetaDataDescriptor) -> list[PilotDivisor]:
    """P_Theta,j = sum_bad ord_v(q^(j^2/2l)) [v] for j = 1 .. (l-1)/2."""
    return [_bad_entries(desc, Fraction(j * j, 2 * desc.l)) for j in range(1, (desc.l - 1) // 2 + 1)]


def lgp_degree(desc: ThetaDataDescriptor) -> LogSum:
    """Average of the normalized degrees of the P_Theta,j over j."""
    pilots = theta_pilot(desc)
    total = LogSum()
    for D in pilots:
        total = total + normalized_degree(D, desc.d0)
    return total / len(pilots)


def j_square_average(l: int) -> Fraction:
    n = (l - 1) // 2
    return Fraction(sum(j * j for j in range(1, n + 1)), n)


def j_plus_one_average(l: int) -> Fraction:
    n = (l - 1) // 2
    return Fraction(sum(j + 1 for j in range(1, n + 1)), n)


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def pilot_degree_relation_check(desc: ThetaDataDescriptor) -> Verdict:
    """deg_lgp(P_Theta) = l(l+1)/12 deg(P_q), as an exact identity of log-sums."""
    ratio = Fraction(desc.l * (desc.l + 1), 12)
    lgp = lgp_degree(desc)
    dq = normalized_degree(q_pilot(desc), desc.d0)
    avg_ok = j_square_average(desc.l) == ratio
    return Verdict(
        "pilot-degree-relation",
        avg_ok and lgp == dq * ratio,
        {"ratio": fraction_str(ratio), "lgp_degree": repr(lgp), "q_degree": repr(dq), "j_square_average": avg_ok},
    )


def qpilot_discriminant_check(desc: ThetaDataDescriptor) -> Verdict:
    """deg(P_q) = (1/2l) ln|Delta_min| / [F:Q].

    Exact when Delta_min is given as an integer or factorization; otherwise the
    residual is compared with the error budget of the supplied logarithm.
    """
    dq = normalized_degree(q_pilot(desc), desc.d0)
    ls = desc.delta_min.log_sum()
    if ls is not None:
        residual = dq - ls / (2 * desc.l * desc.deg_F)
        val = residual.evaluate()
        return Verdict("qpilot-discriminant", residual.is_zero(),
                       {"exact": True, "residual": val.to_str(20)})
    residual = dq.evaluate() - desc.ln_delta_min / (2 * desc.l * desc.deg_F)
    ok = abs(residual.value) <= residual.error
    return Verdict("qpilot-discriminant", ok,
                   {"exact": False, "residual": residual.to_str(20), "error": mpmath.nstr(residual.error, 5)})


@dataclass(frozen=True)
class BaseChangePlace:
    """One bad place v of F with the places w of K above it, given as (e(w/v), f(w/v))."""

    p: int
    f: int
    ord_q: int
    lifts: tuple[tuple[int, int], ...]


def base_change_check(places: Iterable[BaseChangePlace], degree: int) -> Verdict:
    """[K:F] ln|Delta_min(E/F)| = ln|Delta_min(E_K/K)| for semistable E.

    ord_w(Delta) = e(w/v) ord_v(q) and f(w/p) = f(w/v) f(v/p).
    """
    lhs = LogSum()
    rhs = LogSum()
    for v in places:
        if sum(e * f for e, f in v.lifts) != degree:
            raise DomainError(f"lifts over a place at p = {v.p} do not have total degree {degree}")
        lhs = lhs + LogSum({v.p: Fraction(degree * v.ord_q * v.f)})
        for e, f in v.lifts:
            rhs = rhs + LogSum({v.p: Fraction(e * v.ord_q * f * v.f)})
    return Verdict("base-change", lhs == rhs, {"lhs": repr(lhs), "rhs": repr(rhs)})


def nos_ramified_predicate(w: PlaceRecord, l: int, divides_cond: bool, divides_diffF: bool) -> bool:
    """Consistency of e(w/p) > 1 with (w | l or w | Cond or w | Diff(F/Q)).

    Places above l must be at least (l-1)-fold ramified because zeta_l lies in K.
    """
    if w.p == l:
        return w.eK >= l - 1
    return w.ramified == (divides_cond or divides_diffF)


def disc_bridge_check(places: Iterable[tuple[int, int, int, Fraction]], degree: int, disc: Magnitude) -> Verdict:
    """prod_p p^(ord_p Diff(L/Q)) = |Disc(L/Q)|^(1/[L:Q]).

    ``places`` lists (p, e, f, diff) over all places of L, with diff = ord_p of the
    local different.  ord_p Diff(L/Q) is the degree-weighted average of diff.
    """
    places = list(places)
    by_p: dict[int, int] = {}
    for p, e, f, _ in places:
        by_p[p] = by_p.get(p, 0) + e * f
    if any(total != degree for total in by_p.values()):
        raise DomainError("local degrees over some prime do not sum to [L:Q]")
    lhs = LogSum()
    for p, e, f, d in places:
        lhs = lhs + LogSum({p: Fraction(e * f, degree) * d})
    rhs = disc.log_sum()
    if rhs is None:
        raise DomainError("the bridge check needs an exact discriminant")
    rhs = rhs / degree
    return Verdict("disc-bridge", lhs == rhs, {"lhs": repr(lhs), "rhs": repr(rhs)})


def disc_F_from_places(desc: ThetaDataDescriptor) -> Magnitude:
    """|Disc(F/Q)| implied by the e0 data when F/F_0 is unramified of degree deg_F/d0."""
    k = desc.deg_F // desc.d0
    factors: dict[int, int] = {}
    for fb in desc.fibers:
        exp_ = sum(k * v.f0 * (v.e0 - 1 + v.e0 * ord_p(v.e0, fb.p)) for v in fb.places)
        if exp_:
            factors[fb.p] = exp_
    return Magnitude.from_factors(factors)
