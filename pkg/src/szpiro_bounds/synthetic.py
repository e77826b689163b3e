"""Seeded generator of internally consistent theta-data descriptors.

The model: F/F_0 has degree k_F and is unramified with one place above each place
v of F_0 (so f grows by k_F).  K/F_0 has degree M and, above v, every place has
e(w/p) = eK and f(w/p) = fK.  All global invariants are then determined:

    ord_p Delta_min(E/F) = sum_bad k_F f0 ord_v(q)
    ord_p Cond(E/F)      = sum_bad k_F f0
    ord_p Disc(F/Q)      = sum_v k_F f0 (e0 - 1 + e0 ord_p(e0))
    ord_p Disc(K/Q)      = sum_v M e0 f0 diffK

Ramification is chosen to agree with the conductor/different criterion: eK > 1
exactly when v is bad, e0 > 1, or p = l (then (l-1) | eK).
"""

from __future__ import annotations

import math
import random

from .arith import gl2_order, prime_sieve
from .global_model import (BadData, Fiber, Magnitude, NosFlags, PlaceRecord, ThetaDataDescriptor,
                           disc_F_from_places, validate)
from .local_field import diff_exponent_eisenstein

PRIME_POOL = [p for p in prime_sieve(47) if p > 2]
MIN_DEG_K = 6840


def _split_degree(rng: random.Random, d0: int) -> list[tuple[int, int]]:
    """Random list of (e0, f0) with sum e0 f0 = d0."""
    out = []
    left = d0
    while left:
        e0 = rng.randint(1, left)
        f0 = rng.randint(1, left // e0)
        out.append((e0, f0))
        left -= e0 * f0
    return out


def generate(seed: int, d0: int, l: int, fibers: int, max_places: int | None = None) -> ThetaDataDescriptor:
    """A validated descriptor drawn from ``random.Random(seed)``."""
    rng = random.Random(seed)
    k_F = rng.choice([1, 2])
    pool = list(PRIME_POOL)
    if l not in pool:
        pool.append(l)
    primes = sorted(rng.sample(pool, fibers))

    raw = {}
    for p in primes:
        split = _split_degree(rng, d0)
        if max_places is not None:
            while len(split) > max_places:
                split = _split_degree(rng, d0)
        raw[p] = [[e0, f0, rng.random() < 0.4] for e0, f0 in split]
    if not any(bad for places in raw.values() for *_, bad in places):
        p = rng.choice(primes)
        raw[p][rng.randrange(len(raw[p]))][2] = True

    fiber_list = []
    for p in primes:
        places = []
        for e0, f0, bad in raw[p]:
            if p == l:
                eK = math.lcm(e0, l - 1)
            elif bad:
                eK = e0 * rng.choice([2, 3])
            elif e0 > 1:
                eK = e0 * rng.choice([1, 2])
            else:
                eK = 1
            fK = f0 * rng.choice([1, 2])
            ord_q = rng.randint(1, 6) if bad else None
            places.append(PlaceRecord(
                p=p, e0=e0, f0=f0, eK=eK, fK=fK,
                diffK=diff_exponent_eisenstein(eK, p),
                bad=BadData(ord_q, ord_q) if bad else None,
                nos=NosFlags(cond=bad, disc_F=e0 > 1),
            ))
        fiber_list.append(Fiber(p, tuple(places)))

    M = math.lcm(k_F, gl2_order(l), *(v.eK * v.fK for fb in fiber_list for v in fb.places))
    while d0 * M < MIN_DEG_K:
        M *= 2

    delta, cond, disc_K = {}, {}, {}
    for fb in fiber_list:
        dk = sum(M * v.e0 * v.f0 * v.diffK for v in fb.places)
        assert dk.denominator == 1
        if dk:
            disc_K[fb.p] = int(dk)
        bad = [v for v in fb.places if v.bad is not None]
        if bad:
            delta[fb.p] = sum(k_F * v.f0 * v.bad.ord_q for v in bad)
            cond[fb.p] = sum(k_F * v.f0 for v in bad)

    desc = ThetaDataDescriptor(
        l=l, d0=d0, deg_F=d0 * k_F, fibers=tuple(fiber_list),
        delta_min=Magnitude.from_factors(delta),
        cond=Magnitude.from_factors(cond),
        disc_F=Magnitude(),
        deg_K=d0 * M,
        disc_K=Magnitude.from_factors(disc_K),
    )
    desc = ThetaDataDescriptor(**{**desc.__dict__, "disc_F": disc_F_from_places(desc)})
    validate(desc)
    return desc
