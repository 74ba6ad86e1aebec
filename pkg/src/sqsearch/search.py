"""Exhaustive enumeration inside the exponent box, plus the independent
brute-force oracle and the lemma predicates used as test checks.

The pipeline is: candidate (ab+1, ac+1) pairs -> triples via common divisors
of s1-1 and s2-1 -> quadruple extension through d = (p^a6 q^b6 - 1)/c.  The
oracle enumerates tuple values directly and shares none of that logic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator

from .arith import PrimePair, SUnit, as_s_unit
from .diolog import DEFAULT_POLICY, PrecisionPolicy
from .reduce import ExponentBox, ReductionTrace, exponent_box, reduce_full

__all__ = [
    "Triple",
    "QuadrupleWitness",
    "PairReport",
    "SearchLimits",
    "ResourceBudgetError",
    "enumerate_candidate_pairs",
    "triples_from_pair",
    "extend_to_quadruples",
    "search_pair",
    "brute_force_oracle",
    "lemma_predicates",
    "two_smallest_equal",
]


class ResourceBudgetError(Exception):
    """Search space or oracle range exceeds the configured budget."""


@dataclass(frozen=True)
class SearchLimits:
    max_box_volume: int = 10 ** 8      # (a12+1)(b12+1)(a+1)(b+1)
    max_oracle_height: int = 200_000


DEFAULT_LIMITS = SearchLimits()


@dataclass(frozen=True)
class Triple:
    """S-Diophantine triple a < b < c with its three S-unit witnesses."""

    a: int
    b: int
    c: int
    s1: SUnit  # ab + 1
    s2: SUnit  # ac + 1
    s4: SUnit  # bc + 1

    @property
    def extendable(self) -> bool:
        # Quadruple members obey ab >= 3 and c >= 5; smaller triples are kept
        # in the report but never extended.
        return self.a * self.b >= 3 and self.c >= 5

    def verify(self, pair: PrimePair) -> None:
        if not self.a < self.b < self.c:
            raise AssertionError(f"ordering violated: {self}")
        for x, y, s in ((self.a, self.b, self.s1), (self.a, self.c, self.s2),
                        (self.b, self.c, self.s4)):
            su = as_s_unit(x * y + 1, pair)
            if su != s:
                raise AssertionError(f"S-unit witness mismatch on {x}*{y}+1")
        if self.s4.value % self.s2.value == 0:
            raise AssertionError(
                f"divisibility lemma violated: {self.s2.value} | {self.s4.value}")


def two_smallest_equal(values: tuple[int, int, int, int]) -> bool:
    """True when the two smallest entries of the quadruple coincide."""
    s = sorted(values)
    return s[0] == s[1]


# Index triples into (s1..s6) for the three valuation identities: the two
# smallest exponents of each group must coincide.
_VALUATION_GROUPS = ((1, 2, 3, 4), (0, 1, 4, 5), (0, 2, 3, 5))


@dataclass(frozen=True)
class QuadrupleWitness:
    """Quadruple a < b < c < d with all six S-unit witnesses, ordered
    (ab+1, ac+1, ad+1, bc+1, bd+1, cd+1)."""

    a: int
    b: int
    c: int
    d: int
    s: tuple[SUnit, SUnit, SUnit, SUnit, SUnit, SUnit]

    def products(self) -> tuple[int, ...]:
        a, b, c, d = self.a, self.b, self.c, self.d
        return (a * b + 1, a * c + 1, a * d + 1, b * c + 1, b * d + 1, c * d + 1)

    def verify(self, pair: PrimePair) -> None:
        if not self.a < self.b < self.c < self.d:
            raise AssertionError(f"ordering violated: {self}")
        for prod, s in zip(self.products(), self.s):
            su = as_s_unit(prod, pair)
            if su != s:
                raise AssertionError(f"S-unit witness mismatch on {prod}")
        alphas = tuple(s.alpha for s in self.s)
        betas = tuple(s.beta for s in self.s)
        for grp in _VALUATION_GROUPS:
            if not two_smallest_equal(tuple(alphas[i] for i in grp)):
                raise AssertionError(f"alpha valuation structure violated on {grp}")
            if not two_smallest_equal(tuple(betas[i] for i in grp)):
                raise AssertionError(f"beta valuation structure violated on {grp}")


@dataclass(frozen=True)
class PairReport:
    """Everything search_pair establishes for one prime pair."""

    pair: PrimePair
    trace: ReductionTrace
    box: ExponentBox
    pair_count: int
    triple_candidates: int
    triples: tuple[Triple, ...]
    quad_candidates: int
    quadruples: tuple[QuadrupleWitness, ...]
    wall_ms: int

    @property
    def notable(self) -> bool:
        return bool(self.quadruples)


def _box_values(pair: PrimePair, a_cap: int, b_cap: int) -> list[SUnit]:
    out = []
    pa = 1
    for a in range(a_cap + 1):
        v = pa
        for b in range(b_cap + 1):
            out.append(SUnit(value=v, alpha=a, beta=b))
            v *= pair.q
        pa *= pair.p
    out.sort(key=lambda s: s.value)
    return out


def enumerate_candidate_pairs(box: ExponentBox, pair: PrimePair) -> Iterator[tuple[SUnit, SUnit]]:
    """All (s1, s2) = (ab+1, ac+1) candidates inside the a12/b12 caps.

    a < b < c alone forces ab >= 2 and ac >= 3, hence s1 >= 3, s2 >= 4 and
    s1 < s2; those are the only value filters applied here, so the triple
    stage stays faithful to every triple the box can represent.
    """
    values = _box_values(pair, box.a12_cap, box.b12_cap)
    for i, s1 in enumerate(values):
        if s1.value < 3:
            continue
        for s2 in values[i + 1:]:
            if s2.value >= 4:
                yield s1, s2


def _divisor_scan(s1: SUnit, s2: SUnit, box: ExponentBox,
                  pair: PrimePair) -> tuple[list[Triple], int]:
    # Common divisors a of s1-1 and s2-1 with a^2 < s1-1 are exactly the
    # admissible smallest elements; b and c divide out exactly.  s1-1 stays
    # desk-scale small (below e^B1 times rounding), so a direct scan to
    # sqrt(s1-1) is cheaper than factoring the gcd and needs no budget cap.
    v1, v2 = s1.value - 1, s2.value - 1
    triples: list[Triple] = []
    candidates = 0
    a = 1
    while a * a < v1:
        if v1 % a == 0 and v2 % a == 0:
            b, c = v1 // a, v2 // a
            candidates += 1
            s4 = as_s_unit(b * c + 1, pair)
            if s4 is not None and s4.alpha <= box.a_cap and s4.beta <= box.b_cap:
                triples.append(Triple(a=a, b=b, c=c, s1=s1, s2=s2, s4=s4))
        a += 1
    return triples, candidates


def triples_from_pair(s1: SUnit, s2: SUnit, box: ExponentBox,
                      pair: PrimePair) -> list[Triple]:
    """Triples (a, b, c) recovered from one candidate pair via the common
    divisors of s1-1 and s2-1, with bc+1 checked against the a/b caps."""
    if not s1.value < s2.value:
        raise ValueError("s1 must be smaller than s2")
    triples, _ = _divisor_scan(s1, s2, box, pair)
    return triples


def _extension_scan(t: Triple, box: ExponentBox,
                    pair: PrimePair) -> tuple[list[QuadrupleWitness], int]:
    if not t.extendable:
        return [], 0
    found: list[QuadrupleWitness] = []
    candidates = 0
    q_powers = [pair.q ** b for b in range(box.b_cap + 1)]
    pa = 1
    for a6 in range(box.a_cap + 1):
        for b6 in range(box.b_cap + 1):
            n = pa * q_powers[b6] - 1
            if n == 0 or n % t.c != 0:
                continue
            candidates += 1
            d = n // t.c
            if d <= t.c:
                continue
            s3 = as_s_unit(t.a * d + 1, pair)
            if s3 is None or s3.alpha > box.a_cap or s3.beta > box.b_cap:
                continue
            s5 = as_s_unit(t.b * d + 1, pair)
            if s5 is None or s5.alpha > box.a_cap or s5.beta > box.b_cap:
                continue
            s6 = SUnit(value=n + 1, alpha=a6, beta=b6)
            witness = QuadrupleWitness(a=t.a, b=t.b, c=t.c, d=d,
                                       s=(t.s1, t.s2, s3, t.s4, s5, s6))
            witness.verify(pair)
            found.append(witness)
        pa *= pair.p
    return found, candidates


def extend_to_quadruples(t: Triple, box: ExponentBox,
                         pair: PrimePair) -> list[QuadrupleWitness]:
    """Quadruples extending t through d = (p^a6 q^b6 - 1)/c inside the box."""
    found, _ = _extension_scan(t, box, pair)
    return found


def search_pair(pair: PrimePair, policy: PrecisionPolicy = DEFAULT_POLICY,
                limits: SearchLimits = DEFAULT_LIMITS,
                stop=None) -> PairReport:
    """Full pipeline for one prime pair: reduce, box, enumerate, extend,
    re-verify.  Reported quadruples have been re-checked from scratch."""
    t0 = time.perf_counter()
    if stop is None:
        trace = reduce_full(pair, policy)
    else:
        trace = reduce_full(pair, policy, stop)
    box = exponent_box(trace, policy=policy)
    volume = ((box.a12_cap + 1) * (box.b12_cap + 1)
              * (box.a_cap + 1) * (box.b_cap + 1))
    if volume > limits.max_box_volume:
        raise ResourceBudgetError(
            f"box volume {volume} exceeds budget {limits.max_box_volume}")

    pair_count = 0
    triple_candidates = 0
    triples: list[Triple] = []
    for s1, s2 in enumerate_candidate_pairs(box, pair):
        pair_count += 1
        found, cand = _divisor_scan(s1, s2, box, pair)
        triple_candidates += cand
        triples.extend(found)
    triples.sort(key=lambda t: (t.a, t.b, t.c))

    quad_candidates = 0
    quadruples: list[QuadrupleWitness] = []
    for t in triples:
        found, cand = _extension_scan(t, box, pair)
        quad_candidates += cand
        quadruples.extend(found)
    quadruples.sort(key=lambda w: (w.a, w.b, w.c, w.d))

    # Independent re-verification pass before anything is reported.
    for t in triples:
        t.verify(pair)
    for w in quadruples:
        w.verify(pair)

    wall_ms = int((time.perf_counter() - t0) * 1000)
    return PairReport(pair=pair, trace=trace, box=box, pair_count=pair_count,
                      triple_candidates=triple_candidates, triples=tuple(triples),
                      quad_candidates=quad_candidates, quadruples=tuple(quadruples),
                      wall_ms=wall_ms)


def brute_force_oracle(pair: PrimePair, N: int, m: int,
                       limits: SearchLimits = DEFAULT_LIMITS) -> list[tuple[int, ...]]:
    """Every S-Diophantine m-tuple with entries up to N, by direct value
    enumeration.  Shares no enumeration logic with search_pair."""
    if N < 2:
        raise ValueError("N must be at least 2")
    if m not in (2, 3, 4):
        raise ValueError("m must be 2, 3 or 4")
    if N > limits.max_oracle_height:
        raise ResourceBudgetError(f"oracle height {N} exceeds budget")
    neighbors: dict[int, list[int]] = {}
    for a in range(1, N + 1):
        nb = []
        for b in range(a + 1, N + 1):
            if as_s_unit(a * b + 1, pair) is not None:
                nb.append(b)
        neighbors[a] = nb
    out: list[tuple[int, ...]] = []

    def grow(prefix: tuple[int, ...], common: list[int]) -> None:
        if len(prefix) == m:
            out.append(prefix)
            return
        for x in common:
            grow(prefix + (x,),
                 [y for y in common if y > x and y in _sets[x]])

    _sets = {a: set(nb) for a, nb in neighbors.items()}
    for a in range(1, N + 1):
        grow((a,), neighbors[a])
    return sorted(out)


def _beta_of(pair: PrimePair, value: int) -> int | None:
    su = as_s_unit(value, pair)
    if su is None:
        return None
    # beta tracks the exponent of the odd prime when p = 2 in either slot.
    return su.beta if pair.p == 2 else su.alpha


def lemma_predicates(pair: PrimePair, tuples: list[tuple[int, ...]]) -> list[str]:
    """Check the structural lemmas on oracle output; returns violations.

    Divisibility (ac+1 never divides bc+1) applies to every triple; the
    parity and mod-4 statements apply only to S = {2, q} with q = 3 mod 4.
    """
    violations: list[str] = []
    odd_prime = pair.q if pair.p == 2 else pair.p
    two_q3 = 2 in (pair.p, pair.q) and odd_prime % 4 == 3
    for t in tuples:
        if len(t) == 3:
            a, b, c = t
            if (b * c + 1) % (a * c + 1) == 0:
                violations.append(f"div: {t}: {a*c+1} | {b*c+1}")
            if two_q3:
                betas = [_beta_of(pair, a * b + 1), _beta_of(pair, a * c + 1),
                         _beta_of(pair, b * c + 1)]
                if None in betas:
                    violations.append(f"exp_zero: {t}: not an S-Diophantine triple")
                elif 0 not in betas:
                    violations.append(f"exp_zero: {t}: all of b1,b2,b4 nonzero")
        elif len(t) == 4 and two_q3:
            if any(x % 2 == 0 for x in t):
                violations.append(f"odd: {t}: even member")
            if sorted(x % 4 for x in t) != [1, 1, 3, 3]:
                violations.append(f"mod4: {t}: residues not (1,1,3,3)")
    return violations
