"""Initial bound on log d and its continued-fraction reduction to a fixpoint.

Every bound produced here is an exact rational that provably majorizes the
true quantity: all logarithms enter through certified enclosures and every
formula is evaluated with outward rounding toward larger bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import PrimePair
from .diolog import (
    DEFAULT_POLICY,
    CertifiedReal,
    GapCertificate,
    PrecisionPolicy,
    certified_log,
    linear_form_gap,
    log_of_fraction,
)

__all__ = [
    "ReductionStep",
    "ReductionTrace",
    "ExponentBox",
    "initial_bound",
    "reduce_once",
    "reduce_full",
    "exponent_box",
]

# Relative improvement threshold below which iterating the reduction lemma
# stops.  0.1 is the knob value quoted for the stop rule; it is applied
# relative to the current bound so the chain terminates as soon as a step
# stops making a real dent (see the decisions notes for the trade-off).
DEFAULT_STOP = Fraction(1, 10)

_BISECTION_REL = 1000  # initial-bound bisection to relative width 1/1000


@dataclass(frozen=True)
class ReductionStep:
    """One application of the reduction lemma: B_in -> (delta, B1, B2)."""

    B_in: Fraction
    delta: Fraction
    B1: Fraction
    B2: Fraction

    @property
    def improvement(self) -> Fraction:
        return self.B_in - self.B2


@dataclass(frozen=True)
class ReductionTrace:
    """The full bound chain B0 -> steps -> final_bound for one prime pair."""

    pair: PrimePair
    B0: Fraction
    steps: tuple[ReductionStep, ...]
    final_bound: Fraction
    final_B1: Fraction
    precision_bits: int


@dataclass(frozen=True)
class ExponentBox:
    """Per-position exponent caps defining the finite search space."""

    a12_cap: int
    b12_cap: int
    a_cap: int
    b_cap: int
    a4_cap: int
    b4_cap: int


def _log_product(pair: PrimePair, bits: int, policy: PrecisionPolicy) -> CertifiedReal:
    return certified_log(pair.p, bits, policy) * certified_log(pair.q, bits, policy)


def _log_of_enclosure(x: CertifiedReal, bits: int,
                      policy: PrecisionPolicy) -> CertifiedReal:
    # ln of an interval of positive rationals, outward rounded.
    if x.lo <= 0:
        raise ValueError("enclosure must be positive")
    lo = log_of_fraction(x.lo, bits, policy).lo
    hi = log_of_fraction(x.hi, bits, policy).hi
    return CertifiedReal(lo, hi, bits)


def _f_upper(x: int, pair: PrimePair, bits: int, policy: PrecisionPolicy) -> Fraction:
    # Upper endpoint of the Baker-type majorant evaluated at log d = x.
    lpq = _log_product(pair, bits, policy)
    lx = log_of_fraction(Fraction(x), bits, policy)
    c = Fraction(136, 100) * 10 ** 23 * lpq * lpq * lpq
    t1 = lx + Fraction(163, 100)
    t2 = lx + Fraction(271, 100)
    t3 = lx + Fraction(208, 100) - _log_of_enclosure(lpq, bits, policy)
    f = c * t1 * t2 * (t3 * t3)
    return f.hi


def initial_bound(pair: PrimePair, policy: PrecisionPolicy = DEFAULT_POLICY) -> Fraction:
    """Certified upper bound for the crossing point of the Baker-type
    inequality, so that every solution satisfies log d < initial_bound.

    Exponential doubling brackets the crossing, integer bisection tightens it
    to relative width 1/1000, and the certified side is always the one that
    proves F(x) < x.
    """
    bits = max(policy.start_bits, 128)
    lo, hi = 4, 16
    while not _f_upper(hi, pair, bits, policy) < hi:
        lo = hi
        hi *= 2
        if hi > 1 << 4096:
            raise ArithmeticError("no crossing found; inputs out of range")
    while hi - lo > max(1, hi // _BISECTION_REL):
        mid = (lo + hi) // 2
        if _f_upper(mid, pair, bits, policy) < mid:
            hi = mid
        else:
            lo = mid
    return Fraction(hi)


def _b1_b2(pair: PrimePair, B: Fraction, cert: GapCertificate,
           policy: PrecisionPolicy) -> tuple[Fraction, Fraction]:
    bits = cert.precision_bits
    lp = certified_log(pair.p, bits, policy)
    lq = certified_log(pair.q, bits, policy)
    lpq = lp * lq
    b1_gap = log_of_fraction(2 / cert.delta, bits, policy).hi
    b1_size = _log_of_enclosure(8 * B / lpq, bits, policy).hi
    B1 = max(b1_gap, b1_size)
    tail = _log_of_enclosure(2 * B1 * B1 / lpq, bits, policy).hi
    B2 = 2 * B1 + pair.u_q * lq.hi + pair.u_p * lp.hi + tail
    return B1, B2


def reduce_once(pair: PrimePair, B, policy: PrecisionPolicy = DEFAULT_POLICY) -> ReductionStep:
    """One reduction-lemma application at the current bound B >= log d."""
    B = Fraction(B)
    if B < 1:
        raise ValueError("B must be at least 1")
    cert = linear_form_gap(pair, B, policy)
    B1, B2 = _b1_b2(pair, B, cert, policy)
    return ReductionStep(B_in=B, delta=cert.delta, B1=B1, B2=B2)


def reduce_full(pair: PrimePair, policy: PrecisionPolicy = DEFAULT_POLICY,
                stop: Fraction = DEFAULT_STOP) -> ReductionTrace:
    """Iterate reduce_once from the initial bound until the relative
    improvement drops below `stop` or a step fails to improve."""
    B0 = initial_bound(pair, policy)
    steps: list[ReductionStep] = []
    B = B0
    for _ in range(64):
        step = reduce_once(pair, B, policy)
        steps.append(step)
        if step.improvement <= 0 or step.improvement < stop * B:
            break
        B = step.B2
    final = min([B0] + [s.B2 for s in steps])
    final_cert = linear_form_gap(pair, final, policy)
    final_B1, _ = _b1_b2(pair, final, final_cert, policy)
    return ReductionTrace(pair=pair, B0=B0, steps=tuple(steps),
                          final_bound=final, final_B1=final_B1,
                          precision_bits=final_cert.precision_bits)


def exponent_box(trace: ReductionTrace, bits: int | None = None,
                 policy: PrecisionPolicy = DEFAULT_POLICY) -> ExponentBox:
    """Integer caps on the exponents, rounded so they are never too small.

    Upper bounds divide by the certified lower endpoints of log p, log q, so
    recomputing at higher precision can only shrink the caps.
    """
    b = bits if bits is not None else trace.precision_bits
    lp_lo = certified_log(trace.pair.p, b, policy).lo
    lq_lo = certified_log(trace.pair.q, b, policy).lo
    return ExponentBox(
        a12_cap=math.floor(trace.final_B1 / lp_lo),
        b12_cap=math.floor(trace.final_B1 / lq_lo),
        a_cap=math.floor(trace.final_bound / lp_lo),
        b_cap=math.floor(trace.final_bound / lq_lo),
        a4_cap=math.floor(2 * trace.final_B1 / lp_lo),
        b4_cap=math.floor(2 * trace.final_B1 / lq_lo),
    )
