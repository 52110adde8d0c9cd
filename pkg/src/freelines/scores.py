"""Combinatorial and algebraic shaping scores and the per-step reward.

The closed forms for the interpolating scores are reference stand-ins: the
three-regime combinatorial score, sigma_b2, sigma_int and sigma_pen are each
defined here (and cross-checked by scripts/score_reference.py), isolated in
ScoreConfig so alternatives stay pluggable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from .arrangement import (
    Arrangement,
    candidate_exponents,
    discriminant,
    intersection_summary,
)
from .saito import ALSConfig, saito_functional


@dataclass(frozen=True)
class ScoreConfig:
    """Normalizers and targets for the shaping scores.

    delta_max defaults to (n-1)^2 (the magnitude of the discriminant of a
    pencil), per-arrangement, when left at None. Target exponents switch the
    no-exponent tier of the algebraic score to b2 targeting and define
    b2_target = (n-1) + d1*d2.
    """

    delta_max: float | None = None
    target_exponents: tuple[int, int] | None = None
    als: ALSConfig = field(default_factory=ALSConfig)
    exact_bonus_cutoff: int = 13  # largest n whose terminal bonus uses exact verification

    def delta_max_for(self, n: int) -> float:
        if self.delta_max is not None:
            return self.delta_max
        return float(max((n - 1) ** 2, 1))

    def b2_target(self, n: int) -> int | None:
        if self.target_exponents is None:
            return None
        d1, d2 = self.target_exponents
        return (n - 1) + d1 * d2


def _clamp(v: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return max(lo, min(hi, v))


def _square_distance(delta: int) -> int:
    """Distance from delta to the nearest nonnegative perfect square."""
    if delta < 0:
        return -delta
    r = isqrt(delta)
    return min(delta - r * r, (r + 1) ** 2 - delta)


def _admissible_square_distance(delta: int, n: int) -> int:
    """Distance to the nearest square (d2-d1)^2 with positive integer roots.

    Roots of the reduced quadratic are ((n-1) -+ s)/2, so d1 >= 1 needs
    0 <= s <= n-3; clamping to that range keeps pencils (s = n-1) strictly
    in the negative tier.
    """
    s_max = max(n - 3, 0)
    if delta < 0:
        return -delta
    r = isqrt(delta)
    best = None
    for s in (min(r, s_max), min(r + 1, s_max)):
        dist = abs(delta - s * s)
        if best is None or dist < best:
            best = dist
    return best


def sigma_comb(arr: Arrangement, config: ScoreConfig = ScoreConfig()) -> float:
    """1 on a perfect-square discriminant, interpolating toward -1 otherwise.

    Three regimes: b2 < n-1 scores -1 outright, negative discriminants use
    |delta| as the distance, nonsquare nonnegative discriminants use the
    distance to the nearest square.
    """
    s = intersection_summary(arr)
    n = arr.n
    delta = discriminant(arr)
    if s.b2 < n - 1:
        return -1.0
    if delta >= 0 and isqrt(delta) ** 2 == delta:
        return 1.0
    dist = _square_distance(delta)
    return _clamp(1.0 - 2.0 * dist / config.delta_max_for(n))


def sigma_alg(arr: Arrangement, config: ScoreConfig = ScoreConfig()) -> float:
    """1 - loss when candidate exponents exist; a negative tier-1 value otherwise.

    Tier 1 measures how far the discriminant is from a nonnegative perfect
    square, or, when target exponents are set, the b2 distance to the target
    normalized by the target itself.
    """
    exps = candidate_exponents(arr)
    if exps is not None:
        return 1.0 - saito_functional(arr, exps.d1, exps.d2, config=config.als).loss
    n = arr.n
    target = config.b2_target(n)
    if target is not None and target > 0:
        b2 = intersection_summary(arr).b2
        if b2 != target:
            return -_clamp(abs(b2 - target) / target, 0.0, 1.0)
        # b2 on target but exponents still missing (pencil): fall through
    dist = _admissible_square_distance(discriminant(arr), n)
    return max(-1.0, -dist / config.delta_max_for(n))


@dataclass(frozen=True)
class RewardWeights:
    w_comb: float = 0.5
    w_alg: float = 1.0
    w_feas: float = 0.25
    w_b2: float = 0.25
    w_int: float = 0.1
    w_pen: float = 0.1
    w_mult: float = 0.1
    w_free: float = 5.0

    def __post_init__(self):
        largest = sorted(
            (self.w_comb, self.w_feas, self.w_b2, self.w_int, self.w_pen, self.w_mult)
        )[-1]
        if self.w_alg < largest or self.w_free < largest:
            raise ValueError("w_alg and w_free must dominate the shaping weights")


@dataclass(frozen=True)
class RewardBreakdown:
    comb: float
    alg: float
    feasible: float
    b2_term: float
    interior: float
    pencil_penalty: float
    mult_gain: float
    terminal_bonus: float
    total: float


def _sigma_b2(arr: Arrangement, config: ScoreConfig) -> float:
    target = config.b2_target(arr.n)
    if target is None or target <= 0:
        return 0.0
    b2 = intersection_summary(arr).b2
    return _clamp(1.0 - abs(b2 - target) / target)


def _sigma_int(arr: Arrangement) -> float:
    s = intersection_summary(arr)
    if not s.points:
        return 0.0
    rich = sum(1 for p in s.points if p.multiplicity >= 3)
    return rich / len(s.points)


def _sigma_pen(arr: Arrangement) -> float:
    s = intersection_summary(arr)
    return 1.0 if arr.n >= 4 and s.max_multiplicity >= arr.n - 1 else 0.0


def _count_rich(summary) -> int:
    return sum(1 for p in summary.points if p.multiplicity >= 3)


def reward(
    arr: Arrangement,
    prev_summary,
    weights: RewardWeights = RewardWeights(),
    config: ScoreConfig = ScoreConfig(),
    terminal: bool = False,
    is_free: bool | None = None,
) -> RewardBreakdown:
    """Per-step shaping reward for the arrangement reached at this step.

    prev_summary is the LatticeSummary of the previous partial arrangement
    (None at the first step). The terminal bonus uses exact freeness when
    is_free is supplied and n is at most the exact cutoff; beyond the cutoff
    it degrades to a graded bonus on the algebraic score.
    """
    n = arr.n
    summary = intersection_summary(arr)
    if n >= 3:
        comb = sigma_comb(arr, config)
        alg = sigma_alg(arr, config)
        feas = 1.0 if candidate_exponents(arr) is not None else 0.0
    else:
        comb, alg, feas = 0.0, 0.0, 0.0
    b2_term = _sigma_b2(arr, config) if n >= 2 else 0.0
    interior = _sigma_int(arr)
    pen = _sigma_pen(arr)
    prev_rich = _count_rich(prev_summary) if prev_summary is not None else 0
    mult_gain = float(_count_rich(summary) - prev_rich)
    bonus = 0.0
    if terminal:
        if n <= config.exact_bonus_cutoff and is_free is not None:
            bonus = weights.w_free if is_free else 0.0
        else:
            bonus = weights.w_free * max(0.0, alg) ** 2
    total = (
        weights.w_comb * comb
        + weights.w_alg * alg
        + weights.w_feas * feas
        + weights.w_b2 * b2_term
        + weights.w_int * interior
        - weights.w_pen * pen
        + weights.w_mult * mult_gain
        + bonus
    )
    return RewardBreakdown(
        comb=comb,
        alg=alg,
        feasible=feas,
        b2_term=b2_term,
        interior=interior,
        pencil_penalty=pen,
        mult_gain=mult_gain,
        terminal_bonus=bonus,
        total=total,
    )
