"""Long-timescale policy: numerology choice from forecast load and the policy profile."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .coloring import Strategy

SUBCARRIERS_PER_PRB = 12
BASE_SCS_HZ = 15_000
GUARD_FRACTION = 0.1
MAX_MU = 4


def prb_bandwidth_hz(mu: int) -> float:
    return float(SUBCARRIERS_PER_PRB * BASE_SCS_HZ * 2 ** mu)


def prb_count(mu: int, bandwidth_hz: float) -> int:
    """PRBs that fit in ``bandwidth_hz`` after a 10% guard band."""
    if not 0 <= mu <= MAX_MU:
        raise ValueError(f"numerology must lie in 0..{MAX_MU}, got {mu}")
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    # integer arithmetic avoids 0.9 * 10e6 landing a hair under the boundary
    usable = round(bandwidth_hz * (1 - GUARD_FRACTION) * 1000)
    return int(usable // (round(prb_bandwidth_hz(mu)) * 1000))


@dataclass(frozen=True)
class NumerologyConfig:
    mu: int
    prb_bandwidth_hz: float
    prb_count: int
    slot_duration_s: float

    @classmethod
    def from_mu(cls, mu: int, bandwidth_hz: float = 10e6) -> NumerologyConfig:
        return cls(mu, prb_bandwidth_hz(mu), prb_count(mu, bandwidth_hz), 0.001 / 2 ** mu)


def select_numerology(predicted_peak_ues: int, bandwidth_hz: float = 10e6, headroom: float = 1.2) -> int:
    """Widest-subcarrier numerology whose PRB pool still covers the padded peak.

    Falls back to 0 when even the narrowest PRBs are too few.
    """
    if predicted_peak_ues < 0:
        raise ValueError("predicted peak must be non-negative")
    if headroom < 1:
        raise ValueError("headroom must be >= 1")
    # small epsilon keeps 1.2 * 10 from ceiling to 13
    need = math.ceil(headroom * predicted_peak_ues - 1e-9)
    for mu in range(MAX_MU, -1, -1):
        if prb_count(mu, bandwidth_hz) >= need:
            return mu
    return 0


@dataclass(frozen=True)
class FairnessScheme:
    alpha_ema: float = 0.1
    epsilon: float = 1e3

    def __post_init__(self):
        if not 0 < self.alpha_ema <= 1:
            raise ValueError("alpha_ema must lie in (0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class Sla:
    """Operator inputs to the policy profile."""

    priorities: dict[str, float] = field(default_factory=lambda: {"default": 1.0})
    tolerance: float = 0.0
    headroom: float = 1.2
    fairness: FairnessScheme = field(default_factory=FairnessScheme)


@dataclass(frozen=True)
class PolicyProfile:
    """Policy tuple handed from the rApp to the xApp.

    Fields in order: per-class priority weights, rate degradation tolerance,
    PRB allocation strategy, fairness scheme, and numerology.
    """

    priorities: dict[str, float]
    tolerance: float
    strategy: Strategy
    fairness: FairnessScheme
    numerology: int

    def __post_init__(self):
        if not 0 <= self.tolerance < 1:
            raise ValueError("tolerance must lie in [0, 1)")
        if not 0 <= self.numerology <= MAX_MU:
            raise ValueError("numerology out of range")
        if any(w < 1 for w in self.priorities.values()):
            raise ValueError("priority weights must be >= 1")
        object.__setattr__(self, "strategy", Strategy(self.strategy))

    def priority(self, ue_class: str = "default") -> float:
        return self.priorities.get(ue_class, 1.0)


def build_policy_profile(forecast_peak: int, slas: Sla, strategy: Strategy | str,
                         bandwidth_hz: float = 10e6) -> PolicyProfile:
    mu = select_numerology(forecast_peak, bandwidth_hz, slas.headroom)
    return PolicyProfile(dict(slas.priorities), slas.tolerance, Strategy(strategy), slas.fairness, mu)


def static_policy_profile(slas: Sla, strategy: Strategy | str, mu: int) -> PolicyProfile:
    """Profile used when no long-term guidance exists: numerology pinned by config."""
    return PolicyProfile(dict(slas.priorities), slas.tolerance, Strategy(strategy), slas.fairness, mu)
