"""Two-tier radio deployment: geometry, mobility, pathloss, SINR and rates.

Everything here is deterministic given positions; the only randomness is the
random-walk heading, which is drawn from a caller-supplied generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from numba import njit


class RuKind(str, Enum):
    MACRO = "Macro"
    MICRO = "Micro"


DEFAULT_TX_POWER_DBM = {RuKind.MACRO: 20.0, RuKind.MICRO: 10.0}
DEFAULT_PATHLOSS_EXPONENT = {RuKind.MACRO: 3.5, RuKind.MICRO: 3.0}


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class RadioUnit:
    id: int
    kind: RuKind
    position: Position
    tx_power_dbm: float | None = None
    pathloss_exponent: float | None = None

    def __post_init__(self):
        # frozen dataclass: fill kind-dependent defaults through object.__setattr__
        if self.tx_power_dbm is None:
            object.__setattr__(self, "tx_power_dbm", DEFAULT_TX_POWER_DBM[self.kind])
        if self.pathloss_exponent is None:
            object.__setattr__(self, "pathloss_exponent", DEFAULT_PATHLOSS_EXPONENT[self.kind])
        if self.pathloss_exponent <= 2.0:
            raise ValueError(f"pathloss exponent must exceed 2.0, got {self.pathloss_exponent}")


@dataclass
class UserEquipment:
    id: int
    position: Position
    serving_ru: int | None = None
    demand_bps: float = 2e6
    priority: float = 1.0
    velocity_mps: float = 1.0
    # per-RU log-normal shadowing offsets in dB, indexed like RadioEnvironment.rus
    shadowing_db: tuple[float, ...] = ()

    def __post_init__(self):
        if self.demand_bps <= 0:
            raise ValueError("demand_bps must be positive")
        if self.priority < 1:
            raise ValueError("priority must be >= 1")


@dataclass(frozen=True)
class ChannelParams:
    carrier_ghz: float = 3.5
    bandwidth_hz: float = 10e6
    pl_intercept_db: float = 43.3
    noise_psd_dbm_hz: float = -174.0
    reference_distance_m: float = 1.0
    shadowing_sigma_db: float = 0.0


@dataclass
class RadioEnvironment:
    rus: list[RadioUnit]
    ues: list[UserEquipment] = field(default_factory=list)
    channel: ChannelParams = field(default_factory=ChannelParams)
    area_width: float = 500.0
    area_height: float = 500.0

    def ru(self, ru_id: int) -> RadioUnit:
        for ru in self.rus:
            if ru.id == ru_id:
                return ru
        raise KeyError(ru_id)

    def ru_index(self, ru_id: int) -> int:
        for i, ru in enumerate(self.rus):
            if ru.id == ru_id:
                return i
        raise KeyError(ru_id)

    def ue(self, ue_id: int) -> UserEquipment:
        for ue in self.ues:
            if ue.id == ue_id:
                return ue
        raise KeyError(ue_id)

    def arrays(self):
        """Return (ru_xy, ru_tx_dbm, ru_exponent) as float64 arrays in RU order."""
        ru_xy = np.array([[r.position.x, r.position.y] for r in self.rus], dtype=np.float64)
        ru_tx = np.array([r.tx_power_dbm for r in self.rus], dtype=np.float64)
        ru_exp = np.array([r.pathloss_exponent for r in self.rus], dtype=np.float64)
        return ru_xy, ru_tx, ru_exp

    def shadowing_matrix(self, ues: Sequence[UserEquipment] | None = None) -> np.ndarray:
        ues = self.ues if ues is None else ues
        out = np.zeros((len(ues), len(self.rus)))
        for i, ue in enumerate(ues):
            if ue.shadowing_db:
                out[i, :] = ue.shadowing_db
        return out

    def rx_power_matrix_w(self, ues: Sequence[UserEquipment] | None = None) -> np.ndarray:
        """Received power in watts, shape (len(ues), len(rus))."""
        ues = self.ues if ues is None else ues
        ue_xy = np.array([[u.position.x, u.position.y] for u in ues], dtype=np.float64).reshape(-1, 2)
        ru_xy, ru_tx, ru_exp = self.arrays()
        ch = self.channel
        return rx_power_w(ue_xy, ru_xy, ru_tx, ru_exp, ch.pl_intercept_db,
                          ch.reference_distance_m, self.shadowing_matrix(ues))


# -- array kernels shared with the fast engine ---------------------------------

@njit(cache=True)
def dbm_to_w(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


@njit(cache=True)
def w_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


@njit(cache=True)
def _pathloss(d, exponent, intercept_db, d0):
    return intercept_db + 10.0 * exponent * np.log10(max(d, d0) / d0)


@njit(cache=True)
def rx_power_w(ue_xy, ru_xy, ru_tx_dbm, ru_exp, intercept_db, d0, shadow_db):
    n = ue_xy.shape[0]
    r = ru_xy.shape[0]
    out = np.empty((n, r))
    for i in range(n):
        for j in range(r):
            d = math.hypot(ue_xy[i, 0] - ru_xy[j, 0], ue_xy[i, 1] - ru_xy[j, 1])
            pl = _pathloss(d, ru_exp[j], intercept_db, d0)
            out[i, j] = dbm_to_w(ru_tx_dbm[j] - pl - shadow_db[i, j])
    return out


@njit(cache=True)
def noise_power_w(noise_psd_dbm_hz, bandwidth_hz):
    return dbm_to_w(noise_psd_dbm_hz + 10.0 * np.log10(bandwidth_hz))


@njit(cache=True)
def shannon_rate(sinr, bandwidth_hz):
    return bandwidth_hz * np.log2(1.0 + sinr)


@njit(cache=True)
def strongest_ru(rx_w):
    """Index of the strongest RU per row; ties resolve to the lower index."""
    n, r = rx_w.shape
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = 0
        for j in range(1, r):
            if rx_w[i, j] > rx_w[i, best]:
                best = j
        out[i] = best
    return out


@njit(cache=True)
def reflect(v, hi):
    # fold back into [0, hi]; loops only for steps longer than the area
    while v < 0.0 or v > hi:
        if v < 0.0:
            v = -v
        if v > hi:
            v = 2.0 * hi - v
    return v


@njit(cache=True)
def walk(ue_xy, velocity, angles, dt, width, height):
    for i in range(ue_xy.shape[0]):
        step = velocity[i] * dt
        ue_xy[i, 0] = reflect(ue_xy[i, 0] + step * math.cos(angles[i]), width)
        ue_xy[i, 1] = reflect(ue_xy[i, 1] + step * math.sin(angles[i]), height)


# -- object-level operations ---------------------------------------------------

def pathloss_db(ru: RadioUnit, pos: Position, ch: ChannelParams) -> float:
    """Log-distance pathloss; distances under the reference distance are clamped."""
    d = ru.position.distance_to(pos)
    return float(_pathloss(d, ru.pathloss_exponent, ch.pl_intercept_db, ch.reference_distance_m))


def received_power_w(ru: RadioUnit, pos: Position, ch: ChannelParams, shadow_db: float = 0.0) -> float:
    return float(dbm_to_w(ru.tx_power_dbm - pathloss_db(ru, pos, ch) - shadow_db))


def _shadow(env: RadioEnvironment, ue: UserEquipment, ru: RadioUnit) -> float:
    if not ue.shadowing_db:
        return 0.0
    return ue.shadowing_db[env.ru_index(ru.id)]


def sinr_linear(ue: UserEquipment, interferer_rus: Iterable[RadioUnit], prb_bandwidth_hz: float,
                env: RadioEnvironment) -> float:
    if prb_bandwidth_hz <= 0:
        raise ValueError("prb_bandwidth_hz must be positive")
    interferers = list(interferer_rus)
    if any(ru.id == ue.serving_ru for ru in interferers):
        raise ValueError(f"serving RU {ue.serving_ru} listed as interferer for UE {ue.id}")
    ch = env.channel
    serving = env.ru(ue.serving_ru)
    s = received_power_w(serving, ue.position, ch, _shadow(env, ue, serving))
    i = sum(received_power_w(ru, ue.position, ch, _shadow(env, ue, ru)) for ru in interferers)
    n = float(noise_power_w(ch.noise_psd_dbm_hz, prb_bandwidth_hz))
    return s / (n + i)


def achievable_rate_bps(sinr_linear: float, prb_bandwidth_hz: float) -> float:
    if sinr_linear < 0:
        raise ValueError("SINR must be non-negative")
    return float(shannon_rate(sinr_linear, prb_bandwidth_hz))


def step_mobility(ues: Sequence[UserEquipment], dt_s: float, rng: np.random.Generator,
                  area_width: float = 500.0, area_height: float = 500.0) -> None:
    """Random-walk every UE in place; headings are drawn in UE-id order."""
    if dt_s <= 0:
        raise ValueError("dt_s must be positive")
    ordered = sorted(ues, key=lambda u: u.id)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=len(ordered))
    xy = np.array([[u.position.x, u.position.y] for u in ordered], dtype=np.float64).reshape(-1, 2)
    vel = np.array([u.velocity_mps for u in ordered], dtype=np.float64)
    walk(xy, vel, angles, dt_s, area_width, area_height)
    for u, (x, y) in zip(ordered, xy):
        u.position = Position(float(x), float(y))


def attach_ues(ues: Sequence[UserEquipment], rus: Sequence[RadioUnit], ch: ChannelParams) -> None:
    """Point each UE at the RU with the strongest received power (lower id wins ties)."""
    if not rus:
        raise ValueError("at least one RU is required")
    by_id = sorted(rus, key=lambda r: r.id)
    for ue in ues:
        best, best_p = None, -math.inf
        for ru in by_id:
            shadow = ue.shadowing_db[list(rus).index(ru)] if ue.shadowing_db else 0.0
            p = received_power_w(ru, ue.position, ch, shadow)
            if p > best_p:
                best, best_p = ru, p
        ue.serving_ru = best.id
