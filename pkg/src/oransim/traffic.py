"""15-minute traffic series: CSV ingest, load-to-UE mapping and baseline forecasters."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

SAMPLE_SPACING_S = 900
SEASON_LENGTH = 96


class TrafficError(ValueError):
    pass


class MalformedRow(TrafficError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class NonUniformSpacing(TrafficError):
    pass


class DuplicateSample(TrafficError):
    pass


class SeriesTooShort(TrafficError):
    pass


class NotFitted(RuntimeError):
    pass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TrafficSeries:
    timestamps: np.ndarray
    values: np.ndarray
    ru_id: int = 0

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        if ts.shape != vals.shape or ts.ndim != 1:
            raise TrafficError("timestamps and values must be 1-D and of equal length")
        if len(ts) < 2:
            raise TrafficError("a series needs at least two samples")
        if np.any(vals < 0):
            raise TrafficError("load values must be non-negative")
        gaps = np.diff(ts)
        if np.any(gaps != SAMPLE_SPACING_S):
            bad = int(gaps[gaps != SAMPLE_SPACING_S][0])
            raise NonUniformSpacing(f"RU {self.ru_id}: expected {SAMPLE_SPACING_S} s spacing, found {bad} s")

    def __len__(self):
        return len(self.values)

    def head(self, n: int) -> TrafficSeries:
        """Series truncated to its first n samples (n >= 2)."""
        return TrafficSeries(self.timestamps[:n], self.values[:n], self.ru_id)


def ingest_csv(path) -> list[TrafficSeries]:
    """Read a ``timestamp,ru_id,load`` CSV into one series per RU, sorted by RU id."""
    rows: dict[int, dict[int, float]] = {}
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["timestamp", "ru_id", "load"]:
            raise MalformedRow(1, "header must be 'timestamp,ru_id,load'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise MalformedRow(lineno, f"expected 3 fields, got {len(row)}")
            try:
                ts = int(row[0])
                ru = int(row[1])
                load = float(row[2])
            except ValueError as exc:
                raise MalformedRow(lineno, str(exc)) from None
            if not math.isfinite(load) or load < 0:
                raise MalformedRow(lineno, f"load must be finite and non-negative, got {row[2]!r}")
            per_ru = rows.setdefault(ru, {})
            if ts in per_ru:
                raise DuplicateSample(f"line {lineno}: duplicate sample for RU {ru} at {ts}")
            per_ru[ts] = load
    out = []
    for ru in sorted(rows):
        ts = sorted(rows[ru])
        out.append(TrafficSeries(np.array(ts), np.array([rows[ru][t] for t in ts]), ru))
    return out


def write_csv(series: list[TrafficSeries], path) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "ru_id", "load"])
        for s in series:
            for t, v in zip(s.timestamps, s.values):
                w.writerow([int(t), s.ru_id, repr(float(v))])


def synthetic_day_series(days: int = 1, mean: float = 50.0, amplitude: float = 40.0,
                         peak_hour: float = 17.0, noise_std: float = 3.0,
                         rng: np.random.Generator | None = None, ru_id: int = 0,
                         start_ts: int = 0) -> TrafficSeries:
    """Daily cosine load profile peaking at ``peak_hour`` plus seeded Gaussian noise."""
    n = days * SEASON_LENGTH
    hours = (np.arange(n) % SEASON_LENGTH) * 0.25
    values = mean + amplitude * np.cos(2 * np.pi * (hours - peak_hour) / 24.0)
    if noise_std > 0:
        rng = np.random.default_rng() if rng is None else rng
        values = values + rng.normal(0.0, noise_std, size=n)
    values = np.maximum(values, 0.0)
    ts = start_ts + SAMPLE_SPACING_S * np.arange(n)
    return TrafficSeries(ts, values, ru_id)


def split_series(aggregate: TrafficSeries, shares: dict[int, float]) -> list[TrafficSeries]:
    """Split one aggregate series into per-RU series by fixed shares."""
    return [TrafficSeries(aggregate.timestamps, aggregate.values * share, ru)
            for ru, share in sorted(shares.items())]


@dataclass(frozen=True)
class UeCountMapping:
    n_min: int = 4
    n_max: int = 30
    x_min: float = 0.0
    x_max: float = 100.0

    def __post_init__(self):
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ValueError("require 1 <= n_min <= n_max")
        if not self.x_max > self.x_min:
            raise ValueError("require x_max > x_min")


def _round_half_away(v: float) -> int:
    return int(math.floor(abs(v) + 0.5)) * (1 if v >= 0 else -1)


def map_load_to_ue_count(x: float, m: UeCountMapping) -> int:
    frac = (min(max(x, m.x_min), m.x_max) - m.x_min) / (m.x_max - m.x_min)
    return _round_half_away(m.n_min + frac * (m.n_max - m.n_min))


class ForecasterKind(str, Enum):
    PERSISTENCE = "Persistence"
    SEASONAL_NAIVE = "SeasonalNaive"
    EXP_SMOOTHING = "ExpSmoothing"
    LINEAR_AR = "LinearAR"


@dataclass
class Forecaster:
    """One-step load predictor; ``fit`` stores just enough state to roll forward.

    ``alpha`` is the exponential-smoothing weight, ``order`` the autoregressive
    lag count, ``season`` the seasonal period in samples.
    """

    kind: ForecasterKind = ForecasterKind.LINEAR_AR
    alpha: float = 0.3
    order: int = 4
    season: int = SEASON_LENGTH
    _state: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.kind = ForecasterKind(self.kind)
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.order < 1 or self.season < 1:
            raise ValueError("order and season must be >= 1")

    @property
    def fitted(self) -> bool:
        return self._state is not None

    def min_length(self) -> int:
        return {
            ForecasterKind.PERSISTENCE: 1,
            ForecasterKind.SEASONAL_NAIVE: self.season,
            ForecasterKind.EXP_SMOOTHING: 2,
            ForecasterKind.LINEAR_AR: self.order + 1,
        }[self.kind]

    def fit(self, values) -> Forecaster:
        y = np.asarray(getattr(values, "values", values), dtype=np.float64)
        need = self.min_length()
        if len(y) < need:
            raise SeriesTooShort(f"{self.kind.value} needs >= {need} samples, got {len(y)}")
        if self.kind is ForecasterKind.PERSISTENCE:
            state = {"last": float(y[-1])}
        elif self.kind is ForecasterKind.SEASONAL_NAIVE:
            state = {"season": y[-self.season:].copy()}
        elif self.kind is ForecasterKind.EXP_SMOOTHING:
            level = y[0]
            for v in y[1:]:
                level = self.alpha * v + (1 - self.alpha) * level
            state = {"level": float(level)}
        else:
            p = self.order
            # column k holds lag k+1; minimum-norm solution when under-determined
            lags = np.column_stack([y[p - k - 1:len(y) - k - 1] for k in range(p)])
            coef, *_ = np.linalg.lstsq(lags, y[p:], rcond=None)
            state = {"coef": coef, "history": y[-p:].copy()}
        self._state = state
        return self

    def rollout(self, horizon_steps: int) -> np.ndarray:
        """Recursive multi-step forecast (predictions fed back as inputs), clamped at 0."""
        if self._state is None:
            raise NotFitted("call fit() before predicting")
        if horizon_steps < 1:
            raise ValueError("horizon_steps must be >= 1")
        st = self._state
        if self.kind is ForecasterKind.PERSISTENCE:
            preds = np.full(horizon_steps, st["last"])
        elif self.kind is ForecasterKind.SEASONAL_NAIVE:
            season = st["season"]
            preds = season[np.arange(horizon_steps) % len(season)]
        elif self.kind is ForecasterKind.EXP_SMOOTHING:
            preds = np.full(horizon_steps, st["level"])
        else:
            coef = st["coef"]
            p = self.order
            hist = list(st["history"])
            preds = np.empty(horizon_steps)
            for h in range(horizon_steps):
                lagged = hist[::-1][:p]
                nxt = float(np.dot(coef, lagged))
                preds[h] = nxt
                hist.append(nxt)
        return np.maximum(preds, 0.0)


def fit(f: Forecaster, series: TrafficSeries) -> Forecaster:
    return f.fit(series)


def predict_peak(f: Forecaster, horizon_steps: int) -> float:
    return float(np.max(f.rollout(horizon_steps)))


def forecast_error(predictions, actuals) -> tuple[float, float]:
    p = np.asarray(predictions, dtype=np.float64)
    a = np.asarray(actuals, dtype=np.float64)
    if p.shape != a.shape or p.size < 1:
        raise LengthMismatch(f"predictions {p.shape} vs actuals {a.shape}")
    err = p - a
    return float(np.mean(np.abs(err))), float(np.sqrt(np.mean(err ** 2)))
