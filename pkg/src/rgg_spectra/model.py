"""Model parameters, regime descriptors and derived scalars.

Every other module consumes a :class:`ModelParams` together with the
scalars ``a_i = tau_i + d``, ``x_i = tau_i + d/2`` and the unit ball
volume ``kappa_d`` collected in :class:`DerivedScalars`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import InvalidParams

SUBCRITICAL = "subcritical"
CRITICAL_LOW = "critical_low"
CRITICAL_HIGH = "critical_high"
SUPERCRITICAL = "supercritical"

REGIME_KINDS = (SUBCRITICAL, CRITICAL_LOW, CRITICAL_HIGH, SUPERCRITICAL)
CRITICAL_KINDS = (CRITICAL_LOW, CRITICAL_HIGH)


@dataclass(frozen=True)
class RegimeSpec:
    """Limit of ``t * delta_t**d``: zero, a constant ``c`` or infinity.

    ``critical_low`` holds ``c`` in (0, 1], ``critical_high`` holds
    ``c`` in (1, inf).  The two critical kinds use different
    combinations of the subcritical and supercritical matrices.
    """

    kind: str
    c: float | None = None

    def __post_init__(self):
        if self.kind not in REGIME_KINDS:
            raise InvalidParams(f"unknown regime kind {self.kind!r}")
        if self.kind in CRITICAL_KINDS:
            if self.c is None:
                raise InvalidParams(f"regime {self.kind} requires c")
            c = float(self.c)
            if not math.isfinite(c) or c <= 0:
                raise InvalidParams(f"c must be a positive real, got {self.c}")
            if self.kind == CRITICAL_LOW and c > 1:
                raise InvalidParams(f"critical_low requires c in (0, 1], got {c}")
            if self.kind == CRITICAL_HIGH and c <= 1:
                raise InvalidParams(f"critical_high requires c in (1, inf), got {c}")
            object.__setattr__(self, "c", c)
        elif self.c is not None:
            raise InvalidParams(f"regime {self.kind} takes no c")

    @classmethod
    def subcritical(cls) -> RegimeSpec:
        return cls(SUBCRITICAL)

    @classmethod
    def supercritical(cls) -> RegimeSpec:
        return cls(SUPERCRITICAL)

    @classmethod
    def critical(cls, c: float) -> RegimeSpec:
        """Critical regime with the low/high branch picked from ``c``."""
        c = float(c)
        return cls(CRITICAL_LOW if c <= 1 else CRITICAL_HIGH, c)

    @property
    def is_critical(self) -> bool:
        return self.kind in CRITICAL_KINDS

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.c is not None:
            out["c"] = self.c
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RegimeSpec:
        kind = data["kind"]
        c = data.get("c")
        if kind == "critical":
            if c is None:
                raise InvalidParams("regime critical requires c")
            return cls.critical(c)
        return cls(kind, c)


@dataclass(frozen=True)
class ModelParams:
    """Dimension, strictly increasing powers, window volume and regime."""

    d: int
    taus: tuple[float, ...]
    volume: float = 1.0
    regime: RegimeSpec = field(default_factory=RegimeSpec.subcritical)

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise InvalidParams(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        taus = tuple(float(t) for t in self.taus)
        if len(taus) == 0:
            raise InvalidParams("taus must contain at least one power")
        if not all(math.isfinite(t) for t in taus):
            raise InvalidParams("taus must be finite")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise InvalidParams(f"taus must be strictly increasing, got {taus}")
        if taus[0] <= -self.d / 2:
            raise InvalidParams(f"taus[0] must exceed -d/2 = {-self.d / 2}, got {taus[0]}")
        object.__setattr__(self, "taus", taus)
        volume = float(self.volume)
        if not math.isfinite(volume) or volume <= 0:
            raise InvalidParams(f"volume must be positive, got {self.volume}")
        object.__setattr__(self, "volume", volume)
        if not isinstance(self.regime, RegimeSpec):
            raise InvalidParams("regime must be a RegimeSpec")

    @property
    def n(self) -> int:
        return len(self.taus)

    def with_regime(self, regime: RegimeSpec) -> ModelParams:
        return replace(self, regime=regime)

    @property
    def is_natural(self) -> bool:
        """True for d = 2 and powers exactly 0, 1, ..., n-1."""
        return self.d == 2 and all(t == i for i, t in enumerate(self.taus))

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "taus": list(self.taus),
            "volume": self.volume,
            "regime": self.regime.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelParams:
        regime = data.get("regime", {"kind": SUBCRITICAL})
        return cls(
            d=data["d"],
            taus=tuple(data["taus"]),
            volume=data.get("volume", 1.0),
            regime=RegimeSpec.from_dict(regime),
        )

    @classmethod
    def natural(cls, n: int, regime: RegimeSpec, volume: float = 1.0) -> ModelParams:
        return cls(d=2, taus=tuple(float(i) for i in range(n)), volume=volume, regime=regime)


@dataclass(frozen=True)
class DerivedScalars:
    a: np.ndarray
    x: np.ndarray
    kappa_d: float
    b: float


def unit_ball_volume(d: int) -> float:
    """Lebesgue volume ``pi**(d/2) / Gamma(d/2 + 1)`` of the unit ball in R^d."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidParams(f"d must be a positive integer, got {d}")
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def derive_scalars(params: ModelParams) -> DerivedScalars:
    taus = np.asarray(params.taus, dtype=float)
    a = taus + params.d
    x = taus + params.d / 2
    a2 = a * a
    b = 0.0
    for k in range(params.n):
        b += float(np.prod(np.delete(a2, k)))
    a.setflags(write=False)
    x.setflags(write=False)
    return DerivedScalars(a=a, x=x, kappa_d=unit_ball_volume(params.d), b=b)


@dataclass(frozen=True)
class ScheduleHint:
    """Value of ``t * delta**d`` and, when known, the limiting regime."""

    product: float
    regime: RegimeSpec | None = None


def limiting_regime(kappa: float, alpha: float, d: int) -> RegimeSpec:
    """Regime reached by the schedule ``delta_t = kappa * t**(-alpha)``."""
    if kappa <= 0:
        raise InvalidParams("kappa must be positive")
    # exact comparison against 1/d; callers pass alpha = k/d literally
    crit = 1.0 / d
    if math.isclose(alpha, crit, rel_tol=1e-12, abs_tol=0.0):
        return RegimeSpec.critical(kappa**d)
    return RegimeSpec.subcritical() if alpha > crit else RegimeSpec.supercritical()


def regime_of_schedule(
    t: float,
    delta: float,
    d: int,
    *,
    kappa: float | None = None,
    alpha: float | None = None,
) -> ScheduleHint:
    """Classify one schedule point.

    ``t * delta**d`` alone only hints at the regime; the limit is known
    once the parametric form ``delta_t = kappa * t**(-alpha)`` is given.
    """
    if t <= 0 or delta <= 0:
        raise InvalidParams("t and delta must be positive")
    product = t * delta**d
    regime = None
    if alpha is not None:
        regime = limiting_regime(1.0 if kappa is None else kappa, alpha, d)
    return ScheduleHint(product=product, regime=regime)
