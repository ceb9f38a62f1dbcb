"""Observation windows and Poisson sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import InvalidParams

HARD_WINDOW = "hard_window"
TORUS = "torus"
BOUNDARY_MODES = (HARD_WINDOW, TORUS)


@dataclass(frozen=True)
class WindowSpec:
    """The cube ``[0, side]**d``, optionally with wrapped (torus) distances."""

    d: int
    side: float = 1.0
    boundary_mode: str = TORUS

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise InvalidParams(f"window dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        side = float(self.side)
        if not math.isfinite(side) or side <= 0:
            raise InvalidParams(f"window side must be positive, got {self.side}")
        object.__setattr__(self, "side", side)
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InvalidParams(f"boundary_mode must be one of {BOUNDARY_MODES}, got {self.boundary_mode!r}")

    @property
    def volume(self) -> float:
        return self.side**self.d

    @property
    def torus(self) -> bool:
        return self.boundary_mode == TORUS

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, "side": self.side, "boundary_mode": self.boundary_mode}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WindowSpec:
        return cls(d=data["d"], side=data.get("side", 1.0), boundary_mode=data.get("boundary_mode", TORUS))


@dataclass(frozen=True)
class PointCloud:
    """One Poisson realisation: ``points`` has shape ``(N, d)``."""

    points: np.ndarray
    t: float
    window: WindowSpec
    seed: Any = None

    @property
    def count(self) -> int:
        return int(self.points.shape[0])


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; ``seed`` may be an int, a sequence of ints or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def sample_poisson(t: float, window: WindowSpec, seed=None, rng: np.random.Generator | None = None) -> PointCloud:
    """Homogeneous Poisson process of intensity ``t`` on the window.

    The count is ``Poisson(t * side**d)`` and the points are i.i.d. uniform.
    Passing the same ``seed`` replays the same cloud.
    """
    if not (t > 0 and math.isfinite(t)):
        raise InvalidParams(f"intensity t must be positive, got {t}")
    if rng is None:
        rng = make_rng(seed)
    n = int(rng.poisson(t * window.volume))
    pts = rng.random((n, window.d)) * window.side
    pts.setflags(write=False)
    return PointCloud(points=pts, t=float(t), window=window, seed=seed)
