"""Edge enumeration, length power functionals and their normalisation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import InvalidParams, TorusDeltaTooLarge, ZeroLengthEdge
from ..model import ModelParams, derive_scalars
from . import kernels
from .window import PointCloud, WindowSpec


@dataclass(frozen=True)
class EdgeList:
    """Unordered edges ``(i[k], j[k])`` with ``i < j`` and their lengths."""

    i: np.ndarray
    j: np.ndarray
    length: np.ndarray

    def __len__(self) -> int:
        return int(self.length.shape[0])

    def pairs(self) -> set[tuple[int, int]]:
        return set(zip(self.i.tolist(), self.j.tolist()))


@dataclass(frozen=True)
class FunctionalSample:
    """Raw and normalised functional vector of one replication."""

    raw: np.ndarray
    normalized: np.ndarray
    t: float
    delta: float
    seed: Any = None


def check_delta(window: WindowSpec, delta: float) -> None:
    if not (delta > 0 and np.isfinite(delta)):
        raise InvalidParams(f"delta must be positive, got {delta}")
    if window.torus and delta > window.side / 3.0:
        raise TorusDeltaTooLarge(
            f"torus mode needs delta <= side/3 = {window.side / 3.0}, got {delta}"
        )


def enumerate_edges(cloud: PointCloud, delta: float, mode: str | None = None) -> EdgeList:
    """All unordered pairs at distance ``<= delta``, each listed once."""
    window = cloud.window if mode is None else WindowSpec(cloud.window.d, cloud.window.side, mode)
    check_delta(window, delta)
    pts = np.ascontiguousarray(cloud.points, dtype=np.float64)
    if pts.shape[0] < 2:
        empty = np.empty(0, dtype=np.int64)
        return EdgeList(empty, empty.copy(), np.empty(0))
    i, j, r = kernels.edge_arrays(pts, window.side, float(delta), window.torus)
    return EdgeList(i, j, r)


def _check_taus(taus) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise InvalidParams("taus must be a non-empty vector")
    return taus


def length_power(edges: EdgeList | np.ndarray, taus) -> np.ndarray:
    """``sum_edges length**tau`` for each power; ``tau = 0`` gives the edge count."""
    taus = _check_taus(taus)
    r = edges.length if isinstance(edges, EdgeList) else np.asarray(edges, dtype=float)
    if np.any(r == 0.0) and np.any(taus < 0):
        raise ZeroLengthEdge("zero-length edge with a negative power")
    out = np.empty(taus.size)
    for k, tau in enumerate(taus):
        out[k] = float(r.size) if tau == 0 else float(np.sum(r**tau))
    return out


def cloud_functionals(cloud: PointCloud, delta: float, taus) -> np.ndarray:
    """Fused enumeration and power sums for the simulator hot loop."""
    taus = _check_taus(taus)
    check_delta(cloud.window, delta)
    pts = np.ascontiguousarray(cloud.points, dtype=np.float64)
    if pts.shape[0] < 2:
        return np.zeros(taus.size)
    sums, _, zeros = kernels.power_sums(pts, cloud.window.side, float(delta), cloud.window.torus, taus)
    if zeros and np.any(taus < 0):
        raise ZeroLengthEdge("zero-length edge with a negative power")
    return sums


def normalizer(t: float, delta: float, params: ModelParams) -> np.ndarray:
    """``max(t delta**(tau + d/2), t**1.5 delta**(tau + d))`` per power."""
    taus = np.asarray(params.taus, dtype=float)
    d = params.d
    return np.maximum(t * delta ** (taus + d / 2.0), t**1.5 * delta ** (taus + d))


def normalize(raw, t: float, delta: float, params: ModelParams, center) -> np.ndarray:
    return (np.asarray(raw, dtype=float) - np.asarray(center, dtype=float)) / normalizer(t, delta, params)


def analytic_mean(t: float, delta: float, params: ModelParams) -> np.ndarray:
    """``(t**2 / 2) V d kappa_d delta**(tau + d) / (tau + d)``.

    Exact expectation on the torus while ``delta <= side/2``.
    """
    s = derive_scalars(params)
    return 0.5 * t**2 * params.volume * params.d * s.kappa_d * delta**s.a / s.a
