"""Seeded, parallel replication harness and covariance estimation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import InvalidParams
from ..model import ModelParams
from .functionals import analytic_mean, check_delta, cloud_functionals, normalize
from .window import TORUS, WindowSpec, make_rng, sample_poisson

EMPIRICAL_MEAN = "empirical_mean"
ANALYTIC = "analytic_leading_order"
CENTERINGS = (EMPIRICAL_MEAN, ANALYTIC)

PER_REPLICATION = "per_replication"
SHARED = "shared"

THREADS_ENV = "RGG_SPECTRA_THREADS"


@dataclass(frozen=True)
class Schedule:
    """Either explicit ``(t, delta)`` pairs or ``delta_t = kappa * t**(-alpha)``."""

    pairs: tuple[tuple[float, float], ...]
    kappa: float | None = None
    alpha: float | None = None

    @classmethod
    def parametric(cls, kappa: float, alpha: float, ts) -> Schedule:
        if kappa <= 0:
            raise InvalidParams("schedule kappa must be positive")
        pairs = tuple((float(t), float(kappa * t ** (-alpha))) for t in ts)
        return cls(pairs, float(kappa), float(alpha))

    @classmethod
    def explicit(cls, pairs) -> Schedule:
        return cls(tuple((float(t), float(dl)) for t, dl in pairs))

    def __post_init__(self):
        if not self.pairs:
            raise InvalidParams("schedule needs at least one (t, delta) point")
        for t, dl in self.pairs:
            if not (t > 0 and dl > 0 and math.isfinite(t) and math.isfinite(dl)):
                raise InvalidParams(f"schedule point ({t}, {dl}) must be positive")

    @property
    def ts(self) -> list[float]:
        return [t for t, _ in self.pairs]

    def to_dict(self) -> dict[str, Any]:
        if self.alpha is not None:
            return {"kappa": self.kappa, "alpha": self.alpha, "t": self.ts}
        return {"pairs": [list(p) for p in self.pairs]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Schedule:
        if "pairs" in data:
            return cls.explicit(data["pairs"])
        try:
            return cls.parametric(data.get("kappa", 1.0), data["alpha"], data["t"])
        except KeyError as exc:
            raise InvalidParams(f"schedule missing field {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    window: WindowSpec
    schedule: Schedule
    replications: int
    base_seed: int = 0
    centering: str = EMPIRICAL_MEAN
    seed_policy: str = PER_REPLICATION

    def __post_init__(self):
        if self.window.d != self.params.d:
            raise InvalidParams(f"window dimension {self.window.d} differs from params.d = {self.params.d}")
        if not math.isclose(self.window.volume, self.params.volume, rel_tol=1e-12):
            raise InvalidParams(
                f"window volume {self.window.volume} differs from params.volume = {self.params.volume}"
            )
        if int(self.replications) != self.replications or self.replications < 2:
            raise InvalidParams(f"replications must be an integer >= 2, got {self.replications}")
        if self.centering not in CENTERINGS:
            raise InvalidParams(f"centering must be one of {CENTERINGS}, got {self.centering!r}")
        if self.centering == ANALYTIC and self.window.boundary_mode != TORUS:
            raise InvalidParams("analytic_leading_order centering is exact only in torus mode")
        if self.seed_policy not in (PER_REPLICATION, SHARED):
            raise InvalidParams(f"unknown seed_policy {self.seed_policy!r}")
        if int(self.base_seed) != self.base_seed or self.base_seed < 0:
            raise InvalidParams("base_seed must be a non-negative integer")
        for _, dl in self.schedule.pairs:
            check_delta(self.window, dl)

    def with_seed(self, seed: int) -> ExperimentConfig:
        return ExperimentConfig(
            self.params, self.window, self.schedule, self.replications, seed, self.centering, self.seed_policy
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "window": self.window.to_dict(),
            "schedule": self.schedule.to_dict(),
            "replications": self.replications,
            "base_seed": self.base_seed,
            "centering": self.centering,
            "seed_policy": self.seed_policy,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        try:
            params = ModelParams.from_dict(data["params"])
            window = WindowSpec.from_dict(data.get("window", {"d": params.d, "side": params.volume ** (1 / params.d)}))
            return cls(
                params=params,
                window=window,
                schedule=Schedule.from_dict(data["schedule"]),
                replications=data["replications"],
                base_seed=data.get("base_seed", 0),
                centering=data.get("centering", EMPIRICAL_MEAN),
                seed_policy=data.get("seed_policy", PER_REPLICATION),
            )
        except KeyError as exc:
            raise InvalidParams(f"config missing field {exc}") from None


@dataclass
class CovarianceEstimate:
    """Sample covariance (divisor ``R - 1``) of the normalised functionals.

    ``se`` holds entrywise jackknife standard errors (NaN when ``R < 3``).
    ``normalized`` keeps the ``R x n`` sample matrix for diagnostics.
    """

    t: float
    delta: float
    mean: np.ndarray
    cov: np.ndarray
    se: np.ndarray
    R: int
    raw: np.ndarray = field(repr=False)
    normalized: np.ndarray = field(repr=False)


def sample_covariance(X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    Z = X - mean
    cov = Z.T @ Z / (X.shape[0] - 1)
    return mean, (cov + cov.T) / 2.0


def jackknife_cov_se(X) -> np.ndarray:
    """Leave-one-out jackknife standard errors of every covariance entry."""
    X = np.asarray(X, dtype=float)
    R, n = X.shape
    if R < 3:
        return np.full((n, n), np.nan)
    Z = X - X.mean(axis=0)
    S = Z.T @ Z
    # deleting row k shifts the mean by -z_k/(R-1); S_k = S - z_k z_k^T - z_k z_k^T/(R-1)
    outer = np.einsum("ki,kj->kij", Z, Z)
    loo = (S[None] - outer * (R / (R - 1))) / (R - 2)
    dev = loo - loo.mean(axis=0)
    return np.sqrt((R - 1) / R * np.sum(dev * dev, axis=0))


def thread_count(requested: int | None = None) -> int:
    if requested is not None:
        if requested < 1:
            raise InvalidParams("worker count must be >= 1")
        return int(requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidParams(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise InvalidParams(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def replication_seed(base_seed: int, point: int, rep: int, policy: str = PER_REPLICATION) -> np.random.SeedSequence:
    """Independent stream per (schedule point, replication); ``shared`` reuses replication 0."""
    return np.random.SeedSequence([int(base_seed), int(point), 0 if policy == SHARED else int(rep)])


def _one(config: ExperimentConfig, point: int, rep: int) -> np.ndarray:
    t, dl = config.schedule.pairs[point]
    rng = make_rng(replication_seed(config.base_seed, point, rep, config.seed_policy))
    cloud = sample_poisson(t, config.window, rng=rng)
    return cloud_functionals(cloud, dl, config.params.taus)


def simulate_raw(config: ExperimentConfig, point: int, workers: int | None = None) -> np.ndarray:
    """``R x n`` raw functionals; row ``k`` depends only on its own seed."""
    R = config.replications
    out = np.empty((R, config.params.n))
    workers = min(thread_count(workers), R)
    if workers == 1:
        for k in range(R):
            out[k] = _one(config, point, k)
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for k, row in zip(range(R), pool.map(lambda k: _one(config, point, k), range(R))):
            out[k] = row
    return out


def estimate(raw: np.ndarray, t: float, dl: float, config: ExperimentConfig) -> CovarianceEstimate:
    if config.centering == EMPIRICAL_MEAN:
        center = raw.mean(axis=0)
    else:
        center = analytic_mean(t, dl, config.params)
    Y = normalize(raw, t, dl, config.params, center)
    mean, cov = sample_covariance(Y)
    return CovarianceEstimate(
        t=t,
        delta=dl,
        mean=mean,
        cov=cov,
        se=jackknife_cov_se(Y),
        R=config.replications,
        raw=raw,
        normalized=Y,
    )


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[CovarianceEstimate]:
    """One :class:`CovarianceEstimate` per schedule point, in schedule order."""
    results = []
    for point, (t, dl) in enumerate(config.schedule.pairs):
        raw = simulate_raw(config, point, workers)
        results.append(estimate(raw, t, dl, config))
    return results
