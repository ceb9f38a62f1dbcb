"""Comparisons of simulated covariances with the limit matrices, plus the
difference and noise-decomposition diagnostics for the normalised functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..closed_forms.covariance import build_sigma
from ..errors import TauVectorShape, WrongRegime
from ..model import SUPERCRITICAL, ModelParams, derive_scalars
from .experiment import CovarianceEstimate, ExperimentConfig, run_experiment
from .functionals import normalizer


def torus_covariance(params: ModelParams, t: float, delta: float) -> np.ndarray:
    """Exact covariance of the normalised functionals on the torus at finite ``t``.

    Second-order Mecke formula: ``Cov(L_i, L_j) = (t^2/2) V d kappa delta^(tau_i+tau_j+d)/(tau_i+tau_j+d)
    + t^3 V (d kappa)^2 delta^(a_i+a_j) / (a_i a_j)``.  Valid while ``delta <= side/2``.
    """
    s = derive_scalars(params)
    taus = np.asarray(params.taus)
    V = params.volume
    dk = params.d * s.kappa_d
    e = taus[:, None] + taus[None, :] + params.d
    pair = 0.5 * t**2 * V * dk * delta**e / e
    triple = t**3 * V * dk**2 * delta ** (s.a[:, None] + s.a[None, :]) / np.outer(s.a, s.a)
    nrm = normalizer(t, delta, params)
    return (pair + triple) / np.outer(nrm, nrm)


@dataclass
class BandComparison:
    """Entrywise comparison of an estimate with a reference matrix.

    An entry is inside the band when ``|emp - ref| <= max(rel * |ref|, k_se * se)``.
    """

    reference: np.ndarray
    abs_error: np.ndarray
    rel_error: np.ndarray
    allowance: np.ndarray
    inside: np.ndarray

    @property
    def all_inside(self) -> bool:
        return bool(np.all(self.inside))


def compare_band(est: CovarianceEstimate, reference, rel: float = 0.15, k_se: float = 3.0) -> BandComparison:
    ref = np.asarray(reference, dtype=float)
    err = np.abs(est.cov - ref)
    with np.errstate(divide="ignore", invalid="ignore"):
        relerr = np.where(ref != 0, err / np.abs(ref), np.inf)
    se = np.nan_to_num(est.se, nan=0.0)
    allow = np.maximum(rel * np.abs(ref), k_se * se)
    return BandComparison(ref, err, relerr, allow, err <= allow)


def limit_matrix(params: ModelParams) -> np.ndarray:
    return np.array(build_sigma(params).sigma)


@dataclass
class DifferenceSeries:
    """``Var(a_1 L~^(tau_1) - a_2 L~^(tau_2))`` along the schedule."""

    tau_pair: tuple[float, float]
    ts: list[float]
    variance: list[float]
    se: list[float]
    slope: float
    strictly_decreasing: bool
    theory: list[float] = field(default_factory=list)


def _index(params: ModelParams, tau: float) -> int:
    try:
        return params.taus.index(float(tau))
    except ValueError:
        raise TauVectorShape(f"power {tau} not among {params.taus}") from None


def _jackknife_var_se(x: np.ndarray) -> float:
    R = x.size
    if R < 3:
        return float("nan")
    z = x - x.mean()
    ss = float(z @ z)
    loo = (ss - z * z * R / (R - 1)) / (R - 2)
    return float(np.sqrt((R - 1) / R * np.sum((loo - loo.mean()) ** 2)))


def check_difference_convergence(
    config: ExperimentConfig,
    tau_pair: tuple[float, float],
    workers: int | None = None,
    estimates: list[CovarianceEstimate] | None = None,
) -> DifferenceSeries:
    """Variance of ``D_t`` per schedule point and its log-log slope in ``t``.

    Needs a supercritical configuration with strictly increasing ``t``.
    """
    params = config.params
    if params.regime.kind != SUPERCRITICAL:
        raise WrongRegime(f"difference convergence needs a supercritical schedule, got {params.regime.kind}")
    ts = config.schedule.ts
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise WrongRegime("difference convergence needs strictly increasing t")
    i, j = _index(params, tau_pair[0]), _index(params, tau_pair[1])
    a = derive_scalars(params).a
    ests = estimates if estimates is not None else run_experiment(config, workers)
    var, se, theory = [], [], []
    coef = np.zeros(params.n)
    coef[i] += a[i]
    coef[j] -= a[j]
    for est in ests:
        D = est.normalized @ coef
        var.append(float(np.var(D, ddof=1)))
        se.append(_jackknife_var_se(D))
        if config.window.torus:
            theory.append(float(coef @ torus_covariance(params, est.t, est.delta) @ coef))
    slope = float(np.polyfit(np.log(ts), np.log(var), 1)[0]) if len(ts) > 1 and min(var) > 0 else float("nan")
    decreasing = all(b < a_ for a_, b in zip(var, var[1:]))
    return DifferenceSeries((float(tau_pair[0]), float(tau_pair[1])), ts, var, se, slope, decreasing, theory)


@dataclass
class NoiseDiagnostic:
    """Residual ``rho = L~^(tau) - (d/a) L~^(0)`` against its predicted law.

    ``target_variance`` is ``tau^2 V d kappa_d / (a^2 4 x max(c, 1))`` and the
    correlation of ``rho`` with ``L~^(0)`` should vanish.
    """

    tau: float
    t: float
    variance: float
    variance_se: float
    target_variance: float
    correlation: float
    R: int

    @property
    def relative_error(self) -> float:
        if self.target_variance == 0:
            return 0.0 if self.variance == 0 else math.inf
        return abs(self.variance - self.target_variance) / self.target_variance

    def variance_within(self, rel: float = 0.20, k_se: float = 3.0) -> bool:
        se = 0.0 if math.isnan(self.variance_se) else self.variance_se
        return abs(self.variance - self.target_variance) <= max(rel * self.target_variance, k_se * se)


def noise_target_variance(params: ModelParams, tau: float) -> float:
    s = derive_scalars(params)
    d = params.d
    a = tau + d
    x = tau + d / 2.0
    cmax = max(params.regime.c or 0.0, 1.0)
    return tau**2 * params.volume * d * s.kappa_d / (a**2 * 4.0 * x * cmax)


def check_noise_decomposition(
    config: ExperimentConfig,
    tau: float,
    workers: int | None = None,
    estimates: list[CovarianceEstimate] | None = None,
) -> list[NoiseDiagnostic]:
    """One diagnostic per schedule point for the power ``tau``.

    The power vector must start with ``0``; the regime must be
    subcritical or critical.
    """
    params = config.params
    if params.regime.kind == SUPERCRITICAL:
        raise WrongRegime("noise decomposition is not defined in the supercritical regime")
    if params.taus[0] != 0.0:
        raise TauVectorShape(f"power vector must start with 0, got {params.taus}")
    k = _index(params, tau)
    d = params.d
    coef = d / (tau + d)
    target = noise_target_variance(params, float(tau))
    ests = estimates if estimates is not None else run_experiment(config, workers)
    out = []
    for est in ests:
        L0 = est.normalized[:, 0]
        rho = est.normalized[:, k] - coef * L0
        var = float(np.var(rho, ddof=1))
        if var == 0.0 or np.var(L0) == 0.0:
            corr = 0.0
        else:
            corr = float(np.corrcoef(rho, L0)[0, 1])
        out.append(NoiseDiagnostic(float(tau), est.t, var, _jackknife_var_se(rho), target, corr, est.R))
    return out
