"""Asymptotic covariance matrices in the three intensity regimes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParams, WrongRegime
from ..model import (
    CRITICAL_HIGH,
    CRITICAL_KINDS,
    CRITICAL_LOW,
    SUBCRITICAL,
    SUPERCRITICAL,
    ModelParams,
    derive_scalars,
)


@dataclass(frozen=True)
class CovarianceBundle:
    """``sigma`` is the regime combination of ``sigma_sb`` and ``sigma_sp``."""

    sigma_sb: np.ndarray
    sigma_sp: np.ndarray
    sigma: np.ndarray
    params: ModelParams


@dataclass(frozen=True)
class CauchyView:
    """``sigma_sb == scale * omega`` with ``omega[i, j] = 1/(x_i + x_j)``."""

    omega: np.ndarray
    scale: float


def sb_scale(params: ModelParams) -> float:
    """``V(W) * d * kappa_d / 2``, the factor in front of the Cauchy matrix."""
    s = derive_scalars(params)
    return params.volume * params.d * s.kappa_d / 2.0


def sp_vector(params: ModelParams) -> np.ndarray:
    """``w`` with ``w w^T = sigma_sp``: ``sqrt(V) d kappa_d / a_i``."""
    s = derive_scalars(params)
    return np.sqrt(params.volume) * params.d * s.kappa_d / s.a


def sigma_sb(params: ModelParams) -> np.ndarray:
    s = derive_scalars(params)
    x = s.x
    return params.volume * params.d * s.kappa_d / (2.0 * (x[:, None] + x[None, :]))


def sigma_sp(params: ModelParams) -> np.ndarray:
    w = sp_vector(params)
    return np.outer(w, w)


def combine(params: ModelParams, sb: np.ndarray, sp: np.ndarray) -> np.ndarray:
    kind = params.regime.kind
    if kind == SUBCRITICAL:
        return sb.copy()
    if kind == SUPERCRITICAL:
        return sp.copy()
    c = params.regime.c
    if kind == CRITICAL_LOW:
        return sb + c * sp
    if kind == CRITICAL_HIGH:
        return sb / c + sp
    raise InvalidParams(f"unknown regime {kind}")  # pragma: no cover


def build_sigma(params: ModelParams) -> CovarianceBundle:
    sb = sigma_sb(params)
    sp = sigma_sp(params)
    sigma = combine(params, sb, sp)
    for m in (sb, sp, sigma):
        m.setflags(write=False)
    return CovarianceBundle(sigma_sb=sb, sigma_sp=sp, sigma=sigma, params=params)


def cauchy_view(params: ModelParams) -> CauchyView:
    x = derive_scalars(params).x
    omega = 1.0 / (x[:, None] + x[None, :])
    return CauchyView(omega=omega, scale=sb_scale(params))


def require_regime(params: ModelParams, *kinds: str, min_n: int = 1) -> None:
    if params.regime.kind not in kinds:
        raise WrongRegime(f"operation requires regime in {kinds}, got {params.regime.kind}")
    if params.n < min_n:
        raise InvalidParams(f"operation requires n >= {min_n}, got n = {params.n}")


def require_critical(params: ModelParams, min_n: int = 1) -> None:
    require_regime(params, *CRITICAL_KINDS, min_n=min_n)
