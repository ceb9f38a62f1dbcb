"""Closed forms for the subcritical (Cauchy-type) covariance matrix.

With ``x_i = tau_i + d/2`` the matrix is ``scale * omega`` where
``omega[i, j] = 1/(x_i + x_j)`` and ``scale = V(W) d kappa_d / 2``.
The helpers taking raw ``x`` arrays are shared with the critical regime.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..errors import InvalidParams
from ..matrix_core import Factorization
from ..model import SUBCRITICAL, ModelParams, derive_scalars
from .covariance import build_sigma, require_regime, sb_scale

MAX_CHARPOLY_N = 20


def cauchy_det(x) -> float:
    """``prod_{i<j} (x_i - x_j)^2 / prod_{i,j} (x_i + x_j)``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    # interleaved so the running quotient stays in range for larger n
    out = 1.0
    for i in range(n):
        for j in range(n):
            out /= x[i] + x[j]
            if i < j:
                out *= (x[i] - x[j]) ** 2
    return out


def cauchy_inverse(x) -> np.ndarray:
    """Entrywise inverse of ``omega = (1/(x_i + x_j))``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    H = np.empty((n, n))
    for i in range(n):
        others = [k for k in range(n) if k != i]
        num = np.prod((x[others] + x[i]) ** 2)
        den = np.prod((x[others] - x[i]) ** 2)
        H[i, i] = 2.0 * x[i] * num / den
        for j in range(i + 1, n):
            rest = [l for l in range(n) if l not in (i, j)]
            plus = np.prod([(x[k] + x[l]) for l in rest for k in (i, j)])
            minus = np.prod([(x[k] - x[l]) for l in rest for k in (i, j)])
            val = -4.0 * x[i] * x[j] * (x[i] + x[j]) * plus / ((x[j] - x[i]) ** 2 * minus)
            H[i, j] = H[j, i] = val
    return H


def _x(params: ModelParams) -> np.ndarray:
    require_regime(params, SUBCRITICAL)
    return derive_scalars(params).x


def sb_det(params: ModelParams) -> float:
    x = _x(params)
    return sb_scale(params) ** len(x) * cauchy_det(x)


def sb_inverse(params: ModelParams) -> np.ndarray:
    x = _x(params)
    return cauchy_inverse(x) / sb_scale(params)


def subset_minor_sums(x, n_max: int = MAX_CHARPOLY_N) -> np.ndarray:
    """``E[m]``: sum of the ``m x m`` principal minors of ``omega``, ``m = 0..n``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n > n_max:
        raise InvalidParams(f"subset enumeration capped at n = {n_max}, got {n}")
    E = np.zeros(n + 1)
    E[0] = 1.0
    for m in range(1, n + 1):
        E[m] = sum(cauchy_det(x[list(idx)]) for idx in combinations(range(n), m))
    return E


def sb_charpoly(params: ModelParams) -> np.ndarray:
    """Ascending coefficients of ``det(sigma - lam I)``.

    Coefficient ``k`` is ``(-1)^k scale^(n-k)`` times the sum over all
    ``(n-k)``-subsets of the Cauchy determinant restricted to the subset.
    """
    x = _x(params)
    n = len(x)
    scale = sb_scale(params)
    E = subset_minor_sums(x)
    return np.array([(-1) ** k * scale ** (n - k) * E[n - k] for k in range(n + 1)])


def sb_lu_factors(x, scale: float) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    n = len(x)
    L = np.zeros((n, n))
    U = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            num = 2.0 * x[j]
            den = 1.0
            for k in range(j):
                num *= (x[j] + x[k]) * (x[i] - x[k])
                den *= x[j] - x[k]
            for k in range(j + 1):
                den *= x[i] + x[k]
            L[i, j] = num / den
    for i in range(n):
        for j in range(i, n):
            num = 2.0 * scale
            den = 2.0
            for k in range(i):
                num *= (x[i] - x[k]) * (x[j] - x[k])
                den *= x[i] + x[k]
            for k in range(i + 1):
                den *= x[j] + x[k]
            U[i, j] = num / den
    return L, U


def sb_cholesky_factor(x, scale: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = len(x)
    G = np.zeros((n, n))
    root = math.sqrt(scale)
    for i in range(n):
        for j in range(i + 1):
            val = root * math.sqrt(2.0 * x[j])
            for k in range(j):
                val *= x[i] - x[k]
            for k in range(j + 1):
                val /= x[i] + x[k]
            G[i, j] = val
    return G


def sb_lu(params: ModelParams) -> Factorization:
    x = _x(params)
    L, U = sb_lu_factors(x, sb_scale(params))
    return Factorization.create("lu", build_sigma(params).sigma, L=L, U=U)


def sb_cholesky(params: ModelParams) -> Factorization:
    x = _x(params)
    G = sb_cholesky_factor(x, sb_scale(params))
    return Factorization.create("cholesky", build_sigma(params).sigma, G=G)


def cauchy_eigen_bounds(x, scale: float) -> tuple[float, float]:
    """Lower/upper eigenvalue bounds written out for ``scale * omega``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n == 1:
        v = scale / (2.0 * x[0])
        return v, v
    inv_sum = float(np.sum(1.0 / (2.0 * x)))
    sq_sum = float(np.sum(n / (x[:, None] + x[None, :]) ** 2))
    spread = max(sq_sum - inv_sum**2, 0.0)
    upper = 2.0 * scale * (inv_sum + math.sqrt((n - 1) * spread)) / (2.0 * n)
    inner = (inv_sum * math.sqrt(n - 1) + math.sqrt(spread)) / (n * math.sqrt(n - 1))
    lower = 2.0 * scale * cauchy_det(x) / (2.0 * inner ** (n - 1))
    return lower, upper


def sb_eigen_bounds(params: ModelParams) -> tuple[float, float]:
    x = _x(params)
    return cauchy_eigen_bounds(x, sb_scale(params))


def cauchy_eigenvalues_2(x, scale: float) -> tuple[float, float]:
    """Both eigenvalues of the ``2 x 2`` case in closed form."""
    x1, x2 = (float(v) for v in x)
    root = math.sqrt(x1**4 + 14.0 * x1**2 * x2**2 + x2**4)
    pre = 2.0 * scale / (8.0 * x1 * x2 * (x1 + x2))
    return pre * ((x1 + x2) ** 2 - root), pre * ((x1 + x2) ** 2 + root)


def sb_eigenvalues_2(params: ModelParams) -> tuple[float, float]:
    x = _x(params)
    if len(x) != 2:
        raise InvalidParams("closed-form eigenvalues exist only for n = 2")
    return cauchy_eigenvalues_2(x, sb_scale(params))
