"""Closed forms for the rank-one supercritical matrix.

With ``a_i = tau_i + d`` and ``b = sum_k prod_{l != k} a_l**2`` the
matrix is ``V d^2 kappa_d^2 (1 / (a_i a_j))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..matrix_core import Factorization
from ..model import SUPERCRITICAL, ModelParams, derive_scalars
from .covariance import build_sigma, require_regime


@dataclass(frozen=True)
class SupercriticalSpectrum:
    """Eigenvalues ``0`` (multiplicity ``n-1``) and ``lambda2``.

    ``basis`` holds the unnormalized eigenvectors as columns: the first
    ``n-1`` span the kernel, the last one belongs to ``lambda2``.
    """

    lambda1: float
    lambda2: float
    basis: np.ndarray


def _scalars(params: ModelParams):
    require_regime(params, SUPERCRITICAL, min_n=2)
    return derive_scalars(params)


def eigenvector_matrix(a: np.ndarray) -> np.ndarray:
    """Columns ``v_k = (a_1/a_{k+1}) e_1 - e_{k+1}`` and ``v_n = (a_n / a_i)_i``."""
    n = len(a)
    S = np.zeros((n, n))
    for k in range(n - 1):
        S[0, k] = a[0] / a[k + 1]
        S[k + 1, k] = -1.0
    S[:, n - 1] = a[n - 1] / a
    return S


def sp_spectrum(params: ModelParams) -> SupercriticalSpectrum:
    s = _scalars(params)
    lam2 = params.volume * (params.d * s.kappa_d) ** 2 * float(np.sum(1.0 / s.a**2))
    return SupercriticalSpectrum(0.0, lam2, eigenvector_matrix(s.a))


def schur_inverse(a: np.ndarray, middle_index: str = "column") -> np.ndarray:
    """Explicit inverse of the eigenvector matrix.

    Row ``n`` holds ``prod a_k^2 / (a_j a_n b)``; entries ``(i, i+1)`` hold
    ``-sum_{k != m} a_m^2 prod_{l not in {k, m}} a_l^2 / b``; all others
    ``prod a_k^2 / (a_{i+1} a_j b)``.

    ``middle_index="column"`` takes ``m = i+1`` (the column index, which
    makes ``S @ S_inv`` the identity).  ``"row"`` takes ``m = i`` and is
    kept only to demonstrate that this reading does not invert ``S``.
    """
    if middle_index not in ("column", "row"):
        raise ValueError("middle_index must be 'column' or 'row'")
    n = len(a)
    a2 = a * a
    prod_all = float(np.prod(a2))
    b = sum(float(np.prod(np.delete(a2, k))) for k in range(n))
    T = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if i == n - 1:
                T[i, j] = prod_all / (a[j] * a[n - 1] * b)
            elif j == i + 1:
                m = j if middle_index == "column" else i
                acc = 0.0
                for k in range(n):
                    if k == m:
                        continue
                    rest = [l for l in range(n) if l not in (k, m)]
                    acc += a2[m] * float(np.prod(a2[rest]))
                T[i, j] = -acc / b
            else:
                T[i, j] = prod_all / (a[i + 1] * a[j] * b)
    return T


def sp_schur(params: ModelParams, middle_index: str = "column") -> Factorization:
    """``sigma = S D S^{-1}`` with ``D = diag(0, ..., 0, lambda2)``."""
    spec = sp_spectrum(params)
    a = derive_scalars(params).a
    D = np.zeros((params.n, params.n))
    D[-1, -1] = spec.lambda2
    S_inv = schur_inverse(a, middle_index)
    f = Factorization.create(
        "schur",
        build_sigma(params).sigma,
        S=spec.basis,
        D=D,
        S_inv=S_inv,
        meta={"middle_index": middle_index},
    )
    return f


def sp_lu(params: ModelParams) -> Factorization:
    s = _scalars(params)
    n = params.n
    a = s.a
    L = np.eye(n)
    L[1:, 0] = a[0] / a[1:]
    U = np.zeros((n, n))
    U[0, :] = params.volume * (params.d * s.kappa_d) ** 2 / (a[0] * a)
    return Factorization.create("lu", build_sigma(params).sigma, L=L, U=U)


def sp_cholesky(params: ModelParams) -> Factorization:
    s = _scalars(params)
    G = np.zeros((params.n, params.n))
    G[:, 0] = np.sqrt(params.volume) * params.d * s.kappa_d / s.a
    return Factorization.create("cholesky", build_sigma(params).sigma, G=G)


def sp_root(params: ModelParams) -> Factorization:
    """Symmetric root ``B`` with ``b_ij = sqrt(V) d kappa prod(a) / (a_i a_j sqrt(b))``."""
    s = _scalars(params)
    a = s.a
    B = np.sqrt(params.volume) * params.d * s.kappa_d * float(np.prod(a)) / (
        np.outer(a, a) * np.sqrt(s.b)
    )
    return Factorization.create("root", build_sigma(params).sigma, B=B)
