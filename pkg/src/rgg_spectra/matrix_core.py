"""Generic dense kernels for real symmetric matrices.

These routines know nothing about covariance matrices; they are the
independent reference against which the closed forms are checked.
Pivoted LU, semidefinite Cholesky and cyclic Jacobi are written out
explicitly, matrices are plain ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotPSD, Singular

# Default tolerances; every routine takes an override.
LU_RESIDUAL = 1e-10
CHOLESKY_RESIDUAL = 1e-9
JACOBI_OFF = 1e-12
JACOBI_MAX_SWEEPS = 100
EIGEN_RESIDUAL = 1e-9
EPS = float(np.finfo(float).eps)


def eps_floor(n: int) -> float:
    """``n * eps``: relative size below which a pivot or eigenvalue counts as zero."""
    return max(int(n), 1) * EPS


def max_abs(A) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.max(np.abs(A))) if A.size else 0.0


def symmetrize(A) -> np.ndarray:
    """Return a float copy with ``A[i, j] == A[j, i]`` exactly."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    return 0.5 * (A + A.T)


def _square(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    return A


@dataclass(frozen=True)
class Factorization:
    """A factorization together with its reconstruction residual.

    ``kind`` is one of ``"lu"`` (``P @ A = L @ U``), ``"cholesky"``
    (``A = G @ G.T``), ``"schur"`` (``A = S @ D @ S_inv``) or ``"root"``
    (``A = B @ B``).  ``residual`` is the max-abs reconstruction error
    against the matrix the factorization was created for.
    """

    kind: str
    factors: dict[str, np.ndarray]
    residual: float
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.factors[name]

    def reconstruct(self) -> np.ndarray:
        return _reconstruct(self.kind, self.factors)

    def target(self) -> np.ndarray:
        """Left-hand side the factors rebuild (``P @ A`` for LU is undone)."""
        R = self.reconstruct()
        if self.kind == "lu":
            return self.factors["P"].T @ R
        return R

    @classmethod
    def create(cls, kind: str, A, meta: dict | None = None, **factors) -> Factorization:
        A = np.asarray(A, dtype=float)
        factors = {k: np.asarray(v, dtype=float) for k, v in factors.items()}
        if kind == "lu" and "P" not in factors:
            factors["P"] = np.eye(A.shape[0])
        R = _reconstruct(kind, factors)
        lhs = factors["P"] @ A if kind == "lu" else A
        return cls(kind, factors, max_abs(R - lhs), dict(meta or {}))


def _reconstruct(kind: str, f: dict[str, np.ndarray]) -> np.ndarray:
    if kind == "lu":
        return f["L"] @ f["U"]
    if kind == "cholesky":
        return f["G"] @ f["G"].T
    if kind == "schur":
        return f["S"] @ f["D"] @ f["S_inv"]
    if kind == "root":
        return f["B"] @ f["B"]
    raise ValueError(f"unknown factorization kind {kind!r}")


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


def lu_pivoted(A) -> Factorization:
    """Gaussian elimination with partial pivoting, ``P @ A = L @ U``.

    Rows are swapped to bring the largest absolute entry of the current
    column onto the diagonal.  A column that is zero from the diagonal
    down is skipped, leaving a zero pivot in ``U``; singular and
    semidefinite inputs therefore factor without error.
    """
    A = _square(A)
    n = A.shape[0]
    U = A.copy()
    L = np.eye(n)
    perm = np.arange(n)
    zero = eps_floor(n) * max_abs(A)
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(U[k:, k])))
        if abs(U[p, k]) <= zero:
            U[k + 1:, k] = 0.0
            continue
        if p != k:
            U[[k, p], :] = U[[p, k], :]
            L[[k, p], :k] = L[[p, k], :k]
            perm[[k, p]] = perm[[p, k]]
        mult = U[k + 1:, k] / U[k, k]
        L[k + 1:, k] = mult
        U[k + 1:, k:] -= np.outer(mult, U[k, k:])
        U[k + 1:, k] = 0.0
    P = np.eye(n)[perm]
    swaps = int(n - len(_cycles(perm)))
    return Factorization.create("lu", A, L=L, U=U, P=P, meta={"sign": -1.0 if swaps % 2 else 1.0})


def _cycles(perm) -> list[list[int]]:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cyc = []
        j = start
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = int(perm[j])
        cycles.append(cyc)
    return cycles


def cholesky_psd(A, tol: float | None = None) -> Factorization:
    """Column-by-column Cholesky ``A = G @ G.T`` for semidefinite ``A``.

    Diagonal entries are ``sqrt(a_jj - sum_k g_jk**2)``; a column whose
    diagonal is zero is zero below the diagonal as well.  Pivots in
    ``[-tol, tol]`` are clamped to zero, anything lower raises ``NotPSD``.
    ``tol`` defaults to ``n * eps * max|a_ij|``; every pivot of a definite
    matrix is at least its smallest eigenvalue, so those survive the clamp
    unless they are lost in rounding anyway.
    """
    A = symmetrize(A)
    n = A.shape[0]
    scale = max_abs(A)
    tol = eps_floor(n) * scale if tol is None else tol
    G = np.zeros((n, n))
    for j in range(n):
        pivot = A[j, j] - np.dot(G[j, :j], G[j, :j])
        if pivot < -tol:
            raise NotPSD(f"diagonal pivot {pivot:.3e} at column {j} below -{tol:.3e}")
        if pivot <= tol:
            continue
        g = math.sqrt(pivot)
        G[j, j] = g
        G[j + 1:, j] = (A[j + 1:, j] - G[j + 1:, :j] @ G[j, :j]) / g
    return Factorization.create("cholesky", A, G=G)


def _off_norm(A) -> float:
    # summed directly; ||A||^2 - ||diag||^2 cancels catastrophically near convergence
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigen(A, off_tol: float = JACOBI_OFF, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Spectrum:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Sweeps over all ``(p, q)`` pairs with a rotation annihilating
    ``A[p, q]`` until the off-diagonal Frobenius norm falls below
    ``off_tol * ||A||_F``.
    """
    A = symmetrize(A)
    n = A.shape[0]
    V = np.eye(n)
    fro = float(np.linalg.norm(A))
    if n == 1 or fro == 0.0:
        return Spectrum(np.diag(A).copy(), V, 0)
    target = off_tol * fro
    for sweep in range(1, max_sweeps + 1):
        off = _off_norm(A)
        if off < target:
            return _sorted_spectrum(A, V, sweep - 1)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp = V[:, p].copy()
                V[:, p] = c * Vp - s * V[:, q]
                V[:, q] = s * Vp + c * V[:, q]
    off = _off_norm(A)
    if off < target:
        return _sorted_spectrum(A, V, max_sweeps)
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")


def _sorted_spectrum(A, V, sweeps) -> Spectrum:
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], V[:, order], sweeps)


def eigen_residual(A, spec: Spectrum) -> float:
    A = np.asarray(A, dtype=float)
    return max_abs(A @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues)


def numerical_rank(A=None, eigenvalues=None, rel: float | None = None) -> int:
    """Count of eigenvalues exceeding ``rel * lambda_max`` (``rel`` defaults to ``n * eps``)."""
    if eigenvalues is None:
        eigenvalues = jacobi_eigen(A).eigenvalues
    w = np.asarray(eigenvalues, dtype=float)
    rel = eps_floor(w.size) if rel is None else rel
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        return 0
    return int(np.sum(w > rel * top))


def determinant(A) -> float:
    """Product of the pivots of ``lu_pivoted`` with the permutation sign."""
    f = lu_pivoted(A)
    return float(f.meta["sign"] * np.prod(np.diag(f["U"])))


def _forward(L, b):
    n = L.shape[0]
    y = np.array(b, dtype=float)
    for i in range(n):
        y[i] -= L[i, :i] @ y[:i]
        y[i] /= L[i, i]
    return y


def _backward(U, y):
    n = U.shape[0]
    x = np.array(y, dtype=float)
    for i in range(n - 1, -1, -1):
        x[i] -= U[i, i + 1:] @ x[i + 1:]
        x[i] /= U[i, i]
    return x


def inverse(A, rel_tol: float | None = None) -> np.ndarray:
    """Inverse through LU solves against the columns of ``P``.

    Raises :class:`Singular` when a pivot is below ``rel_tol * max|a_ij|``
    (default ``n * eps``).
    """
    A = _square(A)
    f = lu_pivoted(A)
    U = f["U"]
    rel_tol = eps_floor(A.shape[0]) if rel_tol is None else rel_tol
    piv = np.abs(np.diag(U))
    if np.min(piv) <= rel_tol * max(max_abs(A), np.finfo(float).tiny):
        raise Singular("matrix is singular to working precision")
    P = f["P"]
    n = A.shape[0]
    X = np.empty((n, n))
    for j in range(n):
        X[:, j] = _backward(U, _forward(f["L"], P[:, j]))
    return X


def char_poly(A=None, eigenvalues=None) -> np.ndarray:
    """Coefficients of ``det(A - lam I) = prod_i (lambda_i - lam)``.

    Ascending order: entry ``k`` multiplies ``lam**k``; the last entry is
    ``(-1)**n``.  Built from the Jacobi spectrum rather than from
    Faddeev-LeVerrier recursions.
    """
    if eigenvalues is None:
        eigenvalues = jacobi_eigen(A).eigenvalues
    coeffs = np.array([1.0])
    for lam in eigenvalues:
        # multiply by (lam_i - x), ascending order
        nxt = np.zeros(len(coeffs) + 1)
        nxt[:-1] += lam * coeffs
        nxt[1:] -= coeffs
        coeffs = nxt
    return coeffs


def poly_eval(coeffs, x):
    """Evaluate ascending coefficients at ``x`` (Horner)."""
    out = 0.0
    for c in reversed(coeffs):
        out = out * x + c
    return out


def wolkowicz_bounds(A) -> tuple[float, float]:
    """Trace/determinant eigenvalue bracket for a positive definite matrix.

    With ``m = tr(A)/n`` and ``s**2 = tr(A @ A)/n - m**2`` all eigenvalues
    lie in ``[det(A) / (m + s/sqrt(n-1))**(n-1), m + s*sqrt(n-1)]``.
    For ``n = 1`` both ends are ``a_11``.
    """
    A = symmetrize(A)
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0]), float(A[0, 0])
    m = float(np.trace(A)) / n
    s2 = float(np.sum(A * A)) / n - m * m
    s = math.sqrt(max(s2, 0.0))
    upper = m + s * math.sqrt(n - 1)
    lower = determinant(A) / (m + s / math.sqrt(n - 1)) ** (n - 1)
    return lower, upper


def psd_root(A) -> np.ndarray:
    """Principal square root of a semidefinite matrix from its spectrum."""
    spec = jacobi_eigen(A)
    lam = spec.eigenvalues
    # eigenvalues at rounding level would contribute sqrt(eps)-sized noise
    lam = np.where(lam > eps_floor(len(lam)) * np.max(np.abs(lam)), lam, 0.0)
    w = np.sqrt(lam)
    return (spec.eigenvectors * w) @ spec.eigenvectors.T


def lu_from_cholesky(G) -> tuple[np.ndarray, np.ndarray]:
    """Unpivoted ``L, U`` of ``G @ G.T`` for nonsingular ``G``.

    ``L = G @ D`` and ``U = D^{-1} @ G.T`` with ``D = diag(1/g_ii)``.
    """
    G = np.asarray(G, dtype=float)
    g = np.diag(G)
    return G / g, g[:, None] * G.T
