"""Dense least squares via a thin QR factorization."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InsufficientData, RankDeficient

RANK_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    """Result of an ordinary least-squares fit.

    ``cov_factor`` is the diagonal of ``(X^T X)^{-1}``; multiplied by an
    error-variance estimate it gives the coefficient variances.
    """

    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    df: int
    cov_factor: np.ndarray


def _qr(X, rank_tol):
    n, q = X.shape
    if q < 1:
        raise ValueError("design matrix needs at least one column")
    if n <= q:
        raise InsufficientData(f"{n} rows are not enough for {q} columns")
    Q, R = linalg.qr(X, mode="economic", check_finite=False)
    s = linalg.svdvals(R, check_finite=False)
    ratio = s[-1] / s[0] if s[0] > 0 else 0.0
    if ratio < rank_tol:
        raise RankDeficient(q, ratio)
    return Q, R


def ols_fit(X, y, rank_tol=RANK_TOL):
    """Least-squares fit of ``y`` on the columns of ``X`` (no intercept added).

    ``y`` may be a vector or an ``n x m`` matrix of responses sharing the
    design; coefficients and residuals then gain a trailing axis.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape[0] != X.shape[0]:
        raise ValueError(f"incompatible shapes {X.shape} and {y.shape}")
    Q, R = _qr(X, rank_tol)
    qty = Q.T @ y
    coef = linalg.solve_triangular(R, qty, check_finite=False)
    resid = y - Q @ qty
    rss = np.sum(resid**2, axis=0)
    r_inv = linalg.solve_triangular(R, np.eye(R.shape[0]), check_finite=False)
    cov_factor = np.sum(r_inv**2, axis=1)
    n, q = X.shape
    return OlsFit(coef, resid, rss if np.ndim(rss) else float(rss), n - q, cov_factor)


def residualize(Y, X, rank_tol=RANK_TOL):
    """Residuals of every column of ``Y`` after projecting on the span of ``X``."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    if Y.shape[0] != X.shape[0]:
        raise ValueError(f"incompatible shapes {Y.shape} and {X.shape}")
    Q, _ = _qr(X, rank_tol)
    return Y - Q @ (Q.T @ Y)
