"""Ancestor regression for structural VAR models.

For a target series ``j`` and lag ``tau`` the lag block of past values is
regressed out of every series, a sign-preserving power of the target's
residual is regressed on the lag-0 residuals of all series, and each
coefficient is tested with an ordinary z-test. Coefficients of series that
are not ``tau``-lagged ancestors of ``j`` vanish in population, so the
p-values are asymptotically valid for the null ``k not in AN^tau(j)``.

Index conventions: rows are 0-based time points. With order ``p`` and lag
``tau`` the response residuals cover times ``p + tau .. T - 1`` and are paired
with lag-0 residuals at times ``p .. T - 1 - tau``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import linreg
from .errors import InsufficientData, NumericOverflow
from .multiplicity import holm
from .svar import TimeSeries

DEFAULT_EXPONENT = 3.0
P_FLOOR = 1e-300


def _data(x):
    if isinstance(x, TimeSeries):
        return x.data
    data = np.asarray(x, dtype=float)
    return data[:, None] if data.ndim == 1 else data


def _prepare(x, center):
    data = _data(x)
    return data - data.mean(axis=0) if center else data


def nonlinearity(u, exponent=DEFAULT_EXPONENT):
    """``sign(u) * |u| ** exponent``, elementwise."""
    if not exponent > 1:
        raise ValueError(f"exponent must exceed 1, got {exponent}")
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        return np.sign(u) * np.abs(u) ** exponent


def p_value(z):
    """Two-sided normal p-value, floored at 1e-300."""
    return np.maximum(special.erfc(np.abs(z) / math.sqrt(2.0)), P_FLOOR)


def lagged_design(x, p, start_lag, times):
    """Stack lagged observations into a design matrix.

    Row ``i`` holds ``x[t - start_lag], ..., x[t - start_lag - p + 1]``
    concatenated (newest first) for ``t = times[i]``, giving ``d * p`` columns.
    """
    data = _data(x)
    times = np.asarray(times, dtype=int)
    T, d = data.shape
    if times.size and (times.min() - start_lag - p + 1 < 0 or times.max() >= T):
        raise InsufficientData(
            f"times {times.min()}..{times.max()} need lags {start_lag}..{start_lag + p - 1} "
            f"within a series of length {T}"
        )
    if times.size < d * p + 1:
        raise InsufficientData(f"{times.size} rows for a design with {d * p} columns")
    blocks = [data[times - start_lag - i] for i in range(p)]
    return np.hstack(blocks) if blocks else np.empty((times.size, 0))


def xi_residuals(x, p, tau=0, rank_tol=linreg.RANK_TOL):
    """Residuals of each series on the lag block ``tau + 1 .. tau + p``.

    Rows correspond to times ``p + tau .. T - 1``. For ``tau = 0`` these
    estimate the reduced-form innovations.
    """
    data = _data(x)
    T, d = data.shape
    n = T - p - tau
    if n <= d * p + 1:
        raise InsufficientData(f"{n} usable rows for {d * p} lag columns")
    times = np.arange(p + tau, T)
    if p == 0:
        return data[times].copy()
    X = lagged_design(data, p, tau + 1, times)
    return linreg.residualize(data[times], X, rank_tol)


def z_residuals(x, p, rank_tol=linreg.RANK_TOL):
    """Residual of each series on all other current values and ``p`` lags.

    Rows correspond to times ``p .. T - 1``.
    """
    data = _data(x)
    T, d = data.shape
    if T - p <= d * (p + 1):
        raise InsufficientData(f"{T - p} usable rows for {d * (p + 1)} predictors")
    times = np.arange(p, T)
    current = data[times]
    lags = lagged_design(data, p, 1, times)
    out = np.empty_like(current)
    for k in range(d):
        X = np.hstack([np.delete(current, k, axis=1), lags])
        if X.shape[1] == 0:
            out[:, k] = current[:, k]
        else:
            out[:, k] = linreg.residualize(current[:, [k]], X, rank_tol)[:, 0]
    return out


@dataclass(frozen=True)
class AncestorTest:
    """Test of ``source`` being a ``lag``-lagged ancestor of ``target``."""

    source: int
    target: int
    lag: int
    beta: float
    var: float
    z: float
    p_value: float
    n_used: int

    @property
    def se(self):
        return math.sqrt(self.var)

    def to_dict(self):
        return {
            "k": self.source,
            "j": self.target,
            "tau": self.lag,
            "beta": self.beta,
            "se": self.se,
            "z": self.z,
            "p": self.p_value,
        }


def _lag_tests(data, p, tau, targets, f, rank_tol):
    T, d = data.shape
    xi0 = xi_residuals(data, p, 0, rank_tol)
    xit = xi0 if tau == 0 else xi_residuals(data, p, tau, rank_tol)
    n = T - p - tau
    if n - d < 1:
        raise InsufficientData(f"{n} usable rows for {d} predictors")
    X = xi0[:n]
    F = f(xit[:, list(targets)])
    finite = np.isfinite(F)
    if not finite.all():
        row = int(np.argwhere(~finite)[0][0])
        raise NumericOverflow(p + tau + row, f"transformed residual overflows at time index {p + tau + row}")
    fit = linreg.ols_fit(X, F, rank_tol)
    sigma2 = fit.rss / (n - d)
    out = []
    for col, j in enumerate(targets):
        var = sigma2[col] * fit.cov_factor
        beta = fit.coefficients[:, col]
        z = beta / np.sqrt(var)
        pv = p_value(z)
        out.append([
            AncestorTest(k, j, tau, float(beta[k]), float(var[k]), float(z[k]), float(pv[k]), n)
            for k in range(d)
        ])
    return out


def _transform(exponent, f):
    if f is not None:
        return f
    if not exponent > 1:
        raise ValueError(f"exponent must exceed 1, got {exponent}")
    return lambda u: nonlinearity(u, exponent)


def ancestor_test(x, p, target, tau=0, exponent=DEFAULT_EXPONENT, center=False,
                  f=None, rank_tol=linreg.RANK_TOL):
    """Run the ancestor regression for one target and lag.

    Returns one :class:`AncestorTest` per series ``k``; the entry with
    ``k == target`` is the autoregressive coefficient and is not a causal
    test. ``f`` overrides the default sign-power transform.
    """
    data = _prepare(x, center)
    if not 0 <= tau <= p:
        raise ValueError(f"lag {tau} outside 0..{p}")
    return _lag_tests(data, p, tau, [target], _transform(exponent, f), rank_tol)[0]


class EdgePValueTensor:
    """Raw p-values of all ordered pairs and lags.

    ``pvalues[k, j, tau]`` belongs to the hypothesis that ``k`` is not a
    ``tau``-lagged ancestor of ``j``; the diagonal is NaN.
    """

    def __init__(self, pvalues, records, names=None):
        self.pvalues = np.asarray(pvalues, dtype=float)
        self.records = list(records)
        d = self.pvalues.shape[0]
        self.names = tuple(names) if names is not None else tuple(f"x{k + 1}" for k in range(d))
        off = ~np.isnan(self.pvalues)
        if np.any((self.pvalues[off] < 0) | (self.pvalues[off] > 1)):
            raise ValueError("p-values outside [0, 1]")

    @property
    def d(self):
        return self.pvalues.shape[0]

    @property
    def p(self):
        return self.pvalues.shape[2] - 1

    @property
    def n_tests(self):
        return int(np.count_nonzero(~np.isnan(self.pvalues)))

    def lag(self, tau):
        return self.pvalues[:, :, tau]

    def tests(self, include_autoregressive=False):
        return [r for r in self.records if include_autoregressive or r.source != r.target]

    def to_rows(self):
        return [r.to_dict() for r in self.tests()]


def all_pairs_tests(x, p, exponent=DEFAULT_EXPONENT, center=False, f=None,
                    rank_tol=linreg.RANK_TOL):
    """Ancestor tests for every target and every lag ``0..p``."""
    data = _prepare(x, center)
    d = data.shape[1]
    f = _transform(exponent, f)
    pv = np.full((d, d, p + 1), np.nan)
    records = []
    for tau in range(p + 1):
        for row in _lag_tests(data, p, tau, list(range(d)), f, rank_tol):
            for r in row:
                records.append(r)
                if r.source != r.target:
                    pv[r.source, r.target, tau] = r.p_value
    records.sort(key=lambda r: (r.target, r.lag, r.source))
    names = x.names if isinstance(x, TimeSeries) else None
    return EdgePValueTensor(pv, records, names)


@dataclass(frozen=True)
class TargetAnalysis:
    """Holm-corrected ancestor detection for a single target."""

    target: int
    alpha: float
    tests: list
    corrected: np.ndarray
    detected: frozenset = field(default_factory=frozenset)

    def detected_sources(self, lag=None):
        return sorted({k for k, tau in self.detected if lag is None or tau == lag})


def target_analysis(x, p, target, alpha=0.05, exponent=DEFAULT_EXPONENT, center=False,
                    f=None, rank_tol=linreg.RANK_TOL):
    """Test all ``(k, tau)`` with ``k != target`` and apply Holm at level ``alpha``.

    ``detected`` holds ``(source, lag)`` pairs whose corrected p-value is at
    most ``alpha``.
    """
    data = _prepare(x, center)
    d = data.shape[1]
    f = _transform(exponent, f)
    tests = []
    for tau in range(p + 1):
        row = _lag_tests(data, p, tau, [target], f, rank_tol)[0]
        tests.extend(r for r in row if r.source != target)
    corrected = holm([t.p_value for t in tests])
    detected = frozenset((t.source, t.lag) for t, c in zip(tests, corrected) if c <= alpha)
    assert len(tests) == (d - 1) * (p + 1)
    return TargetAnalysis(target, alpha, tests, corrected, detected)
