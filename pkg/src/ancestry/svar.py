"""Structural VAR models: representation, reduced and companion forms,
stability, and simulation.

A model of order ``p`` is given by ``p + 1`` coefficient matrices
``B[0], ..., B[p]`` where ``B[tau][j, k]`` is the effect of series ``k`` at
time ``t - tau`` on series ``j`` at time ``t``. ``B[0]`` holds the
instantaneous effects and must describe an acyclic graph.
"""

import json
import math
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

import numpy as np

from .errors import InvalidModel, UnstableModel

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is optional
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

DEFAULT_BURN_IN = 10_000

_KINDS = ("normal", "uniform", "laplace", "t")


@dataclass(frozen=True)
class Innovation:
    """Zero-mean, unit-variance innovation distribution.

    ``kind`` is one of ``normal``, ``uniform``, ``laplace`` or ``t``; the
    Student-t needs ``df > 2``. Every kind is rescaled analytically so that
    its variance is exactly one.
    """

    kind: str = "normal"
    df: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidModel(f"unknown innovation kind {self.kind!r}")
        if self.kind == "t":
            if self.df is None or not self.df > 2:
                raise InvalidModel("Student-t innovations need df > 2")
        elif self.df is not None:
            raise InvalidModel(f"{self.kind} innovations take no df")

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return 1.0

    def sample(self, rng, size):
        if self.kind == "normal":
            return rng.standard_normal(size)
        if self.kind == "uniform":
            a = math.sqrt(3.0)
            return rng.uniform(-a, a, size)
        if self.kind == "laplace":
            return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size)
        return rng.standard_t(self.df, size) * math.sqrt((self.df - 2.0) / self.df)

    def to_dict(self):
        out = {"kind": self.kind}
        if self.df is not None:
            out["df"] = self.df
        return out

    @classmethod
    def from_dict(cls, obj):
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["kind"], obj.get("df"))


def _causal_order(B0):
    d = B0.shape[0]
    graph = {j: {k for k in range(d) if B0[j, k] != 0} for j in range(d)}
    try:
        return list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise InvalidModel(f"instantaneous effects contain a cycle: {exc.args[1]}") from None


@dataclass(frozen=True)
class SvarSpec:
    """Ground-truth structural VAR: coefficient matrices plus innovations."""

    B: tuple
    noise: tuple = field(default=None)

    def __post_init__(self):
        mats = tuple(np.array(b, dtype=float) for b in self.B)
        if not mats:
            raise InvalidModel("need at least the instantaneous matrix B[0]")
        d = mats[0].shape[0]
        for tau, b in enumerate(mats):
            if b.shape != (d, d):
                raise InvalidModel(f"B[{tau}] has shape {b.shape}, expected {(d, d)}")
            if not np.all(np.isfinite(b)):
                raise InvalidModel(f"B[{tau}] has non-finite entries")
            b.setflags(write=False)
        noise = self.noise
        if noise is None:
            noise = (Innovation(),) * d
        noise = tuple(n if isinstance(n, Innovation) else Innovation.from_dict(n) for n in noise)
        if len(noise) != d:
            raise InvalidModel(f"{len(noise)} innovations given for {d} series")
        object.__setattr__(self, "B", mats)
        object.__setattr__(self, "noise", noise)
        _causal_order(mats[0])

    @property
    def d(self):
        return self.B[0].shape[0]

    @property
    def p(self):
        return len(self.B) - 1

    @property
    def causal_order(self):
        return _causal_order(self.B[0])

    def to_dict(self):
        return {
            "d": self.d,
            "p": self.p,
            "B": [b.tolist() for b in self.B],
            "noise": [n.to_dict() for n in self.noise],
        }

    @classmethod
    def from_dict(cls, obj):
        spec = cls(tuple(obj["B"]), obj.get("noise"))
        if "d" in obj and obj["d"] != spec.d or "p" in obj and obj["p"] != spec.p:
            raise InvalidModel("declared d/p disagree with the coefficient matrices")
        return spec

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TimeSeries:
    """``T x d`` block of observations with one name per column."""

    data: np.ndarray
    names: tuple = None

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1:
            raise ValueError(f"expected a non-empty T x d matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValueError(f"non-finite entry at row {bad[0]}, column {bad[1]}")
        data.setflags(write=False)
        names = self.names
        if names is None:
            names = tuple(f"x{k + 1}" for k in range(data.shape[1]))
        names = tuple(str(n) for n in names)
        if len(names) != data.shape[1]:
            raise ValueError(f"{len(names)} names for {data.shape[1]} columns")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "names", names)

    @property
    def T(self):
        return self.data.shape[0]

    @property
    def d(self):
        return self.data.shape[1]

    def centered(self):
        return TimeSeries(self.data - self.data.mean(axis=0), self.names)


def reduced_form(spec):
    """Lag matrices of the reduced form, ``(I - B0)^{-1} B_tau`` for tau >= 1."""
    A = np.eye(spec.d) - spec.B[0]
    if np.linalg.cond(A) > 1e12:
        raise InvalidModel("I - B0 is numerically singular; instantaneous effects are not acyclic")
    return [np.linalg.solve(A, b) for b in spec.B[1:]]


def companion_matrix(spec):
    """Order-one rewrite of the reduced form as a ``dp x dp`` block matrix."""
    if spec.p < 1:
        raise ValueError("the companion matrix needs order p >= 1")
    return _companion(reduced_form(spec))


def _companion(lags):
    d, p = lags[0].shape[0], len(lags)
    C = np.zeros((d * p, d * p))
    C[:d, :] = np.hstack(lags)
    C[d:, :-d] = np.eye(d * (p - 1))
    return C


def spectral_radius(M):
    ev = np.linalg.eigvals(M)
    if not np.all(np.isfinite(ev)):
        raise FloatingPointError(f"eigenvalue computation failed for a {M.shape} matrix")
    return float(np.max(np.abs(ev))) if ev.size else 0.0


def is_stable(spec):
    """Return ``(stable, radius)`` for the companion matrix of ``spec``."""
    if spec.p == 0:
        return True, 0.0
    radius = spectral_radius(companion_matrix(spec))
    return radius < 1.0, radius


@njit(cache=True)
def _recurse(xi, lags):
    n, d = xi.shape
    p = lags.shape[0]
    x = np.zeros((n, d))
    for t in range(n):
        for j in range(d):
            acc = xi[t, j]
            for tau in range(1, min(p, t) + 1):
                for k in range(d):
                    acc += lags[tau - 1, j, k] * x[t - tau, k]
            x[t, j] = acc
    return x


def simulate(spec, T, burn_in=DEFAULT_BURN_IN, seed=0, names=None):
    """Draw ``T`` observations from a stable model.

    The recursion starts from the zero state and the first ``burn_in`` rows
    are discarded. Output is a deterministic function of ``seed``.
    """
    if T < 1 or burn_in < 0:
        raise ValueError("T must be positive and burn_in nonnegative")
    stable, radius = is_stable(spec)
    if not stable:
        raise UnstableModel(f"companion spectral radius {radius:.6g} >= 1")
    rng = np.random.default_rng(seed)
    n = T + burn_in
    eps = np.column_stack([nz.sample(rng, n) for nz in spec.noise])
    xi = np.linalg.solve(np.eye(spec.d) - spec.B[0], eps.T).T
    if spec.p == 0:
        x = xi
    else:
        x = _recurse(np.ascontiguousarray(xi), np.array(reduced_form(spec)))
    return TimeSeries(x[burn_in:], names)
