"""Family-wise error control and combination of p-values across lags."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPValue


def _check(values):
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise InvalidPValue("empty p-value family")
    bad = ~((values >= 0) & (values <= 1))
    if bad.any():
        i = int(np.argmax(bad))
        raise InvalidPValue(f"p-value {values[i]!r} at position {i} is outside [0, 1]")
    return values


def holm(pvalues):
    """Bonferroni-Holm adjusted p-values, returned in input order."""
    p = _check(pvalues)
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = np.minimum(1.0, (m - np.arange(m)) * p[order])
    out = np.empty(m)
    out[order] = np.maximum.accumulate(scaled)
    return out


def harmonic_number(r):
    return float(np.sum(1.0 / np.arange(1, r + 1)))


def combine_lags(pvalues):
    """Combine ``r`` dependent p-values into one.

    Uses the order statistics: ``min_i (r / i) * p_(i) * H_r`` capped at one,
    where ``H_r`` is the ``r``-th harmonic number. Valid under arbitrary
    dependence between the inputs.
    """
    p = np.sort(_check(pvalues), kind="stable")
    r = p.size
    ranks = np.arange(1, r + 1)
    return float(min(1.0, np.min(r / ranks * p) * harmonic_number(r)))


@dataclass(frozen=True)
class PValueSet:
    """A family of p-values with matching labels."""

    values: tuple
    labels: tuple = None

    def __post_init__(self):
        values = tuple(float(v) for v in _check(self.values))
        labels = self.labels
        if labels is None:
            labels = tuple(range(len(values)))
        labels = tuple(labels)
        if len(labels) != len(values):
            raise ValueError(f"{len(labels)} labels for {len(values)} p-values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.values)

    def holm(self):
        return PValueSet(tuple(holm(self.values)), self.labels)

    def combined(self):
        return combine_lags(self.values)

    def as_dict(self):
        return dict(zip(self.labels, self.values))
