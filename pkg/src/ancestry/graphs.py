"""Ancestral graphs assembled from edge-level ancestor tests.

Two graphs are built from the p-value tensor of :func:`all_pairs_tests`:

* the instantaneous graph uses the lag-0 p-values only, removes detected
  cycles by lowering the level on cycle edges, and is acyclic;
* the summary graph combines the lag p-values of each ordered pair and may
  stay cyclic.

Both are closed under "an ancestor of an ancestor is an ancestor".
"""

import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .ancestor import DEFAULT_EXPONENT, all_pairs_tests
from .multiplicity import combine_lags, holm

TESTED = "tested"
INFERRED = "inferred-by-closure"
INSTANTANEOUS = "instantaneous"
SUMMARY = "summary"


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    p_value: float
    provenance: str = TESTED
    scope: str = INSTANTANEOUS


def _as_edges(edges, scope):
    out = {}
    for key, val in edges.items():
        a, b = key
        if a == b:
            continue
        out[(a, b)] = val if isinstance(val, Edge) else Edge(a, b, float(val), TESTED, scope)
    return out


def transitive_closure(edges, scope=INSTANTANEOUS):
    """Add every edge implied by reachability.

    ``edges`` maps ``(source, target)`` to a p-value or :class:`Edge`. An
    inferred edge carries the smallest achievable maximum p-value over the
    paths that imply it, i.e. the lowest level at which it would appear.
    Self-loops are never emitted.
    """
    edges = _as_edges(edges, scope)
    nodes = sorted({n for e in edges for n in e})
    idx = {n: i for i, n in enumerate(nodes)}
    m = len(nodes)
    w = np.full((m, m), np.inf)
    for (a, b), e in edges.items():
        w[idx[a], idx[b]] = e.p_value
    for c in range(m):
        w = np.minimum(w, np.maximum(w[:, [c]], w[[c], :]))
    out = dict(edges)
    for i, a in enumerate(nodes):
        for jj, b in enumerate(nodes):
            if i != jj and np.isfinite(w[i, jj]) and (a, b) not in out:
                out[(a, b)] = Edge(a, b, float(w[i, jj]), INFERRED, scope)
    return out


def _cycle_edges(edges):
    nodes = sorted({n for e in edges for n in e})
    if not nodes:
        return []
    idx = {n: i for i, n in enumerate(nodes)}
    rows = [idx[a] for a, _ in edges]
    cols = [idx[b] for _, b in edges]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, labels = connected_components(adj, directed=True, connection="strong")
    return [e for e in edges if labels[idx[e[0]]] == labels[idx[e[1]]]]


def resolve_cycles(edges, alpha=None):
    """Drop the weakest cycle edges until the graph is acyclic.

    ``edges`` maps ``(source, target)`` to corrected p-values; with ``alpha``
    given, edges above it are discarded first. While a directed cycle
    exists, the edge with the largest p-value among those inside a
    non-trivial strongly connected component is removed (ties: the
    lexicographically smallest ``(source, target)``). Returns the remaining
    edges and the violation level, the largest removed p-value, or ``None``
    if no cycle was present.
    """
    current = {k: float(v.p_value if isinstance(v, Edge) else v)
               for k, v in edges.items() if k[0] != k[1]}
    if alpha is not None:
        current = {k: v for k, v in current.items() if v <= alpha}
    violation = None
    while True:
        on_cycle = _cycle_edges(current)
        if not on_cycle:
            break
        worst = min(on_cycle, key=lambda e: (-current[e], e))
        pv = current.pop(worst)
        violation = pv if violation is None else max(violation, pv)
    return current, violation


@dataclass
class AncestralGraph:
    """Directed ancestral graph with per-edge p-values and provenance."""

    n_nodes: int
    edges: dict
    scope: str = INSTANTANEOUS
    names: tuple = None
    violation_alpha: float = None
    corrected: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.names is None:
            self.names = tuple(f"x{k + 1}" for k in range(self.n_nodes))

    def has_edge(self, source, target):
        return (source, target) in self.edges

    @property
    def edge_set(self):
        return set(self.edges)

    def tested_edges(self):
        return {k for k, e in self.edges.items() if e.provenance == TESTED}

    def adjacency(self):
        A = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        for a, b in self.edges:
            A[a, b] = True
        return A

    def is_acyclic(self):
        graph = {n: set() for n in range(self.n_nodes)}
        for a, b in self.edges:
            graph[b].add(a)
        try:
            tuple(TopologicalSorter(graph).static_order())
        except CycleError:
            return False
        return True

    def to_dict(self):
        return {
            "scope": self.scope,
            "nodes": list(self.names),
            "edges": [
                {
                    "from": self.names[e.source],
                    "to": self.names[e.target],
                    "p": e.p_value,
                    "provenance": e.provenance,
                }
                for _, e in sorted(self.edges.items())
            ],
            "violation_alpha": self.violation_alpha,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    def to_dot(self):
        lines = [f'digraph "{self.scope}" {{']
        for name in self.names:
            lines.append(f'  "{name}";')
        for _, e in sorted(self.edges.items()):
            style = ", style=dashed" if e.provenance == INFERRED else ""
            lines.append(
                f'  "{self.names[e.source]}" -> "{self.names[e.target]}" '
                f'[label="{e.p_value:.2e}"{style}];'
            )
        if self.violation_alpha is not None:
            lines.append(f'  label="violation alpha {self.violation_alpha:.2e}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _holm_matrix(raw):
    d = raw.shape[0]
    off = ~np.eye(d, dtype=bool)
    corrected = np.full((d, d), np.nan)
    corrected[off] = holm(raw[off])
    return corrected


def graph_from_corrected(corrected, alpha, scope=INSTANTANEOUS, names=None):
    """Threshold a matrix of corrected p-values (``[source, target]``) into a
    closed ancestral graph; cycles are resolved only for instantaneous scope."""
    corrected = np.asarray(corrected, dtype=float)
    d = corrected.shape[0]
    detected = {(a, b): corrected[a, b] for a in range(d) for b in range(d)
                if a != b and corrected[a, b] <= alpha}
    violation = None
    if scope == INSTANTANEOUS:
        detected, violation = resolve_cycles(detected)
    edges = transitive_closure(detected, scope)
    return AncestralGraph(d, edges, scope, names, violation, corrected)


def instantaneous_graph_from_pvalues(raw, alpha=0.05, names=None):
    """Holm over the ``d(d-1)`` lag-0 p-values, then threshold, resolve, close."""
    return graph_from_corrected(_holm_matrix(np.asarray(raw, dtype=float)), alpha,
                                INSTANTANEOUS, names)


def summary_pvalues(tensor):
    """Per-pair combination of the lag p-values of a ``d x d x (p+1)`` array."""
    pv = np.asarray(tensor.pvalues if hasattr(tensor, "pvalues") else tensor, dtype=float)
    d = pv.shape[0]
    out = np.full((d, d), np.nan)
    for a in range(d):
        for b in range(d):
            if a != b:
                out[a, b] = combine_lags(pv[a, b])
    return out


def summary_graph_from_pvalues(tensor, alpha=0.05, names=None):
    """Combine across lags, Holm over ``d(d-1)`` pairs, threshold, close."""
    return graph_from_corrected(_holm_matrix(summary_pvalues(tensor)), alpha, SUMMARY, names)


def instantaneous_graph(x, p, alpha=0.05, exponent=DEFAULT_EXPONENT, center=False, tests=None):
    """Acyclic instantaneous ancestral graph of a time series."""
    tests = tests or all_pairs_tests(x, p, exponent, center)
    g = instantaneous_graph_from_pvalues(tests.lag(0), alpha, tests.names)
    assert g.is_acyclic()
    return g


def summary_graph(x, p, alpha=0.05, exponent=DEFAULT_EXPONENT, center=False, tests=None):
    """Summary time graph; may contain cycles."""
    tests = tests or all_pairs_tests(x, p, exponent, center)
    return summary_graph_from_pvalues(tests, alpha, tests.names)
