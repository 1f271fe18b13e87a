"""Monte Carlo benchmark on randomly generated structural VAR models.

Each run draws a random model (:func:`random_setup`), simulates one long
series, and analyses prefixes of it at every sample size in the grid.
Detections are scored against the ground truth from
:func:`classify_ancestors`.
"""

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import graphs
from .ancestor import DEFAULT_EXPONENT, all_pairs_tests, target_analysis
from .errors import AncestryError
from .svar import DEFAULT_BURN_IN, Innovation, SvarSpec, _companion, simulate, spectral_radius

INSTANTANEOUS = "instantaneous"
LAGGED_DIRECT = "lagged-direct"
LAGGED_INSTANT_START = "lagged-instantaneous-start"
NON_ANCESTOR = "non-ancestor"
CLASSES = (INSTANTANEOUS, LAGGED_DIRECT, LAGGED_INSTANT_START, NON_ANCESTOR)

INNOVATION_POOL = (
    Innovation("t", 7.0),
    Innovation("t", 7.0),
    Innovation("uniform"),
    Innovation("uniform"),
    Innovation("laplace"),
    Innovation("normal"),
)
MAX_RADIUS = 0.95


def _pool(d):
    return [INNOVATION_POOL[i % len(INNOVATION_POOL)] for i in range(d)]


def random_setup(seed, d=6, p=1, edge_prob=0.2, lag_prob=0.1, max_radius=MAX_RADIUS):
    """Random stable model with causal order ``0, ..., d-1``.

    Instantaneous edges ``k -> j`` (``k < j``) appear with probability
    ``edge_prob`` and weights uniform on [0.5, 1]; each row with parents is
    then rescaled so the standard deviation of the instantaneous
    contribution to its reduced-form innovation is uniform on
    [sqrt(0.5), sqrt(2)]. Lag entries are nonzero with probability
    ``lag_prob``, magnitude uniform on [0.2, 0.8] and random sign, and are
    shrunk if the companion spectral radius would exceed ``max_radius``.
    """
    rng = np.random.default_rng(seed)
    B0 = np.zeros((d, d))
    mask = np.tril(rng.random((d, d)) < edge_prob, k=-1)
    B0[mask] = rng.uniform(0.5, 1.0, mask.sum())
    targets = rng.uniform(math.sqrt(0.5), math.sqrt(2.0), d)
    cov = np.zeros((d, d))
    for j in range(d):
        b = B0[j]
        if b.any():
            sd = math.sqrt(b @ cov @ b)
            B0[j] *= targets[j] / sd
        # covariance of xi for rows 0..j: xi_j = B0[j] @ xi + eps_j
        M = np.linalg.inv(np.eye(j + 1) - B0[: j + 1, : j + 1])
        cov[: j + 1, : j + 1] = M @ M.T
    lags = []
    for _ in range(p):
        mask = rng.random((d, d)) < lag_prob
        B = np.zeros((d, d))
        B[mask] = rng.uniform(0.2, 0.8, mask.sum()) * rng.choice([-1.0, 1.0], mask.sum())
        lags.append(B)
    noise = [_pool(d)[i] for i in rng.permutation(d)]
    lags = _shrink(B0, lags, max_radius)
    return SvarSpec((B0, *lags), tuple(noise))


def _radius(B0, lags):
    A = np.eye(B0.shape[0]) - B0
    return spectral_radius(_companion([np.linalg.solve(A, b) for b in lags]))


def _shrink(B0, lags, max_radius):
    if not lags:
        return lags
    rho = _radius(B0, lags)
    if rho <= max_radius:
        return lags
    if len(lags) == 1:
        return [lags[0] * (max_radius / rho)]
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _radius(B0, [b * mid for b in lags]) > max_radius:
            hi = mid
        else:
            lo = mid
    return [b * lo for b in lags]


def instantaneous_contribution_sd(spec):
    """Standard deviation of ``xi_k - eps_k`` for every series (unit innovations)."""
    M = np.linalg.inv(np.eye(spec.d) - spec.B[0]) - np.eye(spec.d)
    return np.sqrt(np.sum(M**2, axis=1))


def _reach(spec, source, target, tau):
    """Reachability in the unrolled graph with slices ``0..tau``.

    Returns ``(lag_start, inst_start)``: whether a directed path from
    ``(0, source)`` to ``(tau, target)`` exists whose first edge is lagged,
    respectively instantaneous.
    """
    p = spec.p
    nz = [b != 0 for b in spec.B]

    def reaches(u0, m0):
        seen = {(u0, m0)}
        stack = [(u0, m0)]
        while stack:
            u, m = stack.pop()
            if (u, m) == (tau, target):
                return True
            for delta in range(0, p + 1):
                if u + delta > tau:
                    break
                for l in np.flatnonzero(nz[delta][:, m]):
                    node = (u + delta, int(l))
                    if node not in seen:
                        seen.add(node)
                        stack.append(node)
        return False

    lag_start = inst_start = False
    for delta in range(1, min(p, tau) + 1):
        for l in np.flatnonzero(nz[delta][:, source]):
            if reaches(delta, int(l)):
                lag_start = True
    for l in np.flatnonzero(nz[0][:, source]):
        if reaches(0, int(l)):
            inst_start = True
    return lag_start, inst_start


@dataclass(frozen=True)
class GroundTruth:
    """Ancestor class of every ``(source, lag)`` for one target."""

    target: int
    labels: dict

    def ancestors(self, lag=None):
        return {k for (k, tau), c in self.labels.items()
                if c != NON_ANCESTOR and (lag is None or tau == lag)}

    def of_class(self, cls):
        return {key for key, c in self.labels.items() if c == cls}

    def is_ancestor(self, source, lag):
        return self.labels[(source, lag)] != NON_ANCESTOR


def classify_ancestors(spec, target, p=None):
    """Label each ``(k, tau)``, ``k != target``, ``tau <= p``.

    ``tau = 0`` ancestors are instantaneous; lagged ancestors are
    ``lagged-direct`` when some path starts with a lagged edge and
    ``lagged-instantaneous-start`` when every path starts instantaneously.
    """
    p = spec.p if p is None else p
    labels = {}
    for tau in range(p + 1):
        for k in range(spec.d):
            if k == target:
                continue
            lag_start, inst_start = _reach(spec, k, target, tau)
            if tau == 0:
                cls = INSTANTANEOUS if inst_start else NON_ANCESTOR
            elif lag_start:
                cls = LAGGED_DIRECT
            elif inst_start:
                cls = LAGGED_INSTANT_START
            else:
                cls = NON_ANCESTOR
            labels[(k, tau)] = cls
    return GroundTruth(target, labels)


def summary_ancestors(spec):
    """Boolean ``[source, target]`` matrix: a path exists across any lags."""
    d = spec.d
    A = np.zeros((d, d), dtype=bool)
    for b in spec.B:
        A |= (b != 0).T
    R = A.copy()
    for m in range(d):
        R |= R[:, [m]] & R[[m], :]
    np.fill_diagonal(R, False)
    return R


def instantaneous_ancestors(spec):
    """Boolean ``[source, target]`` matrix of instantaneous ancestry."""
    d = spec.d
    R = (spec.B[0] != 0).T.copy()
    for m in range(d):
        R |= R[:, [m]] & R[[m], :]
    return R


@dataclass
class BenchConfig:
    d: int = 6
    p: int = 1
    n_runs: int = 200
    T_grid: tuple = (100, 1_000, 10_000, 100_000)
    alpha: float = 0.05
    exponent: float = DEFAULT_EXPONENT
    target: int = 3
    master_seed: int = 0
    burn_in: int = DEFAULT_BURN_IN
    n_jobs: int = None

    def __post_init__(self):
        self.T_grid = tuple(int(T) for T in self.T_grid)
        if self.d < 2:
            raise ValueError("need d >= 2")
        if not 0 <= self.target < self.d:
            raise ValueError(f"target {self.target} outside 0..{self.d - 1}")
        # the largest regression has d(p+1) columns on T-2p-1 rows
        floor = self.d * (self.p + 1) + 2 * self.p + 2
        if min(self.T_grid) < floor:
            raise ValueError(f"T must be at least {floor}")
        if min(self.T_grid) < 10 * self.d * (self.p + 1):
            warnings.warn(f"T below {10 * self.d * (self.p + 1)} gives unreliable asymptotics",
                          stacklevel=2)
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @classmethod
    def full_scale(cls, **kwargs):
        kwargs.setdefault("n_runs", 1000)
        kwargs.setdefault("T_grid", (100, 1_000, 10_000, 100_000, 1_000_000))
        return cls(**kwargs)


def run_seeds(master_seed, run):
    """Independent seed streams for the model draw and the simulation of a run."""
    setup, sim = np.random.SeedSequence([master_seed, run]).spawn(2)
    return setup, sim


def _workers(n_jobs):
    if n_jobs is None:
        n_jobs = int(os.environ.get("ANCESTRY_THREADS", "1"))
    return max(1, n_jobs)


def _map(fn, items, n_jobs):
    n = _workers(n_jobs)
    if n == 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


def _binomial_se(rate, n):
    return math.sqrt(rate * (1 - rate) / n) if n else float("nan")


@dataclass
class SampleSizeReport:
    T: int
    n_runs: int
    n_failed: int
    fwer: float
    fwer_se: float
    detection_rate: dict
    n_tests: dict
    mean_abs_z: dict
    z_values: dict = field(repr=False, default_factory=dict)


@dataclass
class BenchReport:
    config: dict
    results: list

    def at(self, T):
        for r in self.results:
            if r.T == T:
                return r
        raise KeyError(T)

    def to_dict(self, include_z=False):
        rows = []
        for r in self.results:
            row = asdict(r)
            if not include_z:
                row.pop("z_values", None)
            rows.append(row)
        return {"config": self.config, "results": rows}

    def to_json(self, include_z=False, **kwargs):
        return json.dumps(self.to_dict(include_z), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["T", "class", "metric", "value"])
        for r in self.results:
            for name in ("n_runs", "n_failed", "fwer", "fwer_se"):
                w.writerow([r.T, "all", name, getattr(r, name)])
            for metric in ("detection_rate", "n_tests", "mean_abs_z"):
                for cls, value in getattr(r, metric).items():
                    w.writerow([r.T, cls, metric, value])
        return buf.getvalue()


def _single_run(args):
    cfg, run, factory = args
    setup_seed, sim_seed = run_seeds(cfg.master_seed, run)
    spec = (factory or _default_factory(cfg))(setup_seed)
    truth = classify_ancestors(spec, cfg.target, cfg.p)
    series = simulate(spec, max(cfg.T_grid), cfg.burn_in, sim_seed)
    out = []
    for T in cfg.T_grid:
        try:
            res = target_analysis(series.data[:T], cfg.p, cfg.target, cfg.alpha, cfg.exponent)
        except (AncestryError, np.linalg.LinAlgError, FloatingPointError):
            out.append(None)
            continue
        rec = {c: [] for c in CLASSES}
        for t in res.tests:
            cls = truth.labels[(t.source, t.lag)]
            rec[cls].append((t.z, (t.source, t.lag) in res.detected))
        out.append(rec)
    return out


class _default_factory:
    def __init__(self, cfg):
        self.d, self.p = cfg.d, cfg.p

    def __call__(self, seed):
        return random_setup(seed, self.d, self.p)


def run_benchmark(cfg, spec_factory=None):
    """Target-node ancestor detection over ``cfg.n_runs`` random models.

    ``spec_factory(seed) -> SvarSpec`` replaces :func:`random_setup`; it must
    be picklable when running with several workers.
    """
    runs = _map(_single_run, [(cfg, i, spec_factory) for i in range(cfg.n_runs)], cfg.n_jobs)
    results = []
    for ti, T in enumerate(cfg.T_grid):
        ok = [r[ti] for r in runs if r[ti] is not None]
        n = len(ok)
        false_runs = sum(any(det for _, det in r[NON_ANCESTOR]) for r in ok)
        fwer = false_runs / n if n else float("nan")
        det, cnt, mz, zs = {}, {}, {}, {}
        for c in CLASSES:
            pooled = [e for r in ok for e in r[c]]
            cnt[c] = len(pooled)
            det[c] = sum(d for _, d in pooled) / len(pooled) if pooled else float("nan")
            z = [float(v) for v, _ in pooled]
            mz[c] = float(np.mean(np.abs(z))) if z else float("nan")
            zs[c] = z
        results.append(SampleSizeReport(T, n, cfg.n_runs - n, fwer, _binomial_se(fwer, n),
                                        det, cnt, mz, zs))
    config = {k: v for k, v in asdict(cfg).items() if k != "n_jobs"}
    return BenchReport(config, results)


@dataclass
class GraphSampleSizeReport:
    T: int
    n_runs: int
    n_failed: int
    instantaneous_fwer: float
    instantaneous_detection: float
    instantaneous_acyclic: float
    instantaneous_violations: float
    summary_fwer: float
    summary_detection: float
    closure_recovery: float
    n_instant_start: int


@dataclass
class GraphBenchReport:
    config: dict
    results: list

    def at(self, T):
        for r in self.results:
            if r.T == T:
                return r
        raise KeyError(T)

    def to_dict(self):
        return {"config": self.config, "results": [asdict(r) for r in self.results]}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["T", "class", "metric", "value"])
        for r in self.results:
            for name, value in asdict(r).items():
                if name != "T":
                    w.writerow([r.T, "graph", name, value])
        return buf.getvalue()


def _graph_run(args):
    cfg, run, factory = args
    setup_seed, sim_seed = run_seeds(cfg.master_seed, run)
    spec = (factory or _default_factory(cfg))(setup_seed)
    inst_truth = instantaneous_ancestors(spec)
    sum_truth = summary_ancestors(spec)
    hard = set()
    for j in range(spec.d):
        for k, tau in classify_ancestors(spec, j, cfg.p).of_class(LAGGED_INSTANT_START):
            hard.add((k, j))
    series = simulate(spec, max(cfg.T_grid), cfg.burn_in, sim_seed)
    off = ~np.eye(spec.d, dtype=bool)
    out = []
    for T in cfg.T_grid:
        try:
            tests = all_pairs_tests(series.data[:T], cfg.p, cfg.exponent)
        except (AncestryError, np.linalg.LinAlgError, FloatingPointError):
            out.append(None)
            continue
        gi = graphs.instantaneous_graph_from_pvalues(tests.lag(0), cfg.alpha)
        gs = graphs.summary_graph_from_pvalues(tests, cfg.alpha)
        Ai, As = gi.adjacency(), gs.adjacency()
        out.append({
            "inst_false": bool(np.any(Ai & ~inst_truth & off)),
            "inst_found": int(np.sum(Ai & inst_truth)),
            "inst_total": int(np.sum(inst_truth)),
            "acyclic": gi.is_acyclic(),
            "violation": gi.violation_alpha is not None,
            "sum_false": bool(np.any(As & ~sum_truth & off)),
            "sum_found": int(np.sum(As & sum_truth)),
            "sum_total": int(np.sum(sum_truth)),
            "hard_found": sum(gs.has_edge(k, j) for k, j in hard),
            "hard_total": len(hard),
        })
    return out


def _ratio(a, b):
    return a / b if b else float("nan")


def run_graph_benchmark(cfg, spec_factory=None):
    """Score the instantaneous and summary graphs against the ground truth."""
    runs = _map(_graph_run, [(cfg, i, spec_factory) for i in range(cfg.n_runs)], cfg.n_jobs)
    results = []
    for ti, T in enumerate(cfg.T_grid):
        ok = [r[ti] for r in runs if r[ti] is not None]
        n = len(ok)

        def total(key):
            return sum(r[key] for r in ok)

        results.append(GraphSampleSizeReport(
            T=T,
            n_runs=n,
            n_failed=cfg.n_runs - n,
            instantaneous_fwer=_ratio(total("inst_false"), n),
            instantaneous_detection=_ratio(total("inst_found"), total("inst_total")),
            instantaneous_acyclic=_ratio(total("acyclic"), n),
            instantaneous_violations=_ratio(total("violation"), n),
            summary_fwer=_ratio(total("sum_false"), n),
            summary_detection=_ratio(total("sum_found"), total("sum_total")),
            closure_recovery=_ratio(total("hard_found"), total("hard_total")),
            n_instant_start=total("hard_total"),
        ))
    config = {k: v for k, v in asdict(cfg).items() if k != "n_jobs"}
    return GraphBenchReport(config, results)
