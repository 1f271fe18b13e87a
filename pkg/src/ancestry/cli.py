"""Command line entry point: ``ancestry {test,graph,summary,simulate,bench}``."""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import graphs, linreg, simbench
from .ancestor import DEFAULT_EXPONENT, all_pairs_tests, target_analysis
from .data import ingest_csv, shift_column, write_csv
from .errors import AncestryError
from .svar import SvarSpec, simulate


@dataclass
class RunConfig:
    command: str
    input: str = None
    order: int = 6
    alpha: float = 0.05
    exponent: float = DEFAULT_EXPONENT
    center: bool = False
    target: str = None
    shift_col: str = None
    out: str = "."
    seed: int = 0
    rank_tol: float = linreg.RANK_TOL

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("--order must be nonnegative")
        if not 0 < self.alpha < 1:
            raise ValueError("--alpha must lie in (0, 1)")
        if not self.exponent > 1:
            raise ValueError("--exponent must exceed 1")


def _fmt(p):
    return f"{p:.2e}"


def _node(series_names, value):
    if value in series_names:
        return series_names.index(value)
    try:
        idx = int(value) - 1
    except ValueError:
        raise ValueError(f"unknown series {value!r}; have {list(series_names)}") from None
    if not 0 <= idx < len(series_names):
        raise ValueError(f"series index {value} outside 1..{len(series_names)}")
    return idx


def _load(cfg):
    series = ingest_csv(cfg.input)
    if cfg.shift_col:
        series = shift_column(series, cfg.shift_col)
    return series


def _write_json(out, name, obj):
    path = Path(out) / name
    path.write_text(json.dumps(obj, indent=2) + "\n")
    return path


def _tests(cfg, series):
    x = series.centered() if cfg.center else series
    return all_pairs_tests(x, cfg.order, cfg.exponent, rank_tol=cfg.rank_tol)


def cmd_test(cfg):
    series = _load(cfg)
    if cfg.target is None:
        raise ValueError("test needs --target")
    j = _node(series.names, cfg.target)
    x = series.centered() if cfg.center else series
    res = target_analysis(x, cfg.order, j, cfg.alpha, cfg.exponent, rank_tol=cfg.rank_tol)
    rows = []
    for t, c in zip(res.tests, res.corrected):
        row = t.to_dict()
        row.update(source=series.names[t.source], corrected_p=float(c),
                   detected=bool(c <= cfg.alpha))
        rows.append(row)
        flag = "*" if c <= cfg.alpha else " "
        print(f"{flag} {series.names[t.source]:>12} -> {series.names[j]} lag {t.lag}: "
              f"z={t.z:8.3f} p={_fmt(t.p_value)} holm={_fmt(c)}")
    _write_json(cfg.out, "results.json", {
        "command": "test", "target": series.names[j], "order": cfg.order,
        "alpha": cfg.alpha, "T": series.T, "tests": rows,
    })


def _graph_command(cfg, scope):
    series = _load(cfg)
    tests = _tests(cfg, series)
    if scope == graphs.INSTANTANEOUS:
        g = graphs.instantaneous_graph_from_pvalues(tests.lag(0), cfg.alpha, series.names)
        raw = tests.lag(0)
    else:
        g = graphs.summary_graph_from_pvalues(tests, cfg.alpha, series.names)
        raw = graphs.summary_pvalues(tests)
    d = series.d
    pairs = []
    for a in range(d):
        for b in range(d):
            if a != b:
                pairs.append({"from": series.names[a], "to": series.names[b],
                              "p": float(raw[a, b]), "corrected_p": float(g.corrected[a, b])})
                print(f"{series.names[a]:>12} -> {series.names[b]:<12} "
                      f"p={_fmt(raw[a, b])} holm={_fmt(g.corrected[a, b])}")
    for _, e in sorted(g.edges.items()):
        print(f"edge {series.names[e.source]} -> {series.names[e.target]} ({e.provenance})")
    if g.violation_alpha is not None:
        print(f"violation alpha {_fmt(g.violation_alpha)}")
    _write_json(cfg.out, "results.json", {
        "command": "graph" if scope == graphs.INSTANTANEOUS else "summary",
        "order": cfg.order, "alpha": cfg.alpha, "T": series.T,
        "tests": tests.to_rows(), "pairs": pairs, "graph": g.to_dict(),
    })
    (Path(cfg.out) / "graph.dot").write_text(g.to_dot())


def cmd_graph(cfg):
    _graph_command(cfg, graphs.INSTANTANEOUS)


def cmd_summary(cfg):
    _graph_command(cfg, graphs.SUMMARY)


def cmd_simulate(args):
    spec = SvarSpec.from_json(Path(args.spec).read_text())
    series = simulate(spec, args.T, args.burn_in, args.seed)
    path = Path(args.out) / "series.csv"
    write_csv(series, path)
    print(path)


def cmd_bench(args):
    kwargs = dict(d=args.d, p=args.order, alpha=args.alpha, exponent=args.exponent,
                  target=args.target - 1, master_seed=args.seed, n_jobs=args.jobs)
    if args.runs is not None:
        kwargs["n_runs"] = args.runs
    if args.T:
        kwargs["T_grid"] = tuple(args.T)
    cfg = simbench.BenchConfig.full_scale(**kwargs) if args.full_scale else simbench.BenchConfig(**kwargs)
    report = (simbench.run_graph_benchmark if args.graphs else simbench.run_benchmark)(cfg)
    out = Path(args.out)
    (out / "results.json").write_text(report.to_json(indent=2) + "\n")
    (out / "bench.csv").write_text(report.to_csv())
    for r in report.results:
        if args.graphs:
            print(f"T={r.T}: instantaneous fwer={r.instantaneous_fwer:.3f} "
                  f"detection={r.instantaneous_detection:.3f}; summary fwer={r.summary_fwer:.3f} "
                  f"detection={r.summary_detection:.3f}")
        else:
            rates = " ".join(f"{c}={v:.3f}" for c, v in r.detection_rate.items())
            print(f"T={r.T}: fwer={r.fwer:.3f} (se {r.fwer_se:.3f}) {rates}")


def _analysis_parser(sub, name, help):
    p = sub.add_parser(name, help=help)
    p.add_argument("input", help="CSV file with a header row of series names")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--exponent", type=float, default=DEFAULT_EXPONENT)
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=False,
                   help="subtract column means before fitting")
    p.add_argument("--target", help="series name or 1-based index")
    p.add_argument("--shift-col", help="pair each row with the next value of this column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank-tol", type=float, default=linreg.RANK_TOL)
    p.add_argument("--out", default=".")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="ancestry", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _analysis_parser(sub, "test", "ancestor tests for one target series")
    _analysis_parser(sub, "graph", "instantaneous ancestral graph")
    _analysis_parser(sub, "summary", "summary time graph")

    s = sub.add_parser("simulate", help="simulate a model given as JSON")
    s.add_argument("--spec", required=True)
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--burn-in", type=int, default=simbench.DEFAULT_BURN_IN)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=".")

    b = sub.add_parser("bench", help="Monte Carlo benchmark on random models")
    b.add_argument("--runs", type=int)
    b.add_argument("--T", type=int, nargs="+")
    b.add_argument("--d", type=int, default=6)
    b.add_argument("--order", type=int, default=1)
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--exponent", type=float, default=DEFAULT_EXPONENT)
    b.add_argument("--target", type=int, default=4, help="1-based target series")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, help="worker processes (default: $ANCESTRY_THREADS or 1)")
    b.add_argument("--graphs", action="store_true", help="score full graphs instead of one target")
    b.add_argument("--full-scale", action="store_true", help="1000 runs up to T = 10^6")
    b.add_argument("--out", default=".")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            cmd_simulate(args)
        elif args.command == "bench":
            cmd_bench(args)
        else:
            cfg = RunConfig(args.command, args.input, args.order, args.alpha, args.exponent,
                            args.center, args.target, args.shift_col, args.out, args.seed,
                            args.rank_tol)
            {"test": cmd_test, "graph": cmd_graph, "summary": cmd_summary}[args.command](cfg)
    except AncestryError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1
    except (OSError, KeyError, ValueError) as exc:
        print(json.dumps({"error": "invalid_input", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
