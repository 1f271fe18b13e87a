"""
Summary graph on the Old Faithful eruptions
===========================================

Each waiting time is paired with the duration of the eruption before it,
so the duration should be an instantaneous ancestor of the waiting time.
The lag p-values of every pair are combined into one summary p-value.
"""

from pathlib import Path

from ancestry import all_pairs_tests, ingest_csv, shift_column
from ancestry.graphs import instantaneous_graph_from_pvalues, summary_graph_from_pvalues, summary_pvalues

path = Path(__file__).resolve().parents[1] / "tests" / "data" / "geyser.csv"
series = shift_column(ingest_csv(path), "waiting")
print(series.T, "paired eruptions")

tests = all_pairs_tests(series, p=6)
raw = tests.lag(0)
print(f"duration -> waiting, lag 0: p = {raw[1, 0]:.1e}")
print(f"waiting -> duration, lag 0: p = {raw[0, 1]:.2f}")

summary = summary_pvalues(tests)
print(f"summary p-values: {summary[1, 0]:.1e} and {summary[0, 1]:.2f}")

for g in (instantaneous_graph_from_pvalues(raw, 0.05, series.names),
          summary_graph_from_pvalues(tests, 0.05, series.names)):
    print(g.scope, g.to_json())
