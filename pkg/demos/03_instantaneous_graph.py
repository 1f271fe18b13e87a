"""
Instantaneous ancestral graphs
==============================

Detected edges are closed transitively. When detections form a cycle, the
level on the cycle edges is lowered until the cycle disappears.
"""

import numpy as np

from ancestry import Innovation, SvarSpec, graph_from_corrected, instantaneous_graph, simulate

# corrected p-values of a four-node example with the loop 1 -> 2 -> 3 -> 1
corrected = np.ones((4, 4))
for (a, b), p in {(0, 1): 1e-3, (1, 3): 1e-2, (2, 0): 1e-2, (1, 2): 1e-4}.items():
    corrected[a, b] = p
g = graph_from_corrected(corrected, alpha=0.05, names=("x1", "x2", "x3", "x4"))
print("violation alpha:", g.violation_alpha)
for (a, b), e in sorted(g.edges.items()):
    print(f"{g.names[a]} -> {g.names[b]}  p={e.p_value:.0e}  {e.provenance}")
print(g.to_dot())

# the same pipeline on simulated data
B0 = np.zeros((4, 4))
B0[1, 0], B0[2, 1], B0[3, 0] = 0.9, 0.7, 0.6
spec = SvarSpec((B0, 0.3 * np.eye(4)), (Innovation("uniform"), Innovation("laplace"),
                                         Innovation("t", 7.0), Innovation("uniform")))
g = instantaneous_graph(simulate(spec, 50_000, seed=0).data, p=1)
print(sorted(g.edge_set), "acyclic:", g.is_acyclic())
