"""
Simulating a structural VAR
===========================

A three-variable model with an instantaneous chain and a few lagged
effects, driven by non-Gaussian innovations.
"""

import numpy as np

from ancestry import Innovation, SvarSpec, companion_matrix, is_stable, reduced_form, simulate

B0 = np.array([[0.0, 0.0, 0.0],
               [0.8, 0.0, 0.0],
               [0.0, 0.6, 0.0]])
B1 = np.array([[0.4, 0.0, 0.0],
               [0.0, 0.3, 0.2],
               [0.3, 0.0, 0.5]])
spec = SvarSpec((B0, B1), (Innovation("uniform"), Innovation("t", 7.0), Innovation("laplace")))
print("causal order:", spec.causal_order)

# the reduced form folds the instantaneous effects into the lags
print(reduced_form(spec)[0].round(3))

# stability is decided by the companion matrix
stable, radius = is_stable(spec)
print("stable:", stable, "spectral radius:", round(radius, 4))
print(companion_matrix(spec).shape)

series = simulate(spec, 5000, seed=1, names=("a", "b", "c"))
print(series.T, series.d, series.names)
print("sample covariance\n", np.cov(series.data.T).round(2))

# a model that is not stable is refused
try:
    simulate(SvarSpec(([[0.0]], [[1.02]])), 100)
except Exception as exc:
    print(type(exc).__name__, exc)
