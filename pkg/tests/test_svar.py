import math

import numpy as np
import pytest

from ancestry.errors import InvalidModel, UnstableModel
from ancestry.svar import (
    Innovation,
    SvarSpec,
    TimeSeries,
    companion_matrix,
    is_stable,
    reduced_form,
    simulate,
)


def ar1(coef, d=1):
    return SvarSpec((np.zeros((d, d)), coef * np.eye(d)))


def test_reduced_form_without_instantaneous_effects(rng):
    B1, B2 = rng.standard_normal((2, 3, 3))
    spec = SvarSpec((np.zeros((3, 3)), B1, B2))
    lags = reduced_form(spec)
    np.testing.assert_array_equal(lags[0], B1)
    np.testing.assert_array_equal(lags[1], B2)


def test_reduced_form_two_by_two():
    spec = SvarSpec(([[0, 0], [0.5, 0]], np.eye(2)))
    # (I - B0)^{-1} = [[1, 0], [0.5, 1]] by hand
    np.testing.assert_allclose(reduced_form(spec)[0], [[1, 0], [0.5, 1]], atol=1e-15)


def test_reduced_form_residual_check(rng):
    B0 = np.tril(rng.uniform(-1, 1, (5, 5)), k=-1)
    B1 = rng.standard_normal((5, 5))
    (lag,) = reduced_form(SvarSpec((B0, B1)))
    np.testing.assert_allclose((np.eye(5) - B0) @ lag, B1, atol=1e-10)


def test_companion_layout():
    np.testing.assert_array_equal(companion_matrix(ar1(0.5)), [[0.5]])
    spec = SvarSpec(([[0.0]], [[0.5]], [[0.3]]))
    C = companion_matrix(spec)
    np.testing.assert_array_equal(C, [[0.5, 0.3], [1.0, 0.0]])
    # roots of lambda^2 - 0.5 lambda - 0.3
    disc = math.sqrt(0.25 + 1.2)
    expected = sorted([(0.5 + disc) / 2, (0.5 - disc) / 2])
    np.testing.assert_allclose(sorted(np.linalg.eigvals(C).real), expected, atol=1e-12)
    assert expected[1] == pytest.approx(0.85208, abs=1e-5)
    stable, radius = is_stable(spec)
    assert stable and radius == pytest.approx(expected[1], abs=1e-6)


def test_companion_block_structure(rng):
    lags = rng.standard_normal((3, 2, 2))
    C = companion_matrix(SvarSpec((np.zeros((2, 2)), *lags)))
    np.testing.assert_array_equal(C[:2], np.hstack(lags))
    np.testing.assert_array_equal(C[2:4, :2], np.eye(2))
    np.testing.assert_array_equal(C[4:6, 2:4], np.eye(2))
    assert not C[2:4, 2:].any() and not C[4:6, :2].any() and not C[4:6, 4:].any()


def test_stability_examples():
    assert is_stable(ar1(0.95, d=2)) == (True, pytest.approx(0.95))
    stable, radius = is_stable(ar1(1.0, d=2))
    assert not stable and radius == pytest.approx(1.0)
    assert is_stable(SvarSpec((np.zeros((2, 2)),))) == (True, 0.0)
    with pytest.raises(ValueError):
        companion_matrix(SvarSpec((np.zeros((2, 2)),)))


def test_stability_agrees_with_determinant_on_unit_circle(rng):
    for _ in range(20):
        d, p = 2, 2
        lags = rng.uniform(-0.8, 0.8, (p, d, d))
        spec = SvarSpec((np.zeros((d, d)), *lags))
        stable, radius = is_stable(spec)
        C = companion_matrix(spec)
        # det(I - C s) is nonzero on every circle |s| = r <= 1 iff stable
        circle = np.exp(2j * np.pi * np.arange(360) / 360)
        min_det = min(abs(np.linalg.det(np.eye(d * p) - C * r * s))
                      for r in np.linspace(0.05, 1, 20) for s in circle)
        if stable:
            assert min_det > 1e-6 * (1 - radius)
        else:
            lam = np.linalg.eigvals(C)
            big = lam[np.argmax(np.abs(lam))]
            assert abs(np.linalg.det(np.eye(d * p) - C / big)) < 1e-8
        assert radius == pytest.approx(np.max(np.abs(np.linalg.eigvals(C))))


def test_cyclic_instantaneous_effects_rejected():
    with pytest.raises(InvalidModel):
        SvarSpec(([[0, 1], [1, 0]],))
    with pytest.raises(InvalidModel):
        SvarSpec(([[0.5, 0], [0, 0]],))


def test_permuted_triangular_accepted():
    spec = SvarSpec(([[0, 0.7, 0], [0, 0, 0], [0.3, 0, 0]],))
    order = spec.causal_order
    assert order.index(1) < order.index(0) < order.index(2)


@pytest.mark.parametrize("inn", [
    Innovation("normal"), Innovation("uniform"), Innovation("laplace"), Innovation("t", 7.0),
])
def test_innovations_unit_variance(inn):
    assert inn.mean == 0.0 and inn.variance == 1.0
    draws = inn.sample(np.random.default_rng(1), 400_000)
    assert abs(draws.mean()) < 0.01
    assert draws.var() == pytest.approx(1.0, abs=0.02)


def test_invalid_innovation():
    with pytest.raises(InvalidModel):
        Innovation("t", 2.0)
    with pytest.raises(InvalidModel):
        Innovation("cauchy")


def test_white_noise_simulation():
    T = 5000
    x = simulate(SvarSpec((np.zeros((2, 2)), np.zeros((2, 2)))), T, seed=3).data
    for col in x.T:
        r1 = np.corrcoef(col[1:], col[:-1])[0, 1]
        assert abs(r1) < 3 / math.sqrt(T)


def test_ar1_moments():
    x = simulate(ar1(0.5), 100_000, seed=11).data[:, 0]
    assert np.corrcoef(x[1:], x[:-1])[0, 1] == pytest.approx(0.5, abs=0.02)
    assert x.var() == pytest.approx(1 / (1 - 0.25), abs=0.05)


def test_simulation_deterministic():
    spec = SvarSpec(([[0, 0], [0.8, 0]], [[0.3, 0.1], [0, 0.4]]),
                    (Innovation("t", 7.0), Innovation("uniform")))
    a = simulate(spec, 500, burn_in=100, seed=42)
    b = simulate(spec, 500, burn_in=100, seed=42)
    assert a.data.tobytes() == b.data.tobytes()
    assert simulate(spec, 500, burn_in=100, seed=43).data.tobytes() != a.data.tobytes()


def test_simulate_matches_structural_recursion():
    spec = SvarSpec(([[0, 0], [0.8, 0]], [[0.3, 0.1], [-0.2, 0.4]]))
    x = simulate(spec, 50, burn_in=0, seed=5).data
    rng = np.random.default_rng(5)
    eps = np.column_stack([rng.standard_normal(50), rng.standard_normal(50)])
    # structural form: x_t = B0 x_t + B1 x_{t-1} + eps_t
    for t in range(1, 50):
        rhs = spec.B[0] @ x[t] + spec.B[1] @ x[t - 1] + eps[t]
        np.testing.assert_allclose(x[t], rhs, atol=1e-12)


def test_unstable_simulation_refused():
    with pytest.raises(UnstableModel):
        simulate(ar1(1.0), 10)


def test_no_drift_for_stable_specs():
    spec = SvarSpec(([[0, 0], [0.6, 0]], [[0.9, 0.0], [0.2, 0.5]]))
    ok = 0
    for seed in range(100):
        x = simulate(spec, 10_000, seed=seed).data
        ok += np.all(x[5000:].var(axis=0) <= 2 * x[:5000].var(axis=0))
    assert ok >= 95


def test_spec_json_roundtrip():
    spec = SvarSpec(([[0, 0], [0.8, 0]], [[0.3, 0.1], [0, 0.4]]),
                    (Innovation("t", 7.0), Innovation("laplace")))
    back = SvarSpec.from_json(spec.to_json())
    assert back.noise == spec.noise
    for a, b in zip(back.B, spec.B):
        np.testing.assert_array_equal(a, b)
    assert spec.to_dict()["B"][0] == [[0, 0], [0.8, 0]]


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries([[1.0, np.nan]])
    ts = TimeSeries([[1.0, 2.0], [3.0, 4.0]], ("a", "b"))
    assert ts.T == 2 and ts.d == 2 and ts.names == ("a", "b")
