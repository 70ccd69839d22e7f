import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditladder.circuits import canonical_ccz_diag
from quditladder.errors import UndefinedFidelityError, UnfittableError
from quditladder.xeb import (XebRun, average_gate_fidelity, fit_decay, haar_layer, linear_cross_entropy,
                             process_fidelity, simulate_xeb, xeb_fidelity)

CCZ = np.diag(canonical_ccz_diag(3))
DEPTHS = [1, 2, 4, 8, 16]


def _random_dist(rng, n):
    p = rng.exponential(size=n)
    return p / p.sum()


def test_linear_cross_entropy_cases(rng):
    q = _random_dist(rng, 8)
    assert linear_cross_entropy(np.full(8, 1 / 8), q) == pytest.approx(1 / 8)
    assert linear_cross_entropy([0, 1, 0], [0, 1, 0]) == 1
    assert linear_cross_entropy([0.5, 0.5, 0, 0], [0.25] * 4) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        linear_cross_entropy([1, 0], [1, 0, 0])


def test_xeb_fidelity_cases(rng):
    p = _random_dist(rng, 16)
    u = np.full(16, 1 / 16)
    assert xeb_fidelity(p, p) == pytest.approx(1, abs=1e-12)
    assert xeb_fidelity(p, u) == pytest.approx(0, abs=1e-12)
    assert xeb_fidelity(p, 0.6 * p + 0.4 * u) == pytest.approx(0.6, abs=1e-12)
    with pytest.raises(UndefinedFidelityError):
        xeb_fidelity(u, p)


@given(st.integers(0, 10 ** 6), st.floats(-2, 3))
def test_xeb_fidelity_affine(seed, alpha):
    rng = np.random.default_rng(seed)
    p, q1, q2 = (_random_dist(rng, 8) for _ in range(3))
    lhs = xeb_fidelity(p, alpha * q1 + (1 - alpha) * q2)
    assert lhs == pytest.approx(alpha * xeb_fidelity(p, q1) + (1 - alpha) * xeb_fidelity(p, q2), abs=1e-9)


def test_fidelity_conversions():
    assert average_gate_fidelity(1.0, 8) == 1.0
    assert average_gate_fidelity(0.0, 8) == pytest.approx(1 / 8)
    assert process_fidelity(0.9, 4) == pytest.approx(0.9 + 0.1 / 16)


def test_fit_recovers_synthetic():
    m = np.array(DEPTHS)
    fit = fit_decay(m, 0.95 * 0.92 ** m)
    assert fit.fidelity == pytest.approx(0.92, rel=5e-3)
    assert fit.amplitude == pytest.approx(0.95, rel=5e-3)
    assert fit.fidelity_err < 1e-12


def test_fit_constant_one():
    fit = fit_decay(DEPTHS, np.ones(5))
    assert fit.fidelity == pytest.approx(1) and fit.amplitude == pytest.approx(1)


def test_fit_noisy_coverage():
    # 3 dof: nominal 3-SE coverage of a t distribution is about 94 %
    m = np.array(DEPTHS)
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        fit = fit_decay(m, 0.95 * 0.92 ** m + 0.01 * rng.standard_normal(5))
        hits += abs(fit.fidelity - 0.92) <= 3 * fit.fidelity_err
    assert hits >= 90


def test_fit_errors():
    with pytest.raises(UnfittableError):
        fit_decay([1, 2, 4], [0.5, -0.1, -0.2])
    with pytest.raises(ValueError):
        fit_decay([1, 2], [0.9, 0.8])
    fit = fit_decay([1, 2, 4, 8], [0.9, 0.81, 0.6561, -0.01])
    assert fit.n_excluded == 1 and fit.fidelity == pytest.approx(0.9)


def test_haar_layer_embedding(rng):
    for u in haar_layer((2, 3), rng):
        assert np.linalg.det(u[:2, :2]) == pytest.approx(1)
        assert np.allclose(u.conj().T @ u, np.eye(len(u)))
    assert haar_layer((3,), rng)[0][2, 2] == 1


def test_noiseless_exact():
    run = simulate_xeb(CCZ, DEPTHS, 5, 0.0, None, seed=1)
    assert np.allclose(run.mean_fidelities(), 1, atol=1e-12)
    assert run.cycle_fidelity == pytest.approx(1)


def test_exact_depolarizing_and_composition():
    r = 0.03
    run = simulate_xeb(CCZ, [1, 2, 4, 8], 4, r, None, seed=2)
    assert np.allclose(run.mean_fidelities(), (1 - r) ** np.array([1, 2, 4, 8]), atol=1e-12)
    F = dict(zip(run.depths, run.mean_fidelities()))
    assert F[4] == pytest.approx(F[2] ** 2) and F[8] == pytest.approx(F[4] ** 2)


def test_sampled_composition():
    run = simulate_xeb(CCZ, [2, 4], 30, 0.05, 100_000, seed=3)
    F = dict(zip(run.depths, run.mean_fidelities()))
    spread = np.std(run.fidelities[1], ddof=1) / math.sqrt(30)
    assert abs(F[4] - F[2] ** 2) < 4 * spread + 1e-3


def test_depolarizing_recovered():
    r = 0.02
    run = simulate_xeb(CCZ, DEPTHS, 30, r, 100_000, seed=0)
    assert abs((1 - run.fit.fidelity) - r) < 0.01 * r


def test_determinism_and_workers():
    a = simulate_xeb(CCZ, [1, 2, 4], 3, 0.05, 1000, seed=9)
    b = simulate_xeb(CCZ, [1, 2, 4], 3, 0.05, 1000, seed=9, workers=3)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "depth,circuit,F"


def test_fit_json_conversion():
    import json
    run = simulate_xeb(CCZ, [1, 2, 4], 3, 0.05, None, seed=4)
    out = json.loads(run.fit_json())
    assert out["cycle_fidelity"] == pytest.approx(0.95)
    assert out["average_gate_fidelity"] == pytest.approx(0.95 + 0.05 / 8)


def test_distributions_valid():
    run = simulate_xeb(CCZ, [1, 3], 4, 0.1, 500, seed=5)
    for group in run.ideal + run.measured:
        for p in group:
            assert p.min() >= 0 and p.sum() == pytest.approx(1, abs=1e-9)
    with pytest.raises(ValueError):
        XebRun((2,), [1], [[np.array([0.7, 0.7])]], [[np.array([0.5, 0.5])]])


def test_input_validation():
    with pytest.raises(ValueError):
        simulate_xeb(CCZ, DEPTHS, 3, 1.5, None)
    with pytest.raises(ValueError):
        simulate_xeb(np.ones((8, 8)), DEPTHS, 3, 0.1, None)
    with pytest.raises(ValueError):
        simulate_xeb(np.eye(9), DEPTHS, 3, 0.1, None)
    run = simulate_xeb(np.eye(9), [1, 2, 4], 2, 0.1, None, dims=(3, 3))
    assert run.dims == (3, 3)
