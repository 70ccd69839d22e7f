import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditladder.circuits import TPS, X, gate_unitary
from quditladder.errors import InvalidDimensionError, QuditError
from quditladder.model import (Chain, CouplingSpec, DriveTone, GateKind, GateOp, QuantumState, QuditParams,
                               StateKind, all_ditstrings, annihilation_operator, ditstring, embed_operator,
                               index_of, index_of_ditstring, levels_of, number_operator)

from conftest import random_unitary


def test_annihilation_qubit():
    assert np.array_equal(annihilation_operator(2), np.array([[0, 1], [0, 0]]))


def test_annihilation_entries():
    a3 = annihilation_operator(3)
    assert a3[0, 1] == 1 and a3[1, 2] == pytest.approx(math.sqrt(2))
    assert np.count_nonzero(a3) == 2
    assert annihilation_operator(4)[2, 3] == pytest.approx(math.sqrt(3))


def test_number_operator_from_ladder():
    a = annihilation_operator(5)
    assert np.allclose(a.conj().T @ a, number_operator(5))


def test_embed_identity_is_global_identity():
    assert np.array_equal(embed_operator(np.eye(3), 1, [2, 3, 4]), np.eye(24))


def test_embed_ordering_ditstring():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    psi = np.zeros(4)
    psi[index_of_ditstring("00", [2, 2])] = 1
    out = embed_operator(x, 0, [2, 2]) @ psi
    assert ditstring(int(np.argmax(np.abs(out))), [2, 2]) == "01"


def test_embed_annihilates_vacuum_sector():
    dims = [3, 3]
    a1 = embed_operator(annihilation_operator(3), 1, dims)
    for q0 in range(3):
        assert np.allclose(a1[:, index_of([q0, 0], dims)], 0)


def test_index_roundtrip_mixed_dims():
    dims = [2, 3, 4]
    for i in range(24):
        assert index_of(levels_of(i, dims), dims) == i
        assert index_of_ditstring(ditstring(i, dims), dims) == i
    assert all_ditstrings([2, 2]) == ["00", "01", "10", "11"]


def test_index_out_of_range():
    with pytest.raises((ValueError, InvalidDimensionError)):
        index_of([3, 0], [3, 3])


def test_operators_bit_identical():
    assert np.array_equal(embed_operator(annihilation_operator(4), 1, [4, 4, 2]),
                          embed_operator(annihilation_operator(4), 1, [4, 4, 2]))


@given(st.integers(0, 10_000), st.sampled_from([(2, 3), (3, 3), (2, 2, 3), (4, 2)]))
def test_embed_commutes_on_different_sites(seed, dims):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dims[0], dims[0])) + 1j * rng.standard_normal((dims[0], dims[0]))
    b = rng.standard_normal((dims[-1], dims[-1])) + 1j * rng.standard_normal((dims[-1], dims[-1]))
    A, B = embed_operator(a, 0, dims), embed_operator(b, len(dims) - 1, dims)
    assert np.max(np.abs(A @ B - B @ A)) < 1e-12


@given(st.integers(0, 10_000))
def test_gate_unitaries_preserve_norm(seed):
    rng = np.random.default_rng(seed)
    dims = (3, 4)
    psi = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    psi /= np.linalg.norm(psi)
    ops = [X(0, int(rng.integers(2)), rng.uniform(-4, 4), rng.uniform(0, 6)),
           TPS(0, 1, int(rng.integers(2)), int(rng.integers(3)), rng.uniform(-4, 4), rng.uniform(0, 6)),
           GateOp(GateKind.VIRTUAL_Z, (1,), (int(rng.integers(3)),), rng.uniform(-4, 4))]
    for op in ops:
        psi = gate_unitary(op, dims) @ psi
    assert abs(np.linalg.norm(psi) - 1) < 1e-10


def test_quantum_state_validation():
    with pytest.raises(QuditError):
        QuantumState((2,), np.array([1.0, 1.0]))
    with pytest.raises(QuditError):
        QuantumState((2,), np.array([[0.5, 0.3], [0.1, 0.5]]))
    with pytest.raises(QuditError):
        QuantumState((2,), np.diag([1.5, -0.5]))
    with pytest.raises(InvalidDimensionError):
        QuantumState((2, 2), np.ones(3) / math.sqrt(3))


def test_quantum_state_basics(rng):
    s = QuantumState.from_label((2, 3), "21")
    assert s.kind is StateKind.PURE
    assert s.probabilities()[index_of([1, 2], (2, 3))] == 1
    rho = s.to_density()
    assert rho.kind is StateKind.DENSITY and rho.purity() == pytest.approx(1)
    v = random_unitary(4, rng)[:, 0] * 1j
    c = QuantumState((2, 2), v).canonical().data
    k = int(np.argmax(np.abs(c)))
    assert abs(c[k].imag) < 1e-12 and c[k].real > 0
    with pytest.raises(ValueError):
        s.data[0] = 2


def test_params_and_tone():
    q = QuditParams(4, 2 * np.pi * 5.3e9, 2 * np.pi * 270e6)
    assert q.transition_freq(2) == pytest.approx(2 * np.pi * (5.3e9 - 540e6))
    assert np.allclose(np.diff(q.level_energies()), [q.transition_freq(k) for k in range(3)])
    with pytest.raises(InvalidDimensionError):
        QuditParams(1, 1.0, 1.0)
    with pytest.raises(ValueError):
        CouplingSpec(0, 0, 1.0)
    with pytest.raises(ValueError):
        Chain((q,), (CouplingSpec(0, 1, 1.0),))
    tone = DriveTone(0, 1.0, 2.0, ramp_time=10.0, hold_time=5.0, level=3)
    assert tone.duration == 25.0 and tone.ladder_amp == pytest.approx(1.0)
    env = tone.envelope(np.array([0.0, 5.0, 12.0, 20.0, 25.0]))
    assert np.allclose(env, [0.0, 1.0, 2.0, 1.0, 0.0])


def test_gateop_json_roundtrip():
    ops = [X(0, 1, 1.2, 0.3), TPS(0, 1, 1, 0, 2.0),
           GateOp(GateKind.CROSS_KERR, (0, 1)),
           GateOp(GateKind.PHASE_CORRECTION, (0, 1), phases=(((1, 1), 0.5), ((0, 2), -1.0)))]
    for op in ops:
        assert GateOp.from_dict(op.to_dict()) == op
    with pytest.raises(ValueError):
        GateOp(GateKind.SUBSPACE_X, (0, 1), (0,))
    with pytest.raises(InvalidDimensionError):
        X(0, 2).validate((3,))
