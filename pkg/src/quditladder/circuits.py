"""Ideal-unitary gate layer and the named state-preparation and multi-qubit circuits.

Phase conventions:
    SubspaceX(k, t, b)        exp(-i t/2 (cos b X + sin b Y)) on levels (k, k+1)
    TwoPhotonSwap((k,l), t, b) exp(+i t/2 (cos b X + sin b Y)) on span{|k,l>, |k+1,l+1>}
    SubspaceSwap((k,l), t, b)  same form on span{|k+1,l>, |k,l+1>}
so a pi two-photon swap maps |l,l> -> i|l+1,l+1>. Pair kets list the first
target first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDimensionError
from .model import GateKind, GateOp, QuantumState, StateKind, index_of, levels_of, total_dim


# ---------------------------------------------------------------------------
# local matrices

def _rot2(angle: float, phase: float, sign: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, sign * 1j * s * np.exp(-1j * phase)],
                     [sign * 1j * s * np.exp(1j * phase), c]], dtype=complex)


def local_matrix(op: GateOp, dims: Sequence[int]) -> np.ndarray:
    """Matrix on the op's targets, little-endian in target order."""
    op.validate(dims)
    dt = [dims[t] for t in op.targets]
    if op.kind is GateKind.SUBSPACE_X:
        k = op.subspace[0]
        m = np.eye(dt[0], dtype=complex)
        m[k:k + 2, k:k + 2] = _rot2(op.angle, op.phase, -1.0)
        return m
    if op.kind is GateKind.VIRTUAL_Z:
        k = op.subspace[0]
        diag = np.ones(dt[0], dtype=complex)
        diag[k + 1:] = np.exp(1j * op.angle)
        return np.diag(diag)
    if op.kind in (GateKind.TWO_PHOTON_SWAP, GateKind.SUBSPACE_SWAP):
        k, l = op.subspace
        if op.kind is GateKind.TWO_PHOTON_SWAP:
            pair = [(k, l), (k + 1, l + 1)]
        else:
            pair = [(k + 1, l), (k, l + 1)]
        idx = [index_of(p, dt) for p in pair]
        m = np.eye(dt[0] * dt[1], dtype=complex)
        m[np.ix_(idx, idx)] = _rot2(op.angle, op.phase, +1.0)
        return m
    if op.kind is GateKind.CROSS_KERR:
        diag = np.ones(dt[0] * dt[1], dtype=complex)
        diag[index_of((1, 2), dt)] = -1
        return np.diag(diag)
    diag = np.ones(total_dim(dt), dtype=complex)
    for lv, p in op.phases:
        diag[index_of(lv, dt)] *= np.exp(1j * p)
    return np.diag(diag)


def apply_local(data: np.ndarray, mat: np.ndarray, sites: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Left-multiply a vector or column stack by ``mat`` acting on ``sites``."""
    n = len(dims)
    extra = data.shape[1:]
    t = data.reshape(tuple(reversed(dims)) + extra)
    ns = len(sites)
    loc = [dims[s] for s in sites]
    m = mat.reshape(tuple(reversed(loc)) * 2)
    axes = [n - 1 - s for s in reversed(sites)]
    t = np.tensordot(m, t, axes=(list(range(ns, 2 * ns)), axes))
    t = np.moveaxis(t, list(range(ns)), axes)
    return t.reshape(data.shape)


def gate_unitary(op: GateOp, dims: Sequence[int]) -> np.ndarray:
    """Full-space unitary of one gate."""
    D = total_dim(dims)
    return apply_local(np.eye(D, dtype=complex), local_matrix(op, dims), op.targets, dims)


# ---------------------------------------------------------------------------
# circuits

@dataclass(frozen=True)
class Circuit:
    dims: tuple[int, ...]
    ops: tuple[GateOp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            op.validate(self.dims)

    def __len__(self):
        return len(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        if self.dims != other.dims:
            raise InvalidDimensionError("cannot concatenate circuits with different dims")
        return Circuit(self.dims, self.ops + other.ops)

    def append(self, *ops: GateOp) -> "Circuit":
        return Circuit(self.dims, self.ops + tuple(ops))

    def inverse(self) -> "Circuit":
        return Circuit(self.dims, tuple(op.inverse() for op in reversed(self.ops)))

    def count(self, *kinds: GateKind | str) -> int:
        kinds = {GateKind(k) for k in kinds}
        return sum(op.kind in kinds for op in self.ops)

    @property
    def two_photon_count(self) -> int:
        return self.count(GateKind.TWO_PHOTON_SWAP)

    def unitary(self) -> np.ndarray:
        D = total_dim(self.dims)
        u = np.eye(D, dtype=complex)
        for op in self.ops:
            u = apply_local(u, local_matrix(op, self.dims), op.targets, self.dims)
        return u

    def relabel(self, mapping: Sequence[int], dims: Sequence[int]) -> "Circuit":
        """Copy with target ``t`` moved to ``mapping[t]`` inside a chain of ``dims``."""
        ops = []
        for op in self.ops:
            ops.append(GateOp(op.kind, tuple(mapping[t] for t in op.targets), op.subspace, op.angle,
                              op.phase, op.phases))
        return Circuit(tuple(dims), tuple(ops))

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "ops": [op.to_dict() for op in self.ops]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        return cls(tuple(d["dims"]), tuple(GateOp.from_dict(o) for o in d["ops"]))

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_dict(json.loads(s))


def apply_circuit(circuit: Circuit, state: QuantumState) -> QuantumState:
    """Apply the ops in order to a pure state or density matrix."""
    if tuple(state.dims) != circuit.dims:
        raise InvalidDimensionError(f"state dims {state.dims} differ from circuit dims {circuit.dims}")
    data = np.array(state.data, dtype=complex)
    for op in circuit.ops:
        m = local_matrix(op, circuit.dims)
        data = apply_local(data, m, op.targets, circuit.dims)
        if state.kind is StateKind.DENSITY:
            data = apply_local(data.conj().T, m, op.targets, circuit.dims).conj().T
    if state.kind is StateKind.PURE:
        data = data / np.linalg.norm(data)
    else:
        data = 0.5 * (data + data.conj().T)
    return QuantumState(circuit.dims, data)


def X(site: int, k: int, angle: float = math.pi, phase: float = 0.0) -> GateOp:
    return GateOp(GateKind.SUBSPACE_X, (site,), (k,), angle, phase)


def TPS(a: int, b: int, k: int, l: int, angle: float = math.pi, phase: float = 0.0) -> GateOp:
    return GateOp(GateKind.TWO_PHOTON_SWAP, (a, b), (k, l), angle, phase)


def SSW(a: int, b: int, k: int, l: int, angle: float = math.pi, phase: float = 0.0) -> GateOp:
    return GateOp(GateKind.SUBSPACE_SWAP, (a, b), (k, l), angle, phase)


# ---------------------------------------------------------------------------
# single-qudit decomposition

def _subspace_rot(angle: float, phase: float) -> np.ndarray:
    return _rot2(angle, phase, -1.0)


def _two_pulse(w: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Write a 2x2 unitary as R_b1(pi/2) R_b2(pi/2) times a diagonal unitary."""
    v = w / np.sqrt(np.linalg.det(w))
    t = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    s = float(np.angle(v[1, 1])) if abs(v[1, 1]) > 1e-12 else 0.0
    dd = float(np.angle(v[1, 0])) if abs(v[1, 0]) > 1e-12 else 0.0
    a = s + dd
    # Rz(a) Ry(t) Rz(c) = Rz(a+pi) X90 Rz(t+pi) X90 Rz(c) up to phase, and
    # Rz(x) X90 = R_x(pi/2) Rz(x) moves every Z to the right
    b1 = a + math.pi
    b2 = b1 + t + math.pi
    pulses = _subspace_rot(math.pi / 2, b1) @ _subspace_rot(math.pi / 2, b2)
    rest = pulses.conj().T @ w
    return b1, b2, rest


def decompose_su_d(target: np.ndarray, d: int | None = None, tol: float = 1e-10) -> Circuit:
    """Adjacent-level decomposition of a single-qudit unitary.

    Each Givens block becomes two phased pi/2 pulses in its subspace; the
    leftover diagonal is emitted as virtual-Z frame updates applied first.
    Equal to the input up to global phase.
    """
    u = np.array(target, dtype=complex)
    d = u.shape[0] if d is None else int(d)
    if u.shape != (d, d):
        raise InvalidDimensionError("target shape does not match d")
    if np.max(np.abs(u.conj().T @ u - np.eye(d))) > tol:
        raise ValueError("target is not unitary")
    # u = P_1 P_2 ... P_m D with P_j two pulses on levels (k, k+1)
    work = u.copy()
    pulses: list[tuple[int, float, float]] = []
    for col in range(d - 1):
        for r in range(d - 1, col, -1):
            b = work[r, col]
            if abs(b) < 1e-14:
                continue
            a = work[r - 1, col]
            nrm = math.hypot(abs(a), abs(b))
            g = np.array([[a.conjugate(), b.conjugate()], [-b, a]]) / nrm
            b1, b2, rest = _two_pulse(g.conj().T)
            k = r - 1
            # rest is diagonal, so folding it back keeps earlier zeros
            work[k:k + 2, :] = np.diag(np.diag(rest)) @ (g @ work[k:k + 2, :])
            pulses.append((k, b1, b2))
    phases = np.angle(np.diag(work))
    ops: list[GateOp] = []
    for k in range(d - 1):
        dphi = float(phases[k + 1] - phases[k])
        dphi = (dphi + math.pi) % (2 * math.pi) - math.pi
        if abs(dphi) > 1e-12:
            ops.append(GateOp(GateKind.VIRTUAL_Z, (0,), (k,), dphi))
    for k, b1, b2 in reversed(pulses):
        ops.append(X(0, k, math.pi / 2, b2))
        ops.append(X(0, k, math.pi / 2, b1))
    return Circuit((d,), tuple(ops))


def block_count(circuit: Circuit) -> int:
    """Number of two-pulse SU(2) blocks in a decomposition."""
    return circuit.count(GateKind.SUBSPACE_X) // 2


# ---------------------------------------------------------------------------
# named circuits

def bell_angles(d: int) -> list[float]:
    """Two-photon swap angles for the Bell ladder: keep 1/d on each rung."""
    return [2 * math.acos(1 / math.sqrt(d - k)) for k in range(d - 1)]


def bell_prep_circuit(d: int, a: int = 0, b: int = 1, dims: Sequence[int] | None = None) -> Circuit:
    """|00> -> sum_k e^{i phi_k} |kk> / sqrt(d) with d-1 two-photon swaps."""
    if not 2 <= d <= 4:
        raise InvalidDimensionError("Bell preparation supports 2 <= d <= 4")
    dims = (d, d) if dims is None else tuple(dims)
    ops = [TPS(a, b, k, k, th) for k, th in enumerate(bell_angles(d))]
    circ = Circuit(dims, tuple(ops))
    pops = apply_circuit(circ, QuantumState.ground(dims)).probabilities()
    for k in range(d):
        lv = [0] * len(dims)
        lv[a], lv[b] = k, k
        if abs(pops[index_of(lv, dims)] - 1 / d) > 1e-10:
            raise RuntimeError("Bell ladder amplitudes deviate from 1/d")
    return circ


def noon_prep_circuit(d: int = 4) -> Circuit:
    """|00> -> (|N0> + e^{ia}|0N>)/sqrt(2) with N = d-1."""
    if d < 2 or d > 6:
        raise InvalidDimensionError("NOON preparation needs 2 <= d <= 6")
    ops = [TPS(0, 1, 0, 0, math.pi / 2)]
    # qudit 0: 0 -> d-1 and 1 -> 0 ; qudit 1: 1 -> d-1, 0 stays
    ops += [X(0, k) for k in range(d - 1)]
    ops += [X(1, k) for k in range(1, d - 1)]
    return Circuit((d, d), tuple(ops))


def _correction_for(u: np.ndarray, target_diag: np.ndarray, dims: Sequence[int], levels: int = 2) -> GateOp | None:
    """Diagonal phase correction that zeroes residual phases on the computational subspace."""
    idx = computational_indices(dims, levels)
    entries = []
    for i, t in zip(idx, target_diag):
        ph = float(np.angle(u[i, i] / t))
        if abs(ph) > 1e-12:
            entries.append((levels_of(i, dims), -ph))
    if not entries:
        return None
    return GateOp(GateKind.PHASE_CORRECTION, tuple(range(len(dims))), phases=tuple(entries))


def ccz_circuit() -> Circuit:
    """CCZ on qubits encoded in three qutrits (sites 0, 1, 2 = Q1, Q2, Q3)."""
    dims = (3, 3, 3)
    ops = (TPS(1, 2, 1, 1, math.pi),
           GateOp(GateKind.CROSS_KERR, (0, 1)),
           TPS(1, 2, 1, 1, -math.pi))
    circ = Circuit(dims, ops)
    corr = _correction_for(circ.unitary(), canonical_ccz_diag(3), dims)
    return circ.append(corr) if corr is not None else circ


def cccz_circuit() -> Circuit:
    """Four-qubit controlled phase flagging |Q4 Q3 Q2 Q1> = |1110> (sites 0..3 = Q1..Q4)."""
    dims = (3, 3, 3, 3)
    shelve = [TPS(0, 1, 0, 1, math.pi),  # |0>_Q1|1>_Q2 -> |1>|2>
              SSW(1, 2, 1, 1, math.pi)]  # |2>_Q2|1>_Q3 -> |1>|2>
    ops = tuple(shelve) + (GateOp(GateKind.CROSS_KERR, (3, 2)),) + tuple(op.inverse() for op in reversed(shelve))
    circ = Circuit(dims, ops)
    corr = _correction_for(circ.unitary(), cccz_target_diag(), dims)
    return circ.append(corr) if corr is not None else circ


def canonical_ccz_diag(n: int = 3) -> np.ndarray:
    """Diagonal of the n-qubit controlled-Z (minus sign on all-ones)."""
    diag = np.ones(2 ** n, dtype=complex)
    diag[-1] = -1
    return diag


def cccz_target_diag() -> np.ndarray:
    diag = np.ones(16, dtype=complex)
    diag[index_of((0, 1, 1, 1), (2, 2, 2, 2))] = -1
    return diag


def computational_indices(dims: Sequence[int], levels: int = 2) -> list[int]:
    """Flat indices of states with every qudit below ``levels``, in qubit index order."""
    n = len(dims)
    out = []
    for j in range(levels ** n):
        lv = levels_of(j, [levels] * n)
        out.append(index_of(lv, dims))
    return out


def restricted_unitary(u: np.ndarray, dims: Sequence[int], levels: int = 2) -> np.ndarray:
    idx = computational_indices(dims, levels)
    return u[np.ix_(idx, idx)]


def leakage(circuit: Circuit, levels: int = 2) -> float:
    """Largest population left outside the computational subspace over basis inputs."""
    u = circuit.unitary()
    idx = computational_indices(circuit.dims, levels)
    sub = u[:, idx]
    inside = np.sum(np.abs(sub[idx, :]) ** 2, axis=0)
    return float(np.max(1 - inside))


def hadamard_op(site: int) -> list[GateOp]:
    """Qubit Hadamard in the 0-1 subspace up to global phase: Ry(pi/2) then Rx(pi)."""
    return [X(site, 0, math.pi / 2, math.pi / 2), X(site, 0, math.pi, 0.0)]


def truth_table(circuit: Circuit, target: int, levels: int = 2) -> np.ndarray:
    """P(output | input) on the computational subspace with the target sandwiched by Hadamards."""
    h = Circuit(circuit.dims, tuple(hadamard_op(target)))
    full = h + circuit + h
    sub = restricted_unitary(full.unitary(), circuit.dims, levels)
    return np.abs(sub) ** 2


def ghz_target(n: int, d: int) -> np.ndarray:
    D = d ** n
    v = np.zeros(D, dtype=complex)
    for k in range(d):
        v[index_of([k] * n, [d] * n)] = 1 / math.sqrt(d)
    return v


def bell_target(d: int) -> np.ndarray:
    return ghz_target(2, d)


def noon_target(d: int = 4, alpha: float = 0.0) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[index_of((d - 1, 0), (d, d))] = 1 / math.sqrt(2)
    v[index_of((0, d - 1), (d, d))] = np.exp(1j * alpha) / math.sqrt(2)
    return v


def branch_fidelity(psi: np.ndarray, branches: Iterable[int]) -> float:
    """Fidelity to the equal-weight superposition of ``branches``, maximized over branch phases."""
    branches = list(branches)
    amp = sum(abs(psi[i]) for i in branches)
    return float(amp ** 2 / len(branches))


def embed_state(vec: np.ndarray, small: Sequence[int], big: Sequence[int]) -> np.ndarray:
    """Embed a state on ``small`` dims into larger per-site dims."""
    out = np.zeros(total_dim(big), dtype=complex)
    for i, amp in enumerate(vec):
        if amp != 0:
            out[index_of(levels_of(i, small), big)] = amp
    return out


def all_basis_levels(dims: Sequence[int]):
    return product(*[range(d) for d in reversed(dims)])
