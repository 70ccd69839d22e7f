"""Domain types and operator constructors.

Site ordering is little-endian: qudit 0 varies fastest, so the flat index of
levels ``(q_0, q_1, ..., q_{n-1})`` is ``sum_i q_i * prod_{j<i} d_j``. Operators
on the full space are ``kron(op_{n-1}, ..., op_0)``. Ditstrings are printed as
``q_{n-1} ... q_1 q_0`` so that index order equals lexicographic order.

All frequencies are angular (rad/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import InvalidDimensionError, QuditError

MAX_DIM = 6
ATOL_STATE = 1e-10


# ---------------------------------------------------------------------------
# index helpers

def total_dim(dims: Sequence[int]) -> int:
    return int(np.prod(dims, dtype=np.int64))


def index_of(levels: Sequence[int], dims: Sequence[int]) -> int:
    """Flat index of per-site levels (site 0 first)."""
    if len(levels) != len(dims):
        raise InvalidDimensionError("levels and dims differ in length")
    idx, stride = 0, 1
    for q, d in zip(levels, dims):
        if not 0 <= q < d:
            raise InvalidDimensionError(f"level {q} out of range for d={d}")
        idx += q * stride
        stride *= d
    return idx


def levels_of(index: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Per-site levels (site 0 first) of a flat index."""
    out = []
    for d in dims:
        out.append(index % d)
        index //= d
    return tuple(out)


def ditstring(index: int, dims: Sequence[int]) -> str:
    """Printed label ``q_{n-1}...q_0``."""
    return "".join(str(q) for q in reversed(levels_of(index, dims)))


def index_of_ditstring(label: str, dims: Sequence[int]) -> int:
    levels = [int(c) for c in reversed(label.strip("|⟩>"))]
    return index_of(levels, dims)


def all_ditstrings(dims: Sequence[int]) -> list[str]:
    return [ditstring(i, dims) for i in range(total_dim(dims))]


# ---------------------------------------------------------------------------
# operators

def annihilation_operator(dim: int) -> np.ndarray:
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def embed_operator(op: np.ndarray, target: int, dims: Sequence[int]) -> np.ndarray:
    """Place a single-site operator on ``target`` with identities elsewhere."""
    op = np.asarray(op)
    if not 0 <= target < len(dims):
        raise InvalidDimensionError(f"target {target} outside chain of {len(dims)}")
    d = dims[target]
    if op.shape != (d, d):
        raise InvalidDimensionError(f"operator shape {op.shape} does not match d={d}")
    factors = [op if i == target else np.eye(di) for i, di in enumerate(dims)]
    return reduce(np.kron, factors[::-1])


def kron_sites(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product with ``ops[0]`` on site 0."""
    return reduce(np.kron, list(ops)[::-1])


# ---------------------------------------------------------------------------
# physical parameters

@dataclass(frozen=True)
class QuditParams:
    dim: int
    freq01: float
    anharmonicity: float
    charging_energy: float | None = None
    josephson_energy: float | None = None

    def __post_init__(self):
        if not 2 <= self.dim <= MAX_DIM:
            raise InvalidDimensionError(f"dim must lie in [2, {MAX_DIM}], got {self.dim}")
        if self.anharmonicity <= 0:
            raise ValueError("anharmonicity must be positive (transmon convention)")
        if self.charging_energy is not None and self.josephson_energy is not None:
            if self.josephson_energy / self.charging_energy <= 50:
                raise ValueError("E_J/E_C must exceed 50")

    def transition_freq(self, k: int) -> float:
        """Angular frequency of the k -> k+1 transition."""
        return self.freq01 - k * self.anharmonicity

    def level_energies(self) -> np.ndarray:
        n = np.arange(self.dim)
        return self.freq01 * n - self.anharmonicity * n * (n - 1) / 2


@dataclass(frozen=True)
class CouplingSpec:
    qudit_a: int
    qudit_b: int
    g01: float
    resonator_freq: float | None = None
    g_ar: float | None = None
    g_br: float | None = None

    def __post_init__(self):
        if self.g01 <= 0:
            raise ValueError("g01 must be positive")
        if self.qudit_a == self.qudit_b:
            raise ValueError("coupling needs two distinct qudits")


@dataclass(frozen=True)
class Chain:
    """Qudits plus pairwise exchange couplings."""
    qudits: tuple[QuditParams, ...]
    couplings: tuple[CouplingSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qudits", tuple(self.qudits))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        n = len(self.qudits)
        for c in self.couplings:
            if not (0 <= c.qudit_a < n and 0 <= c.qudit_b < n):
                raise ValueError("coupling references a qudit outside the chain")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(q.dim for q in self.qudits)

    def with_dims(self, dims: Sequence[int]) -> "Chain":
        qs = [QuditParams(int(d), q.freq01, q.anharmonicity, q.charging_energy, q.josephson_energy)
              for q, d in zip(self.qudits, dims)]
        return Chain(tuple(qs), self.couplings)


@dataclass(frozen=True)
class DriveTone:
    """One microwave tone. ``amp`` is the resonant Rabi rate in the addressed
    subspace ``(level, level+1)``."""
    target: int
    freq: float
    amp: float
    phase: float = 0.0
    ramp_time: float = 100e-9
    hold_time: float = 0.0
    level: int = 0

    def __post_init__(self):
        if self.amp < 0:
            raise ValueError("amp must be non-negative")
        if self.ramp_time < 0 or self.hold_time < 0:
            raise ValueError("ramp_time and hold_time must be non-negative")
        if self.level < 0:
            raise ValueError("level must be non-negative")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))

    @property
    def duration(self) -> float:
        return 2 * self.ramp_time + self.hold_time

    @property
    def ladder_amp(self) -> float:
        """Coefficient of (a + a^dag)/2, i.e. the 0-1 equivalent Rabi rate."""
        return self.amp / math.sqrt(self.level + 1)

    def envelope(self, t):
        """Amplitude at time(s) t: cosine ramp, flat hold, mirrored ramp-down."""
        t = np.asarray(t, dtype=float)
        tr, th = self.ramp_time, self.hold_time
        out = np.zeros_like(t)
        if tr > 0:
            up = (t >= 0) & (t < tr)
            out[up] = 0.5 * (1 - np.cos(np.pi * t[up] / tr))
            down = (t >= tr + th) & (t < 2 * tr + th)
            out[down] = 0.5 * (1 + np.cos(np.pi * (t[down] - tr - th) / tr))
        hold = (t >= tr) & (t < tr + th)
        out[hold] = 1.0
        return self.amp * out


# ---------------------------------------------------------------------------
# states

class StateKind(str, Enum):
    PURE = "pure"
    DENSITY = "density"


@dataclass(frozen=True, eq=False)
class QuantumState:
    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 2 for d in dims):
            raise InvalidDimensionError("every qudit needs d >= 2")
        data = np.array(self.data, dtype=complex)
        D = total_dim(dims)
        if data.shape == (D,):
            if abs(np.vdot(data, data).real - 1) > ATOL_STATE:
                raise QuditError("pure state is not normalized")
        elif data.shape == (D, D):
            if np.max(np.abs(data - data.conj().T)) > ATOL_STATE:
                raise QuditError("density matrix is not Hermitian")
            if abs(np.trace(data).real - 1) > ATOL_STATE:
                raise QuditError("density matrix trace differs from 1")
            if np.linalg.eigvalsh(data).min() < -1e-8:
                raise QuditError("density matrix has negative eigenvalues")
        else:
            raise InvalidDimensionError(f"data shape {data.shape} incompatible with dims {dims}")
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def kind(self) -> StateKind:
        return StateKind.PURE if self.data.ndim == 1 else StateKind.DENSITY

    @property
    def dim(self) -> int:
        return total_dim(self.dims)

    @classmethod
    def basis(cls, dims: Sequence[int], levels: Sequence[int]) -> "QuantumState":
        """Basis state from per-site levels (site 0 first)."""
        v = np.zeros(total_dim(dims), dtype=complex)
        v[index_of(levels, dims)] = 1
        return cls(tuple(dims), v)

    @classmethod
    def from_label(cls, dims: Sequence[int], label: str) -> "QuantumState":
        """Basis state from a printed ditstring ``q_{n-1}...q_0``."""
        v = np.zeros(total_dim(dims), dtype=complex)
        v[index_of_ditstring(label, dims)] = 1
        return cls(tuple(dims), v)

    @classmethod
    def ground(cls, dims: Sequence[int]) -> "QuantumState":
        return cls.basis(dims, [0] * len(dims))

    @classmethod
    def from_vector(cls, dims, vec, normalize: bool = False) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(tuple(dims), vec)

    @classmethod
    def from_density(cls, dims, rho) -> "QuantumState":
        return cls(tuple(dims), np.asarray(rho, dtype=complex))

    def density(self) -> np.ndarray:
        if self.kind is StateKind.PURE:
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)

    def to_density(self) -> "QuantumState":
        return QuantumState(self.dims, self.density())

    def probabilities(self) -> np.ndarray:
        if self.kind is StateKind.PURE:
            return np.abs(self.data) ** 2
        return np.clip(np.diag(self.data).real, 0, None)

    def canonical(self) -> "QuantumState":
        """Pure state with its largest-magnitude amplitude real-positive."""
        if self.kind is not StateKind.PURE:
            return self
        return QuantumState(self.dims, canonical_phase(self.data))

    def purity(self) -> float:
        if self.kind is StateKind.PURE:
            return 1.0
        return float(np.real(np.trace(self.data @ self.data)))


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    i = int(np.argmax(np.abs(vec).round(12)))
    if abs(vec[i]) == 0:
        return vec
    return vec * (abs(vec[i]) / vec[i])


# ---------------------------------------------------------------------------
# gates

class GateKind(str, Enum):
    SUBSPACE_X = "SubspaceX"
    VIRTUAL_Z = "VirtualZ"
    TWO_PHOTON_SWAP = "TwoPhotonSwap"
    SUBSPACE_SWAP = "SubspaceSwap"
    CROSS_KERR = "CrossKerr"
    PHASE_CORRECTION = "PhaseCorrection"


SINGLE_QUDIT_KINDS = {GateKind.SUBSPACE_X, GateKind.VIRTUAL_Z}


@dataclass(frozen=True)
class GateOp:
    """Symbolic circuit element.

    ``subspace`` is ``(k,)`` for single-qudit kinds and ``(k, l)`` for the two
    swap kinds. CrossKerr ignores it. PhaseCorrection carries ``phases`` as a
    tuple of ``(levels_on_targets, phase)`` pairs; unlisted states get no phase.
    """
    kind: GateKind
    targets: tuple[int, ...]
    subspace: tuple[int, ...] = ()
    angle: float = 0.0
    phase: float = 0.0
    phases: tuple[tuple[tuple[int, ...], float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "subspace", tuple(int(s) for s in self.subspace))
        object.__setattr__(self, "phases",
                           tuple((tuple(int(q) for q in lv), float(p)) for lv, p in self.phases))
        n_t = len(self.targets)
        if self.kind in SINGLE_QUDIT_KINDS:
            if n_t != 1 or len(self.subspace) != 1:
                raise ValueError(f"{self.kind.value} needs one target and one subspace index")
        elif self.kind in (GateKind.TWO_PHOTON_SWAP, GateKind.SUBSPACE_SWAP):
            if n_t != 2 or len(self.subspace) != 2:
                raise ValueError(f"{self.kind.value} needs two targets and subspace (k, l)")
        elif self.kind is GateKind.CROSS_KERR:
            if n_t != 2:
                raise ValueError("CrossKerr needs exactly two targets")
        else:
            if n_t < 1 or any(len(lv) != n_t for lv, _ in self.phases):
                raise ValueError("PhaseCorrection phases must list one level per target")
        if len(set(self.targets)) != n_t:
            raise ValueError("targets must be distinct")

    def validate(self, dims: Sequence[int]) -> None:
        for t in self.targets:
            if not 0 <= t < len(dims):
                raise InvalidDimensionError(f"target {t} outside chain of {len(dims)}")
        dt = [dims[t] for t in self.targets]
        k = self.subspace
        if self.kind in SINGLE_QUDIT_KINDS:
            if not 0 <= k[0] < dt[0] - 1:
                raise InvalidDimensionError(f"subspace {k[0]} invalid for d={dt[0]}")
        elif self.kind is GateKind.TWO_PHOTON_SWAP:
            if not (0 <= k[0] < dt[0] - 1 and 0 <= k[1] < dt[1] - 1):
                raise InvalidDimensionError(f"subspace {k} invalid for dims {dt}")
        elif self.kind is GateKind.SUBSPACE_SWAP:
            if not (0 <= k[0] < dt[0] - 1 and 0 <= k[1] < dt[1] - 1):
                raise InvalidDimensionError(f"subspace {k} invalid for dims {dt}")
        elif self.kind is GateKind.CROSS_KERR:
            if dt[0] < 2 or dt[1] < 3:
                raise InvalidDimensionError("CrossKerr needs level 2 on its second target")
        else:
            for lv, _ in self.phases:
                if any(not 0 <= q < d for q, d in zip(lv, dt)):
                    raise InvalidDimensionError(f"phase entry {lv} invalid for dims {dt}")

    def inverse(self) -> "GateOp":
        if self.kind in (GateKind.CROSS_KERR,):
            return self
        if self.kind is GateKind.PHASE_CORRECTION:
            return GateOp(self.kind, self.targets, phases=tuple((lv, -p) for lv, p in self.phases))
        return GateOp(self.kind, self.targets, self.subspace, -self.angle, self.phase)

    def to_dict(self) -> dict:
        if self.kind is GateKind.PHASE_CORRECTION:
            return {"kind": self.kind.value, "targets": list(self.targets),
                    "subspace": [list(lv) for lv, _ in self.phases],
                    "angle": 0.0, "phase": [p for _, p in self.phases]}
        return {"kind": self.kind.value, "targets": list(self.targets),
                "subspace": list(self.subspace), "angle": float(self.angle),
                "phase": float(self.phase)}

    @classmethod
    def from_dict(cls, d: dict) -> "GateOp":
        kind = GateKind(d["kind"])
        if kind is GateKind.PHASE_CORRECTION:
            return cls(kind, tuple(d["targets"]),
                       phases=tuple((tuple(lv), float(p)) for lv, p in zip(d["subspace"], d["phase"])))
        return cls(kind, tuple(d["targets"]), tuple(d.get("subspace", ())),
                   float(d.get("angle", 0.0)), float(d.get("phase", 0.0)))


# ---------------------------------------------------------------------------
# analytic bookkeeping types

@dataclass(frozen=True)
class DressedAngles:
    theta_1: float
    theta_2: float
    delta_1: float
    delta_2: float
    omega_1: float
    omega_2: float

    @classmethod
    def from_drives(cls, delta_1, omega_1, delta_2, omega_2) -> "DressedAngles":
        from .analytics import mixing_angle
        c1, s1 = mixing_angle(delta_1, omega_1)
        c2, s2 = mixing_angle(delta_2, omega_2)
        return cls(math.atan2(s1, c1), math.atan2(s2, c2), delta_1, delta_2, omega_1, omega_2)

    @property
    def cos_1(self) -> float:
        return math.cos(self.theta_1)

    @property
    def cos_2(self) -> float:
        return math.cos(self.theta_2)


@dataclass(frozen=True)
class InteractionRates:
    j_i: float
    j_q: float
    j_zz: float
    omega_2p: float
