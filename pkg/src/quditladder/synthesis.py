"""Graph-search synthesis over unparameterized qudit states.

Nodes are equal-weight superpositions of basis states whose relative phases
are powers of i. Edges are pi subspace rotations and pi two-photon swaps, both
of which are monomial maps, so a node is just a set of (index, phase) pairs.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuits import TPS, X, Circuit, apply_circuit, bell_prep_circuit, gate_unitary
from .errors import InvalidDimensionError, NotSynthesizableError, SearchExhaustedError
from .model import GateKind, GateOp, QuantumState, ditstring, index_of, total_dim

DEFAULT_MAX_NODES = 5_000_000
TWO_QUDIT_COST = 100
SINGLE_QUDIT_COST = 1
_PHASES = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True)
class SearchState:
    """Uniform-magnitude state; ``amps`` holds (index, k) pairs meaning phase i^k."""
    dims: tuple[int, ...]
    amps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        amps = tuple(sorted((int(i), int(p) % 4) for i, p in self.amps))
        if not amps:
            raise NotSynthesizableError("empty state")
        if len({i for i, _ in amps}) != len(amps):
            raise NotSynthesizableError("repeated basis index")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_levels(cls, dims: Sequence[int], branches: Sequence[Sequence[int]], phases=None) -> "SearchState":
        phases = [0] * len(branches) if phases is None else phases
        return cls(tuple(dims), tuple((index_of(b, dims), p) for b, p in zip(branches, phases)))

    @classmethod
    def from_vector(cls, vec, dims: Sequence[int], atol: float = 1e-9) -> "SearchState":
        vec = np.asarray(vec, dtype=complex)
        nz = np.flatnonzero(np.abs(vec) > atol)
        if nz.size == 0:
            raise NotSynthesizableError("zero vector")
        mags = np.abs(vec[nz])
        if np.max(np.abs(mags - mags[0])) > atol * max(1.0, mags[0]):
            raise NotSynthesizableError("amplitudes have unequal magnitudes")
        rel = vec[nz] / vec[nz[0]]
        ks = np.rint(np.angle(rel) / (np.pi / 2)).astype(int) % 4
        if np.max(np.abs(rel / np.abs(rel) - _PHASES[ks])) > 1e-6:
            raise NotSynthesizableError("relative phases are not powers of i")
        return cls(tuple(dims), tuple(zip(nz.tolist(), ks.tolist())))

    def to_vector(self) -> np.ndarray:
        v = np.zeros(total_dim(self.dims), dtype=complex)
        for i, p in self.amps:
            v[i] = _PHASES[p]
        return v / math.sqrt(len(self.amps))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.amps)

    def labels(self) -> list[str]:
        return [ditstring(i, self.dims) for i in self.support]


def canonicalize(state: SearchState) -> SearchState:
    """Divide out the global phase so the first (lowest index) amplitude is +1."""
    p0 = state.amps[0][1]
    return SearchState(state.dims, tuple((i, (p - p0) % 4) for i, p in state.amps))


@dataclass(frozen=True)
class _Edge:
    op: GateOp
    perm: np.ndarray
    phase: np.ndarray
    cost: int
    key: str


@dataclass
class SynthGateSet:
    """pi rotations on every adjacent level pair and pi swaps on every adjacent site pair."""
    dims: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...] | None = None
    single_cost: int = SINGLE_QUDIT_COST
    two_cost: int = TWO_QUDIT_COST
    edges: list = field(init=False, repr=False)

    def __post_init__(self):
        self.dims = tuple(self.dims)
        if self.single_cost < 0 or self.two_cost < 0:
            raise ValueError("costs must be non-negative")
        if self.pairs is None:
            self.pairs = tuple((i, i + 1) for i in range(len(self.dims) - 1))
        ops = []
        for s, d in enumerate(self.dims):
            ops += [(X(s, k), self.single_cost) for k in range(d - 1)]
        for a, b in self.pairs:
            ops += [(TPS(a, b, k, l), self.two_cost)
                    for k in range(self.dims[a] - 1) for l in range(self.dims[b] - 1)]
        edges = []
        for op, cost in ops:
            u = gate_unitary(op, self.dims)
            perm = np.argmax(np.abs(u), axis=0)
            vals = u[perm, np.arange(u.shape[1])]
            ph = np.rint(np.angle(vals) / (np.pi / 2)).astype(int) % 4
            edges.append(_Edge(op, perm, ph, cost, serialize_op(op)))
        edges.sort(key=lambda e: e.key)
        self.edges = edges

    def apply(self, edge_index: int, state: SearchState) -> SearchState:
        e = self.edges[edge_index]
        return SearchState(state.dims, tuple((int(e.perm[i]), p + int(e.phase[i])) for i, p in state.amps))


def serialize_op(op: GateOp) -> str:
    return f"{op.kind.value}|{','.join(map(str, op.targets))}|{','.join(map(str, op.subspace))}"


def _key(amps, relaxed: bool):
    if relaxed:
        return tuple(i for i, _ in amps)
    p0 = amps[0][1]
    return tuple((i, (p - p0) % 4) for i, p in amps)


def dijkstra_synthesize(start: SearchState, target: SearchState, gateset: SynthGateSet | None = None,
                        max_nodes: int = DEFAULT_MAX_NODES, relaxed: bool = False) -> Circuit:
    """Cheapest gate sequence taking ``start`` to ``target``.

    Matching is up to global phase, or up to per-branch phases when ``relaxed``.
    Ties between equal-cost paths go to the lexicographically smaller
    serialized gate sequence.
    """
    if start.dims != target.dims:
        raise InvalidDimensionError("start and target dims differ")
    if len(start.dims) > 3:
        raise InvalidDimensionError("search is limited to three sites")
    gs = gateset or SynthGateSet(start.dims)
    if gs.dims != start.dims:
        raise InvalidDimensionError("gate set built for different dims")
    goal = _key(canonicalize(target).amps, relaxed)
    perms = [e.perm for e in gs.edges]
    phs = [e.phase for e in gs.edges]
    costs = [e.cost for e in gs.edges]
    amps0 = canonicalize(start).amps
    heap = [(0, (), amps0)]
    settled = set()
    while heap:
        cost, path, amps = heapq.heappop(heap)
        k = _key(amps, relaxed)
        if k in settled:
            continue
        if k == goal:
            return Circuit(start.dims, tuple(gs.edges[i].op for i in path))
        settled.add(k)
        if len(settled) > max_nodes:
            raise SearchExhaustedError(f"node budget {max_nodes} exhausted", frontier_size=len(heap))
        for ei in range(len(perms)):
            perm, ph = perms[ei], phs[ei]
            new = sorted((int(perm[i]), (p + int(ph[i])) & 3) for i, p in amps)
            nk = _key(new, relaxed)
            if nk in settled:
                continue
            heapq.heappush(heap, (cost + costs[ei], path + (ei,), tuple(new)))
    raise SearchExhaustedError("target unreachable with this gate set", frontier_size=0)


# ---------------------------------------------------------------------------
# Bell -> GHZ kernels

def kernel_dims(d: int) -> tuple[int, int, int]:
    """Per-site dims of the three-qudit kernel; d = 2 borrows level 2 on the middle qudit."""
    return (2, 3, 2) if d == 2 else (d, d, d)


def ghz_kernel_analytic(d: int) -> Circuit:
    """Copy gate on (middle, last): sum_k |k,k,0> -> sum_k |k,k,k> up to phases, with d-1 swaps."""
    if not 2 <= d <= 6:
        raise InvalidDimensionError("kernel supports 2 <= d <= 6")
    m, last = 1, 2
    if d == 2:
        return Circuit(kernel_dims(2), (TPS(m, last, 1, 0), X(m, 1)))
    ops = [X(m, d - 3)]
    for l in range(d - 3):
        ops += [TPS(m, last, l, l), X(last, l)]
    ops.append(TPS(m, last, d - 3, d - 3))
    ops += [X(m, l) for l in range(d - 3)]
    ops += [X(last, d - 2), X(last, d - 3), TPS(m, last, d - 3, d - 3), X(last, d - 2)]
    return Circuit(kernel_dims(d), tuple(ops))


def kernel_start_target(d: int) -> tuple[SearchState, SearchState]:
    dims = kernel_dims(d)
    start = SearchState.from_levels(dims, [(k, k, 0) for k in range(d)])
    target = SearchState.from_levels(dims, [(k, k, k) for k in range(d)])
    return start, target


def search_ghz_kernel(d: int, max_nodes: int = DEFAULT_MAX_NODES) -> Circuit:
    """Dijkstra search for the Bell -> GHZ kernel (branch phases free)."""
    start, target = kernel_start_target(d)
    return dijkstra_synthesize(start, target, SynthGateSet(start.dims), max_nodes, relaxed=True)


def ghz_dims(n: int, d: int) -> tuple[int, ...]:
    if d == 2 and n > 2:
        return (2,) + (3,) * (n - 2) + (2,)
    return (d,) * n


def ghz_circuit(n: int, d: int) -> Circuit:
    """Bell pair on sites (0, 1), then the kernel cycled along the chain.

    For d = 2 the interior qubits carry a third level used transiently.
    """
    if n < 2:
        raise InvalidDimensionError("GHZ needs at least two qudits")
    dims = ghz_dims(n, d)
    circ = bell_prep_circuit(d, dims=dims)
    kern = ghz_kernel_analytic(d)
    for w in range(n - 2):
        circ = circ + kern.relabel([w, w + 1, w + 2], dims)
    return circ


# ---------------------------------------------------------------------------
# cat states

def cat_circuit(n: int, d: int, max_nodes: int = DEFAULT_MAX_NODES) -> Circuit:
    """(|0...0> + e^{ia}|d-1...d-1>)/sqrt(2) from the ground state.

    A pi/2 two-photon swap on (0, 1) makes the two branches; n = 2 then climbs
    the ladder analytically and n = 3 searches from the two-branch state.
    """
    if d < 2 or n < 2:
        raise InvalidDimensionError("cat states need n >= 2 and d >= 2")
    dims = (d,) * n
    split = Circuit(dims, (TPS(0, 1, 0, 0, math.pi / 2),))
    if n == 2:
        return split.append(*[TPS(0, 1, k, k) for k in range(1, d - 1)])
    if n > 3:
        raise InvalidDimensionError("cat search is limited to three sites")
    psi = apply_circuit(split, QuantumState.ground(dims)).data
    start = SearchState.from_vector(psi, dims)
    target = SearchState.from_levels(dims, [(0,) * n, (d - 1,) * n])
    found = dijkstra_synthesize(start, target, SynthGateSet(dims), max_nodes, relaxed=True)
    return split + found


def cost_breakdown(circuit: Circuit) -> dict:
    two = circuit.count(GateKind.TWO_PHOTON_SWAP, GateKind.SUBSPACE_SWAP, GateKind.CROSS_KERR)
    single = circuit.count(GateKind.SUBSPACE_X)
    return {"two_qudit": two, "single_qudit": single,
            "cost": two * TWO_QUDIT_COST + single * SINGLE_QUDIT_COST}
