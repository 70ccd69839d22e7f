import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditladder.circuits import apply_circuit, bell_prep_circuit, branch_fidelity
from quditladder.errors import InvalidDimensionError, NotSynthesizableError, SearchExhaustedError
from quditladder.model import GateKind, QuantumState, index_of
from quditladder.synthesis import (SearchState, SynthGateSet, canonicalize, cat_circuit, cost_breakdown,
                                   dijkstra_synthesize, ghz_circuit, ghz_dims, ghz_kernel_analytic,
                                   kernel_dims, kernel_start_target, search_ghz_kernel)


def _ghz_branches(dims, d):
    return [index_of([k] * len(dims), dims) for k in range(d)]


def _fidelity(circ, branches):
    psi = apply_circuit(circ, QuantumState.ground(circ.dims)).data
    return branch_fidelity(psi, branches), psi


def test_canonicalize_examples():
    dims = (2, 2)
    a = SearchState.from_vector(1j * np.array([1, 0, 0, 1]), dims)
    assert canonicalize(a) == SearchState.from_levels(dims, [(0, 0), (1, 1)])
    b = SearchState.from_vector(np.array([1, 0, 0, 1j]), dims)
    c = SearchState.from_vector(1j * np.array([1, 0, 0, 1j]), dims)
    assert canonicalize(b) == canonicalize(c)
    e = SearchState.from_vector(-np.array([1, 0, 0, -1]), dims)
    assert canonicalize(e).amps == ((0, 0), (3, 2))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=9), st.integers(0, 3))
def test_canonicalize_idempotent_and_phase_blind(phases, g):
    dims = (3, 3)
    s = SearchState(dims, tuple(enumerate(phases)))
    c = canonicalize(s)
    assert canonicalize(c) == c
    assert canonicalize(SearchState(dims, tuple((i, p + g) for i, p in s.amps))) == c


def test_non_uniform_magnitudes_rejected():
    with pytest.raises(NotSynthesizableError):
        SearchState.from_vector(np.array([1, 0.5, 0, 0]), (2, 2))
    with pytest.raises(NotSynthesizableError):
        SearchState.from_vector(np.array([1, np.exp(0.3j), 0, 0]), (2, 2))


@given(st.data())
def test_gate_set_closure(data):
    dims = (3, 2, 3)
    gs = SynthGateSet(dims)
    support = data.draw(st.lists(st.integers(0, 17), min_size=1, max_size=6, unique=True))
    phases = data.draw(st.lists(st.integers(0, 3), min_size=len(support), max_size=len(support)))
    s = SearchState(dims, tuple(zip(support, phases)))
    e = data.draw(st.integers(0, len(gs.edges) - 1))
    out = gs.apply(e, s)
    from quditladder.circuits import gate_unitary
    vec = gate_unitary(gs.edges[e].op, dims) @ s.to_vector()
    assert np.allclose(out.to_vector(), vec, atol=1e-12)


def test_search_identity_is_empty():
    s = SearchState.from_levels((3, 3), [(0, 0), (1, 1)])
    assert len(dijkstra_synthesize(s, s)) == 0


def test_search_budget():
    start, target = kernel_start_target(4)
    with pytest.raises(SearchExhaustedError) as exc:
        dijkstra_synthesize(start, target, max_nodes=50, relaxed=True)
    assert exc.value.frontier_size > 0


def test_search_rejects_four_sites():
    s = SearchState.from_levels((2, 2, 2, 2), [(0, 0, 0, 0)])
    with pytest.raises(InvalidDimensionError):
        dijkstra_synthesize(s, s)


def test_search_prefers_cheap_gates():
    dims = (3, 3)
    c = dijkstra_synthesize(SearchState.from_levels(dims, [(0, 0)]), SearchState.from_levels(dims, [(1, 1)]))
    assert c.count(GateKind.SUBSPACE_X) == 2 and len(c) == 2


@pytest.mark.parametrize("phase", [0, 2])
def test_search_strict_reaches_exact_phase(phase):
    dims = (2, 3)
    start = SearchState.from_levels(dims, [(0, 0), (1, 1)])
    target = SearchState.from_levels(dims, [(0, 0), (1, 1)], [0, phase])
    c = dijkstra_synthesize(start, target)
    out = apply_circuit(c, QuantumState.from_vector(dims, start.to_vector())).data
    assert abs(np.vdot(target.to_vector(), out)) == pytest.approx(1, abs=1e-10)


def test_search_exhausts_unreachable_phase():
    # pi rotations cannot create a relative phase of i between these branches
    dims = (2, 3)
    start = SearchState.from_levels(dims, [(0, 0), (1, 1)])
    target = SearchState.from_levels(dims, [(0, 0), (1, 1)], [0, 1])
    with pytest.raises(SearchExhaustedError) as exc:
        dijkstra_synthesize(start, target)
    assert exc.value.frontier_size == 0
    assert len(dijkstra_synthesize(start, target, relaxed=True)) == 0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_analytic_kernel(d):
    k = ghz_kernel_analytic(d)
    assert k.two_photon_count == d - 1
    bell = bell_prep_circuit(d, dims=kernel_dims(d))
    f, _ = _fidelity(bell + k, _ghz_branches(kernel_dims(d), d))
    assert f > 1 - 1e-9


@pytest.mark.parametrize("d", [2, 3, 4])
def test_search_kernel_optimal(d):
    found = search_ghz_kernel(d)
    ana = ghz_kernel_analytic(d)
    assert cost_breakdown(found)["cost"] <= cost_breakdown(ana)["cost"]
    assert found.two_photon_count == ana.two_photon_count == d - 1
    bell = bell_prep_circuit(d, dims=kernel_dims(d))
    f, _ = _fidelity(bell + found, _ghz_branches(kernel_dims(d), d))
    assert f > 1 - 1e-9


def test_search_deterministic():
    assert search_ghz_kernel(3).to_json() == search_ghz_kernel(3).to_json()


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_ghz_count_law_and_output(n, d):
    c = ghz_circuit(n, d)
    assert c.two_photon_count == (n - 1) * (d - 1)
    if np.prod(c.dims) <= 4 ** 4 * 3:
        f, psi = _fidelity(c, _ghz_branches(c.dims, d))
        assert f > 1 - 1e-9
        p = np.abs(psi) ** 2
        for i in _ghz_branches(c.dims, d):
            assert p[i] == pytest.approx(1 / d, abs=1e-9)


def test_ghz_dims_auxiliary_level():
    assert ghz_dims(3, 2) == (2, 3, 2)
    assert ghz_dims(2, 2) == (2, 2)
    assert ghz_dims(4, 3) == (3, 3, 3, 3)


@pytest.mark.parametrize("n,d", [(2, 2), (2, 4), (3, 3), (3, 4)])
def test_cat_states(n, d):
    c = cat_circuit(n, d)
    dims = (d,) * n
    ends = [index_of([0] * n, dims), index_of([d - 1] * n, dims)]
    f, psi = _fidelity(c, ends)
    assert f > 1 - 1e-9
    assert np.abs(psi[ends[0]]) ** 2 == pytest.approx(0.5, abs=1e-10)


def test_cat_limits():
    with pytest.raises(InvalidDimensionError):
        cat_circuit(4, 3)


def test_cost_breakdown():
    b = cost_breakdown(ghz_kernel_analytic(3))
    assert b == {"two_qudit": 2, "single_qudit": 4, "cost": 204}
