"""Rotating-frame Hamiltonians of driven coupled qudits and their time evolution.

All tones share one carrier ``omega_d`` and the frame rotates at it, so the
Hamiltonian is time independent apart from the pulse envelopes. The
integrator is the fourth-order Magnus scheme with two Gauss-Legendre nodes per
step; constant-envelope stretches are propagated exactly by diagonalization.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, curve_fit

from . import analytics
from .errors import (DiabaticTrackingError, NoResonanceError, PoorFitError, StepSizeError,
                     UnsupportedMultichromaticError)
from .model import (Chain, CouplingSpec, DriveTone, QuantumState, QuditParams, annihilation_operator,
                    embed_operator, index_of)

_GL = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)


@dataclass(frozen=True)
class DriveSchedule:
    tones: tuple[DriveTone, ...]
    total_time: float
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))
        if self.dt <= 0:
            raise StepSizeError("dt must be positive")
        if self.total_time < 0:
            raise ValueError("total_time must be non-negative")
        limit = max_step(self.tones)
        if self.dt > limit * (1 + 1e-12):
            raise StepSizeError(f"dt = {self.dt:.3e} s exceeds the stable limit {limit:.3e} s")

    @classmethod
    def for_tones(cls, tones: Sequence[DriveTone], total_time: float | None = None,
                  dt: float | None = None) -> "DriveSchedule":
        tones = tuple(tones)
        if total_time is None:
            total_time = max((t.duration for t in tones), default=0.0)
        if dt is None:
            dt = max_step(tones)
            if not math.isfinite(dt):
                dt = total_time / 1000 if total_time > 0 else 1e-9
        return cls(tones, total_time, dt)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    populations: np.ndarray
    final_state: QuantumState
    hold_mask: np.ndarray | None = None

    def population(self, index: int) -> np.ndarray:
        return self.populations[:, index]


def max_step(tones: Sequence[DriveTone]) -> float:
    """Largest admissible fixed step for a set of tones."""
    limits = [math.inf]
    amp = max((t.amp for t in tones), default=0.0)
    if amp > 0:
        limits.append(1 / (50 * amp))
    ramps = [t.ramp_time for t in tones if t.ramp_time > 0]
    if ramps:
        limits.append(min(ramps) / 100)
    return min(limits)


def _frame_frequency(chain: Chain, tones: Sequence[DriveTone], frame_freq: float | None) -> float:
    freqs = {t.freq for t in tones}
    if frame_freq is not None:
        freqs.add(frame_freq)
    if len(freqs) > 1:
        raise UnsupportedMultichromaticError("all tones must share one carrier frequency")
    if freqs:
        return freqs.pop()
    return chain.qudits[0].freq01


def _static_hamiltonian(chain: Chain, w_d: float) -> np.ndarray:
    dims = chain.dims
    D = int(np.prod(dims))
    h = np.zeros((D, D), dtype=complex)
    for i, q in enumerate(chain.qudits):
        n = np.arange(q.dim, dtype=float)
        delta = w_d - q.freq01
        diag = (delta - q.anharmonicity / 2) * n + q.anharmonicity / 2 * n ** 2
        h += embed_operator(np.diag(diag).astype(complex), i, dims)
    for c in chain.couplings:
        a = embed_operator(annihilation_operator(dims[c.qudit_a]), c.qudit_a, dims)
        b = embed_operator(annihilation_operator(dims[c.qudit_b]), c.qudit_b, dims)
        h += c.g01 * (a.conj().T @ b + a @ b.conj().T)
    return h


def _drive_operators(chain: Chain, tones: Sequence[DriveTone]) -> list[np.ndarray]:
    """Per-tone operator multiplying the envelope value (the subspace amp)."""
    dims = chain.dims
    ops = []
    for t in tones:
        a = annihilation_operator(dims[t.target])
        local = (a * np.exp(-1j * t.phase) + a.conj().T * np.exp(1j * t.phase)) / (2 * math.sqrt(t.level + 1))
        ops.append(embed_operator(local, t.target, dims))
    return ops


def rotating_hamiltonian(chain: Chain, tones: Sequence[DriveTone], envelope_values: Sequence[float] | None = None,
                         frame_freq: float | None = None) -> np.ndarray:
    """H/hbar in the frame rotating at the common tone frequency.

    ``envelope_values`` gives the instantaneous subspace Rabi rate of each tone;
    it defaults to the full amplitudes.
    """
    tones = list(tones)
    w_d = _frame_frequency(chain, tones, frame_freq)
    if envelope_values is None:
        envelope_values = [t.amp for t in tones]
    h = _static_hamiltonian(chain, w_d)
    for v, op in zip(envelope_values, _drive_operators(chain, tones)):
        h = h + v * op
    return h


def _expm_herm(k: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(k)
    return (v * np.exp(-1j * w)) @ v.conj().T


class _Propagator:
    """Magnus-4 stepper over sampled envelopes with a cache for constant stretches."""

    def __init__(self, chain: Chain, tones: Sequence[DriveTone], frame_freq: float | None = None):
        self.tones = list(tones)
        w_d = _frame_frequency(chain, self.tones, frame_freq)
        self.h0 = _static_hamiltonian(chain, w_d)
        self.ops = _drive_operators(chain, self.tones)
        self._cache: dict = {}

    def hamiltonian(self, values) -> np.ndarray:
        h = self.h0.copy()
        for v, op in zip(values, self.ops):
            if v:
                h += v * op
        return h

    def envelopes(self, t: float) -> tuple[float, ...]:
        return tuple(float(tone.envelope(t)) for tone in self.tones)

    def step(self, t: float, dt: float) -> np.ndarray:
        e1 = self.envelopes(t + _GL[0] * dt)
        e2 = self.envelopes(t + _GL[1] * dt)
        key = (e1, e2, dt)
        if e1 == e2 and key in self._cache:
            return self._cache[key]
        h1, h2 = self.hamiltonian(e1), self.hamiltonian(e2)
        k = 0.5 * dt * (h1 + h2)
        if e1 != e2:
            k = k + 1j * math.sqrt(3) / 12 * dt ** 2 * (h1 @ h2 - h2 @ h1)
        u = _expm_herm(k)
        if e1 == e2:
            self._cache[key] = u
        return u

    def propagate(self, t0: float, t1: float, dt: float) -> np.ndarray:
        """Propagator from t0 to t1 (last step shortened to land on t1)."""
        D = self.h0.shape[0]
        u = np.eye(D, dtype=complex)
        t = t0
        n = int(math.ceil((t1 - t0) / dt - 1e-9))
        for _ in range(max(n, 0)):
            h = min(dt, t1 - t)
            if h <= 0:
                break
            u = self.step(t, h) @ u
            t += h
        return u


def _initial_vector(initial: QuantumState) -> np.ndarray:
    if initial.kind.value != "pure":
        raise ValueError("evolve expects a pure initial state")
    return np.array(initial.data, dtype=complex)


def evolve(initial: QuantumState, schedule: DriveSchedule, chain: Chain, record_every: int = 1,
           frame_freq: float | None = None) -> Trajectory:
    """Integrate the Schroedinger equation over the schedule."""
    if tuple(initial.dims) != chain.dims:
        raise ValueError(f"state dims {initial.dims} do not match chain dims {chain.dims}")
    prop = _Propagator(chain, schedule.tones, frame_freq)
    psi = _initial_vector(initial)
    dt, T = schedule.dt, schedule.total_time
    n_steps = int(math.ceil(T / dt - 1e-9))
    times, pops = [0.0], [np.abs(psi) ** 2]
    t = 0.0
    for i in range(n_steps):
        h = min(dt, T - t)
        psi = prop.step(t, h) @ psi
        t += h
        if (i + 1) % record_every == 0 or i == n_steps - 1:
            times.append(t)
            pops.append(np.abs(psi) ** 2)
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1) > 1e-6:
        raise StepSizeError(f"norm drifted to {norm:.3e}; reduce dt")
    psi /= math.sqrt(norm)
    return Trajectory(np.array(times), np.array(pops), QuantumState(chain.dims, psi))


def pulse_propagator(chain: Chain, tones: Sequence[DriveTone], dt: float | None = None) -> np.ndarray:
    """Full propagator of the pulse (ramp up, hold, ramp down)."""
    sched = DriveSchedule.for_tones(tones, dt=dt)
    prop = _Propagator(chain, sched.tones)
    return prop.propagate(0.0, sched.total_time, sched.dt)


def hold_scan(chain: Chain, tones: Sequence[DriveTone], initial: QuantumState, hold_times,
              dt: float | None = None) -> Trajectory:
    """Populations after ramp-up, a hold of each given length, and ramp-down.

    ``times`` of the returned trajectory are the hold durations; every point is
    a constant-envelope sample so ``hold_mask`` is all true.
    """
    tones = [DriveTone(t.target, t.freq, t.amp, t.phase, t.ramp_time, 0.0, t.level) for t in tones]
    ramps = {t.ramp_time for t in tones}
    if len(ramps) > 1:
        raise ValueError("hold_scan needs a common ramp time")
    tr = ramps.pop() if ramps else 0.0
    if tuple(initial.dims) != chain.dims:
        raise ValueError("state dims do not match chain dims")
    hold_times = np.asarray(hold_times, dtype=float)
    sched = DriveSchedule.for_tones(tones, total_time=2 * tr, dt=dt)
    prop = _Propagator(chain, tones)
    psi0 = _initial_vector(initial)
    psi_up = prop.propagate(0.0, tr, sched.dt) @ psi0
    # ramp-down is the hold-free pulse's second half
    u_down = prop.propagate(tr, 2 * tr, sched.dt)
    w, v = np.linalg.eigh(prop.hamiltonian([t.amp for t in tones]))
    c = v.conj().T @ psi_up
    phases = np.exp(-1j * np.outer(hold_times, w))
    states = (phases * c) @ v.T @ u_down.T
    norms = np.sum(np.abs(states) ** 2, axis=1)
    if np.max(np.abs(norms - 1)) > 1e-6:
        raise StepSizeError("norm drift during hold scan; reduce dt")
    pops = np.abs(states) ** 2 / norms[:, None]
    final = states[-1] / math.sqrt(norms[-1]) if len(states) else psi_up
    return Trajectory(hold_times, pops, QuantumState(chain.dims, final), np.ones(len(hold_times), bool))


# ---------------------------------------------------------------------------
# pair helpers

def pair_tones(chain: Chain, w_d: float, omega: float, lam: float = 1.0, levels=(0, 0),
               ramp_time: float = 100e-9, hold_time: float = 0.0, phases=(0.0, 0.0),
               pair=(0, 1)) -> list[DriveTone]:
    """Two tones at ``w_d``: qudit ``pair[0]`` gets ``lam*omega`` on level k, ``pair[1]`` gets ``omega`` on level l."""
    a, b = pair
    k, l = levels
    return [DriveTone(a, w_d, lam * omega, phases[0], ramp_time, hold_time, k),
            DriveTone(b, w_d, omega, phases[1], ramp_time, hold_time, l)]


def _duffing_rotating(q: QuditParams, dim: int, w_d: float, ladder_amp: float) -> np.ndarray:
    n = np.arange(dim, dtype=float)
    delta = w_d - q.freq01
    h = np.diag((delta - q.anharmonicity / 2) * n + q.anharmonicity / 2 * n ** 2).astype(complex)
    a = annihilation_operator(dim)
    return h + ladder_amp / 2 * (a + a.conj().T)


def tracked_dressed_frequency(q: QuditParams, dim: int, w_d: float, subspace_amp: float, level: int = 0,
                              n_ramp: int = 50) -> float:
    """Dressed k -> k+1 frequency of one driven Duffing qudit, followed adiabatically from zero drive."""
    if level + 1 >= dim:
        raise ValueError("tracked level must lie below the top level")
    ladder_amp = subspace_amp / math.sqrt(level + 1)
    n_ramp = max(int(n_ramp), 50)
    tracked = {k: np.eye(dim, dtype=complex)[:, k] for k in (level, level + 1)}
    energies = {}
    for s in np.linspace(0, 1, n_ramp + 1)[1:]:
        w, v = np.linalg.eigh(_duffing_rotating(q, dim, w_d, s * ladder_amp))
        for k, prev in tracked.items():
            overlaps = np.abs(v.conj().T @ prev)
            j = int(np.argmax(overlaps))
            if overlaps[j] < 0.5:
                raise DiabaticTrackingError(f"overlap {overlaps[j]:.3f} < 0.5 while tracking level {k}")
            tracked[k] = v[:, j]
            energies[k] = w[j]
    if not energies:
        return float(np.diag(_duffing_rotating(q, dim, w_d, 0.0)).real[level + 1]
                     - np.diag(_duffing_rotating(q, dim, w_d, 0.0)).real[level])
    return float(energies[level + 1] - energies[level])


def find_resonance_ed(chain: Chain, omega: float, lam: float = 1.0, dims: Sequence[int] | None = None,
                      levels=(0, 0), pair=(0, 1), n_ramp: int = 50, grid_points: int = 41) -> float:
    """Drive frequency at which the tracked dressed frequencies of the pair cancel.

    ``omega`` is the subspace Rabi rate on ``pair[1]``; ``pair[0]`` sees ``lam*omega``.
    """
    qa, qb = chain.qudits[pair[0]], chain.qudits[pair[1]]
    if dims is None:
        dims = (qa.dim, qb.dim)
    elif isinstance(dims, int):
        dims = (dims, dims)
    da, db = int(dims[0]), int(dims[1])
    k, l = levels
    wa, wb = qa.transition_freq(k), qb.transition_freq(l)
    if wa == wb:
        raise NoResonanceError("addressed transitions are degenerate")
    span = abs(wb - wa)
    tol = 1e-9 * span

    def mismatch(w_d):
        fa = tracked_dressed_frequency(qa, da, w_d, lam * omega, k, n_ramp) if lam * omega > 0 else w_d - wa
        fb = tracked_dressed_frequency(qb, db, w_d, omega, l, n_ramp) if omega > 0 else w_d - wb
        return fa + fb

    lo, hi = min(wa, wb), max(wa, wb)
    eps = 1e-6 * span
    grid = np.linspace(lo + eps, hi - eps, grid_points)
    vals = []
    for w in grid:
        try:
            vals.append(mismatch(w))
        except DiabaticTrackingError:
            vals.append(np.nan)
    vals = np.array(vals)
    guess = analytics.optimal_drive_frequency_2ls(wa, wb, omega, lam) if wa < wb else \
        analytics.optimal_drive_frequency_2ls(wb, wa, lam * omega, 1 / lam if lam else 0.0)
    brackets = [(grid[i], grid[i + 1]) for i in range(len(grid) - 1)
                if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] <= 0]
    if not brackets:
        raise NoResonanceError("dressed-frequency sum has no sign change between the transitions")
    a, b = min(brackets, key=lambda br: abs(0.5 * (br[0] + br[1]) - guess))
    if mismatch(a) == 0:
        return float(a)
    return float(brentq(mismatch, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))


# ---------------------------------------------------------------------------
# scans and fits

def _sin2(t, amp, rate, phi0, offset):
    return amp * np.sin(rate * t / 2 + phi0) ** 2 + offset


def extract_rate(trajectory: Trajectory, target_index: int, max_residual: float = 0.05,
                 min_periods: float = 2.0) -> float:
    """Fit ``A sin^2(rate t/2 + phi0) + B`` to the target population on the hold segment."""
    mask = trajectory.hold_mask if trajectory.hold_mask is not None else np.ones(len(trajectory.times), bool)
    t = np.asarray(trajectory.times)[mask]
    p = np.asarray(trajectory.populations)[mask, target_index]
    if len(t) < 8:
        raise PoorFitError("too few samples on the constant-envelope segment")
    t0 = t[0]
    tt = t - t0
    dt = np.median(np.diff(tt))
    n_fft = 16 * len(tt)
    spec = np.abs(np.fft.rfft(p - p.mean(), n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, d=dt)
    spec[0] = 0
    f_guess = freqs[int(np.argmax(spec))]
    amp0 = max(p.max() - p.min(), 1e-3)
    best = None
    for phi in np.linspace(0, np.pi, 4, endpoint=False):
        try:
            popt, _ = curve_fit(_sin2, tt, p, p0=[amp0, 2 * np.pi * f_guess, phi, p.min()], maxfev=20000)
        except RuntimeError:
            continue
        res = float(np.sqrt(np.mean((_sin2(tt, *popt) - p) ** 2)))
        if best is None or res < best[1]:
            best = (popt, res)
    if best is None:
        raise PoorFitError("oscillation fit did not converge")
    popt, res = best
    if res > max_residual:
        raise PoorFitError(f"fit residual {res:.3f} exceeds {max_residual}", residual=res)
    rate = abs(float(popt[1]))
    if rate * (tt[-1] - tt[0]) / (2 * np.pi) < min_periods:
        raise PoorFitError("trajectory covers fewer than the required oscillation periods", residual=res)
    return rate


@dataclass(frozen=True)
class ChevronMap:
    freqs: np.ndarray
    durations: np.ndarray
    populations: np.ndarray
    failed: np.ndarray
    levels: tuple[int, int]


def _chevron_column(args):
    chain, tones, initial, durations, target, dt = args
    try:
        traj = hold_scan(chain, tones, initial, durations, dt=dt)
        return traj.populations[:, target], False
    except (StepSizeError, np.linalg.LinAlgError):
        return np.full(len(durations), np.nan), True


def chevron_scan(chain: Chain, levels, freq_grid, duration_grid, omega: float, lam: float = 1.0,
                 ramp_time: float = 100e-9, pair=(0, 1), dt: float | None = None, workers: int = 1) -> ChevronMap:
    """P(|k+1,l+1>) after pulses over a (drive frequency, hold duration) grid, starting in |k,l>."""
    freq_grid = np.asarray(freq_grid, dtype=float)
    duration_grid = np.asarray(duration_grid, dtype=float)
    if freq_grid.size == 0 or duration_grid.size == 0:
        raise ValueError("grids must be non-empty")
    k, l = levels
    dims = chain.dims
    start = [0] * len(dims)
    start[pair[0]], start[pair[1]] = k, l
    end = list(start)
    end[pair[0]], end[pair[1]] = k + 1, l + 1
    initial = QuantumState.basis(dims, start)
    target = index_of(end, dims)
    jobs = [(chain, pair_tones(chain, w, omega, lam, levels, ramp_time, pair=pair), initial,
             duration_grid, target, dt) for w in freq_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            cols = list(ex.map(_chevron_column, jobs))
    else:
        cols = [_chevron_column(j) for j in jobs]
    pops = np.array([c[0] for c in cols]).T
    failed = np.array([[c[1]] * len(duration_grid) for c in cols]).T
    return ChevronMap(freq_grid, duration_grid, pops, failed, (k, l))


def pair_chain(w1: float, w2: float, alpha: float, g: float, dim: int = 2, alpha2: float | None = None) -> Chain:
    """Two coupled Duffing qudits (qudit 0 at ``w1``, qudit 1 at ``w2``)."""
    return Chain((QuditParams(dim, w1, alpha), QuditParams(dim, w2, alpha if alpha2 is None else alpha2)),
                 (CouplingSpec(0, 1, g),))


def measure_two_photon_rate(chain: Chain, omega: float, lam: float = 1.0, levels=(0, 0), w_d: float | None = None,
                            ramp_time: float = 100e-9, periods: float = 3.0, samples: int = 240,
                            dt: float | None = None, expected: float | None = None) -> float:
    """Simulated |k,l> <-> |k+1,l+1> oscillation rate at the (ED) resonant drive frequency."""
    k, l = levels
    if w_d is None:
        w_d = find_resonance_ed(chain, omega, lam, levels=levels)
    if expected is None:
        angles = analytics.drive_angles(w_d, chain.qudits[0].transition_freq(k), chain.qudits[1].transition_freq(l),
                                        omega, lam)
        g_kl = analytics.coupling_matrix_element(chain.couplings[0].g01, k, l)
        expected = analytics.two_photon_rate(g_kl, angles)
    t_max = periods * 2 * np.pi / expected
    tones = pair_tones(chain, w_d, omega, lam, levels, ramp_time)
    initial = QuantumState.basis(chain.dims, [k, l])
    traj = hold_scan(chain, tones, initial, np.linspace(0, t_max, samples), dt=dt)
    return extract_rate(traj, index_of([k + 1, l + 1], chain.dims))
