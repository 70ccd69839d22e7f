"""Cross-entropy benchmarking: linear cross-entropy, XEB fidelity, random-cycle
simulation under global depolarizing noise and exponential decay fitting.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .circuits import apply_local
from .errors import UndefinedFidelityError, UnfittableError
from .model import total_dim


def _dist(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def linear_cross_entropy(p1, p2) -> float:
    """H(p1, p2) = sum_x p1(x) p2(x)."""
    p1, p2 = _dist(p1), _dist(p2)
    if p1.shape != p2.shape:
        raise ValueError(f"distribution sizes differ: {p1.shape} vs {p2.shape}")
    return float(np.dot(p1, p2))


def xeb_fidelity(p, q) -> float:
    """(H(p,q) - H(p,u)) / (H(p,p) - H(p,u)) with u uniform."""
    p, q = _dist(p), _dist(q)
    u = np.full(p.shape, 1.0 / p.size)
    hpu = linear_cross_entropy(p, u)
    den = linear_cross_entropy(p, p) - hpu
    if abs(den) < 1e-12:
        raise UndefinedFidelityError("ideal distribution is uniform; XEB fidelity is undefined")
    return (linear_cross_entropy(p, q) - hpu) / den


def average_gate_fidelity(f: float, D: int) -> float:
    """Average fidelity of rho -> f rho + (1-f) I/D: F_avg = f + (1-f)/D."""
    return f + (1 - f) / D


def process_fidelity(f: float, D: int) -> float:
    """Entanglement fidelity of the same channel: F_pro = f + (1-f)/D^2."""
    return f + (1 - f) / D ** 2


@dataclass(frozen=True)
class DecayFit:
    amplitude: float
    fidelity: float
    amplitude_err: float
    fidelity_err: float
    n_excluded: int = 0

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "fidelity": self.fidelity,
                "amplitude_err": self.amplitude_err, "fidelity_err": self.fidelity_err,
                "n_excluded": self.n_excluded}


def _wls(X, y, w):
    sw = np.sqrt(w)
    return np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)[0]


def fit_decay(depths, fidelities, iterations: int = 2) -> DecayFit:
    """Fit F(m) = A f^m by least squares on log F.

    The log residuals are weighted by the fitted F^2 (additive noise on F
    becomes noise ~ sigma/F on log F), refined ``iterations`` times.
    Non-positive values are dropped and counted in ``n_excluded``. Standard
    errors come from the weighted residual variance (zero when only two
    points survive).
    """
    m = np.asarray(depths, dtype=float)
    F = np.asarray(fidelities, dtype=float)
    if m.shape != F.shape:
        raise ValueError("depths and fidelities differ in length")
    if m.size < 3:
        raise ValueError("need at least 3 depths")
    keep = F > 0
    if keep.sum() < 2:
        raise UnfittableError("fewer than two positive fidelities")
    x, y = m[keep], np.log(F[keep])
    X = np.column_stack([np.ones_like(x), x])
    w = np.ones_like(x)
    coef = _wls(X, y, w)
    for _ in range(iterations):
        w = np.exp(2 * (X @ coef))
        w /= w.max()
        coef = _wls(X, y, w)
    dof = len(x) - 2
    if dof > 0:
        s2 = float(np.sum(w * (y - X @ coef) ** 2)) / dof
        cov = s2 * np.linalg.inv(X.T @ (X * w[:, None]))
    else:
        cov = np.zeros((2, 2))
    A, f = math.exp(coef[0]), math.exp(coef[1])
    return DecayFit(A, f, A * math.sqrt(cov[0, 0]), f * math.sqrt(cov[1, 1]), int((~keep).sum()))


def haar_layer(dims: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    """One Haar-random SU(2) per qudit, acting on its (0, 1) subspace."""
    out = []
    for d in dims:
        u = unitary_group.rvs(2, random_state=rng)
        u = u / np.sqrt(np.linalg.det(u))
        m = np.eye(d, dtype=complex)
        m[:2, :2] = u
        out.append(m)
    return out


def _ideal_distribution(dressed: np.ndarray, dims, depth: int, rng) -> np.ndarray:
    psi = np.zeros(total_dim(dims), dtype=complex)
    psi[0] = 1.0
    for _ in range(depth):
        for s, u in enumerate(haar_layer(dims, rng)):
            psi = apply_local(psi, u, [s], dims)
        psi = dressed @ psi
    # closing layer: diagonal dressed gates must still change p
    for s, u in enumerate(haar_layer(dims, rng)):
        psi = apply_local(psi, u, [s], dims)
    p = np.abs(psi) ** 2
    return p / p.sum()


@dataclass
class XebRun:
    """Per-depth ideal and measured distributions with per-circuit XEB fidelities."""
    dims: tuple[int, ...]
    depths: list[int]
    ideal: list[list[np.ndarray]]
    measured: list[list[np.ndarray]]
    fidelities: list[list[float]] = field(default_factory=list)
    fit: DecayFit | None = None

    def __post_init__(self):
        for group in (self.ideal, self.measured):
            for dists in group:
                for p in dists:
                    if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
                        raise ValueError("invalid probability distribution")
        if not self.fidelities:
            self.fidelities = [[xeb_fidelity(p, q) for p, q in zip(ps, qs)]
                               for ps, qs in zip(self.ideal, self.measured)]

    def mean_fidelities(self) -> np.ndarray:
        return np.array([np.mean(f) for f in self.fidelities])

    def fit_decay(self) -> DecayFit:
        self.fit = fit_decay(self.depths, self.mean_fidelities())
        return self.fit

    @property
    def cycle_fidelity(self) -> float:
        """Fitted per-cycle decay, clipped to [0, 1]."""
        fit = self.fit or self.fit_decay()
        return min(1.0, max(0.0, fit.fidelity))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["depth", "circuit", "F"])
        for m, fs in zip(self.depths, self.fidelities):
            for c, f in enumerate(fs):
                w.writerow([m, c, f"{f:.9g}"])
        return buf.getvalue()

    def fit_json(self) -> str:
        fit = self.fit or self.fit_decay()
        D = total_dim(self.dims)
        out = fit.to_dict()
        out.update({"dims": list(self.dims), "depths": list(self.depths),
                    "mean_fidelity": [float(x) for x in self.mean_fidelities()],
                    "cycle_fidelity": self.cycle_fidelity,
                    "average_gate_fidelity": average_gate_fidelity(self.cycle_fidelity, D),
                    "conversion": "F_avg = f + (1 - f) / D"})
        return json.dumps(out, indent=2)


def _one_circuit(args):
    dressed, dims, depth, depol_rate, shots, seq = args
    rng = np.random.default_rng(seq)
    p = _ideal_distribution(dressed, dims, depth, rng)
    keep = (1.0 - depol_rate) ** depth
    q_true = keep * p + (1 - keep) / p.size
    if shots is None:
        return p, q_true
    counts = rng.multinomial(shots, q_true / q_true.sum())
    return p, counts / shots


def simulate_xeb(dressed_unitary: np.ndarray, depths: Sequence[int], circuits_per_depth: int,
                 depol_rate: float, shots: int | None, seed: int = 0, dims: Sequence[int] | None = None,
                 workers: int = 1) -> XebRun:
    """Random cycles of local SU(2) layers interleaved with ``dressed_unitary``.

    Each cycle is followed by rho -> (1-r) rho + r I/D. ``shots=None`` returns
    exact distributions. Every circuit draws from its own spawned seed, so the
    result does not depend on ``workers``.
    """
    if not 0 <= depol_rate <= 1:
        raise ValueError("depol_rate must lie in [0, 1]")
    if circuits_per_depth < 1:
        raise ValueError("circuits_per_depth must be at least 1")
    if shots is not None and shots < 1:
        raise ValueError("shots must be positive")
    U = np.asarray(dressed_unitary, dtype=complex)
    D = U.shape[0]
    if dims is None:
        n = int(round(math.log2(D)))
        if 2 ** n != D:
            raise ValueError("pass dims for a non-qubit register")
        dims = (2,) * n
    dims = tuple(dims)
    if total_dim(dims) != D:
        raise ValueError("dims do not match the unitary")
    if np.max(np.abs(U.conj().T @ U - np.eye(D))) > 1e-8:
        raise ValueError("dressed_unitary is not unitary")
    depths = [int(m) for m in depths]
    seqs = np.random.SeedSequence(seed).spawn(len(depths) * circuits_per_depth)
    jobs = [(U, dims, m, depol_rate, shots, seqs[i * circuits_per_depth + c])
            for i, m in enumerate(depths) for c in range(circuits_per_depth)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(_one_circuit, jobs))
    else:
        results = [_one_circuit(j) for j in jobs]
    ideal, measured = [], []
    for i in range(len(depths)):
        chunk = results[i * circuits_per_depth:(i + 1) * circuits_per_depth]
        ideal.append([r[0] for r in chunk])
        measured.append([r[1] for r in chunk])
    run = XebRun(dims, depths, ideal, measured)
    if len(depths) >= 3:
        try:
            run.fit_decay()
        except UnfittableError:
            pass
    return run
