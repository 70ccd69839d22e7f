"""Qudit state tomography: projector sets, simulated records, MLE and purification.

Each element of the projector set is a gate sequence applied before a
computational-basis measurement. Sequences are written in time order, leftmost
gate first; read that way the d = 2, 3, 4 sets are informationally complete.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguousPurificationError, NonInformationallyCompleteError, SingularityError
from .model import QuantumState, kron_sites, total_dim
from .readout import ConfusionMatrix

# (gate, subspace k) in time order; X = pi, SX = sqrt X, SY = sqrt Y on (k, k+1)
_SEQUENCES: tuple[tuple[tuple[str, int], ...], ...] = (
    (),
    (("X", 0),),
    (("X", 1), ("X", 0)),
    (("X", 2), ("X", 1), ("X", 0)),
    (("SX", 0),),
    (("SY", 0),),
    (("SX", 1), ("X", 0)),
    (("SY", 1), ("X", 0)),
    (("X", 1), ("SX", 0)),
    (("X", 1), ("SY", 0)),
    (("X", 2), ("X", 1), ("SX", 0)),
    (("X", 2), ("X", 1), ("SY", 0)),
    (("X", 2), ("SX", 1), ("X", 0)),
    (("X", 2), ("SY", 1), ("X", 0)),
    (("SX", 2), ("X", 1), ("X", 0)),
    (("SY", 2), ("X", 1), ("X", 0)),
)


def _subspace_gate(d: int, name: str, k: int) -> np.ndarray:
    u = np.eye(d, dtype=complex)
    angle = math.pi if name == "X" else math.pi / 2
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if name == "SY":
        block = np.array([[c, -s], [s, c]], dtype=complex)
    else:
        block = np.array([[c, -1j * s], [-1j * s, c]])
    u[k:k + 2, k:k + 2] = block
    return u


@dataclass(frozen=True)
class ProjectorSet:
    d: int
    unitaries: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.unitaries)

    def settings(self, n: int) -> list[tuple[int, ...]]:
        """All n-qudit settings; entry i is the element applied to site i."""
        return [tuple(reversed(c)) for c in itertools.product(range(len(self)), repeat=n)]

    def setting_unitaries(self, n: int, settings: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        settings = self.settings(n) if settings is None else settings
        return np.array([kron_sites([self.unitaries[i] for i in s]) for s in settings])

    def setting_label(self, setting: Sequence[int]) -> str:
        return "|".join(self.labels[i] for i in reversed(setting))


def projector_set(d: int) -> ProjectorSet:
    """Pre-measurement unitaries for qudit tomography (16 for d = 4, truncated below)."""
    if d not in (2, 3, 4):
        raise ValueError("projector sets are defined for d in {2, 3, 4}")
    unitaries, labels = [], []
    for seq in _SEQUENCES:
        if any(k >= d - 1 for _, k in seq):
            continue
        u = np.eye(d, dtype=complex)
        for name, k in seq:
            u = _subspace_gate(d, name, k) @ u
        unitaries.append(u)
        labels.append(" ".join(f"{name}{k}{k + 1}" for name, k in seq) or "I")
    return ProjectorSet(d, tuple(unitaries), tuple(labels))


def measurement_matrix(us: np.ndarray) -> np.ndarray:
    """Rows map vec(rho) (row-major) to outcome probabilities, setting-major."""
    S, D, _ = us.shape
    return np.einsum("soi,soj->soij", us, us.conj()).reshape(S * D, D * D)


def gram_rank(us: np.ndarray) -> int:
    return int(np.linalg.matrix_rank(measurement_matrix(us), tol=1e-9))


@dataclass
class TomoRecord:
    """Counts per setting (rows) and outcome (columns, flat index)."""
    dims: tuple[int, ...]
    settings: list[tuple[int, ...]]
    counts: np.ndarray
    n_rep: int
    confusion: ConfusionMatrix | None = None
    seed: int | None = None
    set_dim: int = field(default=0)

    def __post_init__(self):
        self.dims = tuple(self.dims)
        self.settings = [tuple(s) for s in self.settings]
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (len(self.settings), total_dim(self.dims)):
            raise ValueError("counts shape does not match settings and dims")
        if np.any(self.counts.sum(axis=1) != self.n_rep):
            raise ValueError("counts per setting must sum to n_rep")
        if not self.set_dim:
            self.set_dim = self.dims[0]

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_rep

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "set_dim": self.set_dim, "n_rep": self.n_rep, "seed": self.seed,
                "settings": [list(s) for s in self.settings], "counts": self.counts.tolist(),
                "confusion": None if self.confusion is None else self.confusion.matrix.tolist()}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "TomoRecord":
        conf = None if d.get("confusion") is None else ConfusionMatrix(np.array(d["confusion"]), tuple(d["dims"]))
        return cls(tuple(d["dims"]), [tuple(s) for s in d["settings"]], np.array(d["counts"]), int(d["n_rep"]),
                   conf, d.get("seed"), int(d.get("set_dim", 0)))

    @classmethod
    def from_json(cls, s: str) -> "TomoRecord":
        return cls.from_dict(json.loads(s))


def born_probabilities(rho: np.ndarray, us: np.ndarray) -> np.ndarray:
    p = np.einsum("soi,ij,soj->so", us, rho, us.conj()).real
    p = np.clip(p, 0, None)
    return p / p.sum(axis=1, keepdims=True)


def simulate_tomography(rho: QuantumState, pset: ProjectorSet, n_rep: int,
                        confusion: ConfusionMatrix | None = None, seed: int = 0) -> TomoRecord:
    """Sample ``n_rep`` shots per setting and pass them through the readout confusion channel."""
    dims = tuple(rho.dims)
    if any(d != pset.d for d in dims):
        raise ValueError("projector set dimension differs from the qudit dimensions")
    if confusion is not None and confusion.dims != dims:
        raise ValueError("confusion matrix dims differ from state dims")
    settings = pset.settings(len(dims))
    us = pset.setting_unitaries(len(dims), settings)
    p = born_probabilities(rho.density(), us)
    if confusion is not None:
        p = p @ confusion.matrix
        p = np.clip(p, 0, None)
        p /= p.sum(axis=1, keepdims=True)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_rep, p)
    return TomoRecord(dims, settings, counts, n_rep, confusion, seed, pset.d)


def invert_confusion(record: TomoRecord) -> np.ndarray:
    """Per-setting frequencies with readout misassignment undone (may dip below zero)."""
    f = record.frequencies()
    if record.confusion is None:
        return f
    if record.confusion.condition_number > 1e12:
        raise SingularityError("confusion matrix is singular")
    return f @ np.linalg.inv(record.confusion.matrix)


def _setup(record: TomoRecord, pset: ProjectorSet):
    if record.set_dim != pset.d:
        raise ValueError("record was taken with a different projector set dimension")
    us = pset.setting_unitaries(len(record.dims), record.settings)
    A = measurement_matrix(us)
    D = total_dim(record.dims)
    if np.linalg.matrix_rank(A, tol=1e-9) < D * D:
        raise NonInformationallyCompleteError("settings do not span the operator space")
    return A, D, len(record.settings)


def _psd_floor(rho: np.ndarray, floor: float) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, floor, None)
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def linear_inversion(freqs: np.ndarray, A: np.ndarray, D: int) -> np.ndarray:
    x, *_ = np.linalg.lstsq(A, freqs.reshape(-1).astype(complex), rcond=None)
    rho = x.reshape(D, D)
    return 0.5 * (rho + rho.conj().T)


def mle_reconstruct(record: TomoRecord, pset: ProjectorSet, dilution: float = 0.5, tol: float = 1e-10,
                    max_iter: int = 5000, freqs: np.ndarray | None = None, return_info: bool = False):
    """Maximum-likelihood density matrix via the diluted R rho R iteration.

    Starts from the linear-inversion estimate with eigenvalues floored at 1e-12
    and stops once the log-likelihood gain falls below ``tol``.
    """
    A, D, S = _setup(record, pset)
    f = invert_confusion(record) if freqs is None else np.asarray(freqs)
    fv = f.reshape(-1)
    rho = _psd_floor(linear_inversion(f, A, D), 1e-12)
    AH = A.conj().T
    eye = np.eye(D)

    def probs(r):
        return np.maximum((A @ r.reshape(-1)).real, 1e-300)

    p = probs(rho)
    ll = float(fv @ np.log(p))
    it = 0
    for it in range(1, max_iter + 1):
        R = (AH @ (fv / p)).reshape(D, D) / S
        R = 0.5 * (R + R.conj().T)
        M = (eye + dilution * R) / (1 + dilution)
        new = M @ rho @ M
        new = 0.5 * (new + new.conj().T)
        new /= np.trace(new).real
        p_new = probs(new)
        ll_new = float(fv @ np.log(p_new))
        gain = ll_new - ll
        rho, p, ll = new, p_new, ll_new
        if abs(gain) < tol:
            break
    R = 0.5 * ((AH @ (fv / p)).reshape(D, D) / S)
    R = R + R.conj().T
    grad = float(np.linalg.norm(R @ rho - rho))
    if it >= max_iter:
        warnings.warn(f"MLE stopped after {max_iter} iterations; gradient norm {grad:.2e}", RuntimeWarning)
    if return_info:
        return rho, {"iterations": it, "log_likelihood": ll, "gradient_norm": grad}
    return rho


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """Closest density matrix in eigenvalue (Euclidean) sense: shift and truncate the spectrum."""
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = w / w.sum()
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    acc, i = 0.0, len(w) - 1
    while i >= 0 and w[i] + acc / (i + 1) < 0:
        acc += w[i]
        w[i] = 0.0
        i -= 1
    w[:i + 1] += acc / (i + 1)
    return (v * w) @ v.conj().T


def lstsq_reconstruct(record: TomoRecord, pset: ProjectorSet, freqs: np.ndarray | None = None) -> np.ndarray:
    """Unweighted least-squares inversion followed by projection onto physical states."""
    A, D, _ = _setup(record, pset)
    f = invert_confusion(record) if freqs is None else np.asarray(freqs)
    rho = linear_inversion(f, A, D)
    return project_to_physical(rho / np.trace(rho).real)


def _check_psd(m: np.ndarray, name: str) -> None:
    if np.max(np.abs(m - m.conj().T)) > 1e-8 or np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -1e-8:
        raise ValueError(f"{name} is not positive semidefinite")


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho, sigma, uhlmann: bool = False) -> float:
    """Tr(sqrt(rho) sigma sqrt(rho)); with ``uhlmann`` the squared trace-norm form."""
    rho = rho.density() if isinstance(rho, QuantumState) else np.asarray(rho, dtype=complex)
    if isinstance(sigma, QuantumState):
        sigma = sigma.density()
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.ndim == 1:
        sigma = np.outer(sigma, sigma.conj())
    _check_psd(rho, "rho")
    _check_psd(sigma, "sigma")
    sr = _sqrtm_psd(rho)
    inner = sr @ sigma @ sr
    if uhlmann:
        w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
        # round-off eigenvalues would contribute sqrt(eps) each
        w[w < 1e-12 * max(w.max(), 1e-300)] = 0.0
        return float(np.sum(np.sqrt(w)) ** 2)
    return float(np.trace(inner).real)


def mcweeny_purify(rho, tol: float = 1e-10, max_iter: int = 200, return_history: bool = False):
    """Iterate rho -> 3 rho^2 - 2 rho^3 with trace renormalization toward the dominant projector."""
    rho = rho.density() if isinstance(rho, QuantumState) else np.array(rho, dtype=complex)
    _check_psd(rho, "rho")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if len(w) > 1 and w[-1] - w[-2] < 1e-8:
        raise AmbiguousPurificationError("largest eigenvalue is degenerate")
    purities = [float(np.trace(rho @ rho).real)]
    for _ in range(max_iter):
        if np.max(np.abs(rho @ rho - rho)) < tol:
            break
        r2 = rho @ rho
        rho = 3 * r2 - 2 * r2 @ rho
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        purities.append(float(np.trace(rho @ rho).real))
        if purities[-1] < purities[-2] - 1e-12:
            raise RuntimeError("purity decreased during purification")
    if return_history:
        return rho, purities
    return rho


@dataclass(frozen=True)
class MCResult:
    label: str
    n_rep: int
    trials: int
    mean: float
    std: float
    fidelities: np.ndarray

    def row(self) -> dict:
        return {"label": self.label, "n_rep": self.n_rep, "trials": self.trials,
                "mean": self.mean, "std": self.std}


def _mc_trial(args):
    target, pset, n_rep, confusion, seed, estimator = args
    rec = simulate_tomography(target, pset, n_rep, confusion, seed)
    est = mle_reconstruct(rec, pset) if estimator == "mle" else lstsq_reconstruct(rec, pset)
    return fidelity(est, target)


def shot_noise_mc(target: QuantumState, pset: ProjectorSet, n_rep: int, trials: int, seed: int = 0,
                  confusion: ConfusionMatrix | None = None, estimator: str = "mle", label: str = "",
                  workers: int = 1) -> MCResult:
    """Fidelity spread of reconstructed states caused by finite shots.

    ``estimator`` is ``"mle"`` (diluted R rho R) or ``"lstsq"`` (least squares
    plus spectral projection).
    """
    if trials < 10:
        raise ValueError("trials must be at least 10")
    if estimator not in ("mle", "lstsq"):
        raise ValueError("estimator must be 'mle' or 'lstsq'")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    jobs = [(target, pset, n_rep, confusion, int(s.generate_state(1)[0]), estimator) for s in seeds]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            fids = list(ex.map(_mc_trial, jobs))
    else:
        fids = [_mc_trial(j) for j in jobs]
    fids = np.array(fids)
    return MCResult(label, n_rep, trials, float(fids.mean()), float(fids.std(ddof=1)), fids)


def mc_results_to_csv(results: Sequence[MCResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["label", "n_rep", "trials", "mean", "std"])
    w.writeheader()
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()
