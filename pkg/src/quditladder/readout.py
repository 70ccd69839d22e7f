"""Dispersive readout: resonator response per level, IQ sampling and confusion matrices."""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .model import QuantumState, all_ditstrings, levels_of, total_dim

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ReadoutModel:
    """One qudit's readout channel.

    ``chis`` are the dispersive constants chi_k (rad/s); the resonator is pulled
    to ``resonator_freq - (chi_k - chi_{k-1})`` when the qudit is in |k>.
    """
    resonator_freq: float
    linewidth: float
    chis: tuple[float, ...]
    probe_freq: float | None = None
    snr: float = 5.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "chis", tuple(float(c) for c in self.chis))
        if self.linewidth <= 0:
            raise ValueError("linewidth must be positive")
        if self.snr <= 0:
            raise ValueError("snr must be positive")
        if len(self.chis) < 2:
            raise ValueError("need chi_k for at least two levels")
        if self.probe_freq is None:
            object.__setattr__(self, "probe_freq", float(np.mean(self.pulled_frequencies())))

    @property
    def dim(self) -> int:
        return len(self.chis)

    @classmethod
    def from_couplings(cls, resonator_freq: float, linewidth: float, g_k: Sequence[float],
                       delta_kr: Sequence[float], **kw) -> "ReadoutModel":
        """chi_k = g_k^2 / Delta_kr."""
        chis = [g ** 2 / dl for g, dl in zip(g_k, delta_kr)]
        return cls(resonator_freq, linewidth, tuple(chis), **kw)

    @classmethod
    def default(cls, d: int, snr: float = 5.0, seed: int = 0) -> "ReadoutModel":
        """Placeholder transmon-like parameters; not fitted to any device."""
        w_r, w_q, alpha, g0 = TWO_PI * 7.2e9, TWO_PI * 5.5e9, TWO_PI * 270e6, TWO_PI * 75e6
        g_k = [g0 * math.sqrt(k + 1) for k in range(d)]
        delta = [w_q - k * alpha - w_r for k in range(d)]
        return cls.from_couplings(w_r, TWO_PI * 1.5e6, g_k, delta, snr=snr, seed=seed)

    def pulled_frequencies(self) -> np.ndarray:
        chi = np.array(self.chis)
        prev = np.concatenate([[0.0], chi[:-1]])
        return self.resonator_freq - (chi - prev)

    def centroids(self) -> np.ndarray:
        return np.array([resonator_response(self, k) for k in range(self.dim)])

    def sigma(self) -> float:
        c = self.centroids()
        sep = min(abs(a - b) for a, b in combinations(c, 2))
        return 0.0 if math.isinf(self.snr) else sep / self.snr


def resonator_response(model: ReadoutModel, k: int) -> complex:
    """Lorentzian transmission at the probe frequency with the resonator pulled by level k."""
    w_k = model.pulled_frequencies()[k]
    half = model.linewidth / 2
    return complex(half / (half - 1j * (model.probe_freq - w_k)))


def classify(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Nearest-centroid assignment."""
    return np.argmin(np.abs(points[..., None] - centroids), axis=-1)


def _models_for(model, n: int) -> list[ReadoutModel]:
    if isinstance(model, ReadoutModel):
        return [model] * n
    models = list(model)
    if len(models) != n:
        raise ValueError("need one readout model per qudit")
    return models


def _sample_levels(models, levels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Noisy IQ draw and classification for each qudit column of ``levels``."""
    out = np.empty_like(levels)
    for q, m in enumerate(models):
        c = m.centroids()
        pts = c[levels[:, q]]
        s = m.sigma()
        if s > 0:
            pts = pts + s * (rng.standard_normal(len(pts)) + 1j * rng.standard_normal(len(pts)))
        out[:, q] = classify(pts, c)
    return out


def _flat(levels: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    strides = np.cumprod([1] + list(dims[:-1]))
    return levels @ strides


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-stochastic P(measured | prepared) over joint basis states."""
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        D = total_dim(self.dims)
        if m.shape != (D, D):
            raise ValueError("matrix shape does not match dims")
        if np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
            raise ValueError("entries must lie in [0, 1]")
        if np.max(np.abs(m.sum(axis=1) - 1)) > 1e-9:
            raise ValueError("rows must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(self.dims))

    @classmethod
    def identity(cls, dims) -> "ConfusionMatrix":
        return cls(np.eye(total_dim(dims)), tuple(dims))

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def kron(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        """Joint matrix with ``self`` on the lower sites."""
        return ConfusionMatrix(np.kron(other.matrix, self.matrix), self.dims + other.dims)

    def apply(self, probs: np.ndarray) -> np.ndarray:
        """Measured distribution(s) for true distribution(s) along the last axis."""
        return np.asarray(probs) @ self.matrix

    def inverse(self) -> np.ndarray:
        """Inverse, or the pseudo-inverse with a warning when ill-conditioned."""
        if self.condition_number > 1e12:
            warnings.warn("confusion matrix is singular; using the pseudo-inverse", RuntimeWarning)
            return np.linalg.pinv(self.matrix)
        return np.linalg.inv(self.matrix)

    def correct(self, measured: np.ndarray) -> np.ndarray:
        """Undo misassignment on measured distribution(s) along the last axis."""
        return np.asarray(measured) @ self.inverse()

    def to_csv(self) -> str:
        labels = all_ditstrings(self.dims)
        buf = io.StringIO()
        buf.write("prepared\\measured," + ",".join(labels) + "\n")
        for lab, row in zip(labels, self.matrix):
            buf.write(lab + "," + ",".join(repr(float(x)) for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, dims: Sequence[int]) -> "ConfusionMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln]
        header = lines[0].split(",")[1:]
        if header != all_ditstrings(dims):
            raise ValueError("CSV headers do not match dims")
        rows = [[float(x) for x in ln.split(",")[1:]] for ln in lines[1:]]
        return cls(np.array(rows), tuple(dims))


@dataclass(frozen=True)
class ReadoutResult:
    counts: np.ndarray
    confusion: ConfusionMatrix
    dims: tuple[int, ...]

    def as_dict(self) -> dict[str, int]:
        return {lab: int(c) for lab, c in zip(all_ditstrings(self.dims), self.counts) if c}


def sample_and_classify(model, state: QuantumState, shots: int, seed: int | None = None,
                        confusion_shots: int | None = None) -> ReadoutResult:
    """Sample joint ditstrings, blur each dit in the IQ plane and reassign by nearest centroid.

    Also returns a confusion estimate from ``confusion_shots`` calibration shots
    per basis state (default: ``shots``).
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    dims = tuple(state.dims)
    models = _models_for(model, len(dims))
    if any(m.dim != d for m, d in zip(models, dims)):
        raise ValueError("readout model dimension differs from qudit dimension")
    seed = models[0].seed if seed is None else seed
    rng = np.random.default_rng([seed, 0])
    p = state.probabilities()
    p = p / p.sum()
    idx = rng.choice(len(p), size=shots, p=p)
    levels = np.array([levels_of(i, dims) for i in idx]).reshape(shots, len(dims))
    measured = _flat(_sample_levels(models, levels, rng), dims)
    counts = np.bincount(measured, minlength=len(p))
    conf = estimate_confusion(models, dims, max(confusion_shots or shots, 100), seed=seed)
    return ReadoutResult(counts, conf, dims)


def estimate_confusion(model, dims: Sequence[int], shots_per_state: int, seed: int | None = None) -> ConfusionMatrix:
    """Prepare every basis state ideally, sample and normalize rows."""
    if shots_per_state < 100:
        raise ValueError("shots_per_state must be at least 100")
    dims = tuple(dims)
    models = _models_for(model, len(dims))
    seed = models[0].seed if seed is None else seed
    D = total_dim(dims)
    mat = np.zeros((D, D))
    for i in range(D):
        rng = np.random.default_rng([seed, 1, i])
        levels = np.tile(levels_of(i, dims), (shots_per_state, 1))
        measured = _flat(_sample_levels(models, levels, rng), dims)
        mat[i] = np.bincount(measured, minlength=D) / shots_per_state
    cm = ConfusionMatrix(mat, dims)
    if cm.condition_number > 1e12:
        warnings.warn("estimated confusion matrix is singular; corrections will use the pseudo-inverse",
                      RuntimeWarning)
    return cm


def expected_confusion(model: ReadoutModel, grid: int = 801, span: float = 8.0) -> np.ndarray:
    """Single-qudit assignment probabilities by integrating the Gaussian blobs over Voronoi cells."""
    c = model.centroids()
    s = model.sigma()
    if s == 0:
        return np.eye(model.dim)
    x = np.linspace(-span, span, grid)
    xx, yy = np.meshgrid(x, x)
    w = np.exp(-(xx ** 2 + yy ** 2) / 2)
    w /= w.sum()
    out = np.zeros((model.dim, model.dim))
    for k, ck in enumerate(c):
        pts = ck + s * (xx + 1j * yy)
        lab = classify(pts, c)
        out[k] = np.bincount(lab.ravel(), weights=w.ravel(), minlength=model.dim)
    return out


def two_level_assignment_fidelity(snr: float) -> float:
    """Correct-assignment probability of two equal circular Gaussians a distance snr*sigma apart."""
    return 0.5 * (1 + math.erf(snr / (2 * math.sqrt(2))))
