"""Quasiprobability distributions on the sphere: spin coherent states, Husimi-Q and
tensor-product Stratonovich-Weyl Wigner functions.

A qudit of dimension d is a spin j = (d-1)/2 with |k> <-> |j, m = j-k>, so |0>
sits at the north pole. Multi-qudit distributions use the same rotation on
every qudit (equal-angle slice).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.linalg import expm
from scipy.special import comb

from .model import QuantumState


@dataclass(frozen=True)
class SphereGrid:
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.theta), len(self.phi)):
            raise ValueError("values shape does not match the angle axes")

    @property
    def n_theta(self) -> int:
        return len(self.theta)

    @property
    def n_phi(self) -> int:
        return len(self.phi)

    def integrate(self) -> float:
        """Sum of values * sin(theta) dtheta dphi."""
        dth = math.pi / (self.n_theta - 1)
        dph = 2 * math.pi / self.n_phi
        return float(np.sum(self.values * np.sin(self.theta)[:, None]) * dth * dph)


def sphere_angles(n_theta: int = 64, n_phi: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """theta in [0, pi] (both ends), phi in [0, 2 pi) (periodic)."""
    if n_theta < 16 or n_phi < 16:
        raise ValueError("grid sizes must be at least 16")
    return np.linspace(0, math.pi, n_theta), np.linspace(0, 2 * math.pi, n_phi, endpoint=False)


@lru_cache(maxsize=None)
def spin_operators(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_z, J_+, J_-) in the level basis."""
    if d < 2:
        raise ValueError("d must be at least 2")
    j = (d - 1) / 2
    m = j - np.arange(d)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return jz, jp, jp.conj().T


def rotation(theta: float, phi: float, d: int) -> np.ndarray:
    """exp[(theta/2)(e^{i phi} J_- - e^{-i phi} J_+)]."""
    _, jp, jm = spin_operators(d)
    return expm(0.5 * theta * (np.exp(1j * phi) * jm - np.exp(-1j * phi) * jp))


def spin_coherent_state(theta: float, phi: float, d: int) -> np.ndarray:
    return rotation(theta, phi, d)[:, 0]


def _coherent_amplitudes(theta: np.ndarray, phi: np.ndarray, d: int) -> np.ndarray:
    """Closed-form coherent-state amplitudes on the grid, shape (T, P, d)."""
    k = np.arange(d)
    c = np.cos(theta / 2)[:, None, None]
    s = np.sin(theta / 2)[:, None, None]
    mag = np.sqrt(comb(d - 1, k)) * c ** (d - 1 - k) * s ** k
    return mag * np.exp(1j * k * phi[None, :, None])


def _rotations(theta: np.ndarray, phi: np.ndarray, d: int) -> np.ndarray:
    """U(theta, phi) = e^{-i phi Jz} e^{-i theta Jy} e^{i phi Jz} on the grid, shape (T, P, d, d)."""
    jz, jp, jm = spin_operators(d)
    jy = (jp - jm) / 2j
    w, v = np.linalg.eigh(jy)
    ry = np.einsum("ik,tk,jk->tij", v, np.exp(-1j * np.outer(theta, w)), v.conj())
    m = np.diag(jz).real
    zl = np.exp(-1j * np.outer(phi, m))
    return zl[None, :, :, None] * ry[:, None, :, :] * zl.conj()[None, :, None, :]


@lru_cache(maxsize=None)
def _multipole_basis(d: int) -> np.ndarray:
    """Orthonormal diagonals t_l(m), l = 0..2j, from Gram-Schmidt on powers of m."""
    j = (d - 1) / 2
    m = j - np.arange(d)
    basis = []
    for l in range(d):
        v = m ** l
        for b in basis:
            v = v - (b @ v) * b
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise np.linalg.LinAlgError("degenerate multipole basis")
        basis.append(v / nrm)
    return np.array(basis)


@lru_cache(maxsize=None)
def sw_kernel(d: int) -> np.ndarray:
    """Diagonal weights of the Stratonovich-Weyl parity kernel in the level basis.

    Fixed by Tr(Pi T_l0) = sqrt((2l+1)/(2j+1)) for every multipole l.
    """
    t = _multipole_basis(d)
    c = np.sqrt((2 * np.arange(d) + 1) / d)
    if np.linalg.cond(t) > 1e8:
        raise np.linalg.LinAlgError("kernel system is ill-conditioned")
    return np.linalg.solve(t, c)


def _check_dims(state: QuantumState) -> int:
    dims = set(state.dims)
    if len(dims) != 1:
        raise ValueError("quasiprobability slices need equal qudit dimensions")
    return dims.pop()


def _tensor_expectation(rho: np.ndarray, n: int, d: int, K: np.ndarray) -> np.ndarray:
    """Tr(rho K^{(x)n}) for a stack of single-qudit operators K (P, d, d)."""
    P = K.shape[0]
    rest = d ** (n - 1)
    x = np.einsum("pba,aebf->pef", K, rho.reshape(d, rest, d, rest))
    for _ in range(n - 1):
        rest //= d
        x = np.einsum("pba,paebf->pef", K, x.reshape(P, d, rest, d, rest))
    return x.reshape(P)


def husimi_q(state: QuantumState, n_theta: int = 64, n_phi: int = 128, normalize: bool = True) -> SphereGrid:
    """<theta,phi|^{(x)n} rho |theta,phi>^{(x)n}, scaled so the maximum is 1 unless ``normalize`` is off."""
    d = _check_dims(state)
    n = len(state.dims)
    theta, phi = sphere_angles(n_theta, n_phi)
    v = _coherent_amplitudes(theta, phi, d).reshape(-1, d)
    K = np.einsum("pi,pj->pij", v, v.conj())
    q = _tensor_expectation(state.density(), n, d, K).real.reshape(n_theta, n_phi)
    if normalize:
        top = q.max()
        if top > 0:
            q = q / top
    return SphereGrid(theta, phi, q)


def wigner(state: QuantumState, n_theta: int = 64, n_phi: int = 128, return_imag: bool = False):
    """Tr[rho (U Pi U^dag)^{(x)n}] with U the coherent-state rotation; raw, unnormalized."""
    d = _check_dims(state)
    n = len(state.dims)
    theta, phi = sphere_angles(n_theta, n_phi)
    U = _rotations(theta, phi, d).reshape(-1, d, d)
    pi = sw_kernel(d)
    kern = np.einsum("pik,k,pjk->pij", U, pi, U.conj())
    w = _tensor_expectation(state.density(), n, d, kern).reshape(n_theta, n_phi)
    grid = SphereGrid(theta, phi, w.real)
    if return_imag:
        return grid, float(np.max(np.abs(w.imag)))
    return grid


def moment_matrix(grid: SphereGrid) -> np.ndarray:
    """Second moments <r r^T> of the distribution over the unit sphere."""
    th, ph = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    r = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    w = grid.values * np.sin(th)
    m = np.einsum("tp,tpi,tpj->ij", w, r, r)
    return m / w.sum()


def squeezing_axis(grid: SphereGrid) -> np.ndarray:
    """Normal of the great circle the distribution is spread along (least second moment)."""
    w, v = np.linalg.eigh(moment_matrix(grid))
    axis = v[:, 0]
    return axis if axis[np.argmax(np.abs(axis))] > 0 else -axis


def axis_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Angle between two undirected axes, in [0, pi/2]."""
    c = abs(float(np.dot(a, b))) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.acos(min(1.0, c))


def export_grid(grid: SphereGrid, path) -> Path:
    """CSV rows (theta, phi, value) with 9 significant digits."""
    if grid.values.size == 0:
        raise ValueError("empty grid")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "phi", "value"])
        for i, t in enumerate(grid.theta):
            for k, p in enumerate(grid.phi):
                w.writerow([f"{t:.9g}", f"{p:.9g}", f"{grid.values[i, k]:.9g}"])
    return path


def load_grid(path) -> SphereGrid:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))[1:]
    if not rows:
        raise ValueError("empty grid file")
    data = np.array(rows, dtype=float)
    theta = np.unique(data[:, 0])
    phi = np.unique(data[:, 1])
    return SphereGrid(theta, phi, data[:, 2].reshape(len(theta), len(phi)))
