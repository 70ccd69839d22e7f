"""Closed-form two-photon interaction formulas for a pair of driven qudits.

Conventions: detunings are ``Delta_i = omega_d - omega_q_i`` and the drive ratio
is ``lam = Omega_1 / Omega_2``. ``delta12`` below means ``omega_q1 - omega_q2``.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DegeneratePairError, OutOfRegimeError, SingularityError, UndefinedAngleError
from .model import DressedAngles, InteractionRates


def duffing_from_transmon(ec: float, ej: float) -> tuple[float, float]:
    """Duffing frequency and anharmonicity (both Hz) from E_C and E_J (Hz)."""
    if ec <= 0 or ej <= 0:
        raise OutOfRegimeError("E_C and E_J must be positive")
    if ej / ec <= 50:
        raise OutOfRegimeError(f"E_J/E_C = {ej / ec:.1f} is not in the transmon regime (> 50)")
    return math.sqrt(8 * ej * ec) - ec, ec


def effective_coupling(g_ar: float, g_br: float, delta_ar: float, delta_br: float) -> float:
    """Resonator-mediated exchange rate ``(g_ar g_br / 2)(1/D_ar + 1/D_br)``."""
    if delta_ar == 0 or delta_br == 0:
        raise SingularityError("qudit-resonator detuning must be nonzero")
    return 0.5 * g_ar * g_br * (1 / delta_ar + 1 / delta_br)


def dressed_qudit_frequency(w_q: float, g_qr: float, w_r: float) -> float:
    """Resonator-dressed qudit frequency ``w_q + g^2/(w_q - w_r)``."""
    if w_q == w_r:
        raise SingularityError("qudit and resonator are degenerate")
    return w_q + g_qr ** 2 / (w_q - w_r)


def effective_coupling_from_frequencies(g_ar, g_br, w_a, w_b, w_r, dressed: bool = False) -> float:
    """Effective coupling with bare (default) or resonator-dressed detunings."""
    if dressed:
        w_a = dressed_qudit_frequency(w_a, g_ar, w_r)
        w_b = dressed_qudit_frequency(w_b, g_br, w_r)
    return effective_coupling(g_ar, g_br, w_a - w_r, w_b - w_r)


def mixing_angle(delta: float, omega: float) -> tuple[float, float]:
    """(cos theta, sin theta) of the drive-induced eigenbasis rotation."""
    r = math.hypot(delta, omega)
    if r == 0:
        raise UndefinedAngleError("mixing angle undefined for delta = omega = 0")
    return delta / r, omega / r


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def dressed_frequency(delta: float, omega: float) -> float:
    """``sign(delta) * sqrt(delta^2 + omega^2)`` with sign(0) = +1."""
    mixing_angle(delta, omega)
    return _sign(delta) * math.hypot(delta, omega)


def drive_angles(w_d: float, wq1: float, wq2: float, omega: float, lam: float = 1.0) -> DressedAngles:
    """Angles for a monochromatic drive at ``w_d``; ``omega`` is the amplitude on qudit 2."""
    return DressedAngles.from_drives(w_d - wq1, lam * omega, w_d - wq2, omega)


def two_photon_rate(g_kl: float, angles: DressedAngles) -> float:
    """Oscillation rate of the |k,l> <-> |k+1,l+1> exchange."""
    c1, c2 = angles.cos_1, angles.cos_2
    return 0.5 * g_kl * ((1 + c1) * (1 + c2) + (1 - c1) * (1 - c2))


def interaction_rates(g: float, angles: DressedAngles, phi1: float = 0.0, phi2: float = 0.0) -> InteractionRates:
    """J_I, J_Q, J_ZZ of the dressed-frame coupling and the swap rate 4|J_XY|."""
    c1, c2 = angles.cos_1, angles.cos_2
    s1, s2 = math.sin(angles.theta_1), math.sin(angles.theta_2)
    plus, minus = (1 + c1) * (1 + c2), (1 - c1) * (1 - c2)
    j_i = g / 8 * (plus * math.cos(2 * phi1) + minus * math.cos(2 * phi2))
    j_q = -g / 8 * (plus * math.sin(2 * phi1) + minus * math.sin(2 * phi2))
    j_zz = -g / 2 * s1 * s2 * math.cos(phi1 - phi2)
    return InteractionRates(j_i, j_q, j_zz, 4 * math.hypot(j_i, j_q))


def symmetric_limit_rates(g: float, omega: float, delta12: float) -> InteractionRates:
    """Rates for lam = 1, zero phases, driven at the midpoint."""
    f = omega ** 2 / (omega ** 2 + delta12 ** 2 / 4)
    return InteractionRates(g / 4 * f, 0.0, -g / 2 * f, g * f)


def single_drive_limit_rates(g: float, omega: float, delta12: float) -> InteractionRates:
    """Rates for lam = 0 (only qudit 2 driven) at the optimal frequency.

    x = delta12/2 - omega^2/(2 delta12) is the driven qudit's detuning there and
    the undriven qudit sits at cos(theta_1) = -sign(delta12).
    """
    if delta12 == 0:
        raise DegeneratePairError("qudit frequencies coincide")
    x = delta12 / 2 - omega ** 2 / (2 * delta12)
    j_i = g / 4 * (1 - _sign(delta12) * x / math.hypot(omega, x))
    return InteractionRates(j_i, 0.0, 0.0, 4 * abs(j_i))


def optimal_drive_frequency_2ls(wq1: float, wq2: float, omega: float, lam: float = 1.0) -> float:
    """Drive frequency at which the two dressed frequencies cancel (two-level model).

    ``omega`` is the amplitude on qudit 2; qudit 1 sees ``lam * omega``.
    """
    if wq1 == wq2:
        raise DegeneratePairError("qudit frequencies coincide")
    return 0.5 * (wq1 + wq2) + (lam ** 2 - 1) * omega ** 2 / (2 * (wq1 - wq2))


def subspace_rabi_rate(base_omega: float, k: int) -> float:
    """Rabi rate of the k -> k+1 transition for 0-1 rate ``base_omega``."""
    if k < 0:
        raise ValueError("level index must be non-negative")
    return math.sqrt(k + 1) * base_omega


def coupling_matrix_element(g01: float, k: int, l: int) -> float:
    """Exchange rate between |k+1,l> and |k,l+1>."""
    if k < 0 or l < 0:
        raise ValueError("level indices must be non-negative")
    return g01 * math.sqrt((k + 1) * (l + 1))


def transmon_levels_charge_basis(ec: float, ej: float, n_charge: int = 41, ng: float = 0.0) -> np.ndarray:
    """Eigenenergies of the charge-basis transmon Hamiltonian (same units as inputs)."""
    half = n_charge // 2
    n = np.arange(-half, half + 1, dtype=float)
    h = np.diag(4 * ec * (n - ng) ** 2) - 0.5 * ej * (np.eye(len(n), k=1) + np.eye(len(n), k=-1))
    return np.linalg.eigvalsh(h)
