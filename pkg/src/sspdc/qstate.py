"""Frequency-bin two-photon states and simple source metrics.

Basis order is ``(|w1 w2>, |w2 w1>)``: photon at w1 in H and w2 in V, then
the swapped assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

H_PLANCK = 6.62607015e-34
C_LIGHT = 299792458.0
EIGEN_TOL = 1e-10


@dataclass(frozen=True)
class FrequencyBinState:
    a1: complex
    a2: complex

    def __post_init__(self):
        if abs(abs(self.a1) ** 2 + abs(self.a2) ** 2 - 1.0) > 1e-12:
            raise ValueError("state amplitudes must be normalized")

    @classmethod
    def ideal(cls, theta: float) -> "FrequencyBinState":
        """Target whose projector has coherence <w1w2|P|w2w1> = e^{i theta} / 2.

        This matches the ``density_matrix`` parametrization, so that
        ``density_matrix(0.5, 1, theta)`` is exactly this pure state.
        """
        return cls(1 / math.sqrt(2), complex(np.exp(-1j * theta)) / math.sqrt(2))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a1, self.a2], dtype=complex)


@dataclass(frozen=True)
class FrequencyBinDensityMatrix:
    rho: np.ndarray
    p: float
    visibility: float
    theta: float
    physical: bool
    omega1: Optional[float] = None
    omega2: Optional[float] = None

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)


def physicality_bound(p: float) -> float:
    """Largest visibility a balance ``p`` admits: 2 sqrt(p (1 - p))."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return 2.0 * math.sqrt(p * (1.0 - p))


def density_matrix(p: float, V: float, theta: float, *, omega1: Optional[float] = None,
                   omega2: Optional[float] = None) -> FrequencyBinDensityMatrix:
    """rho = [[p, V/2 e^{i theta}], [V/2 e^{-i theta}, 1 - p]].

    Inputs violating positivity are kept and flagged ``physical=False``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not (V >= 0 and math.isfinite(V)):
        raise ValueError("visibility must be finite and >= 0")
    c = 0.5 * V * np.exp(1j * theta)
    rho = np.array([[p, c], [np.conj(c), 1.0 - p]], dtype=complex)
    physical = bool(np.linalg.eigvalsh(rho).min() >= -EIGEN_TOL)
    return FrequencyBinDensityMatrix(rho, p, V, theta, physical, omega1, omega2)


def fidelity(rho: FrequencyBinDensityMatrix, theta_ref: float) -> float:
    """Overlap <psi|rho|psi> with the ideal state of phase ``theta_ref``.

    Equals 1/2 + (V/2) cos(theta - theta_ref) for the parametrized matrix.
    """
    if not rho.physical:
        raise ValueError("fidelity is undefined for a non-physical matrix")
    psi = FrequencyBinState.ideal(theta_ref).vector
    return float(np.real(np.conj(psi) @ rho.rho @ psi))


@dataclass(frozen=True)
class BalanceEstimate:
    p: float
    stderr: float
    total: float


def balance_from_counts(singles1: float, singles2: float,
                        integration_time: Optional[float] = None) -> BalanceEstimate:
    """p = s1 / (s1 + s2) with binomial standard error.

    Rates (cps) with ``integration_time`` (s) are turned into counts first.
    """
    if singles1 < 0 or singles2 < 0:
        raise ValueError("counts must be >= 0")
    total = singles1 + singles2
    if total <= 0:
        raise ValueError("total counts must be positive")
    p = singles1 / total
    n = total * integration_time if integration_time else total
    return BalanceEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


@dataclass(frozen=True)
class SourceMetrics:
    pair_rate: float
    photon_flux: float
    conversion_efficiency: float
    heralding1: float
    heralding2: float


def pump_photon_flux(power_mw: float, lambda_p_um: float) -> float:
    return power_mw * 1e-3 * lambda_p_um * 1e-6 / (H_PLANCK * C_LIGHT)


def source_metrics(singles1: float, singles2: float, coincidences: float,
                   pump_power_mw: float, lambda_p_um: float) -> SourceMetrics:
    """Klyshko-style estimate: pairs R = s1 s2 / C per pump photon."""
    if coincidences <= 0:
        raise ValueError("coincidence rate must be positive")
    if pump_power_mw <= 0 or lambda_p_um <= 0:
        raise ValueError("pump power and wavelength must be positive")
    rate = singles1 * singles2 / coincidences
    flux = pump_photon_flux(pump_power_mw, lambda_p_um)
    return SourceMetrics(rate, flux, rate / flux, coincidences / singles2,
                         coincidences / singles1)


def format_density_report(rho: FrequencyBinDensityMatrix,
                          theta_ref: Optional[float] = None) -> str:
    m = rho.rho
    lines = ["rho_real ="]
    lines += ["  " + " ".join(f"{v:.6f}" for v in row) for row in m.real]
    lines += ["rho_imag ="]
    lines += ["  " + " ".join(f"{v:.6f}" for v in row) for row in m.imag]
    lines += [f"p = {rho.p:.9g}", f"visibility = {rho.visibility:.9g}",
              f"theta = {rho.theta:.9g}",
              "eigenvalues = " + ", ".join(f"{v:.9g}" for v in rho.eigenvalues),
              f"physical = {'true' if rho.physical else 'false'}"]
    if rho.physical:
        ref = rho.theta if theta_ref is None else theta_ref
        lines.append(f"fidelity = {fidelity(rho, ref):.9g}")
    else:
        lines.append("fidelity = nan")
    return "\n".join(lines) + "\n"
