"""Simulated s-SPDC spectra: sinc^2 phase matching averaged over a Gaussian pump.

For every grid wavelength the grid value is the photon carried on the
process's signal axis, so the extraordinary (V) channel collects process
``SIG_E_IDL_O`` and the ordinary (H) channel ``SIG_O_IDL_E``.  Because the
two processes are mirror images, each channel shows both wavelengths of a
simultaneous pair.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from . import _kernels
from .dispersion import Axis, DispersionModel, DomainError
from .phasematch import PROCESSES, QpmProcess, delta_k

TWO_PI = 2.0 * math.pi
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
SPECTRUM_CSV_HEADER = ("lambda_um", "intensity_h", "intensity_v")

_PUMP_SPAN_SIGMA = 5.5
_MAX_PANELS = 4000
_CHUNK_ELEMENTS = 4_000_000


def channel_of(process: QpmProcess) -> str:
    return "V" if Axis(process.signal_axis) is Axis.EXTRAORDINARY else "H"


@dataclass(frozen=True)
class SpectrumConfig:
    lambda_p: float
    pump_fwhm: float
    period: float
    temperature: float
    crystal_length_mm: float
    grid: tuple[float, float, float]
    processes: tuple[QpmProcess, ...] = PROCESSES
    type0_floor: float = 0.0
    nodes_per_panel: int = 21

    def __post_init__(self):
        lo, hi, step = self.grid
        if self.crystal_length_mm <= 0:
            raise ValueError("crystal length must be positive")
        if step <= 0 or not lo < hi:
            raise ValueError("grid must be (min, max, step) with min < max and step > 0")
        if self.pump_fwhm < 0:
            raise ValueError("pump FWHM must be >= 0")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.type0_floor < 0:
            raise ValueError("type-0 floor must be >= 0")
        if self.nodes_per_panel < 1:
            raise ValueError("need at least one node per panel")

    def wavelengths(self) -> np.ndarray:
        lo, hi, step = self.grid
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(n)


@dataclass(frozen=True)
class SpdcSpectrum:
    wavelengths: np.ndarray
    intensity_h: np.ndarray
    intensity_v: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.wavelengths.tolist(), self.intensity_h.tolist(),
                        self.intensity_v.tolist()))

    def channel(self, name: str) -> np.ndarray:
        return {"H": self.intensity_h, "V": self.intensity_v}[name.upper()]


def phase_matching_intensity(model: DispersionModel, process: QpmProcess,
                             lambda_p: float, lambda_s, T: float, period: float,
                             length_mm: float):
    """sinc^2((dk - 2 pi / period) L / 2) with the idler from energy conservation."""
    lambda_s = np.asarray(lambda_s, dtype=float)
    inv_i = 1.0 / lambda_p - 1.0 / lambda_s
    if np.any(inv_i <= 0):
        raise DomainError("signal must be longer than the pump wavelength")
    lambda_i = 1.0 / inv_i
    dk = delta_k(model, process, lambda_p, lambda_s, lambda_i, T)
    x = (np.asarray(dk) - TWO_PI / period) * length_mm * 1e3 / 2.0
    out = np.sinc(x / np.pi) ** 2
    return float(out) if out.ndim == 0 else out


def _dk_dpump(model, process, lp, ls, T, h=1e-6):
    def dk(p):
        return delta_k(model, process, p, ls, 1.0 / (1.0 / p - 1.0 / ls), T)
    return (dk(lp + h) - dk(lp - h)) / (2 * h)


def pump_nodes(config: SpectrumConfig, model: DispersionModel) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights (summing to 1) over the pump lineshape.

    Composite Gauss-Legendre over +-5.5 sigma.  Panels are no wider than
    half the sinc^2 lobe along the pump axis so the fixed per-panel rule
    resolves the integrand.
    """
    lp = config.lambda_p
    if config.pump_fwhm == 0:
        return np.array([lp]), np.array([1.0])
    sigma = config.pump_fwhm * FWHM_TO_SIGMA
    half_span = _PUMP_SPAN_SIGMA * sigma
    model.check_wavelength([lp - half_span, lp + half_span])

    slope = 0.0
    lam = config.wavelengths()
    probe = lam[np.linspace(0, len(lam) - 1, min(len(lam), 64)).astype(int)]
    for ls in probe:
        for proc in config.processes:
            try:
                slope = max(slope, abs(_dk_dpump(model, proc, lp, float(ls),
                                                 config.temperature)))
            except (DomainError, ZeroDivisionError):
                pass  # partner outside the model for this probe
    length_um = config.crystal_length_mm * 1e3
    if slope > 0:
        panel = 0.5 * TWO_PI / (length_um * slope)
        n_panels = int(min(_MAX_PANELS, max(1, math.ceil(2 * half_span / panel))))
    else:
        n_panels = 1
    x, w = np.polynomial.legendre.leggauss(config.nodes_per_panel)
    edges = np.linspace(lp - half_span, lp + half_span, n_panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    weights = weights * np.exp(-0.5 * ((nodes - lp) / sigma) ** 2)
    return nodes, weights / weights.sum()


def simulate_spectrum(config: SpectrumConfig, model: DispersionModel) -> SpdcSpectrum:
    lam = config.wavelengths()
    model.check_wavelength(lam)
    model.check_wavelength(config.lambda_p)
    model.check_temperature(config.temperature)
    nodes, weights = pump_nodes(config, model)
    f = model.thermal_parameter(config.temperature)
    k_qpm = TWO_PI / config.period
    half_length = config.crystal_length_mm * 1e3 / 2.0
    lo, hi = model.wavelength_range

    chans = {"H": np.zeros_like(lam), "V": np.zeros_like(lam)}
    rows = max(1, _CHUNK_ELEMENTS // len(nodes))
    for proc in config.processes:
        cp = model.coefficients(proc.pump_axis)
        cs = model.coefficients(proc.signal_axis)
        ci = model.coefficients(proc.idler_axis)
        out = chans[channel_of(proc)]
        for start in range(0, len(lam), rows):
            sl = slice(start, start + rows)
            out[sl] += _kernels.pump_averaged_intensity(
                cp, cs, ci, f, lam[sl], nodes, weights, k_qpm, half_length, lo, hi)

    h, v = chans["H"], chans["V"]
    peak = max(h.max(), v.max())
    if peak > 0:
        h, v = h / peak, v / peak
    if config.type0_floor:
        h = h + config.type0_floor
        peak = max(h.max(), v.max())
        h, v = h / peak, v / peak
    return SpdcSpectrum(lam, h, v)


def _parabolic(y0, y1, y2):
    den = y0 - 2 * y1 + y2
    return 0.0 if den == 0 else 0.5 * (y0 - y2) / den


def peak_positions(spectrum: SpdcSpectrum, min_prominence: float = 0.05,
                   channels: Sequence[str] = ("H", "V")) -> list[tuple[float, str]]:
    """Local maxima with at least ``min_prominence`` (fraction of the peak)."""
    lam = spectrum.wavelengths
    out = []
    for ch in channels:
        y = spectrum.channel(ch)
        if not np.any(y > 0):
            continue
        idx, _ = find_peaks(y, prominence=min_prominence * y.max())
        for k in idx:
            if 0 < k < len(y) - 1:
                d = _parabolic(y[k - 1], y[k], y[k + 1])
                out.append((float(lam[k] + d * (lam[k + 1] - lam[k])), ch))
            else:
                out.append((float(lam[k]), ch))
    out.sort()
    return out


def peak_fwhm(wavelengths, intensity, center: float) -> float:
    """Full width at half maximum of the peak nearest ``center``.

    Walks outward from the sample maximum near ``center`` and linearly
    interpolates the half-maximum crossings.
    """
    lam = np.asarray(wavelengths, dtype=float)
    y = np.asarray(intensity, dtype=float)
    k = int(np.argmin(np.abs(lam - center)))
    while 0 < k < len(y) - 1 and (y[k + 1] > y[k] or y[k - 1] > y[k]):
        k = k + 1 if y[k + 1] > y[k] else k - 1
    half = 0.5 * y[k]
    j = k
    while j > 0 and y[j] > half:
        j -= 1
    m = k
    while m < len(y) - 1 and y[m] > half:
        m += 1
    if y[j] > half or y[m] > half:
        raise ValueError("peak not resolved inside the grid")
    left = lam[j] + (half - y[j]) * (lam[j + 1] - lam[j]) / (y[j + 1] - y[j])
    right = lam[m - 1] + (half - y[m - 1]) * (lam[m] - lam[m - 1]) / (y[m] - y[m - 1])
    return float(right - left)


def write_spectrum_csv(path_or_file, spectrum: SpdcSpectrum) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_CSV_HEADER)
        for row in spectrum.samples:
            w.writerow([f"{v:.9g}" for v in row])
    finally:
        if own:
            fh.close()


def read_spectrum_csv(path) -> SpdcSpectrum:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return SpdcSpectrum(data[:, 0], data[:, 1], data[:, 2])
