"""Non-degenerate Hong-Ou-Mandel interferograms: model, synthesis and fitting.

The normalized coincidence rate is

    C_N(t) = 1/2 (1 - V cos(2 pi dnu t + theta) (1 - |t| / t_c)),  |t| < t_c

and exactly 1/2 outside the triangular envelope.  Delays are in ps and the
beat frequency in THz, so ``dnu * t`` is dimensionless.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import hilbert

C_UM_PER_PS = 299.792458  # also um * THz
MAX_VISIBILITY = 1.2
PARAM_NAMES = ("visibility", "beat_thz", "phase_rad", "coherence_ps")


def canonical_phase(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t == -math.pi else t


@dataclass(frozen=True)
class HomParams:
    visibility: float
    beat_thz: float
    phase_rad: float
    coherence_ps: float

    def __post_init__(self):
        if not 0.0 <= self.visibility <= MAX_VISIBILITY:
            raise ValueError(f"visibility {self.visibility} outside [0, {MAX_VISIBILITY}]")
        if self.beat_thz < 0:
            raise ValueError("beat frequency must be >= 0")
        if not self.coherence_ps > 0:
            raise ValueError("coherence time must be positive")
        object.__setattr__(self, "phase_rad", canonical_phase(self.phase_rad))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.visibility, self.beat_thz, self.phase_rad, self.coherence_ps)


@dataclass(frozen=True)
class HomFringe:
    """Delay scan.  ``kind`` is "raw" (coincidence counts) or "normalized" (C_N)."""

    delays: np.ndarray
    values: np.ndarray
    kind: str = "raw"
    far_counts: Optional[float] = None
    integration_time: Optional[float] = None

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if d.shape != v.shape or d.ndim != 1:
            raise ValueError("delays and values must be 1-D arrays of equal length")
        if len(d) > 1 and np.any(np.diff(d) <= 0):
            raise ValueError("delays must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("counts must be >= 0")
        if self.kind not in ("raw", "normalized"):
            raise ValueError(f"unknown fringe kind {self.kind!r}")
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class HomFitResult:
    params: HomParams
    uncertainties: dict[str, float]
    residual_rms: float
    converged: bool
    message: str = ""
    nfev: int = 0
    covariance: np.ndarray = field(default=None, repr=False, compare=False)


def hom_model(params: HomParams, t):
    t = np.asarray(t, dtype=float)
    V, nu, theta, tc = params.as_tuple()
    env = np.clip(1.0 - np.abs(t) / tc, 0.0, None)
    out = 0.5 * (1.0 - V * np.cos(2 * np.pi * nu * t + theta) * env)
    out = np.where(np.abs(t) < tc, out, 0.5)
    return float(out) if out.ndim == 0 else out


def normalize(fringe: HomFringe, far_counts: Optional[float] = None) -> HomFringe:
    """C_N = C_O / (2 C_F)."""
    if fringe.kind == "normalized":
        return fringe
    cf = far_counts if far_counts is not None else fringe.far_counts
    if cf is None:
        cf = estimate_far_counts(fringe)
    if not cf > 0:
        raise ValueError("far-delay reference count must be positive")
    return HomFringe(fringe.delays, fringe.values / (2.0 * cf), "normalized",
                     cf, fringe.integration_time)


def estimate_far_counts(fringe: HomFringe, edge_fraction: float = 0.1) -> float:
    """C_F from the outermost delays on both sides, where C_O = C_F."""
    n = max(1, int(len(fringe.delays) * edge_fraction))
    edge = np.concatenate([fringe.values[:n], fringe.values[-n:]])
    return float(np.mean(edge))


def stage_to_delay(displacement_um):
    """Retro-reflecting arm: a stage move d changes the delay by 2 d / c (ps)."""
    return 2.0 * np.asarray(displacement_um, dtype=float) / C_UM_PER_PS


def synthesize(params: HomParams, delay_range: tuple[float, float], step: float,
               mean_far_counts: float, seed: int,
               integration_time: Optional[float] = None) -> HomFringe:
    """Poisson coincidence counts with mean 2 C_F C_N(t)."""
    if step <= 0:
        raise ValueError("step must be positive")
    if not mean_far_counts > 0:
        raise ValueError("mean_far_counts must be positive")
    lo, hi = delay_range
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    t = lo + step * np.arange(n)
    rng = np.random.default_rng(seed)
    counts = rng.poisson(2.0 * mean_far_counts * hom_model(params, t)).astype(float)
    return HomFringe(t, counts, "raw", float(mean_far_counts), integration_time)


def beat_from_wavelengths(lambda_s: float, lambda_i: float) -> float:
    """Optical frequency difference c |1/ls - 1/li| in THz."""
    if lambda_s <= 0 or lambda_i <= 0:
        raise ValueError("wavelengths must be positive")
    return C_UM_PER_PS * abs(1.0 / lambda_s - 1.0 / lambda_i)


# -- fitting -----------------------------------------------------------------


def _uniform(t, y):
    dt = float(np.median(np.diff(t)))
    tu = np.arange(t[0], t[-1] + 0.5 * dt, dt)
    return tu, np.interp(tu, t, y), dt


def initial_guess(t, cn) -> HomParams:
    """Seeds from the data: FFT beat, Hilbert envelope, demodulated phase."""
    tu, yu, dt = _uniform(t, cn)
    r = yu - 0.5
    span = tu[-1] - tu[0]
    nfft = 1 << int(math.ceil(math.log2(len(r) * 16)))
    spec = np.abs(np.fft.rfft(r * np.hanning(len(r)), nfft))
    freqs = np.fft.rfftfreq(nfft, dt)
    spec[freqs < 1.0 / span] = 0.0
    nu = float(freqs[int(np.argmax(spec))])

    # envelope A(1 - |t|/tc) with A = V/2, from a line fit of |hilbert| vs |t|
    env = np.abs(hilbert(r))
    keep = env > 0.3 * env.max()
    V, tc = 2.0 * float(np.max(np.abs(r))), 0.25 * span
    if keep.sum() >= 3:
        slope, intercept = np.polyfit(np.abs(tu[keep]), env[keep], 1)
        if slope < 0 and intercept > 0:
            V, tc = 2.0 * intercept, -intercept / slope
    V = float(np.clip(V, 0.0, 1.0))
    tc = float(np.clip(tc, 2 * dt, 2 * span))

    # cos(wt + theta) e^{-iwt} averages to e^{i theta}/2; the model carries -V/2
    z = np.sum(r * np.exp(-2j * np.pi * nu * tu))
    theta = float(np.angle(-z))
    return HomParams(V, nu, theta, tc)


def _unpack(x) -> HomParams:
    return HomParams(float(np.clip(x[0], 0.0, MAX_VISIBILITY)), float(max(x[1], 0.0)),
                     float(x[2]), float(math.exp(x[3])))


def _model_vec(x, t):
    V, nu, theta, tc = x[0], x[1], x[2], math.exp(x[3])
    env = np.clip(1.0 - np.abs(t) / tc, 0.0, None)
    return 0.5 * (1.0 - V * np.cos(2 * np.pi * nu * t + theta) * env)


def _poisson_deviance(n, mu):
    mu = np.maximum(mu, 1e-12)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(n > 0, n * np.log(n / mu), 0.0)
    d = 2.0 * (term - (n - mu))
    return np.sign(n - mu) * np.sqrt(np.maximum(d, 0.0))


def fit(fringe: HomFringe, guess: Optional[HomParams] = None,
        far_counts: Optional[float] = None, max_nfev: int = 2000) -> HomFitResult:
    """Fit the interferogram model.

    Raw counts are fitted by Poisson maximum likelihood (deviance residuals),
    normalized data by ordinary least squares.  One-sigma uncertainties come
    from the Gauss-Newton curvature at the optimum.
    """
    t = fringe.delays
    if len(t) < 8:
        raise ValueError("need at least 8 points")
    norm = normalize(fringe, far_counts)
    cn = norm.values
    raw = fringe.kind == "raw"
    cf = norm.far_counts

    if np.ptp(cn) == 0:
        params = HomParams(0.0, 0.0, 0.0, float(t[-1] - t[0]))
        rms = float(np.sqrt(np.mean((cn - 0.5) ** 2)))
        sig = {k: 0.0 for k in PARAM_NAMES}
        return HomFitResult(params, sig, rms, True, "constant data: visibility pinned to 0")

    g = guess or initial_guess(t, cn)
    dt = float(np.min(np.diff(t)))
    span = float(t[-1] - t[0])
    lo = np.array([0.0, 0.0, -np.inf, math.log(dt)])
    hi = np.array([MAX_VISIBILITY, np.inf, np.inf, math.log(10 * span)])
    x0 = np.array([min(g.visibility, MAX_VISIBILITY), g.beat_thz, g.phase_rad,
                   math.log(g.coherence_ps)])
    x0 = np.clip(x0, lo + 1e-12, hi - 1e-12)

    if raw:
        counts = fringe.values

        def resid(x):
            return _poisson_deviance(counts, 2.0 * cf * _model_vec(x, t))
    else:
        def resid(x):
            return _model_vec(x, t) - cn

    sol = least_squares(resid, x0, bounds=(lo, hi), method="trf", x_scale="jac",
                        xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=max_nfev)
    params = _unpack(sol.x)
    dof = max(1, len(t) - 4)
    J = sol.jac
    try:
        cov = np.linalg.inv(J.T @ J)
        if not raw:
            cov *= 2.0 * sol.cost / dof
        sig_x = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        cov = None
        sig_x = np.full(4, np.nan)
    sig = {"visibility": float(sig_x[0]), "beat_thz": float(sig_x[1]),
           "phase_rad": float(sig_x[2]), "coherence_ps": float(params.coherence_ps * sig_x[3])}
    rms = float(np.sqrt(np.mean((hom_model(params, t) - cn) ** 2)))
    converged = bool(sol.success) and math.isfinite(rms)
    return HomFitResult(params, sig, rms, converged, sol.message, int(sol.nfev), cov)


# -- files -------------------------------------------------------------------


def write_fringe_csv(path_or_file, fringe: HomFringe) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("delay_ps", "counts" if fringe.kind == "raw" else "cn"))
        for d, v in zip(fringe.delays, fringe.values):
            w.writerow((f"{d:.9g}", f"{v:.9g}"))
    finally:
        if own:
            fh.close()


def read_fringe_csv(path, axis: str = "delay", far_counts: Optional[float] = None) -> HomFringe:
    """Read ``delay_ps,counts`` or ``delay_ps,cn``.

    With ``axis="stage"`` the first column is a stage displacement in um
    from the zero-delay position and is converted with :func:`stage_to_delay`.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [r for r in reader if r]
    if len(header) != 2 or header[1] not in ("counts", "cn"):
        raise ValueError(f"{path}: expected header 'delay_ps,counts' or 'delay_ps,cn'")
    data = np.array(rows, dtype=float).reshape(-1, 2)
    x = data[:, 0]
    if axis == "stage":
        x = stage_to_delay(x)
    elif axis != "delay":
        raise ValueError(f"unknown axis {axis!r}")
    kind = "raw" if header[1] == "counts" else "normalized"
    return HomFringe(x, data[:, 1], kind, far_counts)


def format_fit_report(result: HomFitResult) -> str:
    p, s = result.params, result.uncertainties
    lines = [f"{k} = {v:.9g}" for k, v in zip(PARAM_NAMES, p.as_tuple())]
    lines += [f"sigma_{k} = {s[k]:.9g}" for k in PARAM_NAMES]
    lines += [f"residual_rms = {result.residual_rms:.9g}",
              f"converged = {'true' if result.converged else 'false'}"]
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    """Parse any ``key = value`` report block."""
    out = {}
    for line in text.splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out
