"""Simultaneous type-II quasi-phase matching.

Two collinear type-II processes share one pump (ordinary), one poling
period and one temperature; they differ only in which of signal/idler is
extraordinary.  Subtracting the two phase-matching conditions leaves the
condition function

    F_T(x) = (n_e(x, T) - n_o(x, T)) / x

and a simultaneous pair is any ``(s, i)`` with ``F_T(s) == F_T(i)``.  The
pump then follows from energy conservation and the period from either
phase-matching condition.

Units: um, degC, rad/um.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _kernels
from .dispersion import Axis, DispersionModel, DomainError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ROOT_GRID_STEP = 1e-3
MERGE_TOL = 1e-4
RESIDUAL_TOL = 1e-6
NEWTON_TOL = 1e-10
JACOBIAN_STEP = 1e-6

CURVE_CSV_HEADER = ("T_c", "lambda_p_um", "lambda_s_um", "lambda_i_um",
                    "period_um", "residual_a", "residual_b")


@dataclass(frozen=True)
class QpmProcess:
    label: str
    signal_axis: Axis
    idler_axis: Axis
    pump_axis: Axis = Axis.ORDINARY

    def __post_init__(self):
        axes = (Axis(self.signal_axis), Axis(self.idler_axis))
        if axes.count(Axis.EXTRAORDINARY) != 1:
            raise ValueError("type-II process needs exactly one extraordinary output")


SIG_E_IDL_O = QpmProcess("SIG_E_IDL_O", Axis.EXTRAORDINARY, Axis.ORDINARY)
SIG_O_IDL_E = QpmProcess("SIG_O_IDL_E", Axis.ORDINARY, Axis.EXTRAORDINARY)
PROCESSES = (SIG_E_IDL_O, SIG_O_IDL_E)


def process_by_label(label: str) -> QpmProcess:
    for p in PROCESSES:
        if p.label == label:
            return p
    raise KeyError(label)


@dataclass(frozen=True)
class PhaseMatchSolution:
    """One consistent (pump, signal, idler, T, period) set, signal <= idler."""

    lambda_p: float
    lambda_s: float
    lambda_i: float
    temperature: float
    period: float
    residuals: tuple[float, float]
    processes: tuple[QpmProcess, QpmProcess] = PROCESSES
    degenerate: bool = False
    multi_pair: bool = False

    def energy_mismatch(self) -> float:
        return 1.0 / self.lambda_p - 1.0 / self.lambda_s - 1.0 / self.lambda_i

    def csv_row(self) -> list[str]:
        vals = (self.temperature, self.lambda_p, self.lambda_s, self.lambda_i,
                self.period, *self.residuals)
        return [f"{v:.9g}" for v in vals]


@dataclass(frozen=True)
class ConditionCurve:
    temperature: float
    x: np.ndarray
    values: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class Extremum:
    x: float
    value: float
    kind: str  # "min", "max" or "edge"


@dataclass(frozen=True)
class Valley:
    """Interior local minimum of F_T and the levels for which it yields a pair."""

    x_min: float
    f_min: float
    top: float
    left: Extremum
    right: Extremum


@dataclass(frozen=True)
class SolutionCount:
    temperature: float
    multiplicity: int
    max_roots: int


# -- evaluators -------------------------------------------------------------


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _wavevector(model: DispersionModel, axis: Axis, lam, f: float):
    lam = np.asarray(lam, dtype=float)
    return TWO_PI * _kernels.sellmeier_index(model.coefficients(axis), f, lam) / lam


def delta_k(model: DispersionModel, process: QpmProcess, lambda_p, lambda_s,
            lambda_i, T: float):
    """k_pump - k_signal - k_idler with axes from ``process`` (rad/um)."""
    for lam in (lambda_p, lambda_s, lambda_i):
        model.check_wavelength(lam)
    model.check_temperature(T)
    f = model.thermal_parameter(T)
    dk = (_wavevector(model, process.pump_axis, lambda_p, f)
          - _wavevector(model, process.signal_axis, lambda_s, f)
          - _wavevector(model, process.idler_axis, lambda_i, f))
    return float(dk) if np.ndim(dk) == 0 else dk


def condition_function(model: DispersionModel, x, T: float):
    model.check_wavelength(x)
    model.check_temperature(T)
    v = _cond(model, x, model.thermal_parameter(T))
    return float(v) if np.ndim(x) == 0 else v


def _cond(model, x, f):
    return _kernels.condition_values(
        model.coefficients(Axis.EXTRAORDINARY), model.coefficients(Axis.ORDINARY),
        f, np.asarray(x, dtype=float))


def _cond1(model, x, f) -> float:
    return float(_cond(model, np.array([x]), f)[0])


def condition_curve(model: DispersionModel, T: float, x_range=None,
                    step: float = ROOT_GRID_STEP) -> ConditionCurve:
    lo, hi = x_range or model.wavelength_range
    x = _grid(lo, hi, step)
    return ConditionCurve(T, x, np.asarray(condition_function(model, x, T)))


def _search_range(model, search_range):
    lo, hi = search_range or model.wavelength_range
    if not lo < hi:
        raise ValueError("search range must be increasing")
    model.check_wavelength([lo, hi])
    return float(lo), float(hi)


def condition_extrema(model: DispersionModel, T: float, search_range=None,
                      grid_step: float = ROOT_GRID_STEP) -> list[Extremum]:
    """Interior local extrema of F_T, located on a grid and refined."""
    lo, hi = _search_range(model, search_range)
    model.check_temperature(T)
    f = model.thermal_parameter(T)
    x = _grid(lo, hi, grid_step)
    F = _cond(model, x, f)
    d = np.diff(F)
    out = []
    for k in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0] + 1:
        kind = "min" if d[k - 1] < 0 else "max"
        a, b = x[k - 1], x[k + 1]
        if _dcond(a, model, f) * _dcond(b, model, f) < 0:
            xe = brentq(_dcond, a, b, args=(model, f), xtol=1e-15)
        else:  # flat to rounding; fall back to the sample
            xe = x[k]
        out.append(Extremum(float(xe), _cond1(model, xe, f), kind))
    return out


def _dindex(c, f, lam):
    """n and dn/dlambda from the normalized coefficient vector."""
    l2 = lam * lam
    p1 = c[2] + c[8] * f
    p2 = c[4] + c[10] * f
    q1 = c[1] + c[7] * f
    q2 = c[3] + c[9] * f
    n = math.sqrt(c[0] + c[6] * f + q1 / (l2 - p1 * p1) + q2 / (l2 - p2 * p2) - c[5] * l2)
    dn2 = (-2 * lam * q1 / (l2 - p1 * p1) ** 2 - 2 * lam * q2 / (l2 - p2 * p2) ** 2
           - 2 * c[5] * lam)
    return n, dn2 / (2 * n)


def _dcond(x, model, f):
    ne, dne = _dindex(model.coefficients(Axis.EXTRAORDINARY), f, x)
    no, dno = _dindex(model.coefficients(Axis.ORDINARY), f, x)
    return ((dne - dno) * x - (ne - no)) / (x * x)


def _profile(model, T, search_range=None) -> list[Extremum]:
    """Edges plus interior extrema: F_T is monotone between neighbours."""
    lo, hi = _search_range(model, search_range)
    f = model.thermal_parameter(T)
    ext = condition_extrema(model, T, (lo, hi))
    return ([Extremum(lo, _cond1(model, lo, f), "edge")] + ext
            + [Extremum(hi, _cond1(model, hi, f), "edge")])


# -- roots of F_T = level ----------------------------------------------------


def find_condition_solutions(model: DispersionModel, T: float, inv_lambda_c: float,
                             search_range=None,
                             grid_step: float = ROOT_GRID_STEP) -> list[float]:
    """All x in the search range with F_T(x) = inv_lambda_c, ascending.

    Sign changes are bracketed on a uniform grid whose nodes are augmented
    with the refined local extrema, so two roots sharing one grid cell are
    still separated; each bracket is then bisected to machine resolution.
    """
    lo, hi = _search_range(model, search_range)
    model.check_temperature(T)
    f = model.thermal_parameter(T)
    ce = model.coefficients(Axis.EXTRAORDINARY)
    co = model.coefficients(Axis.ORDINARY)
    ext = condition_extrema(model, T, (lo, hi), grid_step)
    x = np.union1d(_grid(lo, hi, grid_step), [e.x for e in ext])
    if x[-1] < hi:
        x = np.append(x, hi)
    g = _cond(model, x, f) - inv_lambda_c
    roots = [float(v) for v in x[g == 0.0]]
    for k in np.nonzero(g[:-1] * g[1:] < 0)[0]:
        roots.append(float(_kernels.bisect_level(ce, co, f, inv_lambda_c,
                                                 float(x[k]), float(x[k + 1]))))
    roots.sort()
    deduped = []
    for r in roots:
        if not deduped or r - deduped[-1] > 1e-12:
            deduped.append(r)
    return deduped


def _merge_roots(roots: Sequence[float], ext: Sequence[Extremum]):
    """Group roots closer than MERGE_TOL; groups become degenerate points."""
    groups: list[list[float]] = []
    for r in roots:
        if groups and r - groups[-1][-1] < MERGE_TOL:
            groups[-1].append(r)
        else:
            groups.append([r])
    merged = []
    for g in groups:
        near = [e for e in ext if e.kind != "edge"
                and g[0] - MERGE_TOL <= e.x <= g[-1] + MERGE_TOL]
        if len(g) > 1 or near:
            x = near[0].x if near else 0.5 * (g[0] + g[-1])
            merged.append((x, True))
        else:
            merged.append((g[0], False))
    return merged


def solution_from_pair(model: DispersionModel, T: float, s: float, i: float,
                       *, multi_pair: bool = False,
                       degenerate: bool | None = None) -> PhaseMatchSolution | None:
    """Complete a condition pair into a solution; None if it is unphysical."""
    s, i = (s, i) if s <= i else (i, s)
    lp = s * i / (s + i)
    if not model.in_wavelength_range(lp):
        log.info("skip pair (%.6g, %.6g) um at %.6g degC: pump %.6g um out of range",
                 s, i, T, lp)
        return None
    dk_a = delta_k(model, SIG_E_IDL_O, lp, s, i, T)
    if dk_a <= 0:
        log.info("skip pair (%.6g, %.6g) um at %.6g degC: no positive period", s, i, T)
        return None
    period = TWO_PI / dk_a
    k_qpm = TWO_PI / period
    dk_b = delta_k(model, SIG_O_IDL_E, lp, s, i, T)
    res = (dk_a - k_qpm, dk_b - k_qpm)
    if abs(res[1]) > RESIDUAL_TOL:
        log.info("skip pair (%.6g, %.6g) um at %.6g degC: residual %.3g", s, i, T, res[1])
        return None
    if degenerate is None:
        degenerate = i - s < MERGE_TOL
    return PhaseMatchSolution(lp, s, i, T, period, res,
                              degenerate=degenerate, multi_pair=multi_pair)


def solve_simultaneous(model: DispersionModel, T: float, inv_lambda_c: float,
                       search_range=None) -> list[PhaseMatchSolution]:
    """Every simultaneous solution at a fixed temperature and condition level."""
    roots = find_condition_solutions(model, T, inv_lambda_c, search_range)
    ext = condition_extrema(model, T, search_range)
    points = _merge_roots(roots, ext)
    multi = len(points) > 2
    out = []
    for (xa, _), (xb, _) in itertools.combinations(points, 2):
        sol = solution_from_pair(model, T, xa, xb, multi_pair=multi, degenerate=False)
        if sol is not None:
            out.append(sol)
    for x, is_deg in points:
        if is_deg:
            sol = solution_from_pair(model, T, x, x, multi_pair=multi, degenerate=True)
            if sol is not None:
                out.append(sol)
    out.sort(key=lambda q: (q.lambda_s, q.lambda_i))
    return out


# -- valleys, multiplicity and tunability ------------------------------------


def condition_valleys(model: DispersionModel, T: float, search_range=None) -> list[Valley]:
    prof = _profile(model, T, search_range)
    out = []
    for j in range(1, len(prof) - 1):
        e = prof[j]
        if e.kind == "min":
            left, right = prof[j - 1], prof[j + 1]
            out.append(Valley(e.x, e.value, min(left.value, right.value), left, right))
    return out


def _levels_between(values: Iterable[float]) -> list[float]:
    v = sorted(set(values))
    return [0.5 * (a + b) for a, b in zip(v, v[1:])]


def solution_count(model: DispersionModel, T: float, search_range=None) -> SolutionCount:
    prof = _profile(model, T, search_range)
    segments = list(zip(prof, prof[1:]))
    max_roots = 0
    for c in _levels_between(e.value for e in prof):
        n = sum(1 for a, b in segments if min(a.value, b.value) < c < max(a.value, b.value))
        max_roots = max(max_roots, n)
    valleys = []
    for j in range(1, len(prof) - 1):
        if prof[j].kind == "min":
            valleys.append((prof[j].value, min(prof[j - 1].value, prof[j + 1].value)))
    open_max = 0
    for c in _levels_between(itertools.chain.from_iterable(valleys)):
        open_max = max(open_max, sum(1 for lo, hi in valleys if lo < c < hi))
    return SolutionCount(T, 2 * open_max, max_roots)


def solution_count_map(model: DispersionModel, T_range, T_step: float,
                       search_range=None) -> list[SolutionCount]:
    """Per temperature, the largest number of condition roots that form pairs.

    A pair of roots belongs to a tunable family when it brackets an interior
    local minimum of F_T (a valley); ``multiplicity`` counts those roots.
    ``max_roots`` is the raw maximum number of roots of F_T = level.
    """
    lo, hi = T_range
    model.check_temperature(lo)
    model.check_temperature(hi)
    return [solution_count(model, float(T), search_range) for T in _grid(lo, hi, T_step)]


@dataclass(frozen=True)
class TuningFamily:
    """Solutions reachable at one temperature by moving the condition level."""

    temperature: float
    valley: Valley
    degenerate: PhaseMatchSolution
    separated: PhaseMatchSolution

    @property
    def span(self) -> float:
        return self.separated.lambda_i - self.separated.lambda_s


def _valley_roots(model, f, v: Valley, level: float) -> tuple[float, float]:
    ce = model.coefficients(Axis.EXTRAORDINARY)
    co = model.coefficients(Axis.ORDINARY)
    s = _kernels.bisect_level(ce, co, f, level, v.left.x, v.x_min)
    i = _kernels.bisect_level(ce, co, f, level, v.x_min, v.right.x)
    return float(s), float(i)


def _family(model, T, v: Valley) -> TuningFamily | None:
    f = model.thermal_parameter(T)
    deg = solution_from_pair(model, T, v.x_min, v.x_min, degenerate=True)
    s, i = _valley_roots(model, f, v, v.top)
    sep = solution_from_pair(model, T, s, i, degenerate=False)
    if deg is None or sep is None:
        return None
    return TuningFamily(T, v, deg, sep)


def tuning_family(model: DispersionModel, T: float, search_range=None) -> TuningFamily | None:
    """Degenerate and widest-separated endpoints of the widest valley at ``T``."""
    fams = [fam for v in condition_valleys(model, T, search_range)
            if (fam := _family(model, T, v)) is not None]
    return max(fams, key=lambda q: q.span) if fams else None


def family_solutions(model: DispersionModel, T: float, n_levels: int = 200,
                     search_range=None) -> list[PhaseMatchSolution]:
    """Sample the widest family; levels cluster near both endpoints."""
    fam = tuning_family(model, T, search_range)
    if fam is None:
        return []
    v = fam.valley
    f = model.thermal_parameter(T)
    u = 0.5 * (1.0 - np.cos(np.pi * np.arange(n_levels) / (n_levels - 1)))
    out = [fam.degenerate]
    for level in v.f_min + u[1:-1] * (v.top - v.f_min):
        sol = solution_from_pair(model, T, *_valley_roots(model, f, v, level))
        if sol is not None:
            out.append(sol)
    out.append(fam.separated)
    return out


@dataclass(frozen=True)
class TunabilityResult:
    temperature: float
    degenerate: PhaseMatchSolution
    separated: PhaseMatchSolution
    span: float
    scan: tuple[tuple[float, float], ...] = field(repr=False, default=())


def widest_tunability_search(model: DispersionModel, T_range=None,
                             T_step: float = 0.1) -> TunabilityResult | None:
    """Temperature whose family spans the widest signal/idler separation.

    The span is scanned on a temperature grid, then the best grid cell is
    refined by bounded scalar maximisation.  Returns None when no
    temperature has a valley (no simultaneous regime).
    """
    lo, hi = T_range or model.temperature_range
    model.check_temperature(lo)
    model.check_temperature(hi)

    def span(T):
        fam = tuning_family(model, T)
        return (fam.span if fam is not None else float("nan")), fam

    temps = _grid(lo, hi, T_step)
    spans = np.array([span(float(T))[0] for T in temps])
    if np.all(np.isnan(spans)):
        log.info("%s: no simultaneous regime on %g..%g degC", model.crystal_name, lo, hi)
        return None
    k = int(np.nanargmax(spans))
    a, b = max(lo, temps[k] - T_step), min(hi, temps[k] + T_step)
    res = minimize_scalar(lambda T: -np.nan_to_num(span(T)[0], nan=0.0),
                          bounds=(a, b), method="bounded", options={"xatol": 1e-5})
    best_T = float(res.x) if -res.fun >= spans[k] else float(temps[k])
    best, fam = span(best_T)
    scan = tuple(zip(temps.tolist(), spans.tolist()))
    return TunabilityResult(best_T, fam.degenerate, fam.separated, best, scan)


def degenerate_period(model: DispersionModel, T: float) -> float | None:
    fam = tuning_family(model, T)
    return fam.degenerate.period if fam is not None else None


def find_degenerate_temperatures(model: DispersionModel, period: float, T_range,
                                 T_step: float = 0.5) -> list[PhaseMatchSolution]:
    """Temperatures where the valley-bottom (degenerate) pair needs ``period``."""
    lo, hi = T_range
    temps = _grid(lo, hi, T_step)
    vals = [degenerate_period(model, float(T)) for T in temps]
    out = []
    for (ta, va), (tb, vb) in zip(zip(temps, vals), zip(temps[1:], vals[1:])):
        if va is None or vb is None or (va - period) * (vb - period) > 0:
            continue
        if va == period:
            T = float(ta)
        else:
            T = brentq(lambda t: (degenerate_period(model, t) or np.nan) - period,
                       ta, tb, xtol=1e-9)
        out.append(tuning_family(model, T).degenerate)
    return out


# -- joint solves with a fixed period ----------------------------------------


def _divided_difference(model, f, s, i):
    if abs(s - i) > 1e-5:
        return (_cond1(model, s, f) - _cond1(model, i, f)) / (s - i)
    m, h = 0.5 * (s + i), 1e-5
    return (_cond1(model, m + h, f) - _cond1(model, m - h, f)) / (2 * h)


def _pair_residual(model, T, s, i, k_qpm):
    lo, hi = model.wavelength_range
    lp = s * i / (s + i) if s > 0 and i > 0 else -1.0
    if not (lo <= s <= hi and lo <= i <= hi and lo <= lp <= hi):
        return None
    f = model.thermal_parameter(T)
    dk_a = float(_wavevector(model, Axis.ORDINARY, lp, f)
                 - _wavevector(model, Axis.EXTRAORDINARY, s, f)
                 - _wavevector(model, Axis.ORDINARY, i, f))
    return np.array([dk_a - k_qpm, TWO_PI * _divided_difference(model, f, s, i)])


def _damped_newton(fun: Callable, x0, steps, maxiter: int = 60, tol: float = NEWTON_TOL):
    """Newton with central-difference Jacobian and step halving."""
    x = np.asarray(x0, dtype=float)
    steps = np.asarray(steps, dtype=float)
    r = fun(x)
    if r is None:
        return None
    for _ in range(maxiter):
        if np.max(np.abs(r)) < tol:
            return x
        J = np.empty((len(r), len(x)))
        for j in range(len(x)):
            e = np.zeros_like(x)
            e[j] = steps[j]
            rp, rm = fun(x + e), fun(x - e)
            if rp is None or rm is None:
                return None
            J[:, j] = (rp - rm) / (2 * steps[j])
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(J, -r, rcond=None)[0]
        norm = np.linalg.norm(r)
        lam = 1.0
        while lam > 1e-6:
            rn = fun(x + lam * dx)
            if rn is not None and np.linalg.norm(rn) < norm:
                x, r = x + lam * dx, rn
                break
            lam *= 0.5
        else:
            return None
    return x if np.max(np.abs(r)) < tol * 100 else None


def _dedupe(sols: list[PhaseMatchSolution], tol: float = 1e-7) -> list[PhaseMatchSolution]:
    out: list[PhaseMatchSolution] = []
    for q in sorted(sols, key=lambda q: (q.lambda_s, q.lambda_i)):
        if not any(abs(q.lambda_s - p.lambda_s) < tol and abs(q.lambda_i - p.lambda_i) < tol
                   and abs(q.temperature - p.temperature) < 1e-6 for p in out):
            out.append(q)
    return out


def _finish_pair(model, T, s, i):
    sol = solution_from_pair(model, T, s, i)
    if sol is None or max(abs(r) for r in sol.residuals) > RESIDUAL_TOL:
        return None
    return sol


def _sign_change_cells(*fields_):
    """Cells of a 2-D grid whose four corners change sign in every field."""
    mask = None
    for a in fields_:
        corners = np.stack([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
        ok = np.all(np.isfinite(corners), axis=0)
        corners = np.nan_to_num(corners)
        m = ok & (corners.max(axis=0) > 0) & (corners.min(axis=0) < 0)
        mask = m if mask is None else mask & m
    return np.argwhere(mask)


def _scan_pairs(model, T, k_qpm, step=0.01):
    """Coarse 2-D scan over (signal, idler) for seeds of the fixed-period system."""
    lo, hi = model.wavelength_range
    x = _grid(lo, hi, step)
    f = model.thermal_parameter(T)
    F = _cond(model, x, f)
    S, I = np.meshgrid(x, x, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        D = (F[:, None] - F[None, :]) / (S - I)
    np.fill_diagonal(D, np.gradient(F, x))
    lp = S * I / (S + I)
    valid = model.in_wavelength_range(lp)
    lp_safe = np.where(valid, lp, lo)
    dk = (_wavevector(model, Axis.ORDINARY, lp_safe, f)
          - _wavevector(model, Axis.EXTRAORDINARY, S, f)
          - _wavevector(model, Axis.ORDINARY, I, f))
    R1 = np.where(valid, dk - k_qpm, np.nan)
    seeds = []
    for j, k in _sign_change_cells(R1, D):
        s0, i0 = x[j] + step / 2, x[k] + step / 2
        seeds.append((s0, i0))
    return seeds


def solve_fixed_period(model: DispersionModel, period: float, T: float,
                       seeds: Sequence[tuple[float, float]] | None = None,
                       scan_step: float = 0.01) -> list[PhaseMatchSolution]:
    """Non-trivial simultaneous pairs at fixed (period, T).

    With ``seeds`` only those starting points are polished; otherwise a
    coarse grid scan provides them.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    model.check_temperature(T)
    k_qpm = TWO_PI / period
    if seeds is None:
        seeds = _scan_pairs(model, T, k_qpm, scan_step)
    out = []
    for s0, i0 in seeds:
        x = _damped_newton(lambda v: _pair_residual(model, T, v[0], v[1], k_qpm),
                           (s0, i0), (JACOBIAN_STEP, JACOBIAN_STEP))
        if x is None:
            continue
        sol = _finish_pair(model, T, float(x[0]), float(x[1]))
        if sol is not None:
            out.append(sol)
    return _dedupe(out)


@dataclass
class TuningCurve:
    """Sweep output; a point with ``None`` marks a gap."""

    parameter: str
    points: list[tuple[float, PhaseMatchSolution | None]]
    diagnostics: list[str] = field(default_factory=list)

    def solutions(self) -> list[PhaseMatchSolution]:
        return [q for _, q in self.points if q is not None]

    @property
    def empty(self) -> bool:
        return not self.solutions()


def tuning_curve_fixed_period(model: DispersionModel, period: float, T_range,
                              T_step: float) -> TuningCurve:
    """Solutions of both phase-matching conditions vs temperature at fixed period.

    Each temperature is seeded from the previous one's solutions; when
    continuation yields nothing a coarse 2-D scan re-acquires the branches.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    lo, hi = T_range
    model.check_temperature(lo)
    model.check_temperature(hi)
    curve = TuningCurve("T_c", [])
    prev: list[PhaseMatchSolution] = []
    for T in _grid(lo, hi, T_step):
        T = float(T)
        sols = []
        if prev:
            sols = solve_fixed_period(model, period, T,
                                      seeds=[(q.lambda_s, q.lambda_i) for q in prev])
        if not sols:
            sols = solve_fixed_period(model, period, T)
        if sols:
            curve.points.extend((T, q) for q in sols)
        else:
            curve.points.append((T, None))
        prev = sols
    # the valley-bottom crossing rarely falls on the grid; insert it exactly
    for q in find_degenerate_temperatures(model, period, (lo, hi)):
        curve.points.append((q.temperature, q))
    curve.points.sort(key=lambda tq: (tq[0], tq[1] is not None,
                                      tq[1].lambda_s if tq[1] is not None else 0.0))
    if curve.empty:
        msg = f"no simultaneous solution for period {period} um on {lo}..{hi} degC"
        log.info(msg)
        curve.diagnostics.append(msg)
    return curve


def _pump_residual(model, lp, k_qpm, s, T):
    tlo, thi = model.temperature_range
    if not (tlo <= T <= thi) or s <= lp:
        return None
    i = 1.0 / (1.0 / lp - 1.0 / s)
    return _pair_residual(model, T, s, i, k_qpm)


def solve_fixed_pump(model: DispersionModel, lambda_p: float, period: float, T_range,
                     seeds: Sequence[tuple[float, float]] | None = None,
                     s_step: float = 0.002, T_step: float = 0.5) -> list[PhaseMatchSolution]:
    """Signal wavelength and temperature for a given pump and period."""
    model.check_wavelength(lambda_p)
    if period <= 0:
        raise ValueError("period must be positive")
    k_qpm = TWO_PI / period
    lo, hi = T_range
    if seeds is None:
        seeds = _scan_pump(model, lambda_p, k_qpm, (lo, hi), s_step, T_step)
    out = []
    for s0, T0 in seeds:
        x = _damped_newton(lambda v: _pump_residual(model, lambda_p, k_qpm, v[0], v[1]),
                           (s0, T0), (JACOBIAN_STEP, 1e-4))
        if x is None or not (lo - 1e-9 <= x[1] <= hi + 1e-9):
            continue
        s, T = float(x[0]), float(x[1])
        i = 1.0 / (1.0 / lambda_p - 1.0 / s)
        sol = _finish_pair(model, T, s, i)
        if sol is not None:
            out.append(sol)
    return _dedupe(out)


def _scan_pump(model, lp, k_qpm, T_range, s_step, T_step):
    lo, hi = model.wavelength_range
    s_hi = min(2 * lp, hi)
    s_lo = max(lo, 1.0 / (1.0 / lp - 1.0 / hi))
    s = _grid(s_lo, s_hi, s_step)
    temps = _grid(*T_range, T_step)
    i = 1.0 / (1.0 / lp - 1.0 / s)
    R1 = np.empty((len(s), len(temps)))
    R2 = np.empty_like(R1)
    for k, T in enumerate(temps):
        f = model.thermal_parameter(T)
        dk = (_wavevector(model, Axis.ORDINARY, np.full_like(s, lp), f)
              - _wavevector(model, Axis.EXTRAORDINARY, s, f)
              - _wavevector(model, Axis.ORDINARY, i, f))
        R1[:, k] = dk - k_qpm
        Fs, Fi = _cond(model, s, f), _cond(model, i, f)
        with np.errstate(divide="ignore", invalid="ignore"):
            R2[:, k] = np.where(i - s > 1e-9, (Fs - Fi) / (s - i), np.nan)
    return [(s[j] + s_step / 2, temps[k] + T_step / 2)
            for j, k in _sign_change_cells(R1, R2)]


def tuning_curve_fixed_pump(model: DispersionModel, lambda_p: float,
                            periods: Sequence[float], T_range) -> TuningCurve:
    """Fixed pump: for each period, the temperature and pair that match."""
    curve = TuningCurve("period_um", [])
    prev: list[PhaseMatchSolution] = []
    for period in periods:
        period = float(period)
        sols = []
        if prev:
            sols = solve_fixed_pump(model, lambda_p, period, T_range,
                                    seeds=[(q.lambda_s, q.temperature) for q in prev])
        if not sols:
            sols = solve_fixed_pump(model, lambda_p, period, T_range)
        if sols:
            curve.points.extend((period, q) for q in sols)
        else:
            curve.points.append((period, None))
        prev = sols
    if curve.empty:
        msg = f"no solution for pump {lambda_p} um in the requested periods"
        log.info(msg)
        curve.diagnostics.append(msg)
    return curve


def write_solutions_csv(path_or_file, solutions: Iterable[PhaseMatchSolution]) -> None:
    """Curve CSV; gaps are simply absent."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_CSV_HEADER)
        for q in solutions:
            w.writerow(q.csv_row())
    finally:
        if own:
            fh.close()


def read_solutions_csv(path) -> list[PhaseMatchSolution]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        s, i = float(r["lambda_s_um"]), float(r["lambda_i_um"])
        out.append(PhaseMatchSolution(
            float(r["lambda_p_um"]), s, i, float(r["T_c"]), float(r["period_um"]),
            (float(r["residual_a"]), float(r["residual_b"])),
            degenerate=i - s < MERGE_TOL))
    return out


__all__ = [
    "ConditionCurve", "DomainError", "Extremum", "PROCESSES", "PhaseMatchSolution",
    "QpmProcess", "SIG_E_IDL_O", "SIG_O_IDL_E", "SolutionCount", "TunabilityResult",
    "TuningCurve", "TuningFamily", "Valley", "condition_curve", "condition_extrema",
    "condition_function", "condition_valleys", "degenerate_period", "delta_k",
    "family_solutions", "find_condition_solutions", "find_degenerate_temperatures",
    "process_by_label", "solution_count", "solution_count_map", "solution_from_pair",
    "solve_fixed_period", "solve_fixed_pump", "solve_simultaneous",
    "tuning_curve_fixed_period", "tuning_curve_fixed_pump", "tuning_family",
    "widest_tunability_search", "write_solutions_csv", "read_solutions_csv",
]
