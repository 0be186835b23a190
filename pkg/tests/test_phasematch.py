import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from sspdc import phasematch as pm
from sspdc.dispersion import DomainError, birefringence

TWO_PI = 2 * math.pi


def test_delta_k_matches_oracle(slt):
    lp, ls, li, T = 0.488, 0.955, 1.0 / (1 / 0.488 - 1 / 0.955), 81.8
    assert pm.delta_k(slt, pm.SIG_E_IDL_O, lp, ls, li, T) == pytest.approx(
        oracle.delta_k_a(lp, ls, li, T), rel=1e-12)
    assert pm.delta_k(slt, pm.SIG_O_IDL_E, lp, ls, li, T) == pytest.approx(
        oracle.delta_k_b(lp, ls, li, T), rel=1e-12)


def test_process_difference_is_condition_function(slt):
    # dk_b - dk_a = 2 pi (F(s) - F(i))
    lp, ls, T = 0.5, 0.8, 90.0
    li = 1 / (1 / lp - 1 / ls)
    diff = (pm.delta_k(slt, pm.SIG_O_IDL_E, lp, ls, li, T)
            - pm.delta_k(slt, pm.SIG_E_IDL_O, lp, ls, li, T))
    F = pm.condition_function(slt, np.array([ls, li]), T)
    assert diff == pytest.approx(TWO_PI * (F[0] - F[1]), rel=1e-9)


def test_process_requires_one_extraordinary():
    with pytest.raises(ValueError):
        pm.QpmProcess("bad", "e", "e")
    assert pm.process_by_label("SIG_O_IDL_E") is pm.SIG_O_IDL_E


def test_condition_function_definition(slt):
    x = np.linspace(0.4, 5.0, 200)
    assert np.allclose(pm.condition_function(slt, x, 81.8) * x, birefringence(slt, x, 81.8),
                       rtol=0, atol=1e-15)
    assert isinstance(pm.condition_function(slt, 1.0, 81.8), float)


def test_condition_curve_grid(slt):
    c = pm.condition_curve(slt, 81.8, (0.4, 5.0), 0.001)
    assert len(c.x) == 4601
    assert c.x[-1] == pytest.approx(5.0)
    k = np.argmin(np.where((c.x > 0.8) & (c.x < 1.2), c.values, np.inf))
    assert c.x[k] == pytest.approx(0.976, abs=0.002)
    assert c.values[k] == pytest.approx(1.9158e-4, abs=1e-7)


def test_condition_curve_domain(slt):
    with pytest.raises(DomainError):
        pm.condition_curve(slt, 150.0)


def test_alpha_solution(slt):
    sols = pm.solve_simultaneous(slt, 81.8, 1.919e-4)
    assert len(sols) == 1
    q = sols[0]
    assert q.lambda_s == pytest.approx(0.955, abs=0.005)
    assert q.lambda_i == pytest.approx(0.998, abs=0.005)
    assert q.lambda_p == pytest.approx(0.488, abs=0.005)
    assert q.period == pytest.approx(6.04, abs=0.05)
    # three roots (one pair has its pump below 0.4 um) -> flagged
    assert q.multi_pair
    assert abs(q.energy_mismatch()) < 1e-12
    assert max(abs(r) for r in q.residuals) < 1e-9


def test_alpha_regression(slt):
    # frozen from the shipped coefficient file
    q = pm.solve_simultaneous(slt, 81.8, 1.919e-4)[0]
    assert q.lambda_s == pytest.approx(0.9543468563, abs=1e-8)
    assert q.lambda_i == pytest.approx(0.9994562301, abs=1e-8)
    assert q.period == pytest.approx(6.0603573418, abs=1e-7)


def test_solution_residuals_via_oracle(slt):
    q = pm.solve_simultaneous(slt, 81.8, 1.919e-4)[0]
    K = TWO_PI / q.period
    assert abs(oracle.delta_k_a(q.lambda_p, q.lambda_s, q.lambda_i, q.temperature) - K) < 1e-9
    assert abs(oracle.delta_k_b(q.lambda_p, q.lambda_s, q.lambda_i, q.temperature) - K) < 1e-9


def test_roots_against_brute_force(slt):
    roots = pm.find_condition_solutions(slt, 81.8, 1.919e-4)
    ref = oracle.brute_force_roots(81.8, 1.919e-4)
    assert len(roots) == len(ref) == 3
    assert np.max(np.abs(np.array(roots) - ref)) < 1e-5


def test_degenerate_touching_level(slt):
    ext = [e for e in pm.condition_extrema(slt, 81.8) if e.kind == "min"][0]
    sols = pm.solve_simultaneous(slt, 81.8, ext.value)
    deg = [q for q in sols if q.degenerate]
    assert len(deg) == 1
    assert deg[0].lambda_s == deg[0].lambda_i == pytest.approx(0.976, abs=0.001)


def test_level_without_roots(slt):
    assert pm.find_condition_solutions(slt, 81.8, 1.0) == []
    assert pm.solve_simultaneous(slt, 81.8, 1.0) == []


def test_close_root_pair_resolved(slt):
    # level just above the valley bottom: two roots inside one grid cell
    ext = [e for e in pm.condition_extrema(slt, 81.8) if e.kind == "min"][0]
    roots = pm.find_condition_solutions(slt, 81.8, ext.value + 1e-14)
    near = [r for r in roots if abs(r - ext.x) < 1e-3]
    assert len(near) == 2


def test_solution_count_window(slt):
    counts = pm.solution_count_map(slt, (70.0, 110.0), 0.5)
    multi = [c.temperature for c in counts if c.multiplicity >= 2]
    assert min(multi) == pytest.approx(78.0, abs=0.5)
    assert max(multi) == pytest.approx(103.0, abs=0.5)
    # contiguous window
    assert len(multi) == int(round((max(multi) - min(multi)) / 0.5)) + 1
    assert all(c.max_roots >= c.multiplicity for c in counts)


def test_valleys_have_consistent_tops(slt):
    for v in pm.condition_valleys(slt, 90.0):
        assert v.f_min < v.top
        assert v.left.x < v.x_min < v.right.x


def test_ppln_has_no_simultaneous_regime(ln):
    assert pm.widest_tunability_search(ln, T_step=2.0) is None
    for T in np.arange(20.0, 201.0, 20.0):
        assert pm.condition_extrema(ln, T) == []
        assert pm.solution_count(ln, T).multiplicity == 0
        F = pm.condition_curve(ln, T, step=0.01).values
        for level in np.linspace(F.min(), F.max(), 7):
            assert pm.solve_simultaneous(ln, T, level) == []


def _oracle_family(T):
    x = np.arange(0.4, 5.0 + 5e-6, 1e-5)
    F = oracle.cond_vec(x, T)
    d = np.diff(F)
    mins = np.nonzero((d[:-1] < 0) & (d[1:] > 0))[0] + 1
    maxs = np.nonzero((d[:-1] > 0) & (d[1:] < 0))[0] + 1
    m = [k for k in mins if 0.8 < x[k] < 1.5][0]
    left = max([k for k in maxs if k < m], default=0)
    right = min([k for k in maxs if k > m], default=len(x) - 1)
    top = min(F[left], F[right])
    g = F - top
    roots = x[np.nonzero(g[:-1] * g[1:] <= 0)[0]]
    s = roots[(roots >= x[left] - 1e-5) & (roots < x[m])].min()
    i = roots[(roots > x[m]) & (roots <= x[right] + 1e-5)].max()
    return x[m], s, i


def test_family_endpoints_against_grid_oracle(slt):
    fam = pm.tuning_family(slt, 84.7)
    xm, s, i = _oracle_family(84.7)
    assert fam.degenerate.lambda_s == pytest.approx(xm, abs=2e-5)
    assert fam.separated.lambda_s == pytest.approx(s, abs=2e-5)
    assert fam.separated.lambda_i == pytest.approx(i, abs=2e-5)


def test_degenerate_endpoint_at_published_temperature(slt):
    deg = pm.tuning_family(slt, 84.7).degenerate
    assert deg.lambda_s == pytest.approx(1.14, abs=0.005)
    assert deg.period == pytest.approx(9.69, abs=0.05)
    assert deg.lambda_p == pytest.approx(0.57, abs=0.005)


def test_family_solutions_span_family(slt):
    sols = pm.family_solutions(slt, 84.7, 50)
    assert sols[0].degenerate and not sols[-1].degenerate
    spans = [q.lambda_i - q.lambda_s for q in sols]
    assert np.all(np.diff(spans) >= -1e-12)
    for q in sols:
        assert max(abs(r) for r in q.residuals) < 1e-6


def test_widest_tunability_regression(slt):
    r = pm.widest_tunability_search(slt, (80.0, 90.0))
    # frozen; the optimum sits where the two maxima bounding the valley cross
    assert r.temperature == pytest.approx(84.5745, abs=2e-3)
    v = pm.tuning_family(slt, r.temperature).valley
    assert v.left.value == pytest.approx(v.right.value, rel=1e-4)
    spans = [s for _, s in r.scan if not math.isnan(s)]
    assert r.span >= max(spans) - 1e-9


def test_widest_tunability_against_scan_oracle(slt):
    temps = np.arange(84.0, 85.21, 0.05)
    spans = []
    for T in temps:
        _, s, i = _oracle_family(T)
        spans.append(i - s)
    best = temps[int(np.argmax(spans))]
    r = pm.widest_tunability_search(slt, (80.0, 90.0))
    assert abs(r.temperature - best) <= 0.05 + 1e-9


@pytest.mark.parametrize("period, T_deg, lam_deg", [
    (6.04, 81.7815, 0.9755),
    (10.6, 85.33, 1.1752),
    (20.6, 91.2334, 1.5350),
])
def test_degenerate_temperatures_regression(slt, period, T_deg, lam_deg):
    (q,) = pm.find_degenerate_temperatures(slt, period, (70.0, 110.0))
    assert q.degenerate
    assert q.temperature == pytest.approx(T_deg, abs=2e-3)
    assert q.lambda_s == pytest.approx(lam_deg, abs=2e-4)
    assert q.period == pytest.approx(period, abs=1e-7)


def test_tuning_curve_fixed_period(slt):
    curve = pm.tuning_curve_fixed_period(slt, 6.04, (70.0, 110.0), 0.5)
    sols = curve.solutions()
    assert sols and any(q.degenerate for q in sols)
    for q in sols:
        assert q.period == pytest.approx(6.04, abs=1e-8)
        assert max(abs(r) for r in q.residuals) < 1e-6
        assert q.lambda_s <= q.lambda_i
    temps = [T for T, _ in curve.points]
    assert temps == sorted(temps)
    # temperatures below the degeneracy have no solution
    assert all(q is None for T, q in curve.points if T < 81.5)


def test_tuning_curve_no_solution(slt):
    curve = pm.tuning_curve_fixed_period(slt, 6.04, (20.0, 30.0), 2.0)
    assert curve.empty
    assert curve.diagnostics


def test_fixed_pump_beta_regression(slt):
    (q,) = pm.solve_fixed_pump(slt, 0.488, 7.83, (70.0, 110.0))
    assert q.temperature == pytest.approx(83.39558, abs=1e-4)
    assert q.lambda_s == pytest.approx(0.638643, abs=1e-5)
    assert q.lambda_i == pytest.approx(2.068851, abs=1e-5)
    assert q.lambda_p == pytest.approx(0.488, abs=1e-12)
    K = TWO_PI / 7.83
    assert abs(oracle.delta_k_a(0.488, q.lambda_s, q.lambda_i, q.temperature) - K) < 1e-8
    assert abs(oracle.delta_k_b(0.488, q.lambda_s, q.lambda_i, q.temperature) - K) < 1e-8


def test_tuning_curve_fixed_pump(slt):
    curve = pm.tuning_curve_fixed_pump(slt, 0.488, [7.6, 7.7, 7.8, 7.83], (70.0, 110.0))
    sols = curve.solutions()
    assert len(sols) >= 4
    for q in sols:
        assert q.lambda_p == pytest.approx(0.488, abs=1e-12)
        assert max(abs(r) for r in q.residuals) < 1e-6


def test_pump_outside_range_is_skipped(slt, caplog):
    s, i = 0.4614, 1.0
    with caplog.at_level("INFO"):
        assert pm.solution_from_pair(slt, 81.8, s, i) is None
    assert "out of range" in caplog.text


def test_csv_round_trip(slt, tmp_path):
    sols = pm.solve_simultaneous(slt, 81.8, 1.919e-4)
    buf = io.StringIO()
    pm.write_solutions_csv(buf, sols)
    head = buf.getvalue().splitlines()[0]
    assert head == "T_c,lambda_p_um,lambda_s_um,lambda_i_um,period_um,residual_a,residual_b"
    path = tmp_path / "c.csv"
    pm.write_solutions_csv(path, sols)
    back = pm.read_solutions_csv(path)
    assert back[0].lambda_s == pytest.approx(sols[0].lambda_s, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(T=st.floats(70.0, 110.0), x0=st.floats(0.45, 4.9))
def test_roots_solve_the_level(slt, T, x0):
    level = pm.condition_function(slt, x0, T)
    roots = pm.find_condition_solutions(slt, T, level)
    assert roots == sorted(roots)
    assert min(abs(r - x0) for r in roots) < 1e-9
    F = pm.condition_function(slt, np.array(roots), T)
    assert np.max(np.abs(F - level)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(T=st.floats(78.0, 103.0), u=st.floats(0.0, 1.0))
def test_solutions_are_consistent(slt, T, u):
    fam = pm.tuning_family(slt, T)
    if fam is None:
        return
    level = fam.valley.f_min + u * (fam.valley.top - fam.valley.f_min)
    for q in pm.solve_simultaneous(slt, T, level):
        assert q.lambda_s <= q.lambda_i
        assert abs(q.energy_mismatch()) < 1e-12
        assert q.period > 0
        assert max(abs(r) for r in q.residuals) < 1e-6
        lo, hi = slt.wavelength_range
        assert lo <= q.lambda_p <= hi
