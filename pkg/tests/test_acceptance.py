"""Exit criteria of the build, one test per criterion.

Each test prints a single PASS/FAIL line; the terminal summary repeats them.
"""

import math
import time

import numpy as np
import pytest

from oracles import period_quad
from qpendulum.classical import period
from qpendulum.figures import FIGURES, build_figure
from qpendulum.mathieu import char_values, spectrum
from qpendulum.model import NOMINAL, Parity, PendulumConfig, a_from_energy
from qpendulum.oscillator import handbook_a_low
from qpendulum.rotor import handbook_a_high, rotor_energy, wkb_action_root, wkb_series
from qpendulum.selftest import ENGINE_CONFIGS, benchmark_constant, benchmark_linear, benchmark_quadratic, engine_sweep
from qpendulum.timescales import CORRECTED, RAW, analytic_timescales, discrete_table, separatrix_band

pytestmark = pytest.mark.acceptance


def report(number, ok, detail):
    print(f"\n[acceptance {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_01_small_q_series():
    start = time.perf_counter()
    values = char_values(1.0, Parity.EVEN, 11)
    worst = max(abs(cv.a - handbook_a_high(cv.label.r, 1.0)) for cv in values if 8 <= cv.label.r <= 20)
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-6 and elapsed < 1.0, f"q=1 r=8..20 max|a-series|={worst:.2e} in {elapsed:.2f}s")


def test_02_large_q_series():
    start = time.perf_counter()
    table = spectrum(NOMINAL, 6)
    worst = max(abs(row.a - handbook_a_low(row.global_index, 160.0)) for row in table)
    elapsed = time.perf_counter() - start
    report(2, worst <= 1e-2 and elapsed < 1.0, f"q=160 n=0..5 max|a-series|={worst:.2e} in {elapsed:.2f}s")


def test_03_engine_equivalence():
    start = time.perf_counter()
    result = engine_sweep(configs=ENGINE_CONFIGS, n_values=range(11), orders=(1, 2, 3, 4))
    elapsed = time.perf_counter() - start
    ok = result["max_rel_error"] <= 1e-9 and elapsed < 30.0 and len(ENGINE_CONFIGS) == 3
    report(3, ok, f"g=1..4 n=0..10 x3 configs max rel err={result['max_rel_error']:.2e} in {elapsed:.2f}s")


def test_04_benchmark_triple():
    const, linear, quad = benchmark_constant(), benchmark_linear(), benchmark_quadratic()
    ok = (const["max_higher_order"] < 1e-10 and linear["second_order_rel_error"] < 1e-10
          and linear["max_other_order"] < 1e-10 and all(abs(s - 5.0) <= 0.2 for s in quad["slopes"]))
    report(4, ok, f"constant {const['max_higher_order']:.1e}, linear {linear['second_order_rel_error']:.1e}, "
                  f"quadratic slopes {min(quad['slopes']):.3f}..{max(quad['slopes']):.3f}")


def test_05_rotor_handbook_identity():
    worst = 0.0
    for m in range(2, 31):
        a = a_from_energy(rotor_energy(m, NOMINAL, 4).energy, NOMINAL)
        worst = max(worst, abs(a / handbook_a_high(2 * m, NOMINAL.q, 2) - 1.0))
    report(5, worst <= 1e-12, f"m=2..30 max rel diff={worst:.2e}")


def test_06_classical_periods():
    rng = np.random.default_rng(20240601)
    energies = np.concatenate([rng.uniform(-0.999, 0.999, 100), rng.uniform(1.001, 100.0, 100)]) * NOMINAL.v0
    worst = max(abs(period(e, NOMINAL).tau / period_quad(e, NOMINAL) - 1.0) for e in energies)
    bottom = abs(period(-NOMINAL.v0, NOMINAL).tau / (2 * math.pi * math.sqrt(0.5 / 80.0)) - 1.0)
    high = 100 * NOMINAL.v0
    limit = abs(period(high, NOMINAL).tau / (2 * math.pi * math.sqrt(0.5 / (2 * high))) - 1.0)
    ok = worst <= 1e-8 and bottom <= 1e-10 and limit <= 5e-3
    report(6, ok, f"200 energies max rel={worst:.1e}; tau(-V0) rel={bottom:.1e}; 100 V0 ratio off by {limit:.1e}")


def _plateaus(table):
    rotor, oscillator = [], []
    for parity in (Parity.EVEN, Parity.ODD):
        tables = discrete_table(table, parity)
        rotor += [(parity, r.timescales(1.0).t_rev) for r in tables[RAW]
                  if r.e_center > 4 * NOMINAL.v0 and not math.isnan(r.d2)]
        oscillator += [(parity, r.timescales(1.0).t_rev) for r in tables[CORRECTED]
                       if r.e_center < -0.5 * NOMINAL.v0 and not math.isnan(r.d2)]
    return rotor, oscillator


def test_07_revival_plateaus(nominal_table):
    rotor, oscillator = _plateaus(nominal_table)
    rotor_ok = all(abs(t / (2 * math.pi) - 1) <= 0.05 for _, t in rotor)
    rotor_ok &= {p for p, _ in rotor} == {Parity.EVEN, Parity.ODD}
    osc_ok = bool(oscillator) and all(abs(t / (16 * math.pi) - 1) <= 0.20 for _, t in oscillator)
    ratio = np.mean([t for _, t in oscillator]) / np.mean([t for _, t in rotor])
    ok = rotor_ok and osc_ok and abs(ratio / 8 - 1) <= 0.25
    report(7, ok, f"rotor {len(rotor)} rows within 5% of 2pi; oscillator {len(oscillator)} row(s) "
                  f"within 20% of 16pi; plateau ratio {ratio:.2f}")


def test_08_separatrix():
    start = time.perf_counter()
    table = spectrum(NOMINAL, 90)
    details, ok = [], True
    for parity in (Parity.EVEN, Parity.ODD):
        raw = discrete_table(table, parity)[RAW]
        nearest = separatrix_band(table, parity, size=1).pop()
        band = separatrix_band(table, parity)
        taus = [r.timescales(1.0).tau for r in raw]
        peak = raw[int(np.argmax(taus))]
        ok &= nearest in (peak.state.global_index, peak.next_state.global_index) and math.isfinite(max(taus))
        revs = [r for r in raw if not math.isnan(r.d2)]
        rev_peak = max(revs, key=lambda r: r.timescales(1.0).t_rev)
        ok &= rev_peak.state.global_index == nearest and math.isfinite(rev_peak.timescales(1.0).t_rev)
        outside = [r for r in revs if r.state.global_index not in band]
        below = [r.timescales(1.0).t_rev for r in outside if r.e_center < NOMINAL.v0]
        above = [r.timescales(1.0).t_rev for r in outside if r.e_center > NOMINAL.v0][:12]
        ok &= bool(np.all(np.diff(below) < 0)) and bool(np.all(np.diff(above) > 0))
        details.append(f"{parity}: peaks at state {nearest}")
    for fid in FIGURES:
        build_figure(fid)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60.0
    report(8, ok, f"{'; '.join(details)}; monotone approach on both sides; pipeline {elapsed:.1f}s")


def test_09_wkb():
    worst = 0.0
    for parity in (Parity.EVEN, Parity.ODD):
        for cv in char_values(1.0, parity, 30):
            if cv.label.r >= 20:
                worst = max(worst, abs(wkb_series(cv.label.r, 1.0).a - cv.a))
    gap = abs(wkb_action_root(20, 160.0).a - wkb_series(20, 160.0).a)
    report(9, worst <= 1e-4 and gap < 0.5, f"q=1 m>=20 max|series-solver|={worst:.1e}; (20,160) root-series={gap:.3f}")


def test_10_hierarchy():
    rotor_worst = 0.0
    for m in range(2, 101):
        ts = analytic_timescales("rotor", m, NOMINAL, 0)
        rotor_worst = max(rotor_worst, abs(ts.t_rev / ts.tau / (2 * m) - 1.0))
    osc_worst = 0.0
    for cfg in (NOMINAL, PendulumConfig(1.0, 1.0, 1.0, 400.0), PendulumConfig(0.7, 1.3, 0.9, 55.0)):
        for n in range(11):
            ratio = analytic_timescales("oscillator", n, cfg, 1).t_rev / analytic_timescales("oscillator", n, cfg, 0).tau
            osc_worst = max(osc_worst, abs(ratio / (8 * math.sqrt(cfg.q)) - 1.0))
    ok = rotor_worst <= 1e-14 and osc_worst <= 1e-9
    report(10, ok, f"rotor T_rev/tau vs 2m rel={rotor_worst:.1e}; oscillator vs 8 sqrt(q) rel={osc_worst:.1e}")
