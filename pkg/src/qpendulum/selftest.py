"""Built-in checks of the perturbation engine, exposed through ``qpendulum selftest``.

Three exactly solvable deformations of the oscillator serve as benchmarks:
a constant shift (first order only), a linear force (second order only,
by completing the square) and a change of spring constant (a Taylor series
in the coupling).
"""

from __future__ import annotations

import math

from .model import NOMINAL, PendulumConfig
from .oscillator import (
    OscillatorFrame,
    PerturbationPolynomial,
    closed_form,
    graded_correction,
    rs_pt,
)

__all__ = ["benchmark_constant", "benchmark_linear", "benchmark_quadratic", "engine_sweep", "run", "CHECKS"]

UNIT_FRAME = OscillatorFrame(hbar=1.0, mass=1.0, omega=1.0, n_max=6, basis_dim=40)
ENGINE_CONFIGS = (NOMINAL, PendulumConfig(1.0, 1.0, 1.0, 400.0), PendulumConfig(0.7, 1.3, 0.9, 55.0))


def benchmark_constant(shift: float = 0.37, n_values=range(4), frame: OscillatorFrame = UNIT_FRAME) -> dict:
    """``V' = shift``: first order gives the shift, higher orders vanish."""
    pert = PerturbationPolynomial({0: shift})
    worst_first, worst_higher = 0.0, 0.0
    for n in n_values:
        worst_first = max(worst_first, abs(rs_pt(pert, n, frame, 1) - shift))
        for k in (2, 3, 4):
            worst_higher = max(worst_higher, abs(rs_pt(pert, n, frame, k)))
    return {"check": "constant", "passed": worst_first < 1e-12 and worst_higher < 1e-10,
            "first_order_error": worst_first, "max_higher_order": worst_higher}


def benchmark_linear(force: float = 0.8, n_values=range(4), frame: OscillatorFrame = UNIT_FRAME) -> dict:
    """``V' = -F x``: only second order survives, equal to ``-F^2/(2 mu omega^2)``."""
    pert = PerturbationPolynomial({1: -force})
    exact = -force**2 / (2.0 * frame.mass * frame.omega**2)
    worst_second, worst_other = 0.0, 0.0
    for n in n_values:
        worst_second = max(worst_second, abs(rs_pt(pert, n, frame, 2) / exact - 1.0))
        for k in (1, 3, 4):
            worst_other = max(worst_other, abs(rs_pt(pert, n, frame, k)))
    return {"check": "linear", "passed": worst_second < 1e-10 and worst_other < 1e-10,
            "second_order_rel_error": worst_second, "max_other_order": worst_other}


def _binomial_half(k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


def quadratic_residual(coupling: float, n: int, frame: OscillatorFrame = UNIT_FRAME):
    """Exact shift minus the RS sum through order 4 for ``V' = coupling x^2``.

    The exact level is ``(n + 1/2) hbar sqrt(omega^2 + 2 coupling/mu)``.
    """
    pert = PerturbationPolynomial({2: coupling})
    s = 2.0 * coupling / (frame.mass * frame.omega**2)
    level = (n + 0.5) * frame.quantum
    exact_shift = level * math.expm1(0.5 * math.log1p(s))
    orders = [rs_pt(pert, n, frame, k) for k in (1, 2, 3, 4)]
    taylor = [level * _binomial_half(k) * s**k for k in (1, 2, 3, 4)]
    return exact_shift - math.fsum(orders), orders, taylor


def benchmark_quadratic(n_values=range(4), frame: OscillatorFrame = UNIT_FRAME) -> dict:
    """Orders 1-4 match the Taylor coefficients; the remainder scales as coupling^5."""
    mw2 = frame.mass * frame.omega**2
    couplings = (1e-3 * mw2, 1e-2 * mw2)
    slopes, worst_taylor = [], 0.0
    for n in n_values:
        residuals = []
        for coupling in couplings:
            residual, orders, taylor = quadratic_residual(coupling, n, frame)
            residuals.append(abs(residual))
            worst_taylor = max(worst_taylor, max(abs(o / t - 1.0) for o, t in zip(orders, taylor)))
        slopes.append(math.log(residuals[1] / residuals[0]) / math.log(couplings[1] / couplings[0]))
    passed = all(abs(s - 5.0) <= 0.2 for s in slopes) and worst_taylor < 1e-9
    return {"check": "quadratic", "passed": passed, "slopes": slopes, "max_taylor_rel_error": worst_taylor}


def engine_sweep(configs=ENGINE_CONFIGS, n_values=range(11), orders=(1, 2, 3, 4)) -> dict:
    """Numerical RS engine against the closed-form polynomials."""
    worst = 0.0
    for cfg in configs:
        for order in orders:
            for n in n_values:
                engine = graded_correction(order, n, cfg).value
                worst = max(worst, abs(engine / closed_form(order, n, cfg) - 1.0))
    return {"check": "engine", "passed": bool(worst < 1e-9), "max_rel_error": float(worst)}


CHECKS = {
    "engine": engine_sweep,
    "constant": benchmark_constant,
    "linear": benchmark_linear,
    "quadratic": benchmark_quadratic,
}


def run(names=None) -> list[dict]:
    names = list(CHECKS) if not names or names == ["all"] else names
    return [CHECKS[name]() for name in names]
