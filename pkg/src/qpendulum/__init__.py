"""Quantum pendulum: Mathieu spectrum, perturbative limits and characteristic timescales."""

__version__ = "0.1.0"

from .model import NOMINAL, MathieuCoords, Parity, PendulumConfig, StateLabel, estimate_q  # noqa: E402
from .mathieu import ConvergenceError, SpectrumTable, ab_splitting, char_values, mathieu_spectrum, spectrum  # noqa: E402
from .classical import ClassicalRegime, elliptic_k, period, period_curve  # noqa: E402
from .oscillator import closed_form, closed_form_total, graded_correction, rs_pt  # noqa: E402
from .rotor import rotor_energy, wkb_action_root, wkb_series  # noqa: E402
from .timescales import Timescales, analytic_timescales, discrete_table, timescales_from  # noqa: E402

__all__ = [
    "NOMINAL", "MathieuCoords", "Parity", "PendulumConfig", "StateLabel", "estimate_q",
    "ConvergenceError", "SpectrumTable", "ab_splitting", "char_values", "mathieu_spectrum", "spectrum",
    "ClassicalRegime", "elliptic_k", "period", "period_curve",
    "closed_form", "closed_form_total", "graded_correction", "rs_pt",
    "rotor_energy", "wkb_action_root", "wkb_series",
    "Timescales", "analytic_timescales", "discrete_table", "timescales_from",
]
