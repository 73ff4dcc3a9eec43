"""Classical period, revival and superrevival times.

From ``E(n) ~ E(n0) + E'(n0)(n - n0) + E''(n0)(n - n0)^2/2 + E'''(n0)(n - n0)^3/6``:

    tau     = 2 pi hbar / |E'|
    T_rev   = 2 pi hbar / (|E''| / 2)
    T_super = 2 pi hbar / (|E'''| / 6)

The derivatives come either from the perturbative series (treating the
quantum number as continuous) or from finite differences of the exact
spectrum taken within one parity class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .mathieu import SpectrumRow, SpectrumTable
from .model import Parity, PendulumConfig, StateLabel
from .oscillator import MAX_GRADE, closed_form_poly
from .rotor import ROTOR_ORDERS, rotor_terms

__all__ = [
    "Timescales",
    "DiscreteDerivatives",
    "RAW",
    "CORRECTED",
    "timescales_from",
    "series_derivatives",
    "analytic_timescales",
    "discrete_table",
    "separatrix_band",
    "hierarchy_ratios",
]

RAW = "raw"
CORRECTED = "parity-corrected"
# a parity subsequence advances the oscillator quantum number by 2
_PARITY_SCALE = (2.0, 4.0, 8.0)


@dataclass(frozen=True)
class Timescales:
    tau: float
    t_rev: float
    t_super: float
    source: str

    @property
    def rev_infinite(self) -> bool:
        return math.isinf(self.t_rev)

    @property
    def super_infinite(self) -> bool:
        return math.isinf(self.t_super)


def _inverse_time(hbar, derivative, factorial):
    if math.isnan(derivative):
        return math.nan
    if derivative == 0:
        return math.inf
    return 2.0 * math.pi * hbar / (abs(derivative) / factorial)


def timescales_from(d1: float, d2: float, d3: float, hbar: float, source: str = "") -> Timescales:
    """Timescales from the first three derivatives of E with respect to quantum number.

    A vanishing second or third derivative yields an infinite revival or
    superrevival time; a vanishing first derivative is an error.
    """
    if d1 == 0 or math.isnan(d1):
        raise ValueError("the classical period needs a non-zero first derivative")
    return Timescales(
        tau=_inverse_time(hbar, d1, 1.0),
        t_rev=_inverse_time(hbar, d2, 2.0),
        t_super=_inverse_time(hbar, d3, 6.0),
        source=source,
    )


def _taylor(numerator: Polynomial, denominator: Polynomial, x: float, k: int = 3):
    """Taylor coefficients of numerator/denominator about x, up to (x+h)^k."""

    def shifted(poly):
        out, p = [], poly
        for j in range(k + 1):
            out.append(float(p(x)) / math.factorial(j))
            p = p.deriv()
        return out

    p, q = shifted(numerator), shifted(denominator)
    r = []
    for j in range(k + 1):
        acc = p[j] - sum(r[i] * q[j - i] for i in range(j))
        r.append(acc / q[0])
    return r


def series_derivatives(limit: str, x: float, cfg: PendulumConfig, order: int):
    """``(E, E', E'', E''')`` of the perturbative series at continuous quantum number ``x``."""
    if limit == "oscillator":
        if not 0 <= order <= MAX_GRADE:
            raise ValueError(f"oscillator order must be between 0 and {MAX_GRADE}")
        if x < 0:
            raise ValueError("n must be non-negative")
        poly = sum((closed_form_poly(g, cfg) for g in range(order + 1)), Polynomial([0.0]))
        terms = [(poly, Polynomial([1.0]))]
    elif limit == "rotor":
        if order not in ROTOR_ORDERS:
            raise ValueError(f"rotor order must be one of {ROTOR_ORDERS}")
        if order >= 2 and x < 2:
            raise ValueError("corrected rotor series need m >= 2")
        terms = rotor_terms(cfg, order)
    else:
        raise ValueError("limit must be 'rotor' or 'oscillator'")
    coeffs = np.sum([_taylor(num, den, float(x)) for num, den in terms], axis=0)
    return tuple(float(c * math.factorial(j)) for j, c in enumerate(coeffs))


def analytic_timescales(limit: str, x: float, cfg: PendulumConfig, order: int) -> Timescales:
    _, d1, d2, d3 = series_derivatives(limit, x, cfg, order)
    return timescales_from(d1, d2, d3, cfg.hbar, source=f"analytic({limit}, {order})")


@dataclass(frozen=True)
class DiscreteDerivatives:
    """Finite differences at position k of one parity subsequence.

    ``d1 = E[k+1] - E[k]`` sits at ``e_bar = (E[k] + E[k+1])/2``;
    ``d2 = E[k+1] - 2E[k] + E[k-1]`` sits at ``e_center = E[k]``;
    ``d3 = E[k+2] - 3E[k+1] + 3E[k] - E[k-1]`` is centred like d1.
    Differences running off either end of the table are NaN.
    """

    parity: Parity
    variant: str
    state: StateLabel
    next_state: StateLabel
    e_bar: float
    e_center: float
    d1: float
    d2: float
    d3: float

    def timescales(self, hbar: float) -> Timescales:
        return timescales_from(self.d1, self.d2, self.d3, hbar, source=f"discrete({self.parity}, {self.variant})")


def discrete_table(spectrum: SpectrumTable, parity) -> dict[str, list[DiscreteDerivatives]]:
    """Raw and parity-corrected finite differences within one parity class.

    The parity-corrected variant divides d1, d2, d3 by 2, 4, 8, which is
    right in the oscillator regime where consecutive states of one parity
    are two quanta apart.  Among the rotor states each parity holds one state
    per m, so the raw variant is the physical one there.
    """
    parity = Parity(parity)
    rows: list[SpectrumRow] = spectrum.select(parity)
    if len(rows) < 4:
        raise ValueError(f"need at least 4 {parity} states, got {len(rows)}")
    e = np.array([row.energy for row in rows])
    n = len(e)
    out = {RAW: [], CORRECTED: []}
    for k in range(n - 1):
        d1 = e[k + 1] - e[k]
        d2 = e[k + 1] - 2 * e[k] + e[k - 1] if k >= 1 else math.nan
        d3 = e[k + 2] - 3 * e[k + 1] + 3 * e[k] - e[k - 1] if 1 <= k <= n - 3 else math.nan
        common = dict(parity=parity, state=rows[k].label, next_state=rows[k + 1].label,
                      e_bar=0.5 * (e[k] + e[k + 1]), e_center=float(e[k]))
        out[RAW].append(DiscreteDerivatives(variant=RAW, d1=float(d1), d2=float(d2), d3=float(d3), **common))
        s1, s2, s3 = _PARITY_SCALE
        out[CORRECTED].append(DiscreteDerivatives(variant=CORRECTED, d1=float(d1 / s1), d2=float(d2 / s2),
                                                  d3=float(d3 / s3), **common))
    return out


def separatrix_band(spectrum: SpectrumTable, parity, size: int = 3) -> set[int]:
    """Global indices of the ``size`` states of one parity closest to E = +v0."""
    rows = spectrum.select(parity)
    ranked = sorted(rows, key=lambda row: abs(row.energy - spectrum.v0))
    return {row.global_index for row in ranked[:size]}


def hierarchy_ratios(limit: str, x: float, q: float) -> tuple[float, float, float]:
    """Leading-order ``(T_super, T_rev, tau)`` in units of tau.

    Rotor (large m): ``((4 m^3/q)^2, 2m, 1)``.  Oscillator: ``((8 sqrt q)^2, 8 sqrt q, 1)``.
    """
    if limit == "rotor":
        rev = 2.0 * x
        sup = (4.0 * x**3 / q) ** 2 if q > 0 else math.inf
        return sup, rev, 1.0
    if limit == "oscillator":
        if q <= 0:
            raise ValueError("the oscillator limit needs q > 0")
        rev = 8.0 * math.sqrt(q)
        return rev**2, rev, 1.0
    raise ValueError("limit must be 'rotor' or 'oscillator'")
