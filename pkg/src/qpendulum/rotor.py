"""High-energy (free-rotor) limit: perturbative levels, handbook series, WKB."""

from __future__ import annotations

import math
from dataclasses import dataclass

from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from .model import PendulumConfig

__all__ = [
    "RotorLevel",
    "WkbResult",
    "rotor_energy",
    "rotor_terms",
    "handbook_a_high",
    "wkb_series",
    "wkb_action_root",
    "wkb_action",
]

ROTOR_ORDERS = (0, 2, 4)


@dataclass(frozen=True)
class RotorLevel:
    m: int
    order: int
    energy: float


@dataclass(frozen=True)
class WkbResult:
    m: int
    a: float
    method: str
    valid: bool = True


def rotor_terms(cfg: PendulumConfig, order: int) -> list[tuple[Polynomial, Polynomial]]:
    """Energy through ``order`` as a list of (numerator, denominator) polynomials in m.

    * order 0: ``hbar^2 m^2 / 2I``
    * order 2: ``+ I v0^2 / (hbar^2 (4m^2 - 1))``
    * order 4: ``+ I^3 v0^4 / hbar^6 * (20m^2 + 7) / ((4m^2 - 1)^3 (4m^2 - 4))``

    The order-4 prefactor is fixed by requiring ``a = 8IE/hbar^2`` to
    reproduce the q^4 term of the small-q Mathieu series exactly.
    """
    if order not in ROTOR_ORDERS:
        raise ValueError(f"rotor order must be one of {ROTOR_ORDERS}")
    hbar, inertia, v0 = cfg.hbar, cfg.inertia(), cfg.v0
    one = Polynomial([1.0])
    terms = [(Polynomial([0.0, 0.0, hbar**2 / (2.0 * inertia)]), one)]
    if order >= 2:
        terms.append((Polynomial([inertia * v0**2 / hbar**2]), Polynomial([-1.0, 0.0, 4.0])))
    if order >= 4:
        c4 = inertia**3 * v0**4 / hbar**6
        denominator = Polynomial([-1.0, 0.0, 4.0]) ** 3 * Polynomial([-4.0, 0.0, 4.0])
        terms.append((Polynomial([7.0 * c4, 0.0, 20.0 * c4]), denominator))
    return terms


def rotor_energy(m: int, cfg: PendulumConfig, order: int = 4) -> RotorLevel:
    """Perturbative rotor level ``E_m`` through ``order`` (0, 2 or 4).

    ``m`` and ``-m`` are degenerate and folded onto ``|m|``.  Corrected
    orders need ``|m| >= 2``: m = 1 is split in first order and sits on a pole
    of the order-4 term.
    """
    m = abs(int(m))
    if order >= 2 and m < 2:
        raise ValueError("corrected rotor levels need |m| >= 2")
    energy = sum(float(num(m) / den(m)) for num, den in rotor_terms(cfg, order))
    return RotorLevel(m, order, energy)


def handbook_a_high(r: int, q: float, highest: int = 2) -> float:
    """Small-q series ``r^2 + q^2/(2(r^2-1)) + (5r^2+7) q^4/(32 (r^2-1)^3 (r^2-4))``.

    Terms 0 through ``highest`` are kept.  The same value approximates both
    a_r and b_r.
    """
    if r <= 2:
        raise ValueError("the small-q series needs r >= 3")
    if not 0 <= highest <= 2:
        raise ValueError("highest must be 0, 1 or 2")
    r2 = float(r) ** 2
    terms = (r2, q**2 / (2.0 * (r2 - 1.0)), (5.0 * r2 + 7.0) * q**4 / (32.0 * (r2 - 1.0) ** 3 * (r2 - 4.0)))
    return math.fsum(terms[: highest + 1])


def wkb_series(m: int, q: float, highest: int = 3) -> WkbResult:
    """Leading-in-m WKB series ``m^2 + q^2/2m^2 + 5q^4/32m^6 + 9q^6/64m^10``.

    ``valid`` is False when ``q^2/(2 m^4) >= 1``; the value is still returned.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 <= highest <= 3:
        raise ValueError("highest must be between 0 and 3")
    mf = float(m)
    terms = (mf**2, q**2 / (2.0 * mf**2), 5.0 * q**4 / (32.0 * mf**6), 9.0 * q**6 / (64.0 * mf**10))
    valid = q**2 / (2.0 * mf**4) < 1.0
    return WkbResult(m, math.fsum(terms[: highest + 1]), "series", valid)


def wkb_action(a: float, q: float) -> float:
    """``sqrt(a) * int_{-pi}^{pi} sqrt(1 + (2q/a) cos theta) dtheta`` for a > 2q."""
    ratio = 2.0 * q / a
    value, _ = integrate.quad(lambda t: math.sqrt(1.0 + ratio * math.cos(t)), 0.0, math.pi,
                              epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * math.sqrt(a) * value


def wkb_action_root(m: int, q: float) -> WkbResult:
    """Solve ``2 m pi = wkb_action(a, q)`` for ``a`` above the separatrix (a > 2q)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    q = abs(float(q))
    lo = max(2.0 * q * 1.0001, 0.5 * m * m)
    hi = 4.0 * m * m + 2.0 * q
    target = 2.0 * m * math.pi

    def residual(a):
        return wkb_action(a, q) - target

    if residual(lo) > 0 or residual(hi) < 0:
        raise ValueError(f"no rotor-regime WKB root for m={m}, q={q}; the state lies below a = 2q")
    a = optimize.brentq(residual, lo, hi, xtol=1e-13, rtol=4 * 2.220446049250313e-16, maxiter=200)
    return WkbResult(m, a, "action-root", True)
