"""Low-energy (oscillator-like) perturbation theory for the pendulum.

With ``x = l theta`` the pendulum Hamiltonian is a harmonic oscillator of
frequency ``omega = sqrt(v0/I)`` shifted by ``-v0``, plus the anharmonic
terms ``H_2r = (-1)^(r+1) v0 x^(2r) / ((2r)! l^(2r))`` for r >= 2.  In units of
``hbar omega`` the term ``H_2r`` carries (hbar/sqrt(I v0))^(r-1), so it is
assigned grade ``r - 1``.  The grade-g energy correction collects every
Rayleigh-Schroedinger contribution whose term grades add up to g.

Two independent routes are provided: a generic numerical RS engine
(:func:`rs_pt`, :func:`graded_correction`) and the closed-form polynomials
in n (:func:`closed_form`).  They must agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .mathieu import ConvergenceError
from .model import PendulumConfig

__all__ = [
    "OscillatorFrame",
    "PerturbationPolynomial",
    "PtCorrection",
    "x_power_matrix",
    "rs_terms",
    "rs_pt",
    "pendulum_perturbation",
    "graded_correction",
    "closed_form_poly",
    "closed_form",
    "closed_form_total",
    "handbook_a_low",
]

MAX_GRADE = 4


@dataclass(frozen=True)
class OscillatorFrame:
    """Unperturbed oscillator ``p^2/2mu + mu omega^2 x^2/2`` and its truncated basis."""

    hbar: float
    mass: float
    omega: float
    n_max: int = 0
    basis_dim: int = 40

    def __post_init__(self):
        if min(self.hbar, self.mass, self.omega) <= 0:
            raise ValueError("hbar, mass and omega must be positive")
        if self.n_max < 0 or self.basis_dim <= self.n_max:
            raise ValueError("basis_dim must exceed n_max")

    @classmethod
    def for_config(cls, cfg: PendulumConfig, n_max: int = 0, r_max: int = MAX_GRADE + 1,
                   basis_dim: int | None = None) -> "OscillatorFrame":
        minimum = n_max + 4 * r_max + 10
        if basis_dim is None:
            basis_dim = minimum
        elif basis_dim < minimum:
            raise ValueError(f"basis_dim must be at least {minimum} for H_{2 * r_max}")
        return cls(cfg.hbar, cfg.mass, cfg.omega, n_max, basis_dim)

    @property
    def quantum(self) -> float:
        """Level spacing hbar*omega."""
        return self.hbar * self.omega

    @property
    def length_scale(self) -> float:
        """sqrt(hbar / (2 mu omega)), the unit of the ladder-operator x."""
        return math.sqrt(self.hbar / (2.0 * self.mass * self.omega))

    def resized(self, basis_dim: int) -> "OscillatorFrame":
        return OscillatorFrame(self.hbar, self.mass, self.omega, self.n_max, basis_dim)


@lru_cache(maxsize=64)
def _ladder_power(p: int, dim: int) -> np.ndarray:
    # In the unnormalised basis |n~> = sqrt(n!) |n>, x = a + a^dagger acts as
    # |n~> -> |n+1~> + n |n-1~>, so its powers are integer matrices.
    size = dim + p + 1
    c = np.empty((size, size), dtype=object)
    c.fill(0)
    for i in range(size):
        c[i, i] = 1
    weights = np.arange(1, size, dtype=object)[:, None]
    for _ in range(p):
        new = np.empty_like(c)
        new.fill(0)
        new[1:] += c[:-1]
        new[:-1] += weights * c[1:]
        c = new
    c = c[:dim, :dim]
    out = np.zeros((dim, dim))
    for i, j in zip(*np.nonzero(c != 0)):
        out[i, j] = c[i, j] * math.sqrt(math.factorial(i) / math.factorial(j))
    out.setflags(write=False)
    return out


def x_power_matrix(p: int, dim: int, frame: OscillatorFrame) -> np.ndarray:
    """Matrix ``<i|x^p|j>`` over the first ``dim`` oscillator states.

    The result has bandwidth ``p``; every retained entry is exact (no
    truncation artefact at the basis edge).
    """
    if p < 0:
        raise ValueError("power must be non-negative")
    if dim < p + 2:
        raise ValueError(f"dim must be at least p + 2 = {p + 2}")
    return _ladder_power(p, dim) * frame.length_scale**p


@dataclass(frozen=True)
class PerturbationPolynomial:
    """``sum_p coefficients[p] * x^p`` with an integer grade attached to each power."""

    coefficients: dict
    grades: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in self.coefficients:
            if int(p) != p or p < 0:
                raise ValueError("powers must be non-negative integers")
        grades = {p: self.grades.get(p, 1) for p in self.coefficients}
        if any(g < 1 for g in grades.values()):
            raise ValueError("grades must be >= 1")
        object.__setattr__(self, "grades", grades)

    @property
    def max_power(self) -> int:
        return max(self.coefficients, default=0)

    def matrix(self, dim: int, frame: OscillatorFrame, grade: int | None = None) -> np.ndarray:
        out = np.zeros((dim, dim))
        for p, coef in self.coefficients.items():
            if grade is None or self.grades[p] == grade:
                out += coef * x_power_matrix(p, dim, frame)
        return out

    def by_grade(self, dim: int, frame: OscillatorFrame) -> dict:
        return {g: self.matrix(dim, frame, g) for g in sorted(set(self.grades.values()))}


@dataclass(frozen=True)
class PtCorrection:
    n: int
    order: int
    value: float


def _resolvent(n: int, dim: int, quantum: float) -> np.ndarray:
    gaps = (n - np.arange(dim)) * quantum
    inv = np.zeros(dim)
    mask = gaps != 0
    inv[mask] = 1.0 / gaps[mask]
    return inv


def rs_terms(mats, n: int, inv_gap: np.ndarray) -> float:
    """Rayleigh-Schroedinger energy shift of order ``len(mats)`` (1 to 4).

    Each occurrence of the perturbation in the textbook formula is replaced,
    in order of appearance, by the next matrix in ``mats``.  Summing over all
    orderings of a multiset of operators reproduces the mixed-term
    contributions.  ``inv_gap[j] = 1/(E_n - E_j)``, zero at ``j = n``.
    """
    k = len(mats)
    g = inv_gap
    if k == 1:
        return float(mats[0][n, n])
    if k == 2:
        a, b = mats
        return float(a[n] @ (g * b[:, n]))
    if k == 3:
        a, b, c = mats
        main = a[n] @ (g * (b @ (g * c[:, n])))
        return float(main - a[n, n] * (b[n] @ (g**2 * c[:, n])))
    if k == 4:
        a, b, c, d = mats
        main = a[n] @ (g * (b @ (g * (c @ (g * d[:, n])))))
        t2 = a[n, n] * (b[n] @ (g * (c @ (g**2 * d[:, n]))))
        t3 = a[n, n] * (b[n] @ (g**2 * (c @ (g * d[:, n]))))
        t4 = a[n, n] * b[n, n] * (c[n] @ (g**3 * d[:, n]))
        t5 = (a[n] @ (g * b[:, n])) * (c[n] @ (g**2 * d[:, n]))
        return float(main - t2 - t3 + t4 - t5)
    raise ValueError("RS order must be 1, 2, 3 or 4")


def _converged(v1, v2, scale):
    return abs(v1 - v2) <= 1e-9 * abs(v2) + 1e-13 * scale


def rs_pt(perturbation: PerturbationPolynomial, n: int, frame: OscillatorFrame,
          rs_order: int, check: bool = True) -> float:
    """Order-``rs_order`` RS shift of level ``n`` for the whole perturbation.

    The sums run over the truncated basis of ``frame``; with ``check`` the
    calculation is repeated with ten more states and a mismatch raises
    :class:`ConvergenceError`.
    """
    if not 1 <= rs_order <= 4:
        raise ValueError("rs_order must be between 1 and 4")
    if n < 0:
        raise ValueError("n must be non-negative")

    def evaluate(dim):
        if dim <= n + perturbation.max_power:
            raise ValueError(f"basis_dim {dim} too small for n={n}, power {perturbation.max_power}")
        v = perturbation.matrix(dim, frame)
        return rs_terms([v] * rs_order, n, _resolvent(n, dim, frame.quantum)), v

    value, v = evaluate(frame.basis_dim)
    if check:
        again, _ = evaluate(frame.basis_dim + 10)
        row = float(np.max(np.abs(v[n]))) or 1.0
        scale = frame.quantum * (row / frame.quantum) ** rs_order
        if not _converged(value, again, scale):
            raise ConvergenceError(f"RS order {rs_order} for n={n} changed from {value} to {again}")
    return value


def pendulum_perturbation(cfg: PendulumConfig, r_max: int = MAX_GRADE + 1) -> PerturbationPolynomial:
    """Anharmonic terms H_4 ... H_{2 r_max} of the pendulum expanded about theta = 0."""
    coefficients, grades = {}, {}
    for r in range(2, r_max + 1):
        coefficients[2 * r] = (-1) ** (r + 1) * cfg.v0 / (math.factorial(2 * r) * cfg.length ** (2 * r))
        grades[2 * r] = r - 1
    return PerturbationPolynomial(coefficients, grades)


def _compositions(total: int, parts: int):
    for combo in itertools.product(range(1, total + 1), repeat=parts):
        if sum(combo) == total:
            yield combo


def _graded_value(g, n, pieces, inv_gap):
    value = 0.0
    for k in range(1, g + 1):
        for combo in _compositions(g, k):
            value += rs_terms([pieces[grade] for grade in combo], n, inv_gap)
    return value


def graded_correction(order: int, n: int, cfg: PendulumConfig,
                      basis_dim: int | None = None, check: bool = True) -> PtCorrection:
    """Grade-``order`` energy correction of level ``n`` from the numerical RS engine.

    Grade 1 is H_4 in first order; grade 2 is H_6 in first order plus H_4 in
    second order; grade 4 collects H_10, (H_8, H_4), (H_6, H_6), (H_6, H_4, H_4)
    and H_4^4 with all their orderings.
    """
    if not 1 <= order <= MAX_GRADE:
        raise ValueError(f"order must be between 1 and {MAX_GRADE}")
    frame = OscillatorFrame.for_config(cfg, n_max=n, basis_dim=basis_dim)
    perturbation = pendulum_perturbation(cfg, r_max=order + 1)

    def evaluate(dim):
        pieces = perturbation.by_grade(dim, frame)
        return _graded_value(order, n, pieces, _resolvent(n, dim, frame.quantum))

    value = evaluate(frame.basis_dim)
    if check:
        again = evaluate(frame.basis_dim + 10)
        if not _converged(value, again, frame.quantum * 1e-6):
            raise ConvergenceError(f"grade {order} correction for n={n} not converged")
    return PtCorrection(n, order, value)


# Closed-form polynomials in n; the prefactor is hbar^a I^b v0^c times the constant.
_CLOSED = {
    1: ((2, -1.0, 0.0), -1 / 32, (1, 2, 2)),
    2: ((3, -1.5, -0.5), -1 / 512, (1, 3, 3, 2)),
    3: ((4, -2.0, -1.0), -1 / 8192, (3, 11, 16, 10, 5)),
    4: ((5, -2.5, -1.5), -1 / 2**19, (53, 225, 390, 370, 165, 66)),
}


def closed_form_poly(order: int, cfg: PendulumConfig) -> Polynomial:
    """Grade-``order`` energy correction as a polynomial in the quantum number n.

    Order 0 is the shifted oscillator ``(n + 1/2) hbar omega - v0``.
    """
    if order == 0:
        hw = cfg.hbar * cfg.omega
        return Polynomial([0.5 * hw - cfg.v0, hw])
    if order not in _CLOSED:
        raise ValueError(f"order must be between 0 and {MAX_GRADE}")
    (ph, pi, pv), const, coeffs = _CLOSED[order]
    prefactor = const * cfg.hbar**ph * cfg.inertia() ** pi * cfg.v0**pv
    return Polynomial([prefactor * c for c in coeffs])


def closed_form(order: int, n, cfg: PendulumConfig):
    return closed_form_poly(order, cfg)(n)


def closed_form_total(order: int, n, cfg: PendulumConfig):
    """Energy through grade ``order`` inclusive."""
    return sum(closed_form(g, n, cfg) for g in range(order + 1))


def handbook_a_low(n, q: float, highest: int = 5):
    """Large-q expansion of the characteristic value of the n-th state.

    Terms 0 through ``highest`` of
    ``-2q + 2p sqrt(q) - (p^2+1)/8 - (p^3+3p)/(2^7 sqrt q) - ... `` with p = 2n+1.
    """
    if q <= 0:
        raise ValueError("the large-q expansion needs q > 0")
    if not 0 <= highest <= 5:
        raise ValueError("highest must be between 0 and 5")
    p = 2 * np.asarray(n, dtype=float) + 1
    s = math.sqrt(q)
    terms = (
        -2.0 * q + 0 * p,
        2.0 * p * s,
        -(p**2 + 1) / 8.0,
        -(p**3 + 3 * p) / (2**7 * s),
        -(5 * p**4 + 34 * p**2 + 9) / (2**12 * q),
        -(33 * p**5 + 410 * p**3 + 405 * p) / (2**17 * q * s),
    )
    total = sum(terms[: highest + 1])
    return float(total) if np.ndim(total) == 0 else total
