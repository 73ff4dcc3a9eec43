"""Characteristic values a_{2m}(q), b_{2m}(q) of Mathieu's equation.

The period-pi solutions ce_{2m} and se_{2m} are expanded in the cosine basis
``{1/sqrt(2), cos 2z, cos 4z, ...}`` and the sine basis ``{sin 2z, sin 4z, ...}``.
In both bases the operator ``-d^2/dz^2 - 2q cos 2z`` is a symmetric tridiagonal
matrix, so its lowest eigenvalues can be bracketed by Sturm-sequence bisection.

Only the sign of ``q`` differs between the pendulum and the textbook form of
the equation; even-order characteristic values are even functions of ``q``
(shift ``z -> z + pi/2``), so negative ``q`` is simply folded onto ``|q|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .model import Parity, PendulumConfig, StateLabel

__all__ = [
    "ConvergenceError",
    "TridiagSystem",
    "CharValue",
    "SpectrumRow",
    "SpectrumTable",
    "build_even_matrix",
    "build_odd_matrix",
    "sturm_count",
    "eigen_tridiag",
    "char_values",
    "spectrum",
    "mathieu_spectrum",
    "ab_splitting",
    "global_index",
]

_MIN_DIM = 4


class ConvergenceError(RuntimeError):
    """Raised when truncation doubling does not settle; ``last`` keeps the final sweep."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class TridiagSystem:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or len(off) != max(len(diag) - 1, 0):
            raise ValueError("offdiag must have length len(diag) - 1")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise ValueError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def dim(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class CharValue:
    label: StateLabel
    a: float
    truncation: int
    converged: bool


def build_even_matrix(q: float, n: int) -> TridiagSystem:
    """Cosine-basis matrix whose eigenvalues approximate a_0, a_2, a_4, ...

    The ``1/sqrt(2)`` normalisation of the constant mode puts ``sqrt(2) q``
    on the first off-diagonal and keeps the matrix symmetric.
    """
    if n < _MIN_DIM:
        raise ValueError(f"truncation must be at least {_MIN_DIM}, got {n}")
    diag = (2.0 * np.arange(n)) ** 2
    off = np.full(n - 1, float(q))
    off[0] = math.sqrt(2.0) * q
    return TridiagSystem(diag, off)


def build_odd_matrix(q: float, n: int) -> TridiagSystem:
    """Sine-basis matrix whose eigenvalues approximate b_2, b_4, ..."""
    if n < _MIN_DIM:
        raise ValueError(f"truncation must be at least {_MIN_DIM}, got {n}")
    diag = (2.0 * np.arange(1, n + 1)) ** 2
    return TridiagSystem(diag, np.full(n - 1, float(q)))


def _pivmin(diag, off2):
    scale = max(1.0, float(np.max(np.abs(diag))), float(np.max(off2)) if len(off2) else 0.0)
    return np.finfo(float).tiny / np.finfo(float).eps * scale


def sturm_count(sys: TridiagSystem, x) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _count(sys.diag, sys.offdiag**2, x, _pivmin(sys.diag, sys.offdiag**2))


def _count(diag, off2, x, pivmin):
    piv = diag[0] - x
    piv = np.where(np.abs(piv) < pivmin, -pivmin, piv)
    count = (piv < 0).astype(np.int64)
    for i in range(1, len(diag)):
        piv = diag[i] - x - off2[i - 1] / piv
        piv = np.where(np.abs(piv) < pivmin, -pivmin, piv)
        count += piv < 0
    return count


def eigen_tridiag(sys: TridiagSystem, k: int, rtol: float = 1e-12) -> np.ndarray:
    """The ``k`` smallest eigenvalues, ascending, by Sturm-sequence bisection.

    Each eigenvalue is bracketed to a width of ``rtol * max(1, |lambda|)``.
    The matrix is first split at exactly vanishing off-diagonal entries, so
    1x1 blocks (e.g. the q = 0 Mathieu matrices) return their diagonal exactly.
    """
    n = sys.dim
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    cuts = np.flatnonzero(sys.offdiag == 0.0) + 1
    if len(cuts):
        parts = []
        for start, stop in zip(np.r_[0, cuts], np.r_[cuts, n]):
            if stop - start == 1:
                parts.append(sys.diag[start:stop].copy())
            else:
                block = TridiagSystem(sys.diag[start:stop], sys.offdiag[start:stop - 1])
                parts.append(_bisect(block, min(k, block.dim), rtol))
        return np.sort(np.concatenate(parts))[:k]
    return _bisect(sys, k, rtol)


def _bisect(sys: TridiagSystem, k: int, rtol: float) -> np.ndarray:
    n = sys.dim
    diag, off = sys.diag, sys.offdiag
    off2 = off**2
    pivmin = _pivmin(diag, off2)

    radius = np.zeros(n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo_bound = float(np.min(diag - radius))
    hi_bound = float(np.max(diag + radius))
    pad = 2.0 * np.finfo(float).eps * max(abs(lo_bound), abs(hi_bound), 1.0) + pivmin
    lo = np.full(k, lo_bound - pad)
    hi = np.full(k, hi_bound + pad)
    target = np.arange(1, k + 1)

    for _ in range(512):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        active = width > rtol * np.maximum(1.0, np.abs(mid))
        # stop once the remaining brackets cannot be split in floating point
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        below = _count(diag, off2, mid[active], pivmin) >= target[active]
        idx = np.flatnonzero(active)
        hi[idx[below]] = mid[active][below]
        lo[idx[~below]] = mid[active][~below]
    return 0.5 * (lo + hi)


def global_index(parity, r: int, q: float) -> int:
    """Position of the state (parity, r) in the merged energy ordering.

    For q > 0 the characteristic values interlace, a_0 < b_2 < a_2 < b_4 < ...
    At q = 0 the pairs a_r = b_r are degenerate and even sorts before odd.
    """
    parity = Parity(parity)
    if q > 0:
        return r if parity is Parity.EVEN else r - 1
    if r == 0:
        return 0
    return r - 1 if parity is Parity.EVEN else r


def _first_order(parity) -> int:
    return 0 if Parity(parity) is Parity.EVEN else 2


def char_values(q: float, parity, count: int, tol: float = 1e-10,
                n0: int | None = None, max_doublings: int = 6) -> list[CharValue]:
    """First ``count`` characteristic values of the given parity.

    The truncation starts at ``max(2*count, ceil(2 sqrt(q)) + 10)`` and is
    doubled until two successive truncations agree to ``tol`` (absolute) on
    every requested value.  Bisection is run finer than ``tol`` so that the
    absolute tolerance stays meaningful for large ``a``.
    """
    parity = Parity(parity)
    if count < 1:
        raise ValueError("count must be at least 1")
    q = abs(float(q))
    if q == 0.0:
        # free rotor: the matrix is diagonal and a_r = b_r = r^2 exactly
        r0 = _first_order(parity)
        return _label(q, parity, [float(r0 + 2 * i) ** 2 for i in range(count)], _MIN_DIM, True)
    build = build_even_matrix if parity is Parity.EVEN else build_odd_matrix
    n = n0 or max(2 * count, math.ceil(2.0 * math.sqrt(q)) + 10, _MIN_DIM)
    # Gershgorin bound on the largest requested value
    a_max = (2.0 * count + 2.0) ** 2 + 2.0 * q
    rtol = min(1e-12, 0.1 * tol / a_max)
    previous = eigen_tridiag(build(q, n), count, rtol)
    for _ in range(max_doublings):
        n *= 2
        current = eigen_tridiag(build(q, n), count, rtol)
        if np.max(np.abs(current - previous)) < tol:
            return _label(q, parity, current, n, True)
        previous = current
    raise ConvergenceError(
        f"{parity} characteristic values at q={q} not converged at truncation {n}",
        last=_label(q, parity, previous, n, False),
    )


def _label(q, parity, values, n, converged):
    r0 = _first_order(parity)
    out = []
    for i, a in enumerate(values):
        r = r0 + 2 * i
        out.append(CharValue(StateLabel(parity, r, global_index(parity, r, q)), float(a), n, converged))
    return out


@dataclass(frozen=True)
class SpectrumRow:
    label: StateLabel
    a: float
    energy: float

    @property
    def parity(self) -> Parity:
        return self.label.parity

    @property
    def r(self) -> int:
        return self.label.r

    @property
    def global_index(self) -> int:
        return self.label.global_index


@dataclass(frozen=True)
class SpectrumTable:
    """Merged even and odd spectrum at one q, ordered by ``global_index``."""

    q: float
    hbar: float
    energy_scale: float
    rows: tuple[SpectrumRow, ...] = field(default_factory=tuple)
    config: PendulumConfig | None = None

    @property
    def v0(self) -> float:
        """Energy of the separatrix, a = 2q."""
        return 2.0 * self.q * self.energy_scale

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def select(self, parity) -> list[SpectrumRow]:
        parity = Parity(parity)
        return [row for row in self.rows if row.parity is parity]

    def energies(self, parity=None) -> np.ndarray:
        rows = self.rows if parity is None else self.select(parity)
        return np.array([row.energy for row in rows])


def mathieu_spectrum(q: float, count: int, energy_scale: float = 0.25, hbar: float = 1.0,
                     tol: float = 1e-10, config: PendulumConfig | None = None) -> SpectrumTable:
    """The lowest ``count`` states of both parities; energies are ``a * energy_scale``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    q = abs(float(q))
    values = (char_values(q, Parity.EVEN, count // 2 + 1, tol)
              + char_values(q, Parity.ODD, count // 2 + 1, tol))
    values.sort(key=lambda cv: cv.label.global_index)
    rows = tuple(SpectrumRow(cv.label, cv.a, cv.a * energy_scale) for cv in values[:count])
    for i, row in enumerate(rows):
        # the closed-form indexing relies on interlacing; guard it
        assert row.global_index == i, "merged ordering broke interlacing"
    return SpectrumTable(q=q, hbar=hbar, energy_scale=energy_scale, rows=rows, config=config)


def spectrum(cfg: PendulumConfig, count: int, tol: float = 1e-10) -> SpectrumTable:
    """Energy levels ``E = a hbar^2/(8I)`` of the pendulum, both parities merged."""
    return mathieu_spectrum(cfg.q, count, cfg.energy_scale, cfg.hbar, tol, config=cfg)


def _count_scalar(diag, off2, x):
    tiny = mpmath.mpf(10) ** (-(mpmath.mp.dps + 20))
    count = 0
    piv = diag[0] - x
    for i in range(len(diag)):
        if i:
            piv = diag[i] - x - off2[i - 1] / piv
        if abs(piv) < tiny:
            piv = -tiny
        if piv < 0:
            count += 1
    return count


def _refine(diag, off2, index, guess):
    step = mpmath.mpf(1e-7) * max(1, abs(guess))
    lo, hi = guess - step, guess + step
    while _count_scalar(diag, off2, lo) > index:
        lo -= step
        step *= 2
    while _count_scalar(diag, off2, hi) <= index:
        hi += step
        step *= 2
    eps = mpmath.mpf(10) ** (-(mpmath.mp.dps - 5))
    while hi - lo > eps * max(1, abs(lo)):
        mid = (lo + hi) / 2
        if _count_scalar(diag, off2, mid) > index:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _splitting_digits(r: int, q: float) -> int:
    # small-q estimate a_r - b_r ~ q^r / (2^(2r-3) ((r-1)!)^2), in decimal digits
    if q == 0:
        return 0
    est = r * math.log10(q) - (2 * r - 3) * math.log10(2.0) - 2.0 * math.lgamma(r) / math.log(10.0)
    return max(0, int(math.ceil(-est)))


def ab_splitting(r: int, q: float, dps: int | None = None):
    """``a_r - b_r`` in extended precision (an ``mpmath.mpf``).

    The splitting shrinks roughly like q^r / r^(r-1), far below double
    precision for moderate r, hence the separate arbitrary-precision path.
    By default the working precision is chosen from a small-q estimate of
    the splitting so that about 25 significant digits of it survive.
    """
    if r < 2 or r % 2:
        raise ValueError("r must be an even integer >= 2")
    q = abs(float(q))
    if dps is None:
        dps = 40 + _splitting_digits(r, q) + int(math.log10(r * r + 2.0 * q + 1.0))
    n = r // 2 + 2 * math.ceil(math.sqrt(q)) + 40
    a_guess = char_values(q, Parity.EVEN, r // 2 + 1)[-1].a
    b_guess = char_values(q, Parity.ODD, r // 2)[-1].a
    with mpmath.workdps(dps):
        qm = mpmath.mpf(q)
        even_diag = [mpmath.mpf(4 * k * k) for k in range(n)]
        even_off2 = [2 * qm**2] + [qm**2] * (n - 2)
        odd_diag = [mpmath.mpf(4 * k * k) for k in range(1, n + 1)]
        odd_off2 = [qm**2] * (n - 1)
        a = _refine(even_diag, even_off2, r // 2, mpmath.mpf(a_guess))
        b = _refine(odd_diag, odd_off2, r // 2 - 1, mpmath.mpf(b_guess))
        return +(a - b)
