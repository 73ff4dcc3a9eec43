"""Classical period of the rigid pendulum.

Both regimes reduce to the complete elliptic integral of the first kind:

* libration, ``-v0 < E < v0``: ``tau = 4 sqrt(I/v0) K(k)`` with ``k^2 = (E + v0)/(2 v0)``
* rotation, ``E > v0``: ``tau = 2 sqrt(2I/(E + v0)) K(k)`` with ``k^2 = 2 v0/(E + v0)``

``K`` always takes the *modulus* k, never the parameter m = k^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import PendulumConfig

__all__ = [
    "ClassicalRegime",
    "PeriodPoint",
    "turning_angle",
    "agm",
    "elliptic_k",
    "period",
    "period_curve",
    "small_oscillation_period",
]


class ClassicalRegime(str, enum.Enum):
    REST = "rest"
    LIBRATION = "libration"
    SEPARATRIX = "separatrix"
    ROTATION = "rotation"

    @classmethod
    def classify(cls, energy: float, v0: float) -> "ClassicalRegime":
        if energy == -v0:
            return cls.REST
        if energy < v0:
            return cls.LIBRATION
        if energy == v0:
            return cls.SEPARATRIX
        return cls.ROTATION


@dataclass(frozen=True)
class PeriodPoint:
    energy: float
    tau: float
    regime: ClassicalRegime

    @property
    def finite(self) -> bool:
        return math.isfinite(self.tau)


def turning_angle(energy: float, cfg: PendulumConfig) -> float:
    """Turning point ``arccos(-E/v0)`` of a librating pendulum."""
    if not -cfg.v0 <= energy <= cfg.v0:
        raise ValueError(f"turning points exist only for -v0 <= E <= v0, got E={energy}")
    return math.acos(-energy / cfg.v0)


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    if a < 0 or b < 0:
        raise ValueError("agm needs non-negative arguments")
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def _k_from_complement(kc: float) -> float:
    # K(k) = pi / (2 agm(1, k')) with k' = sqrt(1 - k^2)
    if kc <= 0:
        raise ValueError("K diverges at k = 1")
    return math.pi / (2.0 * agm(1.0, kc))


def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention.

    >>> round(elliptic_k(2 ** -0.5), 7)
    1.8540747
    """
    if not 0 <= k < 1:
        raise ValueError(f"modulus must satisfy 0 <= k < 1, got {k}")
    return _k_from_complement(math.sqrt((1.0 - k) * (1.0 + k)))


def small_oscillation_period(cfg: PendulumConfig) -> float:
    return 2.0 * math.pi * math.sqrt(cfg.inertia() / cfg.v0)


def period(energy: float, cfg: PendulumConfig) -> PeriodPoint:
    """Classical period at energy ``E``; the separatrix is flagged with ``tau = inf``."""
    v0, inertia = cfg.v0, cfg.inertia()
    if energy < -v0:
        raise ValueError(f"E={energy} lies below the bottom of the well (-v0={-v0})")
    regime = ClassicalRegime.classify(energy, v0)
    if regime is ClassicalRegime.REST:
        tau = small_oscillation_period(cfg)
    elif regime is ClassicalRegime.SEPARATRIX:
        tau = math.inf
    elif regime is ClassicalRegime.LIBRATION:
        # complementary modulus computed directly, avoids 1 - k^2 cancellation near v0
        kc = math.sqrt((v0 - energy) / (2.0 * v0))
        tau = 4.0 * math.sqrt(inertia / v0) * _k_from_complement(kc)
    else:
        kc = math.sqrt((energy - v0) / (energy + v0))
        tau = 2.0 * math.sqrt(2.0 * inertia / (energy + v0)) * _k_from_complement(kc)
    return PeriodPoint(energy, tau, regime)


def period_curve(cfg: PendulumConfig, energies) -> list[PeriodPoint]:
    return [period(float(e), cfg) for e in energies]
