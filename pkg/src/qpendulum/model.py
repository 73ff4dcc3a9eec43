"""Physical configuration of the pendulum and conversions to the Mathieu frame.

Everything numerical in this package runs in the dimensionless Mathieu
variables ``(a, q)``.  Physical units only enter through
:class:`PendulumConfig`, which is the one place where ``hbar``, the mass,
the length and the potential depth are combined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "Parity",
    "PendulumConfig",
    "MathieuCoords",
    "StateLabel",
    "NOMINAL",
    "q_of_config",
    "energy_from_a",
    "a_from_energy",
    "estimate_q",
    "load_config",
    "HBAR_SI",
    "ELECTRON_MASS",
    "STANDARD_GRAVITY",
]

# CODATA 2018
HBAR_SI = 1.054571817e-34
ELECTRON_MASS = 9.1093837015e-31
ELEMENTARY_CHARGE = 1.602176634e-19
STANDARD_GRAVITY = 9.80665


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PendulumConfig:
    """Rigid pendulum ``H = p^2/(2I) - v0 cos(theta)`` with ``I = mass * length**2``.

    Units are the caller's business; any consistent set works.  The defaults
    are ``hbar = 2*mass = length = 1`` and ``v0 = 80``, which gives ``q = 160``.
    """

    hbar: float = 1.0
    mass: float = 0.5
    length: float = 1.0
    v0: float = 80.0

    def __post_init__(self):
        for name in ("hbar", "mass", "length", "v0"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    def inertia(self) -> float:
        return self.mass * self.length**2

    @property
    def q(self) -> float:
        return q_of_config(self)

    @property
    def omega(self) -> float:
        """Small-oscillation angular frequency sqrt(v0/I)."""
        return math.sqrt(self.v0 / self.inertia())

    @property
    def energy_scale(self) -> float:
        """Energy per unit of the Mathieu parameter ``a``, i.e. hbar^2/(8I)."""
        return self.hbar**2 / (8.0 * self.inertia())

    @classmethod
    def from_q(cls, q: float, hbar: float = 1.0, mass: float = 0.5, length: float = 1.0):
        """Config with the given ``q``; ``v0`` is solved for, other fields kept."""
        inertia = mass * length**2
        return cls(hbar=hbar, mass=mass, length=length, v0=q * hbar**2 / (4.0 * inertia))

    def as_dict(self) -> dict:
        return {"hbar": self.hbar, "mass": self.mass, "length": self.length, "v0": self.v0}


NOMINAL = PendulumConfig()


@dataclass(frozen=True)
class MathieuCoords:
    q: float
    a: float

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be non-negative")

    def energy(self, cfg: PendulumConfig) -> float:
        return energy_from_a(self.a, cfg)

    @classmethod
    def from_energy(cls, energy: float, cfg: PendulumConfig) -> "MathieuCoords":
        return cls(q=q_of_config(cfg), a=a_from_energy(energy, cfg))


@dataclass(frozen=True)
class StateLabel:
    """Label of a period-pi Mathieu solution.

    ``r`` is the (even) Mathieu order; the rotor quantum number is ``r // 2``.
    ``global_index`` is the position in the merged, energy-ordered spectrum,
    which plays the role of the oscillator quantum number deep in the well.
    """

    parity: Parity
    r: int
    global_index: int

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        if self.r < 0 or self.r % 2:
            raise ValueError(f"r must be a non-negative even integer, got {self.r}")
        if self.parity is Parity.ODD and self.r < 2:
            raise ValueError("odd solutions start at r = 2")
        if self.global_index < 0:
            raise ValueError("global_index must be non-negative")

    @property
    def m(self) -> int:
        return self.r // 2


def q_of_config(cfg: PendulumConfig) -> float:
    return 4.0 * cfg.inertia() * cfg.v0 / cfg.hbar**2


def energy_from_a(a: float, cfg: PendulumConfig) -> float:
    return a * cfg.energy_scale


def a_from_energy(energy: float, cfg: PendulumConfig) -> float:
    return 8.0 * cfg.inertia() * energy / cfg.hbar**2


_KINDS = ("gravity", "electric-charge", "electric-dipole")


def estimate_q(mass: float, length: float, force_scale: float, kind: str = "gravity",
               hbar: float = HBAR_SI) -> float:
    """Order-of-magnitude ``q`` for a physical realisation (SI units by default).

    ``force_scale`` is interpreted per ``kind``:

    * ``gravity``: gravitational acceleration g, so ``v0 = mass * g * length``
    * ``electric-charge``: the force Q*E on the charge, so ``v0 = Q*E*length``
    * ``electric-dipole``: the product p*E, so ``v0 = p*E``
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    if mass <= 0 or length <= 0 or hbar <= 0:
        raise ValueError("mass, length and hbar must be positive")
    if force_scale < 0:
        raise ValueError("force_scale must be non-negative")
    if kind == "gravity":
        v0 = mass * force_scale * length
    elif kind == "electric-charge":
        v0 = force_scale * length
    else:
        v0 = force_scale
    return 4.0 * mass * length**2 * v0 / hbar**2


def load_config(path) -> PendulumConfig:
    """Read a flat ``key = value`` file with keys hbar, mass, length, v0.

    Blank lines and ``#`` comments are ignored; missing keys take the
    nominal defaults.
    """
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ("hbar", "mass", "length", "v0"):
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = float(value)
    return PendulumConfig(**values)
