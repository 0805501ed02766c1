"""Wave-packet parameterisations and the derived kernel coefficients.

Natural units throughout: particle mass m = 1 and hbar = 1. The incoming
packet in momentum space is a_k = exp(-a k^2 + b.k + c); the scattered packet
is c_p = f(p) exp(-alpha p^2) with f even, f(p) = sum_n b_{2n} p^{2n}.
All amplitudes are carried as complex numbers; nothing takes real parts
implicitly.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from .errors import DomainError
from .specfun import beta

SQRT2 = math.sqrt(2.0)


class Variant(str, enum.Enum):
    COULOMB = "coulomb"
    YUKAWA = "yukawa"


def _vec2(v, name):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise DomainError(f"{name} must be a 2-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class GaussianPacket:
    a: float
    b: Tuple[float, float] = (0.0, 0.0)
    c: complex = 0j

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"packet width a must be positive, got {self.a}")
        object.__setattr__(self, "b", tuple(float(x) for x in _vec2(self.b, "b")))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def b_vec(self):
        return np.array(self.b)

    def is_normalized(self, tol=1e-12):
        return abs(math.exp(self.c.real) - math.sqrt(2.0 * self.a / math.pi)) <= tol

    def to_dict(self):
        return {"a": self.a, "b_x": self.b[0], "b_y": self.b[1],
                "c_re": self.c.real, "c_im": self.c.imag}

    @classmethod
    def from_dict(cls, d):
        c = complex(d.get("c_re", 0.0), d.get("c_im", 0.0))
        if "c" in d:
            c = complex(d["c"])
        b = d.get("b", (d.get("b_x", 0.0), d.get("b_y", 0.0)))
        return cls(a=float(d["a"]), b=tuple(b), c=c)


@dataclass(frozen=True)
class ScatteredState:
    alpha: complex
    coeffs: Tuple[complex, ...] = field(default=(1.0 + 0j,))

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not alpha.real > 0:
            raise DomainError(f"scattered width alpha needs Re(alpha) > 0, got {alpha}")
        coeffs = tuple(complex(x) for x in np.atleast_1d(self.coeffs))
        if not coeffs:
            raise DomainError("coeffs must be non-empty")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self):
        """Highest power index N of the truncated series f = sum_{n<=N} b_{2n} p^{2n}."""
        return len(self.coeffs) - 1

    def f(self, p):
        p2 = np.asarray(p, dtype=float) ** 2
        return sum(b * p2**n for n, b in enumerate(self.coeffs))

    def __call__(self, p):
        """c_p on radial momenta ``p``."""
        p = np.asarray(p, dtype=float)
        return self.f(p) * np.exp(-self.alpha * p * p)

    def to_dict(self):
        return {"alpha_re": self.alpha.real, "alpha_im": self.alpha.imag,
                "coeffs_re": [c.real for c in self.coeffs],
                "coeffs_im": [c.imag for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d):
        alpha = complex(d.get("alpha_re", d.get("alpha", 0.0)), d.get("alpha_im", 0.0))
        re = d.get("coeffs_re", d.get("coeffs", [1.0]))
        im = d.get("coeffs_im", [0.0] * len(re))
        if len(im) != len(re):
            raise DomainError("coeffs_re and coeffs_im differ in length")
        return cls(alpha=alpha, coeffs=tuple(complex(r, i) for r, i in zip(re, im)))


@dataclass(frozen=True)
class KernelParams:
    coupling: float = 1.0
    epsilon: float = 0.1
    variant: Variant = Variant.COULOMB
    yukawa_mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not math.isfinite(self.coupling):
            raise DomainError("coupling must be finite")
        if not (0.0 < self.epsilon < 1.0):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.variant is Variant.YUKAWA and not self.yukawa_mass > 0:
            raise DomainError("yukawa variant requires yukawa_mass > 0")
        if self.variant is Variant.COULOMB and self.yukawa_mass != 0:
            raise DomainError("yukawa_mass is only meaningful for the yukawa variant")

    @property
    def beta_reg(self):
        """B(eps, 1 - eps), the regulated Coulomb divergence."""
        return beta(self.epsilon, 1.0 - self.epsilon)

    def shifted_k2(self, k_prime):
        """k'^2, or k'^2 + m^2 for the screened potential."""
        k2 = np.asarray(k_prime, dtype=float) ** 2
        if self.variant is Variant.YUKAWA:
            k2 = k2 + self.yukawa_mass**2
        return k2

    def to_dict(self):
        return {"coupling": self.coupling, "epsilon": self.epsilon,
                "variant": self.variant.value, "yukawa_mass": self.yukawa_mass}

    @classmethod
    def from_dict(cls, d):
        return cls(coupling=float(d.get("coupling", 1.0)), epsilon=float(d.get("epsilon", 0.1)),
                   variant=d.get("variant", "coulomb"), yukawa_mass=float(d.get("yukawa_mass", 0.0)))


def normalize(packet):
    """Return ``packet`` with Re c chosen so that exp(Re c) = sqrt(2a/pi)."""
    re_c = 0.5 * math.log(2.0 * packet.a / math.pi)
    return replace(packet, c=complex(re_c, packet.c.imag))


def b_prime(packet, p, q):
    """||b - 2a (p - q)||."""
    p = _vec2(p, "p")
    q = _vec2(q, "q")
    return float(np.linalg.norm(packet.b_vec - 2.0 * packet.a * (p - q)))


def c_prime(packet, p, q):
    """c - a |p + q|^2 - b.(p + q)."""
    s = _vec2(p, "p") + _vec2(q, "q")
    return packet.c - packet.a * float(s @ s) - float(packet.b_vec @ s)


def big_a(packet, k_prime, params):
    """2^{3/4} sqrt(a) k', with k' -> sqrt(k'^2 + m^2) for the Yukawa variant."""
    return 2.0**0.75 * math.sqrt(packet.a) * np.sqrt(params.shifted_k2(k_prime))


def xi(packet, params):
    """xi = 2 i alpha' pi^3 B(eps, 1 - eps) e^c."""
    return complex(2j * params.coupling * math.pi**3 * params.beta_reg * np.exp(packet.c))
