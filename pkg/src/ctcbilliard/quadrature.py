"""Composite Gauss-Legendre rules and the shared quadrature settings."""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the truncated, panelled quadratures.

    ``upper_cut`` and ``pole_window`` may be left as None, in which case the
    caller picks values from the integrand (Gaussian tail below 1e-14, window
    a fixed fraction of the pole location). ``nodes`` is the number of
    Gauss-Legendre points per panel; a rule with n nodes has order 2n.
    """

    panels: int = 64
    upper_cut: Optional[float] = None
    pole_window: Optional[float] = None
    nodes: int = 8
    tol: float = 1e-8

    def __post_init__(self):
        if int(self.panels) != self.panels or self.panels < 8:
            raise DomainError(f"panels must be an integer >= 8, got {self.panels}")
        if self.upper_cut is not None and not self.upper_cut > 0:
            raise DomainError(f"upper_cut must be positive, got {self.upper_cut}")
        if self.pole_window is not None and not self.pole_window > 0:
            raise DomainError(f"pole_window must be positive, got {self.pole_window}")
        if int(self.nodes) != self.nodes or self.nodes < 1:
            raise DomainError(f"nodes must be a positive integer, got {self.nodes}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")

    def refined(self):
        """The same spec with twice as many panels."""
        return QuadratureSpec(2 * self.panels, self.upper_cut, self.pole_window, self.nodes, self.tol)


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre_panels(lo, hi, panels, nodes=8):
    """Nodes and weights of the composite Gauss-Legendre rule on [lo, hi]."""
    x, w = _leggauss(int(nodes))
    edges = np.linspace(lo, hi, int(panels) + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def integrate(func, lo, hi, panels, nodes=8):
    """Composite Gauss-Legendre estimate of the integral of a vectorised ``func``."""
    pts, wts = gauss_legendre_panels(lo, hi, panels, nodes)
    return np.sum(wts * func(pts))


def relative_change(old, new, floor=1e-300):
    return abs(new - old) / max(abs(new), abs(old), floor)
