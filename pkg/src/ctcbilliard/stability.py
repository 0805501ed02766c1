"""Linear stability of the Gaussian self-consistent solutions.

A perturbation of a solution zeta evolves under the linear map
delta -> X zeta delta + X delta zeta; its size after n applications of
(M - 1) behaves like |lambda - 1|^n, so perturbations grow once the
eigenvalue lambda(k) (the generalised Lyapunov exponent) exceeds 2.

Two estimates of lambda(k) are provided for zeta = b0 exp(-alpha k^2):
the closed approximation (terms linear in the integration momenta dropped)
and a direct two-dimensional quadrature of the diagonal element.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import AccuracyError, DomainError
from .quadrature import QuadratureSpec, gauss_legendre_panels, relative_change
from .roots import bisect
from .selfcons import alpha_roots
from .specfun import bessel_i0e

MARGIN = 1e-9


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class B0Convention(str, enum.Enum):
    SQRT_PI_OVER_ALPHA = "sqrt_pi_over_alpha"
    SQRT_2ALPHA_OVER_PI = "sqrt_2alpha_over_pi"


def b0_for(alpha, convention=B0Convention.SQRT_PI_OVER_ALPHA):
    convention = B0Convention(convention)
    if convention is B0Convention.SQRT_PI_OVER_ALPHA:
        return math.sqrt(math.pi / alpha)
    return math.sqrt(2.0 * alpha / math.pi)


def lyapunov_closed(k, a, alpha, b0):
    """2 b0 exp(-(2a + 1/(8(a+alpha)^2)) k^2) sqrt(pi/(a+alpha)) I0(k^2 / (8 (a+alpha)^2))."""
    s = a + alpha
    if not s > 0:
        raise DomainError(f"a + alpha must be positive, got {s}")
    k = np.asarray(k, dtype=float)
    z = k * k / (8.0 * s * s)
    out = 2.0 * b0 * np.exp(-2.0 * a * k * k) * math.sqrt(math.pi / s) * bessel_i0e(z)
    return out if np.ndim(out) else float(out)


def _diagonal_integral(k, a, alpha, spec):
    s = a + alpha
    cut = spec.upper_cut
    if cut is None:
        cut = k * (1.0 + 2.0 * a) / (2.0 * s) + math.sqrt(40.0 / s)
    r, wr = gauss_legendre_panels(0.0, cut, spec.panels, spec.nodes)
    m = 2 * spec.panels
    phi = np.linspace(0.0, math.pi, m + 1)
    wphi = np.full(m + 1, math.pi / m)
    wphi[[0, -1]] *= 0.5
    rr = r[:, None]
    cos = np.cos(phi)[None, :]
    plus2 = rr * rr + k * k + 2.0 * rr * k * cos
    minus = np.sqrt(np.maximum(rr * rr + k * k - 2.0 * rr * k * cos, 0.0))
    z = k * minus
    vals = np.exp(-a * plus2 - alpha * rr * rr + z) * bessel_i0e(z)
    return 2.0 * float((wr * r) @ vals @ wphi)


def lyapunov_quadrature(k, a, alpha, b0, spec=None):
    """Diagonal element of the linearised map by direct quadrature.

    Evaluates b0 e^{-a k^2} (int I0(k|p - l|) e^{-a (p+l)^2 - alpha p^2} d^2p
    + same with p -> q) on the diagonal l = k, with l taken along the same
    direction as k; the two terms are then equal.
    """
    spec = spec or QuadratureSpec(panels=32, nodes=8, tol=1e-10)
    if not a + alpha > 0 or k < 0:
        raise DomainError("need a + alpha > 0 and k >= 0")
    if b0 == 0:
        return 0.0
    coarse = _diagonal_integral(k, a, alpha, spec)
    fine = _diagonal_integral(k, a, alpha, spec.refined())
    if relative_change(coarse, fine) > spec.tol:
        raise AccuracyError("Lyapunov quadrature not converged", estimates=(coarse, fine))
    return 2.0 * b0 * math.exp(-a * k * k) * fine


def classify(lam, margin=MARGIN):
    """stable if lambda < 2, unstable if lambda > 2, marginal within ``margin``."""
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam}")
    if lam > 2.0 + margin:
        return Stability.UNSTABLE
    if lam < 2.0 - margin:
        return Stability.STABLE
    return Stability.MARGINAL


@dataclass
class StabilityReport:
    a: float
    alpha: float
    b0: float
    k_samples: np.ndarray
    lambda_closed: np.ndarray
    classification: List[Stability]
    b0_convention: B0Convention
    lambda_quadrature: Optional[np.ndarray] = None
    diagonal_convention: str = "l = k, colinear"
    notes: List[str] = field(default_factory=list)

    @property
    def lambda0(self):
        return float(lyapunov_closed(0.0, self.a, self.alpha, self.b0))

    @property
    def max_lambda(self):
        return float(np.max(self.lambda_closed))

    @property
    def overall(self):
        return classify(self.max_lambda)


def default_k_samples(a, alpha, count=41):
    return np.linspace(0.0, 4.0 / math.sqrt(a + alpha), count)


def stability_report(a, convention=B0Convention.SQRT_PI_OVER_ALPHA, k_samples=None,
                     with_quadrature=False, spec=None):
    """lambda(k) for the Gaussian solution with width alpha_+(a)."""
    convention = B0Convention(convention)
    alpha = alpha_roots(a)[0].real
    b0 = b0_for(alpha, convention)
    k = default_k_samples(a, alpha) if k_samples is None else np.asarray(k_samples, dtype=float)
    lam = np.atleast_1d(lyapunov_closed(k, a, alpha, b0))
    rep = StabilityReport(a, alpha, b0, k, lam, [classify(x) for x in lam], convention)
    if np.any(lam < 0):
        rep.notes.append("negative lambda present: |lambda - 1| > 1 there, not covered by the threshold")
    if with_quadrature:
        rep.lambda_quadrature = np.array([lyapunov_quadrature(x, a, alpha, b0, spec) for x in k])
    return rep


def lambda0(a, convention=B0Convention.SQRT_PI_OVER_ALPHA):
    """lambda(0) = 2 b0 sqrt(pi / (a + alpha_+))."""
    alpha = alpha_roots(a)[0].real
    return 2.0 * b0_for(alpha, convention) * math.sqrt(math.pi / (a + alpha))


@dataclass
class ScanResult:
    reports: List[StabilityReport]
    critical_a: Optional[float]
    critical_lambda0: Optional[float]


def scan_stability(a_min, a_max, count, convention=B0Convention.SQRT_PI_OVER_ALPHA, k_samples=None):
    """Stability over a grid of packet widths a, plus the crossing a* of max_k lambda = 2.

    The k-samples always include k = 0; for the sqrt(pi/alpha) convention
    lambda(k) <= lambda(0), so the crossing reduces to lambda(0) = 2.
    """
    if not 0 < a_min < a_max or count < 2:
        raise DomainError("need 0 < a_min < a_max and count >= 2")
    convention = B0Convention(convention)
    grid = np.linspace(a_min, a_max, int(count))

    def samples(a):
        if k_samples is not None:
            return np.union1d([0.0], np.asarray(k_samples, dtype=float))
        alpha = alpha_roots(a)[0].real
        return default_k_samples(a, alpha)

    reports = [stability_report(a, convention, samples(a)) for a in grid]
    max_lam = lambda a: stability_report(a, convention, samples(a)).max_lambda

    critical = None
    crit_lam = None
    for left, right in zip(reports, reports[1:]):
        if (left.max_lambda - 2.0) * (right.max_lambda - 2.0) <= 0:
            critical = bisect(max_lam, left.a, right.a, target=2.0, ftol=1e-12)
            crit_lam = max_lam(critical)
            break
    return ScanResult(reports, critical, crit_lam)


# ---------------------------------------------------------------------------
# iterated perturbation map


@dataclass
class GrowthRecord:
    norms: np.ndarray
    ratios: np.ndarray
    diff_norms: np.ndarray
    growth_rate: float
    diff_rate: float
    divergent: bool
    steps: int


def _fit_rate(log_norms):
    n = len(log_norms)
    if n < 2:
        return math.nan
    tail = np.arange(n // 2, n)
    slope = np.polyfit(tail, log_norms[tail], 1)[0]
    return float(math.exp(slope))


def iterate_perturbation(zeta, delta0, fmap, n_steps, overflow=1e300):
    """Apply the linearised map n_steps times to delta0.

    Records sup-norms of M^n delta0 and of (M - 1)^n delta0, their step
    ratios, and growth rates fitted to the second half of each sequence.
    Iterates are not rescaled; if they exceed ``overflow`` the record is
    truncated and flagged divergent.
    """
    M = fmap.linearization(zeta)
    eye = np.eye(M.shape[0])
    d = np.asarray(delta0, dtype=complex)
    e = d.copy()
    norms = [float(np.max(np.abs(d)))]
    diffs = [norms[0]]
    divergent = False
    for _ in range(int(n_steps)):
        with np.errstate(over="ignore", invalid="ignore"):
            d = M @ d
            e = (M - eye) @ e
        nd, ne = float(np.max(np.abs(d))), float(np.max(np.abs(e)))
        if not (math.isfinite(nd) and math.isfinite(ne)) or max(nd, ne) > overflow:
            divergent = True
            break
        norms.append(nd)
        diffs.append(ne)
    norms = np.array(norms)
    diffs = np.array(diffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = norms[1:] / norms[:-1]
        logs = np.log(norms)
        dlogs = np.log(diffs)
    zero = norms[-1] == 0
    return GrowthRecord(
        norms=norms,
        ratios=ratios,
        diff_norms=diffs,
        growth_rate=0.0 if zero else _fit_rate(logs),
        diff_rate=0.0 if diffs[-1] == 0 else _fit_rate(dlogs),
        divergent=divergent,
        steps=len(norms) - 1,
    )


def dominant_eigenvalue(matrix, start=None, tol=1e-13, max_iter=5000):
    """Power iteration with a Rayleigh-quotient estimate; no deflation."""
    M = np.asarray(matrix)
    v = np.ones(M.shape[0], dtype=complex) if start is None else np.asarray(start, dtype=complex)
    v = v / np.linalg.norm(v)
    lam = 0j
    for _ in range(max_iter):
        w = M @ v
        new = np.vdot(v, w)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0j
        v = w / nw
        if abs(new - lam) <= tol * abs(new):
            return complex(new)
        lam = new
    raise AccuracyError("power iteration did not converge", estimates=(lam, new))
