"""Scattering kernel X^{p,q}_{k'} for a Gaussian incoming packet.

Two evaluators:

``kernel_closed``
    The regularised closed form
    2 i alpha' pi^3 B(eps, 1-eps) exp(-a k'^2 + c') I0(b' k').

``kernel_quadrature``
    Direct evaluation of the radial integral
    P * int_0^inf exp(-a x^2 + c') I0(b' x) x (k'^2 - x^2)^(eps-1) dx,
    P = 2 alpha' pi^2 B(eps, 1-eps),
    whose integrand has an integrable branch point at x = k'.

Branch handling in ``kernel_quadrature``. Write h(x) = exp(-a x^2) I0(b' x),
L = int_0^k' h x (k'^2 - x^2)^(eps-1) dx and R = int_k'^inf h x (x^2 - k'^2)^(eps-1) dx
(both real and each ~ h(k') / (2 eps)). On the two sides of the cut x > k'
the power takes the phases exp(+-i pi (1 - eps)), so the integral is
PV +- disc / 2 with

    PV   = L - cos(pi eps) R                (finite as eps -> 0)
    disc = 2 i sin(pi eps) R  -> i pi h(k')

``disc`` is the integral around the whole cut (a contour enclosing the
pole once eps -> 0). The closed form keeps exactly this term with its full
weight and drops PV; the quadrature therefore returns the two pieces
separately as ``pv_part`` and ``pole_part``.

The Yukawa variant replaces k'^2 by k'^2 + m^2 everywhere.
"""

import math
from typing import NamedTuple

import numpy as np

from .errors import AccuracyError, DomainError
from .model import b_prime, c_prime
from .quadrature import QuadratureSpec, gauss_legendre_panels, relative_change
from .specfun import bessel_i0e


class KernelQuadrature(NamedTuple):
    pv_part: complex
    pole_part: complex


def _h(x, a, bp):
    """exp(-a x^2) I0(bp x) without overflow."""
    x = np.asarray(x, dtype=float)
    z = bp * x
    return np.exp(-a * x * x + z) * bessel_i0e(z)


def kernel_closed(k_prime, p, q, packet, params):
    """Closed-form kernel value; accepts k' = 0."""
    if k_prime < 0:
        raise DomainError(f"k_prime must be >= 0, got {k_prime}")
    kappa2 = float(params.shifted_k2(k_prime))
    kappa = math.sqrt(kappa2)
    bp = b_prime(packet, p, q)
    cp = c_prime(packet, p, q)
    z = bp * kappa
    pref = 2j * params.coupling * math.pi**3 * params.beta_reg
    return complex(pref * np.exp(-packet.a * kappa2 + cp + z) * bessel_i0e(z))


def default_pole_window(kappa, a):
    return min(0.5 * kappa, 1.0 / math.sqrt(a))


def _branch_integrals(kappa, a, bp, eps, spec):
    """Return (L, R) as defined in the module docstring."""
    K = kappa * kappa
    delta = spec.pole_window if spec.pole_window is not None else default_pole_window(kappa, a)
    if not 0 < delta < kappa:
        raise DomainError(f"pole window {delta} must lie inside (0, k'={kappa})")
    upper = spec.upper_cut
    if upper is None:
        upper = max(bp / (2.0 * a), kappa + delta) + math.sqrt(32.0 / a)
    if upper <= kappa + delta:
        raise DomainError(f"upper_cut {upper} must exceed k' + pole window = {kappa + delta}")

    n, m = spec.panels, spec.nodes
    h_pole = float(_h(kappa, a, bp))
    H = lambda u: _h(np.sqrt(np.maximum(u, 0.0)), a, bp)

    # outside the window: smooth integrands in x
    x, w = gauss_legendre_panels(0.0, kappa - delta, n, m)
    left_out = np.sum(w * _h(x, a, bp) * x * (K - x * x) ** (eps - 1.0))
    x, w = gauss_legendre_panels(kappa + delta, upper, n, m)
    right_out = np.sum(w * _h(x, a, bp) * x * (x * x - K) ** (eps - 1.0))

    # inside the window: subtract h(k') analytically, then t = u^eps makes
    # the remainder smooth (u^(eps-1) du = dt / eps)
    U1 = K - (kappa - delta) ** 2
    U2 = (kappa + delta) ** 2 - K
    t, w = gauss_legendre_panels(0.0, U1**eps, n, m)
    left_win = 0.5 / eps * (h_pole * U1**eps + np.sum(w * (H(K - t ** (1.0 / eps)) - h_pole)))
    t, w = gauss_legendre_panels(0.0, U2**eps, n, m)
    right_win = 0.5 / eps * (h_pole * U2**eps + np.sum(w * (H(K + t ** (1.0 / eps)) - h_pole)))

    return left_out + left_win, right_out + right_win


def kernel_quadrature(k_prime, p, q, packet, params, spec=None):
    """Quadrature of the unregularised radial kernel integral.

    Returns ``KernelQuadrature(pv_part, pole_part)``, both multiplied by the
    common prefactor 2 alpha' pi^2 B(eps, 1-eps) e^{c'}. The integral on the
    +i pi branch equals pv_part + pole_part / 2. ``pole_part`` tends to
    :func:`kernel_closed` as eps -> 0.

    Raises AccuracyError when doubling the panel count changes the result by
    more than ``spec.tol`` (relative).
    """
    spec = spec or QuadratureSpec()
    if not k_prime > 0:
        raise DomainError("kernel_quadrature requires k' > 0 (the pole would sit on the endpoint)")
    eps = params.epsilon
    kappa = math.sqrt(float(params.shifted_k2(k_prime)))
    a = packet.a
    bp = b_prime(packet, p, q)
    pref = 2.0 * params.coupling * math.pi**2 * params.beta_reg * np.exp(c_prime(packet, p, q))
    if params.coupling == 0:
        return KernelQuadrature(0j, 0j)

    def estimate(s):
        L, R = _branch_integrals(kappa, a, bp, eps, s)
        return L - math.cos(math.pi * eps) * R, 2.0 * math.sin(math.pi * eps) * R

    coarse = estimate(spec)
    fine = estimate(spec.refined())
    scale = max(abs(fine[0]), abs(fine[1]))
    for old, new in zip(coarse, fine):
        if abs(new - old) > spec.tol * scale:
            raise AccuracyError(
                f"kernel quadrature not converged under panel doubling "
                f"(relative change {relative_change(old, new):.3e} > {spec.tol})",
                estimates=(coarse, fine),
            )
    pv, disc = fine
    return KernelQuadrature(complex(pref * pv), complex(pref * 1j * disc))
