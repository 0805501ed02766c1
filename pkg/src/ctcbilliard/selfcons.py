"""Self-consistency requirement for the scattered packet.

The scattered state must reproduce itself under the quadratic map
c_{k'} = int c_p^* X^{p,q}_{k'} c_q d^2p d^2q. This module provides

* the closed-form right-hand side for c_p = f(p) e^{-alpha p^2} with f an
  even polynomial (quadruple sum over binomials, Kummer functions and
  moment coefficients) and its residual against the left-hand side;
* an independent tensor-product quadrature of the same right-hand side in
  the rotated variables p_+- = (p +- q)/sqrt(2);
* the pure-Gaussian solutions (amplitude b0, the two widths alpha_+-, the
  normalisation constraint and the resulting condition on a);
* a damped fixed-point iteration of the discretised quadratic map for
  rotationally symmetric states;
* an audit that evaluates every route separately and reports where they
  disagree.
"""

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import (AccuracyError, DegenerateCouplingError, DivergenceError, DomainError,
                     NoRootError, PreconditionError)
from .kernel import kernel_closed, kernel_quadrature
from .model import SQRT2, GaussianPacket, KernelParams, ScatteredState, Variant, big_a, normalize, xi
from .quadrature import QuadratureSpec, gauss_legendre_panels, relative_change
from .roots import bisect, expand_bracket
from .specfun import (bessel_i0e, binomial, c_nu, double_factorial, kummer_phi,
                      legendre_homogeneous, ln_gamma)

MAX_ORDER = 12

REFERENCE_PLUS_ROOT = 0.5337543
REFERENCE_MINUS_ROOT = 1.4799995


@dataclass
class ResidualReport:
    sample_points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    max_abs_residual: float
    max_rel_residual: float

    @property
    def residual(self):
        return self.lhs - self.rhs


def _require_b_zero(packet):
    if any(packet.b):
        raise PreconditionError("rotationally symmetric case only: packet drift b must be zero")


# ---------------------------------------------------------------------------
# closed-form right-hand side


def lhs_value(state, k):
    k = np.asarray(k, dtype=float)
    return state(k)


def rhs_closed(state, packet, params, k_samples):
    """Closed-form right-hand side of the self-consistency requirement."""
    k = np.atleast_1d(np.asarray(k_samples, dtype=float))
    if state.order > MAX_ORDER:
        raise PreconditionError(f"truncation order {state.order} exceeds {MAX_ORDER}")
    a = packet.a
    alpha = state.alpha
    b = state.coeffs
    kappa2 = params.shifted_k2(k)
    z = 2.0**1.5 * a * kappa2 / (4.0 * alpha)  # A^2 / (4 alpha)
    if alpha.imag == 0:
        alpha = alpha.real
        z = np.real(z)

    total = np.zeros(k.shape, dtype=complex)
    N = len(b)
    for n in range(N):
        for m in range(N):
            bb = b[n] * b[m]
            if bb == 0:
                continue
            inner = np.zeros(k.shape, dtype=complex)
            for kk in range(n + 1):
                for ll in range(m + 1):
                    fac = (binomial(n, kk) * binomial(m, ll) * 2.0 ** (kk + ll + n + m)
                           * double_factorial(kk + ll - 1) / double_factorial(kk + ll))
                    rest = n + m - kk - ll
                    for lp in range(rest + 1):
                        h = 0.5 * (n + m + 2 - lp)
                        gam = math.exp(ln_gamma(h)) / alpha**h
                        inner = inner + (fac * binomial(rest, lp) * gam
                                         * kummer_phi(h, 1.0, z) * c_nu(kk + ll + lp + 1, a, alpha))
            contrib = bb * inner
            if not np.all(np.isfinite(contrib)):
                raise AccuracyError(f"overflow in closed-form sum at (n, m) = ({n}, {m})")
            total += contrib
    return 2.0 * math.pi**2 * xi(packet, params) * np.exp(-a * kappa2) * total


def self_consistency_residual(state, packet, params, k_samples):
    """Compare c_{k'} with the closed-form right-hand side at ``k_samples``."""
    k = np.atleast_1d(np.asarray(k_samples, dtype=float))
    if k.size == 0 or np.any(k < 0):
        raise DomainError("k_samples must be non-empty and non-negative")
    lhs = np.asarray(lhs_value(state, k), dtype=complex)
    rhs = np.asarray(rhs_closed(state, packet, params, k), dtype=complex)
    diff = np.abs(lhs - rhs)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    rel = np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)
    return ResidualReport(k, lhs, rhs, float(diff.max()), float(rel.max()))


# ---------------------------------------------------------------------------
# quadrature of the same right-hand side


def _rhs_integral(state, a, A, spec):
    alpha = state.alpha
    ar = alpha.real
    N = state.order
    margin = 40.0 + 4.0 * N
    if spec.upper_cut is not None:
        cut_minus = cut_plus = spec.upper_cut
    else:
        cut_minus = A / (2.0 * ar) + math.sqrt(margin / ar)
        cut_plus = math.sqrt(margin / (a + ar))
    pp, wp = gauss_legendre_panels(0.0, cut_plus, spec.panels, spec.nodes)
    pm, wm = gauss_legendre_panels(0.0, cut_minus, spec.panels, spec.nodes)
    zm = A * pm
    g_minus = wm * pm * np.exp(zm - alpha * pm * pm) * bessel_i0e(zm)
    g_plus = wp * pp * np.exp(-(a + alpha) * pp * pp)

    P2 = pp[:, None] ** 2
    M2 = pm[None, :] ** 2
    s = P2 + M2
    y = P2 - M2
    # collect b_i b_j by total degree J = i + j
    b = state.coeffs
    poly = np.zeros(s.shape, dtype=complex)
    for J in range(2 * N + 1):
        coef = sum(b[i] * b[J - i] for i in range(max(0, J - N), min(J, N) + 1))
        if coef != 0:
            poly = poly + coef * 2.0**J * legendre_homogeneous(J, s, y * y)
    return g_plus @ poly @ g_minus


def rhs_quadrature(state, packet, params, k_prime, spec=None):
    """Right-hand side in (p_+, p_-) variables by tensor Gauss-Legendre quadrature."""
    spec = spec or QuadratureSpec(panels=32, nodes=8, tol=1e-10)
    _require_b_zero(packet)
    if k_prime < 0:
        raise DomainError("k_prime must be >= 0")
    a = packet.a
    A = float(big_a(packet, k_prime, params))
    pref = 2.0 * math.pi * xi(packet, params) * math.exp(-a * float(params.shifted_k2(k_prime)))
    if pref == 0 or not any(state.coeffs):
        return 0j
    coarse = _rhs_integral(state, a, A, spec)
    fine = _rhs_integral(state, a, A, spec.refined())
    if relative_change(coarse, fine) > spec.tol:
        raise AccuracyError("quadrature of the (p+, p-) integral not converged",
                            estimates=(pref * coarse, pref * fine))
    return complex(pref * fine)


def rhs_factorized(b0, alpha, packet, params, k_prime):
    """Single-coefficient case in closed form: the p_+ and p_- integrals separate,
    int x e^{-g x^2} dx = 1/(2g) and int x I0(B x) e^{-g x^2} dx = e^{B^2/(4g)}/(2g)."""
    a = packet.a
    A = float(big_a(packet, k_prime, params))
    kappa2 = float(params.shifted_k2(k_prime))
    return complex(2.0 * math.pi * xi(packet, params) * np.exp(-a * kappa2) * b0 * b0
                   * np.exp(A * A / (4.0 * alpha)) / (4.0 * alpha * (a + alpha)))


# ---------------------------------------------------------------------------
# pure Gaussian solutions


def gaussian_b0(packet, params):
    """Nonzero solution of b0 = b0^2 2 pi^2 xi, i.e. b0 = 1 / (2 pi^2 xi).

    For the Yukawa variant b0 picks up the factor exp(a m^2).
    """
    x = xi(packet, params)
    if x == 0:
        raise DegenerateCouplingError("xi = 0: only the trivial solution b0 = 0 exists")
    b0 = 1.0 / (2.0 * math.pi**2 * x)
    if params.variant is Variant.YUKAWA:
        b0 *= math.exp(packet.a * params.yukawa_mass**2)
    return complex(b0)


def alpha_roots(a):
    """Both widths alpha = a/2 +- sqrt(a^2 + 2 sqrt(2) a)/2.

    The minus root is formed from the product of roots, -a/sqrt(2) / alpha_+,
    which avoids cancellation for large a.
    """
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    plus = 0.5 * (a + math.sqrt(a * a + 2.0 * SQRT2 * a))
    minus = -(SQRT2 / 2.0) * a / plus
    return complex(plus), complex(minus)


def alpha_quadratic_residual(a, alpha):
    """Relative residual of alpha^2 - a alpha - a/sqrt(2) = 0."""
    terms = (alpha * alpha, a * alpha, SQRT2 / 2.0 * a)
    return abs(terms[0] - terms[1] - terms[2]) / max(abs(t) for t in terms)


def normalization_alpha(packet, params):
    """Width required for a normalised Gaussian, alpha = (8 pi^3 xi^2)^{-1}."""
    if not packet.is_normalized():
        raise PreconditionError("normalization_alpha needs a normalised packet, e^c = sqrt(2a/pi)")
    x = xi(packet, params)
    if x == 0:
        raise DegenerateCouplingError("xi = 0")
    return complex(1.0 / (8.0 * math.pi**3 * x * x))


def normalization_alpha_substituted(a, params):
    """(8 pi^3 xi^2)^{-1} with e^{2c} = 2a/pi substituted:
    -1 / (64 a pi^8 alpha'^2 B^2)."""
    B = params.beta_reg
    return complex(-1.0 / (64.0 * a * math.pi**8 * params.coupling**2 * B * B))


def normalization_alpha_printed(a, params):
    """The substituted expression written as -(64 i a pi^7 alpha'^2 B^2)^{-1}.
    Kept only so the audit can show that it is not equal to (8 pi^3 xi^2)^{-1}."""
    B = params.beta_reg
    return complex(-1.0 / (64j * a * math.pi**7 * params.coupling**2 * B * B))


def g_plus(a):
    return a * a + a * math.sqrt(a * a + 2.0 * SQRT2 * a)


def g_minus(a):
    # a^2 - a sqrt(a^2 + 2 sqrt2 a) rewritten without cancellation
    if a == 0:
        return 0.0
    return -2.0 * SQRT2 * a * a / (a + math.sqrt(a * a + 2.0 * SQRT2 * a))


def solve_width_condition(sign, rhs, tol=1e-10):
    """Solve a^2 +- a sqrt(a^2 + 2 sqrt(2) a) = rhs for a > 0 by bisection.

    The plus branch increases from 0 to infinity, the minus branch decreases
    from 0 to -infinity, so each has at most one root.
    """
    if sign in ("plus", "+", 1):
        func, ok, rng = g_plus, rhs > 0, "(0, inf)"
    elif sign in ("minus", "-", -1):
        func, ok, rng = g_minus, rhs < 0, "(-inf, 0)"
    else:
        raise DomainError(f"sign must be 'plus' or 'minus', got {sign!r}")
    if not (ok and math.isfinite(rhs)):
        raise NoRootError(f"rhs = {rhs} lies outside the range {rng} of the {sign} branch")
    lo, hi = expand_bracket(func, 0.0, 1.0, target=rhs)
    return bisect(func, lo, hi, target=rhs, ftol=tol * max(1.0, abs(rhs)))


# ---------------------------------------------------------------------------
# discretised quadratic map and damped fixed-point iteration


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_legendre(cls, n, k_max):
        if n < 2 or not k_max > 0:
            raise DomainError("radial grid needs n >= 2 and k_max > 0")
        x, w = np.polynomial.legendre.leggauss(int(n))
        return cls(0.5 * k_max * (x + 1.0), 0.5 * k_max * w)

    def __len__(self):
        return len(self.nodes)


def default_k_max(packet, alpha=None):
    width = min(packet.a, alpha.real if alpha is not None else packet.a)
    return math.sqrt(80.0 / width)


class QuadraticMap:
    """Discretisation of c_{k'} = int c_p^* X^{p,q}_{k'} c_q d^2p d^2q for radial c.

    With b = 0 the closed-form kernel is
    X = xi exp(-a k'^2) exp(-a |p+q|^2) I0(2 a |p-q| k'). In polar coordinates
    the two angular integrals collapse to 2 pi times one integral over the
    relative angle, done by the trapezoid rule (periodic, analytic integrand).
    The radial integrals use the grid's Gauss-Legendre weights, giving
    F[c]_i = sum_{j,l} conj(c_j) T[i, j, l] c_l.
    """

    def __init__(self, grid, packet, params, angular_nodes=48):
        _require_b_zero(packet)
        self.grid = grid
        self.packet = packet
        self.params = params
        self.xi = xi(packet, params)
        self.tensor = self._build(angular_nodes)

    def _build(self, m):
        a = self.packet.a
        r = self.grid.nodes
        wr = self.grid.weights * r
        phi = np.linspace(0.0, math.pi, m + 1)
        trap = np.full(m + 1, math.pi / m)
        trap[[0, -1]] *= 0.5
        n = len(r)
        # the angular integral is symmetric in (j, l): evaluate j <= l only
        ju, lu = np.triu_indices(n)
        rj = r[ju][:, None]
        rl = r[lu][:, None]
        sum2 = rj * rj + rl * rl
        cross = 2.0 * rj * rl * np.cos(phi)[None, :]
        dist = np.sqrt(np.maximum(sum2 - cross, 0.0))
        base = -a * (sum2 + cross)
        kappa = np.sqrt(self.params.shifted_k2(r))
        out = np.empty((n, n, n))
        for i, kap in enumerate(kappa):
            z = 2.0 * a * kap * dist
            vals = 2.0 * ((np.exp(base - a * kap * kap + z) * bessel_i0e(z)) @ trap)
            out[i, ju, lu] = vals
            out[i, lu, ju] = vals
        out *= 2.0 * math.pi * wr[None, :, None] * wr[None, None, :]
        return out

    def __call__(self, c):
        c = np.asarray(c, dtype=complex)
        return self.xi * np.einsum("j,ijl,l->i", np.conj(c), self.tensor, c)

    def linearization(self, zeta):
        """Matrix of the first-order map delta -> X zeta delta + X delta zeta
        (symmetrised over the two kernel slots, no conjugation)."""
        zeta = np.asarray(zeta, dtype=complex)
        T = self.tensor
        return self.xi * (np.einsum("ijl,j->il", T, zeta) + np.einsum("ijl,l->ij", T, zeta))


@dataclass
class FixedPointTrace:
    radial_grid: np.ndarray
    iterates: List[np.ndarray]
    converged: bool
    final_delta: float
    mixing: float
    deltas: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    diverged: bool = False

    def rows(self):
        """(iter, k, re_c, im_c, delta) rows; delta is the sup-norm step that
        produced the iterate (0 for the initial state)."""
        deltas = [0.0] + list(self.deltas)
        for it, (c, d) in enumerate(zip(self.iterates, deltas)):
            for k, v in zip(self.radial_grid, c):
                yield it, float(k), float(v.real), float(v.imag), d


def fixed_point_iterate(initial, fmap, mixing=0.5, max_iters=200, tol=1e-10,
                        divergence_factor=1e6):
    """Damped iteration c <- (1 - mixing) c + mixing F[c] of a QuadraticMap.

    Stops when the sup-norm step drops below ``tol``. Raises DivergenceError
    (carrying the partial trace) once sup|c| exceeds ``divergence_factor``
    times its initial size.
    """
    if not (0.0 < mixing <= 1.0):
        raise DomainError(f"mixing must lie in (0, 1], got {mixing}")
    if max_iters < 1 or not tol > 0:
        raise DomainError("max_iters must be >= 1 and tol > 0")
    c = np.asarray(initial, dtype=complex).copy()
    if c.shape != (len(fmap.grid),):
        raise DomainError("initial state does not match the radial grid")
    start = max(np.max(np.abs(c)), np.finfo(float).tiny)
    trace = FixedPointTrace(fmap.grid.nodes, [c.copy()], False, math.inf, mixing)
    for it in range(1, max_iters + 1):
        fc = fmap(c)
        trace.residuals.append(float(np.max(np.abs(fc - c))))
        new = (1.0 - mixing) * c + mixing * fc
        delta = float(np.max(np.abs(new - c)))
        c = new
        trace.iterates.append(c.copy())
        trace.deltas.append(delta)
        trace.final_delta = delta
        if not np.all(np.isfinite(c)) or np.max(np.abs(c)) > divergence_factor * start:
            trace.diverged = True
            raise DivergenceError(f"fixed-point iteration diverged at iteration {it}",
                                  iteration=it, trace=trace)
        if delta < tol:
            trace.converged = True
            break
    return trace


def quadratic_map_gaussian(b0, alpha, packet, params, k_prime):
    """F[c] for c = b0 exp(-alpha p^2), real alpha > 0, b = 0, in closed form.

    In p_+- variables |p+q|^2 = 2 p_+^2 and |p-q| = sqrt(2) p_-, so the map
    separates into int d^2p_+ e^{-(alpha+2a) p_+^2} = pi / (alpha + 2a) and
    int d^2p_- e^{-alpha p_-^2} I0(2 sqrt(2) a k' p_-) = pi e^{2 a^2 k'^2 / alpha} / alpha.
    """
    _require_b_zero(packet)
    a = packet.a
    kappa2 = params.shifted_k2(k_prime)
    return (xi(packet, params) * abs(b0) ** 2 * math.pi**2 / (alpha * (alpha + 2.0 * a))
            * np.exp(-a * kappa2 + 2.0 * a * a * kappa2 / alpha))


# ---------------------------------------------------------------------------
# cross-route audit


def _cx(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _rel(u, v):
    u, v = complex(u), complex(v)
    scale = max(abs(u), abs(v))
    return 0.0 if scale == 0 else abs(u - v) / scale


def _width_condition_conventions():
    rows = []
    for sign in ("plus", "minus"):
        for rhs in (1.0, -1.0):
            try:
                root = solve_width_condition(sign, rhs)
            except NoRootError as exc:
                rows.append({"sign": sign, "rhs": rhs, "root": None, "note": str(exc)})
                continue
            rows.append({
                "sign": sign, "rhs": rhs, "root": root,
                "matches_0.5337543": abs(root - REFERENCE_PLUS_ROOT) < 1e-4,
                "matches_1.4799995": abs(root - REFERENCE_MINUS_ROOT) < 1e-4,
            })
    return rows


def audit_consistency(a, params, k_samples=(0.0, 0.25, 0.5, 1.0), flag_tol=1e-6, spec=None):
    """Evaluate the Gaussian self-consistency relations along independent routes.

    Routes for the single-coefficient state c = b0 exp(-alpha_+ k^2):
      i   closed-form right-hand side (and the left-hand side it should match)
      ii  (p+, p-) quadrature of the right-hand side
      iii separated closed form of the same integral
      iv  the (alpha, b0) relations each route implies, together with the
          quadratic for alpha, the normalisation width and the a-condition
    The packet is normalised (e^c = sqrt(2a/pi), c real). Any pairwise
    relative disagreement above ``flag_tol`` is listed under "discrepancies".
    """
    packet = normalize(GaussianPacket(a))
    k = [float(x) for x in k_samples]
    x = xi(packet, params)
    alpha_p, alpha_m = alpha_roots(a)
    report = {
        "parameters": {"a": a, "packet": packet.to_dict(), "kernel": params.to_dict(),
                       "k_samples": k, "flag_tol": flag_tol},
        "xi": _cx(x),
        "alpha_roots": {"plus": _cx(alpha_p), "minus": _cx(alpha_m),
                        "quadratic_residual_plus": alpha_quadratic_residual(a, alpha_p),
                        "quadratic_residual_minus": alpha_quadratic_residual(a, alpha_m)},
    }
    discrepancies = []

    def compare(name, u, v):
        r = _rel(u, v)
        entry = {"name": name, "lhs": _cx(u), "rhs": _cx(v), "rel_diff": r, "flagged": r > flag_tol}
        if entry["flagged"]:
            discrepancies.append(entry)
        return entry

    comparisons = []
    if x == 0:
        zero = [_cx(0)] * len(k)
        report["status"] = "degenerate: xi = 0, b0 undefined"
        report["route_i_closed_form"] = {"lhs": None, "rhs": zero, "identically_zero": True}
        report["route_ii_quadrature"] = {"rhs": zero, "identically_zero": True}
        report["route_iii_separated"] = {"rhs": zero, "identically_zero": True}
        report["route_iv_relations"] = {"b0_amplitude_condition": None}
        report["comparisons"] = []
        report["discrepancies"] = []
        report["width_condition_conventions"] = _width_condition_conventions()
        return report

    report["status"] = "ok"
    b0 = gaussian_b0(packet, params)
    state = ScatteredState(alpha_p, (b0,))
    res = self_consistency_residual(state, packet, params, k)
    quad = [rhs_quadrature(state, packet, params, kk, spec) for kk in k]
    sep = [rhs_factorized(b0, alpha_p.real, packet, params, kk) for kk in k]
    report["route_i_closed_form"] = {
        "lhs": [_cx(v) for v in res.lhs], "rhs": [_cx(v) for v in res.rhs],
        "max_abs_residual": res.max_abs_residual, "max_rel_residual": res.max_rel_residual}
    report["route_ii_quadrature"] = {"rhs": [_cx(v) for v in quad]}
    report["route_iii_separated"] = {"rhs": [_cx(v) for v in sep]}

    for kk, lhs, r16, rq, rs in zip(k, res.lhs, res.rhs, quad, sep):
        comparisons.append(compare(f"lhs vs closed-form rhs at k'={kk}", lhs, r16))
        comparisons.append(compare(f"closed-form rhs vs quadrature rhs at k'={kk}", r16, rq))
        comparisons.append(compare(f"quadrature rhs vs separated rhs at k'={kk}", rq, rs))

    # exponent and amplitude each route implies for a single Gaussian term
    disc = a * a - 2.0 * SQRT2 * a
    root = complex(disc) ** 0.5
    implied_alpha = ((a + root) / 2.0, (a - root) / 2.0)
    aa = alpha_p.real
    relations = {
        "alpha_quadratic": {"plus": _cx(alpha_p), "minus": _cx(alpha_m)},
        "alpha_from_exponent_matching": {"plus": _cx(implied_alpha[0]), "minus": _cx(implied_alpha[1]),
                                         "equation": "alpha^2 - a alpha + a/sqrt(2) = 0"},
        "b0_amplitude_condition": _cx(b0),
        "b0_from_closed_form_at_k0": _cx(aa * (a + aa) / (math.pi**2 * x)),
        "b0_from_quadrature_at_k0": _cx(2.0 * aa * (a + aa) / (math.pi * x)),
        "b0_normalized_sqrt_2alpha_over_pi": math.sqrt(2.0 * aa / math.pi),
        "b0_sqrt_pi_over_alpha": math.sqrt(math.pi / aa),
        "normalization_alpha": _cx(normalization_alpha(packet, params)),
        "normalization_alpha_substituted": _cx(normalization_alpha_substituted(a, params)),
        "normalization_alpha_printed_form": _cx(normalization_alpha_printed(a, params)),
    }
    report["route_iv_relations"] = relations
    comparisons.append(compare("alpha_+ (quadratic) vs exponent-matching alpha_+", alpha_p, implied_alpha[0]))
    comparisons.append(compare("b0 (amplitude condition) vs closed-form amplitude", b0, aa * (a + aa) / (math.pi**2 * x)))
    comparisons.append(compare("b0 (amplitude condition) vs quadrature amplitude", b0, 2.0 * aa * (a + aa) / (math.pi * x)))
    comparisons.append(compare("normalization alpha vs substituted form",
                               normalization_alpha(packet, params), normalization_alpha_substituted(a, params)))
    comparisons.append(compare("normalization alpha vs printed form",
                               normalization_alpha(packet, params), normalization_alpha_printed(a, params)))

    # kernel: cut discontinuity vs closed form at one point
    kq = kernel_quadrature(1.0, (0.0, 0.0), (0.0, 0.0), packet, params)
    kc = kernel_closed(1.0, (0.0, 0.0), (0.0, 0.0), packet, params)
    report["kernel_branch"] = {
        "k_prime": 1.0, "closed": _cx(kc), "pv_part": _cx(kq.pv_part), "pole_part": _cx(kq.pole_part),
        "note": "pole_part is the full discontinuity across the cut; a one-sided "
                "contour carries pv_part + pole_part/2",
    }
    comparisons.append(compare("kernel pole part vs closed form at k'=1", kq.pole_part, kc))

    report["width_condition_conventions"] = _width_condition_conventions()
    report["comparisons"] = comparisons
    report["discrepancies"] = discrepancies
    return report
