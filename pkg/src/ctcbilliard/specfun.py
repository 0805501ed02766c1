"""Special functions used by the kernel, the self-consistency sums and the
stability estimates.

Everything here is implemented from scratch (Lanczos log-gamma, power series
plus asymptotic expansion for I0, series plus Kummer transformation for the
confluent hypergeometric function) so that each ingredient can be checked
against analytic identities independently of any third-party library.
Functions that are used inside quadratures (``bessel_i0``, ``bessel_i0e``,
``kummer_phi``, ``legendre_p``) accept numpy arrays.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "EvalPolicy",
    "DEFAULT_POLICY",
    "I0_CROSSOVER",
    "ln_gamma",
    "gamma",
    "beta",
    "bessel_i0",
    "bessel_i0e",
    "kummer_phi",
    "legendre_p",
    "legendre_homogeneous",
    "double_factorial",
    "binomial",
    "c_nu",
]


@dataclass(frozen=True)
class EvalPolicy:
    """Truncation policy for the series evaluators."""

    rel_tol: float = 1e-16
    max_terms: int = 500

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 50:
            raise DomainError(f"max_terms must be an integer >= 50, got {self.max_terms}")


DEFAULT_POLICY = EvalPolicy()

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_ln_gamma(x):
    # valid for x >= 0.5
    x = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def ln_gamma(x):
    """Natural log of the gamma function for real ``x > 0``.

    Small positive integers are returned exactly from the factorial table;
    arguments below 1/2 go through the reflection formula.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x}")
    if x == int(x) and x <= 171:
        return math.log(math.factorial(int(x) - 1)) if x > 2 else 0.0
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_ln_gamma(1.0 - x)
    return _lanczos_ln_gamma(x)


def gamma(x):
    """Gamma function for real ``x > 0``."""
    if float(x) == int(x) and 0 < x <= 171:
        return float(math.factorial(int(x) - 1))
    return math.exp(ln_gamma(x))


def beta(x, y):
    """Euler beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).

    When ``x + y == 1`` (the regulator case B(eps, 1 - eps)) the reflection
    identity pi / sin(pi x) is used, which stays accurate as x -> 0.
    """
    x = float(x)
    y = float(y)
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"beta requires positive arguments, got ({x}, {y})")
    if abs(x + y - 1.0) <= 4.0 * np.finfo(float).eps:
        return math.pi / math.sin(math.pi * x)
    return math.exp(ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y))


# ---------------------------------------------------------------------------
# Modified Bessel function of order zero

I0_CROSSOVER = 20.0
_I0_ASYMPTOTIC_TERMS = 80


def _check_nonneg(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} requires finite arguments")
    if np.any(arr < 0.0):
        raise DomainError(f"{name} requires x >= 0 (callers pass norms)")
    return arr


_I0_SERIES_BANDS = (2.0, 6.0, 12.0, I0_CROSSOVER)


def _i0_series_band(x, policy):
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, policy.max_terms + 1):
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= policy.rel_tol * total):
            return total
    raise AccuracyError("I0 power series did not converge", estimates=(total - term, total))


def _i0_series(x, policy=DEFAULT_POLICY):
    """Power series sum_k (x/2)^{2k} / (k!)^2; all terms positive.

    Arguments are grouped by size so small ones stop after a few terms.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    lower = -np.inf
    for upper in _I0_SERIES_BANDS + (np.inf,):
        sel = (x > lower) & (x <= upper)
        if sel.any():
            out[sel] = _i0_series_band(x[sel], policy)
        lower = upper
    return out


def _i0e_asymptotic(x, rel_tol=DEFAULT_POLICY.rel_tol):
    """exp(-x) I0(x) from the large-argument expansion, truncated at its
    smallest term or once terms fall below ``rel_tol``."""
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, _I0_ASYMPTOTIC_TERMS + 1):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        live &= (nxt < term) & (term > rel_tol)
        if not live.any():
            break
        term = np.where(live, nxt, term)
        total = total + np.where(live, nxt, 0.0)
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_i0e(x, policy=DEFAULT_POLICY):
    """Exponentially scaled modified Bessel function exp(-x) I0(x), x >= 0."""
    arr = _check_nonneg(x, "bessel_i0e")
    out = np.empty_like(arr)
    low = arr <= I0_CROSSOVER
    if low.any():
        xl = arr[low]
        out[low] = np.exp(-xl) * _i0_series(xl, policy)
    if (~low).any():
        out[~low] = _i0e_asymptotic(arr[~low])
    return out if out.ndim else float(out)


def bessel_i0(x, policy=DEFAULT_POLICY):
    """Modified Bessel function I0(x) for x >= 0.

    Above ``I0_CROSSOVER`` the value is assembled as exp(x) * i0e(x); it
    overflows to inf only where I0 itself exceeds the float range.
    """
    arr = _check_nonneg(x, "bessel_i0")
    out = np.empty_like(arr)
    low = arr <= I0_CROSSOVER
    if low.any():
        out[low] = _i0_series(arr[low], policy)
    if (~low).any():
        xh = arr[~low]
        with np.errstate(over="ignore"):
            out[~low] = np.exp(xh) * _i0e_asymptotic(xh)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Confluent hypergeometric function 1F1(a; b; z)


def _is_nonpositive_integer(b):
    return b <= 0 and float(b) == int(b)


def _kummer_series(a, b, z, policy):
    z = np.asarray(z)
    term = np.ones(z.shape, dtype=np.result_type(z, float))
    total = term.copy()
    for n in range(policy.max_terms):
        term = term * ((a + n) / ((b + n) * (n + 1.0))) * z
        total = total + term
        if np.all(np.abs(term) <= policy.rel_tol * np.abs(total)):
            return total
        if a + n == 0:
            # terminating series, every later term vanishes
            return total
    raise AccuracyError(
        f"Kummer series for a={a}, b={b} did not converge in {policy.max_terms} terms",
        estimates=(total - term, total),
    )


def kummer_phi(a, b, z, policy=DEFAULT_POLICY, transform=True):
    """Confluent (degenerate) hypergeometric function Phi(a, b; z).

    Sums sum_n (a)_n z^n / ((b)_n n!) directly when Re z >= 0, where the terms
    do not alternate. For Re z < 0 the Kummer transformation
    Phi(a, b; z) = e^z Phi(b - a, b; -z) is applied so the summed series
    again has a non-negative argument. Set ``transform=False`` to force the
    direct series. ``z`` may be a numpy array (real or complex).
    """
    a = float(a)
    b = float(b)
    if _is_nonpositive_integer(b):
        raise DomainError(f"kummer_phi undefined for b a non-positive integer, got b={b}")
    z_arr = np.asarray(z)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.iscomplexobj(z_arr):
        out = np.empty(z_arr.shape, dtype=complex)
    else:
        z_arr = z_arr.astype(float)
        out = np.empty(z_arr.shape, dtype=float)
    neg = (np.real(z_arr) < 0.0) if transform else np.zeros(z_arr.shape, dtype=bool)
    if (~neg).any():
        out[~neg] = _kummer_series(a, b, z_arr[~neg], policy)
    if neg.any():
        zn = z_arr[neg]
        out[neg] = np.exp(zn) * _kummer_series(b - a, b, -zn, policy)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Legendre polynomials and combinatorial helpers


def legendre_p(n, x):
    """Legendre polynomial P_n(x) by Bonnet's three-term recurrence.

    Valid for any real x, including |x| > 1.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"legendre_p requires n >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for j in range(1, n):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    return p if p.ndim else float(p)


def legendre_homogeneous(n, s, y2):
    """y^n P_n(s / y) written as a polynomial in s and y^2.

    Same recurrence as :func:`legendre_p` multiplied through by y^{n+1}, so
    no division by y occurs. Used where y = p_+^2 - p_-^2 may vanish.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"legendre_homogeneous requires n >= 0, got {n}")
    s = np.asarray(s, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    q_prev = np.ones(np.broadcast(s, y2).shape)
    if n == 0:
        return q_prev
    q = np.broadcast_to(s, q_prev.shape).astype(float)
    for j in range(1, n):
        q_prev, q = q, ((2 * j + 1) * s * q - j * y2 * q_prev) / (j + 1)
    return q


def double_factorial(n):
    """n!! with the conventions (-1)!! = 0!! = 1."""
    n = int(n)
    if n < -1:
        raise DomainError(f"double_factorial requires n >= -1, got {n}")
    if n <= 0:
        return 1.0
    return float(math.prod(range(n, 0, -2)))


def binomial(n, k):
    """Binomial coefficient C(n, k); zero outside 0 <= k <= n."""
    n = int(n)
    k = int(k)
    if n < 0:
        raise DomainError(f"binomial requires n >= 0, got {n}")
    if k < 0 or k > n:
        return 0.0
    return float(math.comb(n, k))


def c_nu(nu, a, alpha):
    """Moment coefficient C_nu(a, alpha) of the closed-form self-consistency sum.

    Even nu = 2L:  (2L-1)!! / (2 (2(a+alpha))^L) * sqrt(pi / (a+alpha))
    Odd  nu = 2L+1: L! / (2 (a+alpha)^(L+1))

    ``alpha`` may be complex; the principal square root is used.
    """
    nu = int(nu)
    if nu < 0:
        raise DomainError(f"c_nu requires nu >= 0, got {nu}")
    s = a + alpha
    if np.real(s) <= 0.0:
        raise DomainError(f"c_nu requires a + alpha > 0, got {s}")
    lam, odd = divmod(nu, 2)
    if odd:
        return math.factorial(lam) / (2.0 * s ** (lam + 1))
    root = np.sqrt(np.pi / s) if isinstance(s, complex) else math.sqrt(math.pi / s)
    return double_factorial(2 * lam - 1) / (2.0 * (2.0 * s) ** lam) * root
