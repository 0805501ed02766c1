"""Derivative-free bracketing root finder."""

import math

from .errors import NoRootError


def expand_bracket(func, lo, hi, target=0.0, grow=2.0, max_expansions=200):
    """Grow ``hi`` geometrically until func(lo) - target and func(hi) - target
    differ in sign. Returns the new (lo, hi)."""
    f_lo = func(lo) - target
    for _ in range(max_expansions):
        f_hi = func(hi) - target
        if f_lo == 0 or f_hi == 0 or (f_lo < 0) != (f_hi < 0):
            return lo, hi
        lo, f_lo = hi, f_hi
        hi *= grow
    raise NoRootError(f"no sign change found up to {hi}")


def bisect(func, lo, hi, target=0.0, xtol=0.0, ftol=0.0, max_iter=400):
    """Bisection for func(x) = target on a sign-changing bracket [lo, hi].

    Stops when |func(x) - target| <= ftol, when the bracket is narrower than
    ``xtol``, or when the midpoint no longer moves in floating point.
    """
    f_lo = func(lo) - target
    f_hi = func(hi) - target
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo < 0) == (f_hi < 0):
        raise NoRootError(f"[{lo}, {hi}] does not bracket a root")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid) - target
        if f_mid == 0 or abs(f_mid) <= ftol or (hi - lo) <= xtol or mid in (lo, hi):
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    if not math.isfinite(mid):
        raise NoRootError("bisection produced a non-finite midpoint")
    return mid
