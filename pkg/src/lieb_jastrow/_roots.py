"""Safeguarded scalar root finding (bisection with Newton acceleration)."""

from __future__ import annotations

import math
from typing import Callable

from .errors import ConvergenceError


def bracketed_newton(
    func: Callable[[float], float],
    deriv: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 4.0 * 2.220446049250313e-16,
    max_iter: int = 200,
) -> float:
    """Find the root of a function that is increasing on ``[lo, hi]``.

    Newton steps are taken when they stay inside the current bracket;
    otherwise the bracket is bisected. The bracket is tightened after
    every evaluation, so convergence is guaranteed for a sign change.
    """
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo > 0.0 or fhi < 0.0:
        raise ConvergenceError(
            f"root not bracketed on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = func(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        d = deriv(x)
        # relative tolerance of a few ulps: downstream maps such as tan(k/2) near
        # k = pi amplify any slack in the root
        scale = xtol * max(abs(x), 1e-300)
        if d > 0.0 and math.isfinite(d):
            step = fx / d
            if abs(step) <= scale:
                return x - step
            x_new = x - step
        else:
            x_new = 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if hi - lo <= scale:
            return x_new
        x = x_new
    raise ConvergenceError(f"no convergence after {max_iter} iterations (last x={x!r})")
