"""Deterministic bisection and sign-scan utilities.

Everything here is branch-free of randomness: fixed iteration counts, fixed
grids, fixed reduction order, so repeated runs produce identical bits.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceError, NoSignChangeError


def bisect(func: Callable[[float], float], lo: float, hi: float,
           iters: int = 200) -> float:
    """Plain bisection on a sign change; returns the final midpoint."""
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSignChangeError(
            f"no sign change on bracket ({lo}, {hi}): f(lo)={flo}, f(hi)={fhi}")
    neg_left = flo < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = func(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == neg_left:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_residual(func: Callable[[float], float], lo: float, hi: float,
                    iters: int, tol: float, what: str = "root") -> float:
    """Bisection plus a residual check on the returned point."""
    root = bisect(func, lo, hi, iters)
    res = abs(func(root))
    if res > tol:
        raise ConvergenceError(
            f"{what} refinement stalled with residual {res:.3e} > {tol:.3e}",
            residual=res)
    return root


def bisect_monotone_vec(func: Callable[[np.ndarray], np.ndarray],
                        targets: np.ndarray, lo: float, hi: float,
                        increasing: bool, iters: int = 100) -> np.ndarray:
    """Solve func(x) = target for each target, func monotone on [lo, hi].

    Vectorized over targets; func must accept/return arrays.
    """
    targets = np.asarray(targets, dtype=float)
    los = np.full(targets.shape, lo)
    his = np.full(targets.shape, hi)
    for _ in range(iters):
        mids = 0.5 * (los + his)
        vals = func(mids)
        if increasing:
            below = vals < targets
        else:
            below = vals > targets
        los = np.where(below, mids, los)
        his = np.where(below, his, mids)
    return 0.5 * (los + his)


def sign_change_brackets(xs: np.ndarray, vals: np.ndarray) -> list[tuple[float, float]]:
    """Intervals (xs[i], xs[i+1]) where vals changes sign (zeros included)."""
    brackets = []
    for i in range(len(xs) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            brackets.append((xs[i], xs[i]))
        elif (a > 0) != (b > 0):
            brackets.append((xs[i], xs[i + 1]))
    if len(vals) and vals[-1] == 0.0:
        brackets.append((xs[-1], xs[-1]))
    return brackets


def dedupe_sorted(values: list[float], tol: float) -> list[float]:
    """Collapse near-coincident entries of a sorted list."""
    out: list[float] = []
    for v in values:
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out
