"""Input validation helpers used by the public API and the estimators."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import ParameterError


def check_scalar(value, name: str, *, minimum=None, maximum=None,
                 include_min: bool = False, include_max: bool = True) -> float:
    """Validate a real scalar against an (open/closed) interval."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ParameterError(f"{name} must be a real number, got {value!r}")
    x = float(value)
    if math.isnan(x):
        raise ParameterError(f"{name} must not be NaN")
    if minimum is not None:
        ok = x >= minimum if include_min else x > minimum
        if not ok:
            op = ">=" if include_min else ">"
            raise ParameterError(f"{name} must be {op} {minimum}, got {x}")
    if maximum is not None:
        ok = x <= maximum if include_max else x < maximum
        if not ok:
            op = "<=" if include_max else "<"
            raise ParameterError(f"{name} must be {op} {maximum}, got {x}")
    return x


def check_int(value, name: str, *, minimum=None, maximum=None) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    n = int(value)
    if minimum is not None and n < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {n}")
    if maximum is not None and n > maximum:
        raise ParameterError(f"{name} must be <= {maximum}, got {n}")
    return n


def check_exponent(t) -> float:
    """Critical exponent of Q_t; must exceed 1."""
    return check_scalar(t, "t", minimum=1.0, include_min=False)


def check_critical_value(c) -> float:
    """Critical value of the affine family; must lie in (0, 1]."""
    return check_scalar(c, "c", minimum=0.0, maximum=1.0,
                        include_min=False, include_max=True)


def check_interval(pair, name: str) -> tuple[float, float]:
    try:
        a, b = pair
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a pair (a, b)") from exc
    a, b = float(a), float(b)
    if not a < b:
        raise ParameterError(f"{name} must satisfy a < b, got ({a}, {b})")
    return a, b


def as_point_array(x, name: str = "x") -> np.ndarray:
    """Coerce array-like input to a float64 array, rejecting non-finite data."""
    arr = np.asarray(x, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return arr


def check_points_in_domain(x, eps_dom: float, name: str = "x") -> np.ndarray:
    arr = as_point_array(x, name)
    if arr.size and np.max(np.abs(arr)) > 1.0 + eps_dom:
        raise ParameterError(
            f"{name} has entries outside [-1, 1] beyond tolerance {eps_dom}")
    return arr


def check_map_like(f, name: str = "map"):
    """Accept anything that quacks like a normalized even unimodal map."""
    for attr in ("t", "deriv", "critical_value"):
        if not hasattr(f, attr):
            raise ParameterError(
                f"{name} must be a UnimodalMap or RescaledIterate "
                f"(missing attribute {attr!r})")
    if not callable(f):
        raise ParameterError(f"{name} must be callable")
    return f
