"""Even unimodal maps f = h(Q_t(x)) on [-1, 1] with Q_t(x) = -|x|^t.

The diffeomorphic factor h is a polynomial on [-1, 0], stored in the
anchored form

    h(y) = -1 + (1 + y) * P(y)

so that h(-1) = -1 holds exactly in floating point.  The critical value is
c1 = h(0) = -1 + P(0) and must lie in (0, 1].  Evaluation always goes
through |x|, which makes f(x) = f(-x) exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (DegenerateDerivativeError, DomainError, EscapeError,
                     ParameterError)
from .validation import check_critical_value, check_exponent, check_int

_H_GRID = np.linspace(-1.0, 0.0, 257)


def _polyval(coeffs, y):
    acc = 0.0 * y if isinstance(y, np.ndarray) else 0.0
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def _polyder(coeffs):
    return tuple(i * c for i, c in enumerate(coeffs) if i >= 1)


def _maybe_float(value, x):
    if np.isscalar(x) or (isinstance(x, np.ndarray) and x.ndim == 0):
        return float(value)
    return value


@dataclass(frozen=True)
class ClassKParams:
    """Parameters (t, N, K): critical exponent, maximal return time and
    bound on the factor nonlinearity, delimiting the bounded-type class."""

    t: float
    N: int
    K: float

    def __post_init__(self):
        check_exponent(self.t)
        check_int(self.N, "N", minimum=2)
        if not self.K > 0:
            raise ParameterError(f"K must be positive, got {self.K}")


@dataclass(frozen=True)
class UnimodalMap:
    """Map f(x) = h(-|x|^t) with anchored polynomial factor h.

    ``p_coeffs`` are the ascending coefficients of P in
    h(y) = -1 + (1 + y) P(y).
    """

    t: float
    p_coeffs: tuple[float, ...]
    label: str = ""
    tol: Tolerances = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        check_exponent(self.t)
        object.__setattr__(self, "p_coeffs", tuple(float(c) for c in self.p_coeffs))
        c1 = self.critical_value
        if not 0.0 < c1 <= 1.0:
            raise ParameterError(f"critical value h(0) = {c1} not in (0, 1]")
        dh = self.h_deriv(_H_GRID)
        if np.min(dh) <= 0.0:
            raise ParameterError(
                f"h' must be positive on [-1, 0]; min sampled value {np.min(dh)}")

    # -- factor h --------------------------------------------------------

    def h(self, y):
        return -1.0 + (1.0 + y) * _polyval(self.p_coeffs, y)

    def h_deriv(self, y):
        p = _polyval(self.p_coeffs, y)
        dp = _polyval(_polyder(self.p_coeffs), y)
        return p + (1.0 + y) * dp

    def h_deriv2(self, y):
        dp = _polyval(_polyder(self.p_coeffs), y)
        ddp = _polyval(_polyder(_polyder(self.p_coeffs)), y)
        return 2.0 * dp + (1.0 + y) * ddp

    def h_coeffs(self) -> tuple[float, ...]:
        """Plain ascending coefficients of h (for descriptors)."""
        p = self.p_coeffs
        out = [0.0] * (len(p) + 1)
        for i, c in enumerate(p):
            out[i] += c
            out[i + 1] += c
        out[0] -= 1.0
        while len(out) > 1 and out[-1] == 0.0:
            out.pop()
        return tuple(out)

    # -- the map ---------------------------------------------------------

    @property
    def critical_value(self) -> float:
        return float(self.h(0.0))

    def _check_domain(self, x):
        ax = np.abs(x)
        bad = np.max(ax) if isinstance(ax, np.ndarray) and ax.ndim else ax
        if bad > 1.0 + self.tol.eps_dom:
            raise DomainError(f"point with |x| = {float(bad)} outside [-1, 1]")
        return ax

    def __call__(self, x):
        ax = self._check_domain(np.asarray(x, dtype=float) if not np.isscalar(x) else float(x))
        q = -(ax ** self.t)
        return _maybe_float(self.h(q), x)

    def deriv(self, x):
        xv = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
        ax = self._check_domain(xv)
        q = -(ax ** self.t)
        dq = -self.t * np.power(ax, self.t - 1.0) * np.sign(xv)
        return _maybe_float(self.h_deriv(q) * dq, x)

    def deriv2(self, x):
        xv = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
        ax = self._check_domain(xv)
        q = -(ax ** self.t)
        dq = -self.t * np.power(ax, self.t - 1.0) * np.sign(xv)
        with np.errstate(divide="ignore"):
            ddq = -self.t * (self.t - 1.0) * np.power(ax, self.t - 2.0)
        return _maybe_float(self.h_deriv2(q) * dq * dq + self.h_deriv(q) * ddq, x)

    def nonlinearity(self, x):
        """N(f)(x) = f''(x)/f'(x); singular like (t-1)/x at the critical point."""
        d1 = self.deriv(x)
        small = np.abs(d1) < self.tol.eps_deriv
        if np.any(small):
            raise DegenerateDerivativeError(
                "f' below eps_deriv while evaluating the nonlinearity")
        return self.deriv2(x) / d1

    def factor_nonlinearity(self, y):
        """N(h)(y) = h''(y)/h'(y) from the polynomial coefficients."""
        d1 = self.h_deriv(y)
        small = np.abs(d1) < self.tol.eps_deriv
        if np.any(small):
            raise DegenerateDerivativeError("h' below eps_deriv")
        return self.h_deriv2(y) / d1

    # -- descriptors -----------------------------------------------------

    def to_descriptor(self) -> dict:
        return {"t": self.t, "h_coeffs": list(self.h_coeffs()), "label": self.label}


def make_affine_family(t, c, label: str = "", tol: Tolerances = DEFAULT_TOL) -> UnimodalMap:
    """Canonical member f_c(x) = c - (1 + c)|x|^t, i.e. h affine, N(h) = 0."""
    t = check_exponent(t)
    c = check_critical_value(c)
    return UnimodalMap(t=t, p_coeffs=(1.0 + c,), label=label or f"affine(t={t}, c={c})",
                       tol=tol)


def map_from_h_coeffs(t, h_coeffs, label: str = "", max_degree: int = 8,
                      tol: Tolerances = DEFAULT_TOL) -> UnimodalMap:
    """Build a map from plain h coefficients, anchoring h(-1) = -1 exactly.

    The coefficients must already satisfy h(-1) = -1 to 1e-9; the anchored
    form then discards the residual remainder.
    """
    coeffs = [float(c) for c in h_coeffs]
    if len(coeffs) - 1 > max_degree:
        raise ParameterError(
            f"h degree {len(coeffs) - 1} exceeds the cap {max_degree}")
    if len(coeffs) < 2:
        raise ParameterError("h must have degree >= 1")
    # synthetic division of h(y) + 1 by (y + 1); the remainder is h(-1) + 1
    a = list(coeffs)
    a[0] += 1.0
    degree = len(a) - 1
    q = [0.0] * degree
    q[degree - 1] = a[degree]
    for i in range(degree - 1, 0, -1):
        q[i - 1] = a[i] - q[i]
    remainder = a[0] - q[0]
    if abs(remainder) > 1e-9:
        raise ParameterError(
            f"h(-1) = {_polyval(tuple(coeffs), -1.0)} differs from -1 "
            f"by {abs(remainder)}")
    return UnimodalMap(t=check_exponent(t), p_coeffs=tuple(q), label=label, tol=tol)


def map_from_descriptor(desc: dict, tol: Tolerances = DEFAULT_TOL) -> UnimodalMap:
    """Parse {"t", "h_coeffs", "label"} or the affine shorthand {"t", "c"}."""
    if not isinstance(desc, dict) or "t" not in desc:
        raise ParameterError("map descriptor must be an object with a 't' field")
    label = str(desc.get("label", ""))
    if "c" in desc:
        return make_affine_family(desc["t"], desc["c"], label=label, tol=tol)
    if "h_coeffs" in desc:
        return map_from_h_coeffs(desc["t"], desc["h_coeffs"], label=label, tol=tol)
    raise ParameterError("map descriptor needs either 'c' or 'h_coeffs'")


def orbit(f, x, n: int) -> np.ndarray:
    """Forward orbit [x, f(x), ..., f^n(x)]; raises EscapeError on blowup."""
    check_int(n, "n", minimum=0)
    eps = getattr(f, "tol", DEFAULT_TOL).eps_dom
    pts = np.empty(n + 1)
    pts[0] = float(x)
    if abs(pts[0]) > 1.0 + eps:
        raise EscapeError(f"initial point {x} outside [-1, 1]", 0, float(x))
    for j in range(n):
        nxt = float(f(pts[j]))
        if abs(nxt) > 1.0 + eps:
            raise EscapeError(
                f"orbit escaped [-1, 1] at iterate {j + 1} (value {nxt})",
                j + 1, nxt)
        pts[j + 1] = nxt
    return pts


def accumulate_nonlinearity(f, x, m: int):
    """Nonlinearity and derivative of f^m along the orbit of x.

    Returns (N, D, z) with N = N(f^m)(x) = sum_j N(f)(z_j) (f^j)'(x),
    D = (f^m)'(x) and z = f^m(x).  Works on scalars or arrays.
    """
    z = np.asarray(x, dtype=float).copy()
    n_acc = np.zeros_like(z)
    d_acc = np.ones_like(z)
    for _ in range(m):
        n_acc = n_acc + f.nonlinearity(z) * d_acc
        d_acc = d_acc * f.deriv(z)
        z = f(z)
    return _maybe_float(n_acc, x), _maybe_float(d_acc, x), _maybe_float(z, x)


def factor_nonlinearity(f, y):
    """N(h)(y) for the factor of any map-like f = h(Q_t).

    For a polynomial-factor UnimodalMap this uses exact derivatives of h;
    otherwise it unwinds the chain rule,
    N(h)(Q(x)) = (N(f)(x) - (t - 1)/x) / Q'(x) at x = (-y)^{1/t}.
    """
    if isinstance(f, UnimodalMap):
        return f.factor_nonlinearity(y)
    yv = np.asarray(y, dtype=float) if not np.isscalar(y) else float(y)
    if np.any(np.asarray(yv) >= 0.0) or np.any(np.asarray(yv) < -1.0):
        raise ParameterError("factor nonlinearity needs y in [-1, 0)")
    t = f.t
    x = (-yv) ** (1.0 / t)
    dq = -t * np.power(x, t - 1.0)
    n_f = f.nonlinearity(x)
    return _maybe_float((n_f - (t - 1.0) / x) / dq, y)
