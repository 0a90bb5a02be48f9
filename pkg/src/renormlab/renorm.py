"""Renormalization tower: detection, rescaling, tower construction, tuning.

Conventions.  A restricted interval at any level is symmetric, J = [-p, p],
with p a fixed point of the n-th iterate (period dividing n), the first n
iterates of J pairwise disjoint in interior, and the n-th iterate contained
in J.  The rescale alpha(x) = s*x is linear with |s| = 1/p, its sign chosen
so the renormalized map again has a positive maximum at 0.  Because every
alpha is linear, the k-th renormalized map collapses to a single rescaled
iterate

    f_k(x) = S_k * f^(m_k)(x / S_k),      S_k = s_k * ... * s_1,

which is how it is represented: no refitting, evaluation unwinds the
composition.  In base coordinates I_k = [-r_k, r_k] with r_k = 1/|S_k| and
the periodic endpoint is p_k = p_local / S_{k-1} (signed).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (ConvergenceError, NormalizationError,
                     NotRenormalizableError, ParameterError, TuningError)
from .maps import UnimodalMap, accumulate_nonlinearity, make_affine_family
from .numerics import bisect, bisect_residual, dedupe_sorted, sign_change_brackets
from .validation import check_exponent, check_int, check_interval, check_map_like


@dataclass(frozen=True)
class RescaledIterate:
    """The map x -> scale * base^(m)(x / scale) on [-1, 1]."""

    base: UnimodalMap
    m: int
    scale: float

    @property
    def t(self) -> float:
        return self.base.t

    @property
    def tol(self) -> Tolerances:
        return self.base.tol

    @property
    def critical_value(self) -> float:
        u = 0.0
        for _ in range(self.m):
            u = self.base(u)
        return float(self.scale * u)

    def __call__(self, x):
        u = np.asarray(x, dtype=float) / self.scale if not np.isscalar(x) else float(x) / self.scale
        for _ in range(self.m):
            u = self.base(u)
        out = self.scale * u
        return float(out) if np.isscalar(x) else out

    def deriv(self, x):
        u = np.asarray(x, dtype=float) / self.scale if not np.isscalar(x) else float(x) / self.scale
        d = np.ones_like(u) if isinstance(u, np.ndarray) else 1.0
        for _ in range(self.m):
            d = d * self.base.deriv(u)
            u = self.base(u)
        return float(d) if np.isscalar(x) else d

    def nonlinearity(self, x):
        u = np.asarray(x, dtype=float) / self.scale if not np.isscalar(x) else float(x) / self.scale
        n_acc, _, _ = accumulate_nonlinearity(self.base, u, self.m)
        out = n_acc / self.scale
        return float(out) if np.isscalar(x) else out

    def deriv2(self, x):
        return self.nonlinearity(x) * self.deriv(x)


def _unwrap(f) -> tuple[UnimodalMap, int, float]:
    if isinstance(f, RescaledIterate):
        return f.base, f.m, f.scale
    return f, 1, 1.0


def iterate(f, x, n: int):
    for _ in range(n):
        x = f(x)
    return x


def interval_image(f, interval) -> tuple[float, float]:
    """Image of [a, b] under an even unimodal map with maximum at 0."""
    a, b = interval
    fa, fb = float(f(a)), float(f(b))
    lo, hi = (fa, fb) if fa <= fb else (fb, fa)
    if a < 0.0 < b:
        hi = f.critical_value
    return lo, hi


def push_interval(f, interval, steps: int) -> tuple[float, float]:
    for _ in range(steps):
        interval = interval_image(f, interval)
    return interval


def find_periodic_point(f, period: int, bracket,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """Fixed point of f^(period) on a sign-changing bracket, by bisection."""
    check_map_like(f)
    check_int(period, "period", minimum=1)
    lo, hi = check_interval(bracket, "bracket")
    root = bisect_residual(lambda x: iterate(f, x, period) - x, lo, hi,
                           tol.bisect_iters, tol.eps_root,
                           what=f"period-{period} point")
    return float(root)


def _periodic_points(f, n: int, tol: Tolerances) -> list[float]:
    """All transversal fixed points of f^(n) in (0, 1), descending."""
    xs = np.linspace(0.0, 1.0, tol.scan_points)[1:-1]
    ys = xs.copy()
    for _ in range(n):
        ys = f(ys)
    brackets = sign_change_brackets(xs, ys - xs)
    roots = []
    for lo, hi in brackets:
        if lo == hi:
            roots.append(float(lo))
        else:
            roots.append(float(bisect(lambda x: iterate(f, x, n) - x,
                                      float(lo), float(hi), tol.bisect_iters)))
    roots = dedupe_sorted(sorted(roots), 1e-9)
    return sorted(roots, reverse=True)


@dataclass(frozen=True)
class Renormalizability:
    """Certificate produced by detect_renormalization."""

    n: int
    radius: float               # J = [-radius, radius] in the map's own coords
    orientation: str            # "min" or "max" of f^n at 0
    crit_image: float           # f^n(0)

    @property
    def J(self) -> tuple[float, float]:
        return (-self.radius, self.radius)


def detect_renormalization(f, max_n: int,
                           tol: Tolerances = DEFAULT_TOL) -> Optional[Renormalizability]:
    """Smallest return time n <= max_n with a valid restricted interval.

    A candidate radius p must be a fixed point of f^n in (0, 1) whose
    interval J = [-p, p] has pairwise interior-disjoint images for the
    first n iterates, returns into itself at step n, and carries a critical
    image f^n(0) <= 0 so that the flip rescale lands back in the normal
    form.  Among candidates for one n the largest p wins.
    """
    check_map_like(f)
    check_int(max_n, "max_n", minimum=2)
    eps = tol.eps_ren
    for n in range(2, max_n + 1):
        for p in _periodic_points(f, n, tol):
            intervals = [(-p, p)]
            for _ in range(n - 1):
                intervals.append(interval_image(f, intervals[-1]))
            by_pos = sorted(intervals)
            if any(by_pos[i][1] > by_pos[i + 1][0] + eps
                   for i in range(len(by_pos) - 1)):
                continue
            ret = interval_image(f, intervals[-1])
            if ret[0] < -p - eps or ret[1] > p + eps:
                continue
            v = float(iterate(f, 0.0, n))
            if v > eps:
                continue
            orientation = "min" if v < p else "max"
            return Renormalizability(n=n, radius=p, orientation=orientation,
                                     crit_image=v)
    return None


def renormalize(f, n: int, radius: float, orientation: str = "min",
                tol: Tolerances = DEFAULT_TOL) -> tuple[RescaledIterate, float]:
    """Rescale the first-return map on [-radius, radius] back to [-1, 1].

    Returns (f_next, alpha_slope).  The slope sign restores the maximum at
    0; a critical value <= 0 after rescaling raises NormalizationError
    (boundary=True when it vanishes to tolerance: the map was exactly once
    more renormalizable).
    """
    check_map_like(f)
    if not 0.0 < radius < 1.0:
        raise ParameterError(f"radius must be in (0, 1), got {radius}")
    slope = (-1.0 if orientation == "min" else 1.0) / radius
    base, m, scale = _unwrap(f)
    candidate = RescaledIterate(base, m * n, slope * scale)
    c1 = candidate.critical_value
    if c1 <= 0.0:
        raise NormalizationError(
            f"renormalized critical value {c1} <= 0", c1,
            boundary=abs(c1) <= tol.eps_ren)
    if c1 > 1.0 + tol.eps_ren:
        raise NormalizationError(
            f"renormalized critical value {c1} > 1", c1, boundary=False)
    end = candidate(1.0)
    if abs(end + 1.0) > tol.eps_ren:
        raise NormalizationError(
            f"renormalized endpoint value {end} != -1; "
            "J was not a valid restricted interval", c1, boundary=False)
    return candidate, slope


@dataclass(frozen=True)
class RenormLevel:
    k: int
    n: int                       # return time n_k
    m: int                       # cumulative period m_k
    radius_local: float          # J_k = [-p, p] in f_{k-1} coordinates
    alpha_slope: float           # signed, |slope| = 2/|J_k|
    scale: float                 # cumulative S_k
    f: RescaledIterate           # the renormalization f_k
    c1: float                    # f_k(0)
    orientation: str
    shuffle: tuple[int, ...]     # spatial order of base-coord cycle intervals
    p_residual: float            # |f^(m_k)(p_k) - p_k| in base coordinates

    @property
    def J(self) -> tuple[float, float]:
        return (-self.radius_local, self.radius_local)


@dataclass(frozen=True)
class RenormTower:
    base: UnimodalMap
    levels: tuple[RenormLevel, ...]
    p_points: tuple[float, ...]          # signed periodic endpoints, base coords
    truncated: Optional[str] = None      # reason, when depth fell short
    tol: Tolerances = field(default=DEFAULT_TOL, compare=False, repr=False)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def radius(self, k: int) -> float:
        """Half-length of I_k; r_0 = 1."""
        if k == 0:
            return 1.0
        return 1.0 / abs(self.levels[k - 1].scale)

    def interval(self, k: int) -> tuple[float, float]:
        r = self.radius(k)
        return (-r, r)

    def m(self, k: int) -> int:
        """Cumulative period m_k, with m_0 = 1."""
        if k == 0:
            return 1
        return self.levels[k - 1].m

    @property
    def return_times(self) -> tuple[int, ...]:
        return tuple(level.n for level in self.levels)

    def scaling_ratios(self) -> list[float]:
        """|I_k| / |I_{k-1}| for k = 1..depth."""
        return [self.radius(k) / self.radius(k - 1) for k in range(1, self.depth + 1)]

    def cycle_intervals(self, k: int, count: Optional[int] = None) -> list[tuple[float, float]]:
        """Base-coordinate cycle intervals (f^(m_{k-1}))^j (I_k), j = 0..count."""
        if count is None:
            count = self.levels[k - 1].n
        step = self.m(k - 1)
        out = [self.interval(k)]
        for _ in range(count):
            out.append(push_interval(self.base, out[-1], step))
        return out

    def validate(self) -> None:
        """Re-check the tower invariants; raises on violation."""
        eps = self.tol.eps_ren
        for idx, level in enumerate(self.levels):
            k = idx + 1
            r_k, r_prev = self.radius(k), self.radius(k - 1)
            if not r_k < r_prev - eps:
                raise NotRenormalizableError(k, "nesting failure")
            if abs(abs(level.alpha_slope) - 1.0 / level.radius_local) > 1e-9:
                raise NotRenormalizableError(k, "slope/radius mismatch")
            if not 0.0 < level.c1 <= 1.0 + eps:
                raise NotRenormalizableError(k, f"c1(f_k) = {level.c1}")
            if level.p_residual > 1e-8:
                raise ConvergenceError(
                    f"periodic endpoint residual {level.p_residual} at level {k}",
                    residual=level.p_residual)
            p = self.p_points[idx]
            x = p
            for _ in range(level.m):
                if abs(x) < r_k - eps:
                    raise NotRenormalizableError(
                        k, "orbit of p_k enters the interior of I_k")
                x = self.base(x)


def build_tower(f: UnimodalMap, depth: int, max_return_time: int,
                tol: Tolerances = DEFAULT_TOL,
                on_failure: str = "raise") -> RenormTower:
    """Renormalize ``depth`` times, tracking everything in base coordinates.

    Detection or normalization failure at level k raises
    NotRenormalizableError(k) unless on_failure="truncate", which returns
    the partial tower with a reason.  A conditioning guard (|I_k| below the
    eps_cond floor) always truncates.
    """
    check_map_like(f)
    check_int(depth, "depth", minimum=1)
    check_int(max_return_time, "max_return_time", minimum=2)
    if on_failure not in ("raise", "truncate"):
        raise ParameterError("on_failure must be 'raise' or 'truncate'")

    levels: list[RenormLevel] = []
    p_points: list[float] = []
    truncated = None
    current = f
    scale_prev = 1.0
    m_prev = 1
    tower_stub = None

    for k in range(1, depth + 1):
        det = detect_renormalization(current, max_return_time, tol)
        if det is None:
            if on_failure == "raise":
                raise NotRenormalizableError(k, "no restricted interval found")
            truncated = f"no restricted interval at level {k}"
            break
        try:
            f_next, slope = renormalize(current, det.n, det.radius,
                                        det.orientation, tol)
        except NormalizationError as exc:
            if on_failure == "raise":
                raise NotRenormalizableError(k, str(exc)) from exc
            truncated = f"normalization failure at level {k}: {exc}"
            break

        m_k = m_prev * det.n
        p_base = det.radius / scale_prev
        residual = abs(iterate(f, p_base, m_k) - p_base)
        level = RenormLevel(
            k=k, n=det.n, m=m_k, radius_local=det.radius, alpha_slope=slope,
            scale=f_next.scale, f=f_next, c1=f_next.critical_value,
            orientation=det.orientation, shuffle=(), p_residual=residual)
        levels.append(level)
        p_points.append(p_base)

        # shuffle needs the partial tower for base-coordinate cycle intervals
        tower_stub = RenormTower(base=f, levels=tuple(levels),
                                 p_points=tuple(p_points), tol=tol)
        cyc = tower_stub.cycle_intervals(k, det.n - 1)
        order = tuple(int(j) for j in np.argsort([iv[0] for iv in cyc]))
        levels[-1] = replace(level, shuffle=order)

        r_k = 1.0 / abs(f_next.scale)
        if 2.0 * r_k < max(tol.eps_cond, 1e3 * np.finfo(float).eps):
            truncated = f"conditioning guard at level {k} (|I_k| = {2 * r_k})"
            break
        current = f_next
        scale_prev = f_next.scale
        m_prev = m_k

    if not levels:
        raise NotRenormalizableError(1, truncated or "no levels built")
    return RenormTower(base=f, levels=tuple(levels), p_points=tuple(p_points),
                       truncated=truncated, tol=tol)


# -- parameter tuning ------------------------------------------------------


def _critical_iterate_in_c(t: float, cs: np.ndarray, m: int) -> np.ndarray:
    """f_c^(m)(0) for an array of affine-family parameters c."""
    x = np.zeros_like(cs)
    for _ in range(m):
        x = cs - (1.0 + cs) * np.abs(x) ** t
    return x


def _theta(t: float, c: float, m: int) -> float:
    x = 0.0
    for _ in range(m):
        x = c - (1.0 + c) * abs(x) ** t
    return x


def _bisect_theta(t: float, lo: float, hi: float, m: int,
                  tol: Tolerances) -> float:
    root = bisect(lambda c: _theta(t, c, m), lo, hi, tol.bisect_iters)
    res = abs(_theta(t, root, m))
    if res > 1e-10:
        raise ConvergenceError(
            f"superstable parameter residual {res:.3e}", residual=res)
    return root


def superstable_cascade(t: float, n: int, depth: int,
                        tol: Tolerances = DEFAULT_TOL) -> list[float]:
    """Parameters c_k with f_c^(n^k)(0) = 0 along the constant-n cascade.

    c_1 is the first zero of c -> f_c^(n)(0) whose detected return time is
    n; each further c_{k+1} is the first zero of the n^{k+1}-th critical
    iterate above c_k, excluding parameters where a shallower iterate
    already vanishes.
    """
    params: list[float] = []
    if n == 2:
        # f^2(0) = f(c) has a single zero: (1+c) c^(t-1) = 1
        params.append(_bisect_theta(t, 1e-9, 1.0, 2, tol))
    else:
        xs = np.arange(0.5, 1.0, 1e-4)
        ys = _critical_iterate_in_c(t, xs, n)
        found = None
        for lo, hi in sign_change_brackets(xs, ys):
            c = _bisect_theta(t, lo, hi, n, tol) if lo != hi else lo
            fmap = make_affine_family(t, c, tol=tol)
            det = detect_renormalization(fmap, n, tol)
            if det is not None and det.n == n:
                found = c
                break
        if found is None:
            raise TuningError(f"no period-{n} superstable parameter found", 0)
        params.append(found)

    gap = (1.0 - params[0]) / 2.0
    for k in range(1, depth):
        m_next = n ** (k + 1)
        start = params[-1] + max(1e-9, gap * 2.0 ** -8)
        step = gap / 32.0
        c_prev = start
        v_prev = _theta(t, c_prev, m_next)
        root = None
        while root is None:
            c_next = c_prev + step
            if c_next >= 1.0:
                raise TuningError(
                    f"cascade scan left (0, 1) at depth {k + 1}", k)
            v_next = _theta(t, c_next, m_next)
            if v_next == 0.0 or (v_prev > 0) != (v_next > 0):
                cand = _bisect_theta(t, c_prev, c_next, m_next, tol)
                shallow = min(abs(_theta(t, cand, n ** j))
                              for j in range(1, k + 1))
                if shallow > 1e-6:
                    root = cand
                else:
                    c_prev, v_prev = c_next, v_next
            else:
                c_prev, v_prev = c_next, v_next
        gap = root - params[-1]
        params.append(root)
    return params


def _aitken(a: float, b: float, c: float) -> float:
    denom = (c - b) - (b - a)
    if denom == 0.0:
        return c
    return c - (c - b) ** 2 / denom


def _verify_target(t: float, c: float, target: Sequence[int],
                   tol: Tolerances, full_depth: bool) -> bool:
    fmap = make_affine_family(t, c, tol=tol)
    max_n = max(target)
    current = fmap
    levels = len(target) if full_depth else len(target) - 1
    for j in range(levels):
        det = detect_renormalization(current, max_n, tol)
        if det is None or det.n != target[j]:
            return False
        try:
            current, _ = renormalize(current, det.n, det.radius,
                                     det.orientation, tol)
        except NormalizationError:
            return False
    if not full_depth:
        det = detect_renormalization(current, max_n, tol)
        if det is None or det.n != target[-1]:
            return False
    return True


def tune_parameter(t: float, target: Sequence[int],
                   tol: Tolerances = DEFAULT_TOL) -> float:
    """Affine-family parameter c whose tower realizes the target return times.

    Constant targets (n, n, ..., n) go through the superstable cascade:
    for depth <= 2 the superstable parameter itself is returned, deeper
    targets return the Aitken extrapolation of the last three cascade
    parameters (a point past c_K toward the accumulation).  Mixed targets
    are best-effort: the scan looks for a superstable parameter of the
    composite period whose tower verifies.
    """
    t = check_exponent(t)
    target = tuple(check_int(n, "return time", minimum=2) for n in target)
    if not target:
        raise ParameterError("target must contain at least one return time")
    depth = len(target)

    if len(set(target)) == 1:
        n = target[0]
        params = superstable_cascade(t, n, depth, tol)
        if depth <= 2:
            c = params[-1]
        else:
            c = _aitken(*params[-3:])
            if not params[-1] < c < 1.0:
                c = params[-1] + (params[-1] - params[-2]) * 0.25
        if not _verify_target(t, c, target, tol, full_depth=depth >= 3):
            raise TuningError(
                f"verification failed for constant target {target} at c={c}",
                depth_reached=depth - 1)
        return float(c)

    # mixed type, best effort: superstable of the composite period
    m_total = 1
    for n in target:
        m_total *= n
    xs = np.arange(0.5, 1.0, 1e-4)
    ys = _critical_iterate_in_c(t, xs, m_total)
    deepest = 0
    for lo, hi in sign_change_brackets(xs, ys):
        try:
            c = _bisect_theta(t, lo, hi, m_total, tol) if lo != hi else lo
        except ConvergenceError:
            continue
        if _verify_target(t, c, target, tol, full_depth=False):
            return float(c)
        fmap = make_affine_family(t, c, tol=tol)
        try:
            tower = build_tower(fmap, depth, max(target), tol, on_failure="truncate")
            match = 0
            for lvl, n in zip(tower.return_times, target):
                if lvl != n:
                    break
                match += 1
            deepest = max(deepest, match)
        except NotRenormalizableError:
            pass
    raise TuningError(f"no parameter found for target {target}", deepest)
