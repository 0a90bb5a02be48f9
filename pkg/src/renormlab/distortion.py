"""Per-level ratio quantities and the empirical bounded-distortion report.

The nonlinearity N(g) = g''/g' is additive under composition with
derivative weights, N(u o v) = N(u)(v) v' + N(v), so along m steps of f

    N(f^m)(z) = sum_{j<m} N(f)(z_j) (f^j)'(z),     z_j = f^j(z),

and an inverse branch g of f^m satisfies N(g)(y) = -N(f^m)(g(y)) g'(y).
For a composed branch g_w the same accumulation runs along the forward
orbit of a cylinder point u: with Phi the restriction of the iterates to
the cylinder (so g_w = Phi^{-1}),

    N(g_w)(Phi(u)) = -N(Phi)(u) / Phi'(u).

Sample grids therefore live on cylinders and are pushed forward; this is
the same point set the pullback orbit of a domain grid would visit.

All constants reported here are empirical maxima over the computed window,
never the paper-style existential bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CriticalProximityError, ParameterError
from .maps import factor_nonlinearity
from .partition import BranchWord, MarkovPartition, admissible_words, level_gaps
from .renorm import RenormTower, iterate
from .validation import check_int

_NL_GRID_POINTS = 512
_NL_DELTA = 1e-4


@dataclass(frozen=True)
class LemmaQuantities:
    """Level-k interval ratios: the return image L_k, the p_k-to-p_{k+1}
    interval T_k, its complement M_k, and the factor nonlinearity sup.

    ratio2 is NaN at k = 0 and the interval fields are NaN at the last
    level (they need p_{k+1})."""

    k: int
    m_k: int
    c_mk: float
    L_k: tuple[float, float]
    T_k: tuple[float, float]
    M_k: tuple[float, float]
    ratio1: float               # |M_k| / |I_k|
    ratio2: float               # |I_k| / |I_{k-1}|
    c1_k: float
    nl_sup_k: float


def _bounded_by(a: float, b: float) -> tuple[float, float]:
    return (a, b) if a <= b else (b, a)


def _nl_sup(f, tol: Tolerances) -> float:
    ys = np.linspace(-1.0 + _NL_DELTA, -_NL_DELTA, _NL_GRID_POINTS)
    return float(np.max(np.abs(factor_nonlinearity(f, ys))))


def lemma_quantities(tower: RenormTower,
                     partition: Optional[MarkovPartition] = None,
                     tol: Tolerances = DEFAULT_TOL) -> list[LemmaQuantities]:
    """Rows for k = 0..depth; needs depth >= 2 so the ratios exist."""
    if tower.depth < 2:
        raise ParameterError("lemma quantities need a tower of depth >= 2")
    if partition is not None and partition.tower is not tower:
        raise ParameterError("partition does not belong to the tower")
    f = tower.base
    nan = float("nan")
    rows = []
    for k in range(tower.depth + 1):
        m_k = tower.m(k)
        c_mk = float(iterate(f, 0.0, m_k))
        p_k = -1.0 if k == 0 else tower.p_points[k - 1]
        c1_k = f.critical_value if k == 0 else tower.levels[k - 1].c1
        nl = _nl_sup(f if k == 0 else tower.levels[k - 1].f, tol)
        ratio2 = nan if k == 0 else tower.radius(k) / tower.radius(k - 1)
        if k < tower.depth:
            p_next = tower.p_points[k]
            L = _bounded_by(p_k, c_mk)
            T = _bounded_by(p_k, p_next)
            M = _bounded_by(p_next, c_mk)
            r_k = tower.radius(k)
            if L[0] < -r_k - tol.eps_ren or L[1] > r_k + tol.eps_ren:
                raise ParameterError(
                    f"return image L_{k} = {L} escapes I_{k} = [-{r_k}, {r_k}]")
            ratio1 = (M[1] - M[0]) / (2.0 * r_k)
        else:
            L = T = M = (nan, nan)
            ratio1 = nan
        rows.append(LemmaQuantities(k=k, m_k=m_k, c_mk=c_mk, L_k=L, T_k=T,
                                    M_k=M, ratio1=ratio1, ratio2=ratio2,
                                    c1_k=c1_k, nl_sup_k=nl))
    return rows


# -- composed branch nonlinearity -------------------------------------------


def _forward_accumulate(partition: MarkovPartition, word: BranchWord,
                        us: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run cylinder points through the word, accumulating N and D.

    Returns (n_acc, d_acc, endpoints, ok_mask); masked-out points passed
    within eps_crit of the critical point somewhere along the orbit.
    """
    f = partition.tower.base
    eps_crit = partition.tol.eps_crit
    z = np.asarray(us, dtype=float).copy()
    n_acc = np.zeros_like(z)
    d_acc = np.ones_like(z)
    ok = np.ones(z.shape, dtype=bool)
    for key in word.indices:
        element = partition.element(key)
        for _ in range(element.iterate):
            near = np.abs(z) < eps_crit
            ok &= ~near
            safe = np.where(near, eps_crit, z)
            n_acc = n_acc + np.where(ok, f.deriv2(safe) / f.deriv(safe), 0.0) * d_acc
            d_acc = d_acc * f.deriv(safe)
            z = f(z)
    return n_acc, d_acc, z, ok


def composed_nonlinearity(partition: MarkovPartition, word: BranchWord,
                          x: float) -> float:
    """N(g_w)(x) for x in the domain of the composed inverse branch.

    The point is pulled back through the branch chain (innermost branch
    first) to the cylinder and the accumulation then runs forward.
    """
    if not word.indices:
        return 0.0
    u = float(x)
    for key in reversed(word.indices):
        element = partition.element(key)
        u = float(partition.pullback(element, np.array([u]))[0])
    n_acc, d_acc, z, ok = _forward_accumulate(partition, word, np.array([u]))
    if not ok[0]:
        raise CriticalProximityError(
            f"pullback orbit of {x} through word {word.indices} passes "
            f"within eps_crit of the critical point")
    if abs(float(z[0]) - float(x)) > 1e-7:
        raise ParameterError(
            f"{x} does not return to itself through word {word.indices}; "
            "is it inside the branch domain?")
    return float(-n_acc[0] / d_acc[0])


def branch_derivative(partition: MarkovPartition, word: BranchWord,
                      x: float) -> float:
    """g_w'(x), via the forward derivative product at u = g_w(x)."""
    u = float(x)
    for key in reversed(word.indices):
        u = float(partition.pullback(partition.element(key), np.array([u]))[0])
    _, d_acc, _, ok = _forward_accumulate(partition, word, np.array([u]))
    if not ok[0]:
        raise CriticalProximityError("orbit passes the critical point")
    return float(1.0 / d_acc[0])


# -- certification -----------------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    a: float = 100.0
    b: float = 100.0
    c: float = 1000.0


@dataclass(frozen=True)
class WordRow:
    indices: tuple[tuple[int, int], ...]
    cylinder_length: float
    nl_sup: float               # sup |N(g_w)| over the sample grid
    value: float                # nl_sup * cylinder_length
    skipped_samples: int


@dataclass(frozen=True)
class GapRow:
    level: int
    max_cycle_ratio: float      # |I_{k,j}| / |I_{k,j'}| maximum
    max_gap_ratio: float        # |G_{k,i}| / |G_{k,i'}| maximum
    max_mixed_ratio: float      # |G_{k,i}| / |I_{k,j}| both ways


@dataclass(frozen=True)
class DistortionReport:
    depth: int
    word_length: int
    grid: int
    thresholds: Thresholds
    A: float
    B: float
    C: float
    passed: bool
    lemma: tuple[LemmaQuantities, ...]
    def1a: tuple[tuple[int, int, float], ...]      # (level, i, ratio to i+1)
    def1b: tuple[tuple[int, int, float], ...]      # (level, i, |M|/|I_k|)
    def1c: tuple[WordRow, ...]
    gaps: tuple[GapRow, ...]
    skipped_words: tuple[tuple[tuple[int, int], ...], ...]
    empirical_c6: float = field(default=float("nan"))


def _symmetric_max(r: float) -> float:
    return max(r, 1.0 / r) if r > 0 else math.inf


def certify(partition: MarkovPartition, word_length: int, grid: int = 64,
            thresholds: Thresholds = Thresholds(),
            tol: Tolerances = DEFAULT_TOL) -> DistortionReport:
    """Empirical bounded-distortion certificate up to the given word length.

    (a) adjacent-element ratios, (b) element-to-core ratios, (c) the
    product sup |N(g_w)| * |D(g_w)| over all admissible words, sampled on
    an equispaced grid per cylinder, plus the Lemma-6 cycle/gap geometry.
    """
    check_int(word_length, "word_length", minimum=1)
    check_int(grid, "grid", minimum=2)
    tower = partition.tower

    def1a = []
    def1b = []
    for k in range(1, partition.depth + 1):
        row = sorted(partition.elements_at(k), key=lambda e: e.index)
        r_k = tower.radius(k)
        for e1, e2 in zip(row[:-1], row[1:]):
            def1a.append((k, e1.index, float(e1.length / e2.length)))
        for e in row:
            def1b.append((k, e.index, float(e.length / (2.0 * r_k))))

    a_max = float(max((_symmetric_max(r) for _, _, r in def1a), default=1.0))
    b_max = float(max((_symmetric_max(r) for _, _, r in def1b), default=1.0))

    words = admissible_words(partition, word_length)
    rows: list[WordRow] = []
    skipped: list[tuple[tuple[int, int], ...]] = []
    c_max = 0.0
    for w in words:
        lo, hi = w.cylinder
        length = hi - lo
        us = lo + (hi - lo) * (np.arange(grid) + 1.0) / (grid + 1.0)
        n_acc, d_acc, _, ok = _forward_accumulate(partition, w, us)
        n_ok = int(np.sum(ok))
        if n_ok == 0:
            skipped.append(w.indices)
            rows.append(WordRow(indices=w.indices, cylinder_length=length,
                                nl_sup=float("nan"), value=float("nan"),
                                skipped_samples=grid))
            continue
        vals = np.abs(-n_acc[ok] / d_acc[ok])
        sup = float(np.max(vals))
        value = float(sup * length)
        c_max = max(c_max, value)
        rows.append(WordRow(indices=w.indices, cylinder_length=float(length),
                            nl_sup=sup, value=value,
                            skipped_samples=grid - n_ok))

    gap_rows = []
    c6 = 0.0
    for k in range(1, partition.depth + 1):
        lg = level_gaps(tower, k, tol)
        n_k = tower.levels[k - 1].n
        cyc = [hi - lo for lo, hi in lg.cycle[:n_k]]
        gp = [hi - lo for lo, hi in lg.gaps]
        mc = float(max((_symmetric_max(a / b) for a in cyc for b in cyc), default=1.0))
        mg = float(max((_symmetric_max(a / b) for a in gp for b in gp), default=1.0))
        mm = float(max((_symmetric_max(g / i) for g in gp for i in cyc), default=1.0))
        gap_rows.append(GapRow(level=k, max_cycle_ratio=mc, max_gap_ratio=mg,
                               max_mixed_ratio=mm))
        c6 = max(c6, mc, mg, mm)

    passed = bool(a_max <= thresholds.a and b_max <= thresholds.b
                  and c_max <= thresholds.c)
    return DistortionReport(
        depth=partition.depth, word_length=word_length, grid=grid,
        thresholds=thresholds, A=a_max, B=b_max, C=c_max, passed=passed,
        lemma=tuple(lemma_quantities(tower, partition, tol)),
        def1a=tuple(def1a), def1b=tuple(def1b), def1c=tuple(rows),
        gaps=tuple(gap_rows), skipped_words=tuple(skipped),
        empirical_c6=c6)
