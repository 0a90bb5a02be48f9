"""Partition of [-1, 1] induced by a renormalization tower.

Level k contributes the connected components of
I_{k-1} minus (orbit cut points of p_k, union, interior of I_k); the
induced Markov map F applies f^(m_{k-1}) on level-k components, so F = f
on level 1, f^(n_1) on level 2, and so on.  Component images then land on
partition landmarks, which is the checkable Markov property.

Elements are stored as closed intervals; membership queries resolve by
open interiors and reject points within eps_cond of a boundary (cut points
carry branch ambiguity).  Everything deeper than the last computed level
is represented by the core interval I_K alone.
"""

from __future__ import annotations

import bisect as _bisect
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (BranchRangeError, DegenerateComponentError,
                     ParameterError, PartitionError, UnresolvedPointError)
from .numerics import bisect_monotone_vec, dedupe_sorted
from .renorm import RenormTower, push_interval
from .validation import check_int

_MONOTONE_SAMPLES = 17


@dataclass(frozen=True)
class PartitionElement:
    level: int
    index: int                       # 1-based, left to right within the level
    interval: tuple[float, float]
    iterate: int                     # m_{k-1}: the power of f that F applies
    kind: str                        # "gap" or "cycle+gap"
    image: tuple[float, float]       # F(interval)
    increasing: bool                 # orientation of F on the element

    @property
    def key(self) -> tuple[int, int]:
        return (self.level, self.index)

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]


@dataclass(frozen=True)
class LevelGaps:
    """Cycle intervals I_{k,j} = (f^(m_{k-1}))^j (I_k), j = 0..n_k, and the
    gaps: components of I_{k-1} minus their union."""

    level: int
    cycle: tuple[tuple[float, float], ...]
    gaps: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class BranchWord:
    """Admissible branch itinerary with its cylinder.

    The cylinder D(g_w) is the interval of points in the first element
    whose F-itinerary follows the word: the last element's interval pulled
    back through the branch chain.  It equals the range of the composed
    inverse branch g_w = g_{i0} o ... o g_{i(l-1)}.
    """

    indices: tuple[tuple[int, int], ...]
    cylinder: tuple[float, float]

    def __len__(self) -> int:
        return len(self.indices)


class MarkovPartition:
    """Partition elements for tower levels 1..depth plus the core I_depth."""

    def __init__(self, tower: RenormTower, depth: int,
                 elements: Sequence[PartitionElement],
                 cut_points: dict[int, list[tuple[int, float]]],
                 tol: Tolerances = DEFAULT_TOL):
        self.tower = tower
        self.depth = depth
        self.elements = tuple(elements)
        self.cut_points = cut_points
        self.tol = tol
        self.core = tower.interval(depth)
        self._by_key = {e.key: e for e in self.elements}
        self._sorted = sorted(self.elements, key=lambda e: e.interval[0])
        self._lefts = [e.interval[0] for e in self._sorted]

    def element(self, key: tuple[int, int]) -> PartitionElement:
        try:
            return self._by_key[tuple(key)]
        except KeyError:
            raise ParameterError(f"no partition element {key}") from None

    def elements_at(self, level: int) -> list[PartitionElement]:
        return [e for e in self.elements if e.level == level]

    def landmarks(self) -> np.ndarray:
        """Sorted cut points, I_k endpoints and +-1 (alignment targets)."""
        pts = [-1.0, 1.0]
        for k in range(1, self.depth + 1):
            r = self.tower.radius(k)
            pts.extend((-r, r))
            pts.extend(x for _, x in self.cut_points.get(k, ()))
        return np.array(sorted(pts))

    def locate(self, x: float) -> PartitionElement:
        """Element whose open interior contains x (eps_cond margin)."""
        x = float(x)
        eps = self.tol.eps_cond
        lo, hi = self.core
        if lo + eps <= x <= hi - eps:
            raise UnresolvedPointError(
                f"{x} lies inside the unresolved core I_{self.depth}")
        pos = _bisect.bisect_right(self._lefts, x) - 1
        for idx in (pos, pos + 1):
            if 0 <= idx < len(self._sorted):
                e = self._sorted[idx]
                a, b = e.interval
                if a + eps < x < b - eps:
                    return e
        raise UnresolvedPointError(
            f"{x} is not interior to any partition element")

    # -- induced map -----------------------------------------------------

    def induced_vec(self, element: PartitionElement, xs: np.ndarray) -> np.ndarray:
        ys = np.asarray(xs, dtype=float).copy()
        for _ in range(element.iterate):
            ys = self.tower.base(ys)
        return ys

    def pullback(self, element: PartitionElement, ys) -> np.ndarray:
        """Inverse branch g = (F|element)^{-1} applied to an array of values."""
        ys = np.asarray(ys, dtype=float)
        lo, hi = element.image
        slack = self.tol.eps_mkv
        if ys.size and (np.min(ys) < lo - slack or np.max(ys) > hi + slack):
            raise BranchRangeError(
                f"values outside F(M) = [{lo}, {hi}] for element {element.key}")
        targets = np.clip(ys, lo, hi)
        a, b = element.interval
        xs = bisect_monotone_vec(lambda u: self.induced_vec(element, u),
                                 targets, a, b, element.increasing, iters=100)
        return xs


def level_gaps(tower: RenormTower, k: int, tol: Tolerances = DEFAULT_TOL) -> LevelGaps:
    """Cycle intervals and gaps of level k, in base coordinates."""
    check_int(k, "k", minimum=1, maximum=tower.depth)
    n_k = tower.levels[k - 1].n
    cycle = tower.cycle_intervals(k, n_k)
    lo0, hi0 = tower.interval(k - 1)
    events = sorted((max(a, lo0), min(b, hi0)) for a, b in cycle)
    gaps = []
    cursor = lo0
    for a, b in events:
        if a - cursor > tol.eps_cond:
            gaps.append((cursor, a))
        cursor = max(cursor, b)
    if hi0 - cursor > tol.eps_cond:
        gaps.append((cursor, hi0))
    return LevelGaps(level=k, cycle=tuple(cycle), gaps=tuple(gaps))


def _orbit_cuts(tower: RenormTower, k: int,
                tol: Tolerances) -> list[tuple[int, float]]:
    """Orbit of p_k intersected with I_{k-1}, with first-arrival indices."""
    p = tower.p_points[k - 1]
    m_k = tower.m(k)
    r_prev = tower.radius(k - 1)
    pts: list[tuple[int, float]] = []
    x = p
    for i in range(m_k):
        if abs(x) <= r_prev + tol.eps_ren:
            if all(abs(x - y) > 1e-10 for _, y in pts):
                pts.append((i, x))
        x = tower.base(x)
    return sorted(pts, key=lambda ix: ix[1])


def _classify(interval: tuple[float, float], gaps: LevelGaps,
              tol: Tolerances) -> str:
    a, b = interval
    for lo, hi in gaps.cycle:
        if hi - lo > tol.eps_cond and a - tol.eps_mkv <= lo and hi <= b + tol.eps_mkv:
            return "cycle+gap"
    return "gap"


def build_partition(tower: RenormTower, depth: Optional[int] = None,
                    tol: Tolerances = DEFAULT_TOL) -> MarkovPartition:
    """Cut each annulus I_{k-1} minus int(I_k) at the orbit points of p_k."""
    if depth is None:
        depth = tower.depth
    check_int(depth, "depth", minimum=1, maximum=tower.depth)

    elements: list[PartitionElement] = []
    cut_points: dict[int, list[tuple[int, float]]] = {}
    base = tower.base
    for k in range(1, depth + 1):
        cuts = _orbit_cuts(tower, k, tol)
        cut_points[k] = cuts
        r_prev, r_k = tower.radius(k - 1), tower.radius(k)
        m_prev = tower.m(k - 1)
        n_k = tower.levels[k - 1].n
        gaps = level_gaps(tower, k, tol)

        pieces: list[tuple[float, float]] = []
        for seg_lo, seg_hi in ((-r_prev, -r_k), (r_k, r_prev)):
            inner = [x for _, x in cuts if seg_lo + 1e-10 < x < seg_hi - 1e-10]
            marks = dedupe_sorted(sorted([seg_lo, *inner, seg_hi]), 1e-12)
            for a, b in zip(marks[:-1], marks[1:]):
                if b - a < tol.eps_cond:
                    raise DegenerateComponentError(
                        f"component [{a}, {b}] at level {k} shorter than eps_cond")
                pieces.append((a, b))

        pieces.sort()
        if len(pieces) > n_k + 1:
            raise PartitionError(
                f"{len(pieces)} components at level {k}, expected <= {n_k + 1}")
        for i, piece in enumerate(pieces, start=1):
            image = push_interval(base, piece, m_prev)
            a, b = piece
            xs = np.linspace(a, b, _MONOTONE_SAMPLES)
            ys = xs.copy()
            for _ in range(m_prev):
                ys = base(ys)
            d = np.diff(ys)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise PartitionError(
                    f"induced map not monotone on element ({k}, {i})")
            elements.append(PartitionElement(
                level=k, index=i, interval=piece, iterate=m_prev,
                kind=_classify(piece, gaps, tol), image=image,
                increasing=bool(d[0] > 0)))

    return MarkovPartition(tower, depth, elements, cut_points, tol)


def induced_eval(partition: MarkovPartition, x: float) -> tuple[float, PartitionElement]:
    """F(x) together with the element providing the iterate."""
    element = partition.locate(x)
    y = float(x)
    for _ in range(element.iterate):
        y = partition.tower.base(y)
    return y, element


def branch_inverse(partition: MarkovPartition, key: tuple[int, int], y: float) -> float:
    """Monotone inverse of F restricted to one element, by bisection."""
    element = key if isinstance(key, PartitionElement) else partition.element(key)
    x = float(partition.pullback(element, np.array([float(y)]))[0])
    fy = float(partition.induced_vec(element, np.array([x]))[0])
    if abs(fy - float(y)) > 1e-8:
        raise BranchRangeError(
            f"branch inverse residual {abs(fy - y):.3e} for element "
            f"{element.key}; y may be outside F(M)")
    return x


def admissible_words(partition: MarkovPartition, max_length: int) -> list[BranchWord]:
    """All admissible words of length <= max_length, lexicographic order.

    Words grow by prepending: (e, w) is admissible when the first element
    of w is contained in F(e)'s image (eps_mkv slack).  The new cylinder is
    the pullback of w's cylinder through e's branch; pullbacks are batched
    per element.
    """
    check_int(max_length, "max_length", minimum=1)
    eps = partition.tol.eps_mkv
    elements = sorted(partition.elements, key=lambda e: e.key)
    succ: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for e in elements:
        lo, hi = e.image
        succ[e.key] = {
            e2.key for e2 in elements
            if lo - eps <= e2.interval[0] and e2.interval[1] <= hi + eps}

    words: list[BranchWord] = [
        BranchWord(indices=(e.key,), cylinder=e.interval) for e in elements]
    current = list(words)
    for _ in range(max_length - 1):
        nxt: list[BranchWord] = []
        for e in elements:
            allowed = succ[e.key]
            children = [w for w in current if w.indices[0] in allowed]
            if not children:
                continue
            ys = np.array([y for w in children for y in w.cylinder])
            xs = partition.pullback(e, ys)
            for j, w in enumerate(children):
                a, b = sorted((float(xs[2 * j]), float(xs[2 * j + 1])))
                nxt.append(BranchWord(indices=(e.key,) + w.indices,
                                      cylinder=(a, b)))
        current = nxt
        words.extend(nxt)
        if not nxt:
            break
    words.sort(key=lambda w: w.indices)
    return words
