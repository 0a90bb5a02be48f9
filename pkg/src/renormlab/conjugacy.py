"""Topological conjugacy between matched towers, and its quasisymmetry profile.

Two maps with identical return times and shuffle permutations share the
combinatorics of their partitions, so every landmark of one (cut points,
I_k endpoints, cylinder endpoints of admissible words) has a combinatorial
twin in the other.  Pairing twins gives the conjugacy H on a mesh;
between landmarks H is linear interpolation, so statistics at scales below
twice the mesh width measure the interpolant rather than H and are flagged
unresolved in the tables (they are still reported).

The quasisymmetry profile records, per dyadic scale tau = 2^-j,
rho(x, tau) = |H(x+tau) - H(x)| / |H(x) - H(x-tau)| over an equispaced
grid, excluding triples that touch the unresolved core I_K.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (AdmissibilityTransferError, CombinatoricsMismatchError,
                     ConjugacyError, ParameterError)
from .partition import MarkovPartition, admissible_words
from .renorm import RenormTower
from .validation import check_int

_PAIR_TOL = 1e-9


@dataclass(frozen=True)
class MatchCertificate:
    depth: int
    return_times: tuple[int, ...]
    shuffles: tuple[tuple[int, ...], ...]


def match_towers(tower_f: RenormTower, tower_g: RenormTower,
                 depth: Optional[int] = None) -> MatchCertificate:
    """Verify equal return times and shuffles level by level."""
    if depth is None:
        depth = min(tower_f.depth, tower_g.depth)
    check_int(depth, "depth", minimum=1)
    if tower_f.depth < depth or tower_g.depth < depth:
        raise ParameterError(
            f"towers too shallow for requested depth {depth}")
    for k in range(1, depth + 1):
        lf, lg = tower_f.levels[k - 1], tower_g.levels[k - 1]
        if lf.n != lg.n:
            raise CombinatoricsMismatchError(k, f"return times {lf.n} != {lg.n}")
        if lf.shuffle != lg.shuffle:
            raise CombinatoricsMismatchError(
                k, f"shuffles {lf.shuffle} != {lg.shuffle}")
    return MatchCertificate(
        depth=depth,
        return_times=tuple(l.n for l in tower_f.levels[:depth]),
        shuffles=tuple(l.shuffle for l in tower_f.levels[:depth]))


@dataclass(frozen=True)
class ConjugacyMesh:
    """Matched landmark pairs (x_f, x_g), sorted and strictly increasing."""

    x_f: np.ndarray
    x_g: np.ndarray
    core_f: tuple[float, float]
    core_g: tuple[float, float]
    depth: int
    word_length: int
    resolution: float            # max landmark gap outside the core

    @property
    def size(self) -> int:
        return len(self.x_f)

    def inverse(self) -> "ConjugacyMesh":
        return ConjugacyMesh(x_f=self.x_g, x_g=self.x_f, core_f=self.core_g,
                             core_g=self.core_f, depth=self.depth,
                             word_length=self.word_length,
                             resolution=float(np.max(np.diff(self.x_g))
                                              if len(self.x_g) > 1 else 2.0))

    def is_unresolved(self, x) -> np.ndarray:
        lo, hi = self.core_f
        xv = np.asarray(x, dtype=float)
        return (xv > lo) & (xv < hi)


def _landmark_table(partition: MarkovPartition, word_length: int) -> dict:
    """Combinatorial key -> coordinate for every landmark of one map."""
    tower = partition.tower
    table: dict = {("pm", -1): -1.0, ("pm", 1): 1.0}
    for k in range(1, partition.depth + 1):
        r = tower.radius(k)
        table[("I", k, -1)] = -r
        table[("I", k, 1)] = r
        for orbit_index, x in partition.cut_points.get(k, ()):
            table[("cut", k, orbit_index)] = x
    for w in admissible_words(partition, word_length):
        lo, hi = w.cylinder
        table[("word", w.indices, -1)] = lo
        table[("word", w.indices, 1)] = hi
    return table


def build_mesh(partition_f: MarkovPartition, partition_g: MarkovPartition,
               word_length: int, tol: Tolerances = DEFAULT_TOL) -> ConjugacyMesh:
    """Pair landmarks of two matched partitions by combinatorial identity."""
    check_int(word_length, "word_length", minimum=1)
    if partition_f.depth != partition_g.depth:
        raise ParameterError("partitions must have equal depth")
    match_towers(partition_f.tower, partition_g.tower, partition_f.depth)

    tf = _landmark_table(partition_f, word_length)
    tg = _landmark_table(partition_g, word_length)
    only_f = sorted(k for k in tf if k not in tg)
    only_g = sorted(k for k in tg if k not in tf)
    for missing in (only_f, only_g):
        for key in missing:
            if key[0] == "word":
                raise AdmissibilityTransferError(
                    key[1], "word admissible in one map only")
        if missing:
            raise CombinatoricsMismatchError(
                0, f"unmatched landmark keys {missing[:4]}")

    pairs = sorted((x, tg[key]) for key, x in tf.items())
    xs_f: list[float] = []
    xs_g: list[float] = []
    for xf, xg in pairs:
        if xs_f and xf - xs_f[-1] <= _PAIR_TOL:
            if abs(xg - xs_g[-1]) > tol.eps_mkv:
                raise ConjugacyError(
                    f"coincident source landmarks at {xf} map to distinct "
                    f"targets {xs_g[-1]} and {xg}")
            continue
        xs_f.append(xf)
        xs_g.append(xg)
    x_f = np.array(xs_f)
    x_g = np.array(xs_g)
    if np.any(np.diff(x_g) <= 0):
        bad = int(np.argmin(np.diff(x_g)))
        raise ConjugacyError(
            f"order-preservation fails near x_f = {x_f[bad]}")

    core_f = partition_f.core
    gaps = np.diff(x_f)
    mids = 0.5 * (x_f[:-1] + x_f[1:])
    outside = (mids <= core_f[0]) | (mids >= core_f[1])
    resolution = float(np.max(gaps[outside])) if np.any(outside) else 2.0
    return ConjugacyMesh(x_f=x_f, x_g=x_g, core_f=core_f,
                         core_g=partition_g.core, depth=partition_f.depth,
                         word_length=word_length, resolution=resolution)


def conjugacy_at(mesh: ConjugacyMesh, x):
    """H(x): exact at landmarks, linear in between, pinned at +-1."""
    xv = np.asarray(x, dtype=float)
    if xv.size and (np.min(xv) < -1.0 - 1e-9 or np.max(xv) > 1.0 + 1e-9):
        raise ParameterError("conjugacy_at needs x in [-1, 1]")
    out = np.interp(np.clip(xv, -1.0, 1.0), mesh.x_f, mesh.x_g)
    return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class QsRow:
    j: int
    tau: float
    max_rho: float
    mean_rho: float
    samples: int
    excluded: int
    resolved: bool


@dataclass(frozen=True)
class QsModulusTable:
    j0: int
    j1: int
    grid: int
    resolution: float
    forward: tuple[QsRow, ...]
    inverse: tuple[QsRow, ...]

    def row(self, j: int, inverse: bool = False) -> QsRow:
        rows = self.inverse if inverse else self.forward
        for r in rows:
            if r.j == j:
                return r
        raise KeyError(j)


def _qs_rows(mesh: ConjugacyMesh, j0: int, j1: int, grid: int) -> tuple[QsRow, ...]:
    rows = []
    lo, hi = mesh.core_f
    for j in range(j0, j1 + 1):
        tau = 2.0 ** -j
        xs = np.linspace(-1.0 + tau, 1.0 - tau, grid)
        touches_core = (xs + tau > lo) & (xs - tau < hi)
        keep = ~touches_core
        n_excluded = int(np.sum(touches_core))
        if not np.any(keep):
            rows.append(QsRow(j=j, tau=tau, max_rho=float("nan"),
                              mean_rho=float("nan"), samples=0,
                              excluded=n_excluded,
                              resolved=tau >= 2.0 * mesh.resolution))
            continue
        x = xs[keep]
        hp = conjugacy_at(mesh, x + tau)
        h0 = conjugacy_at(mesh, x)
        hm = conjugacy_at(mesh, x - tau)
        rho = (hp - h0) / (h0 - hm)
        rows.append(QsRow(j=j, tau=tau, max_rho=float(np.max(rho)),
                          mean_rho=float(np.mean(rho)), samples=int(len(x)),
                          excluded=n_excluded,
                          resolved=tau >= 2.0 * mesh.resolution))
    return tuple(rows)


def qs_modulus(mesh: ConjugacyMesh, j0: int = 3, j1: int = 8,
               grid: int = 512) -> QsModulusTable:
    """Quasisymmetry ratio table for H and H^{-1} over dyadic scales.

    Scales finer than twice the mesh width are reported but flagged
    unresolved (and a warning names them): there the ratios measure the
    interpolation, not the conjugacy.
    """
    check_int(j0, "j0", minimum=0)
    check_int(j1, "j1", minimum=j0)
    check_int(grid, "grid", minimum=8)
    forward = _qs_rows(mesh, j0, j1, grid)
    inverse = _qs_rows(mesh.inverse(), j0, j1, grid)
    unresolved = [r.j for r in forward if not r.resolved]
    if unresolved:
        warnings.warn(
            f"mesh width {mesh.resolution:.3g} leaves scales j={unresolved} "
            "unresolved; ratios there reflect the interpolant",
            RuntimeWarning, stacklevel=2)
    return QsModulusTable(j0=j0, j1=j1, grid=grid, resolution=mesh.resolution,
                          forward=forward, inverse=inverse)
