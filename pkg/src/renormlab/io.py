"""Deterministic CSV/JSON artifact writers.

Floats are rendered with repr (shortest round-trip), rows keep fixed
order, files are written via temp-file + rename so failures leave no
partial artifacts.  JSON objects carry "schema": "renorm-lab/1".
"""

from __future__ import annotations

import json
import math
import os
import tempfile

from .conjugacy import ConjugacyMesh, QsModulusTable
from .distortion import DistortionReport
from .partition import BranchWord, MarkovPartition
from .renorm import RenormTower

SCHEMA = "renorm-lab/1"


def fmt(x) -> str:
    return repr(float(x))


def _json_safe(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-renormlab-")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2) + "\n")


# -- tower -------------------------------------------------------------------


def tower_json(tower: RenormTower) -> dict:
    levels = []
    for level in tower.levels:
        k = level.k
        levels.append({
            "k": k,
            "n_k": level.n,
            "m_k": level.m,
            "J_k": list(level.J),
            "I_k": list(tower.interval(k)),
            "p_k": tower.p_points[k - 1],
            "alpha_slope": level.alpha_slope,
            "c1_fk": level.c1,
        })
    return {
        "schema": SCHEMA,
        "kind": "tower",
        "map": tower.base.to_descriptor(),
        "truncated": tower.truncated,
        "levels": levels,
    }


def tower_csv(tower: RenormTower) -> str:
    lines = ["k,n_k,m_k,J_left,J_right,I_left,I_right,p_k,alpha_slope,c1_fk"]
    for level in tower.levels:
        k = level.k
        i_lo, i_hi = tower.interval(k)
        lines.append(",".join([
            str(k), str(level.n), str(level.m),
            fmt(level.J[0]), fmt(level.J[1]), fmt(i_lo), fmt(i_hi),
            fmt(tower.p_points[k - 1]), fmt(level.alpha_slope), fmt(level.c1)]))
    return "\n".join(lines) + "\n"


# -- partition ---------------------------------------------------------------


def partition_csv(partition: MarkovPartition) -> str:
    lines = ["level,index,left,right,kind,iterate"]
    for e in partition.elements:
        lines.append(",".join([
            str(e.level), str(e.index), fmt(e.interval[0]), fmt(e.interval[1]),
            e.kind, str(e.iterate)]))
    return "\n".join(lines) + "\n"


def words_text(words: list[BranchWord]) -> str:
    lines = []
    for w in words:
        tag = "".join(f"({k},{i})" for k, i in w.indices)
        lines.append(f"{tag} {fmt(w.cylinder[0])} {fmt(w.cylinder[1])}")
    return "\n".join(lines) + "\n"


# -- distortion report ---------------------------------------------------------


def report_csv(report: DistortionReport) -> str:
    lines = ["LEMMA"]
    lines.append("k,m_k,c_mk,L_left,L_right,T_left,T_right,M_left,M_right,"
                 "ratio1,ratio2,c1_k,nl_sup_k")
    for r in report.lemma:
        lines.append(",".join([
            str(r.k), str(r.m_k), fmt(r.c_mk),
            fmt(r.L_k[0]), fmt(r.L_k[1]), fmt(r.T_k[0]), fmt(r.T_k[1]),
            fmt(r.M_k[0]), fmt(r.M_k[1]),
            fmt(r.ratio1), fmt(r.ratio2), fmt(r.c1_k), fmt(r.nl_sup_k)]))
    lines.append("")
    lines.append("DEF1A")
    lines.append("level,index,ratio")
    for k, i, ratio in report.def1a:
        lines.append(f"{k},{i},{fmt(ratio)}")
    lines.append("")
    lines.append("DEF1B")
    lines.append("level,index,ratio")
    for k, i, ratio in report.def1b:
        lines.append(f"{k},{i},{fmt(ratio)}")
    lines.append("")
    lines.append("DEF1C")
    lines.append("word,cylinder_length,nl_sup,value,skipped_samples")
    for row in report.def1c:
        tag = "".join(f"({k},{i})" for k, i in row.indices)
        lines.append(",".join([
            tag, fmt(row.cylinder_length), fmt(row.nl_sup), fmt(row.value),
            str(row.skipped_samples)]))
    lines.append("")
    lines.append("GAPS")
    lines.append("level,max_cycle_ratio,max_gap_ratio,max_mixed_ratio")
    for g in report.gaps:
        lines.append(",".join([
            str(g.level), fmt(g.max_cycle_ratio), fmt(g.max_gap_ratio),
            fmt(g.max_mixed_ratio)]))
    return "\n".join(lines) + "\n"


def report_json(report: DistortionReport) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "distortion-report",
        "depth": report.depth,
        "word_length": report.word_length,
        "grid": report.grid,
        "thresholds": {
            "A": _json_safe(report.thresholds.a),
            "B": _json_safe(report.thresholds.b),
            "C": _json_safe(report.thresholds.c),
        },
        "A": report.A,
        "B": report.B,
        "C": report.C,
        "empirical_c6": report.empirical_c6,
        "pass": report.passed,
        "skipped_words": [
            "".join(f"({k},{i})" for k, i in w) for w in report.skipped_words],
    }


# -- conjugacy -----------------------------------------------------------------


def mesh_csv(mesh: ConjugacyMesh) -> str:
    lines = ["x_f,x_g"]
    for xf, xg in zip(mesh.x_f, mesh.x_g):
        lines.append(f"{fmt(xf)},{fmt(xg)}")
    return "\n".join(lines) + "\n"


def qs_csv(table: QsModulusTable, inverse: bool = False) -> str:
    rows = table.inverse if inverse else table.forward
    lines = ["j,tau,max_rho,mean_rho,samples,excluded"]
    for r in rows:
        lines.append(",".join([
            str(r.j), fmt(r.tau), fmt(r.max_rho), fmt(r.mean_rho),
            str(r.samples), str(r.excluded)]))
    return "\n".join(lines) + "\n"


def qs_json(table: QsModulusTable) -> dict:
    def rows(seq):
        return [{
            "j": r.j, "tau": r.tau, "max_rho": _nan_safe(r.max_rho),
            "mean_rho": _nan_safe(r.mean_rho), "samples": r.samples,
            "excluded": r.excluded, "resolved": r.resolved,
        } for r in seq]

    return {
        "schema": SCHEMA,
        "kind": "qs-modulus",
        "j0": table.j0,
        "j1": table.j1,
        "grid": table.grid,
        "mesh_resolution": table.resolution,
        "forward": rows(table.forward),
        "inverse": rows(table.inverse),
    }


def _nan_safe(x: float):
    return None if math.isnan(x) else x
