"""Batch front end: tune | tower | partition | certify | conjugate.

Parameters come from an optional --config JSON file plus flags; flags win.
Exit codes: 0 ok, 1 usage/config error, 2 computation error (the error is
reported as JSON on stderr).  All outputs are written atomically and are
byte-identical across reruns of the same configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io as artifacts
from .config import MAX_DEPTH_CAP, MAX_WORD_LENGTH_CAP
from .conjugacy import build_mesh, qs_modulus
from .distortion import Thresholds, certify
from .errors import ParameterError, RenormLabError
from .maps import map_from_descriptor
from .partition import admissible_words, build_partition
from .renorm import build_tower, tune_parameter
from .validation import check_int


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _load_config(path: str | None, command: str) -> dict:
    if not path:
        return {}
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError("config must be a JSON object")
    if command in cfg and isinstance(cfg[command], dict):
        cfg = cfg[command]
    return cfg


def _merge(args: argparse.Namespace, cfg: dict, names: list[str]) -> dict:
    """Config file values fill in flags the user left at None."""
    merged = {}
    for name in names:
        flag = getattr(args, name, None)
        merged[name] = flag if flag is not None else cfg.get(name)
    return merged


def _parse_map(spec: str) -> dict:
    if spec is None:
        raise ParameterError("a map descriptor is required (--map)")
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec) as handle:
                text = handle.read()
        except OSError as exc:
            raise ParameterError(f"cannot read map file {spec}: {exc}") from exc
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"bad map descriptor JSON: {exc}") from exc
    return desc


def _check_caps(depth: int | None = None, word_length: int | None = None):
    if depth is not None:
        check_int(depth, "depth", minimum=1, maximum=MAX_DEPTH_CAP)
    if word_length is not None:
        check_int(word_length, "word length", minimum=1,
                  maximum=MAX_WORD_LENGTH_CAP)


def _cmd_tune(args) -> int:
    cfg = _load_config(args.config, "tune")
    p = _merge(args, cfg, ["t", "type", "n", "depth", "target", "out"])
    t = p["t"] if p["t"] is not None else 2.0
    if p["target"]:
        target = tuple(int(s) for s in str(p["target"]).split(","))
    else:
        kind = p["type"] or "doubling"
        depth = int(p["depth"] if p["depth"] is not None else 1)
        if kind == "doubling":
            target = (2,) * depth
        elif kind == "constant":
            if p["n"] is None:
                raise ParameterError("--type constant needs --n")
            target = (int(p["n"]),) * depth
        else:
            raise ParameterError(f"unknown tuning type {kind!r}")
    _check_caps(depth=len(target))
    c = tune_parameter(float(t), target)
    print(f"{c:.12f}")
    if p["out"]:
        artifacts.write_json_atomic(p["out"], {
            "schema": artifacts.SCHEMA, "kind": "map", "t": float(t), "c": c,
            "label": f"tuned target {','.join(str(n) for n in target)}"})
    return 0


def _tower_from(p: dict):
    desc = _parse_map(p["map"])
    depth = int(p["depth"] if p["depth"] is not None else 6)
    max_n = int(p["max_n"] if p["max_n"] is not None else 8)
    _check_caps(depth=depth)
    fmap = map_from_descriptor(desc)
    return build_tower(fmap, depth, max_n)


def _cmd_tower(args) -> int:
    cfg = _load_config(args.config, "tower")
    p = _merge(args, cfg, ["map", "depth", "max_n", "json", "csv"])
    tower = _tower_from(p)
    if p["json"]:
        artifacts.write_json_atomic(p["json"], artifacts.tower_json(tower))
    if p["csv"]:
        artifacts.write_text_atomic(p["csv"], artifacts.tower_csv(tower))
    if not p["json"] and not p["csv"]:
        print(json.dumps(artifacts.tower_json(tower), indent=2))
    return 0


def _cmd_partition(args) -> int:
    cfg = _load_config(args.config, "partition")
    p = _merge(args, cfg, ["map", "depth", "max_n", "csv", "words",
                           "word_length"])
    tower = _tower_from(p)
    partition = build_partition(tower)
    if p["csv"]:
        artifacts.write_text_atomic(p["csv"], artifacts.partition_csv(partition))
    else:
        print(artifacts.partition_csv(partition), end="")
    if p["words"]:
        length = int(p["word_length"] if p["word_length"] is not None else 3)
        _check_caps(word_length=length)
        words = admissible_words(partition, length)
        artifacts.write_text_atomic(p["words"], artifacts.words_text(words))
    return 0


def _cmd_certify(args) -> int:
    cfg = _load_config(args.config, "certify")
    p = _merge(args, cfg, ["map", "depth", "max_n", "word_length", "grid",
                           "threshold_a", "threshold_b", "threshold_c",
                           "csv", "json"])
    tower = _tower_from(p)
    partition = build_partition(tower)
    length = int(p["word_length"] if p["word_length"] is not None else 4)
    grid = int(p["grid"] if p["grid"] is not None else 64)
    _check_caps(word_length=length)
    thresholds = Thresholds(
        a=float(p["threshold_a"] if p["threshold_a"] is not None else 100.0),
        b=float(p["threshold_b"] if p["threshold_b"] is not None else 100.0),
        c=float(p["threshold_c"] if p["threshold_c"] is not None else 1000.0))
    report = certify(partition, length, grid, thresholds)
    if p["csv"]:
        artifacts.write_text_atomic(p["csv"], artifacts.report_csv(report))
    if p["json"]:
        artifacts.write_json_atomic(p["json"], artifacts.report_json(report))
    if not p["csv"] and not p["json"]:
        print(json.dumps(artifacts.report_json(report), indent=2))
    return 0 if report.passed else 2


def _cmd_conjugate(args) -> int:
    cfg = _load_config(args.config, "conjugate")
    p = _merge(args, cfg, ["map", "map2", "depth", "max_n", "word_length",
                           "j0", "j1", "grid", "mesh_csv", "qs_csv",
                           "qs_inverse_csv", "json"])
    if p["map2"] is None:
        raise ParameterError("conjugate needs --map and --map2")
    depth = int(p["depth"] if p["depth"] is not None else 5)
    max_n = int(p["max_n"] if p["max_n"] is not None else 8)
    length = int(p["word_length"] if p["word_length"] is not None else 4)
    _check_caps(depth=depth, word_length=length)
    fmap = map_from_descriptor(_parse_map(p["map"]))
    gmap = map_from_descriptor(_parse_map(p["map2"]))
    tower_f = build_tower(fmap, depth, max_n)
    tower_g = build_tower(gmap, depth, max_n)
    part_f = build_partition(tower_f)
    part_g = build_partition(tower_g)
    mesh = build_mesh(part_f, part_g, length)
    j0 = int(p["j0"] if p["j0"] is not None else 3)
    j1 = int(p["j1"] if p["j1"] is not None else 8)
    grid = int(p["grid"] if p["grid"] is not None else 512)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        table = qs_modulus(mesh, j0, j1, grid)
    if p["mesh_csv"]:
        artifacts.write_text_atomic(p["mesh_csv"], artifacts.mesh_csv(mesh))
    if p["qs_csv"]:
        artifacts.write_text_atomic(p["qs_csv"], artifacts.qs_csv(table))
    if p["qs_inverse_csv"]:
        artifacts.write_text_atomic(p["qs_inverse_csv"],
                                    artifacts.qs_csv(table, inverse=True))
    if p["json"]:
        artifacts.write_json_atomic(p["json"], artifacts.qs_json(table))
    if not any(p[k] for k in ("mesh_csv", "qs_csv", "qs_inverse_csv", "json")):
        print(json.dumps(artifacts.qs_json(table), indent=2))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="renormlab",
                     description="Renormalization tower laboratory")
    parser.add_argument("--config", help="JSON config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    tune = sub.add_parser("tune", help="tune a family parameter")
    tune.add_argument("--t", type=float)
    tune.add_argument("--type", choices=["doubling", "constant"])
    tune.add_argument("--n", type=int)
    tune.add_argument("--depth", type=int)
    tune.add_argument("--target", help="comma-separated return times")
    tune.add_argument("--out", help="write the map descriptor JSON here")
    tune.add_argument("--seed", type=int, help="reserved")
    tune.set_defaults(func=_cmd_tune)

    tower = sub.add_parser("tower", help="build a renormalization tower")
    tower.add_argument("--map", help="map descriptor JSON (inline or path)")
    tower.add_argument("--depth", type=int)
    tower.add_argument("--max-n", dest="max_n", type=int)
    tower.add_argument("--json")
    tower.add_argument("--csv")
    tower.set_defaults(func=_cmd_tower)

    part = sub.add_parser("partition", help="build the Markov partition")
    part.add_argument("--map")
    part.add_argument("--depth", type=int)
    part.add_argument("--max-n", dest="max_n", type=int)
    part.add_argument("--csv")
    part.add_argument("--words", help="write admissible words here")
    part.add_argument("--word-length", dest="word_length", type=int)
    part.set_defaults(func=_cmd_partition)

    cert = sub.add_parser("certify", help="bounded-distortion certification")
    cert.add_argument("--map")
    cert.add_argument("--depth", type=int)
    cert.add_argument("--max-n", dest="max_n", type=int)
    cert.add_argument("--word-length", dest="word_length", type=int)
    cert.add_argument("--grid", type=int)
    cert.add_argument("--threshold-a", dest="threshold_a", type=float)
    cert.add_argument("--threshold-b", dest="threshold_b", type=float)
    cert.add_argument("--threshold-c", dest="threshold_c", type=float)
    cert.add_argument("--csv")
    cert.add_argument("--json")
    cert.set_defaults(func=_cmd_certify)

    conj = sub.add_parser("conjugate", help="conjugacy mesh and qs table")
    conj.add_argument("--map")
    conj.add_argument("--map2")
    conj.add_argument("--depth", type=int)
    conj.add_argument("--max-n", dest="max_n", type=int)
    conj.add_argument("--word-length", dest="word_length", type=int)
    conj.add_argument("--j0", type=int)
    conj.add_argument("--j1", type=int)
    conj.add_argument("--grid", type=int)
    conj.add_argument("--mesh-csv", dest="mesh_csv")
    conj.add_argument("--qs-csv", dest="qs_csv")
    conj.add_argument("--qs-inverse-csv", dest="qs_inverse_csv")
    conj.add_argument("--json")
    conj.set_defaults(func=_cmd_conjugate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"renormlab: {exc}", file=sys.stderr)
        return 1
    except RenormLabError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
