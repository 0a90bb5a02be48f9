"""renormlab: renormalization towers, induced Markov maps, distortion
certification and quasisymmetric conjugacy estimates for even unimodal maps."""

from .config import DEFAULT_TOL, Tolerances
from .conjugacy import (ConjugacyMesh, MatchCertificate, QsModulusTable,
                        build_mesh, conjugacy_at, match_towers, qs_modulus)
from .distortion import (DistortionReport, LemmaQuantities, Thresholds,
                         certify, composed_nonlinearity, lemma_quantities)
from .errors import RenormLabError
from .maps import (ClassKParams, UnimodalMap, factor_nonlinearity,
                   make_affine_family, map_from_descriptor, map_from_h_coeffs,
                   orbit)
from .partition import (BranchWord, LevelGaps, MarkovPartition,
                        PartitionElement, admissible_words, branch_inverse,
                        build_partition, induced_eval, level_gaps)
from .renorm import (RenormLevel, RenormTower, RescaledIterate, build_tower,
                     detect_renormalization, find_periodic_point, renormalize,
                     superstable_cascade, tune_parameter)

_ESTIMATORS = ("RenormalizationTower", "InducedMarkovMap",
               "DistortionCertifier", "ConjugacyMap")


def __getattr__(name):
    # sklearn is imported lazily so the CLI stays light
    if name in _ESTIMATORS:
        from . import estimators
        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "DEFAULT_TOL", "Tolerances", "RenormLabError",
    "UnimodalMap", "ClassKParams", "make_affine_family", "map_from_descriptor",
    "map_from_h_coeffs", "orbit", "factor_nonlinearity",
    "RescaledIterate", "RenormLevel", "RenormTower", "build_tower",
    "detect_renormalization", "find_periodic_point", "renormalize",
    "superstable_cascade", "tune_parameter",
    "MarkovPartition", "PartitionElement", "LevelGaps", "BranchWord",
    "build_partition", "level_gaps", "induced_eval", "branch_inverse",
    "admissible_words",
    "DistortionReport", "LemmaQuantities", "Thresholds", "certify",
    "composed_nonlinearity", "lemma_quantities",
    "ConjugacyMesh", "MatchCertificate", "QsModulusTable", "match_towers",
    "build_mesh", "conjugacy_at", "qs_modulus",
    *_ESTIMATORS,
]
