"""Tolerances and caps shared across the pipeline, overridable per run."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    eps_dom: float = 1e-9       # slack outside [-1, 1] before DomainError
    eps_deriv: float = 1e-12    # smallest derivative allowed in denominators
    eps_ren: float = 1e-9       # geometric tolerances of the tower checks
    eps_cond: float = 1e-12     # conditioning floor for interval lengths
    eps_mkv: float = 1e-7       # Markov alignment / containment tolerance
    eps_crit: float = 1e-4      # exclusion radius around the critical point
    eps_root: float = 1e-12     # residual allowed for periodic points
    bisect_iters: int = 200     # halvings per root refinement
    scan_points: int = 2001     # grid for periodic-point sign scans

    def with_overrides(self, **kwargs) -> "Tolerances":
        unknown = set(kwargs) - set(self.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown tolerance fields: {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT_TOL = Tolerances()

# CLI-facing default caps; deeper runs need an explicit config override.
MAX_DEPTH_CAP = 8
MAX_WORD_LENGTH_CAP = 8
