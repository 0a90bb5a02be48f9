"""Exception hierarchy.

ParameterError (a ValueError) marks bad user input; everything else under
RenormLabError is a computation failure.  The CLI maps the former to exit
code 1 and the latter to exit code 2.
"""

from __future__ import annotations


class RenormLabError(Exception):
    """Base class for all computation failures."""


class ParameterError(RenormLabError, ValueError):
    """Invalid argument or configuration value."""


class DomainError(RenormLabError):
    """Point lies outside [-1, 1] beyond the domain tolerance."""


class EscapeError(RenormLabError):
    """An orbit left [-1 - eps, 1 + eps]; carries the iterate index."""

    def __init__(self, message: str, index: int, point: float):
        super().__init__(message)
        self.index = index
        self.point = point


class DegenerateDerivativeError(RenormLabError):
    """A derivative needed in a denominator is below eps_deriv."""


class RootFindingError(RenormLabError):
    pass


class NoSignChangeError(RootFindingError):
    """Bisection bracket does not straddle a root."""


class ConvergenceError(RootFindingError):
    """Root refinement finished above the residual tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotRenormalizableError(RenormLabError):
    """No admissible restricted interval at some tower level."""

    def __init__(self, level: int, detail: str = ""):
        msg = f"not-renormalizable-at-level {level}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.level = level


class NormalizationError(RenormLabError):
    """Renormalized map left the normal form (critical value <= 0 or bad
    endpoint value).  ``boundary`` is set when the critical value vanishes
    to tolerance, i.e. the map was exactly once more renormalizable."""

    def __init__(self, message: str, critical_value: float, boundary: bool):
        super().__init__(message)
        self.critical_value = critical_value
        self.boundary = boundary


class TuningError(RenormLabError):
    """Parameter tuning failed; carries the deepest level reached."""

    def __init__(self, message: str, depth_reached: int):
        super().__init__(message)
        self.depth_reached = depth_reached


class PartitionError(RenormLabError):
    pass


class DegenerateComponentError(PartitionError):
    """A partition component came out shorter than eps_cond."""


class UnresolvedPointError(PartitionError):
    """Point sits on a cut point or inside the uncomputed core I_K."""


class BranchRangeError(PartitionError):
    """Requested value lies outside the image of the branch."""


class CriticalProximityError(RenormLabError):
    """A pullback orbit passed within eps_crit of the critical point."""


class ConjugacyError(RenormLabError):
    pass


class CombinatoricsMismatchError(ConjugacyError):
    """Towers disagree at some level; carries the first differing level."""

    def __init__(self, level: int, detail: str = ""):
        msg = f"combinatorics mismatch at level {level}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.level = level


class AdmissibilityTransferError(ConjugacyError):
    """A branch word is admissible in one map only."""

    def __init__(self, word, detail: str = ""):
        msg = f"admissibility does not transfer for word {word}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.word = tuple(word)
