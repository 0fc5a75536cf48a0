"""Exception types raised by the library.

All are ValueError subclasses so generic callers can catch broadly while
tests and the CLI can dispatch on the specific condition.
"""


class EntmonoError(ValueError):
    """Base class for all library errors."""


# matrix kernel
class NotSquareError(EntmonoError):
    """Matrix expected to be square."""


class NotHermitianError(EntmonoError):
    """Matrix exceeds the Hermitian-symmetry tolerance."""


class NotPSDError(EntmonoError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class WrongShapeError(EntmonoError):
    """Matrix has the wrong shape for the operation."""


# state containers and tensor bookkeeping
class BadDimsError(EntmonoError):
    """Subsystem dimension list is invalid."""


class BadRankError(EntmonoError):
    """Requested rank outside [1, prod(dims)]."""


class BadSubsystemError(EntmonoError):
    """Subsystem index set is empty or out of range."""


class NotBipartiteError(EntmonoError):
    """Operation requires exactly two subsystems."""


class DimMismatchError(EntmonoError):
    """Operands have different subsystem dimensions."""


class ShapeMismatchError(EntmonoError):
    """Coefficient matrix shape inconsistent with the ensemble."""


class NotLeftOrthonormalError(EntmonoError):
    """Ensemble rotation columns are not orthonormal."""


# measures
class BadCutError(EntmonoError):
    """Bipartition must be a proper non-empty subset of the subsystems."""


class WrongDimsError(EntmonoError):
    """State dimensions unsupported by the operation."""


class RankExceedsEnsembleSizeError(EntmonoError):
    """Convex-roof ensemble size smaller than the state rank."""


# monogamy machinery
class InvalidSpecError(EntmonoError):
    """Equal-marginal construction parameters violate their invariants."""


class ExpansionMismatchError(EntmonoError):
    """Supplied coefficients do not reconstruct the state on the basis."""
