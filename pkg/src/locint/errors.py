"""Exception hierarchy.

Every error raised by the library derives from :class:`LocintError`; most
also derive from :class:`ValueError` so callers that only care about bad
input can catch that instead.
"""


class LocintError(Exception):
    """Base class for all library errors."""


# posets
class NotAPartialOrder(LocintError, ValueError):
    pass


class NotDirected(LocintError, ValueError):
    pass


class UnknownElement(LocintError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotAChain(LocintError, ValueError):
    pass


# linear algebra
class DimensionMismatch(LocintError, ValueError):
    pass


class NotOrthonormal(LocintError, ValueError):
    pass


# domains
class NonMonotoneDims(LocintError, ValueError):
    pass


class InclusionViolation(LocintError, ValueError):
    pass


class FiberPosetMismatch(LocintError, ValueError):
    pass


class LevelIncomparable(LocintError, ValueError):
    pass


class LevelMismatch(LocintError, ValueError):
    pass


# operators
class NotLocallyBounded(LocintError, ValueError):
    def __init__(self, message, level=None, residual=None):
        super().__init__(message)
        self.level = level
        self.residual = residual


class BlockIncompatible(LocintError, ValueError):
    pass


class VectorOutsideDomain(LocintError, ValueError):
    pass


class DomainMismatch(LocintError, ValueError):
    pass


class DepthExceeded(LocintError, ValueError):
    pass


class FiberMismatch(LocintError, ValueError):
    pass


class MissingAtomValue(LocintError, ValueError):
    pass


class GeneratorOutsideAmbient(LocintError, ValueError):
    pass


# scenarios
class ParseError(LocintError, ValueError):
    pass


class UnresolvedReference(LocintError, ValueError):
    pass


class CapExceeded(LocintError, ValueError):
    pass
