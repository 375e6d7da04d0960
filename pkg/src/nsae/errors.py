"""Exception types shared across the package.

Every error raised by the library derives from ``NsaeError``. The class
attribute ``category`` groups errors for CLI exit codes: ``"data"`` for
malformed inputs, files, and invariant violations; ``"numeric"`` for
failures that surface during computation.
"""


class NsaeError(Exception):
    category = "data"


# -- vector and matrix inputs -------------------------------------------------

class DimensionMismatch(NsaeError):
    pass


class ZeroVector(NsaeError):
    pass


class NonFiniteValue(NsaeError):
    pass


# -- neighbor selection -------------------------------------------------------

class InvalidK(NsaeError):
    pass


class TooFewVectors(NsaeError):
    pass


class InvalidThreshold(NsaeError):
    pass


# -- network construction and training ----------------------------------------

class AsymmetricArchitecture(NsaeError):
    pass


class BadLayerSize(NsaeError):
    pass


class ShapeMismatch(NsaeError):
    pass


class EpochOutOfRange(NsaeError):
    pass


class EmptyPairs(NsaeError):
    pass


class IndexOutOfRange(NsaeError):
    pass


class NonFiniteActivation(NsaeError):
    category = "numeric"


class NonFiniteLoss(NsaeError):
    category = "numeric"


# -- evaluation and fusion ----------------------------------------------------

class SingleClass(NsaeError):
    pass


class LengthMismatch(NsaeError):
    pass


class DegenerateNormalization(NsaeError):
    category = "numeric"


class InsufficientPairs(NsaeError):
    pass


# -- file formats ---------------------------------------------------------------

class CorruptHeader(NsaeError):
    pass


class TruncatedPayload(NsaeError):
    pass


class DimInconsistent(NsaeError):
    pass


class FormatVersionMismatch(NsaeError):
    pass


class ParseError(NsaeError):
    pass
