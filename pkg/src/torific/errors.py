"""Structured error types shared by all modules."""


class TorificError(Exception):
    """Base error carrying a machine-readable code and context."""

    module = "torific"

    def __init__(self, message="", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def code(self):
        return type(self).__name__

    def envelope(self):
        return {
            "code": self.code,
            "module": self.module,
            "message": self.message,
            "context": {k: _plain(v) for k, v in sorted(self.context.items())},
        }


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (str, bool)) or v is None:
        return v
    return str(v)


def _make(name, module):
    return type(name, (TorificError,), {"module": module})


# exactmath
NegativePowerOfNonUnit = _make("NegativePowerOfNonUnit", "exactmath")
IncompatibleVariableTags = _make("IncompatibleVariableTags", "exactmath")
ConstantTermNotNthPower = _make("ConstantTermNotNthPower", "exactmath")
TruncationInsufficient = _make("TruncationInsufficient", "exactmath")

# lattice
ZeroVector = _make("ZeroVector", "lattice")
NotPartOfBasis = _make("NotPartOfBasis", "lattice")
ConeDimensionTooHigh = _make("ConeDimensionTooHigh", "lattice")
ConeNotInFan = _make("ConeNotInFan", "lattice")
ThetaConesCoincide = _make("ThetaConesCoincide", "lattice")
NotAFan = _make("NotAFan", "lattice")

# branch
NeedsFieldExtension = _make("NeedsFieldExtension", "branch")
NotSquareFree = _make("NotSquareFree", "branch")
NotCharacteristicSequence = _make("NotCharacteristicSequence", "branch")
GenericityExhausted = _make("GenericityExhausted", "branch")
VerticalBranch = _make("VerticalBranch", "branch")

# eggers_wall
InconsistentContacts = _make("InconsistentContacts", "eggers_wall")
NotRationalPoint = _make("NotRationalPoint", "eggers_wall")

# tropical
NonIntegralCoefficients = _make("NonIntegralCoefficients", "tropical")

# resolution
DegreeLadderViolation = _make("DegreeLadderViolation", "resolution")
PrefixNotGeneratingSequence = _make("PrefixNotGeneratingSequence", "resolution")
ShapeViolation = _make("ShapeViolation", "resolution")
OrderVectorMismatch = _make("OrderVectorMismatch", "resolution")
AttachmentCollision = _make("AttachmentCollision", "resolution")
SemigroupNotGeneratingZ = _make("SemigroupNotGeneratingZ", "resolution")

# cli
SchemaViolation = _make("SchemaViolation", "cli")
