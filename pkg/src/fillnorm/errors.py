"""Domain errors with stable string codes for structured CLI reporting."""


class FillnormError(Exception):
    """Base class; every subclass carries a stable machine-readable code."""

    code = "FILLNORM_ERROR"

    def __init__(self, message, **payload):
        super().__init__(message)
        self.message = message
        self.payload = payload

    def to_json(self):
        out = {"code": self.code, "message": self.message}
        if self.payload:
            out["detail"] = self.payload
        return out


class MalformedSyntax(FillnormError):
    code = "MALFORMED_SYNTAX"


class DanglingReference(FillnormError):
    code = "DANGLING_REFERENCE"


class OpenBoundaryWord(FillnormError):
    code = "OPEN_BOUNDARY_WORD"


class UnknownGenerator(FillnormError):
    code = "UNKNOWN_GENERATOR"


class MonodromyObstruction(FillnormError):
    code = "MONODROMY_OBSTRUCTION"


class TrivialQuotient(FillnormError):
    code = "TRIVIAL_QUOTIENT"


class DegreeCapExceeded(FillnormError):
    code = "DEGREE_CAP_EXCEEDED"


class LevelOutOfRange(FillnormError):
    code = "LEVEL_OUT_OF_RANGE"


class NotABoundary(FillnormError):
    code = "NOT_A_BOUNDARY"


class NotACoboundary(FillnormError):
    code = "NOT_A_COBOUNDARY"


class SearchCapExceeded(FillnormError):
    code = "SEARCH_CAP_EXCEEDED"

    def __init__(self, message, incumbent=None, **payload):
        super().__init__(message, **payload)
        self.incumbent = incumbent

    def to_json(self):
        out = super().to_json()
        if self.incumbent is not None:
            # (vector, value, certificate) from the solver: report the value
            # so callers see the best non-optimal filling found
            out["incumbent_value"] = str(self.incumbent[1])
            out["optimal"] = False
        return out


class DimensionCapExceeded(FillnormError):
    code = "DIMENSION_CAP_EXCEEDED"


class PreconditionViolated(FillnormError):
    code = "PRECONDITION_VIOLATED"


class NotClosed(FillnormError):
    code = "NOT_CLOSED"


class NonOrientable(FillnormError):
    code = "NON_ORIENTABLE"


class BadVertexLink(FillnormError):
    code = "BAD_VERTEX_LINK"


class EndpointMismatch(FillnormError):
    code = "ENDPOINT_MISMATCH"


class DecompositionMismatch(FillnormError):
    code = "DECOMPOSITION_MISMATCH"
