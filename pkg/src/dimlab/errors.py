"""Exception hierarchy.

Every error carries a short machine-readable ``code``. Errors that signal an
exceeded resource cap subclass :class:`ResourceLimit`; the CLI maps those to
exit status 3 and everything else to 2.
"""


class DimlabError(ValueError):
    code = "error"

    def __init__(self, message="", **detail):
        super().__init__(message)
        self.detail = detail

    def to_json(self):
        out = {"error": self.code, "message": str(self)}
        if self.detail:
            out["detail"] = self.detail
        return out


class ResourceLimit(DimlabError):
    code = "resource_limit"


def _make(name, base=DimlabError):
    code = "".join("_" + c.lower() if c.isupper() else c for c in name).lstrip("_")
    return type(name, (base,), {"code": code})


# validation
DimensionMismatch = _make("DimensionMismatch")
ValueOutOfRange = _make("ValueOutOfRange")
DuplicateLabel = _make("DuplicateLabel")
SupportOutOfRange = _make("SupportOutOfRange")
BadDistribution = _make("BadDistribution")
BadMonotoneMap = _make("BadMonotoneMap")
EmptyTuple = _make("EmptyTuple")
LambdaOutOfRange = _make("LambdaOutOfRange")
EmptyClass = _make("EmptyClass")
NotConceptClass = _make("NotConceptClass")
GammaOutOfRange = _make("GammaOutOfRange")
BadInterval = _make("BadInterval")
BadGammaSequence = _make("BadGammaSequence")
DepthTooSmall = _make("DepthTooSmall")
BadWitness = _make("BadWitness")
ParameterConstraintViolated = _make("ParameterConstraintViolated")
BranchDeficient = _make("BranchDeficient")
ShapeMismatch = _make("ShapeMismatch")
DimMismatch = _make("DimMismatch")
BadRange = _make("BadRange")
BadTable = _make("BadTable")
PolicyError = _make("PolicyError")
EmptySample = _make("EmptySample")
ParseError = _make("ParseError")

# resource caps
TooLarge = _make("TooLarge", ResourceLimit)
ClassTooLarge = _make("ClassTooLarge", ResourceLimit)
StateExplosion = _make("StateExplosion", ResourceLimit)
