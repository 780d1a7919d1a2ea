"""Exception hierarchy shared by every qkc subsystem."""

from __future__ import annotations


class QkcError(Exception):
    """Base class for all errors raised by qkc."""


class ResourceError(QkcError):
    """Raised when a request exceeds a hard capacity (CLI exit code 2)."""


# --- ir -------------------------------------------------------------------

class IRError(QkcError):
    pass


class InvalidInstruction(IRError):
    pass


class AdjointOfNonUnitary(IRError):
    pass


class ControlOfNonUnitary(IRError):
    pass


class NonUnitaryInstruction(IRError):
    pass


class TooManyQubits(IRError, ResourceError):
    pass


# --- frontend -------------------------------------------------------------

class FrontendError(QkcError):
    pass


class KernelSyntaxError(FrontendError):
    """Parse failure with a source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0, filename: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename
        super().__init__(self.location() + message)

    def location(self) -> str:
        where = self.filename or "<source>"
        return f"{where}:{self.line}:{self.col}: "


class UnknownLanguage(KernelSyntaxError):
    pass


class UnbalancedBraces(KernelSyntaxError):
    pass


class UnsupportedQasmFeature(KernelSyntaxError):
    pass


class UnsupportedQuilFeature(KernelSyntaxError):
    pass


class UnresolvedKernel(FrontendError):
    pass


class UnknownKernelName(FrontendError):
    pass


class MeasurementDependentBranchInNisqMode(FrontendError):
    pass


class ArgumentMismatch(FrontendError):
    pass


class EvaluationError(FrontendError):
    """Runtime failure while interpreting a kernel body."""


class RangeError(FrontendError):
    pass


class NotUnitary(FrontendError):
    pass


class DimensionMismatch(FrontendError):
    pass


class TooManyQubitsForSynthesis(FrontendError):
    pass


# --- passes / placement ---------------------------------------------------

class UnknownPass(QkcError):
    pass


class PlacementError(QkcError):
    pass


class GraphTooSmall(PlacementError):
    pass


class DisconnectedGraph(PlacementError):
    pass


class DuplicatePhysicalIndex(PlacementError):
    pass


class MapTooShort(PlacementError):
    pass


class UnknownPlacement(PlacementError):
    pass


# --- backend --------------------------------------------------------------

class BackendError(QkcError):
    pass


class QubitOutOfRange(BackendError):
    pass


class ZeroShots(BackendError):
    pass


class NoActiveSession(BackendError):
    pass


class EmptyCounts(BackendError):
    pass


class CapacityError(BackendError, ResourceError):
    pass


class UnknownBackend(BackendError):
    pass


class NoiseModelError(BackendError):
    pass


# --- mitigation -----------------------------------------------------------

class MitigationError(QkcError):
    pass


class TooManyQubitsForCalibration(MitigationError):
    pass


class SingularConfusionMatrix(MitigationError):
    pass


class FoldingNonUnitary(MitigationError):
    pass


class UnknownMitigation(MitigationError):
    pass


# --- hybrid ---------------------------------------------------------------

class HybridError(QkcError):
    pass


class OperatorParseError(HybridError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class AlreadyMeasured(HybridError):
    pass


class NonHermitianOperator(HybridError):
    pass


class ComplexCoefficient(HybridError):
    pass


class ArityMismatch(HybridError):
    pass


class NoDefaultTranslatorForSignature(HybridError):
    pass


class ObjectiveEvaluationFailure(HybridError):
    pass


class DoubleSync(HybridError):
    pass


class UnknownOptimizer(HybridError):
    pass
