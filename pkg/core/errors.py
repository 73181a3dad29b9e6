"""
Error types shared by every module.
Each error keeps a ``details`` dictionary with the diagnostics that the
command-line layer copies into failed reports.
"""


class LabError(Exception):
    """Base class for all lab failures."""

    kind = "lab-error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"kind": self.kind, "message": str(self), "details": self.details}


class InvalidInputError(LabError, ValueError):
    kind = "invalid-input"


class NumericFailureError(LabError):
    kind = "numeric-failure"


class BudgetExhaustedError(LabError):
    kind = "budget-exhausted"


class EmptySupportError(LabError):
    kind = "empty-support"


class CapacityError(LabError):
    kind = "capacity"


class DegenerateEstimateError(LabError):
    kind = "degenerate-estimate"


class DegeneratePackingError(LabError):
    kind = "degenerate-packing"


class DivergedError(LabError):
    kind = "diverged"
