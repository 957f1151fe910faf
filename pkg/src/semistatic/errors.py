"""Exceptions shared across the engine."""


class SemistaticError(Exception):
    """Base class for all engine errors."""


class ConstraintViolation(SemistaticError):
    """A measure does not satisfy the constraint system it was checked against."""


class NotCalibrated(SemistaticError):
    """A measure is not a calibrated martingale measure for the given model."""


class NotComplete(SemistaticError):
    """Semi-static completeness fails where an operation requires it."""


class EmptyMeasureSet(SemistaticError):
    """The calibrated martingale-measure set is empty (arbitrage)."""


class SingularCompensator(SemistaticError):
    """Compensator increment charged where the survival process vanishes."""


class NotMeasurable(SemistaticError):
    """Event is not measurable at the terminal date of the filtration."""


class ShapeError(SemistaticError):
    """Array argument has the wrong shape for the model."""
