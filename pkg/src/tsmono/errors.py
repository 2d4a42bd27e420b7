"""Exception hierarchy shared by every layer of the package."""


class TimeScaleError(Exception):
    """Base class for all errors raised by tsmono."""


class InvalidTimeScale(TimeScaleError, ValueError):
    pass


class PointNotInScale(TimeScaleError, ValueError):
    def __init__(self, t, scale=None):
        self.t = t
        msg = f"point {t!r} is not in the time scale"
        if scale is not None:
            msg += f" {scale!r}"
        super().__init__(msg)


class EndpointsNotInScale(PointNotInScale):
    pass


class NotDifferentiableHere(TimeScaleError, ValueError):
    pass


class OrderExceedsContext(TimeScaleError, ValueError):
    pass


class UnsupportedScaleTag(TimeScaleError, ValueError):
    pass


class DegenerateDenominator(TimeScaleError, ZeroDivisionError):
    pass


class TooFewSamples(TimeScaleError, ValueError):
    pass


class EmptyRange(TimeScaleError, ValueError):
    pass


class PositivityViolated(TimeScaleError, ValueError):
    def __init__(self, name, location, value):
        self.name = name
        self.location = location
        self.value = value
        super().__init__(f"{name} must be positive; got {value!r} at {location!r}")


class TruncationTooShort(TimeScaleError, ValueError):
    pass


class ConfigInvalid(TimeScaleError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class IndeterminateSign(TimeScaleError, ValueError):
    """A monotonicity sign needed by a pairing rule straddles the tolerance."""

    def __init__(self, condition, message):
        self.condition = condition
        super().__init__(f"{condition}: {message}")
