"""Exception types shared across the package."""


class GraphDimError(Exception):
    """Base class for all package errors."""


class ZeroCrossingError(GraphDimError, ZeroDivisionError):
    """A function that must be nowhere zero vanishes (or changes sign) on [0, 1]."""

    def __init__(self, expr, x, index=None, detail="value vanishes"):
        self.expr = expr
        self.x = x
        self.index = index
        where = f"x={x!r}" if index is None else f"x={x!r} (grid index {index})"
        super().__init__(f"zero crossing in {describe(expr)}: {detail} at {where}")


class ResolutionError(GraphDimError, ValueError):
    """A requested scale is too fine for the sampling grid."""


class FitError(GraphDimError, ValueError):
    """The scale window cannot support a regression."""


class SandwichViolation(GraphDimError, AssertionError):
    """A box count fell outside its oscillation-sum bounds."""


class InfeasibleError(GraphDimError, ValueError):
    """The requested decomposition cannot exist for this function."""


class UnsupportedEndpointError(GraphDimError, ValueError):
    """The requested target dimension has no finite-scale construction."""


class ParseError(GraphDimError, ValueError):
    """Malformed expression string."""

    def __init__(self, message, text, pos):
        self.text = text
        self.pos = pos
        pointer = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {pointer}")


class InputFormatError(GraphDimError, ValueError):
    """Malformed sampled-function file."""


def describe(expr):
    # late import: funcgen imports this module
    try:
        return expr.describe()
    except AttributeError:
        return repr(expr)
