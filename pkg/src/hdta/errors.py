class HdtaError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(HdtaError):
    """A cube references a missing face, has inconsistent arity, or similar."""


class ModelError(HdtaError):
    """A model failed validation; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class ParseError(HdtaError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
