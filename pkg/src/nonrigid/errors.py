class NonrigidError(Exception):
    """Base class for every error raised by this package."""


class ParseError(NonrigidError, ValueError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...]):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")


class ModelError(NonrigidError, ValueError):
    """A model document or model object is malformed."""


class EvaluationError(NonrigidError, ValueError):
    """A formula cannot be evaluated on a model (undeclared symbol, misplaced ``se``...)."""
