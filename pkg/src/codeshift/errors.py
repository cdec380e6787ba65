"""Exception types shared across the toolkit.

ValidationError covers everything caused by bad inputs (malformed files,
contract violations, unsatisfiable scenario parameters); the CLI maps it to
exit code 2. Anything else escaping a command is an internal error (exit 1).
"""


class ValidationError(Exception):
    """Invalid input data or parameters."""


class LexError(ValidationError):
    """Source text could not be tokenized.

    Carries the byte offset of the offending position.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
