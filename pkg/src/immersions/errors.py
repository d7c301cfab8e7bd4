"""Exception types shared across the package."""


class EmptyInputError(ValueError):
    """A construction was asked for zero vertices or an empty part."""


class ParityError(ValueError):
    """Regular tournaments exist only on an odd number of vertices."""


class SizeError(ValueError):
    """An input is too small (or too large) for the requested operation."""


class TournamentFormatError(ValueError):
    """A tournament text file is malformed or violates the tournament invariants."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class CertificateFormatError(ValueError):
    """An immersion certificate file cannot be parsed."""


class ConsistencyError(RuntimeError):
    """An inequality that a proof guarantees was found violated at runtime.

    ``name`` identifies the violated inequality so callers (and the CLI exit
    report) can say exactly which step broke.
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}" if detail else name)


class PairingContractError(ConsistencyError):
    """The greedy pairing got stuck on an element with no admissible partner."""

    def __init__(self, element: int, detail: str = ""):
        self.element = element
        super().__init__("pairing-stuck", f"element {element} has no free partner. {detail}".strip())
