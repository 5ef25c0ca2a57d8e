"""Exception hierarchy shared across the package.

Everything that stems from bad input data derives from DataError so the CLI
can map it to a single exit code; programming errors stay ordinary exceptions.
"""


class DataError(Exception):
    """Invalid input data or configuration supplied by the caller."""


class DatasetError(DataError):
    """A corpus file or case record violates the documented schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LexiconError(DataError):
    """A valence lexicon file cannot be parsed or holds invalid scores."""


class GeneratorConfigError(DataError):
    """A synthetic-corpus configuration is inconsistent or infeasible."""


class StratumError(DataError):
    """An experiment requires a data stratum that is empty."""


class SchemaMismatchError(DataError):
    """Feature data and a model were built against different schemas."""
