from typing import Optional


class CensusBoostError(Exception):
    """Base class for every error raised by the pipeline."""

    exit_code = 2


class InputError(CensusBoostError):
    """Missing, empty or unreadable input."""


class ParseError(InputError):
    """A data row that does not fit the census layout."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class ConfigurationError(CensusBoostError):
    """Bad feature ids, flags, config or grid files."""


class EncodingError(CensusBoostError):
    """A category that the fitted encoding has never seen."""

    def __init__(self, attribute: str, value: str):
        self.attribute = attribute
        self.value = value
        super().__init__(f"unseen category '{value}' for attribute '{attribute}'")


class SplitError(CensusBoostError):
    """Category coverage could not be reached within the retry budget."""

    exit_code = 1


class TrainingError(CensusBoostError):
    """Invalid training input: zero weights, single class, arity mismatch."""


class DomainError(CensusBoostError):
    """Numeric argument outside the domain of a formula."""


class ModelFormatError(CensusBoostError):
    """Corrupted or incompatible artifact file."""
