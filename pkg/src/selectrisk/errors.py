"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class ProbabilityError(DomainError):
    """A vector flagged as probabilities is not a valid distribution."""


class DataFormatError(ValueError):
    """An input file or record does not match the expected layout."""


class DegenerateSelectionError(RuntimeError):
    """A threshold accepts nothing, so selective risk is undefined."""
