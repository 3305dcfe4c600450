"""Exception types shared by the toolkit."""


class DomainError(ValueError):
    """Input outside the domain where a quantity is defined."""


class NumericalFailure(RuntimeError):
    """A numerical routine could not reach its stated accuracy."""
