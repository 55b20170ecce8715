"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, data
validation problems exit 3, numerical failures exit 4.
"""


class ConfigError(ValueError):
    """A configuration value is out of range or internally inconsistent."""


class DataValidationError(ValueError):
    """Input data violates a structural contract (shape, domain, naming)."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or hit an invalid domain."""
