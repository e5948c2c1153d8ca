class ModelError(ValueError):
    """Malformed game, setup or belief model."""


class DomainError(ValueError):
    """An argument outside its mathematical domain (e.g. a discount of 1)."""


class PreconditionError(ValueError):
    """An operation was called on inputs it is not defined for.

    ``witnesses`` carries whatever located the failure (worlds, types, ...).
    """

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class ConfigError(ValueError):
    """Invalid simulation or search configuration."""
