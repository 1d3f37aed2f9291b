"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the physical domain of a model."""


class SingularConfigurationError(DomainError):
    """The two-lens focal chain has no finite effective focal length."""


class MissingEntryError(KeyError):
    """A lookup table has no entry for the requested key."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing entry"


class ConfigurationError(ValueError):
    """Parameters are individually valid but inconsistent with each other."""


class UndefinedQberError(ValueError):
    """QBER requested with neither signal nor noise counts."""


class ScenarioError(ValueError):
    """A scenario document could not be parsed or validated."""
