"""Link-budget and feasibility model for QKD downlinks from high-altitude platforms."""

from hapqkd.errors import (
    ConfigurationError,
    DomainError,
    MissingEntryError,
    ScenarioError,
    SingularConfigurationError,
    UndefinedQberError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "MissingEntryError",
    "ScenarioError",
    "SingularConfigurationError",
    "UndefinedQberError",
    "__version__",
]
