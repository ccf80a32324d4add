"""Principal-series types, base change of Bernstein centers, and twisted orbital integrals over p-adic fields."""

__version__ = "0.1.0"

from .errors import ArtifactError, ConfigError  # noqa: E402

__all__ = ["__version__", "ArtifactError", "ConfigError"]
