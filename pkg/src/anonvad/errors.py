"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2,
MissingArtifactError -> 3, NumericError -> 4.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class MissingArtifactError(FileNotFoundError):
    """A pipeline stage requires an artifact that has not been produced yet."""


class NumericError(ArithmeticError):
    """Non-finite values where finite ones are required (divergence, bad input)."""


class SamplingError(ValueError):
    """A clip or triplet cannot be drawn from the given video."""


class ShapeError(ValueError):
    """Tensor shape does not match the declared contract."""
