"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid or inconsistent construction parameters."""


class ShapeError(ValueError):
    """Array arguments with incompatible shapes or lengths."""


class FormatError(RuntimeError):
    """Malformed operator cache file (magic/version/truncation)."""


class IntegrityError(RuntimeError):
    """Cache contents fail checksum, parameter, or invariant validation."""


class DivergenceError(RuntimeError):
    """A time integration produced non-finite values."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
