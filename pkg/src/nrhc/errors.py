"""Exception types shared across the estimator stack."""


class SingularHessian(RuntimeError):
    """Raised when a Hessian (or weighting) solve hits a singular or
    near-singular matrix, violating the executability condition of the
    backward-sweep algorithm."""


class NumericalBlowup(RuntimeError):
    """Raised when an integration or sweep produces non-finite values."""


class EmptyWindow(ValueError):
    """Raised when a metrics window selects no trace samples."""


class ConfigError(ValueError):
    """Raised for invalid run configurations; the message names the key."""
