class FuncAlgError(Exception):
    """Base class for expression-algebra failures."""


class PoleError(FuncAlgError, ValueError):
    pass


class DivisorHitError(FuncAlgError, ValueError):
    """Evaluation point coincides with a zero or pole."""


class RootIsolationError(FuncAlgError):
    """Two polynomial roots are too close to be separated reliably."""


class ContinuationError(FuncAlgError, ValueError):
    """A point cannot be reached by the analytic-continuation scheme."""


class SpecError(FuncAlgError, ValueError):
    """Malformed JSON function description; ``path`` names the offending node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
