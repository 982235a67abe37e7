"""Exception types shared across the package.

Invalid arguments raise the stdlib ValueError; the classes here cover the
domain-specific failure modes callers are expected to catch.
"""


class ZetaRecError(Exception):
    """Base class for package-specific failures."""


class PoleError(ZetaRecError):
    """Evaluation requested at the pole s = 1."""


class AccuracyExhausted(ZetaRecError):
    """Requested accuracy unreachable within the configured term budget."""

    def __init__(self, message, achieved_bound):
        super().__init__(f"{message} (achieved bound {achieved_bound:.3e})")
        self.achieved_bound = achieved_bound


class SingularFactor(ZetaRecError):
    """An Euler factor 1 - w * p^{-s} vanished exactly."""


class SingularDirection(ZetaRecError):
    """Denominator phase sum too close to zero for the lift identity."""


class WitnessFailed(ZetaRecError):
    """Support-witness verification failed; carries the achieved sup."""

    def __init__(self, achieved_sup, eps):
        super().__init__(
            f"witness verification failed: sup {achieved_sup:.6g} >= eps {eps:.6g}")
        self.achieved_sup = achieved_sup
        self.eps = eps


class WindowNotFound(ZetaRecError):
    """No certified phase window located within the search bound."""

    def __init__(self, search_bound, detail=""):
        msg = f"no certified window within search bound {search_bound:.6g}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.search_bound = search_bound


class PreconditionFailed(ZetaRecError):
    """A documented precondition does not hold at the supplied inputs."""


class StageFailed(ZetaRecError):
    """A pipeline stage aborted; carries the stage name and its bounds."""

    def __init__(self, stage, detail, bounds=None):
        super().__init__(f"stage '{stage}' failed: {detail}")
        self.stage = stage
        self.bounds = dict(bounds or {})


class RunRejected(ZetaRecError):
    """Too many per-sample evaluation failures to report an estimate."""
