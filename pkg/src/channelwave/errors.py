"""Exception types shared across channelwave."""


class ChannelWaveError(Exception):
    """Base class for channelwave errors."""


class InvalidArgument(ChannelWaveError, ValueError):
    """An argument violates an operation precondition."""


class InvalidState(ChannelWaveError, ValueError):
    """A state carries non-finite samples or mismatched grids."""


class InsufficientEnergy(ChannelWaveError):
    """Cumulative energy never reaches a requested threshold."""


class AmbiguousCount(ChannelWaveError):
    """Bubble count rounding residue exceeds the configured gate."""

    def __init__(self, ratio, residue):
        super().__init__(f"energy ratio {ratio:.4f} is {residue:.3f} from the nearest integer")
        self.ratio = ratio
        self.residue = residue


class HorizonExceeded(ChannelWaveError):
    """No admissible time was found inside the search horizon."""


class SignUndetermined(ChannelWaveError):
    """A bubble pairing is too small to fix its sign."""


class NotApplicable(ChannelWaveError):
    """The diagnostic does not apply to this trajectory (e.g. after blow-up)."""
