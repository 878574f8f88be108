"""Exception hierarchy shared by every platform and the protocol layer."""


class SDKexError(Exception):
    """Base class for all errors raised by sdkex."""


class ParameterError(SDKexError, ValueError):
    """Invalid parameters, mismatched platform instances or bad arguments."""


class MalformedMessageError(SDKexError, ValueError):
    """A wire message or serialized element could not be decoded."""


class PlatformMismatchError(SDKexError):
    """Peer message announces a different platform than the session uses."""


class PhaseError(SDKexError):
    """Session operation attempted in a phase that does not permit it."""


class TransportError(SDKexError):
    """Underlying byte stream failed, closed early or timed out."""


class SamplingExhaustedError(SDKexError):
    """A rejection sampler ran out of retries."""


class ConfigError(SDKexError, ValueError):
    """Configuration file is syntactically or semantically invalid."""
