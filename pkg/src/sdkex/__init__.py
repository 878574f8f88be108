"""Key exchange over cyclic semidirect extensions ``G x| <phi>``.

Platforms: ``Z_p^*`` with power maps (:mod:`sdkex.modp`), matrices over a
group ring with conjugation (:mod:`sdkex.groupring`) and the free nilpotent
class-2 group of exponent ``p^2`` (:mod:`sdkex.nilpotent`).
"""
from .core import (
    CyclicExtension,
    MultCounter,
    Platform,
    SemidirectPair,
    derive_shared_key,
    sd_multiply,
    sd_power,
    transmission,
)
from .errors import (
    ConfigError,
    MalformedMessageError,
    ParameterError,
    PhaseError,
    PlatformMismatchError,
    SamplingExhaustedError,
    SDKexError,
    TransportError,
)

__version__ = "0.1.0"
