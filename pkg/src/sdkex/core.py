"""Platform-generic semidirect product engine.

A platform supplies a (semi)group ``G`` together with composable
endomorphism handles.  The cyclic extension ``G x| <phi>`` is the set of
pairs ``(g, phi^r)`` with

    (g, phi^r) * (h, phi^s) = (phi^s(g) * h, phi^(r+s))

and the key exchange only ever publishes the first component of a power
``(g, phi)^n``.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any

from .errors import ParameterError

__all__ = [
    "Platform",
    "CyclicExtension",
    "SemidirectPair",
    "MultCounter",
    "sd_multiply",
    "sd_power",
    "transmission",
    "derive_shared_key",
]


class Platform(abc.ABC):
    """Contract every platform backend implements.

    Elements and endomorphism handles are opaque immutable values owned by
    the platform.  ``compose(first, second)`` returns the handle that applies
    ``first`` and then ``second``.
    """

    platform_id: int = 0

    @abc.abstractmethod
    def multiply(self, x: Any, y: Any) -> Any: ...

    def equal(self, x: Any, y: Any) -> bool:
        return x == y

    @abc.abstractmethod
    def apply(self, endo: Any, x: Any) -> Any: ...

    @abc.abstractmethod
    def compose(self, first: Any, second: Any) -> Any: ...

    @abc.abstractmethod
    def identity_endo(self) -> Any: ...

    @property
    @abc.abstractmethod
    def element_width(self) -> int:
        """Fixed byte length of a serialized element."""

    @abc.abstractmethod
    def serialize(self, x: Any) -> bytes: ...

    @abc.abstractmethod
    def deserialize(self, data: bytes) -> Any: ...

    def validate_element(self, x: Any) -> None:
        """Raise ParameterError if ``x`` is not an element of this platform."""


@dataclass
class MultCounter:
    """Operation counts collected by an instrumented computation."""

    group_mults: int = 0
    endo_applies: int = 0
    endo_composes: int = 0


@dataclass(frozen=True, eq=False)
class CyclicExtension:
    """The semigroup ``G x| <phi>`` for one platform and one base endomorphism."""

    platform: Platform
    phi: Any

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, CyclicExtension):
            return NotImplemented
        return self.platform == other.platform and self.phi == other.phi

    def __hash__(self) -> int:
        return hash(self.platform)

    def pair(self, elem: Any) -> "SemidirectPair":
        """The generator pair ``(elem, phi)``."""
        return SemidirectPair(self, elem, self.phi, 1)

    def neutral_endo_pair(self, elem: Any) -> "SemidirectPair":
        """``(elem, phi^0)``."""
        return SemidirectPair(self, elem, self.platform.identity_endo(), 0)


@dataclass(frozen=True)
class SemidirectPair:
    """``(elem, phi^power)`` with ``endo`` the handle for ``phi^power``."""

    ext: CyclicExtension
    elem: Any
    endo: Any
    power: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemidirectPair):
            return NotImplemented
        return (
            self.ext == other.ext
            and self.power == other.power
            and self.ext.platform.equal(self.elem, other.elem)
            and self.endo == other.endo
        )

    def __hash__(self) -> int:
        return hash((self.power, self.elem))


def sd_multiply(
    x: SemidirectPair, y: SemidirectPair, counter: MultCounter | None = None
) -> SemidirectPair:
    """Semidirect product ``(x.elem, phi^r) * (y.elem, phi^s)``."""
    if x.ext != y.ext:
        raise ParameterError("pairs belong to different extensions")
    plat = x.ext.platform
    elem = plat.multiply(plat.apply(y.endo, x.elem), y.elem)
    endo = plat.compose(x.endo, y.endo)
    if counter is not None:
        counter.group_mults += 1
        counter.endo_applies += 1
        counter.endo_composes += 1
    return SemidirectPair(x.ext, elem, endo, x.power + y.power)


def _check_exponent(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParameterError(f"exponent must be an int, got {type(n).__name__}")
    if n < 1:
        raise ParameterError(f"exponent must be >= 1, got {n}")


def sd_power(
    platform: Platform,
    g: Any,
    phi: Any,
    n: int,
    counter: MultCounter | None = None,
) -> SemidirectPair:
    """``(g, phi)^n`` by left-to-right square-and-multiply.

    Uses at most ``2 * floor(log2 n)`` semidirect multiplications, each
    costing one group multiplication.
    """
    _check_exponent(n)
    base = CyclicExtension(platform, phi).pair(g)
    acc = base
    for bit in bin(n)[3:]:
        acc = sd_multiply(acc, acc, counter)
        if bit == "1":
            acc = sd_multiply(acc, base, counter)
    return acc


def transmission(platform: Platform, g: Any, phi: Any, n: int) -> Any:
    """First component of ``(g, phi)^n``; the only value put on the wire."""
    return sd_power(platform, g, phi, n).elem


def derive_shared_key(
    platform: Platform, received: Any, own_n: int, g: Any, phi: Any
) -> Any:
    """``phi^own_n(received) * transmission(g, phi, own_n)``."""
    if isinstance(received, (bytes, bytearray, memoryview)):
        received = platform.deserialize(bytes(received))
    else:
        platform.validate_element(received)
    own = sd_power(platform, g, phi, own_n)
    return platform.multiply(platform.apply(own.endo, received), own.elem)
