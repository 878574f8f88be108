"""Z_p^* with power-map endomorphisms ``h -> h^k``.

Exponents of endomorphism handles live mod ``p - 1`` so every power
``phi^j`` is a single integer and composition is one multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import isprime

from .core import Platform, derive_shared_key, transmission
from .errors import MalformedMessageError, ParameterError

__all__ = [
    "ModPParams",
    "ModPEndo",
    "ModPPlatform",
    "RFC3526_2048",
    "modp_apply",
    "modp_is_automorphism",
    "modp_closed_form",
    "dh_equivalence_check",
]

# RFC 3526 group 14
RFC3526_2048 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)


@dataclass(frozen=True)
class ModPParams:
    p: int
    g: int
    k: int

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise ParameterError(f"p={self.p} is not an odd prime")
        if not 1 < self.g < self.p:
            raise ParameterError(f"g must lie in [2, p-1], got {self.g}")
        if self.k < 2:
            raise ParameterError(f"k must be >= 2, got {self.k}")


@dataclass(frozen=True)
class ModPEndo:
    """Handle for ``h -> h^exponent``; ``exponent`` is kept mod p - 1."""

    exponent: int


@dataclass(frozen=True)
class ModPPlatform(Platform):
    """Elements are plain ints in ``[1, p-1]``."""

    p: int
    platform_id = 1

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise ParameterError(f"p={self.p} is not an odd prime")

    def endo(self, k: int) -> ModPEndo:
        return ModPEndo(k % (self.p - 1))

    def validate_element(self, x):
        if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x < self.p:
            raise ParameterError(f"{x!r} is not an element of Z_{self.p}^*")

    def multiply(self, x, y):
        return x * y % self.p

    def apply(self, endo, x):
        return pow(x, endo.exponent, self.p)

    def compose(self, first, second):
        return ModPEndo(first.exponent * second.exponent % (self.p - 1))

    def identity_endo(self):
        return ModPEndo(1 % (self.p - 1))

    @property
    def element_width(self):
        return (self.p.bit_length() + 7) // 8

    def serialize(self, x):
        return x.to_bytes(self.element_width, "big")

    def deserialize(self, data):
        if len(data) != self.element_width:
            raise MalformedMessageError(
                f"expected {self.element_width} bytes, got {len(data)}"
            )
        x = int.from_bytes(data, "big")
        if not 1 <= x < self.p:
            raise MalformedMessageError(f"value {x} outside [1, p-1]")
        return x


def modp_apply(platform: ModPPlatform, endo: ModPEndo, h: int) -> int:
    platform.validate_element(h)
    return platform.apply(endo, h)


def modp_is_automorphism(params: ModPParams) -> bool:
    return gcd(params.k, params.p - 1) == 1


def modp_closed_form(params: ModPParams, m: int) -> int:
    """``g^(1 + k + ... + k^(m-1)) mod p``.

    The geometric sum is reduced mod p - 1 by doubling, never by dividing
    by ``k - 1`` (which need not be invertible mod p - 1).
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    q = params.p - 1
    k = params.k % q
    # (S_j, k^j) for the bits of m read so far, with S_j = 1 + k + ... + k^(j-1)
    s, kp = 1 % q, k
    for bit in bin(m)[3:]:
        s, kp = (s + kp * s) % q, kp * kp % q
        if bit == "1":
            s, kp = (s * k + 1) % q, kp * k % q
    return pow(params.g, s, params.p)


def dh_equivalence_check(params: ModPParams, m: int, n: int) -> bool:
    """True iff the protocol key equals the closed form at ``m + n``."""
    plat = ModPPlatform(params.p)
    phi = plat.endo(params.k)
    b = transmission(plat, params.g, phi, n)
    key = derive_shared_key(plat, b, m, params.g, phi)
    return key == modp_closed_form(params, m + n)
