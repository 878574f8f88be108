"""Session state machine, wire format, KDF and config files.

Wire message (big-endian)::

    magic "SDKX" | version (1) | platform id | role | payload length (4) | payload

The payload is exactly one serialized platform element: the first
component of ``(g, phi)^n``.  Nothing else is ever sent.
"""
from __future__ import annotations

import hashlib
import logging
import random
import secrets
import socket
import struct
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Any

from .core import Platform, derive_shared_key, transmission
from .errors import (
    ConfigError,
    MalformedMessageError,
    ParameterError,
    PhaseError,
    PlatformMismatchError,
    SDKexError,
    TransportError,
)
from .groupring import (
    GroupRing,
    MatrixPlatform,
    RingMatrix,
    alternating_group,
    commute_check,
    cyclic_group,
    default_ring,
    random_matrix,
    sample_invertible,
    symmetric_group,
    verify_invertible,
)
from .modp import RFC3526_2048, ModPParams, ModPPlatform, modp_is_automorphism
from .nilpotent import (
    GenMap,
    NilpotentParams,
    NilpotentPlatform,
    sample_large_order_automorphism,
)

log = logging.getLogger(__name__)

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER",
    "PlatformId",
    "Role",
    "Phase",
    "ParamSet",
    "SessionState",
    "Message",
    "ReflectionWarning",
    "modp_paramset",
    "matrix_paramset",
    "nilpotent_paramset",
    "generate_params",
    "session_create",
    "produce_message",
    "consume_message",
    "finish_session",
    "kdf",
    "read_message",
    "SocketTransport",
    "run_handshake",
    "load_config",
    "parse_config",
    "config_to_params",
    "dump_config",
]

MAGIC = b"SDKX"
VERSION = 1
HEADER = struct.Struct(">4sBBBI")


class PlatformId(IntEnum):
    MODP = 1
    MATRIX = 2
    NILPOTENT = 3


class Role(IntEnum):
    INITIATOR = 0
    RESPONDER = 1


class Phase(Enum):
    CREATED = "created"
    SENT = "sent"
    RECEIVED = "received"
    COMPLETED = "completed"
    FAILED = "failed"


class ReflectionWarning(UserWarning):
    """The peer's transmission equals our own (reflected or echoed message)."""


@dataclass(frozen=True, eq=False)
class ParamSet:
    """Public data of one key-exchange instance: platform, ``g``, ``phi``, ``t``."""

    platform: Platform
    g: Any
    phi: Any
    t: int
    extra: dict = field(default_factory=dict)

    @property
    def platform_id(self) -> int:
        return self.platform.platform_id

    def validate(self) -> None:
        plat = self.platform
        if self.t < 1:
            raise ParameterError("exponent bit length t must be >= 1")
        plat.validate_element(self.g)
        if isinstance(plat, MatrixPlatform):
            if not verify_invertible(self.phi.hpow, self.phi.hpow_inv) or self.phi.j != 1:
                raise ParameterError("conjugator H is not invertible with the given inverse")
            if commute_check(self.phi.hpow, self.g):
                raise ParameterError("H commutes with HM; the key would be A*B")


def modp_paramset(p: int, g: int, k: int, t: int = 256) -> ParamSet:
    params = ModPParams(p, g, k)
    plat = ModPPlatform(p)
    ps = ParamSet(plat, g, plat.endo(k), t, {"k": k, "automorphism": modp_is_automorphism(params)})
    ps.validate()
    return ps


def matrix_paramset(
    H: RingMatrix, Hinv: RingMatrix, M: RingMatrix, t: int = 128, n: int | None = None
) -> ParamSet:
    plat = MatrixPlatform(M.ring, n or M.n)
    ps = ParamSet(plat, M, plat.endo(H, Hinv), t)
    ps.validate()
    return ps


def nilpotent_paramset(params: NilpotentParams, g, phi: GenMap, t: int = 128) -> ParamSet:
    ps = ParamSet(NilpotentPlatform(params), g, phi, t)
    ps.validate()
    return ps


def _ring_from_name(name: str, modulus: int) -> GroupRing:
    name = name.strip()
    if name == "A5" and modulus == 7:
        return default_ring()
    kind, _, size = name[0], None, name[1:]
    try:
        order = int(size)
    except ValueError:
        raise ConfigError(f"unknown group {name!r}") from None
    builders = {"A": alternating_group, "S": symmetric_group, "C": cyclic_group}
    if kind not in builders:
        raise ConfigError(f"unknown group {name!r}")
    return GroupRing(builders[kind](order), modulus)


def _next_prime_bits(rng: random.Random, bits: int) -> int:
    from sympy import nextprime

    return nextprime(rng.getrandbits(bits) | (1 << (bits - 1)))


def generate_params(platform: str, seed=None, *, toy: bool = False, **kw) -> ParamSet:
    """Fresh, validated public parameters for ``modp``, ``matrix`` or ``nilpotent``.

    ``toy`` selects test-scale sizes.  Keyword overrides: ``p``, ``g``, ``k``,
    ``r``, ``t``, ``group``, ``modulus``, ``size``, ``min_order``.
    """
    rng = random.Random(seed)
    if platform == "modp":
        if toy:
            p = kw.get("p") or _next_prime_bits(rng, 30)
            return modp_paramset(p, kw.get("g") or rng.randrange(2, p), kw.get("k") or rng.randrange(2, 1 << 16), kw.get("t", 32))
        p = kw.get("p", RFC3526_2048)
        return modp_paramset(p, kw.get("g", 2), kw.get("k", 65537), kw.get("t", 256))
    if platform == "matrix":
        group = kw.get("group", "A5")
        modulus = kw.get("modulus", 7)
        ring = _ring_from_name(group, modulus)
        n = kw.get("size", 3)
        for _ in range(64):
            H, Hinv = sample_invertible(rng, ring, n)
            M = random_matrix(ring, rng, n)
            if not commute_check(H, M):
                ps = matrix_paramset(H, Hinv, M, kw.get("t", 10 if toy else 128), n)
                ps.extra.update(group=group, modulus=modulus, size=n)
                return ps
        raise ParameterError("could not sample a non-commuting (H, M)")
    if platform == "nilpotent":
        if "p" in kw:
            p = kw["p"]
        else:
            p = 7 if toy else _next_prime_bits(rng, 100)
        params = NilpotentParams(p, kw.get("r", 3))
        min_order = kw.get("min_order", min(10**4, p * p))
        phi = sample_large_order_automorphism(params, rng, min_order)
        g = params.random_element(rng)
        return nilpotent_paramset(params, g, phi, kw.get("t", 20 if toy else 128))
    raise ParameterError(f"unknown platform {platform!r}")


@dataclass(frozen=True)
class Message:
    platform_id: int
    role: int
    payload: bytes
    version: int = VERSION

    def to_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, self.platform_id, self.role, len(self.payload)) + self.payload

    @classmethod
    def parse_header(cls, header: bytes) -> tuple[int, int, int]:
        """Validate a header and return ``(platform_id, role, payload_length)``."""
        if len(header) < HEADER.size:
            raise MalformedMessageError(f"truncated header: {len(header)} bytes")
        magic, version, pid, role, length = HEADER.unpack(header[: HEADER.size])
        if magic != MAGIC:
            raise MalformedMessageError(f"bad magic {magic!r}")
        if version != VERSION:
            raise MalformedMessageError(f"unsupported version {version}")
        if pid not in PlatformId._value2member_map_:
            raise MalformedMessageError(f"unknown platform id {pid}")
        if role not in Role._value2member_map_:
            raise MalformedMessageError(f"bad role byte {role}")
        return pid, role, length

    @classmethod
    def from_bytes(cls, data: bytes, expected_width: int | None = None) -> "Message":
        pid, role, length = cls.parse_header(data)
        payload = data[HEADER.size :]
        if len(payload) != length:
            raise MalformedMessageError(
                f"payload length field {length} but {len(payload)} bytes present"
            )
        if expected_width is not None and length != expected_width:
            raise MalformedMessageError(
                f"payload is {length} bytes, platform elements are {expected_width}"
            )
        return cls(pid, role, bytes(payload))


@dataclass(frozen=True)
class SessionState:
    role: Role
    params: ParamSet
    exponent: int = field(repr=False)
    phase: Phase = Phase.CREATED
    key: bytes | None = field(default=None, repr=False)
    sent_payload: bytes | None = field(default=None, repr=False)
    key_element: Any = field(default=None, repr=False)


def session_create(params: ParamSet, role: Role, rng=None) -> SessionState:
    """New session with a private exponent uniform in ``[2^(t-1), 2^t)``."""
    params.validate()
    rng = rng or secrets.SystemRandom()
    t = params.t
    exponent = (1 << (t - 1)) + (rng.getrandbits(t - 1) if t > 1 else 0)
    return SessionState(Role(role), params, exponent)


def _fail(state: SessionState, exc: SDKexError):
    exc.state = replace(state, phase=Phase.FAILED, key=None)  # type: ignore[attr-defined]
    return exc


def produce_message(state: SessionState) -> tuple[Message, SessionState]:
    allowed = Phase.CREATED if state.role is Role.INITIATOR else Phase.RECEIVED
    if state.phase is not allowed:
        raise _fail(state, PhaseError(f"{state.role.name} cannot send in phase {state.phase.value}"))
    ps = state.params
    elem = transmission(ps.platform, ps.g, ps.phi, state.exponent)
    payload = ps.platform.serialize(elem)
    msg = Message(ps.platform_id, int(state.role), payload)
    return msg, replace(state, phase=Phase.SENT, sent_payload=payload)


def kdf(element_bytes: bytes, platform_id: int) -> bytes:
    """SHA-256 over ``MAGIC | platform id | element bytes``."""
    return hashlib.sha256(MAGIC + bytes([platform_id]) + element_bytes).digest()


def consume_message(state: SessionState, msg) -> SessionState:
    """Derive the shared key from the peer's message.

    The initiator completes here.  The responder moves to ``received``;
    it then sends with ``produce_message`` and completes with
    ``finish_session``.
    """
    allowed = Phase.SENT if state.role is Role.INITIATOR else Phase.CREATED
    if state.phase is not allowed:
        raise _fail(state, PhaseError(f"{state.role.name} cannot receive in phase {state.phase.value}"))
    ps = state.params
    try:
        if isinstance(msg, (bytes, bytearray)):
            msg = Message.from_bytes(bytes(msg), ps.platform.element_width)
        if msg.version != VERSION:
            raise MalformedMessageError(f"unsupported version {msg.version}")
        if msg.platform_id != ps.platform_id:
            raise PlatformMismatchError(
                f"peer uses platform {msg.platform_id}, session uses {ps.platform_id}"
            )
        if len(msg.payload) != ps.platform.element_width:
            raise MalformedMessageError(
                f"payload is {len(msg.payload)} bytes, expected {ps.platform.element_width}"
            )
        received = ps.platform.deserialize(msg.payload)
    except SDKexError as exc:
        raise _fail(state, exc) from None
    if state.sent_payload is not None and msg.payload == state.sent_payload:
        warnings.warn("peer transmission equals our own; possible reflection", ReflectionWarning, stacklevel=2)
    key_elem = derive_shared_key(ps.platform, received, state.exponent, ps.g, ps.phi)
    key = kdf(ps.platform.serialize(key_elem), ps.platform_id)
    if state.role is Role.INITIATOR:
        return replace(state, phase=Phase.COMPLETED, key=key, key_element=key_elem)
    # responder holds the key but is not complete until it has sent
    return replace(state, phase=Phase.RECEIVED, key=None, key_element=key_elem)


def finish_session(state: SessionState) -> SessionState:
    """Responder: mark the reply as delivered and release the key."""
    if state.role is not Role.RESPONDER or state.phase is not Phase.SENT:
        raise _fail(state, PhaseError(f"{state.role.name} cannot finish in phase {state.phase.value}"))
    ps = state.params
    key = kdf(ps.platform.serialize(state.key_element), ps.platform_id)
    return replace(state, phase=Phase.COMPLETED, key=key)


class SocketTransport:
    """Blocking byte-stream transport over a connected socket."""

    def __init__(self, sock: socket.socket, timeout: float | None = 10.0):
        self.sock = sock
        self.sock.settimeout(timeout)

    def send(self, data: bytes) -> None:
        try:
            self.sock.sendall(data)
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def recv_exact(self, n: int) -> bytes:
        buf = bytearray()
        while len(buf) < n:
            try:
                chunk = self.sock.recv(n - len(buf))
            except socket.timeout as exc:
                raise TransportError("timed out waiting for peer") from exc
            except OSError as exc:
                raise TransportError(f"receive failed: {exc}") from exc
            if not chunk:
                raise TransportError(f"connection closed after {len(buf)} of {n} bytes")
            buf += chunk
        return bytes(buf)

    def close(self) -> None:
        self.sock.close()


def read_message(transport, expected_width: int) -> Message:
    header = transport.recv_exact(HEADER.size)
    _, _, length = Message.parse_header(header)
    if length != expected_width:
        raise MalformedMessageError(f"announced payload {length} bytes, expected {expected_width}")
    return Message.from_bytes(header + transport.recv_exact(length), expected_width)


def run_handshake(transport, state: SessionState) -> bytes:
    """Run one round trip (initiator sends first) and return the 32-byte key.

    On any failure the raised exception carries ``exc.state`` in phase
    ``failed``.
    """
    width = state.params.platform.element_width
    try:
        if state.role is Role.INITIATOR:
            msg, state = produce_message(state)
            transport.send(msg.to_bytes())
            state = consume_message(state, read_message(transport, width))
        else:
            state = consume_message(state, read_message(transport, width))
            msg, state = produce_message(state)
            transport.send(msg.to_bytes())
            state = finish_session(state)
    except SDKexError as exc:
        if getattr(exc, "state", None) is None:
            _fail(state, exc)
        log.debug("handshake failed: %s", exc)
        raise
    return state.key


# -- config files ---------------------------------------------------------

def parse_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        out[key.strip().lower()] = value.strip()
    return out


def _int(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return int(cfg[key], 0)
    except ValueError:
        raise ConfigError(f"{key!r} is not an integer: {cfg[key]!r}") from None


def _hex(cfg, key):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r}")
    try:
        return bytes.fromhex(cfg[key])
    except ValueError:
        raise ConfigError(f"{key!r} is not a hex string") from None


def config_to_params(cfg: dict[str, str]) -> ParamSet:
    platform = cfg.get("platform")
    try:
        if platform == "modp":
            p, g, k = _int(cfg, "p"), _int(cfg, "g"), _int(cfg, "k")
            return modp_paramset(p, g, k, _int(cfg, "t", 256))
        if platform == "matrix":
            modulus = _int(cfg, "modulus", 7)
            group = cfg.get("group", "A5")
            n = _int(cfg, "size", 3)
            t = _int(cfg, "t", 128)
            if "m" not in cfg:
                return generate_params("matrix", _int(cfg, "seed", 0), group=group, modulus=modulus, size=n, t=t)
            plat = MatrixPlatform(_ring_from_name(group, modulus), n)
            M, H, Hinv = (plat.deserialize(_hex(cfg, key)) for key in ("m", "h", "hinv"))
            ps = matrix_paramset(H, Hinv, M, t, n)
            ps.extra.update(group=group, modulus=modulus, size=n)
            return ps
        if platform == "nilpotent":
            params = NilpotentParams(_int(cfg, "p"), _int(cfg, "r", 3))
            t = _int(cfg, "t", 128)
            if "g" not in cfg:
                return generate_params("nilpotent", _int(cfg, "seed", 0), p=params.p, r=params.r, t=t)
            plat = NilpotentPlatform(params)
            g = plat.deserialize(_hex(cfg, "g"))
            images = tuple(plat.deserialize(bytes.fromhex(h.strip())) for h in cfg["phi"].split(","))
            return nilpotent_paramset(params, g, GenMap(params, images), t)
    except (MalformedMessageError, ParameterError, KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown platform {platform!r}")


def load_config(path) -> ParamSet:
    with open(path, encoding="utf-8") as fh:
        return config_to_params(parse_config(fh.read()))


def dump_config(ps: ParamSet) -> str:
    plat = ps.platform
    lines = []
    if isinstance(plat, ModPPlatform):
        lines += ["platform = modp", f"p = {plat.p:#x}", f"g = {ps.g}", f"k = {ps.extra.get('k', ps.phi.exponent)}"]
    elif isinstance(plat, MatrixPlatform):
        lines += [
            "platform = matrix",
            f"group = {ps.extra.get('group', 'A5')}",
            f"modulus = {plat.ring.modulus}",
            f"size = {plat.n}",
            f"m = {plat.serialize(ps.g).hex()}",
            f"h = {plat.serialize(ps.phi.hpow).hex()}",
            f"hinv = {plat.serialize(ps.phi.hpow_inv).hex()}",
        ]
    elif isinstance(plat, NilpotentPlatform):
        lines += [
            "platform = nilpotent",
            f"p = {plat.params.p}",
            f"r = {plat.params.r}",
            f"g = {plat.serialize(ps.g).hex()}",
            "phi = " + ",".join(plat.serialize(y).hex() for y in ps.phi.images),
        ]
    lines.append(f"t = {ps.t}")
    return "\n".join(lines) + "\n"
