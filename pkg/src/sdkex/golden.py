"""Frozen wire vectors used by the self-test and the test suite.

Each entry fixes a parameter set, a role and a private exponent; the hex
string is the complete message that session must emit.
"""
from __future__ import annotations

from .core import transmission
from .nilpotent import GenMap, NilpotentParams
from .protocol import (
    Message,
    ParamSet,
    Role,
    generate_params,
    modp_paramset,
    nilpotent_paramset,
)

__all__ = ["golden_paramset", "golden_message", "GOLDEN_MESSAGES", "GOLDEN_KDF_P11"]


def _nilpotent_golden() -> ParamSet:
    P = NilpotentParams(7, 3)
    g = P.element((3, 17, 40), (5, 0, 22))
    phi = GenMap(P, (
        P.element((1, 1, 0), (0, 2, 0)),
        P.element((0, 1, 1)),
        P.element((1, 0, 1), (0, 0, 9)),
    ))
    return nilpotent_paramset(P, g, phi, t=8)


# name -> (role, exponent)
_SESSIONS = {
    "modp": (Role.INITIATOR, 2),
    "matrix": (Role.RESPONDER, 3),
    "nilpotent": (Role.INITIATOR, 5),
}


def golden_paramset(name: str) -> ParamSet:
    if name == "modp":
        return modp_paramset(11, 2, 3, t=2)
    if name == "matrix":
        return generate_params("matrix", 2024, toy=True)
    if name == "nilpotent":
        return _nilpotent_golden()
    raise KeyError(name)


def golden_message(name: str) -> Message:
    """Recompute the golden message from its parameters."""
    ps = golden_paramset(name)
    role, exponent = _SESSIONS[name]
    elem = transmission(ps.platform, ps.g, ps.phi, exponent)
    return Message(ps.platform_id, int(role), ps.platform.serialize(elem))


# KDF of the p=11, g=2, k=3, m=2, n=3 session key element (K = 2)
GOLDEN_KDF_P11 = "d03bd5025b0a9ed1787d0ec6e54c27f89c2b573e64b53a082d122a4b319653ec"

GOLDEN_MESSAGES = {
    "modp": "53444b580101000000000105",
    "nilpotent": "53444b58010300000000080003030f1d090319",
    "matrix": (
        "53444b580102010000021c05050105060103020204000106000206030601030303050103"
        "030502030001040300020501010103020002020505000300000006010104060100010304"
        "060204050102020506040506030100000000040606010004050202020403030302060502"
        "060405060003010404030002020201000003000604020601030300010002040305060101"
        "060201050106040304020106010402030002030502040001020305020305010103010105"
        "030004050505000200020302040405010201050502050604020300030102000500060100"
        "000601050104020503030604060402010006050005000105030202000301020103060400"
        "050401050301030405040601010006000606060605060100010201060603050305060304"
        "010606060300050401060501050000020304020300010001050204020603010305040201"
        "040603010105030306000600040602050100000600000601020500000603020300040404"
        "000306050206030604000204010101060201040102040100050105010401030000030400"
        "050203060104020402050100030106040602040300060403030203030603060103030101"
        "000406000101020204060306010506060206050505060204000206050601040200050506"
        "010201060301030001000200040601010005010203050501030402020005050505030206"
        "020305040003020306030102060306010500060105030105040401000501040401040600"
        "0601040101060000050204"
    ),
}
