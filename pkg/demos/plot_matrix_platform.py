"""
3x3 matrices over the group ring Z_7[A_5]
=========================================

phi is conjugation by an invertible H.  The public value A = H^-m (HM)^m
hides m as long as H and HM do not commute.
"""

import random

from sdkex.core import derive_shared_key, transmission
from sdkex.groupring import commute_check, default_ring, matrix_closed_form, verify_invertible
from sdkex.protocol import generate_params

ring = default_ring()
print(f"ring: Z_{ring.modulus}[{ring.table.name}], |G| = {len(ring.table.elements)}")

ps = generate_params("matrix", 11, toy=True)
H, Hinv, M = ps.phi.hpow, ps.phi.hpow_inv, ps.g
print("H invertible:", verify_invertible(H, Hinv))
print("H commutes with HM:", commute_check(H, M))

###############################################################################
# A short exchange, cross-checked against H^-(m+n) (HM)^(m+n).
rng = random.Random(0)
m, n = rng.randrange(1, 500), rng.randrange(1, 500)
A = transmission(ps.platform, M, ps.phi, m)
B = transmission(ps.platform, M, ps.phi, n)
K = derive_shared_key(ps.platform, B, m, M, ps.phi)
print("keys agree:", K == derive_shared_key(ps.platform, A, n, M, ps.phi))
print("closed form agrees:", K == matrix_closed_form(H, Hinv, M, m + n))
print("wire size of one matrix:", len(ps.platform.serialize(A)), "bytes")
