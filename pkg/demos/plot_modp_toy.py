"""
Semidirect key exchange over Z_p^*
==================================

The smallest platform: a prime field, with phi(h) = h^k.  Both parties
end up with g^(1 + k + ... + k^(m+n-1)).
"""

from sdkex.core import derive_shared_key, sd_power, transmission
from sdkex.modp import ModPParams, ModPPlatform, dh_equivalence_check, modp_closed_form

# p = 11, g = 2, k = 3 keeps every number small enough to check by hand
plat = ModPPlatform(11)
phi = plat.endo(3)

pair = sd_power(plat, 2, phi, 3)
print("(2, phi)^3 =", (pair.elem, f"phi^{pair.power}"))

###############################################################################
# Alice picks m, Bob picks n.  Only the first components travel.
m, n = 2, 3
a = transmission(plat, 2, phi, m)
b = transmission(plat, 2, phi, n)
print("A =", a, " B =", b)

k_alice = derive_shared_key(plat, b, m, 2, phi)
k_bob = derive_shared_key(plat, a, n, 2, phi)
print("keys:", k_alice, k_bob)

###############################################################################
# The same value from the closed form, with no semidirect product at all.
params = ModPParams(11, 2, 3)
print("closed form at m+n:", modp_closed_form(params, m + n))
print("DH-style check holds:", dh_equivalence_check(params, m, n))
