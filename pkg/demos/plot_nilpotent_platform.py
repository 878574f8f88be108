"""
Free nilpotent class-2 groups of exponent p^2
=============================================

Elements are kept in normal form x_1^a1 ... x_r^ar prod [x_i, x_j]^b_ij.
Endomorphisms are given by the images of the generators.
"""

import random

from sdkex.core import derive_shared_key, transmission
from sdkex.nilpotent import (
    NilpotentParams,
    NilpotentPlatform,
    Word,
    abelianization_matrix,
    is_automorphism,
    matrix_order_mod_p,
    nf_commutator,
    nf_multiply,
    sample_large_order_automorphism,
    word_normalize,
)

P = NilpotentParams(7, 3)
x1, x2 = P.generator(1), P.generator(2)
print("x1 x2         =", nf_multiply(x1, x2))
print("x2 x1         =", nf_multiply(x2, x1))
print("[x1, x2]      =", nf_commutator(x1, x2))

# a word is collected into normal form
w = Word(((2, 1), (1, 1), (2, -1), (1, -1)))
print("x2 x1 x2^-1 x1^-1 ->", word_normalize(P, w))

###############################################################################
# An automorphism with a large order on the abelianization.
rng = random.Random(3)
phi = sample_large_order_automorphism(P, rng, min_order=40)
T = abelianization_matrix(phi)
print("automorphism:", is_automorphism(phi), " order mod p:", matrix_order_mod_p(T, P.p, 10**6))

g = P.random_element(rng)
plat = NilpotentPlatform(P)
m, n = 123456, 654321
A = transmission(plat, g, phi, m)
B = transmission(plat, g, phi, n)
print("A =", A)
print("keys agree:", derive_shared_key(plat, B, m, g, phi) == derive_shared_key(plat, A, n, g, phi))
