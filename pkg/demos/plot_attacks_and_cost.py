"""
Brute force and exponentiation cost
===================================

Square-and-multiply needs about 2 log2(n) products, while recovering m
from a transmission by search needs about m.  With toy exponents the
search is instant, which is the point of using large ones.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sdkex.analysis import attack_exponent_bruteforce, attack_key_from_quadruple, bench_sd_power
from sdkex.core import transmission
from sdkex.groupring import default_ring, mat_multiply, mat_power, sample_invertible
from sdkex.protocol import generate_params

ps = generate_params("modp", 2, toy=True)
A = transmission(ps.platform, ps.g, ps.phi, 4321)
res = attack_exponent_bruteforce(ps.platform, ps.g, ps.phi, A, 10**4)
print(f"recovered m = {res.recovered} after {res.trials} trials ({res.elapsed:.1f} ms)")

###############################################################################
# If H commutes with HM, the key is simply A * B and no search is needed.
ring = default_ring()
H, Hinv = sample_invertible(5, ring)
M = mat_power(H, 2)
res = attack_key_from_quadruple(H, Hinv, M, mat_power(M, 9), mat_power(M, 4), 1)
print("degenerate case, trials:", res.trials)

###############################################################################
# Group multiplications per exponentiation, against the 2t + 2 bound.
rows = bench_sd_power(ps.platform, ps.g, ps.phi, 256)
ts = [r.t for r in rows]
plt.plot(ts, [r.group_mults for r in rows], "o-", label="measured")
plt.plot(ts, [2 * t + 2 for t in ts], "--", label="2t + 2")
plt.xlabel("t  (n = 2^t)")
plt.ylabel("group multiplications")
plt.legend()
plt.savefig("sd_power_cost.png", dpi=80)
print("wrote sd_power_cost.png")
