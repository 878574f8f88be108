"""Fast invariant checks at test-scale parameters, runnable without pytest."""
from __future__ import annotations

import random
from typing import Callable, Iterator

from . import golden
from .core import MultCounter, derive_shared_key, sd_multiply, sd_power, transmission, CyclicExtension
from .groupring import (
    GroupRing,
    MatrixPlatform,
    alternating_group,
    gr_add,
    gr_multiply,
    mat_multiply,
    matrix_closed_form,
    random_element,
    random_matrix,
    sample_invertible,
    verify_invertible,
)
from .modp import ModPParams, ModPPlatform, modp_closed_form
from .nilpotent import (
    NilpotentParams,
    endo_apply,
    nf_commutator,
    nf_inverse,
    nf_multiply,
    nf_power,
)
from .protocol import Message, generate_params

PLATFORMS = ("modp", "matrix", "nilpotent")

Check = Callable[[], None]


def _agree(ps, rng, sessions):
    plat = ps.platform
    for _ in range(sessions):
        m, n = rng.randrange(1, 1 << ps.t), rng.randrange(1, 1 << ps.t)
        a = transmission(plat, ps.g, ps.phi, m)
        b = transmission(plat, ps.g, ps.phi, n)
        ka = derive_shared_key(plat, b, m, ps.g, ps.phi)
        kb = derive_shared_key(plat, a, n, ps.g, ps.phi)
        if not plat.equal(ka, kb):
            raise AssertionError(f"keys differ for m={m}, n={n}")


def _cost(ps):
    for t in (8, 64):
        c = MultCounter()
        sd_power(ps.platform, ps.g, ps.phi, (1 << t) + 1, c)
        if c.group_mults > 2 * t + 2:
            raise AssertionError(f"{c.group_mults} mults at t={t}")


def _golden(name):
    def check():
        got = golden.golden_message(name).to_bytes()
        want = bytes.fromhex(golden.GOLDEN_MESSAGES[name])
        if got != want:
            raise AssertionError("message bytes differ from the frozen vector")
        if Message.from_bytes(want).to_bytes() != want:
            raise AssertionError("wire round trip is not byte exact")
    return check


def _modp_checks() -> Iterator[tuple[str, Check]]:
    rng = random.Random(11)

    def closed_form():
        for _ in range(200):
            ps = generate_params("modp", rng.random(), toy=True)
            params = ModPParams(ps.platform.p, ps.g, ps.extra["k"])
            m = rng.randrange(1, 1 << 20)
            if transmission(ps.platform, ps.g, ps.phi, m) != modp_closed_form(params, m):
                raise AssertionError(f"closed form mismatch at {params}, m={m}")

    def small_example():
        plat = ModPPlatform(11)
        phi = plat.endo(3)
        if transmission(plat, 2, phi, 3) != 8 or derive_shared_key(plat, 8, 2, 2, phi) != 2:
            raise AssertionError("p=11 worked example failed")

    ps = generate_params("modp", 5, toy=True)
    yield "modp.worked_example", small_example
    yield "modp.closed_form", closed_form
    yield "modp.key_agreement", lambda: _agree(ps, rng, 50)
    yield "modp.cost_bound", lambda: _cost(ps)
    yield "modp.golden_wire", _golden("modp")


def _matrix_checks() -> Iterator[tuple[str, Check]]:
    rng = random.Random(7)
    small = GroupRing(alternating_group(4), 5)

    def ring_axioms():
        for _ in range(100):
            a, b, c = (random_element(small, rng) for _ in range(3))
            if gr_multiply(gr_multiply(a, b), c) != gr_multiply(a, gr_multiply(b, c)):
                raise AssertionError("group ring multiplication not associative")
            if gr_multiply(a, gr_add(b, c)) != gr_add(gr_multiply(a, b), gr_multiply(a, c)):
                raise AssertionError("distributivity fails")

    def sampler():
        H, Hinv = sample_invertible(rng.random(), small, 3)
        if not verify_invertible(H, Hinv):
            raise AssertionError("sampled H is not invertible")

    ps = generate_params("matrix", 3, toy=True, group="A4", modulus=5)

    def closed_form():
        H, Hinv, M = ps.phi.hpow, ps.phi.hpow_inv, ps.g
        for m in (1, 2, 7, 30):
            if transmission(ps.platform, M, ps.phi, m) != matrix_closed_form(H, Hinv, M, m):
                raise AssertionError(f"closed form mismatch at m={m}")

    def automorphism():
        X, Y = random_matrix(small, rng), random_matrix(small, rng)
        plat = ps.platform
        if plat.apply(ps.phi, mat_multiply(X, Y)) != mat_multiply(plat.apply(ps.phi, X), plat.apply(ps.phi, Y)):
            raise AssertionError("conjugation is not multiplicative")

    yield "matrix.ring_axioms", ring_axioms
    yield "matrix.sampler", sampler
    yield "matrix.conjugation_hom", automorphism
    yield "matrix.closed_form", closed_form
    yield "matrix.key_agreement", lambda: _agree(ps, rng, 10)
    yield "matrix.cost_bound", lambda: _cost(ps)
    yield "matrix.golden_wire", _golden("matrix")


def _nilpotent_checks() -> Iterator[tuple[str, Check]]:
    rng = random.Random(5)
    P = NilpotentParams(5, 3)

    def group_axioms():
        e = P.identity()
        for _ in range(300):
            u, v, w = (P.random_element(rng) for _ in range(3))
            if nf_multiply(nf_multiply(u, v), w) != nf_multiply(u, nf_multiply(v, w)):
                raise AssertionError("not associative")
            if nf_multiply(u, nf_inverse(u)) != e or nf_multiply(u, e) != u:
                raise AssertionError("identity/inverse law fails")
            uv_comm = nf_multiply(nf_multiply(nf_inverse(u), nf_inverse(v)), nf_multiply(u, v))
            if uv_comm != nf_commutator(u, v):
                raise AssertionError("commutator shortcut disagrees with definition")

    def power_law():
        for _ in range(200):
            u, v = P.random_element(rng), P.random_element(rng)
            n = rng.randrange(50)
            lhs = nf_power(nf_multiply(u, v), n)
            rhs = nf_multiply(
                nf_multiply(nf_power(u, n), nf_power(v, n)),
                nf_power(nf_commutator(v, u), n * (n - 1) // 2),
            )
            if lhs != rhs:
                raise AssertionError("(uv)^n law fails")

    def homomorphism():
        for _ in range(200):
            phi = P.random_map(rng)
            u, v = P.random_element(rng), P.random_element(rng)
            if endo_apply(phi, nf_multiply(u, v)) != nf_multiply(endo_apply(phi, u), endo_apply(phi, v)):
                raise AssertionError("generator map does not extend to a homomorphism")

    ps = generate_params("nilpotent", 9, toy=True)
    yield "nilpotent.group_axioms", group_axioms
    yield "nilpotent.power_law", power_law
    yield "nilpotent.endomorphism_extension", homomorphism
    yield "nilpotent.key_agreement", lambda: _agree(ps, rng, 50)
    yield "nilpotent.cost_bound", lambda: _cost(ps)
    yield "nilpotent.golden_wire", _golden("nilpotent")


def _core_checks() -> Iterator[tuple[str, Check]]:
    def fold():
        plat = ModPPlatform(1009)
        phi = plat.endo(17)
        ext = CyclicExtension(plat, phi)
        acc = ext.pair(5)
        for n in range(2, 65):
            acc = sd_multiply(acc, ext.pair(5))
            if sd_power(plat, 5, phi, n) != acc:
                raise AssertionError(f"power/fold mismatch at n={n}")

    yield "core.power_fold", fold


SUITES = {
    "modp": _modp_checks,
    "matrix": _matrix_checks,
    "nilpotent": _nilpotent_checks,
}


def iter_checks(platform: str | None = None) -> Iterator[tuple[str, Check]]:
    if platform is None:
        yield from _core_checks()
        for name in PLATFORMS:
            yield from SUITES[name]()
    else:
        yield from SUITES[platform]()


def run_selftest(platform: str | None = None, out=print) -> bool:
    ok = True
    for name, check in iter_checks(platform):
        try:
            check()
        except Exception as exc:  # report every failure, keep going
            ok = False
            out(f"FAIL {name}: {exc}")
        else:
            out(f"PASS {name}")
    return ok
