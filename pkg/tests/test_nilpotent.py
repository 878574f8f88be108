import random

import pytest
from hypothesis import given, settings, strategies as st

from sdkex.core import derive_shared_key, transmission
from sdkex.errors import MalformedMessageError, ParameterError
from sdkex.nilpotent import (
    GenMap,
    NilpotentParams,
    NilpotentPlatform,
    Word,
    abelianization_matrix,
    cycle_check,
    endo_apply,
    endo_compose,
    free_reduce,
    is_automorphism,
    matrix_order_mod_p,
    nf_commutator,
    nf_inverse,
    nf_multiply,
    nf_power,
    sample_large_order_automorphism,
    word_normalize,
)

from oracles import Bilinear, brute_matrix_order, unitriangular_image

P2 = NilpotentParams(5, 2)


def iterated(u, n):
    out = u.params.identity()
    for _ in range(n):
        out = nf_multiply(out, u)
    return out


def test_params_validation():
    for bad in ((4, 3), (2, 3), (9, 3), (5, 1)):
        with pytest.raises(ParameterError):
            NilpotentParams(*bad)
    with pytest.raises(ParameterError):
        NilpotentParams(5, 3, c=3)
    P = NilpotentParams(7, 4)
    assert P.modulus == 49
    assert P.pairs == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def test_multiply_examples():
    P = P2
    u = P.element((3, 4), (7,))
    assert nf_multiply(u, P.identity()) == u == nf_multiply(P.identity(), u)
    x1x2 = nf_multiply(P.generator(1), P.generator(2))
    sq = nf_multiply(x1x2, x1x2)
    assert sq.alpha == (2, 2) and sq.beta == (P.modulus - 1,)
    # (ab)^2 = a^2 b^2 [b, a]
    a, b = P.generator(1), P.generator(2)
    rhs = nf_multiply(nf_multiply(nf_power(a, 2), nf_power(b, 2)), nf_commutator(b, a))
    assert sq == rhs


def test_multiply_against_bilinear_oracle(nil_params, rng):
    oracle = Bilinear(nil_params.r, nil_params.modulus)
    for _ in range(200):
        u, v = nil_params.random_element(rng), nil_params.random_element(rng)
        assert Bilinear.key(oracle.image(nf_multiply(u, v))) == Bilinear.key(
            oracle.mul(oracle.image(u), oracle.image(v))
        )


def test_bilinear_oracle_is_injective_small():
    P = NilpotentParams(3, 3)
    oracle = Bilinear(3, 9)
    rng = random.Random(1)
    seen = {}
    for _ in range(3000):
        u = P.random_element(rng)
        k = Bilinear.key(oracle.image(u))
        assert seen.setdefault(k, u) == u


def test_multiply_against_unitriangular_oracle(rng):
    P = NilpotentParams(7, 2)
    q = P.modulus
    for _ in range(300):
        u, v = P.random_element(rng), P.random_element(rng)
        import numpy as np
        prod = np.array(unitriangular_image(u, q), dtype=object).reshape(3, 3).dot(
            np.array(unitriangular_image(v, q), dtype=object).reshape(3, 3)) % q
        assert tuple(int(x) for x in prod.flatten()) == unitriangular_image(nf_multiply(u, v), q)


def test_group_axioms(nil_params, rng):
    e = nil_params.identity()
    for _ in range(1000):
        u, v, w = (nil_params.random_element(rng) for _ in range(3))
        assert nf_multiply(nf_multiply(u, v), w) == nf_multiply(u, nf_multiply(v, w))
    for _ in range(200):
        u = nil_params.random_element(rng)
        assert nf_multiply(u, e) == u
        ui = nf_inverse(u)
        assert nf_multiply(u, ui) == e == nf_multiply(ui, u)


def test_inverse_examples():
    P = NilpotentParams(5, 3)
    assert nf_inverse(P.identity()) == P.identity()
    assert nf_inverse(P.generator(2, 7)) == P.generator(2, -7)


def test_commutator(nil_params, rng):
    P = nil_params
    u = P.random_element(rng)
    assert nf_commutator(u, u) == P.identity()
    c12 = nf_commutator(P.generator(1), P.generator(2))
    assert c12.alpha == (0,) * P.r and c12.beta == (1,) + (0,) * (P.n_pairs - 1)
    assert c12 == P.commutator_generator(1, 2)
    for _ in range(200):
        u, v = P.random_element(rng), P.random_element(rng)
        direct = nf_multiply(nf_multiply(nf_inverse(u), nf_inverse(v)), nf_multiply(u, v))
        assert nf_commutator(u, v) == direct


def test_power_examples():
    P = P2
    u = P.element((1, 1))
    cube = nf_power(u, 3)
    assert cube.alpha == (3, 3) and cube.beta == (P.modulus - 3,)
    assert nf_power(u, 0) == P.identity()


@pytest.mark.parametrize("p", [3, 5])
def test_power_matches_iteration_and_exponent(p, rng):
    P = NilpotentParams(p, 3)
    for _ in range(20):
        u = P.random_element(rng)
        for n in (1, 2, 5, 13, P.modulus):
            assert nf_power(u, n) == iterated(u, n)
        assert nf_power(u, P.modulus) == P.identity()
        assert not any(nf_power(u, P.modulus).alpha)


def test_two_generator_power_identity(rng):
    P = NilpotentParams(7, 3)
    for _ in range(100):
        i, j = rng.sample(range(1, 4), 2)
        a, b = rng.randrange(P.modulus), rng.randrange(P.modulus)
        n = rng.randrange(60)
        x, y = P.generator(i, a), P.generator(j, b)
        want = nf_multiply(
            nf_multiply(nf_power(x, n), nf_power(y, n)),
            nf_power(nf_commutator(y, x), n * (n - 1) // 2),
        )
        assert nf_power(nf_multiply(x, y), n) == want


def test_class2_laws(nil_params, rng):
    P = nil_params
    for _ in range(300):
        u, v, w = (P.random_element(rng) for _ in range(3))
        c = nf_commutator(u, v)
        assert c.is_central()
        assert nf_multiply(c, w) == nf_multiply(w, c)
        assert nf_commutator(nf_multiply(u, v), w) == nf_multiply(nf_commutator(u, w), nf_commutator(v, w))
        assert nf_commutator(u, nf_multiply(v, w)) == nf_multiply(nf_commutator(u, v), nf_commutator(u, w))


def test_word_normalize():
    P = P2
    assert word_normalize(P, Word()) == P.identity()
    w = word_normalize(P, Word(((2, 1), (1, 1))))
    assert w.alpha == (1, 1) and w.beta == (P.modulus - 1,)
    # x2 x1 = x1 x2 [x1, x2]^-1
    want = nf_multiply(nf_multiply(P.generator(1), P.generator(2)), nf_inverse(P.commutator_generator(1, 2)))
    assert w == want
    raw = [(1, 2), (2, 3), (2, -3), (1, -1), (2, 1), (2, 0)]
    assert word_normalize(P, raw) == word_normalize(P, free_reduce(raw))
    assert free_reduce(raw) == Word(((1, 1), (2, 1)))
    with pytest.raises(ParameterError):
        Word(((1, 1), (1, 2)))
    with pytest.raises(ParameterError):
        word_normalize(P, [(3, 1)])


def test_word_of_commutator():
    P = NilpotentParams(7, 3)
    # [x1, x3] spelled out
    w = [(1, -1), (3, -1), (1, 1), (3, 1)]
    assert word_normalize(P, w) == P.commutator_generator(1, 3)


def test_endo_examples(nil_params, rng):
    P = nil_params
    u = P.random_element(rng)
    assert endo_apply(P.identity_map(), u) == u
    trivial = GenMap(P, (P.identity(),) * P.r)
    assert endo_apply(trivial, u) == P.identity()


def test_every_generator_map_is_homomorphism(nil_params, rng):
    P = nil_params
    for _ in range(200):
        phi = P.random_map(rng)
        u, v = P.random_element(rng), P.random_element(rng)
        assert endo_apply(phi, nf_multiply(u, v)) == nf_multiply(endo_apply(phi, u), endo_apply(phi, v))


def test_endo_apply_matches_word_substitution(rng):
    P = NilpotentParams(5, 3)
    for _ in range(30):
        phi = P.random_map(rng)
        letters = [(rng.randrange(1, 4), rng.choice((-2, -1, 1, 3))) for _ in range(8)]
        u = word_normalize(P, letters)
        direct = P.identity()
        for g, e in letters:
            y = phi.images[g - 1]
            direct = nf_multiply(direct, nf_power(y, e) if e > 0 else nf_power(nf_inverse(y), -e))
        assert endo_apply(phi, u) == direct


def test_compose(nil_params, rng):
    P = nil_params
    phi, psi = P.random_map(rng), P.random_map(rng)
    assert endo_compose(phi, P.identity_map()) == phi == endo_compose(P.identity_map(), phi)
    sq = endo_compose(phi, phi)
    for i in range(P.r):
        assert sq.images[i] == endo_apply(phi, phi.images[i])
    for _ in range(50):
        u = P.random_element(rng)
        assert endo_apply(endo_compose(psi, phi), u) == endo_apply(psi, endo_apply(phi, u))


def test_abelianization_matrix():
    P = NilpotentParams(5, 2)
    assert abelianization_matrix(P.identity_map()) == [[1, 0], [0, 1]]
    swap = GenMap(P, (P.generator(2), P.generator(1)))
    assert abelianization_matrix(swap) == [[0, 1], [1, 0]]
    assert is_automorphism(swap)
    frob = GenMap(P, tuple(P.generator(i, 5) for i in (1, 2)))
    assert not is_automorphism(frob)  # det = 25 = 0 mod 5


def test_automorphism_has_inverse_action(rng):
    # an automorphism permutes the p=3, r=2 group; a singular map does not
    P = NilpotentParams(3, 2)
    from itertools import product
    elems = [P.element((a, b), (c,)) for a, b, c in product(range(9), repeat=3)]
    for _ in range(10):
        phi = P.random_map(rng)
        image = {endo_apply(phi, u) for u in elems}
        assert (len(image) == len(elems)) == is_automorphism(phi)


def test_matrix_order_against_brute_force(rng):
    for p in (3, 5, 7):
        for _ in range(30):
            T = [[rng.randrange(p) for _ in range(2)] for _ in range(2)]
            if (T[0][0] * T[1][1] - T[0][1] * T[1][0]) % p == 0:
                continue
            want = brute_matrix_order(T, p, 100)
            assert matrix_order_mod_p(T, p, 100) == want
            if want and want > 3:
                assert matrix_order_mod_p(T, p, want - 1) is None


def test_sample_large_order_p5():
    P = NilpotentParams(5, 2)
    for seed in range(5):
        phi = sample_large_order_automorphism(P, seed, 20)
        assert is_automorphism(phi)
        # the largest element order in GL_2(F_5) is 24
        assert brute_matrix_order(abelianization_matrix(phi), 5, 1000) == 24


def test_sample_rejects_small_bound_and_exhausts():
    P = NilpotentParams(3, 2)
    with pytest.raises(ParameterError):
        sample_large_order_automorphism(P, 0, 1)
    from sdkex.errors import SamplingExhaustedError
    with pytest.raises(SamplingExhaustedError):
        sample_large_order_automorphism(P, 0, 9, retries=20)  # max order in GL_2(F_3) is 8


def test_cycle_check():
    P = NilpotentParams(5, 2)
    assert cycle_check(P.identity_map(), P.generator(1), 10) == (0, 1)
    swap = GenMap(P, (P.generator(2), P.generator(1)))
    assert cycle_check(swap, P.generator(1), 10) == (0, 2)
    phi = sample_large_order_automorphism(P, 3, 20)
    s, t = cycle_check(phi, P.generator(1), 1000)
    assert s == 0 and (t - s) % 24 == 0
    with pytest.raises(ParameterError):
        cycle_check(phi, P.generator(1), 0)


def test_cycle_check_large_p():
    P = NilpotentParams(18446744073709551629, 3)  # smallest prime above 2^64
    phi = sample_large_order_automorphism(P, 1, 10**4)
    assert cycle_check(phi, P.generator(1), 10**4) is None


def test_protocol_algebra(rng):
    P = NilpotentParams(7, 3)
    plat = NilpotentPlatform(P)
    phi = sample_large_order_automorphism(P, rng, 49)
    g = P.random_element(rng)
    for _ in range(20):
        m, n = rng.randrange(1, 10**6), rng.randrange(1, 10**6)
        a, b = transmission(plat, g, phi, m), transmission(plat, g, phi, n)
        k = transmission(plat, g, phi, m + n)
        assert derive_shared_key(plat, b, m, g, phi) == k == derive_shared_key(plat, a, n, g, phi)


def test_wire_encoding(rng):
    P = NilpotentParams(7, 3)
    plat = NilpotentPlatform(P)
    u = P.element((1, 2, 48), (0, 9, 10))
    data = plat.serialize(u)
    assert data == bytes([0, 3, 1, 2, 48, 0, 9, 10])
    assert plat.element_width == 8
    assert plat.deserialize(data) == u
    for bad in (data[:-1], bytes([0, 2]) + data[2:], data[:-1] + b"\x31"):
        with pytest.raises(MalformedMessageError):
            plat.deserialize(bad)
    big = NilpotentPlatform(NilpotentParams(18446744073709551629, 3))
    assert big.value_width == 17 and big.element_width == 2 + 6 * 17


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 48), min_size=6, max_size=6),
       st.lists(st.integers(0, 48), min_size=6, max_size=6))
def test_commutator_formula_property(x, y):
    P = NilpotentParams(7, 3)
    u, v = P.element(x[:3], x[3:]), P.element(y[:3], y[3:])
    assert nf_commutator(u, v) == nf_inverse(nf_commutator(v, u))
    assert nf_multiply(u, v) == nf_multiply(nf_multiply(v, u), nf_commutator(u, v))
