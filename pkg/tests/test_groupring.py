import itertools
import random

import numpy as np
import pytest

from sdkex.core import derive_shared_key, transmission
from sdkex.errors import MalformedMessageError, ParameterError
from sdkex.groupring import (
    FiniteGroupTable,
    GroupRing,
    GroupRingElement,
    InnerAutoHandle,
    MatrixPlatform,
    RingMatrix,
    alternating_group,
    commute_check,
    cyclic_group,
    elementary,
    gr_add,
    gr_multiply,
    inner_apply,
    mat_multiply,
    mat_power,
    matrix_closed_form,
    random_element,
    random_matrix,
    sample_invertible,
    verify_invertible,
)

from oracles import brute_group_ring_product, brute_matrix_product, compose


def test_a5_table():
    t = alternating_group(5)
    assert t.order == 60
    assert t.elements == tuple(sorted(t.elements))
    assert t.elements[t.identity] == (0, 1, 2, 3, 4)
    rng = random.Random(0)
    for _ in range(1000):
        a, b, c = (rng.randrange(60) for _ in range(3))
        assert t.cayley[t.cayley[a, b], c] == t.cayley[a, t.cayley[b, c]]
    for a in range(60):
        assert t.cayley[a, t.inverse[a]] == t.identity == t.cayley[t.inverse[a], a]
        for b in range(60):
            assert t.elements[t.cayley[a, b]] == compose(t.elements[a], t.elements[b])


def test_table_validation():
    with pytest.raises(ParameterError):
        FiniteGroupTable(range(2), [[0, 0], [0, 0]])
    with pytest.raises(ParameterError):
        GroupRing(cyclic_group(3), 9)


def test_add(a5_ring, rng):
    e = a5_ring.table.identity
    a = random_element(a5_ring, rng)
    b = random_element(a5_ring, rng)
    assert gr_add(a, a5_ring.zero()) == a
    assert gr_add(a5_ring.basis(e, 3), a5_ring.basis(e, 5)) == a5_ring.basis(e, 1)
    assert gr_add(a, b) == gr_add(b, a)


def test_multiply_units(a5_ring, rng):
    t = a5_ring.table
    a = random_element(a5_ring, rng)
    assert gr_multiply(a, a5_ring.one()) == a == gr_multiply(a5_ring.one(), a)
    for g in range(60):
        assert gr_multiply(a5_ring.basis(g), a5_ring.basis(t.inverse[g])) == a5_ring.one()


def test_multiply_against_brute_force(a5_ring, rng):
    elements = a5_ring.table.elements
    for _ in range(5):
        a, b = random_element(a5_ring, rng), random_element(a5_ring, rng)
        want = brute_group_ring_product(elements, a.coeffs, b.coeffs, 7)
        assert np.array_equal(gr_multiply(a, b).coeffs, want)


def test_ring_axioms(a4_ring, rng):
    for _ in range(1000):
        a, b, c = (random_element(a4_ring, rng) for _ in range(3))
        assert gr_multiply(gr_multiply(a, b), c) == gr_multiply(a, gr_multiply(b, c))
    for _ in range(200):
        a, b, c = (random_element(a4_ring, rng) for _ in range(3))
        assert gr_multiply(a, gr_add(b, c)) == gr_add(gr_multiply(a, b), gr_multiply(a, c))
        assert gr_multiply(gr_add(b, c), a) == gr_add(gr_multiply(b, a), gr_multiply(c, a))


def test_group_ring_is_noncommutative(a5_ring):
    t = a5_ring.table
    a, b = next((a, b) for a in range(60) for b in range(60) if t.cayley[a, b] != t.cayley[b, a])
    assert gr_multiply(a5_ring.basis(a), a5_ring.basis(b)) != gr_multiply(a5_ring.basis(b), a5_ring.basis(a))


def test_table_mismatch(a5_ring, s3_ring):
    with pytest.raises(ParameterError):
        gr_add(a5_ring.one(), s3_ring.one())
    with pytest.raises(ParameterError):
        gr_multiply(a5_ring.one(), s3_ring.one())


def test_mat_multiply_against_brute_force(s3_ring, rng):
    elements = s3_ring.table.elements
    for n in (2, 3):
        X, Y = random_matrix(s3_ring, rng, n), random_matrix(s3_ring, rng, n)
        assert np.array_equal(mat_multiply(X, Y).data, brute_matrix_product(elements, X.data, Y.data, 5))


def test_mat_identity_and_associativity(a5_ring, rng):
    I = RingMatrix.identity(a5_ring)
    for _ in range(20):
        X, Y, Z = (random_matrix(a5_ring, rng) for _ in range(3))
        assert mat_multiply(X, I) == X == mat_multiply(I, X)
        assert mat_multiply(mat_multiply(X, Y), Z) == mat_multiply(X, mat_multiply(Y, Z))


def test_from_entries_roundtrip(s3_ring, rng):
    X = random_matrix(s3_ring, rng, 3)
    rows = [[X.entry(i, j) for j in range(3)] for i in range(3)]
    assert RingMatrix.from_entries(rows) == X


def test_inner_apply(a5_ring, rng):
    M = random_matrix(a5_ring, rng)
    I = RingMatrix.identity(a5_ring)
    assert inner_apply(InnerAutoHandle(I, I, 1), M) == M
    H, Hinv = sample_invertible(rng, a5_ring)
    h1 = InnerAutoHandle(H, Hinv, 1)
    assert inner_apply(h1, I) == I
    h2 = InnerAutoHandle(mat_power(H, 2), mat_power(Hinv, 2), 2)
    assert inner_apply(h2, M) == inner_apply(h1, inner_apply(h1, M))
    plat = MatrixPlatform(a5_ring)
    assert plat.compose(h1, h1) == h2


def test_conjugation_is_automorphism(a5_ring, rng):
    H, Hinv = sample_invertible(rng, a5_ring)
    h = InnerAutoHandle(H, Hinv, 1)
    for _ in range(10):
        X, Y = random_matrix(a5_ring, rng), random_matrix(a5_ring, rng)
        assert inner_apply(h, mat_multiply(X, Y)) == mat_multiply(inner_apply(h, X), inner_apply(h, Y))


def test_verify_invertible(a5_ring, rng):
    I = RingMatrix.identity(a5_ring)
    e = a5_ring.table.identity
    two = RingMatrix.scalar(a5_ring.basis(e, 2))
    four = RingMatrix.scalar(a5_ring.basis(e, 4))
    assert verify_invertible(I, I)
    assert not verify_invertible(I, two)
    assert verify_invertible(two, four)  # 2 * 4 = 8 = 1 mod 7
    H, Hinv = sample_invertible(123)
    assert verify_invertible(H, Hinv)


def test_sampler_edge_cases(a5_ring, rng):
    I = RingMatrix.identity(a5_ring)
    assert sample_invertible(1, a5_ring, n_factors=0) == (I, I)
    a = random_element(a5_ring, rng)
    E = elementary(a5_ring, 3, 0, 2, a)
    Einv = elementary(a5_ring, 3, 0, 2, GroupRingElement(a5_ring, -a.coeffs))
    assert verify_invertible(E, Einv)
    for seed in range(5):
        H, Hinv = sample_invertible(seed, a5_ring)
        assert verify_invertible(H, Hinv)
        assert H != I


def test_sampler_one_factor(s3_ring):
    # a single factor is either elementary (inverse negates the entry) or a
    # diagonal of trivial units
    for seed in range(20):
        H, Hinv = sample_invertible(seed, s3_ring, n_factors=1)
        off = [(i, j) for i in range(3) for j in range(3) if i != j and H.data[i, j].any()]
        if off:
            (i, j), = off
            assert np.array_equal(Hinv.data[i, j], (-H.data[i, j]) % 5)
        assert verify_invertible(H, Hinv)


def test_commute_check(a5_ring, rng):
    I = RingMatrix.identity(a5_ring)
    H, _ = sample_invertible(rng, a5_ring)
    M = random_matrix(a5_ring, rng)
    assert commute_check(H, I)
    assert commute_check(I, M)
    assert not commute_check(H, M)


def test_closed_form(a5_ring, rng):
    H, Hinv = sample_invertible(rng, a5_ring)
    M = random_matrix(a5_ring, rng)
    plat = MatrixPlatform(a5_ring)
    phi = plat.endo(H, Hinv)
    assert matrix_closed_form(H, Hinv, M, 1) == M
    I = RingMatrix.identity(a5_ring)
    assert matrix_closed_form(I, I, M, 5) == mat_power(M, 5)
    # literal product phi^(m-1)(M) ... phi(M) M for small m
    for m in range(1, 7):
        lit = M
        for i in range(1, m):
            hi = InnerAutoHandle(mat_power(H, i), mat_power(Hinv, i), i)
            lit = mat_multiply(inner_apply(hi, M), lit)
        assert transmission(plat, M, phi, m) == lit == matrix_closed_form(H, Hinv, M, m)
    for m in (17, 50):
        assert transmission(plat, M, phi, m) == matrix_closed_form(H, Hinv, M, m)


def test_key_closed_form(a5_ring, rng):
    H, Hinv = sample_invertible(rng, a5_ring)
    M = random_matrix(a5_ring, rng)
    plat = MatrixPlatform(a5_ring)
    phi = plat.endo(H, Hinv)
    m, n = 13, 29
    A, B = transmission(plat, M, phi, m), transmission(plat, M, phi, n)
    K = matrix_closed_form(H, Hinv, M, m + n)
    assert derive_shared_key(plat, B, m, M, phi) == K == derive_shared_key(plat, A, n, M, phi)


def test_endo_rejects_bad_inverse(a5_ring, rng):
    H, _ = sample_invertible(rng, a5_ring)
    with pytest.raises(ParameterError):
        MatrixPlatform(a5_ring).endo(H, H)


def test_wire_encoding(a5_ring, rng):
    plat = MatrixPlatform(a5_ring)
    M = random_matrix(a5_ring, rng)
    data = plat.serialize(M)
    assert len(data) == plat.element_width == 540
    assert data[60:120] == bytes(int(c) for c in M.data[0, 1])
    assert plat.deserialize(data) == M
    with pytest.raises(MalformedMessageError):
        plat.deserialize(data[:-1])
    with pytest.raises(MalformedMessageError):
        plat.deserialize(b"\x07" + data[1:])


def test_rings_compare_by_value():
    r1 = GroupRing(alternating_group(4), 5)
    r2 = GroupRing(alternating_group(4), 5)
    assert r1 == r2
    assert r1 != GroupRing(alternating_group(4), 7)
    x = RingMatrix.identity(r1, 2)
    assert mat_multiply(x, RingMatrix.identity(r2, 2)) == x
