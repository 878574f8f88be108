"""Free nilpotent class-2 group of exponent p^2 on r generators.

Every element has a unique normal form

    x_1^a_1 ... x_r^a_r * prod_{i<j} [x_i, x_j]^b_ij,    0 <= a_i, b_ij < p^2,

with ``[a, b] = a^-1 b^-1 a b``.  Commutators are central, so products are
collected with the single swap rule ``x_j^a x_i^b = x_i^b x_j^a [x_i, x_j]^(-ab)``
for ``i < j``, giving

    alpha'' = alpha + alpha'
    beta''_ij = beta_ij + beta'_ij - alpha_j * alpha'_i.

Endomorphisms are arbitrary generator images (``GenMap``); the group has
``|G|^r`` of them because every generator map extends to one.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from sympy import isprime

from .core import Platform
from .errors import MalformedMessageError, ParameterError, SamplingExhaustedError

__all__ = [
    "NilpotentParams",
    "NormalForm",
    "Word",
    "GenMap",
    "NilpotentPlatform",
    "nf_multiply",
    "nf_inverse",
    "nf_commutator",
    "nf_power",
    "free_reduce",
    "word_normalize",
    "endo_apply",
    "endo_compose",
    "abelianization_matrix",
    "is_automorphism",
    "matrix_order_mod_p",
    "sample_large_order_automorphism",
    "cycle_check",
]


@dataclass(frozen=True)
class NilpotentParams:
    p: int
    r: int = 3
    c: int = 2

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise ParameterError(f"p={self.p} must be an odd prime")
        if self.r < 2:
            raise ParameterError(f"need at least 2 generators, got r={self.r}")
        if self.c != 2:
            raise ParameterError("only nilpotency class 2 is supported")

    @property
    def modulus(self) -> int:
        return self.p * self.p

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Commutator index pairs ``(i, j)``, ``i < j``, 0-based, lexicographic."""
        return tuple((i, j) for i in range(self.r) for j in range(i + 1, self.r))

    @property
    def n_pairs(self) -> int:
        return self.r * (self.r - 1) // 2

    def identity(self) -> "NormalForm":
        return NormalForm(self, (0,) * self.r, (0,) * self.n_pairs)

    def generator(self, i: int, power: int = 1) -> "NormalForm":
        """``x_i^power`` with ``i`` 1-based."""
        if not 1 <= i <= self.r:
            raise ParameterError(f"generator index {i} outside [1, {self.r}]")
        alpha = [0] * self.r
        alpha[i - 1] = power % self.modulus
        return NormalForm(self, tuple(alpha), (0,) * self.n_pairs)

    def commutator_generator(self, i: int, j: int, power: int = 1) -> "NormalForm":
        """``[x_i, x_j]^power`` with 1-based ``i < j``."""
        beta = [0] * self.n_pairs
        beta[self.pairs.index((i - 1, j - 1))] = power % self.modulus
        return NormalForm(self, (0,) * self.r, tuple(beta))

    def element(self, alpha: Sequence[int], beta: Sequence[int] = ()) -> "NormalForm":
        q = self.modulus
        beta = tuple(beta) or (0,) * self.n_pairs
        return NormalForm(self, tuple(a % q for a in alpha), tuple(b % q for b in beta))

    def random_element(self, rng: random.Random) -> "NormalForm":
        q = self.modulus
        return NormalForm(
            self,
            tuple(rng.randrange(q) for _ in range(self.r)),
            tuple(rng.randrange(q) for _ in range(self.n_pairs)),
        )

    def identity_map(self) -> "GenMap":
        return GenMap(self, tuple(self.generator(i) for i in range(1, self.r + 1)))

    def random_map(self, rng: random.Random) -> "GenMap":
        return GenMap(self, tuple(self.random_element(rng) for _ in range(self.r)))


@dataclass(frozen=True)
class NormalForm:
    params: NilpotentParams
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        q = self.params.modulus
        if len(self.alpha) != self.params.r or len(self.beta) != self.params.n_pairs:
            raise ParameterError("exponent vector lengths do not match params")
        if any(not 0 <= v < q for v in self.alpha + self.beta):
            raise ParameterError(f"exponents must lie in [0, {q})")

    def __mul__(self, other):
        return nf_multiply(self, other)

    def is_identity(self) -> bool:
        return not any(self.alpha) and not any(self.beta)

    def is_central(self) -> bool:
        return not any(self.alpha)


def _same_params(u, v):
    if u.params != v.params:
        raise ParameterError("elements belong to different groups")


def nf_multiply(u: NormalForm, v: NormalForm) -> NormalForm:
    _same_params(u, v)
    P = u.params
    q = P.modulus
    a, a2 = u.alpha, v.alpha
    alpha = tuple((x + y) % q for x, y in zip(a, a2))
    beta = tuple(
        (b + b2 - a[j] * a2[i]) % q
        for (i, j), b, b2 in zip(P.pairs, u.beta, v.beta)
    )
    return NormalForm(P, alpha, beta)


def nf_inverse(u: NormalForm) -> NormalForm:
    P = u.params
    q = P.modulus
    a = u.alpha
    alpha = tuple(-x % q for x in a)
    beta = tuple((-b - a[i] * a[j]) % q for (i, j), b in zip(P.pairs, u.beta))
    return NormalForm(P, alpha, beta)


def nf_commutator(u: NormalForm, v: NormalForm) -> NormalForm:
    """``[u, v] = u^-1 v^-1 u v``; depends only on the abelianized parts."""
    _same_params(u, v)
    P = u.params
    q = P.modulus
    a, b = u.alpha, v.alpha
    beta = tuple((a[i] * b[j] - a[j] * b[i]) % q for i, j in P.pairs)
    return NormalForm(P, (0,) * P.r, beta)


def nf_power(u: NormalForm, n: int) -> NormalForm:
    """``u^n`` for ``n >= 0`` by square-and-multiply."""
    if n < 0:
        raise ParameterError("use nf_inverse for negative powers")
    result = u.params.identity()
    base = u
    while n:
        if n & 1:
            result = nf_multiply(result, base)
        n >>= 1
        if n:
            base = nf_multiply(base, base)
    return result


def _power_closed(u: NormalForm, n: int) -> NormalForm:
    # u^n = (n alpha, n beta - C(n,2) alpha_i alpha_j); any integer n
    P = u.params
    q = P.modulus
    a = u.alpha
    t = n * (n - 1) // 2
    alpha = tuple(n * x % q for x in a)
    beta = tuple((n * b - t * a[i] * a[j]) % q for (i, j), b in zip(P.pairs, u.beta))
    return NormalForm(P, alpha, beta)


@dataclass(frozen=True)
class Word:
    """Reduced word in the free group: ``((generator, exponent), ...)``.

    Generators are 1-based; exponents are nonzero and adjacent letters use
    different generators.
    """

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(e)) for g, e in self.letters)
        object.__setattr__(self, "letters", letters)
        for k, (g, e) in enumerate(letters):
            if e == 0:
                raise ParameterError("word letters must have nonzero exponents")
            if k and letters[k - 1][0] == g:
                raise ParameterError("word is not reduced; use free_reduce")


def free_reduce(letters: Iterable[tuple[int, int]]) -> Word:
    """Merge adjacent powers of the same generator and drop cancellations."""
    stack: list[list[int]] = []
    for g, e in letters:
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        elif e:
            stack.append([g, e])
    return Word(tuple((g, e) for g, e in stack))


def word_normalize(params: NilpotentParams, w) -> NormalForm:
    """Normal form of a free-group word (a ``Word`` or a letter sequence)."""
    letters = w.letters if isinstance(w, Word) else tuple(w)
    result = params.identity()
    for g, e in letters:
        if not 1 <= g <= params.r:
            raise ParameterError(f"generator index {g} outside [1, {params.r}]")
        result = nf_multiply(result, params.generator(g, e))
    return result


@dataclass(frozen=True)
class GenMap:
    """Endomorphism given by the images of ``x_1, ..., x_r``."""

    params: NilpotentParams
    images: tuple[NormalForm, ...]

    def __post_init__(self):
        if len(self.images) != self.params.r:
            raise ParameterError(f"need {self.params.r} generator images")
        for y in self.images:
            _same_params(y, self.params.identity())

    @cached_property
    def _commutator_images(self):
        im = self.images
        return tuple(nf_commutator(im[i], im[j]) for i, j in self.params.pairs)


def endo_apply(phi: GenMap, u: NormalForm) -> NormalForm:
    """``prod_i phi(x_i)^alpha_i * prod_{i<j} [phi(x_i), phi(x_j)]^beta_ij``."""
    _same_params(u, phi.params.identity())
    result = u.params.identity()
    for y, a in zip(phi.images, u.alpha):
        if a:
            result = nf_multiply(result, _power_closed(y, a))
    for c, b in zip(phi._commutator_images, u.beta):
        if b:
            result = nf_multiply(result, _power_closed(c, b))
    return result


def endo_compose(psi: GenMap, phi: GenMap) -> GenMap:
    """``psi o phi``: apply ``phi`` first, then ``psi``."""
    if psi.params != phi.params:
        raise ParameterError("maps belong to different groups")
    return GenMap(phi.params, tuple(endo_apply(psi, y) for y in phi.images))


def _det_mod(M: Sequence[Sequence[int]], q: int) -> int:
    # Bareiss fraction-free elimination over the integers
    A = [list(row) for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for s in range(k + 1, n):
                if A[s][k]:
                    A[k], A[s] = A[s], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] % q


def abelianization_matrix(phi: GenMap) -> list[list[int]]:
    """r x r matrix mod p^2 whose column i is the alpha vector of ``phi(x_i)``."""
    r = phi.params.r
    return [[phi.images[i].alpha[row] for i in range(r)] for row in range(r)]


def is_automorphism(phi: GenMap) -> bool:
    """A map is an automorphism iff its abelianization is invertible mod p."""
    P = phi.params
    return _det_mod(abelianization_matrix(phi), P.modulus) % P.p != 0


def _matmul_mod(A, B, q):
    n = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(n)) % q for j in range(n))
        for i in range(n)
    )


def matrix_order_mod_p(T: Sequence[Sequence[int]], p: int, limit: int) -> int | None:
    """Multiplicative order of ``T`` mod ``p`` if it is at most ``limit``.

    Baby-step giant-step over ``T^b`` and ``T^(am)``; returns None when no
    ``1 <= k <= limit`` has ``T^k = I``.  ``T`` must be invertible mod p.
    """
    n = len(T)
    T = tuple(tuple(x % p for x in row) for row in T)
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    m = max(1, math.isqrt(limit) + 1)
    baby = {}
    cur = ident
    for b in range(m):
        if b and cur == ident:
            return b
        baby.setdefault(cur, b)
        cur = _matmul_mod(cur, T, p)
    giant = cur  # T^m
    cur = giant
    for a in range(1, m + 2):
        b = baby.get(cur)
        if b is not None:
            k = a * m - b
            return k if k <= limit else None
        cur = _matmul_mod(cur, giant, p)
    return None


def sample_large_order_automorphism(
    params: NilpotentParams,
    seed,
    min_order: int,
    max_steps: int = 10**6,
    retries: int = 64,
) -> GenMap:
    """Random automorphism whose abelianization has order mod p above ``min_order``.

    Order mod p divides the order mod p^2, so this lower-bounds the order of
    the automorphism's action.  Certification is a bounded baby-step
    giant-step search costing about ``2 * sqrt(min_order)`` matrix products.
    """
    if min_order < 2:
        raise ParameterError("min_order must be >= 2")
    if 2 * (math.isqrt(min_order) + 2) > max_steps:
        raise ParameterError(f"min_order={min_order} needs more than {max_steps} steps")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(retries):
        phi = params.random_map(rng)
        if not is_automorphism(phi):
            continue
        if matrix_order_mod_p(abelianization_matrix(phi), params.p, min_order) is None:
            return phi
    raise SamplingExhaustedError(
        f"no automorphism of order > {min_order} mod {params.p} in {retries} tries"
    )


def cycle_check(phi: GenMap, g: NormalForm, bound: int) -> tuple[int, int] | None:
    """First ``(s, t)``, ``s < t <= bound``, with ``phi^s(g) == phi^t(g)``."""
    if bound < 1:
        raise ParameterError("bound must be >= 1")
    seen = {g: 0}
    cur = g
    for t in range(1, bound + 1):
        cur = endo_apply(phi, cur)
        s = seen.get(cur)
        if s is not None:
            return s, t
        seen[cur] = t
    return None


class NilpotentPlatform(Platform):
    """Platform adapter; endomorphism handles are ``GenMap`` values."""

    platform_id = 3

    def __init__(self, params: NilpotentParams):
        self.params = params

    def __eq__(self, other):
        if not isinstance(other, NilpotentPlatform):
            return NotImplemented
        return self.params == other.params

    def __hash__(self):
        return hash(self.params)

    def __repr__(self):
        return f"NilpotentPlatform(p={self.params.p}, r={self.params.r})"

    def validate_element(self, x):
        if not isinstance(x, NormalForm) or x.params != self.params:
            raise ParameterError(f"{x!r} is not an element of {self!r}")

    def multiply(self, x, y):
        return nf_multiply(x, y)

    def apply(self, endo, x):
        return endo_apply(endo, x)

    def compose(self, first, second):
        return endo_compose(second, first)

    def identity_endo(self):
        return self.params.identity_map()

    @property
    def value_width(self) -> int:
        return (self.params.modulus.bit_length() + 7) // 8

    @property
    def element_width(self):
        P = self.params
        return 2 + (P.r + P.n_pairs) * self.value_width

    def serialize(self, x):
        w = self.value_width
        out = self.params.r.to_bytes(2, "big")
        return out + b"".join(v.to_bytes(w, "big") for v in x.alpha + x.beta)

    def deserialize(self, data):
        P = self.params
        if len(data) != self.element_width:
            raise MalformedMessageError(
                f"expected {self.element_width} bytes, got {len(data)}"
            )
        if int.from_bytes(data[:2], "big") != P.r:
            raise MalformedMessageError("generator count does not match params")
        w = self.value_width
        vals = [int.from_bytes(data[k : k + w], "big") for k in range(2, len(data), w)]
        if any(v >= P.modulus for v in vals):
            raise MalformedMessageError("exponent outside [0, p^2)")
        return NormalForm(P, tuple(vals[: P.r]), tuple(vals[P.r :]))
