"""Square matrices over a group ring ``Z_q[S]`` with conjugation.

The default platform is 3x3 matrices over ``Z_7[A_5]``.  Ring elements are
length-``|S|`` coefficient vectors indexed by a canonical ordering of ``S``;
a matrix is stored as one ``(n, n, |S|)`` integer array so the whole matrix
product is a single dense matrix product.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .core import Platform
from .errors import MalformedMessageError, ParameterError

__all__ = [
    "FiniteGroupTable",
    "GroupRing",
    "GroupRingElement",
    "RingMatrix",
    "InnerAutoHandle",
    "MatrixPlatform",
    "alternating_group",
    "cyclic_group",
    "symmetric_group",
    "gr_add",
    "gr_multiply",
    "mat_multiply",
    "mat_power",
    "inner_apply",
    "verify_invertible",
    "sample_invertible",
    "random_matrix",
    "commute_check",
    "matrix_closed_form",
]


def _parity(perm):
    seen, sign = set(), 0
    for start in range(len(perm)):
        if start in seen:
            continue
        length, j = 0, start
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign ^= (length - 1) & 1
    return sign


class FiniteGroupTable:
    """Cayley table of a finite group given by its list of elements.

    ``cayley[a, b]`` is the index of ``elements[a] * elements[b]``.  For
    permutation groups the product applies the left factor first:
    ``(u * v)[x] = v[u[x]]``.
    """

    def __init__(self, elements, cayley, name=""):
        self.elements = tuple(elements)
        self.cayley = np.asarray(cayley, dtype=np.intp)
        self.cayley.flags.writeable = False
        self.name = name
        n = len(self.elements)
        if self.cayley.shape != (n, n):
            raise ParameterError("cayley table shape does not match element count")
        ids = [i for i in range(n) if np.array_equal(self.cayley[i], np.arange(n))]
        if len(ids) != 1:
            raise ParameterError("table has no unique identity")
        self.identity = ids[0]
        inv = np.empty(n, dtype=np.intp)
        for a in range(n):
            hits = np.flatnonzero(self.cayley[a] == self.identity)
            if len(hits) != 1 or self.cayley[hits[0], a] != self.identity:
                raise ParameterError(f"element {a} has no two-sided inverse")
            inv[a] = hits[0]
        self.inverse = inv
        self.inverse.flags.writeable = False

    @classmethod
    def from_permutations(cls, perms, name=""):
        perms = sorted(tuple(p) for p in perms)
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(v[x] for x in u)] for v in perms] for u in perms
        ]
        return cls(perms, table, name)

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteGroupTable({self.name or self.order})"

    def mul(self, a, b):
        return int(self.cayley[a, b])

    @cached_property
    def left_division(self):
        """``L[u, s]`` = index of ``u^-1 * s``."""
        return self.cayley[self.inverse, :]


@lru_cache(maxsize=None)
def alternating_group(n=5):
    perms = [p for p in itertools.permutations(range(n)) if _parity(p) == 0]
    return FiniteGroupTable.from_permutations(perms, f"A{n}")


@lru_cache(maxsize=None)
def symmetric_group(n):
    return FiniteGroupTable.from_permutations(itertools.permutations(range(n)), f"S{n}")


@lru_cache(maxsize=None)
def cyclic_group(n):
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroupTable(range(n), table, f"C{n}")


class GroupRing:
    """``Z_modulus[table]``; the modulus must be an odd prime below 256."""

    def __init__(self, table: FiniteGroupTable, modulus: int = 7):
        if modulus < 3 or modulus > 255 or any(
            modulus % d == 0 for d in range(2, int(modulus**0.5) + 1)
        ):
            raise ParameterError(f"modulus must be an odd prime < 256, got {modulus}")
        self.table = table
        self.modulus = modulus

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GroupRing):
            return NotImplemented
        return self.modulus == other.modulus and (
            self.table is other.table or np.array_equal(self.table.cayley, other.table.cayley)
        )

    def __hash__(self):
        return hash((self.modulus, self.table.order))

    def __repr__(self):
        return f"GroupRing(Z_{self.modulus}[{self.table.name or self.table.order}])"

    @property
    def size(self):
        return self.table.order

    def element(self, coeffs):
        return GroupRingElement(self, coeffs)

    def zero(self):
        return GroupRingElement(self, np.zeros(self.size, dtype=np.int64))

    def basis(self, g, coeff=1):
        """``coeff * g`` for the group element with canonical index ``g``."""
        c = np.zeros(self.size, dtype=np.int64)
        c[g] = coeff
        return GroupRingElement(self, c)

    def one(self):
        return self.basis(self.table.identity)


class GroupRingElement:
    """Formal sum of group elements with coefficients mod ``ring.modulus``."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GroupRing, coeffs):
        c = np.asarray(coeffs, dtype=np.int64) % ring.modulus
        if c.shape != (ring.size,):
            raise ParameterError(f"expected {ring.size} coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self.ring = ring
        self.coeffs = c

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __add__(self, other):
        return gr_add(self, other)

    def __mul__(self, other):
        return gr_multiply(self, other)

    def __repr__(self):
        terms = [f"{c}*g{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def _same_ring(a, b):
    if a.ring is not b.ring and a.ring != b.ring:
        raise ParameterError("operands live in different group rings")


def gr_add(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    _same_ring(a, b)
    return GroupRingElement(a.ring, a.coeffs + b.coeffs)


def gr_multiply(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    """Convolution ``c[s] = sum_{uv = s} a[u] b[v]``."""
    _same_ring(a, b)
    L = a.ring.table.left_division
    return GroupRingElement(a.ring, a.coeffs @ b.coeffs[L])


class RingMatrix:
    """Square matrix over a group ring, stored as an ``(n, n, |S|)`` array."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: GroupRing, data):
        d = np.asarray(data, dtype=np.int64) % ring.modulus
        if d.ndim != 3 or d.shape[0] != d.shape[1] or d.shape[2] != ring.size:
            raise ParameterError(f"bad matrix array shape {d.shape}")
        d.flags.writeable = False
        self.ring = ring
        self.data = d

    @classmethod
    def from_entries(cls, rows):
        rows = [list(r) for r in rows]
        ring = rows[0][0].ring
        for e in itertools.chain.from_iterable(rows):
            _same_ring(e, rows[0][0])
        return cls(ring, [[e.coeffs for e in r] for r in rows])

    @classmethod
    def identity(cls, ring, n=3):
        d = np.zeros((n, n, ring.size), dtype=np.int64)
        for i in range(n):
            d[i, i, ring.table.identity] = 1
        return cls(ring, d)

    @classmethod
    def scalar(cls, elem: GroupRingElement, n=3):
        d = np.zeros((n, n, elem.ring.size), dtype=np.int64)
        for i in range(n):
            d[i, i] = elem.coeffs
        return cls(elem.ring, d)

    @property
    def n(self):
        return self.data.shape[0]

    def entry(self, i, j):
        return GroupRingElement(self.ring, self.data[i, j])

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash(self.data.tobytes())

    def __matmul__(self, other):
        return mat_multiply(self, other)

    def __repr__(self):
        return f"RingMatrix({self.n}x{self.n} over {self.ring!r})"


def mat_multiply(X: RingMatrix, Y: RingMatrix) -> RingMatrix:
    _same_ring(X, Y)
    if X.n != Y.n:
        raise ParameterError("matrix sizes differ")
    n, S = X.n, X.ring.size
    L = X.ring.table.left_division
    # Yg[(k, u), (j, s)] = Y[k, j][u^-1 s]; float64 BLAS is exact below 2^53
    Yg = Y.data[:, :, L].transpose(0, 2, 1, 3).reshape(n * S, n * S)
    prod = X.data.reshape(n, n * S).astype(np.float64) @ Yg.astype(np.float64)
    return RingMatrix(X.ring, prod.reshape(n, n, S).astype(np.int64))


def mat_power(X: RingMatrix, e: int) -> RingMatrix:
    if e < 0:
        raise ParameterError("negative matrix power; use the inverse instead")
    result = RingMatrix.identity(X.ring, X.n)
    base = X
    while e:
        if e & 1:
            result = mat_multiply(result, base)
        e >>= 1
        if e:
            base = mat_multiply(base, base)
    return result


@dataclass(frozen=True, eq=False)
class InnerAutoHandle:
    """Conjugation ``M -> H^-j M H^j`` stored as ``(H^j, H^-j, j)``."""

    hpow: RingMatrix
    hpow_inv: RingMatrix
    j: int

    def __eq__(self, other):
        if not isinstance(other, InnerAutoHandle):
            return NotImplemented
        return self.hpow == other.hpow and self.hpow_inv == other.hpow_inv

    def __hash__(self):
        return hash(self.hpow)

    def check(self):
        ident = RingMatrix.identity(self.hpow.ring, self.hpow.n)
        return mat_multiply(self.hpow, self.hpow_inv) == ident


def inner_apply(handle: InnerAutoHandle, M: RingMatrix) -> RingMatrix:
    return mat_multiply(mat_multiply(handle.hpow_inv, M), handle.hpow)


def verify_invertible(H: RingMatrix, Hinv: RingMatrix) -> bool:
    ident = RingMatrix.identity(H.ring, H.n)
    return mat_multiply(H, Hinv) == ident and mat_multiply(Hinv, H) == ident


def random_element(ring: GroupRing, rng: random.Random) -> GroupRingElement:
    return GroupRingElement(ring, [rng.randrange(ring.modulus) for _ in range(ring.size)])


def random_matrix(ring: GroupRing, rng: random.Random, n: int = 3) -> RingMatrix:
    data = [[random_element(ring, rng).coeffs for _ in range(n)] for _ in range(n)]
    return RingMatrix(ring, data)


def elementary(ring, n, i, j, a: GroupRingElement):
    d = RingMatrix.identity(ring, n).data.copy()
    d[i, j] = a.coeffs
    return RingMatrix(ring, d)


def sample_invertible(
    seed,
    ring: GroupRing | None = None,
    n: int = 3,
    n_factors: int | None = None,
) -> tuple[RingMatrix, RingMatrix]:
    """Random ``(H, H^-1)`` built from factors with known inverses.

    Factors are elementary matrices ``I + a E_ij`` (inverse ``I - a E_ij``)
    and diagonal matrices of trivial units ``+-g`` (inverse ``+-g^-1``).
    ``n_factors`` defaults to a random count in [20, 40].
    """
    ring = ring or default_ring()
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if n_factors is None:
        n_factors = rng.randint(20, 40)
    H = RingMatrix.identity(ring, n)
    Hinv = H
    table = ring.table
    for _ in range(n_factors):
        if rng.random() < 0.75:
            i, j = rng.sample(range(n), 2)
            a = random_element(ring, rng)
            F = elementary(ring, n, i, j, a)
            Finv = elementary(ring, n, i, j, GroupRingElement(ring, -a.coeffs))
        else:
            d = np.zeros((n, n, ring.size), dtype=np.int64)
            dinv = np.zeros_like(d)
            for i in range(n):
                g = rng.randrange(table.order)
                sign = rng.choice((1, -1))
                d[i, i, g] = sign
                dinv[i, i, table.inverse[g]] = sign
            F, Finv = RingMatrix(ring, d), RingMatrix(ring, dinv)
        H = mat_multiply(H, F)
        Hinv = mat_multiply(Finv, Hinv)
    return H, Hinv


def commute_check(H: RingMatrix, M: RingMatrix) -> bool:
    """True iff ``H`` commutes with ``HM`` (a degenerate, rejected setup)."""
    HM = mat_multiply(H, M)
    return mat_multiply(H, HM) == mat_multiply(HM, H)


def matrix_closed_form(H: RingMatrix, Hinv: RingMatrix, M: RingMatrix, m: int) -> RingMatrix:
    """``H^-m (HM)^m``."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    return mat_multiply(mat_power(Hinv, m), mat_power(mat_multiply(H, M), m))


_DEFAULT_RING = None


def default_ring() -> GroupRing:
    """The shared ``Z_7[A_5]`` instance."""
    global _DEFAULT_RING
    if _DEFAULT_RING is None:
        _DEFAULT_RING = GroupRing(alternating_group(5), 7)
    return _DEFAULT_RING


class MatrixPlatform(Platform):
    """``n x n`` matrices over a group ring, endomorphisms are conjugations."""

    platform_id = 2

    def __init__(self, ring: GroupRing | None = None, n: int = 3):
        self.ring = ring or default_ring()
        self.n = n

    def __eq__(self, other):
        if not isinstance(other, MatrixPlatform):
            return NotImplemented
        return self.ring == other.ring and self.n == other.n

    def __hash__(self):
        return hash((id(self.ring), self.n))

    def __repr__(self):
        return f"MatrixPlatform({self.n}x{self.n} over {self.ring!r})"

    def endo(self, H: RingMatrix, Hinv: RingMatrix) -> InnerAutoHandle:
        if not verify_invertible(H, Hinv):
            raise ParameterError("Hinv is not a two-sided inverse of H")
        return InnerAutoHandle(H, Hinv, 1)

    def validate_element(self, x):
        if not isinstance(x, RingMatrix) or x.ring != self.ring or x.n != self.n:
            raise ParameterError(f"{x!r} is not an element of {self!r}")

    def multiply(self, x, y):
        return mat_multiply(x, y)

    def apply(self, endo, x):
        return inner_apply(endo, x)

    def compose(self, first, second):
        # first applied, then second: M -> (h1 h2)^-1 M (h1 h2)
        return InnerAutoHandle(
            mat_multiply(first.hpow, second.hpow),
            mat_multiply(second.hpow_inv, first.hpow_inv),
            first.j + second.j,
        )

    def identity_endo(self):
        ident = RingMatrix.identity(self.ring, self.n)
        return InnerAutoHandle(ident, ident, 0)

    @property
    def element_width(self):
        return self.n * self.n * self.ring.size

    def serialize(self, x):
        return x.data.astype(np.uint8).tobytes()

    def deserialize(self, data):
        if len(data) != self.element_width:
            raise MalformedMessageError(
                f"expected {self.element_width} bytes, got {len(data)}"
            )
        arr = np.frombuffer(data, dtype=np.uint8)
        if arr.max(initial=0) >= self.ring.modulus:
            raise MalformedMessageError("coefficient outside [0, modulus)")
        return RingMatrix(self.ring, arr.reshape(self.n, self.n, self.ring.size))
