"""Desk-scale experiments on the security assumptions and the cost claim.

The attacks are deliberate linear scans.  They show what an eavesdropper
must solve, not how to solve it efficiently.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any

from .core import CyclicExtension, MultCounter, Platform, sd_multiply, sd_power
from .errors import ParameterError
from .groupring import (
    MatrixPlatform,
    RingMatrix,
    commute_check,
    inner_apply,
    mat_multiply,
)

__all__ = [
    "AttackResult",
    "attack_exponent_bruteforce",
    "attack_key_from_quadruple",
    "BenchRow",
    "bench_sd_power",
    "cost_bound",
]


@dataclass(frozen=True)
class AttackResult:
    recovered: int | None
    trials: int
    elapsed: float  # milliseconds
    key: Any = None


def attack_exponent_bruteforce(
    platform: Platform, g, phi, intercepted, bound: int
) -> AttackResult:
    """Smallest ``m' <= bound`` whose transmission equals ``intercepted``.

    ``(g, phi)^(m'+1)`` is built from ``(g, phi)^m'`` with one semidirect
    multiplication, so the scan costs ``bound`` products.  Any hit is
    checked again by a fresh square-and-multiply before it is reported.
    """
    if bound < 1:
        raise ParameterError("bound must be >= 1")
    start = time.perf_counter()
    ext = CyclicExtension(platform, phi)
    base = ext.pair(g)
    acc = base
    for m in range(1, bound + 1):
        if m > 1:
            acc = sd_multiply(acc, base)
        if platform.equal(acc.elem, intercepted):
            if not platform.equal(sd_power(platform, g, phi, m).elem, intercepted):
                raise RuntimeError(f"incremental scan disagrees with sd_power at m={m}")
            return AttackResult(m, m, (time.perf_counter() - start) * 1e3)
    return AttackResult(None, bound, (time.perf_counter() - start) * 1e3)


def attack_key_from_quadruple(
    H: RingMatrix,
    Hinv: RingMatrix,
    M: RingMatrix,
    A: RingMatrix,
    B: RingMatrix,
    bound: int,
) -> AttackResult:
    """Guess ``K = H^-(m+n) (HM)^(m+n)`` from public ``(H, M, A, B)``.

    If ``H`` commutes with ``HM`` the key is ``A * B`` and no search is
    needed.  Otherwise ``m`` is recovered from ``A`` by brute force and the
    key is ``phi^m(B) * A``.
    """
    if commute_check(H, M):
        return AttackResult(None, 0, 0.0, mat_multiply(A, B))
    plat = MatrixPlatform(M.ring, M.n)
    phi = plat.endo(H, Hinv)
    res = attack_exponent_bruteforce(plat, M, phi, A, bound)
    if res.recovered is None:
        return res
    start = time.perf_counter()
    handle = sd_power(plat, M, phi, res.recovered).endo
    key = mat_multiply(inner_apply(handle, B), A)
    return AttackResult(res.recovered, res.trials, res.elapsed + (time.perf_counter() - start) * 1e3, key)


def cost_bound(n: int) -> int:
    return 2 * (n.bit_length() - 1) + 2


@dataclass(frozen=True)
class BenchRow:
    t: int
    group_mults: int
    endo_applies: int
    endo_composes: int
    seconds: float

    @property
    def within_bound(self) -> bool:
        return self.group_mults <= 2 * self.t + 2


def bench_sd_power(platform: Platform, g, phi, max_bits: int, step: int = 8) -> list[BenchRow]:
    """Instrumented ``sd_power`` at ``n = 2^t`` for ``t = step, 2*step, ..., max_bits``."""
    rows = []
    for t in range(step, max_bits + 1, step):
        counter = MultCounter()
        start = time.perf_counter()
        sd_power(platform, g, phi, 1 << t, counter)
        rows.append(
            BenchRow(t, counter.group_mults, counter.endo_applies, counter.endo_composes,
                     time.perf_counter() - start)
        )
    return rows
