"""Sums of k positive cubes: enumeration, membership sieve, witnesses."""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from fractions import Fraction


class ResourceLimit(Exception):
    """A sieve or search was asked to exceed its configured ceiling."""


class NotFound(Exception):
    """No witness exists within the given search limit."""


DEFAULT_SIEVE_CEILING = 10**8

MAGIC = b"CUBESIEV"
_HEADER = struct.Struct("<8sIQ")  # magic, k as u32, N as u64


def icbrt(n: int) -> int:
    """Floor of the real cube root of n >= 0."""
    if n < 0:
        raise ValueError("icbrt requires n >= 0")
    if n == 0:
        return 0
    r = 1 << ((n.bit_length() + 2) // 3)
    while r * r * r > n:
        r = (2 * r + n // (r * r)) // 3
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def has_representation(n: int, k: int) -> bool:
    """Whether n is a sum of k positive cubes (early-exit search)."""
    if n < 1:
        raise ValueError("n must be positive")
    if k < 1:
        raise ValueError("k must be positive")

    def rec(rem: int, parts: int, lo: int) -> bool:
        if parts == 1:
            c = icbrt(rem)
            return c >= lo and c * c * c == rem
        a = lo
        while parts * a * a * a <= rem:
            if rec(rem - a * a * a, parts - 1, a):
                return True
            a += 1
        return False

    return rec(n, k, 1)


def representations(n: int, k: int) -> list[tuple[int, ...]]:
    """All canonical (non-decreasing) ways to write n as a sum of k positive cubes."""
    if n < 1:
        raise ValueError("n must be positive")
    if k < 2:
        raise ValueError("k must be at least 2")
    out: list[tuple[int, ...]] = []
    stack: list[int] = []

    def rec(rem: int, parts: int, lo: int) -> None:
        if parts == 1:
            c = icbrt(rem)
            if c >= lo and c * c * c == rem:
                out.append(tuple(stack) + (c,))
            return
        a = lo
        while parts * a * a * a <= rem:
            stack.append(a)
            rec(rem - a * a * a, parts - 1, a)
            stack.pop()
            a += 1

    rec(n, k, 1)
    return out


@dataclass(frozen=True)
class CubeSieve:
    """Bit n set iff n is a sum of exactly k positive cubes, for n <= limit."""

    k: int
    limit: int
    bits: int

    def member(self, n: int) -> bool:
        if not 0 <= n <= self.limit:
            raise ValueError(f"n={n} outside sieve range 0..{self.limit}")
        return bool((self.bits >> n) & 1)

    def count_members(self, upto: int) -> int:
        """Number of members in 1..upto."""
        if upto > self.limit:
            raise ValueError("checkpoint beyond sieve limit")
        mask = (1 << (upto + 1)) - 1
        return (self.bits & mask).bit_count()

    def members(self, upto: int | None = None):
        upto = self.limit if upto is None else upto
        bits = self.bits & ((1 << (upto + 1)) - 1)
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low


def build_sieve(N: int, k: int, ceiling: int = DEFAULT_SIEVE_CEILING) -> CubeSieve:
    """Membership of 1..N in the k-fold sumset of positive cubes.

    Built by k rolling OR-convolutions of the cube indicator over a big-int
    bit array, so cost is (#cubes <= N) big-int shifts per layer.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if N < k:
        raise ValueError("N must be at least k")
    if N > ceiling:
        raise ResourceLimit(f"sieve limit {N} exceeds ceiling {ceiling}")
    cubes = [c * c * c for c in range(1, icbrt(N) + 1)]
    mask = (1 << (N + 1)) - 1
    layer = 0
    for c3 in cubes:
        layer |= 1 << c3
    for _ in range(k - 1):
        nxt = 0
        for c3 in cubes:
            nxt |= layer << c3
        layer = nxt & mask
    return CubeSieve(k=k, limit=N, bits=layer)


def exceptional_stats(
    sieve: CubeSieve, checkpoints: list[int]
) -> list[tuple[int, int, Fraction]]:
    """(N_i, #non-members <= N_i, ratio) per checkpoint; ratios exact."""
    out = []
    for nc in checkpoints:
        if nc > sieve.limit:
            raise ValueError(f"checkpoint {nc} beyond sieve limit {sieve.limit}")
        count = nc - sieve.count_members(nc)
        out.append((nc, count, Fraction(count, nc)))
    return out


def find_witness(
    p: int,
    r: int,
    k: int,
    limit: int,
    sieve: CubeSieve | None = None,
    ceiling: int = DEFAULT_SIEVE_CEILING,
) -> int:
    """Smallest M <= limit with p not dividing M, M and p^r * M both sums of k cubes.

    Candidate M's come from a sieve over 1..limit; the scaled side p^r * M
    is checked by the sieve when it is big enough, otherwise by early-exit
    enumeration (p^r * limit can dwarf any reasonable sieve while witnesses
    stay tiny).
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    if sieve is None or sieve.limit < limit or sieve.k != k:
        sieve = build_sieve(max(limit, k), k, ceiling=ceiling)
    pr = p**r
    for m in range(1, limit + 1):
        if m % p == 0 or not sieve.member(m):
            continue
        n = pr * m
        if n <= sieve.limit:
            if sieve.member(n):
                return m
        elif has_representation(n, k):
            return m
    raise NotFound(f"no witness M <= {limit} for p={p}, r={r}, k={k}")


@dataclass(frozen=True)
class Mod9Report:
    N: int
    scanned: int
    violations: tuple[int, ...]

    @property
    def clean(self) -> bool:
        return not self.violations


def mod9_obstruction_scan(N: int, sieve: CubeSieve | None = None) -> Mod9Report:
    """Assert no n <= N with n = +-3 (mod 9) is a sum of two positive cubes.

    Cubes are 0 or +-1 mod 9, so two of them can never sum to +-3; the scan
    re-derives that from the sieve bit by bit.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if sieve is None or sieve.limit < N or sieve.k != 2:
        sieve = build_sieve(max(N, 2), 2)
    scanned = 0
    bad = []
    for n in range(1, N + 1):
        if n % 9 in (3, 6):
            scanned += 1
            if sieve.member(n):
                bad.append(n)
    return Mod9Report(N=N, scanned=scanned, violations=tuple(bad))


def save_sieve(sieve: CubeSieve, path: str | os.PathLike) -> None:
    """Write the sieve as a little-endian bit array under a fixed header."""
    nbytes = (sieve.limit + 8) // 8
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, sieve.k, sieve.limit))
        fh.write(sieve.bits.to_bytes(nbytes, "little"))


def load_sieve(path: str | os.PathLike) -> CubeSieve:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, k, limit = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"not a sieve snapshot: bad magic {magic!r}")
        data = fh.read()
    expected = (limit + 8) // 8
    if len(data) != expected:
        raise ValueError(f"truncated snapshot: {len(data)} bytes, expected {expected}")
    return CubeSieve(k=k, limit=limit, bits=int.from_bytes(data, "little"))
