"""Factorization, exact multiplicative evaluation, and gcd facts.

Everything here is exact: integers are unbounded, rationals are
``fractions.Fraction``, and complex values are restricted to the phased
form ``m * w^j`` with ``w`` a primitive cube root of unity, which is the
only kind of non-real value the cube conditions ever produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Union

Rational = Union[int, Fraction]


class UnknownValue(Exception):
    """A value store was asked for a prime power it does not determine."""


class PhaseMismatch(Exception):
    """Attempted to add phased values with distinct nonzero phases."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return []
    mark = bytearray([1]) * (limit + 1)
    mark[0] = mark[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if mark[p]:
            mark[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i in range(2, limit + 1) if mark[i]]


@dataclass(frozen=True)
class Factorization:
    """Prime-exponent form of a positive integer, primes strictly increasing."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        last = 1
        for p, e in self.entries:
            if p <= last or e < 1:
                raise ValueError(f"bad factorization entry ({p}, {e})")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.entries:
            out *= p**e
        return out

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.entries)


def factorize(n: int) -> Factorization:
    """Trial-division factorization; deterministic, exact for desk-scale n."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    entries = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            entries.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        entries.append((n, 1))
    return Factorization(tuple(entries))


@dataclass(frozen=True)
class PhasedRational:
    """Exact value m * w^phase with w = exp(2*pi*i/3) and m rational.

    Multiplication adds phases mod 3; addition is defined only between
    equal phases (or with zero).  Zero is canonically phase 0.
    """

    magnitude: Fraction
    phase: int = 0

    def __post_init__(self) -> None:
        mag = self.magnitude
        if not isinstance(mag, Fraction):
            mag = Fraction(mag)
            object.__setattr__(self, "magnitude", mag)
        if self.phase not in (0, 1, 2):
            raise ValueError("phase must be 0, 1 or 2")
        if mag == 0 and self.phase != 0:
            object.__setattr__(self, "phase", 0)

    @classmethod
    def of(cls, value: Rational, phase: int = 0) -> "PhasedRational":
        return cls(Fraction(value), phase)

    @property
    def is_real(self) -> bool:
        return self.phase == 0 or self.magnitude == 0

    def __add__(self, other: "PhasedRational") -> "PhasedRational":
        if self.magnitude == 0:
            return other
        if other.magnitude == 0:
            return self
        if self.phase != other.phase:
            raise PhaseMismatch(f"cannot add phases {self.phase} and {other.phase}")
        return PhasedRational(self.magnitude + other.magnitude, self.phase)

    def __mul__(self, other: "PhasedRational") -> "PhasedRational":
        return PhasedRational(
            self.magnitude * other.magnitude, (self.phase + other.phase) % 3
        )

    def __pow__(self, e: int) -> "PhasedRational":
        if e < 0:
            raise ValueError("negative powers not supported")
        return PhasedRational(self.magnitude**e, (self.phase * e) % 3)

    def cube(self) -> "PhasedRational":
        return self**3

    def __str__(self) -> str:
        if self.phase == 0:
            return str(self.magnitude)
        suffix = "w" if self.phase == 1 else "w^2"
        return f"{self.magnitude}*{suffix}"


ONE = PhasedRational(Fraction(1))
ZERO = PhasedRational(Fraction(0))


class Free:
    """Marker: the value at this prime power is a free parameter."""

    def __repr__(self) -> str:
        return "Free"


class Unknown:
    """Marker: the value is an unresolved variable."""

    def __init__(self, var_id: object):
        self.var_id = var_id

    def __repr__(self) -> str:
        return f"Unknown({self.var_id})"


FREE = Free()

Entry = Union[PhasedRational, Free, Unknown]


class ValueStore:
    """Assignment of values to prime powers.

    A store is either rule-backed (answers every prime power from a named
    closed form) or map-backed (answers only explicitly stored keys).
    """

    def __init__(
        self,
        assignments: dict[tuple[int, int], Entry] | None = None,
        rule: str | None = None,
        rule_param: PhasedRational | None = None,
    ):
        self.assignments = dict(assignments or {})
        self.rule = rule
        self.rule_param = rule_param

    @classmethod
    def identity(cls) -> "ValueStore":
        return cls(rule="identity")

    @classmethod
    def all_ones(cls) -> "ValueStore":
        return cls(rule="all-ones")

    @classmethod
    def f2_counterexample(cls, c: PhasedRational | Rational) -> "ValueStore":
        """f(3) = c, f(p^r) = p^r elsewhere; multiplicative by construction."""
        if not isinstance(c, PhasedRational):
            c = PhasedRational.of(c)
        return cls(rule="f2-counterexample", rule_param=c)

    @classmethod
    def from_values(
        cls, values: dict[tuple[int, int], PhasedRational | Rational]
    ) -> "ValueStore":
        out: dict[tuple[int, int], Entry] = {}
        for key, v in values.items():
            out[key] = v if isinstance(v, (PhasedRational, Free, Unknown)) else PhasedRational.of(v)
        return cls(assignments=out)

    def lookup(self, p: int, e: int) -> Entry:
        if (p, e) in self.assignments:
            return self.assignments[(p, e)]
        if self.rule == "identity":
            return PhasedRational.of(p**e)
        if self.rule == "all-ones":
            return ONE
        if self.rule == "f2-counterexample":
            if (p, e) == (3, 1):
                return self.rule_param
            return PhasedRational.of(p**e)
        raise UnknownValue(f"store does not determine value at {p}^{e}")

    def is_total(self) -> bool:
        return self.rule is not None


def eval_multiplicative(store: ValueStore, n: int) -> PhasedRational:
    """Evaluate a multiplicative function from its prime-power values."""
    if n < 1:
        raise ValueError("n must be positive")
    result = ONE
    for p, e in factorize(n):
        v = store.lookup(p, e)
        if not isinstance(v, PhasedRational):
            raise UnknownValue(f"value at {p}^{e} is {v!r}")
        result = result * v
    return result


@dataclass(frozen=True)
class GcdClaim:
    label: str
    computed: int
    expected: int
    branch: str

    @property
    def passed(self) -> bool:
        return self.computed == self.expected


@dataclass(frozen=True)
class GcdFactReport:
    p: int
    claims: tuple[GcdClaim, ...] = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.claims)


def check_gcd_facts(p: int) -> GcdFactReport:
    """Check the gcd identities behind the odd-prime induction steps.

    The case split is on p mod 3 (which of p^2-p+1 / p^2+p+1 picks up a
    factor 3) and on p mod 7 (whether p^2-p+1 and (p^2+3)/4 share a 7).
    """
    if p < 5 or not is_prime(p):
        raise ValueError("p must be a prime >= 5")
    r = (p - 1) // 2
    mod3 = "p = 1 (mod 3)" if p % 3 == 1 else "p = -1 (mod 3)"
    mod7 = "p = 5 (mod 7)" if p % 7 == 5 else "p != 5 (mod 7)"
    three_if = lambda cond: 3 if cond else 1

    claims = [
        GcdClaim(
            "gcd(r+2, r^2+r+1) = gcd(r+2, 3)",
            gcd(r + 2, r * r + r + 1),
            gcd(r + 2, 3),
            "p = 2r+1",
        ),
        GcdClaim(
            "gcd(r+2, r^2+r+1) = 1",
            gcd(r + 2, r * r + r + 1),
            1,
            "p = 2r+1",
        ),
        GcdClaim(
            "gcd(2r+1, r^2+r+1) = 1",
            gcd(2 * r + 1, r * r + r + 1),
            1,
            "p = 2r+1",
        ),
        GcdClaim(
            "gcd(p+1, p^2-p+1) = 3 iff p = -1 (mod 3)",
            gcd(p + 1, p * p - p + 1),
            three_if(p % 3 == 2),
            mod3,
        ),
        GcdClaim(
            "gcd(2p-1, p^2-p+1) = 3 iff p = -1 (mod 3)",
            gcd(2 * p - 1, p * p - p + 1),
            three_if(p % 3 == 2),
            mod3,
        ),
        GcdClaim(
            "gcd(2p+1, p^2+p+1) = 3 iff p = 1 (mod 3)",
            gcd(2 * p + 1, p * p + p + 1),
            three_if(p % 3 == 1),
            mod3,
        ),
        GcdClaim(
            "gcd(p+2, p^2+p+1) = 3 iff p = 1 (mod 3)",
            gcd(p + 2, p * p + p + 1),
            three_if(p % 3 == 1),
            mod3,
        ),
        GcdClaim(
            "gcd(p, (p+1)/2) = 1",
            gcd(p, (p + 1) // 2),
            1,
            "always",
        ),
        GcdClaim(
            "gcd(p, p^2-p+1) = 1",
            gcd(p, p * p - p + 1),
            1,
            "always",
        ),
        GcdClaim(
            "gcd(p, (p^2+3)/4) = 1",
            gcd(p, (p * p + 3) // 4),
            1,
            "always",
        ),
        GcdClaim(
            "gcd((p+1)/2, p^2-p+1) = 3 iff p = -1 (mod 3)",
            gcd((p + 1) // 2, p * p - p + 1),
            three_if(p % 3 == 2),
            mod3,
        ),
        GcdClaim(
            "gcd((p+1)/2, (p^2+3)/4) = 1",
            gcd((p + 1) // 2, (p * p + 3) // 4),
            1,
            "always",
        ),
        GcdClaim(
            "gcd(p^2-p+1, (p^2+3)/4) = 7 iff p = 5 (mod 7)",
            gcd(p * p - p + 1, (p * p + 3) // 4),
            7 if p % 7 == 5 else 1,
            mod7,
        ),
        GcdClaim(
            "gcd((p^2+3)/4, (p^4+3)/4) = 1",
            gcd((p * p + 3) // 4, (p**4 + 3) // 4),
            1,
            "always",
        ),
    ]
    return GcdFactReport(p=p, claims=tuple(claims))
