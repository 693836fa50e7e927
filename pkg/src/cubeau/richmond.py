"""Three-cube decompositions R * D^3 = t1^3 + t2^3 + t3^3.

For a positive integer R and a parameter lam, the closed forms

    D  = 6*lam^2*(lam^3 + 3R)^2
    t1 = -(lam^3 + 3R)*(lam^6 - 30*lam^3*R + 9*R^2)
    t2 = lam^9 + 45*lam^6*R - 81*lam^3*R^2 + 27*R^3
    t3 = 36*lam^3*(3R - lam^3)*R

satisfy t1^3 + t2^3 + t3^3 = R * D^3 identically.  All three terms are
positive exactly when lam^3 lies in a window just below 3R (there is a
second all-positive band far below it, which candidate search excludes;
see lambda_candidates).  Every decomposition is re-certified by exact
big-integer arithmetic before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .cubes import icbrt

# float window for candidate generation only; never trusted for acceptance
_LOWER_RATIO = 0.43376


class NonPositiveTerm(Exception):
    """The chosen lam yields a term <= 0; pick another lam."""


class NoCoprimeLambda(Exception):
    """No admissible lam coprime to p exists for this prime power."""


@dataclass(frozen=True)
class Decomposition:
    R: int
    lam: int
    D: int
    terms: tuple[int, int, int]

    def equation(self) -> str:
        t1, t2, t3 = self.terms
        return f"{self.R} * {self.D}^3 = {t1}^3 + {t2}^3 + {t3}^3"


def _raw_terms(R: int, lam: int) -> tuple[int, int, int, int]:
    l3 = lam**3
    s = l3 + 3 * R
    d = 6 * lam * lam * s * s
    t1 = -s * (l3 * l3 - 30 * l3 * R + 9 * R * R)
    t2 = lam**9 + 45 * l3 * l3 * R - 81 * l3 * R * R + 27 * R**3
    t3 = 36 * l3 * (3 * R - l3) * R
    return d, t1, t2, t3


def decompose(R: int, lam: int) -> Decomposition:
    """Exact decomposition of R * D^3 into three positive cubes."""
    if R < 1 or lam < 1:
        raise ValueError("R and lam must be positive")
    d, t1, t2, t3 = _raw_terms(R, lam)
    if t1 <= 0 or t2 <= 0 or t3 <= 0:
        raise NonPositiveTerm(f"lam={lam} inadmissible for R={R}: terms {(t1, t2, t3)}")
    if t1**3 + t2**3 + t3**3 != R * d**3:
        raise AssertionError("decomposition identity failed")  # pragma: no cover
    return Decomposition(R=R, lam=lam, D=d, terms=(t1, t2, t3))


def lambda_candidates(R: int) -> list[int]:
    """Integers lam with lam^3 in the admissible window below 3R.

    Floats only seed the scan range (widened by one on each side); the
    acceptance test is exact: all three terms positive and lam^3 > R.  The
    latter cut removes the disconnected low all-positive band around
    lam^3 = 0.3R..0.44R, which sits outside the documented window.
    """
    if R < 1:
        raise ValueError("R must be positive")
    lo = max(1, int((_LOWER_RATIO * 3 * R) ** (1 / 3)) - 1)
    hi = icbrt(3 * R) + 1
    out = []
    for lam in range(lo, hi + 1):
        if lam**3 <= R:
            continue
        _, t1, t2, t3 = _raw_terms(R, lam)
        if t1 > 0 and t2 > 0 and t3 > 0:
            out.append(lam)
    return out


def find_coprime_lambda(p: int, r: int) -> int:
    """Smallest admissible lam for R = p^r with gcd(lam, p) = 1.

    Also asserts gcd(p, D) = 1, which holds automatically for p >= 5
    since D = 6*lam^2*(lam^3 + 3*p^r)^2 and p divides neither factor.
    """
    if p < 2 or r < 1:
        raise ValueError("need a prime p and exponent r >= 1")
    R = p**r
    for lam in lambda_candidates(R):
        if gcd(lam, p) != 1:
            continue
        d, *_ = _raw_terms(R, lam)
        if gcd(p, d) != 1:
            continue
        return lam
    raise NoCoprimeLambda(f"no admissible lam coprime to {p} for R = {p}^{r}")
