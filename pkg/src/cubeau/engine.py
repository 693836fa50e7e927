"""Constraint systems induced by multiplicativity plus k-cube additivity,
and a bounded exact solver for them.

The systems are polynomial equations over unknowns f(p^r) (or g(p^r)),
one unknown per prime power.  The solver searches integer assignments
with |value| <= bound: it propagates single-unknown equations exactly,
solves the affine-linear sublayer by row reduction, branches over signed
divisor factorizations when a lone monomial equals a known constant,
narrows integer intervals through monomial values, and enumerates or
bisects the remaining range of a variable when stuck.  Every reported
assignment is re-verified against the original equations, so "unique"
means: the one integer-valued solution within bounds (rational values
reached through exact division are caught and reported as well).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Literal, NamedTuple

from .arith import PhasedRational, ValueStore, factorize, primes_up_to
from .cubes import ResourceLimit

Form = Literal["f", "g"]


class VarId(NamedTuple):
    prime: int
    exponent: int
    form: str

    def __str__(self) -> str:
        base = f"{self.prime}^{self.exponent}" if self.exponent > 1 else str(self.prime)
        return f"{self.form}({base})"


# monomial over variable indices: tuple of (var_index, exponent), sorted
Mono = tuple[tuple[int, int], ...]
Poly = dict[Mono, int]


@dataclass(frozen=True)
class Equation:
    """Sparse polynomial over VarIds asserted equal to zero."""

    terms: tuple[tuple[tuple[tuple[VarId, int], ...], int], ...]
    provenance: str

    def variables(self) -> set[VarId]:
        return {v for mono, _ in self.terms for v, _ in mono}

    def __str__(self) -> str:
        parts = []
        for mono, c in self.terms:
            body = "*".join(f"{v}^{e}" if e > 1 else str(v) for v, e in mono)
            parts.append(f"{c}" if not body else (body if c == 1 else f"{c}*{body}"))
        return " + ".join(parts) + " = 0"


@dataclass(frozen=True)
class EquationSystem:
    equations: tuple[Equation, ...]
    scope: frozenset[VarId]
    meta: dict = field(default_factory=dict, compare=False)

    def variables_used(self) -> set[VarId]:
        used: set[VarId] = set()
        for eq in self.equations:
            used |= eq.variables()
        return used


@dataclass(frozen=True)
class SolverConfig:
    value_bound: int = 10**6
    branch_cap: int = 10**5
    depth_cap: int = 64
    enum_limit: int = 4200
    max_solutions: int = 8
    narrow_rounds: int = 8


@dataclass(frozen=True)
class SolutionReport:
    status: Literal["unique", "multiple", "contradiction", "exhausted"]
    system: EquationSystem
    solutions: tuple[dict[VarId, Fraction | int], ...]
    free: frozenset[VarId]
    branches: int
    caps_hit: bool
    cube_only: frozenset[VarId]

    @property
    def assignments(self) -> dict[VarId, PhasedRational]:
        """Determined values (cube-only variables carry their cube's value)."""
        if status_has_values(self.status) and self.solutions:
            return {v: PhasedRational.of(val) for v, val in self.solutions[0].items()}
        return {}

    def cube_facts(self) -> dict[VarId, Fraction]:
        if not self.solutions:
            return {}
        return {
            v: Fraction(self.solutions[0][v])
            for v in self.cube_only
            if v in self.solutions[0]
        }

    def to_text(self) -> str:
        lines = [
            "cubeau-solution-report v1",
            f"status: {self.status}",
            f"branches: {self.branches}",
            f"caps-hit: {'yes' if self.caps_hit else 'no'}",
            f"solutions: {len(self.solutions)}",
        ]
        if self.status == "unique":
            sol = self.solutions[0]
            for v in sorted(sol):
                tag = " (cube of value)" if v in self.cube_only else ""
                lines.append(f"value: {v} = {sol[v]}{tag}")
        for v in sorted(self.free):
            lines.append(f"free: {v}")
        return "\n".join(lines) + "\n"


def status_has_values(status: str) -> bool:
    return status == "unique"


# --------------------------------------------------------------------------
# system construction


def _mono_for(n: int, form: str, cube: bool) -> tuple[tuple[VarId, int], ...]:
    if n == 1:
        return ()
    power = 3 if cube else 1
    return tuple(
        (VarId(p, e, form), power) for p, e in factorize(n)
    )


def _equation(n: int, parts: tuple[int, ...], form: str) -> Equation:
    """f(n) = sum f(a_i^3)  (f-form)  or  f(n) = sum g(a_i)^3  (g-form)."""
    acc: dict[tuple[tuple[VarId, int], ...], int] = {}
    lhs = _mono_for(n, form, cube=False)
    acc[lhs] = acc.get(lhs, 0) + 1
    for a in parts:
        if form == "f":
            mono = _mono_for(a**3, form, cube=False)
        else:
            mono = _mono_for(a, form, cube=True)
        acc[mono] = acc.get(mono, 0) - 1
    terms = tuple((m, c) for m, c in acc.items() if c)
    rep = "+".join(f"{a}^3" for a in parts)
    return Equation(terms=terms, provenance=f"{n} = {rep} [{form}]")


def scope_prime_powers(N: int, form: str) -> frozenset[VarId]:
    out = set()
    for p in primes_up_to(N):
        q = p
        e = 1
        while q <= N:
            out.add(VarId(p, e, form))
            q *= p
            e += 1
    return frozenset(out)


def generate_equations(
    k: int, N: int, form: Form = "f", equation_cap: int = 10**6
) -> EquationSystem:
    """One equation per (n <= N, canonical representation), deduplicated.

    The scope is every prime power <= N, whether or not it is reached by
    an equation, so free-variable reporting is meaningful.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if N < k:
        raise ValueError("N must be at least k")
    if form not in ("f", "g"):
        raise ValueError("form must be 'f' or 'g'")
    equations: list[Equation] = []
    seen: set[tuple] = set()

    def rec(prefix: list[int], rem_parts: int, lo: int, total: int) -> None:
        if len(equations) > equation_cap:
            raise ResourceLimit(f"equation count exceeds cap {equation_cap}")
        if rem_parts == 0:
            eq = _equation(total, tuple(prefix), form)
            if eq.terms and eq.terms not in seen:
                seen.add(eq.terms)
                equations.append(eq)
            return
        a = lo
        while total + rem_parts * a * a * a <= N:
            prefix.append(a)
            rec(prefix, rem_parts - 1, a, total + a * a * a)
            prefix.pop()
            a += 1

    rec([], k, 1, 0)
    return EquationSystem(
        equations=tuple(equations),
        scope=scope_prime_powers(N, form),
        meta={"k": k, "N": N, "form": form},
    )


# fixture tables: (n, cube summands a_i^3) for f-form, (n, bases a_i) for g-form
_SEEDS_F: dict[str, tuple[int, list[tuple[int, tuple[int, ...]]]]] = {
    "f2-base": (2, [
        (2, (1, 1)),
        (9, (2, 1)),
        (35, (3, 2)),
        (65, (4, 1)),
        (72, (4, 2)),
        (91, (4, 3)),
        (126, (5, 1)),
        (152, (5, 3)),
        (189, (5, 4)),
        (344, (7, 1)),
        (351, (7, 2)),
        (513, (8, 1)),
        (559, (7, 6)),
        (855, (8, 7)),
    ]),
    "f3-base": (3, [
        (3, (1, 1, 1)),
        (10, (2, 1, 1)),
        (17, (2, 2, 1)),
        (36, (3, 2, 1)),
        (43, (3, 2, 2)),
        (55, (3, 3, 1)),
        (62, (3, 3, 2)),
        (66, (4, 1, 1)),
        (92, (4, 3, 1)),
        (99, (4, 3, 2)),
        (129, (4, 4, 1)),
        (136, (4, 4, 2)),
        (153, (5, 3, 1)),
        (155, (4, 4, 3)),
        (216, (5, 4, 3)),
        (345, (7, 1, 1)),
        (378, (7, 3, 2)),
    ]),
    "f4-base": (4, [
        (4, (1, 1, 1, 1)),
        (11, (2, 1, 1, 1)),
        (18, (2, 2, 1, 1)),
        (25, (2, 2, 2, 1)),
        (30, (3, 1, 1, 1)),
        (37, (3, 2, 1, 1)),
        (44, (3, 2, 2, 1)),
        (56, (3, 3, 1, 1)),
        (63, (3, 3, 2, 1)),
        (70, (3, 3, 2, 2)),
        (74, (4, 2, 1, 1)),
        (88, (4, 2, 2, 2)),
        (100, (4, 3, 2, 1)),
    ]),
    "g2-base": (2, [
        (2, (1, 1)),
        (9, (2, 1)),
        (28, (3, 1)),
        (35, (3, 2)),
        (65, (4, 1)),
        (72, (4, 2)),
        (91, (4, 3)),
        (126, (5, 1)),
        (133, (5, 2)),
        (152, (5, 3)),
    ]),
    "g3-base": (3, [
        (3, (1, 1, 1)),
        (10, (2, 1, 1)),
        (36, (3, 2, 1)),
        (43, (3, 2, 2)),
        (55, (3, 3, 1)),
        (66, (4, 1, 1)),
        (99, (4, 3, 2)),
        (129, (4, 4, 1)),
    ]),
    "g4-base": (4, [
        (4, (1, 1, 1, 1)),
        (11, (2, 1, 1, 1)),
        (18, (2, 2, 1, 1)),
        (30, (3, 1, 1, 1)),
        (37, (3, 2, 1, 1)),
        (44, (3, 2, 2, 1)),
        (63, (3, 3, 2, 1)),
        (70, (3, 3, 2, 2)),
        (74, (4, 2, 1, 1)),
    ]),
}


def seed_names() -> list[str]:
    return sorted(_SEEDS_F)


def seed_system(name: str) -> EquationSystem:
    """A named fixture system (the small anchor systems solved in closed form).

    The value at 1 is substituted eagerly, so each fixture's "x1 = 1" row
    is implicit and the remaining equations range over prime powers only.
    """
    if name not in _SEEDS_F:
        raise KeyError(f"unknown seed {name!r}; known: {', '.join(seed_names())}")
    k, rows = _SEEDS_F[name]
    form = "g" if name.startswith("g") else "f"
    equations = []
    scope: set[VarId] = set()
    for n, bases in rows:
        if sum(a**3 for a in bases) != n:
            raise AssertionError(f"fixture row {n} is not a sum of cubes")  # pragma: no cover
        eq = _equation(n, bases, form)
        equations.append(eq)
        scope |= eq.variables()
    return EquationSystem(
        equations=tuple(equations),
        scope=frozenset(scope),
        meta={"k": k, "form": form, "seed": name},
    )


def free_variables(system: EquationSystem) -> set[VarId]:
    """Scope variables constrained by no equation."""
    return set(system.scope) - system.variables_used()


def verify_assignment(system: EquationSystem, store: ValueStore) -> list[str]:
    """Check every equation exactly under the store; [] means all hold.

    Raises PhaseMismatch if an addition mixes distinct nonzero phases,
    which signals an invalid candidate for g-form systems.
    """
    violations = []
    for eq in system.equations:
        total = PhasedRational.of(0)
        for mono, c in eq.terms:
            term = PhasedRational.of(c)
            for v, e in mono:
                val = store.lookup(v.prime, v.exponent)
                if not isinstance(val, PhasedRational):
                    raise ValueError(f"store does not determine {v}")
                term = term * val**e
            total = total + term
        if total.magnitude != 0:
            violations.append(f"{eq.provenance}: residue {total}")
    return violations


# --------------------------------------------------------------------------
# solver internals (index space)


def _poly_vars(p: Poly) -> set[int]:
    out = set()
    for m in p:
        for v, _ in m:
            out.add(v)
    return out


def _subst_value(p: Poly, var: int, val) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        e = 0
        rest = []
        for v, ee in m:
            if v == var:
                e = ee
            else:
                rest.append((v, ee))
        nc = c * val**e if e else c
        if nc:
            key = tuple(rest)
            acc = out.get(key, 0) + nc
            if acc:
                out[key] = acc
            else:
                del out[key]
    return out


def _subst_assigned(p: Poly, assign: dict) -> Poly:
    for v in list(_poly_vars(p)):
        if v in assign:
            p = _subst_value(p, v, assign[v])
    return p


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            acc = out.get(m, 0) + c1 * c2
            if acc:
                out[m] = acc
            else:
                del out[m]
    return out


def _poly_pow(p: Poly, e: int) -> Poly:
    out: Poly = {(): 1}
    base = dict(p)
    while e:
        if e & 1:
            out = _poly_mul(out, base)
        e >>= 1
        if e:
            base = _poly_mul(base, base)
    return out


def _subst_poly(p: Poly, var: int, rep: Poly) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        e = 0
        rest = []
        for v, ee in m:
            if v == var:
                e = ee
            else:
                rest.append((v, ee))
        term: Poly = {tuple(rest): c}
        if e:
            term = _poly_mul(term, _poly_pow(rep, e))
        for mm, cc in term.items():
            acc = out.get(mm, 0) + cc
            if acc:
                out[mm] = acc
            else:
                del out[mm]
    return out


def _eval_poly(p: Poly, a: dict):
    total = 0
    for m, c in p.items():
        t = c
        for v, e in m:
            t *= a[v] ** e
        total += t
    return total


def _nth_root_floor(x: int, n: int) -> int:
    if x < 0:
        return -_nth_root_ceil(-x, n)
    if x == 0:
        return 0
    if n == 1:
        return x
    r = 1 << ((x.bit_length() + n - 1) // n)
    while r**n > x:
        r = ((n - 1) * r + x // r ** (n - 1)) // n
    while (r + 1) ** n <= x:
        r += 1
    return r


def _nth_root_ceil(x: int, n: int) -> int:
    if x < 0:
        return -_nth_root_floor(-x, n)
    f = _nth_root_floor(x, n)
    return f if f**n == x else f + 1


_PRIME_CACHE: list[int] = []


def _primes_for(limit: int) -> list[int]:
    global _PRIME_CACHE
    if not _PRIME_CACHE or _PRIME_CACHE[-1] < limit:
        _PRIME_CACHE = primes_up_to(max(limit, 1 << 12))
    return _PRIME_CACHE


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n <= 1:
        return [1] if n else []
    out = [1]
    root = _nth_root_floor(n, 2)
    for p in _primes_for(root):
        if p > root:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out = [d * p**i for d in out for i in range(e + 1)]
            root = _nth_root_floor(n, 2)
    if n > 1:
        out = [d * f for d in out for f in (1, n)]
    return sorted(out)


def _ceil_div(a, b):
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        q = Fraction(a) / Fraction(b)
        return -((-q.numerator) // q.denominator)
    return -((-a) // b) if b > 0 else -(a // -b)


def _floor_div(a, b):
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        q = Fraction(a) / Fraction(b)
        return q.numerator // q.denominator
    return a // b if b > 0 else (-a) // (-b)


def _row_normalize(p: Poly) -> Poly:
    if not p:
        return p
    den = 1
    for c in p.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // gcd(den, c.denominator)
    if den != 1:
        p = {m: int(c * den) for m, c in p.items()}
    g = 0
    for c in p.values():
        g = gcd(g, abs(int(c))) if not isinstance(c, Fraction) else 1
        if g == 1:
            break
    if g > 1:
        p = {m: c // g for m, c in p.items()}
    return p


def _augment_shared_monomials(rows: list[Poly], max_len: int = 12) -> list[Poly]:
    """Add pairwise eliminations of shared single-variable monomials.

    Each equation is linear in monomial space; for rows sharing a lone
    x^e monomial, the cross-multiplied difference cancels it and exposes
    relations that let propagation prune early.  Originals are kept, so
    the solution set is unchanged.
    """
    rows = [_row_normalize(dict(p)) for p in rows]
    seen = {tuple(sorted(p.items())) for p in rows}
    out = list(rows)
    cols = sorted({m for p in rows for m in p if len(m) == 1})
    for col in cols:
        holders = [i for i in range(len(rows)) if col in rows[i]]
        if len(holders) < 2:
            continue
        ref = min(holders, key=lambda i: (len(rows[i]), i))
        pc = rows[ref][col]
        for i in holders:
            if i == ref:
                continue
            rc = rows[i][col]
            q = {m: c * pc for m, c in rows[i].items()}
            for m, c in rows[ref].items():
                q[m] = q.get(m, 0) - c * rc
            q = _row_normalize({m: c for m, c in q.items() if c})
            if not q or len(q) > max_len:
                continue
            key = tuple(sorted(q.items()))
            if key not in seen:
                seen.add(key)
                out.append(q)
    return out


def _rref_affine(rows: list[Poly]) -> list[Poly] | None:
    """Reduced row echelon form of affine rows (all monomials single vars,
    exponent 1).  None means the subsystem is inconsistent."""
    mat = [dict(p) for p in rows]
    done: list[Poly] = []
    while True:
        best = None
        for p in mat:
            for m in p:
                if m != ():
                    v = m[0][0]
                    cand = (v, len(p))
                    if best is None or cand < best[0:2]:
                        best = (v, len(p), p)
        if best is None:
            for p in mat:
                if p.get((), 0) != 0:
                    return None
            break
        v, _, piv = best
        mat.remove(piv)
        pc = piv[((v, 1),)]
        nxt = []
        for p in mat:
            key = ((v, 1),)
            if key in p:
                rc = p[key]
                q = {mm: c * pc for mm, c in p.items()}
                for mm, c in piv.items():
                    q[mm] = q.get(mm, 0) - c * rc
                p = _row_normalize({mm: c for mm, c in q.items() if c})
                if not p:
                    continue
                if set(p) == {()}:
                    return None
            nxt.append(p)
        done.append(piv)
        mat = nxt
    # back-substitute earlier pivots
    for i in range(len(done) - 1, -1, -1):
        piv = done[i]
        v = min(m[0][0] for m in piv if m != ())
        pc = piv[((v, 1),)]
        key = ((v, 1),)
        for j in range(i):
            p = done[j]
            if key in p:
                rc = p[key]
                q = {mm: c * pc for mm, c in p.items()}
                for mm, c in piv.items():
                    q[mm] = q.get(mm, 0) - c * rc
                done[j] = _row_normalize({mm: c for mm, c in q.items() if c})
    out = [p for p in done if p]
    for p in out:
        if set(p) == {()} and p.get((), 0) != 0:
            return None
    return sorted(out, key=lambda p: sorted(p.items()))


class _CapHit(Exception):
    pass


class _Search:
    def __init__(self, eqs: list[Poly], nvars: int, config: SolverConfig):
        self.config = config
        self.B = config.value_bound
        self.branches = 0
        self.caps_hit = False
        self.solutions: list[dict] = []
        self.orig = [dict(p) for p in eqs]
        self.nvars = nvars

    # occurrence map: variable -> equation indices (superset semantics);
    # indices sorted smallest-equation-first so likely contradictions fold early
    @staticmethod
    def _occ(eqs: list[Poly | None]) -> dict[int, tuple[int, ...]]:
        occ: dict[int, list[int]] = {}
        for i, p in enumerate(eqs):
            if p is None:
                continue
            for v in _poly_vars(p):
                occ.setdefault(v, []).append(i)
        return {
            v: tuple(sorted(ix, key=lambda i: (len(eqs[i]), i)))
            for v, ix in occ.items()
        }

    def run(self) -> None:
        eqs: list[Poly | None] = _augment_shared_monomials(self.orig)
        occ = self._occ(eqs)
        iv = {v: (-self.B, self.B) for v in range(self.nvars)}
        try:
            self._node(eqs, occ, {}, (), iv, (), deque(range(len(eqs))), 0)
        except _CapHit:
            self.caps_hit = True

    def _tick(self) -> None:
        self.branches += 1
        if self.branches > self.config.branch_cap:
            raise _CapHit

    def _child(self, eqs, occ, assign, defs, iv, rng, var, val, depth) -> None:
        self._tick()
        a2 = dict(assign)
        a2[var] = val
        self._node(list(eqs), occ, a2, defs, iv, rng, deque(occ.get(var, ())), depth + 1)

    def _node(self, eqs, occ, assign, defs, iv, rng, dirty, depth) -> None:
        if depth > self.config.depth_cap + 2 * self.nvars:
            raise _CapHit  # pragma: no cover
        while True:
            # 1. propagate ground checks and single-unknown linear equations
            aget = assign.get
            while dirty:
                i = dirty.popleft()
                p = eqs[i]
                if p is None:
                    continue
                # fold assigned values in, one pass over the terms
                out: Poly = {}
                var0 = None
                multivar = False
                for m, c in p.items():
                    val = c
                    kl = None
                    for j, t in enumerate(m):
                        a = aget(t[0])
                        if a is None:
                            if kl is not None:
                                kl.append(t)
                        else:
                            if kl is None:
                                kl = list(m[:j])
                            e = t[1]
                            val = val * a if e == 1 else val * a**e
                    if val:
                        key = m if kl is None else tuple(kl)
                        acc = out.get(key, 0) + val
                        if acc:
                            out[key] = acc
                            if not multivar:
                                for v, _e in key:
                                    if var0 is None:
                                        var0 = v
                                    elif v != var0:
                                        multivar = True
                        else:
                            del out[key]
                p = out
                eqs[i] = p
                if var0 is None or len(p) == (() in p):
                    if p.get((), 0) != 0:
                        return
                    eqs[i] = None
                    continue
                if not multivar:
                    cs: dict[int, object] = {}
                    for m, c in p.items():
                        e = m[0][1] if m else 0
                        cs[e] = cs.get(e, 0) + c
                    deg = max(e for e in cs if e)
                    if deg == 1:
                        # forced value; a non-integer one proves no solution
                        # inside the integer search box extends this branch
                        x = var0
                        c1, c0 = cs[1], cs.get(0, 0)
                        if isinstance(c1, int) and isinstance(c0, int):
                            val, r = divmod(-c0, c1)
                            if r:
                                return
                        else:
                            fval = Fraction(-c0) / Fraction(c1)
                            if fval.denominator != 1:
                                return
                            val = int(fval)
                        lo, hi = iv.get(x, (-self.B, self.B))
                        if not lo <= val <= hi:
                            return
                        eqs[i] = None
                        assign[x] = val
                        dirty.extend(occ.get(x, ()))

            live = [i for i, p in enumerate(eqs) if p is not None]
            if not live:
                self._record(assign, defs)
                return

            # 2. univariate equations of degree >= 2: branch over rational roots
            uni = None
            for i in live:
                vs = _poly_vars(eqs[i])
                if len(vs) == 1:
                    uni = i
                    break
            if uni is not None:
                p = eqs[uni]
                (x,) = _poly_vars(p)
                cs = {}
                for m, c in p.items():
                    e = m[0][1] if m else 0
                    cs[e] = cs.get(e, 0) + c
                eqs[uni] = None
                lo, hi = iv.get(x, (-self.B, self.B))
                for r in self._integer_roots(cs):
                    if lo <= r <= hi:
                        self._child(eqs, occ, assign, defs, iv, rng, x, r, depth)
                return

            # 3a. when the affine-linear sublayer has at least as many rows
            # as unknowns it usually determines them: reduce it before any
            # divisor split; an underdetermined one can wait
            lin = [
                i
                for i in live
                if all(len(m) == 1 and m[0][1] == 1 for m in eqs[i] if m != ())
            ]
            linvars: set[int] = set()
            for i in lin:
                linvars |= _poly_vars(eqs[i])
            strong = len(lin) >= 2 and len(lin) >= len(linvars)
            if strong:
                reduced = self._reduce_affine(eqs, occ, lin)
                if reduced is None:
                    return
                if reduced:
                    occ, dirty = reduced
                    continue

            # 3b. split a lone monomial with a target inside the search bound
            # (cheap, few children)
            early = self._find_split(eqs, live, small_only=True)
            if early is not None:
                i, m, target = early
                eqs[i] = None
                self._split_monomial(eqs, occ, assign, defs, iv, rng, m, target, depth)
                return

            # 3c. reduce the affine sublayer even when underdetermined
            if not strong and len(lin) >= 2:
                reduced = self._reduce_affine(eqs, occ, lin)
                if reduced is None:
                    return
                if reduced:
                    occ, dirty = reduced
                    continue

            # 4. lone unknown monomial equal to a known constant: divisor split
            split = self._find_split(eqs, live, small_only=False)
            if split is not None:
                i, m, target = split
                eqs[i] = None
                self._split_monomial(eqs, occ, assign, defs, iv, rng, m, target, depth)
                return

            # 5. interval narrowing over monomial values
            iv = dict(iv)
            res = self._narrow(eqs, live, rng, iv, assign)
            if res == "empty":
                return
            assigned_any = False
            for v, (lo, hi) in iv.items():
                if lo == hi and v not in assign:
                    if any(v in _poly_vars(eqs[i]) for i in live if eqs[i] is not None):
                        assign[v] = lo
                        dirty.extend(occ.get(v, ()))
                        assigned_any = True
            if assigned_any:
                continue

            active = set()
            for i in live:
                active |= _poly_vars(eqs[i])
            active -= set(assign)
            if not active:
                self._record(assign, defs)
                return

            # 6. enumerate a variable whose interval is small enough
            x = min(active, key=lambda v: (self._width(iv, v), v))
            lo, hi = iv.get(x, (-self.B, self.B))
            if hi - lo + 1 <= self.config.enum_limit:
                for val in range(lo, hi + 1):
                    self._child(eqs, occ, assign, defs, iv, rng, x, val, depth)
                return

            # 7. eliminate one solved-form variable (constant coefficient)
            elim = self._eliminate_one(eqs, live, iv, defs, rng)
            if elim is not None:
                eqs, occ, defs, rng, iv = elim
                dirty = deque(range(len(eqs)))
                continue

            # 8. bisect
            mid = (lo + hi) // 2
            for piece in ((lo, mid), (mid + 1, hi)):
                self._tick()
                iv2 = dict(iv)
                iv2[x] = piece
                self._node(list(eqs), occ, dict(assign), defs, iv2, rng, deque(), depth + 1)
            return

    def _quick_reject(self, eqs, occ, assign, x, xval, y, yval) -> bool:
        """True if, under the two extra assignments, some equation either
        grounds to nonzero or forces a remaining variable to a non-integer
        or out-of-bound value.  Evaluation only, no state is built."""
        aget = assign.get
        for i in occ.get(x, ()):
            p = eqs[i]
            if p is None:
                continue
            ucoef = 0
            const = 0
            u = None
            usable = True
            for m, c in p.items():
                val = c
                unk = None
                for v, e in m:
                    if v == x:
                        a = xval
                    elif v == y:
                        a = yval
                    else:
                        a = aget(v)
                        if a is None:
                            if unk is None and e == 1 and (u is None or v == u):
                                unk = v
                                continue
                            usable = False
                            break
                    val = val * a if e == 1 else val * a**e
                if not usable:
                    break
                if unk is None:
                    const += val
                else:
                    u = unk
                    ucoef += val
            if not usable:
                continue
            if u is None or ucoef == 0:
                if const != 0:
                    return True
                continue
            if isinstance(ucoef, int) and isinstance(const, int):
                if const % ucoef:
                    return True
                forced = -const // ucoef
            else:
                q = Fraction(-const) / Fraction(ucoef)
                if q.denominator != 1:
                    return True
                forced = int(q)
            if not -self.B <= forced <= self.B:
                return True
        return False

    @staticmethod
    def _int_power_roots(t: int, e: int) -> list[int]:
        if t == 0:
            return [0]
        rn = _nth_root_floor(abs(t), e)
        if rn**e != abs(t):
            return []
        if e % 2 == 1:
            return [rn if t > 0 else -rn]
        if t < 0:
            return []
        return [rn, -rn]

    def _reduce_affine(self, eqs, occ, lin):
        """Row-reduce the affine rows in place.  Returns None on an
        inconsistent sublayer, False when already reduced, else the updated
        (occ, dirty)."""
        cur = [eqs[i] for i in lin]
        rows = _rref_affine(cur)
        if rows is None:
            return None
        if rows == cur:
            return False
        touched: set[int] = set()
        for q in cur:
            touched |= _poly_vars(q)
        for j, idx in enumerate(lin):
            eqs[idx] = rows[j] if j < len(rows) else None
        occ = dict(occ)
        lin_t = tuple(lin)
        for v in touched:
            prior = occ.get(v, ())
            occ[v] = tuple(dict.fromkeys(prior + lin_t))
        return occ, deque(lin)

    # -- branching helpers

    def _find_split(self, eqs, live, small_only: bool):
        best = None
        for i in live:
            p = eqs[i]
            if p is None or len(p) > 2:
                continue
            monos = [m for m in p if m != ()]
            if len(monos) != 1:
                continue
            m = monos[0]
            target = Fraction(-p.get((), 0), 1) / p[m]
            size = abs(target.numerator) + target.denominator
            if small_only and size > self.B:
                continue
            cand = (len(m), size, i)
            if best is None or cand < best[0]:
                best = (cand, i, m, target)
        return best[1:] if best is not None else None

    def _split_monomial(self, eqs, occ, assign, defs, iv, rng, m, target: Fraction, depth):
        if len(m) == 1:
            x, e = m[0]
            lo, hi = iv.get(x, (-self.B, self.B))
            for r in self._power_roots(target, e):
                if lo <= r <= hi:
                    self._child(eqs, occ, assign, defs, iv, rng, x, r, depth)
            return
        if target == 0:
            seen = set()
            for x, _e in m:
                if x in seen:
                    continue
                seen.add(x)
                lo, hi = iv.get(x, (-self.B, self.B))
                if lo <= 0 <= hi:
                    self._child(eqs, occ, assign, defs, iv, rng, x, 0, depth)
            return
        if target.denominator != 1:
            return  # no integer factorization
        t = int(target)
        (x, e), rest = m[0], m[1:]
        lo, hi = iv.get(x, (-self.B, self.B))
        for d in _divisors(t):
            for val in (d, -d):
                de = val**e
                if t % de or not lo <= val <= hi:
                    continue
                t2 = t // de
                if not rest:
                    if t2 == 1:
                        self._child(eqs, occ, assign, defs, iv, rng, x, val, depth)
                    continue
                if len(rest) == 1:
                    # assign the cofactor in the same child
                    (y, e2) = rest[0]
                    ylo, yhi = iv.get(y, (-self.B, self.B))
                    for yval in self._int_power_roots(t2, e2):
                        if not ylo <= yval <= yhi:
                            continue
                        if self._quick_reject(eqs, occ, assign, x, val, y, yval):
                            continue
                        self._tick()
                        a2 = dict(assign)
                        a2[x] = val
                        a2[y] = yval
                        self._node(
                            list(eqs), occ, a2, defs, iv, rng,
                            deque(list(occ.get(x, ())) + list(occ.get(y, ()))),
                            depth + 1,
                        )
                    continue
                self._tick()
                a2 = dict(assign)
                a2[x] = val
                extra: Poly = {tuple(rest): 1, (): -t2}
                child_eqs = list(eqs) + [extra]
                child_occ = dict(occ)
                for v, _ee in rest:
                    child_occ[v] = child_occ.get(v, ()) + (len(child_eqs) - 1,)
                self._node(child_eqs, child_occ, a2, defs, iv, rng,
                           deque(list(occ.get(x, ())) + [len(child_eqs) - 1]), depth + 1)

    def _eliminate_one(self, eqs, live, iv, defs, rng):
        occ_count: dict[int, int] = {}
        for i in live:
            if eqs[i] is None:
                continue
            for v in _poly_vars(eqs[i]):
                occ_count[v] = occ_count.get(v, 0) + 1
        cands = []
        for i in live:
            p = eqs[i]
            if p is None:
                continue
            for m in p:
                if len(m) == 1 and m[0][1] == 1:
                    x = m[0][0]
                    if any(x in dict(m2) for m2 in p if m2 != m):
                        continue
                    cands.append((occ_count[x] - 1, len(_poly_vars(p)) - 1, len(p), x, i))
        if not cands:
            return None
        budget = sum(len(eqs[i]) for i in live if eqs[i] is not None)
        for _, _, _, x, i in sorted(cands):
            p = eqs[i]
            c = p[((x, 1),)]
            rep: Poly = {}
            for m, cc in p.items():
                if m == ((x, 1),):
                    continue
                q = Fraction(-cc, 1) / c
                rep[m] = int(q) if q.denominator == 1 else q
            new_eqs = []
            for j in live:
                if j == i or eqs[j] is None:
                    continue
                new_eqs.append(_subst_poly(eqs[j], x, rep))
            if sum(len(q) for q in new_eqs) > budget + 80:
                continue
            new_rng = tuple((_subst_poly(q, x, rep), t) for q, t in rng)
            new_rng += ((rep, iv.get(x, (-self.B, self.B))),)
            new_defs = defs + ((x, rep),)
            new_iv = dict(iv)
            new_iv.pop(x, None)
            return new_eqs, self._occ(new_eqs), new_defs, new_rng, new_iv
        return None

    # -- recording / roots

    def _record(self, assign, defs) -> None:
        a = dict(assign)
        for x, rep in reversed(defs):
            val = _eval_poly(rep, a)
            if isinstance(val, Fraction) and val.denominator == 1:
                val = int(val)
            a[x] = val
        for p in self.orig:
            if _eval_poly(p, a) != 0:
                return
        if a not in self.solutions:
            self.solutions.append(a)
            if len(self.solutions) >= self.config.max_solutions:
                raise _CapHit

    def _integer_roots(self, cs: dict) -> list[int]:
        den = 1
        for c in cs.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
        ic = {e: int(c * den) for e, c in cs.items() if c}
        roots = set()
        mn = min(ic)
        if mn > 0:
            roots.add(0)
            ic = {e - mn: c for e, c in ic.items()}
        a0 = ic.get(0, 0)
        for pnum in _divisors(a0):
            for r in (pnum, -pnum):
                if sum(c * r**e for e, c in ic.items()) == 0:
                    roots.add(r)
        return sorted(roots)

    @staticmethod
    def _power_roots(target: Fraction, e: int) -> list[int]:
        if target == 0:
            return [0]
        if target.denominator != 1:
            return []
        num = int(target)
        rn = _nth_root_floor(abs(num), e)
        if rn**e != abs(num):
            return []
        if e % 2 == 1:
            return [rn if num > 0 else -rn]
        if num < 0:
            return []
        return [rn, -rn]

    # -- interval narrowing

    def _width(self, iv, v) -> int:
        lo, hi = iv.get(v, (-self.B, self.B))
        return hi - lo

    def _shrink(self, iv, x, lo, hi) -> bool:
        clo, chi = iv.get(x, (-self.B, self.B))
        nlo, nhi = max(clo, lo), min(chi, hi)
        if (nlo, nhi) != (clo, chi):
            iv[x] = (nlo, nhi)
            return True
        return False

    def _hull(self, p: Poly, iv) -> tuple:
        lo = hi = 0
        for m, c in p.items():
            tlo = thi = c
            for v, e in m:
                vl, vh = iv.get(v, (-self.B, self.B))
                if e % 2 == 1:
                    pl, ph = vl**e, vh**e
                else:
                    vals = (vl**e, vh**e)
                    pl = 0 if vl <= 0 <= vh else min(vals)
                    ph = max(vals)
                cands = (tlo * pl, tlo * ph, thi * pl, thi * ph)
                tlo, thi = min(cands), max(cands)
            lo += tlo
            hi += thi
        return lo, hi

    @staticmethod
    def _div_hull(num, den):
        cands = [Fraction(x) / Fraction(y) for x in num for y in den]
        lo, hi = min(cands), max(cands)
        return (
            -((-lo.numerator) // lo.denominator),
            hi.numerator // hi.denominator,
        )

    def _narrow(self, eqs, live, rng, iv, assign):
        cons = [(eqs[i], (0, 0)) for i in live if eqs[i] is not None]
        for p, t in rng:
            q = _subst_assigned(dict(p), assign)
            if _poly_vars(q):
                cons.append((q, t))
        mono_iv: dict[Mono, tuple] = {}
        any_change = False
        for _ in range(self.config.narrow_rounds):
            changed = False
            for p, _t in cons:
                for m in p:
                    if m == ():
                        continue
                    h = self._hull({m: 1}, iv)
                    old = mono_iv.get(m)
                    nh = h if old is None else (max(old[0], h[0]), min(old[1], h[1]))
                    if nh[0] > nh[1]:
                        return "empty"
                    mono_iv[m] = nh
            for p, target in cons:
                terms = [(m, c) for m, c in p.items() if m != ()]
                c0 = p.get((), 0)
                hulls = []
                tot_lo = tot_hi = c0
                for m, c in terms:
                    l, h = mono_iv[m]
                    cl, ch = (c * l, c * h) if c > 0 else (c * h, c * l)
                    hulls.append((cl, ch))
                    tot_lo += cl
                    tot_hi += ch
                if tot_hi < target[0] or tot_lo > target[1]:
                    return "empty"
                for (m, c), (cl, ch) in zip(terms, hulls):
                    rest_lo = tot_lo - cl
                    rest_hi = tot_hi - ch
                    if c > 0:
                        nl = _ceil_div(target[0] - rest_hi, c)
                        nh = _floor_div(target[1] - rest_lo, c)
                    else:
                        nl = _ceil_div(target[1] - rest_lo, c)
                        nh = _floor_div(target[0] - rest_hi, c)
                    ol, oh = mono_iv[m]
                    nl, nh = max(ol, nl), min(oh, nh)
                    if nl > nh:
                        return "empty"
                    if (nl, nh) != (ol, oh):
                        mono_iv[m] = (nl, nh)
                        changed = True
            for m, (ml, mh) in mono_iv.items():
                for x, e in m:
                    if x in assign or x not in iv:
                        continue
                    rest = tuple((v, ee) for v, ee in m if v != x)
                    if rest:
                        rl, rh = self._hull({rest: 1}, iv)
                        if rl <= 0 <= rh:
                            continue
                        plo, phi = self._div_hull((ml, mh), (rl, rh))
                    else:
                        plo, phi = ml, mh
                    if e % 2 == 1:
                        lo2 = _nth_root_ceil(plo, e)
                        hi2 = _nth_root_floor(phi, e)
                    else:
                        if phi < 0:
                            return "empty"
                        hi2 = _nth_root_floor(max(phi, 0), e)
                        lo2 = -hi2
                    if self._shrink(iv, x, lo2, hi2):
                        changed = True
                        if iv[x][0] > iv[x][1]:
                            return "empty"
            for p, target in cons:
                for x in list(_poly_vars(p)):
                    if x in assign or x not in iv:
                        continue
                    with_x = {m: c for m, c in p.items() if x in dict(m)}
                    if {dict(m)[x] for m in with_x} != {1}:
                        continue
                    coeff = {
                        tuple((v, e) for v, e in m if v != x): c
                        for m, c in with_x.items()
                    }
                    rest_p = {m: c for m, c in p.items() if m not in with_x}
                    al, ah = self._hull(coeff, iv)
                    if al <= 0 <= ah:
                        continue
                    bl, bh = self._hull(rest_p, iv)
                    lo2, hi2 = self._div_hull(
                        (target[0] - bh, target[1] - bl), (al, ah)
                    )
                    if self._shrink(iv, x, lo2, hi2):
                        changed = True
                        if iv[x][0] > iv[x][1]:
                            return "empty"
            if not changed:
                break
            any_change = True
        return any_change


def _fold_cube_variables(eqs: list[Poly]) -> tuple[list[Poly], set[int]]:
    """Substitute u = x^3 for variables occurring only with exponents
    divisible by 3 (so their value is determined only up to a cube root
    of unity)."""
    expsets: dict[int, set[int]] = {}
    for p in eqs:
        for m in p:
            for v, e in m:
                expsets.setdefault(v, set()).add(e)
    folded = {v for v, es in expsets.items() if all(e % 3 == 0 for e in es)}
    if not folded:
        return eqs, folded
    out = []
    for p in eqs:
        q: Poly = {}
        for m, c in p.items():
            m2 = tuple((v, e // 3 if v in folded else e) for v, e in m)
            q[m2] = q.get(m2, 0) + c
        out.append({m: c for m, c in q.items() if c})
    return out, folded


def solve(system: EquationSystem, config: SolverConfig | None = None) -> SolutionReport:
    """Search integer assignments with |value| <= config.value_bound.

    Sound: reported assignments satisfy every equation exactly.  Complete
    over the integer box: status "unique" means no other solution was found
    by the exhaustive covering (caps turn the verdict into "exhausted",
    never a silent uniqueness claim).
    """
    config = config or SolverConfig()
    varlist = sorted(system.variables_used())
    index = {v: i for i, v in enumerate(varlist)}
    eqs: list[Poly] = []
    for eq in system.equations:
        p: Poly = {}
        for mono, c in eq.terms:
            m = tuple(sorted((index[v], e) for v, e in mono))
            p[m] = p.get(m, 0) + c
        p = {m: c for m, c in p.items() if c}
        if p:
            eqs.append(p)
    eqs, folded = _fold_cube_variables(eqs)
    search = _Search(eqs, len(varlist), config)
    search.run()

    solutions = []
    for a in search.solutions:
        solutions.append({varlist[i]: val for i, val in a.items()})
    solutions.sort(key=lambda s: sorted((str(k), str(v)) for k, v in s.items()))
    if search.caps_hit:
        status = "exhausted" if len(solutions) < 2 else "multiple"
    elif not solutions:
        status = "contradiction"
    elif len(solutions) == 1:
        status = "unique"
    else:
        status = "multiple"
    return SolutionReport(
        status=status,
        system=system,
        solutions=tuple(solutions),
        free=frozenset(free_variables(system)),
        branches=search.branches,
        caps_hit=search.caps_hit,
        cube_only=frozenset(varlist[i] for i in folded),
    )


# --------------------------------------------------------------------------
# cube-class resolution


@dataclass(frozen=True)
class ResolvedReport:
    """Final per-variable value sets after cube-class expansion.

    A variable occurring only through its cube is determined up to a cube
    root of unity: if its cube is c = d^3 the value set is {d, d*w, d*w^2}.
    If c is not a perfect rational cube no value representable here exists,
    and the variable lands in non_cube instead (reported, never guessed).
    """

    report: SolutionReport
    value_sets: dict[VarId, tuple[PhasedRational, ...]]
    non_cube: dict[VarId, Fraction]


def _cube_root_exact(c: Fraction) -> Fraction | None:
    num = _nth_root_floor(abs(c.numerator), 3)
    den = _nth_root_floor(c.denominator, 3)
    if num**3 != abs(c.numerator) or den**3 != c.denominator:
        return None
    return Fraction(num if c >= 0 else -num, den)


def cube_class_resolve(report: SolutionReport) -> ResolvedReport:
    """Expand cube-only variables of a unique solution into 3-element sets."""
    value_sets: dict[VarId, tuple[PhasedRational, ...]] = {}
    non_cube: dict[VarId, Fraction] = {}
    if report.solutions:
        sol = report.solutions[0]
        for v, val in sol.items():
            if v in report.cube_only:
                root = _cube_root_exact(Fraction(val))
                if root is None:
                    non_cube[v] = Fraction(val)
                else:
                    value_sets[v] = tuple(PhasedRational(root, j) for j in range(3))
            else:
                value_sets[v] = (PhasedRational.of(val),)
    return ResolvedReport(report=report, value_sets=value_sets, non_cube=non_cube)
