"""Sparse multivariate polynomials over unbounded integers, plus a small
expression parser and the catalog of cube identities used elsewhere.

Polynomials are kept in a canonical form (sorted variable names, no unused
variables, no zero coefficients) so equality is structural and zero-testing
is just normalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources


class ParseError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class Polynomial:
    """Immutable sparse polynomial: exponent vectors over named variables."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: tuple[str, ...], terms: dict[tuple[int, ...], int]):
        variables, terms = _normalize(variables, terms)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls((), {(): c} if c else {})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls((name,), {(1,): 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def _aligned(self, other: "Polynomial"):
        if self.variables == other.variables:
            return self.variables, self.terms, other.terms
        allvars = tuple(sorted(set(self.variables) | set(other.variables)))
        return allvars, _embed(self, allvars), _embed(other, allvars)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        allvars, a, b = self._aligned(other)
        out = dict(a)
        for m, c in b.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(allvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        allvars, a, b = self._aligned(other)
        out: dict[tuple[int, ...], int] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(allvars, out)

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, tuple(sorted(self.terms.items()))))

    def evaluate(self, point: dict[str, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            t = c
            for name, e in zip(self.variables, m):
                if e:
                    t *= point[name] ** e
            total += t
        return total

    def _ordered_terms(self):
        # graded lexicographic: total degree desc, then exponent vector desc
        return sorted(self.terms.items(), key=lambda mc: (-sum(mc[0]), tuple(-e for e in mc[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self._ordered_terms():
            factors = [
                f"{name}^{e}" if e > 1 else name
                for name, e in zip(self.variables, m)
                if e
            ]
            body = "*".join(factors)
            if not body:
                parts.append(f"{c}")
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        out = parts[0]
        for part in parts[1:]:
            out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _normalize(variables, terms):
    terms = {m: c for m, c in terms.items() if c}
    if not terms:
        return (), {}
    used = [i for i in range(len(variables)) if any(m[i] for m in terms)]
    names = tuple(variables[i] for i in used)
    order = sorted(range(len(names)), key=lambda i: names[i])
    names_sorted = tuple(names[i] for i in order)
    out: dict[tuple[int, ...], int] = {}
    for m, c in terms.items():
        picked = tuple(m[used[i]] for i in order)
        out[picked] = out.get(picked, 0) + c
    return names_sorted, {m: c for m, c in out.items() if c}


def _embed(p: Polynomial, allvars: tuple[str, ...]) -> dict[tuple[int, ...], int]:
    pos = {name: i for i, name in enumerate(allvars)}
    idx = [pos[name] for name in p.variables]
    out = {}
    for m, c in p.terms.items():
        vec = [0] * len(allvars)
        for i, e in zip(idx, m):
            vec[i] = e
        out[tuple(vec)] = c
    return out


def poly_combine(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_pow(a: Polynomial, e: int) -> Polynomial:
    return a**e


# --------------------------------------------------------------------------
# parser: integers, names, + - * ^, parentheses, unary minus


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Polynomial:
        result = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return result

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> Polynomial:
        result = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                result = result + self.term()
            elif ch == "-":
                self.pos += 1
                result = result - self.term()
            else:
                return result

    def term(self) -> Polynomial:
        result = self.unary()
        while self.peek() == "*":
            self.pos += 1
            result = result * self.unary()
        return result

    def unary(self) -> Polynomial:
        if self.peek() == "-":
            self.pos += 1
            return -self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            start = self.pos
            digits = self._digits()
            if digits is None:
                raise ParseError("exponent must be a nonnegative integer literal", start)
            return base ** int(digits)
        return base

    def atom(self) -> Polynomial:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if ch.isdigit():
            return Polynomial.const(int(self._digits()))
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return Polynomial.var(self.text[start : self.pos])
        raise ParseError(f"unexpected {ch!r}" if ch else "unexpected end of input", self.pos)

    def _digits(self) -> str | None:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return self.text[start : self.pos] if self.pos > start else None


def parse_poly(text: str) -> Polynomial:
    """Parse an expression into a fully expanded canonical polynomial."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# identity catalog


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    lhs: str
    rhs: str
    description: str
    anchor: str


@dataclass(frozen=True)
class IdentityReport:
    id: str
    difference: Polynomial

    @property
    def ok(self) -> bool:
        return self.difference.is_zero


_CATALOG: dict[str, CatalogEntry] | None = None


def load_catalog() -> dict[str, CatalogEntry]:
    global _CATALOG
    if _CATALOG is None:
        raw = resources.files("cubeau.data").joinpath("identities.json").read_text()
        _CATALOG = {
            item["id"]: CatalogEntry(**item) for item in json.loads(raw)
        }
    return _CATALOG


def verify_identity(entry_id: str) -> IdentityReport:
    """Expand lhs - rhs for a catalog entry; verified means exactly zero."""
    catalog = load_catalog()
    if entry_id not in catalog:
        raise KeyError(f"unknown identity {entry_id!r}")
    entry = catalog[entry_id]
    diff = parse_poly(entry.lhs) - parse_poly(entry.rhs)
    return IdentityReport(id=entry_id, difference=diff)


def verify_all() -> list[IdentityReport]:
    return [verify_identity(eid) for eid in load_catalog()]
