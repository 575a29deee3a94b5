"""Expression trees for the homology-operation calculus of Conf(R^n).

Nodes are immutable.  The ambient dimension n and prime p live in a
``Calculus`` object which infers bidegrees and rejects ill-formed
applications (parity of xi, admissibility of Q^s, zeta at p = 2).

Text form is a bracketed prefix grammar, for example
``br(gen(e),xi(gen(z0)))``; ``parse`` and ``str`` are inverse.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from confstab.algebra import Bidegree, DomainError, GeneratorSet, QValue, apply_Q, apply_xi, check_prime

_NAMED = re.compile(r"^(e|[wxyz]\d+)$")


@dataclass(frozen=True)
class Zero:
    deg: int
    par: int

    def __str__(self) -> str:
        return f"zero({self.deg},{self.par})"


@dataclass(frozen=True)
class Gen:
    """A named class (e, x1, y2, z0, w3) or a formal symbol with explicit bidegree."""

    name: str
    deg: int | None = None
    par: int | None = None

    def __str__(self) -> str:
        if self.deg is None:
            return f"gen({self.name})"
        return f"gen({self.name},{self.deg},{self.par})"


@dataclass(frozen=True)
class Scal:
    coeff: int
    arg: Expr

    def __str__(self) -> str:
        return f"sc({self.coeff},{self.arg})"


@dataclass(frozen=True)
class Sum:
    terms: tuple[Expr, ...]

    def __str__(self) -> str:
        return "add(" + ",".join(map(str, self.terms)) + ")"


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"mul({self.left},{self.right})"


@dataclass(frozen=True)
class Pow:
    base: Expr
    exp: int

    def __str__(self) -> str:
        return f"pow({self.base},{self.exp})"


@dataclass(frozen=True)
class Br:
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"br({self.left},{self.right})"


@dataclass(frozen=True)
class Xi:
    arg: Expr

    def __str__(self) -> str:
        return f"xi({self.arg})"


@dataclass(frozen=True)
class Beta:
    arg: Expr

    def __str__(self) -> str:
        return f"beta({self.arg})"


@dataclass(frozen=True)
class BXi:
    arg: Expr

    def __str__(self) -> str:
        return f"bxi({self.arg})"


@dataclass(frozen=True)
class Zeta:
    arg: Expr

    def __str__(self) -> str:
        return f"zeta({self.arg})"


@dataclass(frozen=True)
class Q:
    s: int
    arg: Expr

    def __str__(self) -> str:
        return f"q({self.s},{self.arg})"


@dataclass(frozen=True)
class Ad:
    """ad^i(x)(y) = [x, [x, ... [x, y]]] with i brackets."""

    i: int
    x: Expr
    y: Expr

    def __str__(self) -> str:
        return f"ad({self.i},{self.x},{self.y})"


Expr = Union[Zero, Gen, Scal, Sum, Mul, Pow, Br, Xi, Beta, BXi, Zeta, Q, Ad]

E = Gen("e")


def children(x: Expr) -> tuple[Expr, ...]:
    if isinstance(x, (Zero, Gen)):
        return ()
    if isinstance(x, Sum):
        return x.terms
    if isinstance(x, (Mul, Br)):
        return (x.left, x.right)
    if isinstance(x, Pow):
        return (x.base,)
    if isinstance(x, Ad):
        return (x.x, x.y)
    return (x.arg,)


def with_children(x: Expr, kids: tuple[Expr, ...]) -> Expr:
    if isinstance(x, Sum):
        return Sum(tuple(kids))
    if isinstance(x, Mul):
        return Mul(*kids)
    if isinstance(x, Br):
        return Br(*kids)
    if isinstance(x, Pow):
        return Pow(kids[0], x.exp)
    if isinstance(x, Ad):
        return Ad(x.i, *kids)
    if isinstance(x, Scal):
        return Scal(x.coeff, kids[0])
    if isinstance(x, Q):
        return Q(x.s, kids[0])
    if isinstance(x, (Xi, Beta, BXi, Zeta)):
        return type(x)(kids[0])
    if kids:
        raise ValueError(f"{type(x).__name__} has no children")
    return x


def subterm(x: Expr, path: tuple[int, ...]) -> Expr:
    for idx in path:
        kids = children(x)
        if not 0 <= idx < len(kids):
            raise IndexError(f"no child {idx} in {x}")
        x = kids[idx]
    return x


def replace_at(x: Expr, path: tuple[int, ...], new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(x))
    head, rest = path[0], path[1:]
    if not 0 <= head < len(kids):
        raise IndexError(f"no child {head} in {x}")
    kids[head] = replace_at(kids[head], rest, new)
    return with_children(x, tuple(kids))


def size(x: Expr) -> int:
    return 1 + sum(size(c) for c in children(x))


@dataclass(frozen=True)
class Calculus:
    """Ambient (n, p): bidegree bookkeeping and well-formedness."""

    n: int
    p: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.n < 2:
            raise DomainError("n must be at least 2")

    def named(self, name: str) -> Bidegree:
        if name == "e":
            return Bidegree(0, 1)
        if self.n == 2 or name.startswith("w"):
            try:
                return GeneratorSet(self.p, self.n).generator(name).bidegree
            except DomainError:
                pass
        raise DomainError(f"no class named {name} for n={self.n}, p={self.p}")

    def bidegree(self, x: Expr) -> Bidegree:
        n, p = self.n, self.p
        if isinstance(x, Zero):
            return Bidegree(x.deg, x.par)
        if isinstance(x, Gen):
            if x.deg is None:
                return self.named(x.name)
            if _NAMED.match(x.name):
                raise DomainError(f"{x.name} is a reserved class name")
            return Bidegree(x.deg, x.par)
        if isinstance(x, Scal):
            if not 0 < x.coeff < p:
                raise DomainError(f"scalar {x.coeff} is not a nonzero residue mod {p}")
            return self.bidegree(x.arg)
        if isinstance(x, Sum):
            if len(x.terms) < 2:
                raise DomainError("a sum needs at least two terms")
            bs = {self.bidegree(t) for t in x.terms}
            if len(bs) != 1:
                raise DomainError(f"inhomogeneous sum {x}")
            return bs.pop()
        if isinstance(x, Mul):
            return self.bidegree(x.left) + self.bidegree(x.right)
        if isinstance(x, Pow):
            if x.exp < 1:
                raise DomainError("powers must be positive")
            return self.bidegree(x.base) * x.exp
        if isinstance(x, Br):
            a, b = self.bidegree(x.left), self.bidegree(x.right)
            return Bidegree(a.deg + b.deg + n - 1, a.par + b.par)
        if isinstance(x, Ad):
            if x.i < 1:
                raise DomainError("ad needs a positive exponent")
            a, b = self.bidegree(x.x), self.bidegree(x.y)
            return Bidegree(x.i * (a.deg + n - 1) + b.deg, x.i * a.par + b.par)
        if isinstance(x, Beta):
            b = self.bidegree(x.arg)
            return Bidegree(b.deg - 1, b.par)
        if isinstance(x, Xi):
            return apply_xi(self.bidegree(x.arg), p, n)
        if isinstance(x, (BXi, Zeta)):
            if p == 2:
                raise DomainError(f"{type(x).__name__.lower()} is only defined for odd p")
            b = apply_xi(self.bidegree(x.arg), p, n)
            return Bidegree(b.deg - 1, b.par)
        if isinstance(x, Q):
            b = self.bidegree(x.arg)
            r = apply_Q(x.s, b, p, n)
            if r is QValue.ZERO or r is QValue.SQUARE:
                # degenerate values keep the generic bidegree
                return Bidegree(b.deg + (x.s if p == 2 else 2 * x.s * (p - 1)), p * b.par)
            return r
        raise TypeError(f"not an expression: {x!r}")

    def deg(self, x: Expr) -> int:
        return self.bidegree(x).deg

    def check(self, x: Expr) -> Expr:
        """Validate every node of ``x``; returns ``x``."""
        self.bidegree(x)
        return x

    def zero_like(self, x: Expr) -> Zero:
        b = self.bidegree(x)
        return Zero(b.deg, b.par)

    def scal(self, c: int, x: Expr) -> Expr:
        c %= self.p
        if c == 0:
            return self.zero_like(x)
        return x if c == 1 else Scal(c, x)

    def sign(self, exponent: int) -> int:
        return self.p - 1 if exponent % 2 else 1


_TOKEN = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_][A-Za-z0-9_]*)|([(),]))")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ValueError(f"expected {want or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def int_(self) -> int:
        tok = self.take()
        try:
            return int(tok)
        except ValueError:
            raise ValueError(f"expected integer, got {tok!r}") from None

    def expr(self) -> Expr:
        head = self.take()
        self.take("(")
        if head == "zero":
            d = self.int_()
            self.take(",")
            out: Expr = Zero(d, self.int_())
        elif head == "gen":
            name = self.take()
            if self.peek() == ",":
                self.take(",")
                d = self.int_()
                self.take(",")
                out = Gen(name, d, self.int_())
            else:
                out = Gen(name)
        elif head == "sc":
            c = self.int_()
            self.take(",")
            out = Scal(c, self.expr())
        elif head == "add":
            terms = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                terms.append(self.expr())
            out = Sum(tuple(terms))
        elif head in ("mul", "br"):
            a = self.expr()
            self.take(",")
            b = self.expr()
            out = Mul(a, b) if head == "mul" else Br(a, b)
        elif head == "pow":
            a = self.expr()
            self.take(",")
            out = Pow(a, self.int_())
        elif head in ("xi", "beta", "bxi", "zeta"):
            out = {"xi": Xi, "beta": Beta, "bxi": BXi, "zeta": Zeta}[head](self.expr())
        elif head == "q":
            s = self.int_()
            self.take(",")
            out = Q(s, self.expr())
        elif head == "ad":
            i = self.int_()
            self.take(",")
            a = self.expr()
            self.take(",")
            out = Ad(i, a, self.expr())
        else:
            raise ValueError(f"unknown constructor {head!r}")
        self.take(")")
        return out


def parse(text: str) -> Expr:
    p = _Parser(text)
    out = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input after expression: {p.toks[p.i:]}")
    return out
