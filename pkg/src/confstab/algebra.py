"""Generators and monomial arithmetic for H_*(Conf(R^n); F_p).

For n = 2 the homology is a free graded-commutative algebra:

* p = 2:   F_2[e, x_1, x_2, ...]
* p odd:   F_p[e, y_1, y_2, ...] (x) Lambda[z_0, z_1, ...]

For n > 2 and p = 2 only the classes e and w_j (the omega classes
Q^{2^{j-1}} ... Q^2 Q^1 e) are named here; the full generating set is not
materialized.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator, Mapping


class DomainError(ValueError):
    """An operation was applied outside its domain of definition."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError(f"{p!r} is not a prime")
    return p


@total_ordering
@dataclass(frozen=True)
class Bidegree:
    """(homological degree, particle count).

    ``deg`` is allowed to be -1 only as the formal degree of a Bockstein
    applied to a degree-zero class inside the bracket calculus.
    """

    deg: int
    par: int

    def __post_init__(self) -> None:
        if self.par < 0 or self.deg < -1:
            raise DomainError(f"invalid bidegree ({self.deg}, {self.par})")

    def __add__(self, other: Bidegree) -> Bidegree:
        return Bidegree(self.deg + other.deg, self.par + other.par)

    def __mul__(self, k: int) -> Bidegree:
        return Bidegree(self.deg * k, self.par * k)

    __rmul__ = __mul__

    def __lt__(self, other: Bidegree) -> bool:
        return (self.par, self.deg) < (other.par, other.deg)

    def __iter__(self) -> Iterator[int]:
        return iter((self.deg, self.par))

    def __str__(self) -> str:
        return f"({self.deg},{self.par})"


class Case(enum.Enum):
    SURFACE_F2 = "surface-f2"
    SURFACE_FP_ODD = "surface-fp-odd"
    HIGHER_F2_WORDS = "higher-f2-words"


_FAMILY_ORDER = {"e": 0, "w": 1, "x": 2, "y": 3, "z": 4}
_NAME_RE = re.compile(r"^(e|[wxyz])(\d+)?$")


@dataclass(frozen=True)
class Generator:
    family: str  # one of e, x, y, z, w
    index: int | None
    deg: int
    par: int
    exterior: bool
    p: int
    n: int

    @property
    def name(self) -> str:
        return self.family if self.index is None else f"{self.family}{self.index}"

    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(self.deg, self.par)

    @property
    def sort_key(self) -> tuple[int, int, int]:
        # canonical order: particle count, then family name, then index
        return (self.par, _FAMILY_ORDER[self.family], self.index or 0)

    def __lt__(self, other: Generator) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.name


def apply_xi(b: Bidegree, p: int, n: int) -> Bidegree:
    """Bidegree of the top operation xi applied to a class of bidegree ``b``."""
    check_prime(p)
    if p != 2 and (b.deg + n - 1) % 2:
        raise DomainError(f"xi needs q+n-1 even for odd p (q={b.deg}, n={n})")
    return Bidegree(p * b.deg + (n - 1) * (p - 1), p * b.par)


class QValue(enum.Enum):
    ZERO = "zero"
    # Q^s x = x^p; at p = 2 this is the squaring map
    SQUARE = "square"


def apply_Q(s: int, b: Bidegree, p: int, n: int) -> QValue | Bidegree:
    check_prime(p)
    q, k = b.deg, b.par
    if p == 2:
        if s < 0 or s - q >= n - 1:
            raise DomainError(f"Q^{s} is not admissible on degree {q} for n={n}")
        if s < q:
            return QValue.ZERO
        if s == q:
            return QValue.SQUARE
        return Bidegree(q + s, 2 * k)
    if s < 0 or 2 * s - q >= n - 1:
        raise DomainError(f"Q^{s} is not admissible on degree {q} for n={n}, p={p}")
    if 2 * s < q:
        return QValue.ZERO
    if 2 * s == q:
        return QValue.SQUARE
    return Bidegree(q + 2 * s * (p - 1), p * k)


@dataclass(frozen=True)
class GeneratorSet:
    p: int
    n: int = 2

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.n < 2:
            raise DomainError("ambient dimension must be at least 2")
        if self.n > 2 and self.p != 2:
            raise DomainError("only F_2 coefficients are modelled for n > 2")

    @property
    def case(self) -> Case:
        if self.n > 2:
            return Case.HIGHER_F2_WORDS
        return Case.SURFACE_F2 if self.p == 2 else Case.SURFACE_FP_ODD

    @property
    def families(self) -> tuple[str, ...]:
        return {
            Case.SURFACE_F2: ("e", "x"),
            Case.SURFACE_FP_ODD: ("e", "y", "z"),
            Case.HIGHER_F2_WORDS: ("e", "w"),
        }[self.case]

    def _make(self, family: str, index: int | None) -> Generator:
        p = self.p
        if family not in self.families:
            raise DomainError(f"no generator family {family!r} in case {self.case.value}")
        if family == "e":
            if index is not None:
                raise DomainError("e takes no index")
            return Generator("e", None, 0, 1, False, p, self.n)
        if index is None:
            raise DomainError(f"generator {family} needs an index")
        if family in ("x", "w"):
            if index < 1:
                raise DomainError(f"{family}_j needs j >= 1")
            return Generator(family, index, 2**index - 1, 2**index, False, p, self.n)
        if family == "y":
            if index < 1:
                raise DomainError("y_j needs j >= 1")
            return Generator("y", index, 2 * p**index - 2, 2 * p**index, False, p, self.n)
        if index < 0:
            raise DomainError("z_j needs j >= 0")
        return Generator("z", index, 2 * p**index - 1, 2 * p**index, True, p, self.n)

    def generator(self, name: str) -> Generator:
        m = _NAME_RE.match(name)
        if not m:
            raise DomainError(f"cannot parse generator name {name!r}")
        family, idx = m.group(1), m.group(2)
        return self._make(family, None if idx is None else int(idx))

    @property
    def e(self) -> Generator:
        return self._make("e", None)

    def generators(self, max_par: int) -> tuple[Generator, ...]:
        """All generators with particle count <= max_par, in canonical order."""
        out = [self.e] if max_par >= 1 else []
        for family in self.families[1:]:
            j = 0 if family == "z" else 1
            while True:
                g = self._make(family, j)
                if g.par > max_par:
                    break
                out.append(g)
                j += 1
        return tuple(sorted(out))

    def stability_class(self, m: int) -> Generator:
        """w_0 = e, then x_m (p = 2, n = 2), y_m (p odd) or omega_m (n > 2)."""
        if m < 0:
            raise DomainError("stability index must be >= 0")
        if m == 0:
            return self.e
        return self._make(self.families[1], m)

    def __str__(self) -> str:
        return f"{self.case.value}(p={self.p}, n={self.n})"


@dataclass(frozen=True)
class Monomial:
    """Exponent vector over generators, stored sorted in canonical order."""

    powers: tuple[tuple[Generator, int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for g, k in self.powers:
            if k <= 0:
                raise DomainError("exponents must be positive")
            if g.exterior and k > 1:
                raise DomainError(f"exterior generator {g} has exponent {k}")
            if prev is not None and not prev < g:
                raise DomainError("powers must be sorted and distinct")
            prev = g

    @classmethod
    def from_exponents(cls, exps: Mapping[Generator, int] | Iterable[tuple[Generator, int]]) -> Monomial:
        items = exps.items() if isinstance(exps, Mapping) else exps
        merged: dict[Generator, int] = {}
        for g, k in items:
            merged[g] = merged.get(g, 0) + k
        return cls(tuple(sorted(((g, k) for g, k in merged.items() if k), key=lambda t: t[0].sort_key)))

    @classmethod
    def of(cls, g: Generator, k: int = 1) -> Monomial:
        return cls(((g, k),))

    def exponent(self, g: Generator) -> int:
        for h, k in self.powers:
            if h == g:
                return k
        return 0

    @property
    def generators(self) -> tuple[Generator, ...]:
        return tuple(g for g, _ in self.powers)

    @property
    def sort_key(self) -> tuple:
        return tuple((g.sort_key, k) for g, k in self.powers)

    def __lt__(self, other: Monomial) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if not self.powers:
            return "1"
        return " ".join(g.name if k == 1 else f"{g.name}^{k}" for g, k in self.powers)


def bidegree_of(m: Monomial) -> Bidegree:
    deg = sum(g.deg * k for g, k in m.powers)
    par = sum(g.par * k for g, k in m.powers)
    return Bidegree(deg, par)


class Polynomial:
    """A finite F_p-linear combination of monomials, no zero coefficients stored."""

    __slots__ = ("p", "_terms")

    def __init__(self, p: int, terms: Mapping[Monomial, int] | None = None):
        self.p = p
        clean = {}
        for m, c in (terms or {}).items():
            c %= p
            if c:
                clean[m] = c
        self._terms = dict(sorted(clean.items(), key=lambda t: t[0].sort_key))

    @classmethod
    def monomial(cls, m: Monomial, p: int, coeff: int = 1) -> Polynomial:
        return cls(p, {m: coeff})

    @property
    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    def coefficient(self, m: Monomial) -> int:
        return self._terms.get(m, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.p == other.p and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.p, tuple(self._terms.items())))

    def __add__(self, other: Polynomial) -> Polynomial:
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return Polynomial(self.p, terms)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.p, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def scale(self, c: int) -> Polynomial:
        return Polynomial(self.p, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other: Polynomial) -> Polynomial:
        out = Polynomial(self.p)
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                out = out + multiply(a, b, self.p).scale(ca * cb)
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(str(m) if c == 1 else f"{c}*{m}" for m, c in self._terms.items())


def koszul_sign(a: Monomial, b: Monomial) -> int:
    """Sign picked up moving the odd-degree factors of b past those of a."""
    swaps = 0
    for gb, kb in b.powers:
        if gb.deg % 2 == 0:
            continue
        for ga, ka in a.powers:
            if ga.deg % 2 and gb < ga:
                swaps += ka * kb
    return -1 if swaps % 2 else 1


def multiply(a: Monomial, b: Monomial, p: int) -> Polynomial:
    check_prime(p)
    for g in a.generators + b.generators:
        if g.p != p:
            raise DomainError(f"generator {g} belongs to p={g.p}, not p={p}")
    ambients = {(g.p, g.n) for g in a.generators + b.generators}
    if len(ambients) > 1:
        raise DomainError("monomials come from different generator sets")
    for g in a.generators:
        if g.exterior and b.exponent(g):
            return Polynomial(p)
    merged = Monomial.from_exponents(list(a.powers) + list(b.powers))
    return Polynomial.monomial(merged, p, koszul_sign(a, b))
