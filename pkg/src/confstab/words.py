"""Dyer-Lashof words over F_2 for n > 2 and the unstable-range case analysis.

A word is a chain of operations Q^s and xi applied to the point class e.
The homology of Conf(R^n; F_2) is free graded-commutative on some subset of
the reduced words; we work with all of them, which is a superset, so every
check here is at least as strong as the statement about the true basis.

Range checks over all monomials use that D(2, m, k) is linear in k: the
slack 2^m deg - (2^m - 1) par is additive over products, so an exact
minimum-slack knapsack over words covers every monomial without listing
them.  ``enumerate_word_monomials`` lists them explicitly for small bounds.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator

from confstab.algebra import Bidegree, DomainError, QValue, apply_Q, apply_xi
from confstab.stability import D_constant, Report

TAGS = ("i", "ii", "iii", "iv", "v", "vi", "Q-degenerate")


@dataclass(frozen=True, order=True)
class Op:
    kind: str  # "Q" or "xi"
    s: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Q", "xi"):
            raise DomainError(f"unknown operation {self.kind!r}")
        if self.kind == "xi" and self.s:
            raise DomainError("xi takes no index")

    def __str__(self) -> str:
        return "xi" if self.kind == "xi" else f"Q^{self.s}"


XI = Op("xi")


@lru_cache(maxsize=None)
def _apply(op: Op, b: Bidegree, n: int) -> Bidegree | QValue:
    if op.kind == "xi":
        return apply_xi(b, 2, n)
    return apply_Q(op.s, b, 2, n)


@dataclass(frozen=True)
class OpWord:
    """Operations listed outermost first; the empty word is e."""

    ops: tuple[Op, ...]
    n: int
    bidegree: Bidegree = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.n <= 2:
            raise DomainError("operation words are modelled for n > 2")
        if not self.ops:
            b = Bidegree(0, 1)
        else:
            y = self.inner.bidegree
            b = _apply(self.ops[0], y, self.n)  # raises on inadmissible Q^s
            if isinstance(b, QValue):
                # degenerate values keep the formal bidegree
                b = Bidegree(y.deg + self.ops[0].s, 2 * y.par)
        object.__setattr__(self, "bidegree", b)

    @classmethod
    def point(cls, n: int) -> OpWord:
        return cls((), n)

    @property
    def is_point(self) -> bool:
        return not self.ops

    @property
    def outer(self) -> Op:
        return self.ops[0]

    @cached_property
    def inner(self) -> OpWord:
        return _word(self.ops[1:], self.n)

    def apply(self, op: Op) -> OpWord:
        return _word((op,) + self.ops, self.n)

    def outer_value(self) -> QValue | None:
        """ZERO or SQUARE if the outermost operation is degenerate."""
        if self.is_point or self.outer.kind == "xi":
            return None
        r = _apply(self.outer, self.inner.bidegree, self.n)
        return r if isinstance(r, QValue) else None

    @cached_property
    def reduced(self) -> bool:
        """No degenerate operation anywhere in the word."""
        return self.is_point or (self.outer_value() is None and self.inner.reduced)

    @cached_property
    def key(self) -> tuple:
        return (self.bidegree.par, self.bidegree.deg, tuple((o.kind, o.s) for o in self.ops))

    def sort_key(self) -> tuple:
        return self.key

    def __lt__(self, other: OpWord) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return " ".join([*(str(o) for o in self.ops), "e"])


@lru_cache(maxsize=None)
def _word(ops: tuple[Op, ...], n: int) -> OpWord:
    # shared instances keep the cached inner words and bidegrees
    return OpWord(ops, n)


def A(j: int) -> int:
    return 2**j - 1


def omega(j: int, n: int) -> OpWord:
    """omega_1 = Q^1 e and omega_j = Q^(A(j-1)+1) omega_(j-1), of bidegree (2^j - 1, 2^j)."""
    if n <= 2:
        raise DomainError("omega_j needs n > 2")
    if j < 1:
        raise DomainError("omega_j needs j >= 1")
    return OpWord(tuple(Op("Q", 2**i) for i in range(j - 1, -1, -1)), n)


def omega_index(w: OpWord) -> int | None:
    """j if w is omega_j, else None."""
    j = len(w.ops)
    if j and all(o.kind == "Q" and o.s == 2 ** (j - 1 - i) for i, o in enumerate(w.ops)):
        return j
    return None


@dataclass(frozen=True)
class WordMonomial:
    factors: tuple[tuple[OpWord, int], ...]

    def __post_init__(self) -> None:
        merged: Counter = Counter()
        for w, k in self.factors:
            if k < 0:
                raise DomainError("negative exponent")
            if k:
                merged[w] += k
        object.__setattr__(self, "factors", tuple(sorted(merged.items(), key=lambda t: t[0].sort_key())))

    @classmethod
    def of(cls, *words: OpWord) -> WordMonomial:
        return cls(tuple((w, 1) for w in words))

    @property
    def bidegree(self) -> Bidegree:
        d = sum(w.bidegree.deg * k for w, k in self.factors)
        q = sum(w.bidegree.par * k for w, k in self.factors)
        return Bidegree(d, q)

    @property
    def words(self) -> tuple[OpWord, ...]:
        return tuple(w for w, _ in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for w, k in self.factors:
            s = str(w) if len(w.ops) == 0 else f"({w})"
            parts.append(s if k == 1 else f"{s}^{k}")
        return " ".join(parts)


@dataclass(frozen=True)
class Classification:
    verdict: str  # IdealMember | Unstable | Reduces
    tag: str | None
    reduced: WordMonomial | None = None
    vanishes: bool = False
    detail: str = ""

    def as_dict(self) -> dict:
        d = {"verdict": self.verdict, "tag": self.tag, "detail": self.detail}
        if self.verdict == "Reduces":
            d["to"] = "0" if self.vanishes else str(self.reduced)
        return d


def unstable(b: Bidegree, m: int) -> bool:
    return b.deg >= D_constant(2, m, b.par)


def slack(b: Bidegree, m: int) -> int:
    """2^m (deg - D(2, m, par)); additive over products."""
    return 2**m * b.deg - (2**m - 1) * b.par


def _ideal_word(w: OpWord, m: int) -> bool:
    j = omega_index(w)
    return w.is_point or (j is not None and j < m)


@lru_cache(maxsize=None)
def word_tag(w: OpWord, m: int) -> str | None:
    """Which printed case makes a reduced, non-ideal word unstable (None if none does)."""
    if not w.reduced or _ideal_word(w, m):
        return None
    n = w.n
    j = omega_index(w)
    if j is not None:
        return "i"  # j >= m here
    y, op = w.inner, w.outer
    jy = omega_index(y)
    if op.kind == "xi" and jy is not None:
        return "ii"
    if word_tag(y, m) is not None and unstable(y.bidegree, m):
        a = y.bidegree.deg
        if op.kind == "xi" or a <= op.s < a + n - 1:
            return "iii"
    if jy is not None and 1 <= jy <= m - 1 and op.kind == "Q" and A(jy) + 1 < op.s < A(jy) + n - 1:
        return "v"
    if y.is_point and (op.kind == "xi" or 1 < op.s < n - 1):
        return "vi"
    return None


def _reduce_outer(mon: WordMonomial) -> Classification | None:
    for w, k in mon.factors:
        v = w.outer_value()
        if v is None:
            continue
        if not w.inner.reduced:
            raise DomainError(f"{w}: only the outermost operation may be degenerate")
        if v is QValue.ZERO:
            return Classification("Reduces", "Q-degenerate", None, True, f"Q^{w.outer.s} below degree vanishes")
        rest = [(u, c) for u, c in mon.factors if u != w] + [(w.inner, 2 * k)]
        return Classification("Reduces", "Q-degenerate", WordMonomial(tuple(rest)), False, f"Q^{w.outer.s} is squaring")
    return None


def classify(mon: WordMonomial | OpWord, n: int, m: int) -> Classification:
    """Verdict for a monomial in words, following the printed case analysis."""
    if isinstance(mon, OpWord):
        mon = WordMonomial.of(mon)
    if n <= 2 or m < 1:
        raise DomainError("classification needs n > 2 and m >= 1")
    if any(w.n != n for w in mon.words):
        raise DomainError("word built for a different n")
    red = _reduce_outer(mon)
    if red is not None:
        return red
    for w in mon.words:
        if not w.reduced:
            raise DomainError(f"{w}: only the outermost operation may be degenerate")
    if any(_ideal_word(w, m) for w in mon.words):
        gens = sorted({"e" if w.is_point else f"omega_{omega_index(w)}" for w in mon.words if _ideal_word(w, m)})
        return Classification("IdealMember", None, detail="divisible by " + ", ".join(gens))
    tags = [word_tag(w, m) for w in mon.words]
    if not mon.factors:
        return Classification("Unjustified", None, detail="empty monomial")
    if None in tags:
        bad = [str(w) for w, t in zip(mon.words, tags) if t is None]
        return Classification("Unjustified", None, detail="no case applies to " + "; ".join(bad))
    if len(mon.factors) == 1 and mon.factors[0][1] == 1:
        return Classification("Unstable", tags[0], detail=str(mon.words[0]))
    return Classification("Unstable", "iv", detail="product of unstable words")


def replay_classification(mon: WordMonomial | OpWord, c: Classification, n: int, m: int) -> bool:
    """Re-derive a verdict from its tag: the hypothesis of the case and its inequality."""
    if isinstance(mon, OpWord):
        mon = WordMonomial.of(mon)
    if c.verdict == "Reduces":
        w = next((u for u in mon.words if u.outer_value() is not None), None)
        if w is None:
            return False
        if c.vanishes:
            return w.outer.s < w.inner.bidegree.deg
        return w.outer.s == w.inner.bidegree.deg and c.reduced is not None and c.reduced.bidegree == mon.bidegree
    if c.verdict == "IdealMember":
        return any(_ideal_word(w, m) for w in mon.words)
    if c.verdict != "Unstable":
        return False
    if not unstable(mon.bidegree, m):
        return False
    if c.tag == "iv":
        return all(word_tag(w, m) is not None and unstable(w.bidegree, m) for w in mon.words)
    if len(mon.words) != 1:
        return False
    w = mon.words[0]
    if c.tag == "i":
        j = omega_index(w)
        return j is not None and j >= m
    y, op = w.inner, w.outer
    if c.tag == "ii":
        return op.kind == "xi" and omega_index(y) is not None
    if c.tag == "iii":
        a = y.bidegree.deg
        return unstable(y.bidegree, m) and (op.kind == "xi" or a <= op.s < a + n - 1)
    if c.tag == "v":
        j = omega_index(y)
        return j is not None and 1 <= j <= m - 1 and op.kind == "Q" and A(j) + 1 < op.s < A(j) + n - 1
    if c.tag == "vi":
        return y.is_point and (op.kind == "xi" or 1 < op.s < n - 1)
    return False


def words_up_to(n: int, par_bound: int, reduced_only: bool = True) -> list[OpWord]:
    """All words with particle count <= par_bound, in canonical order.

    With ``reduced_only`` false, words whose outermost operation is
    degenerate are included as well.
    """
    if n <= 2:
        raise DomainError("operation words are modelled for n > 2")
    out: list[OpWord] = []
    frontier = [OpWord.point(n)] if par_bound >= 1 else []
    while frontier:
        nxt = []
        for w in frontier:
            out.append(w)
            if 2 * w.bidegree.par > par_bound:
                continue
            q = w.bidegree.deg
            for s in range(0, q + n - 1):
                u = w.apply(Op("Q", s))
                if s > q:
                    nxt.append(u)
                elif not reduced_only:
                    out.append(u)
            nxt.append(w.apply(XI))
        frontier = nxt
    return sorted(out)


def _count_monomials(pars: list[int], bound: int) -> list[int]:
    """c[k] = number of monomials of particle count k in free polynomial generators of the given pars."""
    c = [0] * (bound + 1)
    c[0] = 1
    for q in pars:
        for k in range(q, bound + 1):
            c[k] += c[k - q]
    return c


def _min_slack(words: list[OpWord], m: int, bound: int) -> tuple[list[int | None], list[OpWord | None]]:
    """best[k] = minimal slack over nonempty monomials of particle count exactly k."""
    best: list[int | None] = [None] * (bound + 1)
    last: list[OpWord | None] = [None] * (bound + 1)
    sl = [(w, w.bidegree.par, slack(w.bidegree, m)) for w in words]
    for k in range(1, bound + 1):
        for w, q, s in sl:
            if q > k:
                continue
            if q == k:
                cand = s
            elif best[k - q] is None:
                continue
            else:
                cand = best[k - q] + s
            if best[k] is None or cand < best[k]:
                best[k], last[k] = cand, w
    return best, last


def _argmin_monomial(last: list[OpWord | None], k: int) -> WordMonomial:
    parts: list[OpWord] = []
    while k > 0:
        w = last[k]
        assert w is not None
        parts.append(w)
        k -= w.bidegree.par
    return WordMonomial.of(*parts)


def verify_word_ranges(n: int, m: int, par_bound: int, strict: bool = False) -> Report:
    """Every monomial outside K_(m-1) = (e, omega_1..omega_(m-1)) with par <= bound has deg >= D(2, m, par).

    ``strict`` demands deg > D instead, which is expected to fail on a
    boundary word.
    """
    if n <= 2 or m < 1 or par_bound < 0:
        raise DomainError("need n > 2, m >= 1 and a nonnegative particle bound")
    rep = Report("word-ranges", {"n": n, "m": m, "par_bound": par_bound, "strict": strict})
    words = words_up_to(n, par_bound)
    free = [w for w in words if not _ideal_word(w, m)]
    hist: Counter = Counter()

    # word level: every non-ideal word is justified by a printed case
    for w in free:
        c = classify(w, n, m)
        if c.verdict != "Unstable" or not replay_classification(w, c, n, m):
            rep.violations.append({"word": str(w), "bidegree": list(w.bidegree), "classification": c.as_dict()})
        else:
            hist[c.tag] += 1

    # degenerate outermost operations reduce inside the bound
    degenerate = [w for w in words_up_to(n, par_bound, reduced_only=False) if not w.reduced]
    for w in degenerate:
        c = classify(w, n, m)
        ok = c.verdict == "Reduces" and replay_classification(w, c, n, m)
        if ok and not c.vanishes:
            ok = all(u.reduced and u.bidegree.par <= par_bound for u in c.reduced.words)
        if ok:
            hist["Q-degenerate"] += 1
        else:
            rep.violations.append({"word": str(w), "classification": c.as_dict()})

    # monomial level: exact minimum of 2^m (deg - D) over all non-ideal monomials
    counts = _count_monomials([w.bidegree.par for w in free], par_bound)
    total = _count_monomials([w.bidegree.par for w in words], par_bound)
    best, last = _min_slack(free, m, par_bound)
    ks = [k for k in range(1, par_bound + 1) if best[k] is not None]
    non_ideal = sum(counts[1:])
    rep.checked = non_ideal
    singles = len(free)
    hist["iv"] += non_ideal - singles
    if ks:
        kmin = min(ks, key=lambda k: (best[k], k))
        mon = _argmin_monomial(last, kmin)
        b = mon.bidegree
        rep.witness = {
            "monomial": str(mon),
            "bidegree": [b.deg, b.par],
            "D": str(D_constant(2, m, b.par)),
            "slack": str(Fraction(best[kmin], 2**m)),
        }
        if best[kmin] < 0 or (strict and best[kmin] <= 0):
            rel = ">" if strict else ">="
            rep.violations.append(
                {"monomial": str(mon), "bidegree": [b.deg, b.par], "D": str(D_constant(2, m, b.par)),
                 "failed": f"deg {rel} D(2,{m},par)"}
            )
    rep.extra["histogram"] = {t: hist.get(t, 0) for t in TAGS}
    rep.extra["words"] = len(words)
    rep.extra["non_ideal_words"] = len(free)
    rep.extra["ideal_monomials"] = sum(total[1:]) - non_ideal
    rep.extra["min_slack"] = rep.witness["slack"] if rep.witness else None
    return rep


def enumerate_word_monomials(n: int, par_bound: int) -> Iterator[WordMonomial]:
    """Every nonempty monomial in reduced words with par <= par_bound (small bounds only)."""
    words = words_up_to(n, par_bound)

    def rec(idx: int, room: int, acc: list[tuple[OpWord, int]]) -> Iterator[WordMonomial]:
        if idx == len(words):
            if acc:
                yield WordMonomial(tuple(acc))
            return
        w = words[idx]
        q = w.bidegree.par
        for k in range(room // q, -1, -1):
            if k:
                acc.append((w, k))
            yield from rec(idx + 1, room - k * q, acc)
            if k:
                acc.pop()

    yield from rec(0, par_bound, [])
