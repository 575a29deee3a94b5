"""Stable-range constants, ideal quotients and brute-force range verifiers.

The homology of the m-th iterated mapping cone of (t_e, t_{w_1}, ...,
t_{w_{m-1}}) over R^2 is the quotient of the free algebra by the monomial
ideal (w_0, ..., w_{m-1}), so every statement here reduces to counting
monomials.  All range comparisons are done with exact rationals.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from confstab.algebra import Bidegree, DomainError, Generator, GeneratorSet, Monomial, bidegree_of, check_prime
from confstab.basis import enumerate_basis


@dataclass(frozen=True)
class RangeConstant:
    """D(p, m, k) = (B k - C) / A."""

    p: int
    m: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.m < 1:
            raise DomainError("the range constant needs m >= 1")

    @property
    def A(self) -> int:
        return self.p**self.m

    @property
    def B(self) -> int:
        return self.p**self.m - 1

    @property
    def C(self) -> int:
        if self.p == 2:
            return 0
        return sum(self.p**self.m - 2 * self.p**j for j in range(self.m))

    def value(self, k: int) -> Fraction:
        return Fraction(self.B * k - self.C, self.A)

    def floor(self, k: int) -> int:
        """Largest integer i with i <= D."""
        return math.floor(self.value(k))

    def strict_floor(self, k: int) -> int:
        """Largest integer i with i < D."""
        return math.ceil(self.value(k)) - 1


def D_constant(p: int, m: int, k: int) -> Fraction:
    return RangeConstant(p, m).value(k)


@dataclass(frozen=True)
class IdealSpec:
    generators: tuple[Generator, ...]

    @classmethod
    def stability(cls, gs: GeneratorSet, m: int) -> IdealSpec:
        """The ideal (w_0, ..., w_{m-1}); empty for m = 0."""
        return cls(tuple(gs.stability_class(j) for j in range(m)))

    def __contains__(self, mon: Monomial) -> bool:
        return any(mon.exponent(g) for g in self.generators)

    def __str__(self) -> str:
        return "(" + ", ".join(g.name for g in self.generators) + ")"


def ideal_member(mon: Monomial, ideal: IdealSpec) -> bool:
    return mon in ideal


def unstable_member(b: Bidegree, p: int, m: int) -> bool:
    """Is ``b`` in the m-th unstable range, deg >= D(p, m, par)?"""
    return b.deg >= D_constant(p, m, b.par)


@dataclass(frozen=True)
class ConeLabel:
    gs: GeneratorSet
    m: int
    bidegree: Bidegree

    def __post_init__(self) -> None:
        if self.m < 0:
            raise DomainError("cone order must be >= 0")


def cone_basis(label: ConeLabel) -> list[Monomial]:
    """Basis of the order-m cone homology: monomials avoiding w_0, ..., w_{m-1}."""
    ideal = IdealSpec.stability(label.gs, label.m)
    b = label.bidegree
    if b.deg < 0:
        return []
    return enumerate_basis(label.gs, b, exclude=frozenset(ideal.generators))


def cone_dim(gs: GeneratorSet, m: int, i: int, k: int) -> int:
    if i < 0:
        return 0
    return len(cone_basis(ConeLabel(gs, m, Bidegree(i, k))))


def stab_cokernel(gs: GeneratorSet, m: int, i: int, k: int) -> list[Monomial]:
    """Target basis monomials of the order-m cone not hit by multiplication with w_m.

    The map is computed explicitly on the quotient bases; injectivity is
    checked by asserting the image monomials are distinct.
    """
    if m < 0:
        raise DomainError("cone order must be >= 0")
    w = gs.stability_class(m)
    if i < 0:
        return []
    target = cone_basis(ConeLabel(gs, m, Bidegree(i, k)))
    si, sk = i - w.deg, k - w.par
    if si < 0 or sk < 0:
        return target
    source = cone_basis(ConeLabel(gs, m, Bidegree(si, sk)))
    image = {Monomial.from_exponents(list(u.powers) + [(w, 1)]) for u in source}
    if len(image) != len(source):
        raise AssertionError(f"multiplication by {w} is not injective at ({si},{sk})")
    return [t for t in target if t not in image]


def stab_cokernel_dim(gs: GeneratorSet, m: int, i: int, k: int) -> int:
    return len(stab_cokernel(gs, m, i, k))


@dataclass
class Report:
    statement: str
    params: dict[str, Any]
    checked: int = 0
    violations: list[dict[str, Any]] = field(default_factory=list)
    witness: dict[str, Any] | None = None
    boundary: list[list[int]] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict[str, Any]:
        d = {
            "statement": self.statement,
            "params": self.params,
            "checked": self.checked,
            "violations": self.violations,
            "witness": self.witness,
            "passed": self.passed,
            "boundary": self.boundary,
        }
        d.update(self.extra)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)


def _coverage_at_k(args: tuple) -> tuple[int, list, list]:
    gs, m, k, slack = args
    shift = gs.stability_class(m - 1)
    rc = RangeConstant(gs.p, m)
    ideal = IdealSpec.stability(gs, m)
    top = rc.floor(k) + slack
    checked, bad, boundary = 0, [], []
    for i in range(-shift.deg, top + 1):
        t = Bidegree(i + shift.deg, k + shift.par)
        checked += 1
        if rc.value(k) == i:
            boundary.append([k, i])
        for mon in enumerate_basis(gs, t):
            if mon not in ideal:
                bad.append({"k": k, "i": i, "target": [t.deg, t.par], "monomial": str(mon)})
    return checked, bad, boundary


def _iso_at_k(args: tuple) -> tuple[int, list, list]:
    gs, m, k, slack = args
    w = gs.stability_class(m)
    rc = RangeConstant(gs.p, m + 1)
    top = rc.floor(k) + slack
    checked, bad, boundary = 0, [], []
    for i in range(-w.deg, top + 1):
        ti, tk = i + w.deg, k + w.par
        checked += 1
        if rc.value(k) == i:
            boundary.append([k, i])
        for mon in stab_cokernel(gs, m, ti, tk):
            bad.append({"k": k, "i": i, "target": [ti, tk], "monomial": str(mon)})
    return checked, bad, boundary


def _run(statement: str, fn, gs: GeneratorSet, m: int, k_max: int, slack: int, workers: int) -> Report:
    jobs = [(gs, m, k, slack) for k in range(k_max + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        parts = [fn(j) for j in jobs]
    rep = Report(statement, {"case": gs.case.value, "p": gs.p, "n": gs.n, "m": m, "k_max": k_max, "slack": slack})
    for checked, bad, boundary in parts:
        rep.checked += checked
        rep.violations.extend(bad)
        rep.boundary.extend(boundary)
    rep.violations.sort(key=lambda v: (v["k"], v["i"], v["monomial"]))
    return rep


def verify_ideal_coverage(gs: GeneratorSet, m: int, k_max: int, slack: int = 0, workers: int = 1) -> Report:
    """Every class at (i + deg w_{m-1}, k + par w_{m-1}) with i <= D(p,m,k) lies in (w_0..w_{m-1}).

    ``slack`` widens the range to i <= floor(D) + slack; a positive slack
    is expected to produce violations.
    """
    if m < 1:
        raise DomainError("ideal coverage needs m >= 1")
    return _run("ideal-coverage", _coverage_at_k, gs, m, k_max, slack, workers)


def verify_iso_range(gs: GeneratorSet, m: int, k_max: int, slack: int = 0, workers: int = 1) -> Report:
    """Multiplication by w_m on the order-m cone is onto for i <= D(p, m+1, k).

    Injectivity holds structurally and is asserted inside ``stab_cokernel``.
    """
    if m < 0:
        raise DomainError("cone order must be >= 0")
    rep = _run("iso-range", _iso_at_k, gs, m, k_max, slack, workers)
    rep.extra["injective"] = True
    return rep


@dataclass(frozen=True)
class Witness:
    monomial: Monomial
    target: Bidegree
    k: int
    i: int
    D: Fraction

    def as_dict(self) -> dict[str, Any]:
        return {
            "monomial": str(self.monomial),
            "target": [self.target.deg, self.target.par],
            "source": [self.i, self.k],
            "D": str(self.D),
        }


def optimality_witness(gs: GeneratorSet, m: int, k_max: int) -> Witness | None:
    """First k (then i = floor(D)+1) at which multiplication by w_m fails to be onto."""
    w = gs.stability_class(m)
    rc = RangeConstant(gs.p, m + 1)
    for k in range(k_max + 1):
        i = rc.floor(k) + 1
        ti, tk = i + w.deg, k + w.par
        if ti < 0:
            continue
        coker = stab_cokernel(gs, m, ti, tk)
        if coker:
            return Witness(coker[0], Bidegree(ti, tk), k, i, rc.value(k))
    return None


def ideal_part_dim(gs: GeneratorSet, m: int, i: int, k: int) -> int:
    ideal = IdealSpec.stability(gs, m)
    return sum(1 for mon in enumerate_basis(gs, Bidegree(i, k)) if mon in ideal)


def monomial_unstable(mon: Monomial, p: int, m: int) -> bool:
    return unstable_member(bidegree_of(mon), p, m)


def nearest_failure(gs: GeneratorSet, m: int, k_max: int) -> Witness | None:
    """The failure of surjectivity closest above the range: minimal i - D(p, m+1, k).

    Ties are broken by increasing k, then i.  Unlike ``optimality_witness``
    the source degree is not pinned to floor(D) + 1.
    """
    w = gs.stability_class(m)
    rc = RangeConstant(gs.p, m + 1)
    best: Witness | None = None
    for k in range(k_max + 1):
        D = rc.value(k)
        tk = k + w.par
        i = rc.floor(k) + 1
        # every generator has deg < par, so nothing lives at degree >= tk
        while i + w.deg < max(tk, 1) and (best is None or i - D < best.i - best.D):
            ti = i + w.deg
            coker = stab_cokernel(gs, m, ti, tk) if ti >= 0 else []
            if coker:
                best = Witness(coker[0], Bidegree(ti, tk), k, i, D)
                break
            i += 1
    return best
