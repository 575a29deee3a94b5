"""Monomial bases and dimension tables for H_*(Conf(R^2); F_p).

Dimensions are computed twice: by enumerating monomials bidegree by
bidegree, and by expanding the Poincare series of the free algebra as a
product over generators.  The two routes share nothing but the generator
list.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from confstab.algebra import Bidegree, Case, DomainError, Generator, GeneratorSet, Monomial


def _require_surface(gs: GeneratorSet) -> None:
    if gs.case is Case.HIGHER_F2_WORDS:
        raise DomainError("dimension counts are only available for n = 2")


@lru_cache(maxsize=65536)
def _basis(gs: GeneratorSet, deg: int, par: int, exclude: frozenset[Generator]) -> tuple[Monomial, ...]:
    if deg < 0 or par < 0:
        return ()
    gens = [g for g in gs.generators(par) if g.deg <= deg and g not in exclude]
    gens.reverse()  # largest first; e (if present) comes last
    out: list[Monomial] = []
    chosen: list[tuple[Generator, int]] = []

    def rec(idx: int, rd: int, rp: int) -> None:
        if rd == 0 and rp == 0:
            out.append(Monomial.from_exponents(chosen))
            return
        if idx == len(gens):
            return
        g = gens[idx]
        if g.deg == 0:
            # only e has degree 0
            if rd == 0 and rp % g.par == 0:
                chosen.append((g, rp // g.par))
                rec(idx + 1, 0, 0)
                chosen.pop()
            return
        top = min(rp // g.par, rd // g.deg)
        if g.exterior:
            top = min(top, 1)
        for k in range(top, -1, -1):
            if k:
                chosen.append((g, k))
            rec(idx + 1, rd - k * g.deg, rp - k * g.par)
            if k:
                chosen.pop()

    rec(0, deg, par)
    return tuple(sorted(out))


def enumerate_basis(gs: GeneratorSet, b: Bidegree, exclude: frozenset[Generator] = frozenset()) -> list[Monomial]:
    """Monomials of bidegree ``b`` in canonical order, optionally avoiding some generators."""
    _require_surface(gs)
    return list(_basis(gs, b.deg, b.par, frozenset(exclude)))


def dim(gs: GeneratorSet, i: int, k: int) -> int:
    _require_surface(gs)
    return len(_basis(gs, i, k, frozenset()))


@dataclass(frozen=True)
class Series2:
    """Truncated bivariate power series sum c[i][k] t^i s^k, 0 <= i <= I, 0 <= k <= K."""

    max_deg: int
    max_par: int
    coeffs: tuple[tuple[int, ...], ...]

    def __getitem__(self, ik: tuple[int, int]) -> int:
        i, k = ik
        if 0 <= i <= self.max_deg and 0 <= k <= self.max_par:
            return self.coeffs[i][k]
        raise KeyError(ik)

    def items(self):
        for i, row in enumerate(self.coeffs):
            for k, c in enumerate(row):
                if c:
                    yield (i, k), c

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.items())


def poincare(gs: GeneratorSet, max_deg: int, max_par: int) -> Series2:
    """Product of (1 - t^d s^q)^-1 over polynomial and (1 + t^d s^q) over exterior generators."""
    _require_surface(gs)
    if max_deg < 0 or max_par < 0:
        raise DomainError("truncation bounds must be nonnegative")
    c = [[0] * (max_par + 1) for _ in range(max_deg + 1)]
    c[0][0] = 1
    for g in gs.generators(max_par):
        d, q = g.deg, g.par
        if d > max_deg:
            continue
        if g.exterior:
            # multiply by (1 + t^d s^q): descend so each term is used once
            for i in range(max_deg, d - 1, -1):
                for k in range(max_par, q - 1, -1):
                    c[i][k] += c[i - d][k - q]
        else:
            # multiply by the geometric series: ascend so terms are reused
            for i in range(d, max_deg + 1):
                for k in range(q, max_par + 1):
                    c[i][k] += c[i - d][k - q]
    return Series2(max_deg, max_par, tuple(tuple(row) for row in c))


def _dim_row(args: tuple[GeneratorSet, int, int]) -> tuple[int, ...]:
    gs, i, max_par = args
    return tuple(dim(gs, i, k) for k in range(max_par + 1))


@dataclass(frozen=True)
class DimTable:
    gs: GeneratorSet
    max_deg: int
    max_par: int
    dims: tuple[tuple[int, ...], ...]  # dims[i][k]

    def __getitem__(self, ik: tuple[int, int]) -> int:
        i, k = ik
        return self.dims[i][k]

    def to_json(self) -> str:
        return json.dumps(
            {
                "case": self.gs.case.value,
                "p": self.gs.p,
                "n": self.gs.n,
                "max_deg": self.max_deg,
                "max_par": self.max_par,
                "dims": [list(r) for r in self.dims],
            }
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i\\k", *range(self.max_par + 1)])
        for i, row in enumerate(self.dims):
            w.writerow([i, *row])
        return buf.getvalue()

    def to_markdown(self) -> str:
        head = "| i\\k | " + " | ".join(str(k) for k in range(self.max_par + 1)) + " |"
        rule = "|" + "---|" * (self.max_par + 2)
        rows = [f"| {i} | " + " | ".join(map(str, r)) + " |" for i, r in enumerate(self.dims)]
        return "\n".join([head, rule, *rows]) + "\n"


def dim_table(gs: GeneratorSet, max_deg: int, max_par: int, workers: int = 1) -> DimTable:
    _require_surface(gs)
    jobs = [(gs, i, max_par) for i in range(max_deg + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_dim_row, jobs))
    else:
        rows = [_dim_row(j) for j in jobs]
    return DimTable(gs, max_deg, max_par, tuple(rows))
