"""Randomized checks of the bracket sign conventions.

The oracle is a matrix model: each formal generator becomes a random
homogeneous super-matrix over F_p whose parity is the shifted degree
deg + n - 1, and the bracket is the supercommutator.  This is a Lie
superalgebra, so the printed antisymmetry and Jacobi identities must hold
on every evaluation, and an incorrect sign shows up as a nonzero residual.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from confstab.browder.expr import Br, Calculus, Expr, Gen, Mul, Scal, Sum, Zero
from confstab.browder.rules import RuleError, apply_rule, collect
from confstab.stability import Report

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SuperModel:
    """Super-matrices of size (even | odd) over F_p."""

    p: int
    even: int = 3
    odd: int = 3

    @property
    def size(self) -> int:
        return self.even + self.odd

    def zero(self) -> Matrix:
        return tuple((0,) * self.size for _ in range(self.size))

    def random(self, rng: random.Random, parity: int) -> Matrix:
        m = self.size
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                same = (i < self.even) == (j < self.even)
                # even matrices are block diagonal, odd ones off-diagonal
                row.append(rng.randrange(self.p) if same == (parity % 2 == 0) else 0)
            rows.append(tuple(row))
        return tuple(rows)

    def add(self, a: Matrix, b: Matrix) -> Matrix:
        return tuple(tuple((x + y) % self.p for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def scale(self, c: int, a: Matrix) -> Matrix:
        return tuple(tuple(c * x % self.p for x in r) for r in a)

    def mul(self, a: Matrix, b: Matrix) -> Matrix:
        cols = list(zip(*b))
        return tuple(tuple(sum(x * y for x, y in zip(r, c)) % self.p for c in cols) for r in a)

    def bracket(self, a: Matrix, pa: int, b: Matrix, pb: int) -> Matrix:
        sign = -1 if (pa * pb) % 2 else 1
        return self.add(self.mul(a, b), self.scale(-sign % self.p, self.mul(b, a)))


class Evaluator:
    """Evaluate bracket-only expressions in the matrix model."""

    def __init__(self, calc: Calculus, model: SuperModel, rng: random.Random):
        self.calc, self.model, self.rng = calc, model, rng
        self.env: dict[str, Matrix] = {}

    def parity(self, x: Expr) -> int:
        return (self.calc.deg(x) + self.calc.n - 1) % 2

    def __call__(self, x: Expr) -> Matrix:
        m = self.model
        if isinstance(x, Zero):
            return m.zero()
        if isinstance(x, Gen):
            if x.name not in self.env:
                self.env[x.name] = m.random(self.rng, self.parity(x))
            return self.env[x.name]
        if isinstance(x, Scal):
            return m.scale(x.coeff, self(x.arg))
        if isinstance(x, Sum):
            out = m.zero()
            for t in x.terms:
                out = m.add(out, self(t))
            return out
        if isinstance(x, Br):
            return m.bracket(self(x.left), self.parity(x.left), self(x.right), self.parity(x.right))
        raise TypeError(f"the matrix model has no interpretation of {type(x).__name__}")


class ExprSampler:
    """Random well-formed bracket expressions over formal generators."""

    def __init__(self, calc: Calculus, rng: random.Random, n_gens: int = 6):
        self.calc, self.rng = calc, rng
        # a small pool of bidegrees so that sums of equal bidegree occur
        self.gens = [Gen(f"a{i}", rng.randrange(0, 4), rng.randrange(1, 3)) for i in range(n_gens)]

    def expr(self, depth: int = 3) -> Expr:
        r = self.rng.random()
        if depth == 0 or r < 0.3:
            return self.rng.choice(self.gens)
        if r < 0.75:
            return Br(self.expr(depth - 1), self.expr(depth - 1))
        if r < 0.85:
            return Scal(self.rng.randrange(1, self.calc.p), self.expr(depth - 1))
        a = self.expr(depth - 1)
        b = self.calc.bidegree(a)
        for _ in range(30):
            c = self.expr(depth - 1)
            if self.calc.bidegree(c) == b and c != a:
                return Sum((a, c))
        return a


def _jacobi_sum(calc: Calculus, x: Expr, y: Expr, z: Expr) -> Expr:
    """The printed three-term Jacobi expression."""

    def s(v: Expr) -> int:
        return calc.deg(v) + calc.n - 1

    def term(a: Expr, b: Expr, c: Expr) -> Expr:
        return calc.scal(calc.sign(s(a) * s(c)), Br(a, Br(b, c)))

    return Sum((term(x, y, z), term(y, z, x), term(z, x, y)))


def verify_sign_identities(n: int, p: int, samples: int = 100, seed: int = 0) -> Report:
    calc = Calculus(n, p)
    rng = random.Random(f"{seed}:{n}:{p}")
    sampler = ExprSampler(calc, rng)
    model = SuperModel(p)
    ev = Evaluator(calc, model, rng)
    zero = model.zero()
    rep = Report("sign-identities", {"n": n, "p": p, "samples": samples, "seed": seed})
    counts = {"double_antisym": 0, "antisym_model": 0, "jacobi_printed": 0, "jacobi_rule": 0,
              "self_bracket": 0, "derivation_roundtrip": 0}

    def fail(kind: str, detail: str) -> None:
        rep.violations.append({"identity": kind, "detail": detail})

    for _ in range(samples):
        x, y, z = sampler.expr(), sampler.expr(), sampler.expr()
        rep.checked += 1

        e0 = Br(x, y)
        e1 = apply_rule(calc, e0, "antisym", ())
        inner = (0,) if isinstance(e1, Scal) else ()
        e2 = apply_rule(calc, e1, "antisym", inner)
        if collect(calc, e2) != collect(calc, e0):
            fail("double_antisym", str(e0))
        counts["double_antisym"] += 1
        if ev(e1) != ev(e0):
            fail("antisym_model", str(e0))
        counts["antisym_model"] += 1

        if ev(_jacobi_sum(calc, x, y, z)) != zero:
            fail("jacobi_printed", f"{x} ; {y} ; {z}")
        counts["jacobi_printed"] += 1
        j0 = Br(x, Br(y, z))
        if ev(apply_rule(calc, j0, "jacobi", ())) != ev(j0):
            fail("jacobi_rule", str(j0))
        counts["jacobi_rule"] += 1

        if p == 2:
            sb = Br(x, x)
            ok = ev(sb) == zero and isinstance(apply_rule(calc, sb, "self_bracket_p2", ()), Zero)
        else:
            sb = Br(x, Br(x, x))
            ok = ev(sb) == zero and isinstance(apply_rule(calc, sb, "triple_self", ()), Zero)
        if not ok:
            fail("self_bracket", str(sb))
        counts["self_bracket"] += 1

        d0 = Br(x, Mul(y, z))
        try:
            d1 = apply_rule(calc, d0, "derivation", ())
            back = apply_rule(calc, d1, "derivation_contract", ())
            if back != d0 or calc.bidegree(d1) != calc.bidegree(d0):
                fail("derivation_roundtrip", str(d0))
        except RuleError as exc:
            fail("derivation_roundtrip", f"{d0}: {exc}")
        counts["derivation_roundtrip"] += 1

    rep.extra["counts"] = counts
    rep.extra["model"] = f"super-matrices ({model.even}|{model.odd}) over F_{p}"
    return rep
