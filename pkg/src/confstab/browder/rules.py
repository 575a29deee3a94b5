"""Rewrite rules of the bracket calculus.

Each rule acts on the subterm at a child-index path and must preserve its
bidegree.  Signs are taken from the printed properties of the Browder
bracket with s(x) = deg(x) + n - 1 the shifted degree:

    antisymmetry  [x,y] = (-1)^(1 + |x||y| + (n-1)(|x|+|y|+1)) [y,x]
    Jacobi        0 = sum over cyclic (x,y,z) of (-1)^(s(x)s(z)) [x,[y,z]]
    derivation    [x,yz] = [x,y]z + (-1)^(|y|(|x|+n-1)) y[x,z]
    Bockstein     b[x,y] = [bx,y] + (-1)^(n-1+|x|) [x,by]
"""
from __future__ import annotations

from collections.abc import Callable

from confstab.algebra import DomainError, GeneratorSet, QValue, apply_Q
from confstab.browder.expr import (
    E,
    Ad,
    Beta,
    Br,
    BXi,
    Calculus,
    Expr,
    Gen,
    Mul,
    Pow,
    Q,
    Scal,
    Sum,
    Xi,
    Zero,
    Zeta,
    replace_at,
    subterm,
)


class RuleError(ValueError):
    """A rule was applied where its pattern or side condition fails."""


LinComb = dict[Expr, int]


# ---- linear-combination normal form ----


def _add_into(acc: LinComb, term: Expr, c: int, p: int) -> None:
    v = (acc.get(term, 0) + c) % p
    if v:
        acc[term] = v
    else:
        acc.pop(term, None)


def _factors(t: Expr) -> list[Expr]:
    if isinstance(t, Mul):
        return _factors(t.left) + _factors(t.right)
    if isinstance(t, Pow):
        return _factors(t.base) * t.exp
    return [t]


def _product(calc: Calculus, ta: Expr, tb: Expr) -> tuple[int, Expr] | None:
    """Koszul-sorted product of two atoms, or None if it vanishes."""
    fs = [(calc.bidegree(f), str(f), f) for f in _factors(ta) + _factors(tb)]
    sign = 1
    # insertion sort, counting swaps of two odd-degree factors
    for i in range(1, len(fs)):
        j = i
        while j > 0 and (fs[j][0].par, fs[j][0].deg, fs[j][1]) < (fs[j - 1][0].par, fs[j - 1][0].deg, fs[j - 1][1]):
            if fs[j][0].deg % 2 and fs[j - 1][0].deg % 2:
                sign = -sign
            fs[j], fs[j - 1] = fs[j - 1], fs[j]
            j -= 1
    runs: list[list] = []
    for b, _, f in fs:
        if runs and runs[-1][0] == f:
            runs[-1][1] += 1
        else:
            runs.append([f, 1])
    out: Expr | None = None
    for f, k in runs:
        if k > 1 and calc.p != 2 and calc.deg(f) % 2:
            return None  # odd classes square to zero for odd p
        g = f if k == 1 else Pow(f, k)
        out = g if out is None else Mul(out, g)
    assert out is not None
    return sign % calc.p, out


def _lc(calc: Calculus, x: Expr) -> LinComb:
    p = calc.p
    if isinstance(x, Zero):
        return {}
    if isinstance(x, Gen):
        return {x: 1}
    if isinstance(x, Scal):
        return {t: c * x.coeff % p for t, c in _lc(calc, x.arg).items() if c * x.coeff % p}
    if isinstance(x, Sum):
        acc: LinComb = {}
        for t in x.terms:
            for a, c in _lc(calc, t).items():
                _add_into(acc, a, c, p)
        return acc
    if isinstance(x, (Mul, Pow)):
        if isinstance(x, Mul):
            parts = [_lc(calc, x.left), _lc(calc, x.right)]
        else:
            parts = [_lc(calc, x.base)] * x.exp
        acc = parts[0]
        for nxt in parts[1:]:
            new: LinComb = {}
            for ta, ca in acc.items():
                for tb, cb in nxt.items():
                    r = _product(calc, ta, tb)
                    if r is not None:
                        _add_into(new, r[1], r[0] * ca * cb, p)
            acc = new
        return acc
    if isinstance(x, Br):
        acc = {}
        right = _lc(calc, x.right)
        for ta, ca in _lc(calc, x.left).items():
            for tb, cb in right.items():
                _add_into(acc, Br(ta, tb), ca * cb, p)
        return acc
    if isinstance(x, Beta):
        return {Beta(t): c for t, c in _lc(calc, x.arg).items()}
    if isinstance(x, Ad):
        X = _rebuild(calc, _lc(calc, x.x), calc.bidegree(x.x))
        if isinstance(X, Zero):
            return {}
        return {Ad(x.i, X, t): c for t, c in _lc(calc, x.y).items()}
    if isinstance(x, (Xi, BXi, Zeta, Q)):
        A = _rebuild(calc, _lc(calc, x.arg), calc.bidegree(x.arg))
        if isinstance(A, Zero):
            return {}
        return {Q(x.s, A) if isinstance(x, Q) else type(x)(A): 1}
    raise TypeError(f"not an expression: {x!r}")


def _rebuild(calc: Calculus, lc: LinComb, b) -> Expr:
    items = sorted(((str(t), t, c % calc.p) for t, c in lc.items() if c % calc.p), key=lambda r: r[0])
    if not items:
        return Zero(b.deg, b.par)
    terms = [calc.scal(c, t) for _, t, c in items]
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def collect(calc: Calculus, x: Expr) -> Expr:
    """Normal form: a sorted linear combination of atoms with Koszul-sorted products."""
    return _rebuild(calc, _lc(calc, x), calc.bidegree(x))


def linear_combination(calc: Calculus, x: Expr) -> LinComb:
    return _lc(calc, x)


# ---- named classes ----


def definition(calc: Calculus, name: str) -> Expr:
    """The defining expression of a named generator."""
    n, p = calc.n, calc.p
    if name == "e":
        raise RuleError("e is primitive")
    gs = GeneratorSet(p, n) if (n == 2 or p == 2) else None
    try:
        g = gs.generator(name) if gs else None
    except DomainError:
        g = None
    if g is None:
        raise RuleError(f"no definition for {name} at n={n}, p={p}")
    j = g.index
    if g.family == "x":
        return Xi(E if j == 1 else Gen(f"x{j - 1}"))
    if g.family == "z":
        return Br(E, E) if j == 0 else Xi(Gen(f"z{j - 1}"))
    if g.family == "y":
        return BXi(Gen(f"z{j - 1}"))
    if g.family == "w":
        return Q(1, E) if j == 1 else Q(2 ** (j - 1), Gen(f"w{j - 1}"))
    raise RuleError(f"no definition for {name}")


def _named_candidates(calc: Calculus, t: Expr) -> list[str]:
    if calc.n > 2 and calc.p != 2:
        return []
    b = calc.bidegree(t)
    if b.par < 1:
        return []
    gs = GeneratorSet(calc.p, calc.n)
    return [g.name for g in gs.generators(b.par) if g.bidegree == b and g.family != "e"]


# ---- local rules; each maps (calc, subterm) to its replacement ----


def _sign(calc: Calculus, exponent: int) -> int:
    return calc.sign(exponent)


def r_collect(calc: Calculus, t: Expr) -> Expr:
    return collect(calc, t)


def r_lin(calc: Calculus, t: Expr) -> Expr:
    """Linearity of the bracket (either slot) and of the Bockstein, one level."""
    if isinstance(t, Beta):
        a = t.arg
        if isinstance(a, Sum):
            return Sum(tuple(Beta(u) for u in a.terms))
        if isinstance(a, Scal):
            return Scal(a.coeff, Beta(a.arg))
        if isinstance(a, Zero):
            return calc.zero_like(t)
        raise RuleError("lin: Bockstein of a non-linear-combination")
    if not isinstance(t, Br):
        raise RuleError("lin needs a bracket or a Bockstein")
    x, y = t.left, t.right
    if isinstance(x, Sum):
        return Sum(tuple(Br(u, y) for u in x.terms))
    if isinstance(x, Scal):
        return Scal(x.coeff, Br(x.arg, y))
    if isinstance(y, Sum):
        return Sum(tuple(Br(x, u) for u in y.terms))
    if isinstance(y, Scal):
        return Scal(y.coeff, Br(x, y.arg))
    if isinstance(x, Zero) or isinstance(y, Zero):
        return calc.zero_like(t)
    raise RuleError("lin: neither slot is a linear combination")


def r_antisym(calc: Calculus, t: Expr) -> Expr:
    if not isinstance(t, Br):
        raise RuleError("antisym needs a bracket")
    dx, dy = calc.deg(t.left), calc.deg(t.right)
    s = _sign(calc, 1 + dx * dy + (calc.n - 1) * (dx + dy + 1))
    return calc.scal(s, Br(t.right, t.left))


def _shift(calc: Calculus, x: Expr) -> int:
    return calc.deg(x) + calc.n - 1


def r_jacobi(calc: Calculus, t: Expr) -> Expr:
    """[x,[y,z]] -> c1 [y,[z,x]] + c2 [z,[x,y]] solved from the printed identity."""
    if not (isinstance(t, Br) and isinstance(t.right, Br)):
        raise RuleError("jacobi needs [x,[y,z]]")
    x, y, z = t.left, t.right.left, t.right.right
    sx, sy, sz = _shift(calc, x), _shift(calc, y), _shift(calc, z)
    a = _sign(calc, sx * sz)
    b = _sign(calc, sy * sx)
    c = _sign(calc, sz * sy)
    p = calc.p
    c1 = (-a * b) % p
    c2 = (-a * c) % p
    return Sum((Scal(c1, Br(y, Br(z, x))), Scal(c2, Br(z, Br(x, y)))))


def r_self_bracket_p2(calc: Calculus, t: Expr) -> Expr:
    if calc.p != 2:
        raise RuleError("[x,x] = 0 needs p = 2")
    if not (isinstance(t, Br) and t.left == t.right):
        raise RuleError("self_bracket_p2 needs [x,x]")
    return calc.zero_like(t)


def r_triple_self(calc: Calculus, t: Expr) -> Expr:
    if calc.p == 2:
        raise RuleError("[x,[x,x]] = 0 is the odd-p specialization")
    if not (isinstance(t, Br) and isinstance(t.right, Br) and t.left == t.right.left == t.right.right):
        raise RuleError("triple_self needs [x,[x,x]]")
    return calc.zero_like(t)


def r_derivation(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Br) and isinstance(t.right, Mul)):
        raise RuleError("derivation needs [x, yz]")
    x, y, z = t.left, t.right.left, t.right.right
    s = _sign(calc, calc.deg(y) * (calc.deg(x) + calc.n - 1))
    return Sum((Mul(Br(x, y), z), Scal(s, Mul(y, Br(x, z)))))


def r_derivation_contract(calc: Calculus, t: Expr) -> Expr:
    """Inverse of ``derivation`` on its exact output shape."""
    if not (isinstance(t, Sum) and len(t.terms) == 2):
        raise RuleError("derivation_contract needs a two-term sum")
    first, second = t.terms
    coeff = 1
    if isinstance(second, Scal):
        coeff, second = second.coeff, second.arg
    ok = (
        isinstance(first, Mul)
        and isinstance(first.left, Br)
        and isinstance(second, Mul)
        and isinstance(second.right, Br)
    )
    if not ok:
        raise RuleError("derivation_contract: shape mismatch")
    x, y, z = first.left.left, first.left.right, first.right
    if second.left != y or second.right.left != x or second.right.right != z:
        raise RuleError("derivation_contract: terms do not match")
    s = _sign(calc, calc.deg(y) * (calc.deg(x) + calc.n - 1))
    if coeff % calc.p != s:
        raise RuleError("derivation_contract: wrong sign")
    return Br(x, Mul(y, z))


def r_dl_vanish(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Br) and isinstance(t.right, Q)):
        raise RuleError("dl_vanish needs [x, Q^s y]")
    return calc.zero_like(t)


def r_zeta_vanish(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Br) and isinstance(t.right, Zeta)):
        raise RuleError("zeta_vanish needs [x, zeta y]")
    return calc.zero_like(t)


def r_xi_bracket(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Br) and isinstance(t.right, Xi)):
        raise RuleError("xi_bracket needs [x, xi y]")
    x, y = t.left, t.right.arg
    if calc.p == 2:
        return Br(y, Br(y, x))
    return Ad(calc.p, y, x)


def r_bockstein_bracket(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Beta) and isinstance(t.arg, Br)):
        raise RuleError("bockstein_bracket needs beta[x,y]")
    x, y = t.arg.left, t.arg.right
    s = _sign(calc, calc.n - 1 + calc.deg(x))
    return Sum((Br(Beta(x), y), Scal(s, Br(x, Beta(y)))))


def r_beta_deg0(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Beta) and calc.deg(t.arg) == 0):
        raise RuleError("beta_deg0 needs beta of a degree-0 class")
    return calc.zero_like(t)


def r_beta_xi(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Beta) and isinstance(t.arg, Xi)):
        raise RuleError("beta_xi needs beta(xi y)")
    return BXi(t.arg.arg)


def r_zeta_def(calc: Calculus, t: Expr) -> Expr:
    """zeta(y) = bxi(y) - ad^(p-1)(y)(beta y)."""
    if not isinstance(t, Zeta):
        raise RuleError("zeta_def needs zeta(y)")
    y = t.arg
    return Sum((BXi(y), Scal(calc.p - 1, Ad(calc.p - 1, y, Beta(y)))))


def r_zeta_fold(calc: Calculus, t: Expr) -> Expr:
    """bxi(y) = zeta(y) + ad^(p-1)(y)(beta y)."""
    if not isinstance(t, BXi):
        raise RuleError("zeta_fold needs bxi(y)")
    y = t.arg
    return Sum((Zeta(y), Ad(calc.p - 1, y, Beta(y))))


def r_ad_unfold(calc: Calculus, t: Expr) -> Expr:
    if not isinstance(t, Ad):
        raise RuleError("ad_unfold needs ad^i")
    inner = t.y if t.i == 1 else Ad(t.i - 1, t.x, t.y)
    return Br(t.x, inner)


def r_point_bracket(calc: Calculus, t: Expr) -> Expr:
    """[e,e] is twice a generator of H_{n-1}(RP^{n-1}); zero for n odd or p = 2."""
    if t != Br(E, E):
        raise RuleError("point_bracket needs [e,e]")
    if calc.n % 2 == 0 and calc.p != 2:
        raise RuleError("[e,e] is nonzero for n even and p odd")
    return calc.zero_like(t)


def r_unfold(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Gen) and t.deg is None):
        raise RuleError("unfold needs a named class")
    return definition(calc, t.name)


def r_fold(calc: Calculus, t: Expr) -> Expr:
    for name in _named_candidates(calc, t):
        try:
            if definition(calc, name) == t:
                return Gen(name)
        except RuleError:
            continue
    raise RuleError(f"fold: {t} is not the definition of a named class")


def r_pow_split(calc: Calculus, t: Expr) -> Expr:
    if not (isinstance(t, Pow) and t.exp >= 2):
        raise RuleError("pow_split needs x^k with k >= 2")
    rest = t.base if t.exp == 2 else Pow(t.base, t.exp - 1)
    return Mul(t.base, rest)


def r_q_degenerate(calc: Calculus, t: Expr) -> Expr:
    if not isinstance(t, Q):
        raise RuleError("q_degenerate needs Q^s y")
    r = apply_Q(t.s, calc.bidegree(t.arg), calc.p, calc.n)
    if r is QValue.ZERO:
        return calc.zero_like(t)
    if r is QValue.SQUARE:
        return Pow(t.arg, calc.p)
    raise RuleError("q_degenerate: Q^s is not degenerate here")


RULES: dict[str, Callable[[Calculus, Expr], Expr]] = {
    "collect": r_collect,
    "lin": r_lin,
    "antisym": r_antisym,
    "jacobi": r_jacobi,
    "self_bracket_p2": r_self_bracket_p2,
    "triple_self": r_triple_self,
    "derivation": r_derivation,
    "derivation_contract": r_derivation_contract,
    "dl_vanish": r_dl_vanish,
    "zeta_vanish": r_zeta_vanish,
    "xi_bracket": r_xi_bracket,
    "bockstein_bracket": r_bockstein_bracket,
    "beta_deg0": r_beta_deg0,
    "beta_xi": r_beta_xi,
    "zeta_def": r_zeta_def,
    "zeta_fold": r_zeta_fold,
    "ad_unfold": r_ad_unfold,
    "point_bracket": r_point_bracket,
    "unfold": r_unfold,
    "fold": r_fold,
    "pow_split": r_pow_split,
    "q_degenerate": r_q_degenerate,
}


def apply_rule(calc: Calculus, expr: Expr, rule: str, path: tuple[int, ...] = ()) -> Expr:
    """Rewrite the subterm of ``expr`` at ``path`` with ``rule``."""
    try:
        fn = RULES[rule]
    except KeyError:
        raise RuleError(f"unknown rule {rule!r}") from None
    try:
        t = subterm(expr, tuple(path))
    except IndexError as exc:
        raise RuleError(str(exc)) from None
    before = calc.bidegree(t)
    try:
        new = fn(calc, t)
        after = calc.bidegree(new)
    except DomainError as exc:
        raise RuleError(f"{rule}: {exc}") from None
    if after != before:
        raise RuleError(f"{rule} changed bidegree {before} -> {after}")
    return replace_at(expr, tuple(path), new)
