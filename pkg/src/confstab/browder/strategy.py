"""Directed search for proofs that [z, e] = 0.

The strategy follows the four branches of the stabilization-class lemma:
p-th powers (derivation, coefficient p), Dyer-Lashof images, the point
class e, and the surface generators x_i, y_i, z_i (recursion through xi,
ad-unfolding, Jacobi and the Bockstein).  Whenever no branch applies the
verdict is Unknown; nothing is searched beyond these branches.
"""
from __future__ import annotations

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
    subterm,
)
from confstab.browder.rules import RuleError, apply_rule, collect
from confstab.browder.trace import ProofTrace, Step

Path = tuple[int, ...]


class _Prover:
    def __init__(self, calc: Calculus, expr: Expr):
        self.calc = calc
        self.expr = expr
        self.steps: list[Step] = []

    def step(self, rule: str, path: Path) -> None:
        self.expr = apply_rule(self.calc, self.expr, rule, path)
        self.steps.append(Step(rule, path, self.expr))

    def at(self, path: Path) -> Expr:
        return subterm(self.expr, path)

    def tidy(self, path: Path) -> bool:
        """Collect at ``path`` (if that changes anything); True if it is now zero."""
        t = self.at(path)
        if collect(self.calc, t) != t:
            self.step("collect", path)
        return isinstance(self.at(path), Zero)

    # [c, e] or [e, c]
    def kill(self, path: Path) -> bool:
        t = self.at(path)
        if isinstance(t, Zero):
            return True
        if not isinstance(t, Br):
            return False
        if t.left == E:
            return self.kill_e(path)
        if t.right != E:
            return False
        self.step("antisym", path)
        inner = path + (0,) if isinstance(self.at(path), Scal) else path
        return self.kill_e(inner) and self.tidy(path)

    # [e, c]
    def kill_e(self, path: Path) -> bool:
        calc = self.calc
        c = self.at(path).right
        sub = path + (1,)
        if isinstance(c, Zero):
            return self.tidy(path)
        if c == E:
            if calc.p == 2:
                self.step("self_bracket_p2", path)
                return True
            if calc.n % 2:
                self.step("point_bracket", path)
                return True
            return False
        if isinstance(c, Gen):
            try:
                self.step("unfold", sub)
            except RuleError:
                return False
            return self.kill_e(path)
        if isinstance(c, Q):
            self.step("dl_vanish", path)
            return True
        if isinstance(c, Zeta):
            self.step("zeta_vanish", path)
            return True
        if isinstance(c, Xi):
            self.step("xi_bracket", path)
            if isinstance(self.at(path), Ad):
                return self._kill_ad_chain(path)
            # p = 2: [y,[y,e]]
            return self.kill(path + (1,)) and self.tidy(path)
        if isinstance(c, BXi):
            self.step("zeta_fold", sub)
            self.step("lin", path)
            self.step("zeta_vanish", path + (0,))
            return self.kill_e(path + (1,)) and self.tidy(path)
        if isinstance(c, Beta):
            self.reduce_beta(sub)
            if self.tidy(path):
                return True
            return self.kill_e(path)
        if isinstance(c, Ad):
            if isinstance(c.y, Beta):
                self.reduce_beta(sub + (1,))
                if self.tidy(path):
                    return True
                c = self.at(path).right
                if not isinstance(c, Ad):
                    return self.kill_e(path)
            self.step("ad_unfold", sub)
            return self.kill_e(path)
        if isinstance(c, Br):
            a, b = c.left, c.right
            if a == b == E and calc.p != 2:
                self.step("triple_self", path)
                return True
            if a == b and calc.p == 2:
                self.step("self_bracket_p2", sub)
                return self.tidy(path)
            self.step("jacobi", path)
            # add(sc(c1, [a,[b,e]]), sc(c2, [b,[e,a]]))
            return self.kill(path + (0, 0, 1)) and self.kill(path + (1, 0, 1)) and self.tidy(path)
        if isinstance(c, Pow):
            if c.exp % calc.p == 0:
                self.expand_power(path)
                return self.tidy(path)
            if c.exp == 1:
                self.step("collect", sub)
                return self.kill_e(path)
            self.step("pow_split", sub)
            return self.kill_e(path)
        if isinstance(c, Mul):
            self.step("derivation", path)
            first = path + (0, 0)
            second = path + (1, 0, 1)
            return self.kill(first) and self.kill(second) and self.tidy(path)
        if isinstance(c, (Sum, Scal)):
            self.step("lin", path)
            t = self.at(path)
            n_kids = len(t.terms) if isinstance(t, Sum) else 1
            return all(self.kill(path + (j,)) for j in range(n_kids)) and self.tidy(path)
        return False

    def _kill_ad_chain(self, path: Path) -> bool:
        """ad^i(y)(e): unfold to nested brackets and kill the innermost [y, e]."""
        depth = 0
        while isinstance(self.at(path + (1,) * depth), Ad):
            self.step("ad_unfold", path + (1,) * depth)
            depth += 1
        return self.kill(path + (1,) * (depth - 1)) and self.tidy(path)

    def expand_power(self, path: Path) -> None:
        """[e, y^k] -> sum of y^j [e,y] y^(k-1-j) without evaluating [e,y]."""
        t = self.at(path)
        if not (isinstance(t, Br) and isinstance(t.right, Pow)):
            return
        self.step("pow_split", path + (1,))
        self.step("derivation", path)
        if isinstance(self.at(path + (1, 0, 1)).right, Pow):
            self.expand_power(path + (1, 0, 1))

    def reduce_beta(self, path: Path) -> None:
        t = self.at(path)
        if not isinstance(t, Beta):
            return
        y = t.arg
        calc = self.calc
        if calc.deg(y) == 0:
            self.step("beta_deg0", path)
        elif isinstance(y, Gen) and y.deg is None:
            self.step("unfold", path + (0,))
            self.reduce_beta(path)
        elif isinstance(y, Xi) and calc.p != 2:
            self.step("beta_xi", path)
            try:
                self.step("fold", path)
            except RuleError:
                pass
        elif isinstance(y, Br):
            self.step("bockstein_bracket", path)
            self.reduce_beta(path + (0, 0))
            self.reduce_beta(path + (1, 0, 1))
            self.tidy(path)


def _normal_form(calc: Calculus, prover: _Prover) -> Expr:
    # fold to a named class where possible, e.g. [e,e] -> z0
    try:
        prover.step("fold", ())
    except RuleError:
        pass
    return prover.expr


def check_point_bracket(z: Expr, n: int, p: int) -> ProofTrace:
    """Try to certify [z, e] = 0 along the lemma's branches."""
    calc = Calculus(n, p)
    calc.check(z)
    start = Br(z, E)
    prover = _Prover(calc, start)
    trace = ProofTrace(n, p, start)
    try:
        if z == E and (p == 2 or n % 2):
            prover.step("point_bracket", ())
            ok = True
        else:
            ok = prover.kill(())
            if ok:
                ok = prover.tidy(())
    except RuleError as exc:
        ok = False
        trace.note = f"strategy stopped: {exc}"
    trace.steps = prover.steps
    if ok and isinstance(prover.expr, Zero):
        trace.verdict = "Vanishes"
        trace.result = prover.expr
    elif z == E and n % 2 == 0 and p != 2 and not prover.steps:
        # [e,e] is twice a generator of H_{n-1}(RP^{n-1}): nonzero here
        trace.result = _normal_form(calc, prover)
        trace.steps = prover.steps
        trace.verdict = "NormalForm"
    else:
        trace.verdict = "Unknown"
        trace.result = prover.expr
    return trace
