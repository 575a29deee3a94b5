import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confstab.algebra import Bidegree, DomainError
from confstab.browder import (
    RULES,
    Calculus,
    RuleError,
    apply_rule,
    check_point_bracket,
    collect,
    parse,
    replay,
    replay_jsonl,
)
from confstab.browder.expr import E, Br, BXi, Gen, Mul, Pow, Q, Scal, Sum, Xi, Zero, Zeta
from confstab.browder.signs import ExprSampler, _jacobi_sum, verify_sign_identities

C23, C22 = Calculus(2, 3), Calculus(2, 2)


def test_bidegree_examples():
    assert C22.bidegree(Br(E, E)) == Bidegree(1, 2)
    assert C23.bidegree(Br(E, E)) == Bidegree(1, 2)
    assert C23.bidegree(Xi(Gen("z0"))) == Bidegree(5, 6)
    assert C23.bidegree(BXi(Gen("z0"))) == Bidegree(4, 6)
    assert C23.bidegree(BXi(Gen("z0"))) == C23.bidegree(Gen("y1"))


def test_construction_errors():
    with pytest.raises(DomainError):
        C23.bidegree(Xi(E))  # parity
    with pytest.raises(DomainError):
        C22.bidegree(Zeta(E))  # zeta needs p odd
    with pytest.raises(DomainError):
        Calculus(3, 2).bidegree(Q(3, Gen("a", 1, 2)))  # admissibility
    with pytest.raises(DomainError):
        C23.bidegree(Sum((E, Gen("z0"))))


def test_parse_roundtrip():
    for text in ["br(gen(e),gen(e))", "add(mul(gen(z0),gen(e)),sc(2,gen(z0)))", "q(1,gen(e))",
                 "ad(2,gen(z0),gen(e))", "bxi(gen(z0))", "pow(gen(e),3)", "zero(1,2)"]:
        assert str(parse(text)) == text


def test_rule_examples():
    assert apply_rule(C22, Br(E, E), "antisym") == Br(E, E)
    a, b, c = Gen("a", 1, 2), Gen("b", 2, 3), Gen("c", 1, 1)
    out = apply_rule(C23, Br(a, Mul(b, c)), "derivation")
    # sign (-1)^{|b|(|a|+n-1)} = (-1)^{2*2} = +1; the rule keeps a fixed output shape
    assert out == Sum((Mul(Br(a, b), c), Scal(1, Mul(b, Br(a, c)))))
    out = apply_rule(C23, Br(b, Mul(a, c)), "derivation")
    assert out == Sum((Mul(Br(b, a), c), Scal(2, Mul(a, Br(b, c)))))
    assert isinstance(apply_rule(Calculus(3, 2), Br(E, Q(1, E)), "dl_vanish"), Zero)
    with pytest.raises(RuleError):
        apply_rule(C23, E, "antisym")
    with pytest.raises(RuleError):
        apply_rule(C23, Br(E, E), "no_such_rule")


def test_lemma_cases_vanish_and_replay():
    cases = [(Pow(E, 3), 2, 3), (Pow(E, 3), 3, 3), (E, 2, 2), (E, 3, 3), (Q(1, E), 3, 2),
             (Gen("x1"), 2, 2), (Gen("x3"), 2, 2), (Gen("y1"), 2, 3), (Gen("y3"), 2, 3),
             (Gen("z2"), 2, 3), (Gen("y2"), 2, 5), (Mul(Gen("x1"), Gen("x2")), 2, 2)]
    for z, n, p in cases:
        tr = check_point_bracket(z, n, p)
        assert tr.verdict == "Vanishes", (z, n, p, tr.note)
        assert replay(tr).ok


def test_y_trace_uses_zeta_and_bockstein():
    rules = {s.rule for s in check_point_bracket(Gen("y1"), 2, 3).steps}
    assert {"zeta_fold", "zeta_vanish", "bockstein_bracket", "beta_deg0"} <= rules


def test_point_bracket_is_not_killed_for_n_even_p_odd():
    for n, p, want in ((2, 3, "gen(z0)"), (2, 5, "gen(z0)"), (4, 3, "br(gen(e),gen(e))")):
        tr = check_point_bracket(E, n, p)
        assert tr.verdict == "NormalForm"
        assert str(tr.result) == want
        assert replay(tr).ok


def test_unknown_is_honest():
    tr = check_point_bracket(Mul(E, E), 2, 3)
    assert tr.verdict == "Unknown"
    assert replay(tr).ok


def test_traces_are_deterministic():
    a = check_point_bracket(Gen("y2"), 2, 3).to_jsonl()
    assert a == check_point_bracket(Gen("y2"), 2, 3).to_jsonl()


def test_replay_rejects_tampering():
    text = check_point_bracket(Gen("z1"), 2, 3).to_jsonl()
    rows = [json.loads(line) for line in text.splitlines()]
    # flip a coefficient in one intermediate expression
    for row in rows[1:-1]:
        if "sc(2," in row["expr"]:
            row["expr"] = row["expr"].replace("sc(2,", "sc(1,", 1)
            break
    else:
        pytest.skip("no scalar in this trace")
    bad = "\n".join(json.dumps(r) for r in rows)
    assert not replay_jsonl(bad).ok
    # a false Vanishes claim
    rows = [json.loads(line) for line in check_point_bracket(E, 2, 3).to_jsonl().splitlines()]
    rows[-1]["verdict"] = "Vanishes"
    assert not replay_jsonl("\n".join(json.dumps(r) for r in rows)).ok
    # a step that does not follow from the rule
    rows = [json.loads(line) for line in check_point_bracket(Gen("x2"), 2, 2).to_jsonl().splitlines()]
    rows.insert(1, {"kind": "step", "rule": "jacobi", "path": [], "expr": "zero(4,5)"})
    assert not replay_jsonl("\n".join(json.dumps(r) for r in rows)).ok


def test_sign_examples():
    z0, y1 = Gen("z0"), Gen("y1")
    e0 = Br(z0, y1)
    e2 = apply_rule(C23, apply_rule(C23, e0, "antisym"), "antisym", (0,))
    assert collect(C23, e2) == collect(C23, e0)
    # p = 2: the Jacobi sum on (e,e,e) is [e,[e,e]], which vanishes by [x,x] = 0
    j = collect(C22, _jacobi_sum(C22, E, E, E))
    assert j == Br(E, Br(E, E))
    assert collect(C22, apply_rule(C22, j, "self_bracket_p2", (1,))) == Zero(2, 3)


def test_sign_oracle_detects_mutated_rules(monkeypatch):
    import confstab.browder.rules as rules

    orig = rules.r_antisym

    def wrong_antisym(calc, t):
        out = orig(calc, t)
        # drop the (n-1) shift from the sign
        dx, dy = calc.deg(t.left), calc.deg(t.right)
        return calc.scal(calc.sign(1 + dx * dy), Br(t.right, t.left)) if calc.p != 2 else out

    monkeypatch.setitem(rules.RULES, "antisym", wrong_antisym)
    rep = verify_sign_identities(2, 3, samples=60)
    assert any(v["identity"] == "antisym_model" for v in rep.violations)

    monkeypatch.setitem(rules.RULES, "antisym", orig)
    orig_j = rules.r_jacobi

    def wrong_jacobi(calc, t):
        out = orig_j(calc, t)
        (s1, s2) = out.terms
        return Sum((s1, Scal((-s2.coeff) % calc.p, s2.arg)))

    monkeypatch.setitem(rules.RULES, "jacobi", wrong_jacobi)
    rep = verify_sign_identities(3, 3, samples=60)
    assert any(v["identity"] == "jacobi_rule" for v in rep.violations)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (4, 5)]))
def test_rules_preserve_bidegree(seed, np_):
    n, p = np_
    calc = Calculus(n, p)
    rng = random.Random(seed)
    x = ExprSampler(calc, rng).expr(4)
    for rule in RULES:
        try:
            y = apply_rule(calc, x, rule)
        except RuleError:
            continue
        assert calc.bidegree(y) == calc.bidegree(x)
        # collect is a normal form
        assert collect(calc, collect(calc, y)) == collect(calc, y)
