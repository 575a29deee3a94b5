import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confstab.algebra import (
    Bidegree,
    Case,
    DomainError,
    GeneratorSet,
    Monomial,
    QValue,
    apply_Q,
    apply_xi,
    bidegree_of,
    multiply,
)

F2, F3, F5 = GeneratorSet(2), GeneratorSet(3), GeneratorSet(5)


def mono(gs, **exps):
    return Monomial.from_exponents({gs.generator(k): v for k, v in exps.items()})


def test_generator_bidegrees():
    assert F2.generator("x3").bidegree == Bidegree(7, 8)
    assert F3.generator("y1").bidegree == Bidegree(4, 6)
    assert F3.generator("z0").bidegree == Bidegree(1, 2)
    assert F5.generator("z1").bidegree == Bidegree(9, 10)
    assert F3.generator("z0").exterior and not F3.generator("y1").exterior
    assert GeneratorSet(2, 4).generator("w2").bidegree == Bidegree(3, 4)
    assert GeneratorSet(2, 3).case is Case.HIGHER_F2_WORDS


def test_generator_errors():
    with pytest.raises(DomainError):
        GeneratorSet(4)
    with pytest.raises(DomainError):
        GeneratorSet(3, 3)
    with pytest.raises(DomainError):
        F2.generator("y1")
    with pytest.raises(DomainError):
        F3.generator("y0")


def test_bidegree_examples():
    assert bidegree_of(Monomial.of(F3.e, 3)) == Bidegree(0, 3)
    assert bidegree_of(mono(F3, y1=1)) == Bidegree(4, 6)
    assert bidegree_of(mono(F5, z0=1, e=2)) == Bidegree(1, 4)


def test_multiply_examples():
    z0, z1 = mono(F3, z0=1), mono(F3, z1=1)
    assert multiply(z0, z0, 3).is_zero()
    ey = multiply(Monomial.of(F3.e), mono(F3, y1=1), 3)
    assert ey.terms == {mono(F3, e=1, y1=1): 1}
    assert multiply(z1, z0, 3).terms == {mono(F3, z0=1, z1=1): 2}
    assert multiply(z0, z1, 3).terms == {mono(F3, z0=1, z1=1): 1}


def test_multiply_mixed_sets():
    with pytest.raises(DomainError):
        multiply(mono(F3, z0=1), mono(F5, z0=1), 3)


def test_apply_xi():
    assert apply_xi(Bidegree(0, 1), 2, 2) == Bidegree(1, 2)
    assert apply_xi(Bidegree(1, 2), 3, 2) == Bidegree(5, 6)
    with pytest.raises(DomainError):
        apply_xi(Bidegree(0, 1), 3, 2)


def test_apply_Q():
    assert apply_Q(1, Bidegree(0, 1), 2, 3) == Bidegree(1, 2)
    assert apply_Q(0, Bidegree(0, 1), 2, 2) is QValue.SQUARE
    assert apply_Q(0, Bidegree(0, 1), 2, 5) is QValue.SQUARE
    assert apply_Q(0, Bidegree(1, 2), 2, 3) is QValue.ZERO
    with pytest.raises(DomainError):
        apply_Q(3, Bidegree(1, 2), 2, 3)
    with pytest.raises(DomainError):
        apply_Q(-1, Bidegree(1, 2), 2, 3)


# -- properties --

def monomials(gs):
    def build(pairs):
        exps = {}
        for g, k in pairs:
            exps[g] = min(exps.get(g, 0) + k, 1 if g.exterior else 6)
        return Monomial.from_exponents({g: k for g, k in exps.items() if k})

    gens = gs.generators(20)
    return st.lists(st.tuples(st.sampled_from(gens), st.integers(1, 3)), max_size=4).map(build)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([F2, F3, F5]).flatmap(lambda gs: st.tuples(st.just(gs), monomials(gs), monomials(gs))))
def test_multiply_properties(args):
    gs, a, b = args
    p = gs.p
    ab, ba = multiply(a, b, p), multiply(b, a, p)
    if ab:
        (m, c), = ab.terms.items()
        assert bidegree_of(m) == bidegree_of(a) + bidegree_of(b)
        sign = -1 if bidegree_of(a).deg * bidegree_of(b).deg % 2 else 1
        assert ba == ab.scale(sign)
        assert ab.scale(sign).scale(sign) == ab
    else:
        assert not ba
    if p == 2:
        assert all(c == 1 for c in ab.terms.values())
    if any(g.exterior for g in a.generators):
        assert not multiply(a, a, p)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([F2, F3]).flatmap(lambda gs: st.tuples(st.just(gs), monomials(gs), monomials(gs), monomials(gs))))
def test_multiplication_injective(args):
    gs, a, m1, m2 = args
    r1, r2 = multiply(a, m1, gs.p), multiply(a, m2, gs.p)
    if r1 and r2 and set(r1.terms) == set(r2.terms):
        assert m1 == m2
