import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteich import catalog
from qteich.division import (
    InvPoly, Verdict, WordSum, compare, conjugate_poly_by_monomial, normalize, simplify,
    unit_normalize, wordsum_to_fraction,
)
from qteich.qalg import Element, QCoeff, commutation_exponent
from qteich.surface import diagonal_exchange
from strategies import SMALL, elements


@pytest.fixture(scope="module")
def square():
    """Post-flip algebra of the first torus-with-hole flip and its role generators."""
    tri = catalog.get("torus-hole-1").tri
    post, ctx = diagonal_exchange(tri, 1)
    g = post.gens

    def z(role, e=1):
        return Element.generator(g, ctx.post[role], e)

    diag = z("i1") * z("i2")
    return g, z, diag, diag.inverse_monomial()


def test_inverse_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        InvPoly(Element.zero(SMALL))


def test_poly_times_inverse_normalizes_to_one():
    p = Element.one(SMALL) + Element.generator(SMALL, (0, 1), 2)
    ws = WordSum.product(SMALL, [p, InvPoly(p)])
    assert compare(ws, WordSum.one(SMALL), mode="exact").verdict is Verdict.EXACT_EQUAL
    assert normalize(WordSum.product(SMALL, [InvPoly(p), p])).is_polynomial()


def test_conjugation_shifts_by_commutation():
    m = SMALL.unit_vector((0, 0))
    z1 = Element.generator(SMALL, (0, 1))
    p = Element.one(SMALL) + z1
    conj = conjugate_poly_by_monomial(p, m)
    c = commutation_exponent(SMALL, m, SMALL.unit_vector((0, 1)))
    assert conj == Element.one(SMALL) + z1.shift(c)
    mono = Element.monomial(SMALL, m)
    assert mono * p == conj * mono


def test_unit_normalize_moves_a_monomial_out():
    z = Element.generator(SMALL, (1, 2))
    core = z * (Element.one(SMALL) + Element.generator(SMALL, (1, 0), 2))
    unit, rest = unit_normalize(core)
    assert unit.is_monomial()
    assert unit * rest == core
    assert Element.one(SMALL).monomials()[0] in rest.monomials()


def test_simplify_returns_polynomial_when_possible():
    p = Element.one(SMALL) + Element.generator(SMALL, (0, 2))
    ws = WordSum.product(SMALL, [p, Element.generator(SMALL, (1, 1)), InvPoly(p), p])
    out = simplify(ws)
    assert isinstance(out, Element)
    assert out == p * Element.generator(SMALL, (1, 1))


def test_stay_odd_identity(square):
    # Z_j^{-1} (Z_i + Z_i^{-1})^{-1} Z_l^{-1} = Z_j^{-1} Z_i^{-1} Z_l^{-1} (1 + q^{-1} Z_i^{-2})^{-1}
    g, z, zi, zi_inv = square
    lhs = WordSum.product(g, [z("j", -1), InvPoly(zi + zi_inv), z("l", -1)])
    rhs = WordSum.product(g, [z("j", -1) * zi_inv * z("l", -1),
                              InvPoly(Element.one(g) + (zi_inv * zi_inv).shift(-4))])
    assert compare(lhs, rhs, mode="exact").verdict is Verdict.EXACT_EQUAL
    wrong = WordSum.product(g, [z("j", -1) * zi_inv * z("l", -1),
                                InvPoly(Element.one(g) + (zi_inv * zi_inv).shift(4))])
    assert compare(lhs, wrong, mode="exact").verdict is Verdict.NOT_EQUAL


def test_square_of_odd_block(square):
    # (Z_j^{-1}(Z_i+Z_i^{-1})^{-1}Z_l^{-1})^2 = Z_j^{-2}(1+qZ_i^2)^{-1}Z_i^2 Z_l^{-2}(1+qZ_i^2)^{-1}
    g, z, zi, zi_inv = square
    block = WordSum.product(g, [z("j", -1), InvPoly(zi + zi_inv), z("l", -1)])
    den = InvPoly(Element.one(g) + (zi * zi).shift(4))
    rhs = WordSum.product(g, [z("j", -2), den, zi * zi, z("l", -2), den])
    assert compare(block * block, rhs, mode="exact").verdict is Verdict.EXACT_EQUAL


def test_noncommuting_order_detected(square):
    g, z, zi, _ = square
    a = Element.one(g) + (zi * zi).shift(4)
    # j and l both meet the diagonal counterclockwise-first, so this does not commute with a
    b = Element.one(g) + z("j", 2) * z("l", 2)
    left = WordSum.product(g, [InvPoly(a), b])
    right = WordSum.product(g, [b, InvPoly(a)])
    assert compare(left, right, mode="exact").verdict is Verdict.NOT_EQUAL
    assert compare(left, right, mode="numeric").verdict is Verdict.NOT_EQUAL


def test_fraction_field_identity(square):
    g, z, zi, _ = square
    u = zi * zi
    v = z("j", 2) * z("k", 2)
    one = Element.one(g)
    a = one + u.shift(4) + v
    b = one + v * u + u.shift(-4)
    # a^{-1} + b^{-1} = a^{-1} (a + b) b^{-1}
    lhs = WordSum.product(g, [InvPoly(a)]) + WordSum.product(g, [InvPoly(b)])
    rhs = WordSum.product(g, [InvPoly(a), a + b, InvPoly(b)])
    cmp = compare(lhs, rhs, mode="both", dims=(5,), seeds=(0,))
    assert cmp.verdict is Verdict.EXACT_EQUAL
    assert cmp.numeric_deviation < 1e-9
    assert wordsum_to_fraction(lhs - rhs).is_zero()


@given(elements(max_terms=3), st.integers(0, 5))
@settings(max_examples=30, deadline=None)
def test_cancelling_an_inverse(a, k):
    p = Element.one(SMALL) + Element.generator(SMALL, (0, 1), 2).shift(k)
    ws = WordSum.product(SMALL, [a, InvPoly(p), p])
    assert compare(ws, a, mode="exact").verdict is Verdict.EXACT_EQUAL


def test_modes_reported():
    one = WordSum.one(SMALL)
    assert compare(one, one, mode="numeric", dims=(5,), seeds=(0,)).verdict is Verdict.NUMERIC_EQUAL
    with pytest.raises(ValueError):
        compare(one, one, mode="sometimes")


def test_scalar_words_render():
    ws = WordSum.product(SMALL, [Element.generator(SMALL, (0, 0))], QCoeff.q(2))
    assert ws.render() == "q^(1/2) (Z[0,0]^{1})"
