"""Hypothesis strategies and an independent normal-ordering oracle."""

from __future__ import annotations

from collections import defaultdict

from hypothesis import strategies as st

from qteich.qalg import Element, GeneratorSet

SMALL = GeneratorSet(2)


def monomials(gens: GeneratorSet = SMALL, bound: int = 2):
    return st.lists(st.integers(-bound, bound), min_size=gens.size, max_size=gens.size).map(tuple)


@st.composite
def elements(draw, gens: GeneratorSet = SMALL, max_terms: int = 5) -> Element:
    n = draw(st.integers(0, max_terms))
    out = Element.zero(gens)
    for _ in range(n):
        vec = draw(monomials(gens))
        out = out + Element.monomial(gens, vec, draw(st.integers(-6, 6)),
                                     draw(st.sampled_from([1, -1, 2, -3])))
    return out


def letters(gens: GeneratorSet = SMALL, max_len: int = 6):
    return st.lists(st.tuples(st.integers(0, gens.size - 1), st.sampled_from([-2, -1, 1, 2])),
                    min_size=1, max_size=max_len)


def bubble_normal_form(gens: GeneratorSet, word: list[tuple[int, int]]) -> tuple[tuple[int, ...], int]:
    """Normal-order a word of ``(slot index, exponent)`` letters by adjacent swaps.

    Only the pairwise rule ``x y = q^{c(x, y)/4} y x`` is used, so this is
    independent of the closed-form reordering in the algebra.
    """
    word = list(word)
    quarter = 0
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            (a, ea), (b, eb) = word[k], word[k + 1]
            if a > b:
                quarter += ea * eb * gens.c(a, b)
                word[k], word[k + 1] = word[k + 1], word[k]
                changed = True
    vec = [0] * gens.size
    for a, e in word:
        vec[a] += e
    return tuple(vec), quarter


def oracle_product(a: Element, b: Element) -> Element:
    """Product computed term by term with :func:`bubble_normal_form`."""
    gens = a.gens
    out: dict = defaultdict(int)
    for (m1, k1), c1 in a.terms.items():
        for (m2, k2), c2 in b.terms.items():
            word = [(i, e) for i, e in enumerate(m1) if e] + [(i, e) for i, e in enumerate(m2) if e]
            vec, r = bubble_normal_form(gens, word)
            out[(vec, k1 + k2 + r)] += c1 * c2
    return Element(gens, out)
