import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteich import catalog
from qteich.division import InvPoly, WordSum
from qteich.qalg import Element, commutation_exponent
from qteich.repcheck import (
    MAX_DIM, build_rep, check_relations, evaluate, numeric_deviation, relation_phases,
    symplectic_reduction,
)
from strategies import SMALL, elements


@pytest.fixture(scope="module")
def torus():
    return catalog.get("torus-1p").tri.gens


def dense(rep, gens, slot, e=1):
    return rep.element_matrix(Element.generator(gens, slot, e))


def test_symplectic_reduction_is_unimodular_block_form():
    gram = [[0, 2, -1, 0], [-2, 0, 3, 1], [1, -3, 0, 4], [0, -1, -4, 0]]
    basis, blocks = symplectic_reduction(gram)
    b = np.array(basis)
    assert round(abs(np.linalg.det(b))) == 1
    reduced = b @ np.array(gram) @ b.T
    for k, d in enumerate(blocks):
        assert reduced[2 * k, 2 * k + 1] == d and reduced[2 * k + 1, 2 * k] == -d
    assert np.count_nonzero(reduced) == 2 * len(blocks)


@pytest.mark.parametrize("N", [5, 7, 8])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generators_satisfy_relations_densely(torus, N, seed):
    rep = build_rep(torus, N, seed)
    u = rep.u
    slots = [torus.slot(k) for k in range(torus.size)]
    mats = {s: dense(rep, torus, s) for s in slots}
    pairs = list(itertools.combinations(slots, 2))
    assert len(pairs) == 15
    for a, b in pairs:
        c = commutation_exponent(torus, torus.unit_vector(a), torus.unit_vector(b))
        lhs = mats[a] @ mats[b]
        rhs = u ** c * (mats[b] @ mats[a])
        assert np.abs(lhs - rhs).max() <= 1e-12


@pytest.mark.parametrize("name", catalog.names())
def test_sparse_relation_check(name):
    gens = catalog.get(name).tri.gens
    for N in (5, 7, 8):
        assert check_relations(build_rep(gens, N, 0)) <= 1e-12


def test_dimension_cap():
    gens = catalog.get("sphere-4h").tri.gens
    rep = build_rep(gens, 8, 0)
    assert rep.dim <= MAX_DIM
    assert rep.N >= 2


def test_identity_and_inverse(torus):
    rep = build_rep(torus, 5, 0)
    eye = np.eye(rep.dim)
    assert np.allclose(evaluate(Element.one(torus), rep), eye)
    z = Element.generator(torus, torus.slot(0))
    prod = WordSum.product(torus, [z, z.inverse_monomial()])
    assert np.allclose(evaluate(prod, rep), eye)
    p = Element.one(torus) + z * z
    assert np.allclose(evaluate(WordSum.product(torus, [p, InvPoly(p)]), rep), eye)


def test_seed_changes_twist(torus):
    assert build_rep(torus, 7, 0).twist != build_rep(torus, 7, 1).twist


def test_relation_phases_hold_in_both_orders(torus):
    rep = build_rep(torus, 7, 0)
    v, w = torus.unit_vector(torus.slot(0)), torus.unit_vector(torus.slot(1))
    assert relation_phases(rep, v, w)[0]
    assert relation_phases(rep, w, v)[0]


@given(elements(max_terms=4), elements(max_terms=4), st.integers(0, 50))
@settings(max_examples=25, deadline=None)
def test_evaluation_is_multiplicative(a, b, seed):
    rep = build_rep(SMALL, 5, seed)
    lhs = evaluate(a * b, rep)
    rhs = evaluate(a, rep) @ evaluate(b, rep)
    scale = max(1.0, float(np.abs(lhs).max()))
    assert np.abs(lhs - rhs).max() / scale <= 1e-9


def test_deviation_separates_unequal_elements():
    rng = random.Random(3)
    z = [Element.generator(SMALL, SMALL.slot(k)) for k in range(SMALL.size)]
    a = z[0] * z[1] + z[2]
    assert numeric_deviation(a, a, dims=(5, 7), seeds=(0, 1))[0] <= 1e-12
    b = z[1] * z[0] + z[2]
    assert numeric_deviation(a, b, dims=(5, 7), seeds=(rng.randrange(100),))[0] > 1e-3
