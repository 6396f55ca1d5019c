import itertools
from collections import Counter

import pytest
import sympy as sp

from qteich import catalog
from qteich.division import Verdict, compare
from qteich.qalg import Element, QCoeff, mul
from qteich.surface import (
    DiagonalExchange, diagonal_exchange, flippable_edges, is_lambda_simple, simplifying_flip_path,
    transport_curve,
)
from qteich.trace import (
    NeedsTransport, boundary_curves, classical_trace, is_boundary_parallel, quantum_integer,
    quantum_trace, trace_on_path, verify_commuting, verify_skein_double, verify_skein_single,
    verify_transport, weyl_quantize,
)

TORUS = ("alpha", "beta", "alpha-beta", "beta-alpha")


def sympy_trace(curve, tri):
    """Independent classical trace with sympy matrices."""
    acc = sp.eye(2)
    left = sp.Matrix([[1, 1], [0, 1]])
    right = sp.Matrix([[1, 0], [1, 1]])
    for edge, turn in zip(curve.crossed_edges(tri), curve.turns()):
        s = sp.sqrt(sp.Symbol(f"x{edge}", positive=True))
        acc = acc * sp.diag(s, 1 / s) * (left if turn == "L" else right)
    return sp.expand(acc.trace())


def as_sympy(poly, n):
    xs = [sp.sqrt(sp.Symbol(f"x{e}", positive=True)) for e in range(1, n + 1)]
    return sp.expand(sum(c * sp.Mul(*(x ** k for x, k in zip(xs, key)))
                         for key, c in poly.terms.items()))


def edge_support(element, tri):
    """Classical support as ``{edge: per-slot exponent}`` keys with multiplicity."""
    gens = tri.gens
    out = Counter()
    for mono, c in element.at_q_one().items():
        per_edge = Counter()
        for k, x in enumerate(mono):
            if x:
                per_edge[tri.edge(gens.slot(k))] += x
        key = tuple(sorted((e, x // len(tri.slots_of(e))) for e, x in per_edge.items()))
        out[key] += c
    return out


class TestClassical:
    def test_frozen_once_punctured_torus(self):
        cfg = catalog.get("torus-1p")
        x1, x2 = (sp.sqrt(sp.Symbol(f"x{e}", positive=True)) for e in (1, 2))
        want = x1 * x2 + x1 / x2 + 1 / (x1 * x2)
        assert sp.simplify(as_sympy(classical_trace(cfg.curve("a-b"), cfg.tri), 3) - want) == 0

    @pytest.mark.parametrize("name", catalog.names())
    def test_matches_sympy_oracle(self, name):
        cfg = catalog.get(name)
        for curve in cfg.curves.values():
            ours = as_sympy(classical_trace(curve, cfg.tri), cfg.tri.edge_count)
            assert sp.expand(ours - sympy_trace(curve, cfg.tri)) == 0, curve.name

    @pytest.mark.parametrize("name", ["torus-1p", "torus-hole-1", "sphere-4p"])
    def test_quantum_limit_is_classical(self, name):
        cfg = catalog.get(name)
        for curve in cfg.curves.values():
            tr = quantum_trace(curve, cfg.tri)
            assert tr.classical() == classical_trace(curve, cfg.tri), curve.name
            assert tr.classical().positive()

    def test_rotation_invariant(self):
        cfg = catalog.get("torus-hole-1")
        c = cfg.curve("beta-alpha")
        for k in range(len(c)):
            rot = type(c)(c.arcs[k:] + c.arcs[:k], True, c.name)
            assert classical_trace(rot, cfg.tri) == classical_trace(c, cfg.tri)


class TestWeylQuantization:
    def test_quantum_integer(self):
        assert quantum_integer(1) == QCoeff.one()
        assert quantum_integer(3) == QCoeff({-8: 1, 0: 1, 8: 1})
        assert quantum_integer(-2) == QCoeff({-4: -1, 4: -1})
        assert quantum_integer(2).at_one() == 2

    def test_terms_are_weyl_ordered(self):
        cfg = catalog.get("torus-hole-1")
        gens = cfg.tri.gens
        for name in ("alpha", "beta", "alpha-beta"):
            el = quantum_trace(cfg.curve(name), cfg.tri).element
            rebuilt = Element.zero(gens)
            for mono in el.monomials():
                rebuilt = rebuilt + Element.weyl(gens, mono)
            assert rebuilt == el

    def test_non_simple_curve_needs_transport(self):
        cfg = catalog.get("torus-hole-1")
        c = cfg.curve("beta-alpha")
        with pytest.raises(NeedsTransport):
            weyl_quantize(classical_trace(c, cfg.tri), c, cfg.tri)


@pytest.fixture(scope="module")
def traces():
    cfg = catalog.get("torus-hole-1")
    return cfg.tri, {n: quantum_trace(cfg.curve(n), cfg.tri).element for n in TORUS}


class TestTorusDisplays:
    # displayed words with h, i, j, k standing for edges 1 to 4; each entry is one term
    DISPLAYED = {
        "alpha": [{"h": 1, "i": 1, "k": 1}, {"h": -1, "i": 1, "k": 1}, {"h": -1, "i": -1, "k": 1},
                  {"h": -1, "i": -1, "k": -1}],
        "beta": [{"h": 1, "i": 1, "j": 1}, {"h": 1, "i": 1, "j": -1}, {"h": -1, "i": 1, "j": -1},
                 {"h": -1, "i": -1, "j": -1}],
        "alpha-beta": [{"j": 1, "k": 1}, {"j": 1, "k": -1}, {"j": -1, "k": -1}],
        "beta-alpha": [
            {"h": 2, "i": 2, "j": 1, "k": 1}, {"h": 2, "i": 2, "j": -1, "k": 1},
            {"i": 2, "j": -1, "k": 1}, {"i": 2, "j": -1, "k": 1}, {"j": -1, "k": 1},
            {"j": -1, "k": 1}, {"i": 2, "j": 1, "k": 1}, {"h": -2, "i": 2, "j": -1, "k": 1},
            {"h": -2, "j": -1, "k": 1}, {"h": -2, "j": -1, "k": 1},
            {"h": -2, "i": -2, "j": -1, "k": 1}, {"h": -2, "j": -1, "k": -1},
            {"h": -2, "i": -2, "j": -1, "k": -1},
        ],
    }
    EDGE = {"h": 1, "i": 2, "j": 3, "k": 4}

    def test_term_counts(self, traces):
        _, t = traces
        assert {n: t[n].term_count() for n in TORUS} == {
            "alpha": 4, "beta": 4, "alpha-beta": 3, "beta-alpha": 13}
        assert len(t["beta-alpha"].monomials()) == 10

    @pytest.mark.parametrize("name", TORUS)
    def test_support_matches_display(self, traces, name):
        # the catalog uses the inverse coordinates of the displayed ones
        tri, t = traces
        want = Counter(tuple(sorted((self.EDGE[v], -x) for v, x in term.items()))
                       for term in self.DISPLAYED[name])
        assert edge_support(t[name], tri) == want

    def test_single_crossing_skein(self):
        cfg = catalog.get("torus-hole-1")
        r = verify_skein_single(*(cfg.curve(n) for n in TORUS), cfg.tri, dims=(5,), seeds=(0,))
        assert r.comparison.verdict is Verdict.EXACT_EQUAL
        assert r.alternatives == {"q^(1/2), q^(-1/2)": True, "q, q^-1": False}
        assert r.term_counts["product-expanded"] == 16

    def test_skein_orders_resolutions(self):
        cfg = catalog.get("torus-hole-1")
        ta, tb, tab, tba = (quantum_trace(cfg.curve(n), cfg.tri).element for n in TORUS)
        assert mul(tb, ta) == tba.shift(2) + tab.shift(-2)
        assert mul(ta, tb) != tba.shift(2) + tab.shift(-2)

    def test_mirror_orientation_does_not_close(self):
        cfg = catalog.get("torus-hole-1")
        tri = cfg.tri.replace(triangles=tuple((a, c, b) for a, b, c in cfg.tri.triangles)).validate()
        mirror = {n: type(c)(tuple((t, -i % 3, -o % 3) for t, i, o in c.arcs), True, n)
                  for n, c in cfg.curves.items()}
        ta, tb, tab, tba = (quantum_trace(mirror[n], tri).element for n in TORUS)
        assert mul(ta, tb) != tab.shift(2) + tba.shift(-2)
        assert mul(tb, ta) != tba.shift(2) + tab.shift(-2)

    def test_second_torus(self):
        cfg = catalog.get("torus-hole-2")
        sk = cfg.skein
        r = verify_skein_single(*(cfg.curve(sk[k]) for k in ("alpha", "beta", "ab", "ba")),
                                cfg.tri, dims=(5,), seeds=(0,))
        assert r.comparison.verdict is Verdict.EXACT_EQUAL
        assert r.term_counts["beta-alpha"] == 22


class TestSphere:
    @pytest.mark.parametrize("name,intermediate", [
        ("sphere-4p", 98), ("sphere-1h3p", 140), ("sphere-2h2p", 252), ("sphere-3h1p", 520),
        ("sphere-4h", 676),
    ])
    def test_double_crossing_skein(self, name, intermediate):
        cfg = catalog.get(name)
        sk = cfg.skein
        r = verify_skein_double(*(cfg.curve(sk[k]) for k in ("alpha", "beta", "ab", "ba")),
                                [cfg.curve(g) for g in sk["gammas"]], cfg.tri, mode="exact")
        assert r.comparison.verdict is Verdict.EXACT_EQUAL
        assert r.term_counts["intermediate"] == intermediate
        assert not r.alternatives["q^(1/2), q^(-1/2)"]

    def test_gammas_are_peripheral(self):
        cfg = catalog.get("sphere-4p")
        for g in cfg.skein["gammas"]:
            assert is_boundary_parallel(cfg.curve(g), cfg.tri)
        assert len(boundary_curves(cfg.tri)) == 4


class TestTransport:
    def test_beta_alpha_uses_two_flips(self):
        cfg = catalog.get("torus-hole-1")
        tr = quantum_trace(cfg.curve("beta-alpha"), cfg.tri)
        assert tr.method == "transport"
        assert len(tr.path) == 2 and isinstance(tr.element, Element)

    def test_independent_of_simplifying_path(self):
        cfg = catalog.get("torus-hole-1")
        c = cfg.curve("beta-alpha")
        paths = []
        for e, f in itertools.product(flippable_edges(cfg.tri), repeat=2):
            t1, c1 = diagonal_exchange(cfg.tri, e)
            if f not in flippable_edges(t1):
                continue
            t2, c2 = diagonal_exchange(t1, f)
            if is_lambda_simple(transport_curve(transport_curve(c, c1), c2), t2):
                paths.append([e, f])
        assert len(paths) >= 2
        values = [trace_on_path(c, cfg.tri, p) for p in paths]
        for v in values[1:]:
            assert compare(v, values[0], mode="exact").verdict is Verdict.EXACT_EQUAL

    @pytest.mark.parametrize("name,curve", [
        ("torus-1p", "a-b"), ("torus-hole-1", "alpha"), ("torus-hole-1", "beta"),
        ("sphere-4p", "alpha"), ("sphere-4p", "gamma-1"),
    ])
    def test_flip_then_transport_back(self, name, curve):
        cfg = catalog.get(name)
        e = flippable_edges(cfg.tri)[0]
        cmp = verify_transport(cfg.curve(curve), cfg.tri, [e], mode="both", dims=(5,), seeds=(0,))
        assert cmp.verdict is Verdict.EXACT_EQUAL

    def test_simplifying_path_uses_flips(self):
        cfg = catalog.get("torus-hole-1")
        moves, _, _ = simplifying_flip_path(cfg.tri, cfg.curve("beta-alpha"))
        assert all(isinstance(m, DiagonalExchange) for m in moves)


@pytest.mark.parametrize("name", ["torus-1p", "torus-hole-1", "sphere-4p"])
def test_peripheral_traces_are_central(name):
    cfg = catalog.get(name)
    for b in boundary_curves(cfg.tri):
        for c in cfg.curves.values():
            cmp = verify_commuting(b, c, cfg.tri, mode="exact")
            assert cmp.verdict is Verdict.EXACT_EQUAL, c.name
