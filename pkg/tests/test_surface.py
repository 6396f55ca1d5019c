import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteich import catalog
from qteich.coordchange import square_arc
from qteich.surface import (
    CurvePath, DiagonalExchange, PathNotFound, SurfaceSpec, Triangulation, TriangulationError,
    compute_skew_form, curve_from_json, diagonal_exchange, find_pentagons, flippable_edges,
    is_lambda_simple, isomorphism, pentagon_cycle, same_triangulation, simplifying_flip_path,
    topology, transport_curve, validate_curve,
)

NAMES = catalog.names()


def corner_oracle(tri: Triangulation) -> dict[tuple[int, int], int]:
    """sigma by listing every ordered side pair of every triangle."""
    sigma: dict[tuple[int, int], int] = {}
    for t in tri.triangles:
        for a, b in itertools.permutations(range(3), 2):
            step = (b - a) % 3
            sign = 1 if step == 1 else -1
            key = (t[a], t[b])
            sigma[key] = sigma.get(key, 0) + sign
    return sigma


class TestSkewForm:
    def test_once_punctured_torus(self):
        tri = catalog.get("torus-1p").tri
        sf = compute_skew_form(tri)
        for i, j in itertools.permutations(range(1, 4), 2):
            assert abs(sf(i, j)) == 2

    @pytest.mark.parametrize("name", NAMES)
    def test_matches_corner_oracle(self, name):
        tri = catalog.get(name).tri
        sf = compute_skew_form(tri)
        oracle = corner_oracle(tri)
        for i, j in itertools.product(range(1, tri.edge_count + 1), repeat=2):
            if i != j:
                assert sf(i, j) == oracle.get((i, j), 0)

    def test_square_with_distinct_edges(self):
        # two triangles (i, j, k) and (i, l, m) glued along i
        tri = Triangulation("square", ((1, 2, 3), (1, 4, 5)), 5, frozenset({2, 3, 4, 5}))
        sf = compute_skew_form(tri.validate())
        assert sf(1, 2) == 1 and sf(2, 1) == -1
        assert sf(3, 1) == 1
        assert sf(1, 4) == 1 and sf(5, 1) == 1
        assert sf(2, 4) == 0


class TestTopology:
    @pytest.mark.parametrize("name,expect", [
        ("torus-1p", SurfaceSpec(1, 1, 0, 0)),
        ("torus-hole-1", SurfaceSpec(1, 0, 1, 1)),
        ("torus-hole-2", SurfaceSpec(1, 0, 2, 1)),
        ("sphere-4p", SurfaceSpec(0, 4, 0, 0)),
        ("sphere-4h", SurfaceSpec(0, 0, 4, 4)),
    ])
    def test_catalog(self, name, expect):
        assert topology(catalog.get(name).tri) == expect

    def test_edge_count_formula(self):
        for name in NAMES:
            tri = catalog.get(name).tri
            assert topology(tri).edge_count() == tri.edge_count
            assert topology(tri).triangle_count() == len(tri.triangles)

    def test_bad_gluing_rejected(self):
        with pytest.raises(TriangulationError):
            Triangulation("bad", ((1, 2, 3), (1, 2, 4)), 4).validate()
        with pytest.raises(TriangulationError):
            Triangulation.from_json({"triangles": [{"sides": [1, 2]}]})


class TestFlip:
    @pytest.mark.parametrize("name", NAMES)
    def test_flip_twice_returns(self, name):
        tri = catalog.get(name).tri
        for e in flippable_edges(tri):
            once, _ = diagonal_exchange(tri, e)
            twice, _ = diagonal_exchange(once, e)
            assert same_triangulation(twice, tri)
            assert compute_skew_form(once).n == tri.edge_count

    def test_self_folded_edge_is_degenerate(self):
        tri = Triangulation("folded", ((1, 1, 2), (3, 3, 2)), 3).validate()
        assert tri.is_self_folded(1)
        assert 1 not in flippable_edges(tri)
        new, ctx = diagonal_exchange(tri, 1)
        assert ctx.degenerate and new == tri

    def test_boundary_edge_not_flippable(self):
        tri = catalog.get("torus-hole-1").tri
        (b,) = tri.boundary_edges
        with pytest.raises(TriangulationError):
            diagonal_exchange(tri, b)

    def test_distant_flips_commute(self):
        tri = catalog.get("sphere-4p").tri
        pairs = [(e, f) for e, f in itertools.combinations(flippable_edges(tri), 2)
                 if not any(e in t and f in t for t in tri.triangles)]
        assert pairs
        for e, f in pairs:
            a, _ = diagonal_exchange(diagonal_exchange(tri, e)[0], f)
            b, _ = diagonal_exchange(diagonal_exchange(tri, f)[0], e)
            assert a.triangles == b.triangles

    def test_passage_targets(self):
        tri = catalog.get("torus-hole-1").tri
        _, ctx = diagonal_exchange(tri, 1)
        e = ctx.edges
        # a passage entering on j and leaving on k also crosses the new diagonal
        arc = transport_curve(square_arc(ctx, "a"), ctx)
        assert arc.crossed_edges(ctx.after) == [e["j"], e["i"], e["k"]]
        # one crossing j, the diagonal and m no longer crosses the diagonal
        arc = transport_curve(square_arc(ctx, "d"), ctx)
        assert arc.crossed_edges(ctx.after) == [e["j"], e["m"]]


class TestCurves:
    def test_torus_simplicity(self):
        cfg = catalog.get("torus-hole-1")
        for name in ("alpha", "beta", "alpha-beta"):
            assert is_lambda_simple(cfg.curve(name), cfg.tri)
        assert not is_lambda_simple(cfg.curve("beta-alpha"), cfg.tri)

    def test_beta_alpha_needs_two_flips(self):
        cfg = catalog.get("torus-hole-1")
        path, new, curve = simplifying_flip_path(cfg.tri, cfg.curve("beta-alpha"))
        assert len(path) == 2 and all(isinstance(m, DiagonalExchange) for m in path)
        assert is_lambda_simple(curve, new)

    def test_depth_bound(self):
        cfg = catalog.get("torus-hole-1")
        with pytest.raises(PathNotFound):
            simplifying_flip_path(cfg.tri, cfg.curve("beta-alpha"), depth_bound=1)

    @pytest.mark.parametrize("name", NAMES)
    def test_json_round_trip(self, name):
        cfg = catalog.get(name)
        tri = Triangulation.from_json(json.loads(cfg.tri.dumps()))
        assert tri == cfg.tri
        for c in cfg.curves.values():
            back = curve_from_json(tri, json.loads(json.dumps(c.to_json(tri))))
            assert back.arcs == c.arcs and back.closed == c.closed

    def test_invalid_curve_rejected(self):
        cfg = catalog.get("torus-hole-1")
        with pytest.raises(TriangulationError):
            validate_curve(CurvePath(((0, 0, 1), (0, 1, 2))), cfg.tri)

    @given(st.sampled_from(NAMES), st.data())
    @settings(max_examples=40, deadline=None)
    def test_flip_transport_round_trip(self, name, data):
        cfg = catalog.get(name)
        curve = cfg.curves[data.draw(st.sampled_from(sorted(cfg.curves)))]
        e = data.draw(st.sampled_from(flippable_edges(cfg.tri)))
        new, ctx = diagonal_exchange(cfg.tri, e)
        moved = validate_curve(transport_curve(curve, ctx), new)
        back_tri, back_ctx = diagonal_exchange(new, e)
        back = transport_curve(moved, back_ctx)
        assert same_triangulation(back_tri, cfg.tri)
        # crossing counts with every edge other than the flipped one are preserved
        count = lambda c, t: sorted(x for x in c.crossed_edges(t) if x != e)
        assert count(back, back_tri) == count(curve, cfg.tri)


class TestPentagon:
    def test_five_flips_return_with_swap(self):
        cfg = catalog.get("torus-hole-1")
        x, y = cfg.pentagon
        assert (x, y) in find_pentagons(cfg.tri)
        stages = pentagon_cycle(cfg.tri, x, y)
        assert len(stages) == 6
        emap = {e: e for e in range(1, cfg.tri.edge_count + 1)}
        emap[x], emap[y] = y, x
        assert isomorphism(stages[-1], cfg.tri, emap) is not None
