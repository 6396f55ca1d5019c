"""Named triangulations and curve fixtures.

Every configuration is reconstructed from checkable properties: topology,
which curves are simple, and the supports of the displayed traces.  Tests
assert those properties, so the data here is verified, not trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .surface import (
    CurvePath, SurfaceSpec, Triangulation, TriangulationError, curve_from_edges,
    diagonal_exchange, isomorphism, is_lambda_simple, open_hole, relabel_curve,
    transport_curve, validate_curve, vertex_classes,
)


class UnknownName(KeyError):
    """Unknown surface or curve name."""


@dataclass(frozen=True)
class Configuration:
    tri: Triangulation
    curves: dict[str, CurvePath]
    description: str
    # curve names for skein checks: alpha, beta, alpha-beta, beta-alpha, gammas
    skein: dict[str, object] = field(default_factory=dict)
    pentagon: tuple[int, int] | None = None
    # open arcs through the pentagon used by the pentagon check
    pentagon_arcs: dict[str, CurvePath] = field(default_factory=dict)

    def curve(self, name: str) -> CurvePath:
        try:
            return self.curves[name]
        except KeyError:
            raise UnknownName(f"unknown curve {name!r} on {self.tri.name}") from None


# ---------------------------------------------------------------------------
# Curve builders


def peripheral_curve(tri: Triangulation, vertices: set[int], name: str = "") -> CurvePath:
    """Boundary of a small neighbourhood of the given vertices (and their boundary edges).

    For one interior puncture this is the loop around it; for the vertices of
    a hole it is the boundary-parallel curve.
    """
    corners = vertex_classes(tri)
    ntri = len(tri.triangles)
    # arcs as pairs of endpoints (t, side, 's'|'e'): near the start or end corner
    arcs: list[list[tuple[int, int, str]]] = []
    for t in range(ntri):
        local = {c: [(t, (c - 1) % 3, "e"), (t, c, "s")]
                 for c in range(3) if corners[3 * t + c] in vertices}
        groups = [v for v in local.values()]
        for p in range(3):
            if tri.triangles[t][p] not in tri.boundary_edges:
                continue
            a, b = (t, p, "s"), (t, p, "e")
            ga = next((g for g in groups if a in g), None)
            gb = next((g for g in groups if b in g), None)
            if ga is None or gb is None:
                continue
            groups.remove(ga)
            if gb is not ga:
                groups.remove(gb)
            merged = [x for x in ga + gb if x not in (a, b)]
            if merged:
                groups.append(merged)
        arcs.extend(groups)
    owner = {}
    for k, g in enumerate(arcs):
        if len(g) != 2:
            raise TriangulationError("peripheral arcs are not simple")
        for x in g:
            owner[x] = k

    def across(x: tuple[int, int, str]) -> tuple[int, int, str]:
        other = tri.partner((x[0], x[1]))
        if other is None:
            raise TriangulationError("peripheral curve reaches the boundary")
        return (other[0], other[1], "e" if x[2] == "s" else "s")

    start = arcs[0][0]
    seq: list[tuple[int, int, int]] = []
    entry = start
    seen = set()
    while True:
        k = owner[entry]
        if k in seen:
            break
        seen.add(k)
        g = arcs[k]
        exit_ = g[1] if g[0] == entry else g[0]
        seq.append((entry[0], entry[1], exit_[1]))
        entry = across(exit_)
    if len(seen) != len(arcs):
        raise TriangulationError("peripheral curve has several components")
    return validate_curve(CurvePath(tuple(seq), True, name), tri)


def simple_curves_through(tri: Triangulation, edges: set[int]) -> list[CurvePath]:
    """All closed curves crossing exactly ``edges`` once each (up to rotation, reversal)."""
    first = min(edges)
    found: dict[tuple, CurvePath] = {}
    for start in tri.slots_of(first):
        stack = [(start, [], {first})]
        while stack:
            (t, pin), arcs, used = stack.pop()
            for pout in range(3):
                if pout == pin:
                    continue
                e = tri.triangles[t][pout]
                nxt = tri.partner((t, pout))
                if nxt is None:
                    continue
                new_arcs = arcs + [(t, pin, pout)]
                if nxt == start and used == edges:
                    curve = CurvePath(tuple(new_arcs))
                    found.setdefault(_curve_key(curve), curve)
                    continue
                if e in used or e not in edges:
                    continue
                stack.append((nxt, new_arcs, used | {e}))
    return [found[k] for k in sorted(found)]


def _curve_key(curve: CurvePath) -> tuple:
    n = len(curve.arcs)
    options = []
    for c in (curve, curve.reversed()):
        for k in range(n):
            options.append(c.rotated(k).arcs)
    return min(options)


def canonical_curve(curve: CurvePath) -> CurvePath:
    return CurvePath(_curve_key(curve), curve.closed, curve.name)


def _transport_through(tri: Triangulation, curve: CurvePath, flips: list[int],
                       back: Triangulation) -> CurvePath:
    """Flip along ``flips`` and map the curve onto ``back`` (isomorphic end state)."""
    cur = tri
    for e in flips:
        cur, ctx = diagonal_exchange(cur, e)
        curve = transport_curve(curve, ctx)
    smap = isomorphism(cur, back)
    if smap is None:
        raise TriangulationError("flip sequence does not return to the target")
    return validate_curve(relabel_curve(curve, smap), back)


# ---------------------------------------------------------------------------
# Once-punctured torus


def torus_1p() -> Configuration:
    tri = Triangulation("torus-1p", ((1, 2, 3), (1, 2, 3)), 3,
                        edge_names=("a", "b", "c"),
                        surface=SurfaceSpec(1, 1)).validate()
    curves = {
        "a-b": curve_from_edges(tri, [(0, "a", "b"), (1, "b", "a")], name="a-b"),
        "b-c": curve_from_edges(tri, [(0, "b", "c"), (1, "c", "b")], name="b-c"),
        "a-c": curve_from_edges(tri, [(0, "c", "a"), (1, "a", "c")], name="a-c"),
    }
    curves["puncture"] = peripheral_curve(tri, {0}, "puncture")
    return Configuration(tri, curves, "once-punctured torus, two triangles")


# ---------------------------------------------------------------------------
# Torus with one hole carrying p boundary punctures


def torus_hole_1() -> Configuration:
    # edges: h=1 i=2 j=3 k=4, boundary b=5
    # orientation chosen so the alpha-beta resolution is the three-term trace
    tri = Triangulation("torus-hole-1", ((4, 3, 1), (2, 5, 1), (4, 3, 2)), 5,
                        boundary_edges=frozenset({5}), edge_names=("h", "i", "j", "k", "b"),
                        surface=SurfaceSpec(1, 0, 1, 1)).validate()
    c = {
        "alpha": CurvePath(((0, 0, 2), (1, 2, 0), (2, 2, 0)), True, "alpha"),
        "beta": CurvePath(((0, 1, 2), (1, 2, 0), (2, 2, 1)), True, "beta"),
        "alpha-beta": CurvePath(((0, 0, 1), (2, 1, 0)), True, "alpha-beta"),
        "beta-alpha": CurvePath(((0, 0, 2), (1, 2, 0), (2, 2, 1), (0, 1, 2), (1, 2, 0),
                                 (2, 2, 0)), True, "beta-alpha"),
    }
    for curve in c.values():
        validate_curve(curve, tri)
    c["boundary"] = peripheral_curve(tri, {0}, "boundary")
    return Configuration(tri, c, "torus with one hole, one boundary puncture",
                         skein={"alpha": "alpha", "beta": "beta", "ab": "alpha-beta",
                                "ba": "beta-alpha"},
                         pentagon=(1, 2),
                         pentagon_arcs={
                             # corner arc between the two sides of the triangle without i
                             "alpha": CurvePath(((0, 0, 1),), False, "alpha"),
                             # crosses i once, side to side
                             "beta": CurvePath(((2, 0, 2), (1, 0, 1)), False, "beta"),
                         })


def torus_hole_2() -> Configuration:
    # edges: h=1 i=2 j=3 k=4, boundary b1=5 b2=6, interior d=7
    tri = Triangulation("torus-hole-2", ((4, 3, 1), (1, 7, 5), (4, 3, 2), (2, 6, 7)), 7,
                        boundary_edges=frozenset({5, 6}),
                        edge_names=("h", "i", "j", "k", "b1", "b2", "d"),
                        surface=SurfaceSpec(1, 0, 2, 1)).validate()
    c = {
        "alpha": CurvePath(((0, 0, 2), (1, 0, 1), (3, 2, 0), (2, 2, 0)), True, "alpha"),
        "beta": CurvePath(((0, 1, 2), (1, 0, 1), (3, 2, 0), (2, 2, 1)), True, "beta"),
        "alpha-beta": CurvePath(((0, 0, 1), (2, 1, 0)), True, "alpha-beta"),
        "beta-alpha": CurvePath(((0, 0, 2), (1, 0, 1), (3, 2, 0), (2, 2, 1), (0, 1, 2), (1, 0, 1),
                                 (3, 2, 0), (2, 2, 0)), True, "beta-alpha"),
    }
    for curve in c.values():
        validate_curve(curve, tri)
    verts = {v for e in tri.boundary_edges for v in _edge_vertices(tri, e)}
    c["boundary"] = peripheral_curve(tri, verts, "boundary")
    return Configuration(tri, c, "torus with one hole, two boundary punctures",
                         skein={"alpha": "alpha", "beta": "beta", "ab": "alpha-beta",
                                "ba": "beta-alpha"})


def _edge_vertices(tri: Triangulation, edge: int) -> tuple[int, int]:
    corners = vertex_classes(tri)
    t, p = tri.slots_of(edge)[0]
    return corners[3 * t + p], corners[3 * t + (p + 1) % 3]


# ---------------------------------------------------------------------------
# Four-punctured sphere and its hole variants

SPHERE_EDGES = ("12", "13", "14", "23", "24", "34")


def _sphere_base() -> Triangulation:
    # tetrahedron on vertices 1..4; faces listed counterclockwise seen from outside
    e = {name: k + 1 for k, name in enumerate(SPHERE_EDGES)}
    faces = (
        (e["23"], e["34"], e["24"]),   # vertex 2,3,4
        (e["14"], e["34"], e["13"]),   # vertex 1,4,3
        (e["12"], e["24"], e["14"]),   # vertex 1,2,4
        (e["13"], e["23"], e["12"]),   # vertex 1,3,2
    )
    return Triangulation("sphere-4p", faces, 6, edge_names=SPHERE_EDGES,
                         surface=SurfaceSpec(0, 4)).validate()


def _pick(curves: list[CurvePath], exclude: list[CurvePath] = ()) -> CurvePath:
    keys = {_curve_key(c) for c in exclude}
    rest = [c for c in curves if _curve_key(c) not in keys]
    if len(rest) != 1:
        raise TriangulationError(f"expected one curve, found {len(rest)}")
    return rest[0]


def _sphere_curves(tri: Triangulation) -> dict[str, CurvePath]:
    idx = {name: tri.edge_index(name) for name in SPHERE_EDGES}
    alpha = _pick(simple_curves_through(tri, {idx[x] for x in ("13", "14", "23", "24")}))
    beta = _pick(simple_curves_through(tri, {idx[x] for x in ("12", "13", "24", "34")}))
    sides = {idx[x] for x in ("12", "23", "34", "14")}
    plus = _pick(simple_curves_through(tri, sides))
    # the other resolution is simple once both diagonals are flipped
    flipped, _ = diagonal_exchange(tri, idx["13"])
    flipped, _ = diagonal_exchange(flipped, idx["24"])
    candidates = []
    for c in simple_curves_through(flipped, sides):
        try:
            back = _transport_through(flipped, c, [idx["13"], idx["24"]], tri)
        except TriangulationError:
            continue
        if _curve_key(back) != _curve_key(plus):
            candidates.append(back)
    minus = _pick(candidates)
    punct = {p: _vertex_of_puncture(tri, p) for p in "1234"}
    out = {"alpha": alpha.renamed("alpha"), "beta": beta.renamed("beta"),
           "slope-plus": plus.renamed("slope-plus"), "slope-minus": minus.renamed("slope-minus")}
    for p, v in punct.items():
        out[f"gamma-{p}"] = peripheral_curve(tri, {v}, f"gamma-{p}")
    return out


SPHERE_VARIANTS = {
    "sphere-4p": 0, "sphere-1h3p": 1, "sphere-2h2p": 2, "sphere-3h1p": 3, "sphere-4h": 4,
}


def sphere(holes: int) -> Configuration:
    tri = _sphere_base()
    curves = _sphere_curves(tri)
    names = list(curves)
    # open holes at punctures 1..holes, each via an edge incident to it
    for p in "1234"[:holes]:
        v = _vertex_of_puncture(tri, p)
        edge = tri.edge_index(next(n for n in SPHERE_EDGES if p in n))
        corners = vertex_classes(tri)
        slot = next(s for s in tri.slots_of(edge) if corners[3 * s[0] + s[1]] == v)
        tri, moved = open_hole(tri, edge, slot, [curves[n] for n in names if n != f"gamma-{p}"])
        curves = dict(zip([n for n in names if n != f"gamma-{p}"], moved))
        hole_verts = {_vertex_of_puncture(tri, p)}
        curves[f"gamma-{p}"] = peripheral_curve(tri, hole_verts, f"gamma-{p}")
        curves = {n: curves[n] for n in names}
    name = next(k for k, v in SPHERE_VARIANTS.items() if v == holes)
    tri = tri.replace(name=name).validate()
    return Configuration(tri, curves, f"sphere with {holes} holes and {4 - holes} punctures",
                         skein={"alpha": "alpha", "beta": "beta", "ab": "slope-plus",
                                "ba": "slope-minus",
                                "gammas": ("gamma-1", "gamma-3", "gamma-2", "gamma-4")})


def _vertex_of_puncture(tri: Triangulation, p: str) -> int:
    """Vertex class of puncture ``p`` (the common endpoint of its three edges)."""
    common = None
    for n in SPHERE_EDGES:
        if p not in n:
            continue
        ends = set(_edge_vertices(tri, tri.edge_index(n)))
        common = ends if common is None else common & ends
    if not common or len(common) != 1:
        raise TriangulationError(f"cannot locate puncture {p}")
    return next(iter(common))


# ---------------------------------------------------------------------------
# Registry

_BUILDERS = {
    "torus-1p": torus_1p,
    "torus-hole-1": torus_hole_1,
    "torus-hole-2": torus_hole_2,
    **{name: (lambda h=h: sphere(h)) for name, h in SPHERE_VARIANTS.items()},
}


def names() -> list[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def get(name: str) -> Configuration:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownName(f"unknown surface {name!r}") from None
    return builder()


def all_configurations() -> list[Configuration]:
    return [get(n) for n in names()]


def simple_curve_names(cfg: Configuration) -> list[str]:
    return [n for n, c in cfg.curves.items() if is_lambda_simple(c, cfg.tri)]
