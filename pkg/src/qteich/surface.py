"""Combinatorial ideal triangulations, flips, and transverse curves.

A triangulation is a list of triangles, each a counterclockwise triple of edge
labels ``1..n``.  Two occurrences of the same label are glued; a boundary
label occurs once.  A *slot* ``(t, p)`` is the side at position ``p`` of
triangle ``t``.  Side ``(t, p)`` runs from corner ``(t, p)`` to corner
``(t, p + 1)``.

Curves are stored as arcs ``(triangle, in_position, out_position)``.  Leaving
a triangle through a slot means entering the triangle on the other side of
the glued edge.  Walking into a triangle through side ``p`` and leaving
through side ``p + 1`` keeps the shared corner on the right (turn ``R``);
leaving through ``p - 1`` is a left turn ``L``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .qalg import GeneratorSet, Slot

TriangleRecord = tuple[int, int, int]
Arc = tuple[int, int, int]


class TriangulationError(ValueError):
    """Structural problem with a triangulation or curve."""


class PathNotFound(RuntimeError):
    """Bounded search exhausted without reaching the goal."""


# ---------------------------------------------------------------------------
# Surfaces and triangulations


@dataclass(frozen=True)
class SurfaceSpec:
    """Topological type: genus, interior punctures, boundary punctures, holes."""

    genus: int
    interior_punctures: int
    boundary_punctures: int = 0
    holes: int = 0

    def edge_count(self) -> int:
        # Each hole adds 3; a hole carries at least one boundary puncture.
        return (6 * self.genus - 6 + 3 * self.interior_punctures
                + 2 * self.boundary_punctures + 3 * self.holes)

    def triangle_count(self) -> int:
        return (4 * self.genus - 4 + 2 * self.interior_punctures
                + self.boundary_punctures + 2 * self.holes)


@dataclass(frozen=True)
class Triangulation:
    name: str
    triangles: tuple[TriangleRecord, ...]
    edge_count: int
    boundary_edges: frozenset[int] = frozenset()
    edge_names: tuple[str, ...] | None = None
    surface: SurfaceSpec | None = None

    # -- basic structure ---------------------------------------------------

    @property
    def gens(self) -> GeneratorSet:
        return GeneratorSet(len(self.triangles))

    def edge(self, slot: Slot) -> int:
        t, p = slot
        return self.triangles[t][p]

    def slot_edges(self) -> list[int]:
        return [e for tri in self.triangles for e in tri]

    def slots_of(self, edge: int) -> list[Slot]:
        return [(t, p) for t, tri in enumerate(self.triangles)
                for p, e in enumerate(tri) if e == edge]

    def partner(self, slot: Slot) -> Slot | None:
        """The other slot carrying the same edge (None on the boundary)."""
        e = self.edge(slot)
        others = [s for s in self.slots_of(e) if s != slot]
        return others[0] if others else None

    def is_boundary(self, edge: int) -> bool:
        return edge in self.boundary_edges

    def is_self_folded(self, edge: int) -> bool:
        s = self.slots_of(edge)
        return len(s) == 2 and s[0][0] == s[1][0]

    def name_of(self, edge: int) -> str:
        if self.edge_names:
            return self.edge_names[edge - 1]
        return str(edge)

    def edge_index(self, name: str | int) -> int:
        if isinstance(name, int):
            return name
        if self.edge_names and name in self.edge_names:
            return self.edge_names.index(name) + 1
        if name.isdigit():
            return int(name)
        raise TriangulationError(f"unknown edge {name!r}")

    def interior_edges(self) -> list[int]:
        return [e for e in range(1, self.edge_count + 1) if e not in self.boundary_edges]

    # -- validation --------------------------------------------------------

    def validate(self) -> "Triangulation":
        counts = {e: 0 for e in range(1, self.edge_count + 1)}
        for tri in self.triangles:
            if len(tri) != 3:
                raise TriangulationError("triangle records need three sides")
            for e in tri:
                if e not in counts:
                    raise TriangulationError(f"edge {e} outside 1..{self.edge_count}")
                counts[e] += 1
        for e, c in counts.items():
            want = 1 if e in self.boundary_edges else 2
            if c != want:
                kind = "boundary" if want == 1 else "interior"
                raise TriangulationError(f"{kind} edge {e} appears {c} times, expected {want}")
        if self.surface is not None:
            if self.surface.edge_count() != self.edge_count:
                raise TriangulationError(
                    f"edge count {self.edge_count} does not match surface type "
                    f"({self.surface.edge_count()} expected)")
            if self.surface.triangle_count() != len(self.triangles):
                raise TriangulationError("triangle count does not match surface type")
            if topology(self) != self.surface:
                raise TriangulationError(
                    f"gluing realizes {topology(self)}, declared {self.surface}")
        return self

    # -- canonical form and serialization ---------------------------------

    def canonical(self) -> tuple[TriangleRecord, ...]:
        """Sorted minimal rotations; the gluing is implied by the labels."""
        return tuple(sorted(min_rotation(t) for t in self.triangles))

    def to_json(self) -> dict:
        out: dict = {
            "name": self.name,
            "edge_count": self.edge_count,
            "boundary_edges": sorted(self.boundary_edges),
            "triangles": [{"sides": list(t)} for t in self.triangles],
        }
        if self.edge_names:
            out["edge_names"] = list(self.edge_names)
        if self.surface:
            s = self.surface
            out["surface"] = {"genus": s.genus, "interior_punctures": s.interior_punctures,
                              "boundary_punctures": s.boundary_punctures, "holes": s.holes}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        try:
            surf = data.get("surface")
            tri = cls(
                name=str(data.get("name", "user")),
                triangles=tuple(tuple(int(x) for x in t["sides"]) for t in data["triangles"]),
                edge_count=int(data["edge_count"]),
                boundary_edges=frozenset(int(x) for x in data.get("boundary_edges", [])),
                edge_names=tuple(data["edge_names"]) if data.get("edge_names") else None,
                surface=SurfaceSpec(**surf) if surf else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TriangulationError(f"malformed triangulation JSON: {exc}") from exc
        return tri.validate()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def replace(self, **kw) -> "Triangulation":
        data = dict(name=self.name, triangles=self.triangles, edge_count=self.edge_count,
                    boundary_edges=self.boundary_edges, edge_names=self.edge_names,
                    surface=self.surface)
        data.update(kw)
        return Triangulation(**data)


def min_rotation(t: Sequence[int]) -> TriangleRecord:
    rots = [tuple(t[(i + r) % 3] for i in range(3)) for r in range(3)]
    return min(rots)  # type: ignore[return-value]


def same_triangulation(a: Triangulation, b: Triangulation) -> bool:
    return a.edge_count == b.edge_count and a.canonical() == b.canonical()


# ---------------------------------------------------------------------------
# Topology


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def vertex_classes(tri: Triangulation) -> list[int]:
    """Vertex id of every corner ``(t, p)`` (flattened as ``3t + p``)."""
    n = 3 * len(tri.triangles)
    parent = list(range(n))

    def union(a: int, b: int) -> None:
        ra, rb = _find(parent, a), _find(parent, b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for e in tri.interior_edges():
        s = tri.slots_of(e)
        if len(s) != 2:
            continue
        (t1, p1), (t2, p2) = s
        # side (t,p) runs corner(t,p) -> corner(t,p+1); glued sides reverse.
        union(3 * t1 + p1, 3 * t2 + (p2 + 1) % 3)
        union(3 * t1 + (p1 + 1) % 3, 3 * t2 + p2)
    roots = sorted({_find(parent, i) for i in range(n)})
    index = {r: k for k, r in enumerate(roots)}
    return [index[_find(parent, i)] for i in range(n)]


def topology(tri: Triangulation) -> SurfaceSpec:
    """Infer genus, punctures and holes from the gluing."""
    corners = vertex_classes(tri)
    nverts = max(corners) + 1 if corners else 0
    boundary_vertices: set[int] = set()
    # boundary edges as graph edges between vertex classes
    parent = list(range(nverts))
    for e in tri.boundary_edges:
        (t, p), = tri.slots_of(e)
        a, b = corners[3 * t + p], corners[3 * t + (p + 1) % 3]
        boundary_vertices.update((a, b))
        ra, rb = _find(parent, a), _find(parent, b)
        if ra != rb:
            parent[ra] = rb
    holes = len({_find(parent, v) for v in boundary_vertices})
    chi = nverts - tri.edge_count + len(tri.triangles)
    twice_genus = 2 - holes - chi
    if twice_genus % 2:
        raise TriangulationError("gluing is not an orientable surface")
    return SurfaceSpec(
        genus=twice_genus // 2,
        interior_punctures=nverts - len(boundary_vertices),
        boundary_punctures=len(boundary_vertices),
        holes=holes,
    )


# ---------------------------------------------------------------------------
# Skew form


@dataclass(frozen=True)
class SkewForm:
    """``sigma[i][j]`` for edges ``1..n`` (row/col 0 unused) plus spike counts."""

    sigma: tuple[tuple[int, ...], ...]
    spikes: tuple[tuple[int, ...], ...]

    def __call__(self, i: int, j: int) -> int:
        return self.sigma[i][j]

    @property
    def n(self) -> int:
        return len(self.sigma) - 1


def compute_skew_form(tri: Triangulation) -> SkewForm:
    """Count corners where edge ``i`` is followed counterclockwise by edge ``j``.

    ``spikes[i][j]`` is that count and ``sigma = spikes - spikes^T``.
    """
    tri.validate()
    n = tri.edge_count
    spikes = [[0] * (n + 1) for _ in range(n + 1)]
    for t in tri.triangles:
        for p in range(3):
            spikes[t[p]][t[(p + 1) % 3]] += 1
    sigma = tuple(tuple(spikes[i][j] - spikes[j][i] for j in range(n + 1)) for i in range(n + 1))
    return SkewForm(sigma=sigma, spikes=tuple(tuple(r) for r in spikes))


# ---------------------------------------------------------------------------
# Diagonal exchange


@dataclass(frozen=True)
class FlipContext:
    """The square around a flipped diagonal.

    Before the flip the two triangles are ``T1 = (j, k, i)`` and
    ``T2 = (i, l, m)`` up to rotation; the square's sides in counterclockwise
    order are ``j, k, l, m``.  After the flip ``T1`` holds ``(j, i, m)`` and
    ``T2`` holds ``(k, l, i)``, stored in exactly that rotation.

    ``pre`` and ``post`` map the roles ``j k l m i1 i2`` to slots; ``i1`` is the
    diagonal slot in ``T1``.
    """

    edge: int
    t1: int
    t2: int
    edges: dict[str, int]
    pre: dict[str, Slot]
    post: dict[str, Slot]
    before: Triangulation
    after: Triangulation
    degenerate: bool = False

    def role_of_pre(self, slot: Slot) -> str | None:
        for r, s in self.pre.items():
            if s == slot:
                return r
        return None

    def role_of_post(self, slot: Slot) -> str | None:
        for r, s in self.post.items():
            if s == slot:
                return r
        return None

    def slot_map(self) -> dict[Slot, Slot]:
        """Pre-flip slot to post-flip slot for the four sides and the diagonal."""
        return {self.pre[r]: self.post[r] for r in ("j", "k", "l", "m", "i1", "i2")}


POST_POSITIONS: dict[str, tuple[int, int]] = {
    # role -> (which triangle: 0 for T1, 1 for T2; position)
    "j": (0, 0), "i1": (0, 1), "m": (0, 2),
    "k": (1, 0), "l": (1, 1), "i2": (1, 2),
}


def diagonal_exchange(tri: Triangulation, edge: int) -> tuple[Triangulation, FlipContext]:
    """Replace ``edge`` by the other diagonal of its square."""
    if tri.is_boundary(edge):
        raise TriangulationError("cannot flip boundary edge")
    slots = tri.slots_of(edge)
    if len(slots) != 2:
        raise TriangulationError(f"edge {edge} is not an interior edge")
    if slots[0][0] == slots[1][0]:
        ctx = FlipContext(edge=edge, t1=slots[0][0], t2=slots[0][0], edges={}, pre={},
                          post={}, before=tri, after=tri, degenerate=True)
        return tri, ctx
    (t1, p1), (t2, p2) = sorted(slots)
    T1, T2 = tri.triangles[t1], tri.triangles[t2]
    j, k = T1[(p1 + 1) % 3], T1[(p1 + 2) % 3]
    l, m = T2[(p2 + 1) % 3], T2[(p2 + 2) % 3]
    pre = {
        "j": (t1, (p1 + 1) % 3), "k": (t1, (p1 + 2) % 3), "i1": (t1, p1),
        "i2": (t2, p2), "l": (t2, (p2 + 1) % 3), "m": (t2, (p2 + 2) % 3),
    }
    post = {r: ((t1, t2)[w], pos) for r, (w, pos) in POST_POSITIONS.items()}
    triangles = list(tri.triangles)
    triangles[t1] = (j, edge, m)
    triangles[t2] = (k, l, edge)
    new = tri.replace(triangles=tuple(triangles))
    ctx = FlipContext(edge=edge, t1=t1, t2=t2,
                      edges={"i": edge, "j": j, "k": k, "l": l, "m": m},
                      pre=pre, post=post, before=tri, after=new)
    return new, ctx


# ---------------------------------------------------------------------------
# Curves


@dataclass(frozen=True)
class CurvePath:
    """A transverse curve as a cyclic (or open) sequence of triangle arcs."""

    arcs: tuple[Arc, ...]
    closed: bool = True
    name: str = ""

    def __len__(self) -> int:
        return len(self.arcs)

    def crossing_slots(self, tri: Triangulation) -> list[Slot]:
        """Every slot the curve passes through, with multiplicity."""
        out: list[Slot] = []
        for t, pin, pout in self.arcs:
            out.append((t, pin))
            out.append((t, pout))
        return out

    def crossed_edges(self, tri: Triangulation) -> list[int]:
        """Edges crossed, one entry per crossing."""
        edges = [tri.triangles[t][pin] for t, pin, _ in self.arcs]
        if not self.closed:
            t, _, pout = self.arcs[-1]
            edges.append(tri.triangles[t][pout])
        return edges

    def turns(self) -> list[str]:
        return [turn_letter(pin, pout) for _, pin, pout in self.arcs]

    def crossings(self, tri: Triangulation) -> list[dict]:
        return [{"edge": tri.triangles[t][pin], "triangle": t, "turn": turn_letter(pin, pout),
                 "side": pin} for t, pin, pout in self.arcs]

    def to_json(self, tri: Triangulation) -> dict:
        out: dict = {"crossings": self.crossings(tri)}
        if not self.closed:
            out["closed"] = False
        if self.name:
            out["name"] = self.name
        return out

    def reversed(self) -> "CurvePath":
        return CurvePath(tuple((t, pout, pin) for t, pin, pout in reversed(self.arcs)),
                         self.closed, self.name)

    def rotated(self, k: int) -> "CurvePath":
        if not self.closed:
            raise TriangulationError("only closed curves can be rotated")
        k %= len(self.arcs)
        return CurvePath(self.arcs[k:] + self.arcs[:k], True, self.name)

    def renamed(self, name: str) -> "CurvePath":
        return CurvePath(self.arcs, self.closed, name)


def turn_letter(pin: int, pout: int) -> str:
    d = (pout - pin) % 3
    if d == 1:
        return "L"
    if d == 2:
        return "R"
    raise TriangulationError("curve backtracks through a side")


def out_position(pin: int, turn: str) -> int:
    if turn == "L":
        return (pin + 1) % 3
    if turn == "R":
        return (pin - 1) % 3
    raise TriangulationError(f"turn must be L or R, got {turn!r}")


def validate_curve(curve: CurvePath, tri: Triangulation) -> CurvePath:
    if not curve.arcs:
        raise TriangulationError("curve has no crossings")
    ntri = len(tri.triangles)
    for t, pin, pout in curve.arcs:
        if not (0 <= t < ntri and 0 <= pin < 3 and 0 <= pout < 3):
            raise TriangulationError(f"arc {(t, pin, pout)} out of range")
        if pin == pout:
            raise TriangulationError("curve enters and exits a triangle through the same side")
    pairs = list(zip(curve.arcs, curve.arcs[1:]))
    if curve.closed:
        pairs.append((curve.arcs[-1], curve.arcs[0]))
    for (t, _, pout), (t2, pin2, _) in pairs:
        if tri.partner((t, pout)) != (t2, pin2):
            raise TriangulationError(
                f"arc in triangle {t} exits side {pout} but the next arc does not enter "
                f"through the glued side")
    return curve


def curve_from_crossings(tri: Triangulation, crossings: Sequence[dict], closed: bool = True,
                         name: str = "") -> CurvePath:
    """Build a curve from ``{"edge", "triangle", "turn", optional "side"}`` records.

    When an edge occurs twice in a triangle the side is taken from ``"side"``
    or, failing that, deduced from the neighbouring crossing.
    """
    if not crossings:
        raise TriangulationError("curve has no crossings")
    options: list[list[Arc]] = []
    for c in crossings:
        try:
            e, t, turn = int(c["edge"]), int(c["triangle"]), str(c["turn"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TriangulationError(f"malformed crossing {c!r}") from exc
        if not 0 <= t < len(tri.triangles):
            raise TriangulationError(f"triangle {t} out of range")
        positions = [p for p, x in enumerate(tri.triangles[t]) if x == e]
        if "side" in c:
            positions = [int(c["side"])] if int(c["side"]) in positions else []
        if not positions:
            raise TriangulationError(f"edge {e} is not a side of triangle {t}")
        options.append([(t, p, out_position(p, turn)) for p in positions])
    found: list[CurvePath] = []
    for first in options[0]:
        arcs = [first]
        ok = True
        for opts in options[1:]:
            nxt = tri.partner((arcs[-1][0], arcs[-1][2]))
            match = [a for a in opts if nxt == (a[0], a[1])]
            if len(match) != 1:
                ok = False
                break
            arcs.append(match[0])
        if not ok:
            continue
        curve = CurvePath(tuple(arcs), closed, name)
        try:
            validate_curve(curve, tri)
        except TriangulationError:
            continue
        found.append(curve)
    if not found:
        raise TriangulationError("crossings do not form a consistent curve")
    if len(found) > 1:
        raise TriangulationError("ambiguous crossings; add a 'side' field")
    return found[0]


def curve_from_json(tri: Triangulation, data: dict) -> CurvePath:
    if not isinstance(data, dict) or "crossings" not in data:
        raise TriangulationError("curve JSON needs a 'crossings' list")
    return curve_from_crossings(tri, data["crossings"], bool(data.get("closed", True)),
                                str(data.get("name", "")))


def curve_from_edges(tri: Triangulation, steps: Sequence[tuple[int, str | int, str | int]],
                     closed: bool = True, name: str = "") -> CurvePath:
    """Build a curve from ``(triangle, entry edge, exit edge)`` steps.

    Edges may be names or indices; the sides must be unique in the triangle.
    """
    arcs = []
    for t, ein, eout in steps:
        sides = tri.triangles[t]
        a, b = tri.edge_index(ein), tri.edge_index(eout)
        if sides.count(a) != 1 or sides.count(b) != 1:
            raise TriangulationError("edge repeated in triangle; give positions instead")
        arcs.append((t, sides.index(a), sides.index(b)))
    return validate_curve(CurvePath(tuple(arcs), closed, name), tri)


def normalize_curve(curve: CurvePath, tri: Triangulation) -> CurvePath:
    """Remove backtracking (an arc entering and leaving through one side)."""
    arcs = list(curve.arcs)
    changed = True
    while changed and len(arcs) > 2:
        changed = False
        n = len(arcs)
        for k in range(n):
            t, pin, pout = arcs[k]
            if pin != pout:
                continue
            if not curve.closed and (k == 0 or k == n - 1):
                raise TriangulationError("open curve backtracks at an end")
            prev, nxt = arcs[k - 1], arcs[(k + 1) % n]
            merged = (prev[0], prev[1], nxt[2])
            if (k + 1) % n == 0:
                arcs = [merged] + arcs[1:k - 1]
            else:
                arcs = arcs[:k - 1] + [merged] + arcs[k + 2:] if k >= 1 else arcs
            changed = True
            break
    return validate_curve(CurvePath(tuple(arcs), curve.closed, curve.name), tri)


def is_lambda_simple(curve: CurvePath, tri: Triangulation) -> bool:
    """True iff no edge is crossed twice."""
    edges = curve.crossed_edges(tri)
    return len(edges) == len(set(edges))


def edge_vector(tri: Triangulation, exps: Sequence[int]) -> tuple[int, ...]:
    """Slot vector of the embedded edge monomial: exponent ``exps[e-1]`` on every slot of ``e``."""
    gens = tri.gens
    v = [0] * gens.size
    for e, h in enumerate(exps, start=1):
        if h:
            for s in tri.slots_of(e):
                v[gens.slot_index(s)] += h
    return tuple(v)


# ---------------------------------------------------------------------------
# Passages through a flip square


PASSAGE_CASES: dict[frozenset[str], str] = {
    frozenset("jk"): "a", frozenset("kl"): "b", frozenset("lm"): "c",
    frozenset("jm"): "d", frozenset("jl"): "e", frozenset("km"): "f",
}


@dataclass(frozen=True)
class Passage:
    """One traversal of the flip square: consecutive arc indices and side roles."""

    case: str
    arcs: tuple[int, ...]
    entry: str
    exit: str
    slots: tuple[Slot, ...]


def passages(curve: CurvePath, ctx: FlipContext) -> list[Passage]:
    """Split the curve's visits to the square into passages, in curve order."""
    if ctx.degenerate:
        return []
    square = {ctx.t1, ctx.t2}
    arcs = curve.arcs
    n = len(arcs)
    diag = {ctx.pre["i1"], ctx.pre["i2"]}
    # start index: an arc whose predecessor does not hand over across the diagonal
    start = 0
    if curve.closed:
        for k in range(n):
            t, pin, _ = arcs[k]
            if not (t in square and (t, pin) in diag):
                start = k
                break
        else:
            raise TriangulationError("curve never leaves the square")
    order = [(start + k) % n for k in range(n)] if curve.closed else list(range(n))
    out: list[Passage] = []
    k = 0
    while k < len(order):
        idx = order[k]
        t, pin, pout = arcs[idx]
        if t not in square:
            k += 1
            continue
        if (t, pin) in diag:
            raise TriangulationError("passage starts on the diagonal")
        group = [idx]
        if (t, pout) in diag:
            if k + 1 >= len(order):
                raise TriangulationError("passage ends on the diagonal")
            group.append(order[k + 1])
            k += 1
        k += 1
        first, last = arcs[group[0]], arcs[group[-1]]
        entry = ctx.role_of_pre((first[0], first[1]))
        exit_ = ctx.role_of_pre((last[0], last[2]))
        key = frozenset((entry, exit_))
        if entry is None or exit_ is None or key not in PASSAGE_CASES:
            raise TriangulationError(f"passage {entry}->{exit_} matches no case")
        slots: list[Slot] = []
        for g in group:
            tt, a, b = arcs[g]
            slots.extend([(tt, a), (tt, b)])
        out.append(Passage(PASSAGE_CASES[key], tuple(group), entry, exit_, tuple(slots)))
    return out


def _post_arcs(ctx: FlipContext, entry: str, exit_: str) -> list[Arc]:
    a, b = ctx.post[entry], ctx.post[exit_]
    if a[0] == b[0]:
        return [(a[0], a[1], b[1])]
    diag_a = ctx.post["i1"] if ctx.post["i1"][0] == a[0] else ctx.post["i2"]
    diag_b = ctx.post["i1"] if ctx.post["i1"][0] == b[0] else ctx.post["i2"]
    return [(a[0], a[1], diag_a[1]), (b[0], diag_b[1], b[1])]


def transport_curve(curve: CurvePath, ctx: FlipContext) -> CurvePath:
    """Rewrite the curve's arcs for the post-flip triangulation."""
    if ctx.degenerate:
        return curve
    ps = passages(curve, ctx)
    replaced = {p.arcs[0]: p for p in ps}
    skip = {i for p in ps for i in p.arcs[1:]}
    n = len(curve.arcs)
    start = 0
    if curve.closed and ps:
        start = ps[0].arcs[0]
    order = [(start + k) % n for k in range(n)] if curve.closed else list(range(n))
    arcs: list[Arc] = []
    for idx in order:
        if idx in skip:
            continue
        if idx in replaced:
            p = replaced[idx]
            arcs.extend(_post_arcs(ctx, p.entry, p.exit))
        else:
            arcs.append(curve.arcs[idx])
    return validate_curve(CurvePath(tuple(arcs), curve.closed, curve.name), ctx.after)


# ---------------------------------------------------------------------------
# Moves, isomorphisms and search


@dataclass(frozen=True)
class DiagonalExchange:
    edge: int


@dataclass(frozen=True)
class Reindex:
    """Relabel edges by ``edge_map`` and move slots by ``slot_map``.

    ``slot_map`` sends every slot of the source to a slot of the target.
    """

    edge_map: tuple[tuple[int, int], ...]
    slot_map: tuple[tuple[Slot, Slot], ...]
    target: Triangulation = field(compare=False)

    def slots(self) -> dict[Slot, Slot]:
        return dict(self.slot_map)


Move = DiagonalExchange | Reindex


def isomorphisms(a: Triangulation, b: Triangulation,
                 edge_map: dict[int, int] | None = None) -> Iterator[dict[Slot, Slot]]:
    """Every slot bijection ``a -> b`` respecting sides (edges relabeled by ``edge_map``)."""
    if len(a.triangles) != len(b.triangles) or a.edge_count != b.edge_count:
        return
    emap = edge_map or {e: e for e in range(1, a.edge_count + 1)}
    ntri = len(a.triangles)
    for t0 in range(ntri):
        for r0 in range(3):
            tmap: dict[int, tuple[int, int]] = {0: (t0, r0)}
            used = {t0}
            queue = deque([0])
            ok = True
            while queue and ok:
                t = queue.popleft()
                tb, r = tmap[t]
                for p in range(3):
                    ea = a.triangles[t][p]
                    if b.triangles[tb][(p + r) % 3] != emap[ea]:
                        ok = False
                        break
                    pa = a.partner((t, p))
                    pb = b.partner((tb, (p + r) % 3))
                    if (pa is None) != (pb is None):
                        ok = False
                        break
                    if pa is None:
                        continue
                    want = (pb[0], (pb[1] - pa[1]) % 3)
                    if pa[0] in tmap:
                        if tmap[pa[0]] != want:
                            ok = False
                            break
                    else:
                        if want[0] in used:
                            ok = False
                            break
                        tmap[pa[0]] = want
                        used.add(want[0])
                        queue.append(pa[0])
            if ok and len(tmap) == ntri:
                yield {(t, p): (tb, (p + r) % 3) for t, (tb, r) in tmap.items() for p in range(3)}


def isomorphism(a: Triangulation, b: Triangulation,
                edge_map: dict[int, int] | None = None) -> dict[Slot, Slot] | None:
    """The first slot bijection ``a -> b`` found, or None."""
    return next(isomorphisms(a, b, edge_map), None)


def reindex_move(a: Triangulation, b: Triangulation,
                 edge_map: dict[int, int] | None = None) -> Reindex:
    smap = isomorphism(a, b, edge_map)
    if smap is None:
        raise TriangulationError("triangulations are not isomorphic under the edge map")
    emap = edge_map or {e: e for e in range(1, a.edge_count + 1)}
    return Reindex(tuple(sorted(emap.items())), tuple(sorted(smap.items())), b)


def relabel_triangulation(tri: Triangulation, edge_map: dict[int, int]) -> Triangulation:
    triangles = tuple(tuple(edge_map[e] for e in t) for t in tri.triangles)
    return tri.replace(triangles=triangles,
                       boundary_edges=frozenset(edge_map[e] for e in tri.boundary_edges))


def relabel_curve(curve: CurvePath, slot_map: dict[Slot, Slot]) -> CurvePath:
    arcs = []
    for t, pin, pout in curve.arcs:
        a, b = slot_map[(t, pin)], slot_map[(t, pout)]
        arcs.append((a[0], a[1], b[1]))
    return CurvePath(tuple(arcs), curve.closed, curve.name)


def apply_move(tri: Triangulation, curve: CurvePath | None,
               move: Move) -> tuple[Triangulation, CurvePath | None]:
    if isinstance(move, DiagonalExchange):
        new, ctx = diagonal_exchange(tri, move.edge)
        return new, (transport_curve(curve, ctx) if curve is not None else None)
    new = move.target
    return new, (relabel_curve(curve, move.slots()) if curve is not None else None)


def flippable_edges(tri: Triangulation) -> list[int]:
    return [e for e in tri.interior_edges() if not tri.is_self_folded(e)]


def alpha_simple_flip_path(start: Triangulation, goal: Triangulation, curve: CurvePath,
                           depth_bound: int = 12) -> list[Move]:
    """Breadth-first flip path through curve-simple triangulations only."""
    if not is_lambda_simple(curve, start):
        raise TriangulationError("start triangulation is not simple for the curve")
    target = goal.canonical()

    def finish(tri: Triangulation, moves: list[Move]) -> list[Move]:
        if tri.triangles == goal.triangles:
            return moves
        return moves + [reindex_move(tri, goal)]

    if start.canonical() == target:
        return finish(start, [])
    seen = {start.canonical()}
    frontier: deque[tuple[Triangulation, CurvePath, list[Move]]] = deque([(start, curve, [])])
    while frontier:
        tri, cur, moves = frontier.popleft()
        if len(moves) >= depth_bound:
            continue
        for e in flippable_edges(tri):
            new, ctx = diagonal_exchange(tri, e)
            key = new.canonical()
            if key in seen:
                continue
            new_curve = transport_curve(cur, ctx)
            if not is_lambda_simple(new_curve, new):
                continue
            seen.add(key)
            path = moves + [DiagonalExchange(e)]
            if key == target:
                return finish(new, path)
            frontier.append((new, new_curve, path))
    raise PathNotFound("path not found within bound")


def simplifying_flip_path(start: Triangulation, curve: CurvePath,
                          depth_bound: int = 12) -> tuple[list[Move], Triangulation, CurvePath]:
    """Shortest flip sequence after which the curve crosses each edge at most once."""
    if is_lambda_simple(curve, start):
        return [], start, curve
    # the curve is part of the state: a flip can return the same labeled triangulation
    seen = {(start.triangles, curve.arcs)}
    frontier: deque[tuple[Triangulation, CurvePath, list[Move]]] = deque([(start, curve, [])])
    while frontier:
        tri, cur, moves = frontier.popleft()
        if len(moves) >= depth_bound:
            continue
        for e in flippable_edges(tri):
            new, ctx = diagonal_exchange(tri, e)
            new_curve = transport_curve(cur, ctx)
            key = (new.triangles, new_curve.arcs)
            if key in seen:
                continue
            seen.add(key)
            path = moves + [DiagonalExchange(e)]
            if is_lambda_simple(new_curve, new):
                return path, new, new_curve
            frontier.append((new, new_curve, path))
    raise PathNotFound("path not found within bound")


def pentagon_cycle(tri: Triangulation, x: int, y: int) -> list[Triangulation]:
    """Triangulations along ``x, y, x, y, x`` flips; returns all six stages."""
    stages = [tri]
    cur = tri
    for e in (x, y, x, y, x):
        if e not in flippable_edges(cur):
            raise TriangulationError(f"edge {e} is not flippable in the pentagon cycle")
        cur, _ = diagonal_exchange(cur, e)
        stages.append(cur)
    return stages


def find_pentagons(tri: Triangulation) -> list[tuple[int, int]]:
    """Ordered edge pairs ``(x, y)`` bounding three distinct triangles in a chain."""
    out = []
    for x in flippable_edges(tri):
        for y in flippable_edges(tri):
            if x == y:
                continue
            tx = {t for t, _ in tri.slots_of(x)}
            ty = {t for t, _ in tri.slots_of(y)}
            if len(tx) == 2 and len(ty) == 2 and len(tx & ty) == 1 and len(tx | ty) == 3:
                out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# Surgery used to build catalog variants


def open_hole(tri: Triangulation, edge: int, vertex_slot: Slot,
              curves: Iterable[CurvePath] = ()) -> tuple[Triangulation, list[CurvePath]]:
    """Turn the interior puncture at one end of ``edge`` into a hole.

    ``edge`` is split into two parallel copies bounding a new triangle whose
    third side is a boundary loop at the puncture.  ``vertex_slot`` is a slot
    of ``edge``; the puncture is the corner where that side starts.  Curves
    crossing ``edge`` are rerouted through the new triangle.
    """
    (ta, pa), (tb, pb) = tri.slots_of(edge)
    if (ta, pa) != vertex_slot:
        (ta, pa), (tb, pb) = (tb, pb), (ta, pa)
        if (ta, pa) != vertex_slot:
            raise TriangulationError("vertex_slot is not a slot of the edge")
    n = tri.edge_count
    e2, loop = n + 1, n + 2
    triangles = [list(t) for t in tri.triangles]
    triangles[tb][pb] = e2
    # Side (ta, pa) starts at the puncture, so the loop sits where the second
    # copy ends in the new triangle.
    new_t = len(triangles)
    triangles.append([e2, edge, loop])
    pos_a, pos_b = 1, 0  # positions of the two copies in the new triangle
    names = None
    if tri.edge_names:
        base = tri.edge_names[edge - 1]
        names = tri.edge_names + (base + "'", "b" + base)
    surf = None
    if tri.surface:
        s = tri.surface
        surf = SurfaceSpec(s.genus, s.interior_punctures - 1, s.boundary_punctures + 1, s.holes + 1)
    new = tri.replace(triangles=tuple(tuple(t) for t in triangles), edge_count=n + 2,
                      boundary_edges=tri.boundary_edges | {loop}, edge_names=names, surface=surf,
                      name=tri.name)
    new.validate()
    out = []
    for c in curves:
        arcs: list[Arc] = []
        m = len(c.arcs)
        for k, arc in enumerate(c.arcs):
            arcs.append(arc)
            t, _, pout = arc
            if k == m - 1 and not c.closed:
                continue
            if (t, pout) == (ta, pa):
                arcs.append((new_t, pos_a, pos_b))
            elif (t, pout) == (tb, pb):
                arcs.append((new_t, pos_b, pos_a))
        out.append(validate_curve(CurvePath(tuple(arcs), c.closed, c.name), new))
    return new, out
