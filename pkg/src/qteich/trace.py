"""Classical and quantum trace polynomials of closed curves, and skein checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .catalog import canonical_curve, peripheral_curve
from .coordchange import theta_inverse
from .division import Comparison, WordSum, compare, simplify
from .qalg import ClassicalPoly, Element, QCoeff, classical_limit, mul
from .surface import (
    CurvePath, DiagonalExchange, FlipContext, Move, Triangulation, TriangulationError,
    diagonal_exchange, edge_vector, is_lambda_simple, simplifying_flip_path, transport_curve,
    validate_curve, vertex_classes,
)

Matrix = list[list[ClassicalPoly]]


class NeedsTransport(ValueError):
    """Weyl quantization asked for a curve that is neither simple nor peripheral."""


# ---------------------------------------------------------------------------
# Classical traces


def _turn_matrix(n: int, turn: str) -> Matrix:
    one, zero = ClassicalPoly.const(n, 1), ClassicalPoly(n)
    if turn == "L":
        return [[one, one], [zero, one]]
    return [[one, zero], [one, one]]


def _shear_matrix(n: int, edge: int) -> Matrix:
    zero = ClassicalPoly(n)
    return [[ClassicalPoly.half_power(n, edge, 1), zero],
            [zero, ClassicalPoly.half_power(n, edge, -1)]]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def classical_trace(curve: CurvePath, tri: Triangulation) -> ClassicalPoly:
    """Trace of the product of shear and turn matrices along the curve."""
    if not curve.closed:
        raise TriangulationError("classical trace needs a closed curve")
    validate_curve(curve, tri)
    n = tri.edge_count
    acc: Matrix = [[ClassicalPoly.const(n, 1), ClassicalPoly(n)],
                   [ClassicalPoly(n), ClassicalPoly.const(n, 1)]]
    for edge, turn in zip(curve.crossed_edges(tri), curve.turns()):
        acc = _matmul(acc, _matmul(_shear_matrix(n, edge), _turn_matrix(n, turn)))
    return acc[0][0] + acc[1][1]


# ---------------------------------------------------------------------------
# Quantum traces


def boundary_curves(tri: Triangulation) -> list[CurvePath]:
    """Loops around each interior puncture and each boundary component."""
    classes = vertex_classes(tri)
    vertices = sorted(set(classes))
    # vertices joined by boundary edges form one boundary component
    parent = {v: v for v in vertices}

    def find(v: int) -> int:
        while parent[v] != v:
            v = parent[v]
        return v

    for t, tr in enumerate(tri.triangles):
        for p, e in enumerate(tr):
            if e in tri.boundary_edges:
                a, b = classes[3 * t + p], classes[3 * t + (p + 1) % 3]
                parent[find(a)] = find(b)
    groups: dict[int, set[int]] = {}
    for v in vertices:
        groups.setdefault(find(v), set()).add(v)
    out = []
    for g in groups.values():
        try:
            out.append(peripheral_curve(tri, g))
        except TriangulationError:
            continue
    return out


def is_boundary_parallel(curve: CurvePath, tri: Triangulation) -> bool:
    key = canonical_curve(curve).arcs
    return any(canonical_curve(c).arcs == key for c in boundary_curves(tri))


def lift_monomial(tri: Triangulation, half_exps: Sequence[int]) -> tuple[int, ...]:
    """Slot vector putting the half-exponent of each edge on every slot of that edge."""
    return edge_vector(tri, half_exps)


def quantum_integer(n: int) -> QCoeff:
    """``q^{n-1} + q^{n-3} + ... + q^{1-n}``, signed like ``n``."""
    sign = 1 if n >= 0 else -1
    n = abs(n)
    return QCoeff({4 * (n - 1 - 2 * k): sign for k in range(n)})


def weyl_quantize(ct: ClassicalPoly, curve: CurvePath, tri: Triangulation,
                  check: bool = True) -> Element:
    """Replace each classical monomial by its Weyl-ordered lift.

    A monomial reached along ``n`` state sequences gets the quantum integer
    ``[n]`` instead of ``n``; simple curves only ever have ``n = 1``.
    """
    if check and not (is_lambda_simple(curve, tri) or is_boundary_parallel(curve, tri)):
        raise NeedsTransport("requires Θ-transport")
    gens = tri.gens
    out = Element.zero(gens)
    for key, c in ct.terms.items():
        out = out + Element.weyl(gens, lift_monomial(tri, key), quantum_integer(c))
    return out


@dataclass
class QuantumTrace:
    element: Element | WordSum
    tri: Triangulation
    curve: CurvePath
    method: str                          # "weyl", "boundary" or "transport"
    path: list[Move] = field(default_factory=list)
    simple_tri: Triangulation | None = None

    def classical(self) -> ClassicalPoly:
        if not isinstance(self.element, Element):
            raise ValueError("trace is not a Laurent polynomial")
        return classical_limit(self.element, self.tri.slot_edges(), self.tri.edge_count)


def transport_back(value: Element | WordSum, tri: Triangulation, curve: CurvePath,
                   flips: Sequence[int]) -> tuple[Element | WordSum, list[FlipContext]]:
    """Carry ``value`` (odd for the transported curve) back along ``flips`` to ``tri``."""
    ctxs: list[FlipContext] = []
    curves = [curve]
    cur_tri = tri
    for e in flips:
        cur_tri, ctx = diagonal_exchange(cur_tri, e)
        ctxs.append(ctx)
        curves.append(transport_curve(curves[-1], ctx))
    for k in range(len(ctxs) - 1, -1, -1):
        value = theta_inverse(value, curves[k + 1], ctxs[k])
    return value, ctxs


def trace_on_path(curve: CurvePath, tri: Triangulation, flips: Sequence[int]) -> Element | WordSum:
    """Quantize after ``flips`` (which must make the curve simple) and transport back."""
    cur_tri, cur_curve = tri, curve
    for e in flips:
        cur_tri, ctx = diagonal_exchange(cur_tri, e)
        cur_curve = transport_curve(cur_curve, ctx)
    if not is_lambda_simple(cur_curve, cur_tri):
        raise TriangulationError("flip path does not make the curve simple")
    start = weyl_quantize(classical_trace(cur_curve, cur_tri), cur_curve, cur_tri)
    value, _ = transport_back(start, tri, curve, flips)
    return value


def quantum_trace(curve: CurvePath, tri: Triangulation, depth_bound: int = 12) -> QuantumTrace:
    """The quantum trace of a closed curve relative to ``tri``."""
    validate_curve(curve, tri)
    if is_lambda_simple(curve, tri):
        return QuantumTrace(weyl_quantize(classical_trace(curve, tri), curve, tri, check=False),
                            tri, curve, "weyl")
    if is_boundary_parallel(curve, tri):
        return QuantumTrace(weyl_quantize(classical_trace(curve, tri), curve, tri, check=False),
                            tri, curve, "boundary")
    moves, simple_tri, _ = simplifying_flip_path(tri, curve, depth_bound)
    flips = [m.edge for m in moves if isinstance(m, DiagonalExchange)]
    value = trace_on_path(curve, tri, flips)
    if isinstance(value, WordSum):
        value = simplify(value)
    return QuantumTrace(value, tri, curve, "transport", list(moves), simple_tri)


def verify_transport(curve: CurvePath, tri: Triangulation, flips: Sequence[int],
                     mode: str = "exact", depth_bound: int = 12,
                     dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2)) -> Comparison:
    """The trace computed after ``flips`` and carried back agrees with the trace on ``tri``."""
    here = quantum_trace(curve, tri, depth_bound).element
    cur_tri, cur_curve = tri, curve
    for e in flips:
        cur_tri, ctx = diagonal_exchange(cur_tri, e)
        cur_curve = transport_curve(cur_curve, ctx)
    there = quantum_trace(cur_curve, cur_tri, depth_bound).element
    back, _ = transport_back(there, tri, curve, flips)
    return compare(back, here, mode=mode, dims=dims, seeds=seeds)


# ---------------------------------------------------------------------------
# Skein relations


@dataclass
class SkeinReport:
    comparison: Comparison
    variant: str
    term_counts: dict[str, int]
    alternatives: dict[str, bool] = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.comparison.equal


def _element(tr: QuantumTrace) -> Element:
    if not isinstance(tr.element, Element):
        raise ValueError(f"trace of {tr.curve.name or 'curve'} is not a Laurent polynomial")
    return tr.element


def verify_skein_single(alpha: CurvePath, beta: CurvePath, ab: CurvePath, ba: CurvePath,
                        tri: Triangulation, mode: str = "exact",
                        dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2),
                        depth_bound: int = 12) -> SkeinReport:
    """``T_a T_b = q^{1/2} T_ab + q^{-1/2} T_ba`` for curves meeting once."""
    ta, tb = (_element(quantum_trace(c, tri, depth_bound)) for c in (alpha, beta))
    tab, tba = (_element(quantum_trace(c, tri, depth_bound)) for c in (ab, ba))
    lhs = mul(ta, tb)
    half = tab.shift(2) + tba.shift(-2)
    whole = tab.shift(4) + tba.shift(-4)
    cmp = compare(lhs, half, mode=mode, dims=dims, seeds=seeds)
    counts = {
        "alpha": ta.term_count(), "beta": tb.term_count(),
        "alpha-beta": tab.term_count(), "beta-alpha": tba.term_count(),
        "product-expanded": ta.term_count() * tb.term_count(),
        "product-collected": lhs.term_count(),
    }
    return SkeinReport(cmp, "q^(1/2), q^(-1/2)", counts,
                       {"q^(1/2), q^(-1/2)": lhs == half, "q, q^-1": lhs == whole})


def verify_skein_double(alpha: CurvePath, beta: CurvePath, ab: CurvePath, ba: CurvePath,
                        gammas: Sequence[CurvePath], tri: Triangulation, mode: str = "exact",
                        dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2),
                        depth_bound: int = 12) -> SkeinReport:
    """``T_a T_b = q T_ab + q^{-1} T_ba + T_g1 T_g2 + T_g3 T_g4`` for curves meeting twice."""
    if len(gammas) != 4:
        raise ValueError("need four boundary curves")
    ta, tb, tab, tba = (_element(quantum_trace(c, tri, depth_bound)) for c in (alpha, beta, ab, ba))
    tg = [_element(quantum_trace(c, tri, depth_bound)) for c in gammas]
    if ta.is_zero() or tb.is_zero():
        raise ValueError("degenerate input")
    lhs = mul(ta, tb)
    g12, g34 = mul(tg[0], tg[1]), mul(tg[2], tg[3])
    rhs = tab.shift(4) + tba.shift(-4) + g12 + g34
    cmp = compare(lhs, rhs, mode=mode, dims=dims, seeds=seeds)
    expanded = (ta.term_count() * tb.term_count() + tab.term_count() + tba.term_count()
                + tg[0].term_count() * tg[1].term_count() + tg[2].term_count() * tg[3].term_count())
    counts = {
        "alpha": ta.term_count(), "beta": tb.term_count(),
        "alpha-beta": tab.term_count(), "beta-alpha": tba.term_count(),
        "gamma": sum(g.term_count() for g in tg),
        "product-expanded": ta.term_count() * tb.term_count(),
        "product-collected": lhs.term_count(),
        "intermediate": expanded,
    }
    alternatives = {
        "q^(1/2), q^(-1/2)": lhs == tab.shift(2) + tba.shift(-2) + g12 + g34,
        "resolutions exchanged": lhs == tba.shift(4) + tab.shift(-4) + g12 + g34,
    }
    return SkeinReport(cmp, "q, q^-1", counts, alternatives)


def verify_commuting(alpha: CurvePath, beta: CurvePath, tri: Triangulation,
                     mode: str = "exact", depth_bound: int = 12,
                     dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2)) -> Comparison:
    ta = _element(quantum_trace(alpha, tri, depth_bound))
    tb = _element(quantum_trace(beta, tri, depth_bound))
    return compare(mul(ta, tb), mul(tb, ta), mode=mode, dims=dims, seeds=seeds)


def scalar_q(quarter: int) -> QCoeff:
    return QCoeff.q(quarter)


__all__ = [
    "NeedsTransport", "QuantumTrace", "quantum_integer", "SkeinReport", "classical_trace", "boundary_curves",
    "is_boundary_parallel", "lift_monomial", "weyl_quantize", "transport_back",
    "trace_on_path", "quantum_trace", "verify_skein_single", "verify_skein_double",
    "verify_commuting", "verify_transport",
]
