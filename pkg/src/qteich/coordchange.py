"""Flip isomorphisms on even elements and the square-root maps on odd ones.

A diagonal exchange is described by a :class:`~qteich.surface.FlipContext`.
Before the flip the square's triangles are ``(i, j, k)`` and ``(i, l, m)``;
afterwards they are ``(j, i, m)`` and ``(k, l, i)``.  ``U`` below is the
post-flip diagonal ``Z_{i,1}^2 Z_{i,2}^2``.

``phi`` sends slot squares to rational expressions in the post-flip algebra:

* ``X_i -> U^{-1}``
* ``Z_j^2 -> (1 + qU) Z_j^2`` and likewise for ``l``
* ``Z_k^2 -> (1 + qU^{-1})^{-1} Z_k^2`` and likewise for ``m``

Every other slot is fixed.  ``theta_flip`` splits an odd element into one
Weyl-ordered block per passage of the curve through the square times an even
remainder, replaces each block by its image and the remainder by ``phi``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import ZZ
from sympy.polys.fields import field as sympy_field

from .division import (
    InvPoly, Poly, WordSum, _rescale_frac, as_wordsum, normalize, simplify,
)
from .qalg import (
    Element, GeneratorSet, Monomial, QCoeff, commutation_exponent, reorder_exponent,
    weyl_exponent,
)
from .surface import (
    CurvePath, DiagonalExchange, FlipContext, Move, Passage, Reindex, Slot, Triangulation,
    TriangulationError, diagonal_exchange, isomorphisms, passages, relabel_curve,
    transport_curve,
)

CASES = ("a", "b", "c", "d", "e", "f")

# sides touched by each passage type
CASE_SIDES: dict[str, tuple[str, str]] = {
    "a": ("j", "k"), "b": ("k", "l"), "c": ("l", "m"),
    "d": ("j", "m"), "e": ("j", "l"), "f": ("k", "m"),
}


class NotAlphaOdd(ValueError):
    """The element does not factor as blocks times an even remainder."""


class PhiDomainError(ValueError):
    """A monomial outside the even part on which ``phi`` is defined."""


def _require_flip(ctx: FlipContext) -> None:
    if ctx.degenerate:
        raise TriangulationError("flip is identity")


# ---------------------------------------------------------------------------
# Rational functions of the post-flip diagonal


@lru_cache(maxsize=1)
def _diag_field():
    K, Q, W = sympy_field("Q,W", ZZ)
    return K, Q, W


def _diag_vector(ctx: FlipContext) -> Monomial:
    gens = ctx.after.gens
    v = [0] * gens.size
    for r in ("i1", "i2"):
        v[gens.slot_index(ctx.post[r])] = 2
    return tuple(v)


@dataclass(frozen=True)
class _Image:
    """``g(U) * normal(vec)`` with ``g`` a rational function of ``Q = q^{1/4}`` and ``U``."""

    g: object
    vec: Monomial


class _PhiAlgebra:
    """Products and inverses of :class:`_Image` values for one flip."""

    def __init__(self, ctx: FlipContext):
        _require_flip(ctx)
        self.ctx = ctx
        self.gens = ctx.after.gens
        self.K, self.Q, self.W = _diag_field()
        self.diag = _diag_vector(ctx)

    def shift(self, vec: Monomial) -> int:
        """``normal(vec) U = Q^{shift} U normal(vec)``."""
        return commutation_exponent(self.gens, vec, self.diag)

    def mul(self, a: _Image, b: _Image) -> _Image:
        moved = _rescale_frac(self.K, b.g, (self.shift(a.vec),))
        r = reorder_exponent(a.vec, b.vec)
        vec = tuple(x + y for x, y in zip(a.vec, b.vec))
        return _Image(a.g * moved * self.Q ** r if r >= 0 else a.g * moved / self.Q ** (-r), vec)

    def inverse(self, a: _Image) -> _Image:
        m = Element.monomial(self.gens, a.vec).inverse_monomial()
        vec, k, _ = m.single_term()
        g = _rescale_frac(self.K, self.K.one / a.g, (self.shift(vec),))
        return _Image(g * self.Q ** k if k >= 0 else g / self.Q ** (-k), vec)

    def power(self, a: _Image, n: int) -> _Image:
        base = a if n >= 0 else self.inverse(a)
        out = _Image(self.K.one, self.gens.zero_monomial())
        for _ in range(abs(n)):
            out = self.mul(out, base)
        return out

    def to_pair(self, terms: Sequence[tuple[int, int, _Image]]) -> tuple[Element, Element]:
        """``sum c Q^k img`` as ``(D, N)`` with the sum equal to ``D^{-1} N``."""
        den = None
        scaled = []
        for c, k, img in terms:
            g = img.g * (self.Q ** k if k >= 0 else self.K.one / self.Q ** (-k)) * c
            scaled.append((g, img.vec))
            den = g.denom if den is None else den.lcm(g.denom)
        if den is None:
            return Element.one(self.gens), Element.zero(self.gens)
        D = self._element_of(den, self.gens.zero_monomial())
        N = Element.zero(self.gens)
        for g, vec in scaled:
            h = self.K(den) * g
            if h.denom != 1:
                raise ArithmeticError("common denominator failed to clear")
            N = N + self._element_of(h.numer, vec)
        return D, N

    def _element_of(self, poly, vec: Monomial) -> Element:
        """``poly(Q, U) * normal(vec)``."""
        out = Element.zero(self.gens)
        base = Element.monomial(self.gens, vec)
        for (a, b), c in poly.items():
            u = Element.monomial(self.gens, tuple(b * x for x in self.diag), a, int(c))
            out = out + u * base
        return out


def phi_images(ctx: FlipContext) -> dict[str, _Image]:
    """Images of the slot squares ``Z_r^2`` for the roles ``j k l m`` and of ``X_i``."""
    alg = _PhiAlgebra(ctx)
    K, Q, W = alg.K, alg.Q, alg.W
    gens = alg.gens

    def square(role: str) -> Monomial:
        return gens.unit_vector(ctx.post[role], 2)

    grow = 1 + Q ** 4 * W
    shrink = K.one / (1 + Q ** 4 / W)
    return {
        "j": _Image(K(grow), square("j")),
        "l": _Image(K(grow), square("l")),
        "k": _Image(shrink, square("k")),
        "m": _Image(shrink, square("m")),
        "i": _Image(K.one, tuple(-x for x in alg.diag)),
    }


def _phi_monomial(alg: _PhiAlgebra, images: dict[str, _Image], vec: Monomial) -> tuple[int, _Image]:
    """``normal(vec) -> Q^k * image`` for an even monomial of the pre-flip algebra."""
    ctx = alg.ctx
    gens = ctx.before.gens
    pre_idx = {r: gens.slot_index(s) for r, s in ctx.pre.items()}
    if vec[pre_idx["i1"]] != vec[pre_idx["i2"]] or vec[pre_idx["i1"]] % 2:
        raise PhiDomainError("diagonal exponents must agree and be even")
    pieces: list[tuple[Monomial, _Image]] = []
    outer = list(vec)
    for r in ("i1", "i2", "j", "k", "l", "m"):
        outer[pre_idx[r]] = 0
    outer_t = tuple(outer)
    if any(outer_t):
        # outer slots keep their positions; the post generator set has the same slots
        pieces.append((outer_t, _Image(alg.K.one, outer_t)))
    e = vec[pre_idx["i1"]] // 2
    if e:
        v = [0] * gens.size
        v[pre_idx["i1"]] = v[pre_idx["i2"]] = 2 * e
        pieces.append((tuple(v), alg.power(images["i"], e)))
    for r in ("j", "k", "l", "m"):
        n = vec[pre_idx[r]]
        if n % 2:
            raise PhiDomainError(f"odd exponent on side {r}")
        if n:
            pieces.append((gens.unit_vector(ctx.pre[r], n), alg.power(images[r], n // 2)))
    # normal(vec) = Q^{-x} * product of the pieces' normal monomials
    prod = Element.one(gens)
    img = _Image(alg.K.one, alg.gens.zero_monomial())
    for v, im in pieces:
        prod = prod * Element.monomial(gens, v)
        img = alg.mul(img, im)
    m, x, _ = prod.single_term() if not prod.is_zero() else (vec, 0, 1)
    assert m == vec
    return -x, img


def phi_pair(e: Element, ctx: FlipContext) -> tuple[Element, Element]:
    """``phi(e) = D^{-1} N`` with ``D`` a polynomial in the post-flip diagonal."""
    alg = _PhiAlgebra(ctx)
    images = phi_images(ctx)
    terms = []
    for (m, k), c in e.terms.items():
        x, img = _phi_monomial(alg, images, m)
        terms.append((c, k + x, img))
    return alg.to_pair(terms)


def _as_words(D: Element, N: Element, invert: bool) -> WordSum:
    gens = N.gens
    one = Element.one(gens)
    if invert:
        factors = [InvPoly(N)] + ([] if D == one else [Poly(D)])
    else:
        factors = ([] if D == one else [InvPoly(D)]) + [Poly(N)]
    return WordSum.product(gens, factors)


def phi(x: Element | WordSum, ctx: FlipContext) -> WordSum:
    """The flip isomorphism on an even element or word sum."""
    _require_flip(ctx)
    gens = ctx.after.gens
    if isinstance(x, Element):
        return _as_words(*phi_pair(x, ctx), invert=False)
    out = WordSum.zero(gens)
    for w in normalize(x).words:
        acc = WordSum.product(gens, [], w.scalar)
        for f in w.factors:
            acc = acc * _as_words(*phi_pair(f.core, ctx), invert=isinstance(f, InvPoly))
        out = out + acc
    return out


# ---------------------------------------------------------------------------
# Blocks


def _slot_vector(gens: GeneratorSet, slots: Iterable[Slot], exp: int = -1) -> Monomial:
    v = [0] * gens.size
    for s in slots:
        v[gens.slot_index(s)] += exp
    return tuple(v)


def _case_slots(ctx: FlipContext, case: str, which: str) -> list[Slot]:
    roles = dict(ctx.pre if which == "pre" else ctx.post)
    s1, s2 = CASE_SIDES[case]
    a, b = roles[s1], roles[s2]
    if a[0] == b[0]:
        return [a, b]
    return [a, roles["i1"], roles["i2"], b]


def block_element(ctx: FlipContext, case: str) -> Element:
    """The Weyl-ordered inverse word of a passage of type ``case`` before the flip."""
    gens = ctx.before.gens
    return Element.weyl(gens, _slot_vector(gens, _case_slots(ctx, case, "pre")))


def block_image(ctx: FlipContext, case: str) -> WordSum:
    """The replacement of a block of type ``case`` after the flip."""
    gens = ctx.after.gens
    if case in "abcd":
        return WordSum.poly(Element.weyl(gens, _slot_vector(gens, _case_slots(ctx, case, "post"))))
    zi = Element.monomial(gens, _slot_vector(gens, [ctx.post["i1"], ctx.post["i2"]], 1))
    mid = zi + zi.inverse_monomial()
    first, last = CASE_SIDES[case]
    left = Element.generator(gens, ctx.post[first], -1)
    right = Element.generator(gens, ctx.post[last], -1)
    middle = InvPoly(mid) if case == "e" else Poly(mid)
    return WordSum.product(gens, [left, middle, right])


@dataclass(frozen=True)
class Block:
    case: str
    passage: Passage | None
    element: Element     # Weyl-ordered, includes its scalar

    @property
    def scalar(self) -> int:
        """Quarter exponent of the block's coefficient."""
        return self.element.single_term()[1]


def square_arc(ctx: FlipContext, case: str, reverse: bool = False) -> CurvePath:
    """Open arc through the square realizing a passage of type ``case``."""
    slots = _case_slots(ctx, case, "pre")
    arcs = [(slots[k][0], slots[k][1], slots[k + 1][1]) for k in range(0, len(slots), 2)]
    curve = CurvePath(tuple(arcs), closed=False, name=f"square-{case}")
    return curve.reversed() if reverse else curve


def blocks_of(curve: CurvePath, ctx: FlipContext) -> list[Block]:
    gens = ctx.before.gens
    out = []
    for p in passages(curve, ctx):
        el = Element.weyl(gens, _slot_vector(gens, p.slots))
        out.append(Block(p.case, p, el))
    return out


def block_decompose(t: Element, curve: CurvePath, ctx: FlipContext) -> tuple[list[Block], Element]:
    """``t = B_1 ... B_r R`` with blocks in curve order and ``R`` even on the square."""
    _require_flip(ctx)
    blocks = blocks_of(curve, ctx)
    rest = t
    for b in blocks:
        rest = b.element.inverse_monomial() * rest
    _check_even(rest, ctx)
    return blocks, rest


def _check_even(e: Element, ctx: FlipContext) -> None:
    gens = ctx.before.gens
    idx = {r: gens.slot_index(s) for r, s in ctx.pre.items()}
    for m in e.monomials():
        if m[idx["i1"]] != m[idx["i2"]] or any(m[idx[r]] % 2 for r in idx):
            raise NotAlphaOdd("remainder is not even on the flip square")


# ---------------------------------------------------------------------------
# Theta


def _theta_word_head(head: Element, blocks: list[Block], ctx: FlipContext) -> WordSum:
    rest = head
    for b in blocks:
        rest = b.element.inverse_monomial() * rest
    try:
        _check_even(rest, ctx)
    except NotAlphaOdd:
        raise
    gens = ctx.after.gens
    out = WordSum.one(gens)
    for b in blocks:
        out = out * block_image(ctx, b.case)
    return out * phi(rest, ctx)


def theta_flip(t: Element | WordSum, curve: CurvePath, ctx: FlipContext,
               simplify_result: bool = True) -> Element | WordSum:
    """Image of an element that is odd for ``curve`` under one diagonal exchange."""
    _require_flip(ctx)
    blocks = blocks_of(curve, ctx)
    gens = ctx.after.gens
    if isinstance(t, Element):
        out = _theta_word_head(t, blocks, ctx)
    else:
        out = WordSum.zero(gens)
        for w in normalize(t).words:
            factors = list(w.factors)
            head = Element.scalar(ctx.before.gens, w.scalar)
            if factors and isinstance(factors[0], Poly):
                head = head * factors.pop(0).core
            acc = _theta_word_head(head, blocks, ctx)
            for f in factors:
                acc = acc * _as_words(*phi_pair(f.core, ctx), invert=isinstance(f, InvPoly))
            out = out + acc
    return simplify(out) if simplify_result else out


def relabel(x: Element | WordSum, move: Reindex) -> Element | WordSum:
    """Apply a reindexing: Weyl-ordered monomials go to Weyl-ordered monomials."""
    smap = move.slots()
    gens = move.target.gens

    def vec_map(m: Monomial, src: GeneratorSet) -> Monomial:
        v = [0] * gens.size
        for i, e in enumerate(m):
            if e:
                v[gens.slot_index(smap[src.slot(i)])] += e
        return tuple(v)

    def el(e: Element) -> Element:
        out: dict[tuple[Monomial, int], int] = {}
        for (m, k), c in e.terms.items():
            nm = vec_map(m, e.gens)
            key = (nm, k - weyl_exponent(e.gens, m) + weyl_exponent(gens, nm))
            out[key] = out.get(key, 0) + c
        return Element(gens, out)

    if isinstance(x, Element):
        return el(x)
    words = []
    for w in x.words:
        words.append(type(w)(w.scalar, tuple(type(f)(el(f.core)) for f in w.factors)))
    return WordSum(gens, tuple(words))


# role in the flip-back context -> role in the original context
_BACK_ROLES = {"j": "m", "k": "j", "l": "k", "m": "l", "i1": "i2", "i2": "i1"}


def inverse_context(ctx: FlipContext) -> tuple[FlipContext, Reindex]:
    """Flip back across the same edge, plus the reindexing onto the original slots.

    Flipping twice swaps the two square triangles; every other slot stays put.
    """
    _require_flip(ctx)
    back, ctx2 = diagonal_exchange(ctx.after, ctx.edge)
    smap = {(t, p): (t, p) for t in range(len(back.triangles)) for p in range(3)}
    for r, orig in _BACK_ROLES.items():
        smap[ctx2.post[r]] = ctx.pre[orig]
    for src, dst in smap.items():
        if back.edge(src) != ctx.before.edge(dst):
            raise TriangulationError("flip-back slot map does not match edges")
    emap = tuple((e, e) for e in range(1, back.edge_count + 1))
    return ctx2, Reindex(emap, tuple(sorted(smap.items())), ctx.before)


def theta_inverse(t: Element | WordSum, curve: CurvePath, ctx: FlipContext) -> Element | WordSum:
    """The inverse map, from the post-flip triangulation back to the original one."""
    ctx2, move = inverse_context(ctx)
    return relabel(theta_flip(t, curve, ctx2), move)


@dataclass
class PathStep:
    move: Move
    tri: Triangulation
    curve: CurvePath
    value: Element | WordSum


def theta_path(t: Element | WordSum, curve: CurvePath, tri: Triangulation,
               moves: Sequence[Move]) -> tuple[Element | WordSum, list[PathStep]]:
    """Compose single-flip maps and reindexings along ``moves``."""
    steps: list[PathStep] = []
    cur, cur_curve, cur_tri = t, curve, tri
    for mv in moves:
        if isinstance(mv, DiagonalExchange):
            new_tri, ctx = diagonal_exchange(cur_tri, mv.edge)
            cur = theta_flip(cur, cur_curve, ctx)
            cur_curve = transport_curve(cur_curve, ctx)
            cur_tri = new_tri
        else:
            cur = relabel(cur, mv)
            cur_curve = relabel_curve(cur_curve, mv.slots())
            cur_tri = mv.target
        steps.append(PathStep(mv, cur_tri, cur_curve, cur))
    return cur, steps


# ---------------------------------------------------------------------------
# Checks


def relation_defects(ctx: FlipContext) -> list[tuple[str, str]]:
    """Pairs of square generators whose ``phi`` images break the commutation relation."""
    from .division import compare

    return [(x, y) for x, y, lhs, rhs in relation_sides(ctx)
            if not compare(lhs, rhs, mode="exact").equal]


def relation_sides(ctx: FlipContext) -> list[tuple[str, str, WordSum, WordSum]]:
    """``phi(a) phi(b)`` and ``q^c phi(b) phi(a)`` for each pair of square generators."""
    gens = ctx.before.gens
    pieces: dict[str, Element] = {}
    for r in ("j", "k", "l", "m"):
        pieces[r] = Element.generator(gens, ctx.pre[r], 2)
    pieces["i"] = Element.monomial(gens, _slot_vector(gens, [ctx.pre["i1"], ctx.pre["i2"]], 2))
    # outer slots of the sides
    for r in ("j", "k", "l", "m"):
        other = ctx.before.partner(ctx.pre[r])
        if other is not None and other[0] not in (ctx.t1, ctx.t2):
            pieces[f"{r}'"] = Element.generator(gens, other, 2)
    out = []
    images = {r: phi(p, ctx) for r, p in pieces.items()}
    for x, y in itertools.combinations(sorted(pieces), 2):
        c = commutation_exponent(gens, pieces[x].monomials()[0], pieces[y].monomials()[0])
        out.append((x, y, images[x] * images[y], (images[y] * images[x]) * QCoeff.q(c)))
    return out


def theta_square_holds(t: Element, curve: CurvePath, ctx: FlipContext, mode: str = "exact"):
    """Compare ``theta(t)^2`` with ``phi(t^2)``."""
    from .division import compare

    img = as_wordsum(theta_flip(t, curve, ctx))
    return compare(img * img, phi(t * t, ctx), mode=mode)


def skew_exponents(ctx: FlipContext, c1: str, c2: str) -> tuple[int, bool]:
    """Commutation exponent of two blocks and whether their images share it."""
    from .division import compare

    b1, b2 = block_element(ctx, c1), block_element(ctx, c2)
    c = commutation_exponent(ctx.before.gens, b1.monomials()[0], b2.monomials()[0])
    h1, h2 = block_image(ctx, c1), block_image(ctx, c2)
    ok = compare(h1 * h2, (h2 * h1) * QCoeff.q(c), mode="exact").equal
    return c, ok


def random_even_factor(ctx: FlipContext, rng: random.Random, max_terms: int = 3) -> Element:
    """Random element with even exponents on the square's sides and diagonal."""
    gens = ctx.before.gens
    idx = {r: gens.slot_index(s) for r, s in ctx.pre.items()}
    out = Element.zero(gens)
    for _ in range(rng.randint(1, max_terms)):
        v = [rng.randint(-1, 1) for _ in range(gens.size)]
        for r in ("j", "k", "l", "m"):
            v[idx[r]] = 2 * rng.randint(-1, 1)
        v[idx["i1"]] = v[idx["i2"]] = 2 * rng.randint(-1, 1)
        out = out + Element.monomial(gens, v, rng.randint(-4, 4), rng.choice([1, -1, 2]))
    return out


def random_odd_element(ctx: FlipContext, rng: random.Random) -> tuple[Element, CurvePath]:
    """A block times a random even factor, with an arc it is odd for."""
    case = rng.choice(CASES)
    arc = square_arc(ctx, case, reverse=rng.random() < 0.5)
    return block_element(ctx, case) * random_even_factor(ctx, rng), arc


def identity_pairs(ctx: FlipContext) -> dict[str, tuple[Element, Element, CurvePath]]:
    """The six sums of a block with its inverse (plus a third term for ``e``, ``f``).

    Each entry is ``(source, expected image, arc)``.
    """
    pre_g, post_g = ctx.before.gens, ctx.after.gens

    def w(gens, roles_map, spec: dict[str, int]) -> Element:
        v = [0] * gens.size
        for r, e in spec.items():
            if r == "i":
                v[gens.slot_index(roles_map["i1"])] += e
                v[gens.slot_index(roles_map["i2"])] += e
            else:
                v[gens.slot_index(roles_map[r])] += e
        return Element.weyl(gens, v)

    def pm(gens, roles_map, roles: str) -> Element:
        return (w(gens, roles_map, {r: 1 for r in roles})
                + w(gens, roles_map, {r: -1 for r in roles}))

    out = {}
    pre, post = ctx.pre, ctx.post
    out["e"] = (
        w(pre_g, pre, {"j": 1, "i": 1, "l": 1}) + w(pre_g, pre, {"j": -1, "i": 1, "l": -1})
        + w(pre_g, pre, {"j": -1, "i": -1, "l": -1}),
        w(post_g, post, {"j": 1, "i": 1, "l": 1}) + w(post_g, post, {"j": 1, "i": -1, "l": 1})
        + w(post_g, post, {"j": -1, "i": -1, "l": -1}),
        square_arc(ctx, "e"))
    out["f"] = (
        w(pre_g, pre, {"k": 1, "i": 1, "m": 1}) + w(pre_g, pre, {"k": 1, "i": -1, "m": 1})
        + w(pre_g, pre, {"k": -1, "i": -1, "m": -1}),
        w(post_g, post, {"k": 1, "i": 1, "m": 1}) + w(post_g, post, {"k": -1, "i": 1, "m": -1})
        + w(post_g, post, {"k": -1, "i": -1, "m": -1}),
        square_arc(ctx, "f"))
    out["a"] = (pm(pre_g, pre, "jk"), pm(post_g, post, "jik"), square_arc(ctx, "a"))
    out["b"] = (pm(pre_g, pre, "kil"), pm(post_g, post, "kl"), square_arc(ctx, "b"))
    out["d"] = (pm(pre_g, pre, "jim"), pm(post_g, post, "jm"), square_arc(ctx, "d"))
    out["c"] = (pm(pre_g, pre, "lm"), pm(post_g, post, "lim"), square_arc(ctx, "c"))
    return out


# ---------------------------------------------------------------------------
# Pentagon


def arc_element(curve: CurvePath, tri: Triangulation) -> Element:
    """Weyl-ordered product of the inverse generators at every slot the curve passes."""
    gens = tri.gens
    return Element.weyl(gens, _slot_vector(gens, curve.crossing_slots(tri)))


def curve_order_exponent(x: Element | WordSum, curve: CurvePath, tri: Triangulation) -> int | None:
    """``k`` with ``x = q^{k/4}`` times the inverse generators in curve order, if that holds."""
    if not isinstance(x, Element) or not x.is_monomial():
        return None
    m, k, c = x.single_term()
    word = Element.word(tri.gens, [(s, -1) for s in curve.crossing_slots(tri)])
    m2, k2, _ = word.single_term()
    if m != m2 or c != 1:
        return None
    return k - k2


@dataclass
class ChainLink:
    stage: int
    slots: int
    exponent: int | None      # curve-order exponent when the value is one monomial
    value: Element | WordSum


@dataclass
class PentagonArc:
    arc: CurvePath
    forward: list[ChainLink]     # stages 0, 1, 2
    backward: list[ChainLink]    # stages 0, 4, 3, 2
    meet: bool
    cycle: bool
    curves: list[CurvePath]      # the arc at every stage


@dataclass
class PentagonReport:
    x: int
    y: int
    stages: list[Triangulation]
    arcs: dict[str, PentagonArc]

    @property
    def ok(self) -> bool:
        return all(a.meet and a.cycle for a in self.arcs.values())


def pentagon_arcs(tri: Triangulation, x: int, y: int) -> list[CurvePath]:
    """Every open arc with both ends on pentagon sides that crosses only ``x`` and ``y``."""
    pent = [t for t, tr in enumerate(tri.triangles) if x in tr or y in tr]
    out = []
    for t in pent:
        for pin in range(3):
            if tri.triangles[t][pin] in (x, y):
                continue
            stack = [((t, pin), [])]
            while stack:
                (tt, pi), acc = stack.pop()
                for po in range(3):
                    if po == pi:
                        continue
                    arcs = acc + [(tt, pi, po)]
                    if tri.triangles[tt][po] in (x, y):
                        stack.append((tri.partner((tt, po)), arcs))
                    else:
                        out.append(CurvePath(tuple(arcs), False))
    return out


def _pentagon_closure(stages: list[Triangulation], ctxs: list[FlipContext], x: int, y: int,
                      arcs: Sequence[CurvePath]) -> Reindex:
    """Reindexing from the last stage onto the first that swaps ``x`` and ``y`` and fixes the arcs."""
    first, last = stages[0], stages[-1]
    emap = {e: e for e in range(1, first.edge_count + 1)}
    emap[x], emap[y] = y, x
    for smap in isomorphisms(last, first, emap):
        ok = True
        for a in arcs:
            cur = a
            for c in ctxs:
                cur = transport_curve(cur, c)
            if relabel_curve(cur, smap).arcs != a.arcs:
                ok = False
                break
        if ok:
            return Reindex(tuple(sorted(emap.items())), tuple(sorted(smap.items())), first)
    raise TriangulationError("five flips do not return to the start with x and y swapped")


def _inverse_reindex(mv: Reindex, source: Triangulation) -> Reindex:
    return Reindex(tuple(sorted((b, a) for a, b in mv.edge_map)),
                   tuple(sorted((b, a) for a, b in mv.slot_map)), source)


def _equal(a: Element | WordSum, b: Element | WordSum) -> bool:
    from .division import Verdict, compare

    if isinstance(a, Element) and isinstance(b, Element):
        return a == b
    return compare(a, b, mode="exact").verdict is Verdict.EXACT_EQUAL


def verify_pentagon(tri: Triangulation, x: int, y: int,
                    named: dict[str, CurvePath] | None = None) -> PentagonReport:
    """Five alternating flips of ``x`` and ``y`` compose to the identity on every pentagon arc.

    Each arc's element is carried forward through the first two flips and
    backward through the last three; the two chains must meet at the middle
    stage.  Arcs in ``named`` are reported under their names.
    """
    stages = [tri]
    ctxs: list[FlipContext] = []
    for e in (x, y, x, y, x):
        new, ctx = diagonal_exchange(stages[-1], e)
        _require_flip(ctx)
        stages.append(new)
        ctxs.append(ctx)
    arcs = pentagon_arcs(tri, x, y)
    closing = _pentagon_closure(stages, ctxs, x, y, arcs)
    opening = _inverse_reindex(closing, stages[5])
    labels = {c.arcs: n for n, c in (named or {}).items()}
    report: dict[str, PentagonArc] = {}
    for k, arc in enumerate(arcs):
        curves = [arc]
        for c in ctxs:
            curves.append(transport_curve(curves[-1], c))
        start = arc_element(arc, tri)

        def link(stage: int, value: Element | WordSum) -> ChainLink:
            return ChainLink(stage, len(curves[stage].crossing_slots(stages[stage])),
                             curve_order_exponent(value, curves[stage], stages[stage]), value)

        value = start
        forward = [link(0, value)]
        values = [value]
        for i, c in enumerate(ctxs):
            value = theta_flip(value, curves[i], c)
            values.append(value)
            if i < 2:
                forward.append(link(i + 1, value))
        cycle = _equal(relabel(values[5], closing), start)
        back = relabel(start, opening)
        backward = [link(0, start)]
        for i in (4, 3, 2):
            back = theta_inverse(back, curves[i + 1], ctxs[i])
            backward.append(link(i, back))
        meet = _equal(back, forward[-1].value)
        report[labels.get(arc.arcs, f"arc-{k}")] = PentagonArc(arc, forward, backward, meet, cycle,
                                                                    curves)
    return PentagonReport(x, y, stages, report)


def crossing_reference_forms(arc: PentagonArc, stages: Sequence[Triangulation]) -> dict[int, bool]:
    """Closed forms of the chain values for an arc crossing one diagonal of the pentagon.

    With ``A`` and ``B`` the inner edges in curve order and ``s, t`` the end
    slots, the values at stages 4, 2 and 3 are
    ``Z_s^{-1} (Z_A + Z_A^{-1})^{-1} Z_t^{-1}``,
    ``q^{-1/4} Z_s^{-1} (Z_A + Z_A^{-1})^{-1} Z_B^{-1} Z_t^{-1}`` and
    ``q^{-1/4} Z_s^{-1} Z_A^{-1} Z_B^{-1} (1 + Z_B^{-2}(1 + q Z_A^{-2}))^{-1} Z_t^{-1}``.
    """
    values = {l.stage: l.value for l in arc.backward}
    curves = arc.curves
    out = {}
    for stage in (4, 2, 3):
        tri = stages[stage]
        gens = tri.gens
        slots = curves[stage].crossing_slots(tri)
        if len(slots) != (4 if stage == 4 else 6):
            out[stage] = False
            continue

        def z(s: Slot, e: int = -1) -> Element:
            return Element.generator(gens, s, e)

        first, last = z(slots[0]), z(slots[-1])
        A = z(slots[1], 1) * z(slots[2], 1)
        Ainv = A.inverse_monomial()
        if stage == 4:
            want = WordSum.product(gens, [first, InvPoly(A + Ainv), last])
        else:
            B = z(slots[3], 1) * z(slots[4], 1)
            Binv = B.inverse_monomial()
            if stage == 2:
                want = WordSum.product(gens, [first, InvPoly(A + Ainv), Binv, last], QCoeff.q(-1))
            else:
                one = Element.one(gens)
                inner = one + Binv * Binv * (one + (Ainv * Ainv).shift(4))
                want = WordSum.product(gens, [first, Ainv, Binv, InvPoly(inner), last],
                                       QCoeff.q(-1))
        out[stage] = _equal(values[stage], want)
    return out


# ---------------------------------------------------------------------------
# Relations among moves


def distant_pairs(tri: Triangulation) -> list[tuple[int, int]]:
    """Flippable edge pairs that share no triangle."""
    flips = [e for e in tri.interior_edges() if not tri.is_self_folded(e)]
    return [(e, f) for i, e in enumerate(flips) for f in flips[i + 1:]
            if not any(e in t and f in t for t in tri.triangles)]


def edge_relabeling(tri: Triangulation, perm: dict[int, int]) -> Reindex:
    """Reindexing that renames edges by ``perm`` and keeps every slot in place."""
    from .surface import relabel_triangulation

    target = relabel_triangulation(tri, perm)
    slots = tuple(((t, p), (t, p)) for t in range(len(tri.triangles)) for p in range(3))
    return Reindex(tuple(sorted(perm.items())), slots, target)


def verify_penner_moves(t: Element | WordSum, curve: CurvePath, tri: Triangulation,
                        witnesses: list | None = None) -> dict[str, bool | None]:
    """Check that the coordinate change respects the relations among moves.

    ``t`` must be odd for ``curve``.  Entries are None when ``tri`` offers no
    instance of the relation.  Every compared pair is appended to ``witnesses``
    as ``(relation, lhs, rhs)`` when a list is given.
    """
    out: dict[str, bool | None] = {}

    def _same(a, b, relation):
        if witnesses is not None:
            witnesses.append((relation, a, b))
        return _equal(a, b)

    flips = [e for e in tri.interior_edges() if not tri.is_self_folded(e)]
    # flipping twice is the identity
    ok = True
    for e in flips:
        _, ctx = diagonal_exchange(tri, e)
        there = theta_flip(t, curve, ctx)
        ok &= _same(theta_inverse(there, transport_curve(curve, ctx), ctx), t, "reflexivity")
    out["reflexivity"] = ok
    # flips of edges in different triangles commute
    pairs = distant_pairs(tri)
    ok = True
    for e, f in pairs:
        vals = []
        for a, b in ((e, f), (f, e)):
            mid, c1 = diagonal_exchange(tri, a)
            end, c2 = diagonal_exchange(mid, b)
            v = theta_flip(theta_flip(t, curve, c1), transport_curve(curve, c1), c2)
            vals.append((end.triangles, v))
        ok &= vals[0][0] == vals[1][0] and _same(vals[0][1], vals[1][1], "distant commutativity")
    out["distant commutativity"] = ok if pairs else None
    # renaming edges commutes with flips
    n = tri.edge_count
    perm = {e: (e % n) + 1 for e in range(1, n + 1)}
    move = edge_relabeling(tri, perm)
    ok = True
    for e in flips:
        _, ctx = diagonal_exchange(tri, e)
        lhs = theta_flip(t, curve, ctx)
        _, ctx2 = diagonal_exchange(move.target, perm[e])
        rhs = theta_flip(relabel(t, move), relabel_curve(curve, move.slots()), ctx2)
        after = edge_relabeling(ctx.after, perm)
        ok &= (after.target.triangles == ctx2.after.triangles
               and _same(relabel(lhs, after), rhs, "reindexing"))
    out["reindexing"] = ok
    # a path is the composite of its moves
    if flips:
        path = [DiagonalExchange(flips[0]), move_after(tri, flips[0], perm)]
        value, _ = theta_path(t, curve, tri, path)
        _, ctx = diagonal_exchange(tri, flips[0])
        step = relabel(theta_flip(t, curve, ctx), path[1])
        out["composition"] = _same(value, step, "composition")
    else:
        out["composition"] = None
    return out


def move_after(tri: Triangulation, edge: int, perm: dict[int, int]) -> Reindex:
    new, _ = diagonal_exchange(tri, edge)
    return edge_relabeling(new, perm)


__all__ = [
    "CASES", "CASE_SIDES", "Block", "NotAlphaOdd", "PhiDomainError", "PathStep",
    "phi_images", "phi_pair", "phi", "block_element", "block_image", "square_arc",
    "blocks_of", "block_decompose", "theta_flip", "relabel", "inverse_context",
    "theta_inverse", "theta_path", "relation_defects", "relation_sides", "theta_square_holds",
    "skew_exponents", "identity_pairs", "arc_element", "curve_order_exponent", "ChainLink",
    "PentagonArc", "PentagonReport", "pentagon_arcs", "verify_pentagon",
    "crossing_reference_forms", "random_even_factor", "random_odd_element", "distant_pairs", "edge_relabeling", "verify_penner_moves",
]
