"""Words of polynomial and inverse-polynomial factors, and deciding their equality.

Two layers live here.

* The syntactic layer: :class:`Word` and :class:`WordSum` with :func:`normalize`,
  which pushes monomials to the left, unit-normalizes denominator cores,
  cancels adjacent ``F F^{-1}`` pairs, multiplies out adjacent polynomials and
  merges words with equal tails.

* The exact layer: :class:`EvenFraction`.  When every denominator core is a
  unit monomial times a Laurent polynomial in at most two *core monomials*
  ``U`` and ``V`` (even exponent vectors, typically squared edge generators),
  an element is written as ``sum_rep  rep * F_rep(U, V)`` with ``rep`` a
  canonical coset representative of the core lattice and ``F_rep`` in the
  fraction field of the quantum plane ``U V = Q^s V U`` (``Q = q^{1/4}``).
  For ``s = 0`` that field is a commutative rational function field; for
  ``s != 0`` it is modelled by left fractions ``D^{-1} N`` over the skew
  Laurent ring ``K(Q, V)[U^{±1}; V -> Q^s V]``.  Equality there is decidable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sympy import ZZ
from sympy.polys.fields import field as sympy_field

from .qalg import (
    Element, GeneratorSet, Monomial, QCoeff, add_monomials, commutation_exponent,
    neg_monomial, reorder_exponent,
)


class ExactTierStalled(RuntimeError):
    """The exact engine cannot represent the expression (core lattice too large)."""


# ---------------------------------------------------------------------------
# Factors and words


@dataclass(frozen=True)
class Poly:
    core: Element

    def render(self) -> str:
        return f"({self.core.render()})"


@dataclass(frozen=True)
class InvPoly:
    core: Element

    def __post_init__(self) -> None:
        if self.core.is_zero():
            raise ZeroDivisionError("inverse of zero")

    def render(self) -> str:
        return f"({self.core.render()})^-1"


Factor = Poly | InvPoly


@dataclass(frozen=True)
class Word:
    scalar: QCoeff
    factors: tuple[Factor, ...] = ()

    def inverse_count(self) -> int:
        return sum(isinstance(f, InvPoly) for f in self.factors)

    def render(self) -> str:
        body = " ".join(f.render() for f in self.factors)
        s = self.scalar.render()
        if len(self.scalar.terms) > 1:
            s = f"({s})"
        if not body:
            return s
        return body if s == "1" else f"{s} {body}"


@dataclass(frozen=True)
class WordSum:
    gens: GeneratorSet
    words: tuple[Word, ...] = ()

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, gens: GeneratorSet) -> "WordSum":
        return cls(gens)

    @classmethod
    def one(cls, gens: GeneratorSet) -> "WordSum":
        return cls(gens, (Word(QCoeff.one()),))

    @classmethod
    def poly(cls, e: Element) -> "WordSum":
        if e.is_zero():
            return cls(e.gens)
        return cls(e.gens, (Word(QCoeff.one(), (Poly(e),)),))

    @classmethod
    def inv(cls, e: Element) -> "WordSum":
        return cls(e.gens, (Word(QCoeff.one(), (InvPoly(e),)),))

    @classmethod
    def product(cls, gens: GeneratorSet, factors: Iterable[Factor | Element],
                scalar: QCoeff | None = None) -> "WordSum":
        fs = tuple(Poly(f) if isinstance(f, Element) else f for f in factors)
        return cls(gens, (Word(scalar or QCoeff.one(), fs),))

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "WordSum") -> "WordSum":
        self.gens.check(other.gens)
        return WordSum(self.gens, self.words + other.words)

    def __neg__(self) -> "WordSum":
        return WordSum(self.gens, tuple(Word(-w.scalar, w.factors) for w in self.words))

    def __sub__(self, other: "WordSum") -> "WordSum":
        return self + (-other)

    def __mul__(self, other: "WordSum | Element | QCoeff | int") -> "WordSum":
        if isinstance(other, int):
            other = QCoeff({0: other})
        if isinstance(other, QCoeff):
            return WordSum(self.gens, tuple(Word(w.scalar * other, w.factors) for w in self.words))
        if isinstance(other, Element):
            other = WordSum.poly(other)
        self.gens.check(other.gens)
        return WordSum(self.gens, tuple(
            Word(a.scalar * b.scalar, a.factors + b.factors)
            for a in self.words for b in other.words))

    def __pow__(self, n: int) -> "WordSum":
        out = WordSum.one(self.gens)
        for _ in range(n):
            out = out * self
        return out

    # queries ------------------------------------------------------------

    def inverse_count(self) -> int:
        return sum(w.inverse_count() for w in self.words)

    def is_polynomial(self) -> bool:
        return all(w.inverse_count() == 0 for w in self.words)

    def to_element(self) -> Element:
        """Multiply out a sum of pure polynomial words."""
        out = Element.zero(self.gens)
        for w in self.words:
            if w.inverse_count():
                raise ValueError("word has inverse factors")
            acc = Element.scalar(self.gens, w.scalar)
            for f in w.factors:
                acc = acc * f.core
            out = out + acc
        return out

    def render(self) -> str:
        if not self.words:
            return "0"
        return " + ".join(w.render() for w in self.words)

    def __len__(self) -> int:
        return len(self.words)


def as_wordsum(x: "WordSum | Element") -> WordSum:
    return x if isinstance(x, WordSum) else WordSum.poly(x)


# ---------------------------------------------------------------------------
# Syntactic normalization


def conjugate_poly_by_monomial(p: Element, m: Monomial) -> Element:
    """The element ``p'`` with ``m p = p' m``."""
    gens = p.gens
    out: dict[tuple[Monomial, int], int] = {}
    for (mono, k), v in p.terms.items():
        key = (mono, k + commutation_exponent(gens, m, mono))
        out[key] = out.get(key, 0) + v
    return Element(gens, out)


def _monomial_of(e: Element) -> Element:
    """Single-term element with coefficient one (drops the scalar)."""
    m, _, _ = e.single_term()
    return Element.monomial(e.gens, m)


def unit_normalize(core: Element) -> tuple[Element, Element]:
    """Split ``core = u * rest`` with ``u`` the lexicographically largest term.

    The split happens only when that term's coefficient is ``±q^{a/4}``; the
    remaining factor then has constant term one.
    """
    coeffs = core.coefficients()
    top = max(coeffs)
    c = coeffs[top]
    if not c.is_unit():
        return Element.one(core.gens), core
    (k, v), = c.terms.items()
    u = Element.monomial(core.gens, top, k, v)
    return u, u.inverse_monomial() * core


@dataclass
class _Item:
    kind: str  # "P" or "I"
    core: Element


def _normalize_word(w: Word, gens: GeneratorSet) -> tuple[Element, tuple[Factor, ...]] | None:
    """Return ``(lead, tail)``: ``lead`` a monomial element, tail starts with a non-monomial."""
    lead = Element.scalar(gens, w.scalar)
    if lead.is_zero():
        return None
    items: list[_Item] = []

    def push_monomial(m: Element, upto: int | None = None) -> None:
        nonlocal lead
        # F_1 ... F_r m = m F_1^m ... F_r^m with F^m = m^{-1} F m
        minv, _, _ = m.single_term()
        for it in items[:upto]:
            it.core = conjugate_poly_by_monomial(it.core, neg_monomial(minv))
        lead = lead * m

    def feed(kind: str, core: Element) -> None:
        if core.is_zero():
            if kind == "I":
                raise ZeroDivisionError("inverse of zero")
            nonlocal lead
            lead = Element.zero(gens)
            return
        if len(core.terms) == 1:
            push_monomial(core if kind == "P" else core.inverse_monomial())
            return
        u, rest = unit_normalize(core)
        if kind == "P":
            # u * rest: push u left, then rest stays
            push_monomial(u)
            items.append(_Item("P", rest))
        else:
            # (u rest)^{-1} = rest^{-1} u^{-1}
            items.append(_Item("I", rest))
            push_monomial(u.inverse_monomial())

    for f in w.factors:
        feed("P" if isinstance(f, Poly) else "I", f.core)
        if lead.is_zero():
            return None

    changed = True
    while changed:
        changed = False
        for k in range(len(items) - 1):
            a, b = items[k], items[k + 1]
            if a.kind == "P" and b.kind == "P":
                prod = a.core * b.core
                del items[k:k + 2]
                u, rest = unit_normalize(prod)
                items.insert(k, _Item("P", rest))
                push_monomial(u, upto=k)
                changed = True
                break
            if a.kind != b.kind and a.core == b.core:
                del items[k:k + 2]
                changed = True
                break
    tail = tuple(Poly(it.core) if it.kind == "P" else InvPoly(it.core) for it in items)
    return lead, tail


def _merge(gens: GeneratorSet, pairs: Iterable[tuple[Element, tuple[Factor, ...]]]) -> list[Word]:
    grouped: dict[tuple[Factor, ...], Element] = {}
    for head, tail in pairs:
        if tail and isinstance(tail[0], Poly):
            head, tail = head * tail[0].core, tail[1:]
        grouped[tail] = grouped.get(tail, Element.zero(gens)) + head
    words = []
    for tail, head in grouped.items():
        if head.is_zero():
            continue
        if len(head.terms) == 1:
            m, k, v = head.single_term()
            scalar = QCoeff({k: v})
            lead = Element.monomial(gens, m)
            factors = tail if lead == Element.one(gens) else (Poly(lead),) + tail
        else:
            scalar = QCoeff.one()
            factors = (Poly(head),) + tail
        words.append(Word(scalar, factors))
    return words


def normalize(ws: WordSum) -> WordSum:
    """Rewrite to the syntactic normal form (idempotent)."""
    gens = ws.gens
    current = ws
    for _ in range(8):
        pairs = []
        for w in current.words:
            r = _normalize_word(w, gens)
            if r is not None:
                pairs.append(r)
        words = _merge(gens, pairs)
        words.sort(key=lambda w: w.render())
        nxt = WordSum(gens, tuple(words))
        if nxt == current:
            return nxt
        current = nxt
    return current


# ---------------------------------------------------------------------------
# Fraction fields of the quantum plane


def _shift_dict(poly, weights: Sequence[int]) -> tuple[dict, int]:
    """Exponents ``(a, *rest) -> (a + sum w_i rest_i, *rest)``; also the minimum ``a``."""
    out = {}
    low = 0
    for exps, c in poly.items():
        a = exps[0] + sum(w * e for w, e in zip(weights, exps[1:]))
        out[(a,) + tuple(exps[1:])] = c
        low = min(low, a)
    return out, low


def _rescale_frac(K, f, weights: Sequence[int]):
    """Substitute ``X_i -> Q^{w_i} X_i`` in a fraction over ``(Q, X_1, ...)``."""
    if not any(weights):
        return f
    n, ln = _shift_dict(f.numer, weights)
    d, ld = _shift_dict(f.denom, weights)
    lift = -min(ln, ld)
    R = K.ring
    n = {(e[0] + lift,) + e[1:]: c for e, c in n.items()}
    d = {(e[0] + lift,) + e[1:]: c for e, c in d.items()}
    return K.new(R.from_dict(n), R.from_dict(d))


def _laurent_of(f) -> dict[tuple[int, ...], int] | None:
    """Exponent dict of ``f`` when its denominator is ``±`` a monomial."""
    den = f.denom
    if len(den) != 1:
        return None
    (dexp, dc), = den.items()
    if abs(int(dc)) != 1:
        return None
    sign = int(dc)
    return {tuple(a - b for a, b in zip(e, dexp)): sign * int(c) for e, c in f.numer.items()}


class CommutativePlane:
    """Rational functions in ``Q, U, V`` (commuting ``U``, ``V``)."""

    skew = 0

    def __init__(self) -> None:
        self.K, self.Q, self.U, self.V = sympy_field("Q,U,V", ZZ)

    def zero(self):
        return self.K.zero

    def one(self):
        return self.K.one

    def mono(self, a: int, u: int = 0, v: int = 0, c: int = 1):
        return c * self.Q ** a * self.V ** v * self.U ** u

    def add(self, f, g):
        return f + g

    def neg(self, f):
        return -f

    def mul(self, f, g):
        return f * g

    def inv(self, f):
        if f == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.K.one / f

    def is_zero(self, f) -> bool:
        return f == 0

    def equal(self, f, g) -> bool:
        return f == g

    def rescale(self, f, du: int, dv: int):
        return _rescale_frac(self.K, f, (du, dv))

    def laurent(self, f) -> dict[tuple[int, int, int], int] | None:
        return _laurent_of(f)

    def split(self, f) -> tuple[dict, dict]:
        """Integer term dicts ``(D, N)`` with ``f = D^{-1} N``."""
        return ({tuple(e): int(c) for e, c in f.denom.items()},
                {tuple(e): int(c) for e, c in f.numer.items()})

    def size(self, f) -> int:
        return len(f.numer) + len(f.denom)


@dataclass(frozen=True)
class SkewFrac:
    """Left fraction ``D^{-1} N``; polynomials are ``{u_exponent: K-element}``."""

    den: tuple
    num: tuple


class SkewPlane:
    """Fraction field of ``K(Q, V)[U^{±1}]`` with ``U f(V) = f(Q^s V) U``."""

    def __init__(self, s: int) -> None:
        if s == 0:
            raise ValueError("use CommutativePlane for commuting variables")
        self.skew = s
        self.K, self.Q, self.V = sympy_field("Q,V", ZZ)

    # skew Laurent polynomials -----------------------------------------

    def _tau(self, c, k: int):
        return _rescale_frac(self.K, c, (self.skew * k,)) if k else c

    @staticmethod
    def _clean(p: dict) -> dict:
        return {k: v for k, v in p.items() if v != 0}

    def _padd(self, a: dict, b: dict) -> dict:
        out = dict(a)
        for k, v in b.items():
            out[k] = out[k] + v if k in out else v
        return self._clean(out)

    def _pneg(self, a: dict) -> dict:
        return {k: -v for k, v in a.items()}

    def _pmul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for i, ai in a.items():
            for j, bj in b.items():
                t = ai * self._tau(bj, i)
                out[i + j] = out[i + j] + t if (i + j) in out else t
        return self._clean(out)

    def _lscale(self, c, a: dict) -> dict:
        return self._clean({k: c * v for k, v in a.items()})

    def _lunit(self, k: int, a: dict) -> dict:
        """``U^k * a``."""
        return {i + k: self._tau(v, k) for i, v in a.items()}

    @staticmethod
    def _runit(a: dict, k: int) -> dict:
        """``a * U^k``."""
        return {i + k: v for i, v in a.items()}

    def _rdiv(self, a: dict, b: dict) -> tuple[dict, dict]:
        """``a = quo * b + rem`` with ``deg rem < deg b`` (polynomials)."""
        quo: dict = {}
        db, btop = max(b), b[max(b)]
        rem = dict(a)
        while rem and max(rem) >= db:
            da = max(rem)
            k = da - db
            c = rem[da] / self._tau(btop, k)
            quo[k] = quo[k] + c if k in quo else c
            rem = self._padd(rem, self._pneg(self._pmul({k: c}, b)))
        return self._clean(quo), rem

    def _ldiv(self, a: dict, b: dict) -> tuple[dict, dict]:
        """``a = b * quo + rem`` with ``deg rem < deg b`` (polynomials)."""
        quo: dict = {}
        db, btop = max(b), b[max(b)]
        rem = dict(a)
        while rem and max(rem) >= db:
            da = max(rem)
            k = da - db
            c = self._tau(rem[da] / btop, -db)
            quo[k] = quo[k] + c if k in quo else c
            rem = self._padd(rem, self._pneg(self._pmul(b, {k: c})))
        return self._clean(quo), rem

    def _lnorm(self, a: dict) -> tuple[int, dict]:
        """``a = U^m * a0`` with ``a0`` of lowest exponent zero."""
        m = min(a)
        return m, self._lunit(-m, a)

    def _lclm(self, a: dict, b: dict) -> tuple[dict, dict]:
        """``x, y`` with ``x a = y b`` (a least common left multiple)."""
        ma, a0 = self._lnorm(a)
        mb, b0 = self._lnorm(b)
        r0, r1 = a0, b0
        s0, s1 = {0: self.K.one}, {}
        t0, t1 = {}, {0: self.K.one}
        while r1:
            quo, rem = self._rdiv(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, self._padd(s0, self._pneg(self._pmul(quo, s1)))
            t0, t1 = t1, self._padd(t0, self._pneg(self._pmul(quo, t1)))
        # s1 a0 + t1 b0 = 0, a0 = U^{-ma} a
        x = self._runit(s1, -ma)
        y = self._runit(self._pneg(t1), -mb)
        return x, y

    def _gcld(self, a: dict, b: dict) -> dict:
        r0 = self._runit(a, -min(a))
        r1 = self._runit(b, -min(b)) if b else {}
        while r1:
            _, rem = self._ldiv(r0, r1)
            r0, r1 = r1, rem
            if r1:
                r1 = self._runit(r1, -min(r1))
        return r0

    def _exact_ldiv(self, a: dict, g: dict) -> dict:
        """``a' `` with ``a = g a'``."""
        low = min(a)
        quo, rem = self._ldiv(self._runit(a, -low), g)
        if rem:
            raise ArithmeticError("left division is not exact")
        return self._runit(quo, low)

    # fractions ----------------------------------------------------------

    def _make(self, den: dict, num: dict) -> SkewFrac:
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return SkewFrac(((0, self.K.one),), ())
        if len(den) > 1:
            g = self._gcld(den, num)
            if max(g) > 0:
                den = self._exact_ldiv(den, g)
                num = self._exact_ldiv(num, g)
        m = min(den)
        den, num = self._lunit(-m, den), self._lunit(-m, num)
        lead = self.K.one / den[max(den)]
        den, num = self._lscale(lead, den), self._lscale(lead, num)
        return SkewFrac(tuple(sorted(den.items())), tuple(sorted(num.items())))

    def zero(self) -> SkewFrac:
        return SkewFrac(((0, self.K.one),), ())

    def one(self) -> SkewFrac:
        return SkewFrac(((0, self.K.one),), ((0, self.K.one),))

    def mono(self, a: int, u: int = 0, v: int = 0, c: int = 1) -> SkewFrac:
        return SkewFrac(((0, self.K.one),), ((u, c * self.Q ** a * self.V ** v),))

    def add(self, f: SkewFrac, g: SkewFrac) -> SkewFrac:
        d1, n1, d2, n2 = dict(f.den), dict(f.num), dict(g.den), dict(g.num)
        if not n1:
            return g
        if not n2:
            return f
        if d1 == d2:
            return self._make(d1, self._padd(n1, n2))
        x, y = self._lclm(d1, d2)
        return self._make(self._pmul(x, d1), self._padd(self._pmul(x, n1), self._pmul(y, n2)))

    def neg(self, f: SkewFrac) -> SkewFrac:
        return SkewFrac(f.den, tuple((k, -v) for k, v in f.num))

    def mul(self, f: SkewFrac, g: SkewFrac) -> SkewFrac:
        d1, n1, d2, n2 = dict(f.den), dict(f.num), dict(g.den), dict(g.num)
        if not n1 or not n2:
            return self.zero()
        if d2 == {0: self.K.one}:
            return self._make(d1, self._pmul(n1, n2))
        # n1 d2^{-1} = e^{-1} m  where  e n1 = m d2
        e, m = self._lclm(n1, d2)
        return self._make(self._pmul(e, d1), self._pmul(m, n2))

    def inv(self, f: SkewFrac) -> SkewFrac:
        if not f.num:
            raise ZeroDivisionError("inverse of zero")
        return self._make(dict(f.num), dict(f.den))

    def is_zero(self, f: SkewFrac) -> bool:
        return not f.num

    def equal(self, f: SkewFrac, g: SkewFrac) -> bool:
        return self.is_zero(self.add(f, self.neg(g)))

    def rescale(self, f: SkewFrac, du: int, dv: int) -> SkewFrac:
        def go(p):
            return {i: _rescale_frac(self.K, c, (dv,)) * self.Q ** (du * i) for i, c in p}
        return self._make(go(f.den), go(f.num))

    def laurent(self, f: SkewFrac) -> dict[tuple[int, int, int], int] | None:
        if dict(f.den) != {0: self.K.one}:
            return None
        out: dict[tuple[int, int, int], int] = {}
        for u, c in f.num:
            terms = _laurent_of(c)
            if terms is None:
                return None
            for (a, v), k in terms.items():
                out[(a, u, v)] = k
        return out

    def split(self, f: SkewFrac) -> tuple[dict, dict]:
        den, num = dict(f.den), dict(f.num)
        coeffs = list(den.values()) + list(num.values())
        lcm = coeffs[0].denom
        for c in coeffs[1:]:
            lcm = lcm.lcm(c.denom)
        scale = self.K.new(lcm, self.K.ring.one)

        def terms(p: dict) -> dict:
            out = {}
            for u, c in p.items():
                c = c * scale
                if c.denom != 1:
                    raise ArithmeticError("denominator not cleared")
                for (a, v), k in c.numer.items():
                    out[(a, u, v)] = int(k)
            return out

        return terms(den), terms(num)

    def size(self, f: SkewFrac) -> int:
        return sum(len(c.numer) + len(c.denom) for _, c in f.den + f.num)


Plane = CommutativePlane | SkewPlane


# ---------------------------------------------------------------------------
# Core lattice and even fractions


def _echelon(vectors: Iterable[Sequence[int]]) -> list[list[int]]:
    """Integer row echelon form with positive pivots and reduced entries above."""
    rows = [list(v) for v in vectors if any(v)]
    out: list[list[int]] = []
    if not rows:
        return out
    ncol = len(rows[0])
    for col in range(ncol):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                k = r[col] // piv[col]
                r = [x - k * y for x, y in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, prev in enumerate(out):
            f = prev[col] // piv[col]
            out[k] = [x - f * y for x, y in zip(prev, piv)]
        out.append(piv)
        rows = rest
        if not rows:
            break
    return out


def _pivot(row: Sequence[int]) -> int:
    return next(i for i, x in enumerate(row) if x)


class CoreBasis:
    """A rank <= 2 lattice of even monomials with its fraction field.

    ``U`` is the first basis row and ``V`` the second.
    """

    def __init__(self, gens: GeneratorSet, vectors: Iterable[Sequence[int]]):
        rows = _echelon(vectors)
        if len(rows) > 2:
            raise ExactTierStalled(f"core lattice has rank {len(rows)}")
        self.gens = gens
        self.rows: tuple[Monomial, ...] = tuple(tuple(r) for r in rows)
        self.pivots = tuple(_pivot(r) for r in rows)
        s = commutation_exponent(gens, self.rows[0], self.rows[1]) if len(rows) == 2 else 0
        # U V = Q^s V U, i.e. U f(V) = f(Q^s V) U
        self.plane: Plane = SkewPlane(s) if s else CommutativePlane()
        self._reduce_cache: dict[Monomial, tuple[Monomial, int, int, int]] = {}
        self._power_cache: dict[tuple[int, int], Element] = {}
        self.zero_vec = gens.zero_monomial()

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoreBasis) and self.gens == other.gens and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.gens, self.rows))

    def contains(self, vec: Sequence[int]) -> bool:
        rep = list(vec)
        for row, p in zip(self.rows, self.pivots):
            k = rep[p] // row[p]
            rep = [x - k * y for x, y in zip(rep, row)]
        return not any(rep)

    def _power(self, which: int, k: int) -> Element:
        key = (which, k)
        hit = self._power_cache.get(key)
        if hit is None:
            base = Element.monomial(self.gens, self.rows[which])
            hit = base ** k
            self._power_cache[key] = hit
        return hit

    def field_monomial_element(self, a: int, u: int, v: int) -> Element:
        """``q^{a/4} V^v U^u`` as a normal-ordered element."""
        e = Element.one(self.gens)
        if self.rank > 1 and v:
            e = self._power(1, v)
        if self.rank > 0 and u:
            e = e * self._power(0, u)
        return e.shift(a)

    def reduce(self, vec: Monomial) -> tuple[Monomial, int, int, int]:
        """``(rep, u, v, r)`` with ``normal(vec) = q^{r/4} normal(rep) V^v U^u``."""
        hit = self._reduce_cache.get(vec)
        if hit is not None:
            return hit
        rep = list(vec)
        ks = [0, 0]
        for idx, (row, p) in enumerate(zip(self.rows, self.pivots)):
            k = rep[p] // row[p]
            ks[idx] = k
            rep = [x - k * y for x, y in zip(rep, row)]
        rep_t = tuple(rep)
        prod = Element.monomial(self.gens, rep_t) * self.field_monomial_element(0, ks[0], ks[1])
        m, k, c = prod.single_term()
        assert m == vec and c == 1
        out = (rep_t, ks[0], ks[1], -k)
        self._reduce_cache[vec] = out
        return out


class EvenFraction:
    """``sum_rep normal(rep) * F_rep`` with ``F_rep`` in the basis fraction field."""

    __slots__ = ("basis", "terms")

    def __init__(self, basis: CoreBasis, terms: dict | None = None):
        self.basis = basis
        plane = basis.plane
        self.terms: dict[Monomial, object] = {
            k: v for k, v in (terms or {}).items() if not plane.is_zero(v)}

    @property
    def plane(self) -> Plane:
        return self.basis.plane

    @classmethod
    def from_element(cls, basis: CoreBasis, e: Element) -> "EvenFraction":
        plane = basis.plane
        terms: dict[Monomial, object] = {}
        for (m, k), c in e.terms.items():
            rep, u, v, r = basis.reduce(m)
            f = plane.mono(k + r, u, v, c)
            terms[rep] = plane.add(terms[rep], f) if rep in terms else f
        return cls(basis, terms)

    @classmethod
    def scalar_field(cls, basis: CoreBasis, f) -> "EvenFraction":
        return cls(basis, {basis.zero_vec: f})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "EvenFraction") -> "EvenFraction":
        plane = self.plane
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = plane.add(out[k], v) if k in out else v
        return EvenFraction(self.basis, out)

    def __neg__(self) -> "EvenFraction":
        return EvenFraction(self.basis, {k: self.plane.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other: "EvenFraction") -> "EvenFraction":
        return self + (-other)

    def conjugate_field(self, f, m: Monomial):
        """``m^{-1} f m`` for a field element ``f``."""
        b = self.basis
        du = commutation_exponent(b.gens, b.rows[0], m) if b.rank > 0 else 0
        dv = commutation_exponent(b.gens, b.rows[1], m) if b.rank > 1 else 0
        if not (du or dv):
            return f
        return self.plane.rescale(f, du, dv)

    def __mul__(self, other: "EvenFraction") -> "EvenFraction":
        plane, b = self.plane, self.basis
        out: dict[Monomial, object] = {}
        for r1, f1 in self.terms.items():
            for r2, f2 in other.terms.items():
                rr = reorder_exponent(r1, r2)
                rep, u, v, r = b.reduce(add_monomials(r1, r2))
                f = plane.mul(plane.mul(plane.mono(rr + r, u, v), self.conjugate_field(f1, r2)), f2)
                out[rep] = plane.add(out[rep], f) if rep in out else f
        return EvenFraction(b, out)

    def inverse(self) -> "EvenFraction":
        if len(self.terms) != 1:
            raise ExactTierStalled("cannot invert an element spread over several cosets")
        (rep, f), = self.terms.items()
        mono = Element.monomial(self.basis.gens, rep).inverse_monomial()
        return EvenFraction.scalar_field(self.basis, self.plane.inv(f)) * \
            EvenFraction.from_element(self.basis, mono)

    def to_element(self) -> Element | None:
        """The Laurent polynomial, or None if a denominator survives."""
        b = self.basis
        out = Element.zero(b.gens)
        for rep, f in self.terms.items():
            lt = self.plane.laurent(f)
            if lt is None:
                return None
            base = Element.monomial(b.gens, rep)
            for (a, u, v), c in lt.items():
                out = out + (base * b.field_monomial_element(a, u, v)) * c
        return out

    def _terms_element(self, terms: dict) -> Element:
        b = self.basis
        out = Element.zero(b.gens)
        for (a, u, v), c in terms.items():
            out = out + b.field_monomial_element(a, u, v) * c
        return out

    def to_wordsum(self) -> WordSum:
        b = self.basis
        words = []
        for rep in sorted(self.terms):
            den, num = self.plane.split(self.terms[rep])
            d_el, n_el = self._terms_element(den), self._terms_element(num)
            factors: list[Factor] = []
            if any(rep):
                factors.append(Poly(Element.monomial(b.gens, rep)))
            if d_el != Element.one(b.gens):
                factors.append(InvPoly(d_el))
            factors.append(Poly(n_el))
            words.append(Word(QCoeff.one(), tuple(factors)))
        return normalize(WordSum(b.gens, tuple(words)))

    def size(self) -> int:
        return sum(self.plane.size(f) for f in self.terms.values())

    def rebase(self, basis: CoreBasis) -> "EvenFraction":
        """Re-express over a larger lattice (via the polynomial form)."""
        if basis == self.basis:
            return self
        return wordsum_to_fraction(self.to_wordsum(), basis)


def core_vectors(ws: WordSum) -> list[Monomial]:
    """Difference vectors of every denominator core."""
    vecs = []
    for w in ws.words:
        for f in w.factors:
            if isinstance(f, InvPoly):
                monos = f.core.monomials()
                base = monos[0]
                vecs.extend(tuple(a - b for a, b in zip(m, base)) for m in monos[1:])
    return vecs


def basis_for(*sums: WordSum, extra: Iterable[Sequence[int]] = ()) -> CoreBasis:
    gens = sums[0].gens
    vecs = [v for ws in sums for v in core_vectors(ws)] + [tuple(v) for v in extra]
    return CoreBasis(gens, vecs)


def wordsum_to_fraction(ws: WordSum, basis: CoreBasis | None = None) -> EvenFraction:
    basis = basis or basis_for(ws)
    total = EvenFraction(basis)
    for w in ws.words:
        acc = EvenFraction.from_element(basis, Element.scalar(ws.gens, w.scalar))
        for f in w.factors:
            piece = EvenFraction.from_element(basis, f.core)
            if isinstance(f, InvPoly):
                piece = piece.inverse()
            acc = acc * piece
        total = total + acc
    return total


def simplify(ws: WordSum) -> WordSum | Element:
    """Laurent polynomial if the sum is one; otherwise a reduced word sum."""
    ws = normalize(ws)
    if ws.is_polynomial():
        return ws.to_element()
    try:
        frac = wordsum_to_fraction(ws)
    except ExactTierStalled:
        return ws
    e = frac.to_element()
    return e if e is not None else frac.to_wordsum()


# ---------------------------------------------------------------------------
# Equality


class Verdict(str, enum.Enum):
    EXACT_EQUAL = "ExactEqual"
    NUMERIC_EQUAL = "NumericEqual"
    NOT_EQUAL = "NotEqual"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Comparison:
    verdict: Verdict
    exact: bool | None = None          # None: exact tier not run or stalled
    tier: str = ""                      # which exact step decided
    numeric_deviation: float | None = None
    numeric_runs: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return self.verdict in (Verdict.EXACT_EQUAL, Verdict.NUMERIC_EQUAL)


def _clear_trailing(ws: WordSum) -> WordSum | None:
    """Multiply on the right by a denominator shared by every word's tail."""
    last = None
    for w in ws.words:
        if not w.factors or not isinstance(w.factors[-1], InvPoly):
            return None
        if last is None:
            last = w.factors[-1].core
        elif w.factors[-1].core != last:
            return None
    if last is None:
        return None
    return normalize(WordSum(ws.gens, tuple(Word(w.scalar, w.factors[:-1]) for w in ws.words)))


def exact_difference_is_zero(a: WordSum, b: WordSum) -> tuple[bool | None, str]:
    """Exact tier: ``(is_zero, step)``; ``is_zero`` is None when it stalls."""
    diff = normalize(a - b)
    if not diff.words:
        return True, "normalize"
    if diff.is_polynomial():
        return diff.to_element().is_zero(), "normalize"
    cur = diff
    while not cur.is_polynomial():
        nxt = _clear_trailing(cur)
        if nxt is None or nxt.inverse_count() >= cur.inverse_count():
            break
        cur = nxt
    if cur.is_polynomial():
        return cur.to_element().is_zero(), "denominator-clearing"
    try:
        frac = wordsum_to_fraction(diff)
    except ExactTierStalled:
        return None, "stalled"
    return frac.is_zero(), "fraction-field"


def compare(a: WordSum | Element, b: WordSum | Element, mode: str = "both",
            dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2),
            tolerance: float = 1e-9) -> Comparison:
    """Decide ``a == b`` with the exact tier, the numeric tier, or both."""
    if mode not in ("exact", "numeric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    a, b = as_wordsum(a), as_wordsum(b)
    a.gens.check(b.gens)
    result = Comparison(Verdict.INCONCLUSIVE)
    if mode in ("exact", "both"):
        ok, step = exact_difference_is_zero(a, b)
        result.exact, result.tier = ok, step
        if ok is not None:
            result.verdict = Verdict.EXACT_EQUAL if ok else Verdict.NOT_EQUAL
    if mode in ("numeric", "both"):
        from .repcheck import numeric_deviation

        dev, runs = numeric_deviation(a, b, dims=dims, seeds=seeds)
        result.numeric_deviation, result.numeric_runs = dev, runs
        numeric_ok = dev <= tolerance
        if result.exact is None:
            result.verdict = Verdict.NUMERIC_EQUAL if numeric_ok else Verdict.NOT_EQUAL
        elif result.exact != numeric_ok:
            result.notes.append(
                f"numeric tier disagrees with exact tier (deviation {dev:.3e})")
    return result


def equals(a: WordSum | Element, b: WordSum | Element, mode: str = "both") -> Verdict:
    return compare(a, b, mode).verdict


__all__ = [
    "Poly", "InvPoly", "Word", "WordSum", "Factor", "normalize", "conjugate_poly_by_monomial",
    "unit_normalize", "EvenFraction", "CoreBasis", "CommutativePlane", "SkewPlane",
    "wordsum_to_fraction", "basis_for", "simplify", "Verdict", "Comparison", "compare",
    "equals", "ExactTierStalled",
]

