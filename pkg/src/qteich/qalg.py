"""Exact arithmetic in the quantum torus of triangle generators.

Every triangle ``t`` of a triangulation contributes three generators, one per
side position ``p``; the generator slot index is ``3 * t + p``.  Within one
triangle, consecutive counterclockwise sides satisfy

    Z[t, p] Z[t, p + 1] = q^{1/2} Z[t, p + 1] Z[t, p]

and generators of distinct triangles commute.  All q-exponents are stored as
integer multiples of 1/4, so ``q^{a/4}`` is the integer ``a``.

An :class:`Element` is a sparse map from normal-ordered monomials (exponent
vectors, generators multiplied left to right by slot index) to integer
Laurent polynomials in ``q^{1/4}``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Slot = tuple[int, int]
Monomial = tuple[int, ...]


class GeneratorMismatch(ValueError):
    """Raised when two objects live over different generator sets."""


# ---------------------------------------------------------------------------
# Coefficients


class QCoeff:
    """Integer Laurent polynomial in ``q^{1/4}``.

    Stored as ``{quarter_exponent: coefficient}`` with zero entries removed.

    EXAMPLES::

        >>> QCoeff.q(2) + QCoeff.one()
        1 + q^(1/2)
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, int] | None = None):
        self.terms: dict[int, int] = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def one(cls) -> "QCoeff":
        return cls({0: 1})

    @classmethod
    def zero(cls) -> "QCoeff":
        return cls()

    @classmethod
    def q(cls, quarter: int, coeff: int = 1) -> "QCoeff":
        """The monomial ``coeff * q^{quarter/4}``."""
        return cls({quarter: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        return len(self.terms) == 1 and abs(next(iter(self.terms.values()))) == 1

    def __add__(self, other: "QCoeff") -> "QCoeff":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return QCoeff(out)

    def __neg__(self) -> "QCoeff":
        return QCoeff({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "QCoeff") -> "QCoeff":
        return self + (-other)

    def __mul__(self, other: "QCoeff | int") -> "QCoeff":
        if isinstance(other, int):
            return QCoeff({k: v * other for k, v in self.terms.items()})
        out: dict[int, int] = defaultdict(int)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[k1 + k2] += v1 * v2
        return QCoeff(out)

    __rmul__ = __mul__

    def shift(self, quarter: int) -> "QCoeff":
        """Multiply by ``q^{quarter/4}``."""
        return QCoeff({k + quarter: v for k, v in self.terms.items()})

    def at_one(self) -> int:
        """Specialize ``q = 1``."""
        return sum(self.terms.values())

    def evaluate(self, u: complex) -> complex:
        """Evaluate with ``q^{1/4} = u``."""
        return sum(v * u**k for k, v in self.terms.items())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = QCoeff({0: other})
        return isinstance(other, QCoeff) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return self.render()

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            v = self.terms[k]
            parts.append(_render_scalar(k, v))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_json(self) -> dict[str, int]:
        return {str(k): self.terms[k] for k in sorted(self.terms)}


def _render_qpow(quarter: int) -> str:
    if quarter == 0:
        return ""
    f = Fraction(quarter, 4)
    if f.denominator == 1:
        return "q" if f == 1 else f"q^{f.numerator}"
    return f"q^({f.numerator}/{f.denominator})"


def _render_scalar(quarter: int, coeff: int) -> str:
    qp = _render_qpow(quarter)
    if not qp:
        return str(coeff)
    if coeff == 1:
        return qp
    if coeff == -1:
        return "-" + qp
    return f"{coeff}*{qp}"


# ---------------------------------------------------------------------------
# Generators


@dataclass(frozen=True)
class GeneratorSet:
    """Triangle-slot generators for ``triangle_count`` triangles."""

    triangle_count: int

    @property
    def size(self) -> int:
        return 3 * self.triangle_count

    def slot_index(self, slot: Slot) -> int:
        t, p = slot
        return 3 * t + p

    def slot(self, index: int) -> Slot:
        return divmod(index, 3)

    def c(self, a: int, b: int) -> int:
        """Commutation exponent of two slot indices in quarter units."""
        if a // 3 != b // 3:
            return 0
        d = (b - a) % 3
        return 2 if d == 1 else (-2 if d == 2 else 0)

    def zero_monomial(self) -> Monomial:
        return (0,) * self.size

    def unit_vector(self, slot: Slot, exp: int = 1) -> Monomial:
        v = [0] * self.size
        v[self.slot_index(slot)] = exp
        return tuple(v)

    def check(self, other: "GeneratorSet") -> None:
        if self != other:
            raise GeneratorMismatch(f"generator sets differ: {self} vs {other}")


def commutation_exponent(gens: GeneratorSet, m1: Monomial, m2: Monomial) -> int:
    """Quarter-unit exponent ``c`` with ``m1 m2 = q^{c/4} m2 m1``.

    Bilinear in the exponent vectors.
    """
    if len(m1) != gens.size or len(m2) != gens.size:
        raise GeneratorMismatch("monomial length does not match generator set")
    total = 0
    for base in range(0, gens.size, 3):
        u0, u1, u2 = m1[base], m1[base + 1], m1[base + 2]
        v0, v1, v2 = m2[base], m2[base + 1], m2[base + 2]
        total += u0 * v1 - u1 * v0 + u1 * v2 - u2 * v1 + u2 * v0 - u0 * v2
    return 2 * total


def reorder_exponent(m1: Monomial, m2: Monomial) -> int:
    """Quarter-unit q-power in ``normal(m1) normal(m2) = q^{./4} normal(m1+m2)``."""
    total = 0
    for base in range(0, len(m1), 3):
        u1, u2 = m1[base + 1], m1[base + 2]
        if not (u1 or u2):
            continue
        v0, v1 = m2[base], m2[base + 1]
        total += -u1 * v0 + u2 * v0 - u2 * v1
    return 2 * total


def weyl_exponent(gens: GeneratorSet, vec: Monomial) -> int:
    """Quarter-unit exponent ``W`` with ``[vec] = q^{W/4} normal(vec)``.

    ``[vec]`` is the Weyl-ordered monomial, invariant under permuting factors.
    """
    total = 0
    for base in range(0, gens.size, 3):
        v0, v1, v2 = vec[base], vec[base + 1], vec[base + 2]
        total += v0 * v1 + v1 * v2 - v0 * v2
    return -total


def add_monomials(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def neg_monomial(a: Monomial) -> Monomial:
    return tuple(-x for x in a)


def scale_monomial(a: Monomial, k: int) -> Monomial:
    return tuple(k * x for x in a)


# ---------------------------------------------------------------------------
# Elements


class Element:
    """Sparse sum of normal-ordered monomials with ``Z[q^{±1/4}]`` coefficients.

    Internally a flat dict ``{(monomial, quarter_exponent): int}``.
    """

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms: Mapping[tuple[Monomial, int], int] | None = None):
        self.gens = gens
        self.terms: dict[tuple[Monomial, int], int] = {
            k: v for k, v in (terms or {}).items() if v
        }

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, gens: GeneratorSet) -> "Element":
        return cls(gens)

    @classmethod
    def one(cls, gens: GeneratorSet) -> "Element":
        return cls(gens, {(gens.zero_monomial(), 0): 1})

    @classmethod
    def monomial(cls, gens: GeneratorSet, vec: Sequence[int], quarter: int = 0,
                 coeff: int = 1) -> "Element":
        vec = tuple(vec)
        if len(vec) != gens.size:
            raise GeneratorMismatch("monomial length does not match generator set")
        return cls(gens, {(vec, quarter): coeff})

    @classmethod
    def scalar(cls, gens: GeneratorSet, c: QCoeff | int) -> "Element":
        if isinstance(c, int):
            c = QCoeff({0: c})
        z = gens.zero_monomial()
        return cls(gens, {(z, k): v for k, v in c.terms.items()})

    @classmethod
    def generator(cls, gens: GeneratorSet, slot: Slot, exp: int = 1) -> "Element":
        return cls.monomial(gens, gens.unit_vector(slot, exp))

    @classmethod
    def weyl(cls, gens: GeneratorSet, vec: Sequence[int], coeff: QCoeff | int = 1) -> "Element":
        """Weyl-ordered monomial ``coeff * [vec]``."""
        vec = tuple(vec)
        w = weyl_exponent(gens, vec)
        if isinstance(coeff, int):
            coeff = QCoeff({0: coeff})
        return cls(gens, {(vec, k + w): v for k, v in coeff.terms.items()})

    @classmethod
    def word(cls, gens: GeneratorSet, letters: Iterable[tuple[Slot, int]]) -> "Element":
        """Ordered product of generator powers, e.g. ``[((0,1), -1), ((2,0), 1)]``."""
        out = cls.one(gens)
        for slot, e in letters:
            out = out * cls.generator(gens, slot, e)
        return out

    # structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficients(self) -> dict[Monomial, QCoeff]:
        """Group terms by monomial."""
        grouped: dict[Monomial, dict[int, int]] = defaultdict(dict)
        for (m, k), v in self.terms.items():
            grouped[m][k] = v
        return {m: QCoeff(c) for m, c in grouped.items()}

    def monomials(self) -> list[Monomial]:
        return sorted({m for m, _ in self.terms})

    def is_monomial(self) -> bool:
        """True if the element is ``±q^{a/4}`` times one monomial."""
        return len(self.terms) == 1 and abs(next(iter(self.terms.values()))) == 1

    def single_term(self) -> tuple[Monomial, int, int]:
        """``(monomial, quarter, coeff)`` of a one-term element."""
        if len(self.terms) != 1:
            raise ValueError("element is not a single term")
        (m, k), v = next(iter(self.terms.items()))
        return m, k, v

    def term_count(self) -> int:
        """Sum of absolute integer coefficients over (monomial, q-power) pairs."""
        return sum(abs(v) for v in self.terms.values())

    def support_size(self) -> int:
        return len({m for m, _ in self.terms})

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "Element") -> "Element":
        self.gens.check(other.gens)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Element(self.gens, out)

    def __neg__(self) -> "Element":
        return Element(self.gens, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, other: "Element | QCoeff | int") -> "Element":
        if isinstance(other, int):
            return Element(self.gens, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, QCoeff):
            return self * Element.scalar(self.gens, other)
        return mul(self, other)

    def __rmul__(self, other: "QCoeff | int") -> "Element":
        return self * other

    def __pow__(self, n: int) -> "Element":
        if n < 0:
            return self.inverse_monomial() ** (-n)
        out = Element.one(self.gens)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, quarter: int) -> "Element":
        """Multiply by ``q^{quarter/4}``."""
        return Element(self.gens, {(m, k + quarter): v for (m, k), v in self.terms.items()})

    def inverse_monomial(self) -> "Element":
        """Inverse of a unit ``±q^a Z^v``; raises for anything else."""
        if not self.is_monomial():
            raise ValueError("only monomials are invertible in the quantum torus")
        m, k, v = self.single_term()
        # (q^k Z^m)^{-1} = q^{-k} Z^{-m}: normal(m) normal(-m) = q^r
        r = reorder_exponent(m, neg_monomial(m))
        return Element(self.gens, {(neg_monomial(m), -k - r): v})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Element) and self.gens == other.gens and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.gens, frozenset(self.terms.items())))

    def map_monomials(self, fn) -> "Element":
        """Apply ``fn(monomial) -> monomial`` to every term (no q-corrections)."""
        out: dict[tuple[Monomial, int], int] = defaultdict(int)
        for (m, k), v in self.terms.items():
            out[(fn(m), k)] += v
        return Element(self.gens, out)

    def at_q_one(self) -> dict[Monomial, int]:
        out: dict[Monomial, int] = defaultdict(int)
        for (m, _), v in self.terms.items():
            out[m] += v
        return {m: v for m, v in out.items() if v}

    # rendering ----------------------------------------------------------

    def render(self) -> str:
        """Canonical text form ``q^{a/4} Z[t,s]^{e} ...`` sorted by slot."""
        if not self.terms:
            return "0"
        pieces = []
        for m in self.monomials():
            coeff = self.coefficients()[m]
            gens_txt = " ".join(
                f"Z[{i // 3},{i % 3}]^{{{e}}}" for i, e in enumerate(m) if e
            )
            c_txt = coeff.render()
            if len(coeff.terms) > 1:
                c_txt = f"({c_txt})"
            if not gens_txt:
                pieces.append(c_txt)
            elif c_txt == "1":
                pieces.append(gens_txt)
            elif c_txt == "-1":
                pieces.append("-" + gens_txt)
            else:
                pieces.append(f"{c_txt} {gens_txt}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"Element({self.render()})"

    def to_json(self) -> list[dict]:
        coeffs = self.coefficients()
        return [
            {"monomial": {f"{i // 3},{i % 3}": e for i, e in enumerate(m) if e},
             "coeff": coeffs[m].to_json()}
            for m in self.monomials()
        ]


def mul(a: Element, b: Element) -> Element:
    """Normal-ordered product of two elements."""
    a.gens.check(b.gens)
    out: dict[tuple[Monomial, int], int] = defaultdict(int)
    cache: dict[tuple[Monomial, Monomial], tuple[Monomial, int]] = {}
    for (m1, k1), v1 in a.terms.items():
        for (m2, k2), v2 in b.terms.items():
            key = (m1, m2)
            hit = cache.get(key)
            if hit is None:
                hit = (add_monomials(m1, m2), reorder_exponent(m1, m2))
                cache[key] = hit
            m, r = hit
            out[(m, k1 + k2 + r)] += v1 * v2
    return Element(a.gens, out)


def weyl_coefficient(gens: GeneratorSet, word: Sequence[Slot | tuple[Slot, int]]) -> QCoeff:
    """Weyl ordering coefficient ``q^w`` of an ordered generator word.

    ``w = -(1/8) sum_{j<k} e_j e_k c(s_j, s_k)`` with ``c`` in quarter units,
    so that ``q^w`` times the product is invariant under permuting letters.
    Letters are slots, or ``(slot, exponent)`` pairs.
    """
    letters: list[tuple[int, int]] = []
    for item in word:
        if isinstance(item[0], tuple):
            slot, e = item  # type: ignore[misc]
        else:
            slot, e = item, 1  # type: ignore[assignment]
        letters.append((gens.slot_index(slot), e))
    total = 0
    for j in range(len(letters)):
        a, ea = letters[j]
        for k in range(j + 1, len(letters)):
            b, eb = letters[k]
            total += ea * eb * gens.c(a, b)
    if total % 2:
        raise ValueError("Weyl exponent is not a quarter-integer")
    return QCoeff.q(-total // 2)


# ---------------------------------------------------------------------------
# Classical limit


class ClassicalPoly:
    """Commutative Laurent polynomial in ``x_e^{1/2}`` with integer coefficients.

    Keys are tuples of half-exponents, one entry per edge (edge ``e`` at
    position ``e - 1``).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], int] | None = None):
        self.nvars = nvars
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, nvars: int, c: int) -> "ClassicalPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def half_power(cls, nvars: int, edge: int, half_exp: int) -> "ClassicalPoly":
        key = [0] * nvars
        key[edge - 1] = half_exp
        return cls(nvars, {tuple(key): 1})

    def __add__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ClassicalPoly(self.nvars, out)

    def __sub__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        return self + ClassicalPoly(other.nvars, {k: -v for k, v in other.terms.items()})

    def __mul__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        out: dict[tuple[int, ...], int] = defaultdict(int)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[tuple(a + b for a, b in zip(k1, k2))] += v1 * v2
        return ClassicalPoly(self.nvars, out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ClassicalPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def positive(self) -> bool:
        return all(v > 0 for v in self.terms.values())

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            v = self.terms[key]
            factors = []
            for i, h in enumerate(key):
                if h:
                    f = Fraction(h, 2)
                    factors.append(f"x{i + 1}^({f})" if f != 1 else f"x{i + 1}")
            body = "*".join(factors) or "1"
            parts.append(body if v == 1 else f"{v}*{body}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"ClassicalPoly({self.render()})"


def classical_limit(a: Element, slot_edges: Sequence[int], nedges: int) -> ClassicalPoly:
    """Specialize ``q = 1`` and collapse each slot to its edge, ``Z_e -> x_e^{1/2}``.

    ``slot_edges[i]`` is the edge index carried by slot ``i``.  Slot exponents
    of one edge are summed and halved, so the embedded edge generator
    ``Z_e = Z_{e,t} Z_{e,t'}`` maps to ``x_e^{1/2}``.
    """
    out: dict[tuple[int, ...], int] = defaultdict(int)
    for m, c in a.at_q_one().items():
        key = [0] * nedges
        for i, e in enumerate(m):
            if e:
                key[slot_edges[i] - 1] += e
        if any(k % 2 for k in key):
            raise ValueError("monomial does not come from edge generators")
        out[tuple(k // 2 for k in key)] += c
    return ClassicalPoly(nedges, out)


def iter_pairs(n: int) -> Iterator[tuple[int, int]]:
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j
