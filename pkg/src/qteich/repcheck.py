"""Root-of-unity representations of the quantum torus, used as a numeric oracle.

The skew form is reduced over the integers to a symplectic block form on the
lattice spanned by the monomials that matter.  Each block ``(w, w')`` with
``c(w, w') = d`` becomes a clock/shift pair on ``C^N`` with ``X Y = u^d Y X``,
and ``q^{1/4}`` is sent to ``u = exp(2 pi i r / M)`` with ``M = N * gcd(d)``.
A Weyl-ordered monomial with block coordinates ``(a, b)`` is the operator
``u^{-d a b / 2} X^a Y^b`` times a random character, so all relations hold with
exact rational phases.  Floating point enters only when matrices are summed.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .division import InvPoly, WordSum, _echelon, as_wordsum
from .qalg import Element, GeneratorSet, Monomial, commutation_exponent, weyl_exponent


class SingularDenominator(ArithmeticError):
    """A denominator core stayed singular after resampling."""


def default_seed() -> int:
    return int(os.environ.get("QTEICH_SEED", "0"))


# ---------------------------------------------------------------------------
# Integer symplectic reduction


def symplectic_reduction(gram: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Unimodular change of basis bringing a skew integer form to block form.

    Returns ``(basis, blocks)``: rows of ``basis`` are integer combinations of
    the original basis; rows ``2k, 2k+1`` pair with value ``blocks[k] > 0``;
    the remaining rows span the radical.
    """
    m = len(gram)
    G = [list(r) for r in gram]
    W = [[int(i == j) for j in range(m)] for i in range(m)]

    def form(x: list[int], y: list[int]) -> int:
        return sum(x[i] * G[i][j] * y[j] for i in range(m) if x[i] for j in range(m) if y[j])

    blocks: list[int] = []
    start = 0
    while True:
        best = None
        for i in range(start, m):
            for j in range(i + 1, m):
                g = form(W[i], W[j])
                if g and (best is None or abs(g) < abs(best[2])):
                    best = (i, j, g)
        if best is None:
            break
        i, j, _ = best
        W[start], W[i] = W[i], W[start]
        W[start + 1], W[j] = W[j], W[start + 1]
        if form(W[start], W[start + 1]) < 0:
            W[start], W[start + 1] = W[start + 1], W[start]
        s, t = W[start], W[start + 1]
        g = form(s, t)
        clean = True
        for k in range(start + 2, m):
            a, b = form(s, W[k]), form(t, W[k])
            # adding (b//g) s - (a//g) t leaves the remainders mod g
            alpha, beta = b // g, -(a // g)
            W[k] = [x + alpha * y + beta * z for x, y, z in zip(W[k], s, t)]
            if form(s, W[k]) or form(t, W[k]):
                clean = False
        if clean:
            blocks.append(g)
            start += 2
    return W, blocks


# ---------------------------------------------------------------------------
# Representations


@dataclass
class RootOfUnityRep:
    gens: GeneratorSet
    N: int
    M: int
    root: int                   # u = exp(2 pi i root / M)
    seed: int
    lattice: list[list[int]]    # echelon basis of the represented lattice
    pivots: list[int]
    coords: list[list[Fraction]]  # lattice coordinates -> block coordinates
    blocks: list[int]
    twist: list[Fraction]       # character on lattice basis, in turns

    @property
    def dim(self) -> int:
        return self.N ** len(self.blocks)

    @property
    def u(self) -> complex:
        return complex(np.exp(2j * np.pi * self.root / self.M))

    def lattice_coordinates(self, vec: Sequence[int]) -> list[int]:
        rest = list(vec)
        ys = []
        for row, p in zip(self.lattice, self.pivots):
            k, r = divmod(rest[p], row[p])
            if r:
                raise ValueError("monomial outside the represented lattice")
            ys.append(k)
            rest = [x - k * y for x, y in zip(rest, row)]
        if any(rest):
            raise ValueError("monomial outside the represented lattice")
        return ys

    @property
    def phase_modulus(self) -> int:
        """Common denominator of every phase, in turns."""
        den = 1
        for t in self.twist:
            den = math.lcm(den, t.denominator)
        return 2 * self.M * den

    def _integer_tables(self) -> tuple[list[list[int]], int, list[int]]:
        """Block coordinates over a common denominator and twists in phase units."""
        cached = self.__dict__.get("_tables")
        if cached is None:
            den = 1
            for row in self.coords:
                for c in row:
                    den = math.lcm(den, c.denominator)
            num = [[int(c * den) for c in row] for row in self.coords]
            L = self.phase_modulus
            cached = (num, den, [int(t * L) for t in self.twist])
            self.__dict__["_tables"] = cached
        return cached

    def weyl_operator(self, vec: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Monomial matrix of the Weyl-ordered ``[vec]`` as (row of each column, phase per column).

        Phases are integers modulo :attr:`phase_modulus`.
        """
        ys = self.lattice_coordinates(vec)
        num, den, twist = self._integer_tables()
        scaled = [sum(c * y for c, y in zip(row, ys)) for row in num]
        if any(x % den for x in scaled):
            raise ValueError("non-integral block coordinates")
        xs = [x // den for x in scaled]
        L = self.phase_modulus
        unit = L // self.M           # one step of u in phase units
        phase0 = sum(t * y for t, y in zip(twist, ys))
        N = self.N
        nb = len(self.blocks)
        # basis index j = (j_1, ..., j_nb) in base N; X_k diag(w^{j_k}), Y_k shift j_k -> j_k + 1
        idx = np.arange(self.dim, dtype=np.int64)
        target = np.zeros(self.dim, dtype=np.int64)
        col_phase = np.full(self.dim, phase0 % L, dtype=np.int64)
        for k, d in enumerate(self.blocks):
            a, b = xs[2 * k], xs[2 * k + 1]
            digits = (idx // N ** (nb - 1 - k)) % N
            # u^{-d a b / 2} X^a Y^b e_j = u^{-dab/2} w^{a (j + b)} e_{j + b}, w = u^d
            shifted = (digits + b) % N
            col_phase = (col_phase + (-d * a * b * self.root * unit) // 2
                         + (d * a * self.root % self.M) * unit * shifted) % L
            target = target * N + shifted
        return target, col_phase

    def _entries(self, vec: Sequence[int], quarter: int) -> tuple[np.ndarray, np.ndarray]:
        """Row index and value of the single entry in each column of ``q^{quarter/4} normal(vec)``."""
        target, col_phase = self.weyl_operator(vec)
        L = self.phase_modulus
        # normal(vec) = q^{-W/4} [vec]
        shift = self.root * (quarter - weyl_exponent(self.gens, tuple(vec))) * (L // self.M)
        return target, np.exp(2j * np.pi * ((col_phase + shift) % L) / L)

    def monomial_matrix(self, vec: Sequence[int], quarter: int = 0) -> np.ndarray:
        """Matrix of ``q^{quarter/4} normal(vec)``."""
        target, values = self._entries(vec, quarter)
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        mat[target, np.arange(self.dim)] = values
        return mat

    def element_matrix(self, e: Element) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        cols = np.arange(self.dim)
        for (m, k), c in e.terms.items():
            target, values = self._entries(m, k)
            np.add.at(out, (target, cols), c * values)
        return out


def _blocks_to_coords(basis: list[list[int]], m: int) -> list[list[Fraction]]:
    """Rows: block coordinate ``x_j`` as a linear form in lattice coordinates ``y``."""
    # y = B^T x  =>  x = (B^T)^{-1} y
    import sympy

    B = sympy.Matrix(basis)
    inv = B.T.inv()
    return [[Fraction(int(inv[j, i].p), int(inv[j, i].q)) for i in range(m)] for j in range(m)]


MAX_DIM = 256


def build_rep(gens: GeneratorSet, N: int, seed: int | None = None,
              vectors: Iterable[Sequence[int]] | None = None,
              max_dim: int = MAX_DIM) -> RootOfUnityRep:
    """Representation of the subtorus spanned by ``vectors`` (all generators by default).

    When ``N ** blocks`` exceeds ``max_dim`` the clock size drops to the largest
    value that fits (at least 2); ``rep.N`` records the size actually used.
    """
    if N < 2:
        raise ValueError("dimension must be at least 2")
    seed = default_seed() if seed is None else seed
    if vectors is None:
        vectors = [gens.unit_vector(gens.slot(i)) for i in range(gens.size)]
    lattice = _echelon(list(vectors))
    if not lattice:
        lattice = []
    pivots = [next(i for i, x in enumerate(r) if x) for r in lattice]
    m = len(lattice)
    gram = [[commutation_exponent(gens, tuple(a), tuple(b)) for b in lattice] for a in lattice]
    basis, blocks = symplectic_reduction(gram) if m else ([], [])
    coords_all = _blocks_to_coords(basis, m) if m else []
    # keep only the block coordinates; radical directions act by the character
    coords = coords_all[: 2 * len(blocks)]
    while N > 2 and N ** len(blocks) > max_dim:
        N -= 1
    g = 0
    for d in blocks:
        g = math.gcd(g, d)
    M = N * (g or 1)
    rng = random.Random(seed * 7919 + N)
    root = rng.choice([r for r in range(1, M) if math.gcd(r, M) == 1])
    twist = [Fraction(rng.randrange(1, 997), 997) for _ in range(m)]
    return RootOfUnityRep(gens, N, M, root, seed, lattice, pivots, coords, blocks, twist)


def _compose(rep: RootOfUnityRep, a: tuple[np.ndarray, np.ndarray],
             b: tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Monomial matrix ``A B`` from (target, phase) pairs."""
    ta, pa = a
    tb, pb = b
    return ta[tb], (pa[tb] + pb) % rep.phase_modulus


def relation_phases(rep: RootOfUnityRep, v: Sequence[int], w: Sequence[int],
                    ops: dict | None = None) -> tuple[bool, float]:
    """Check ``A B = u^c B A`` for two monomials.

    Returns whether it holds with exact integer phases and the floating point
    deviation of the same identity evaluated entrywise.  ``ops`` caches operators.
    """
    ops = {} if ops is None else ops
    for x in (v, w):
        if tuple(x) not in ops:
            ops[tuple(x)] = rep.weyl_operator(x)
    a, b = ops[tuple(v)], ops[tuple(w)]
    L = rep.phase_modulus
    c = commutation_exponent(rep.gens, tuple(v), tuple(w))
    t1, p1 = _compose(rep, a, b)
    t2, p2 = _compose(rep, b, a)
    p2 = (p2 + c * rep.root * (L // rep.M)) % L
    exact = bool(np.array_equal(t1, t2) and np.array_equal(p1, p2))
    if not np.array_equal(t1, t2):
        return exact, 2.0
    u = rep.u
    lhs = np.exp(2j * np.pi * a[1][b[0]] / L) * np.exp(2j * np.pi * b[1] / L)
    rhs = u ** c * np.exp(2j * np.pi * b[1][a[0]] / L) * np.exp(2j * np.pi * a[1] / L)
    return exact, float(np.abs(lhs - rhs).max()) if lhs.size else 0.0


def check_relations(rep: RootOfUnityRep, vectors: Sequence[Sequence[int]] | None = None) -> float:
    """Max floating point deviation of ``A B - u^{c} B A`` over pairs of represented monomials.

    Raises :class:`ArithmeticError` if a relation fails with exact phases.
    """
    vecs = [tuple(v) for v in (vectors if vectors is not None else rep.lattice)]
    worst = 0.0
    ops: dict = {}
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            exact, dev = relation_phases(rep, vecs[i], vecs[j], ops)
            if not exact:
                raise ArithmeticError(f"relation fails exactly for {vecs[i]}, {vecs[j]}")
            worst = max(worst, dev)
    return worst


# ---------------------------------------------------------------------------
# Evaluation


def _vectors_of(ws: WordSum) -> list[Monomial]:
    out = []
    for w in ws.words:
        for f in w.factors:
            out.extend(f.core.monomials())
    return out


def evaluate(ws: WordSum | Element, rep: RootOfUnityRep, cond_limit: float = 1e10) -> np.ndarray:
    """Matrix of a word sum; raises :class:`SingularDenominator` on a bad core."""
    ws = as_wordsum(ws)
    u = rep.u
    total = np.zeros((rep.dim, rep.dim), dtype=complex)
    cache: dict[tuple[bool, Element], np.ndarray] = {}
    for w in ws.words:
        acc = np.eye(rep.dim, dtype=complex) * sum(c * u ** k for k, c in w.scalar.terms.items())
        for f in w.factors:
            inv = isinstance(f, InvPoly)
            key = (inv, f.core)
            mat = cache.get(key)
            if mat is None:
                mat = rep.element_matrix(f.core)
                if inv:
                    if np.linalg.cond(mat) > cond_limit:
                        raise SingularDenominator(f"singular core {f.core.render()}")
                    mat = np.linalg.inv(mat)
                cache[key] = mat
            acc = acc @ mat
        total += acc
    return total


def numeric_deviation(a: WordSum | Element, b: WordSum | Element,
                      dims: Sequence[int] = (5, 7, 8), seeds: Sequence[int] = (0, 1, 2),
                      retries: int = 5, max_dim: int = MAX_DIM) -> tuple[float, list[dict]]:
    """Max relative deviation between ``a`` and ``b`` across representations."""
    a, b = as_wordsum(a), as_wordsum(b)
    vectors = _vectors_of(a) + _vectors_of(b)
    runs = []
    worst = 0.0
    for N in dims:
        for seed in seeds:
            for attempt in range(retries + 1):
                rep = build_rep(a.gens, N, seed + 1000 * attempt, vectors, max_dim)
                try:
                    A, B = evaluate(a, rep), evaluate(b, rep)
                except SingularDenominator:
                    continue
                break
            else:
                raise SingularDenominator(f"denominator singular at N={N}, seed={seed}")
            scale = max(float(np.abs(A).max()), float(np.abs(B).max()), 1e-300)
            dev = float(np.abs(A - B).max()) / scale if A.size else 0.0
            worst = max(worst, dev)
            runs.append({"N": N, "N_used": rep.N, "M": rep.M, "seed": rep.seed, "dim": rep.dim,
                         "deviation": dev})
    return worst, runs
