"""Acceptance criteria, one test each, printing a PASS/FAIL line with timing."""

import contextlib
import itertools
import random
import time

import pytest

from qteich import catalog, cli
from qteich.coordchange import (
    CASES, block_element, crossing_reference_forms, identity_pairs, phi, random_odd_element,
    skew_exponents, square_arc, theta_flip, theta_inverse, theta_square_holds, verify_pentagon,
)
from qteich.division import Verdict, as_wordsum, compare
from qteich.qalg import Element, weyl_coefficient
from qteich.surface import compute_skew_form, diagonal_exchange, edge_vector, flippable_edges, transport_curve
from qteich.trace import (
    classical_trace, quantum_trace, verify_skein_double, verify_skein_single, verify_transport,
)

REFERENCE_INTERMEDIATE = 476
TORUS = ("alpha", "beta", "alpha-beta", "beta-alpha")


@contextlib.contextmanager
def criterion(capsys, number, title, budget=None):
    """Time the block and print one PASS/FAIL line whatever the outcome."""
    info: dict = {}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        secs = time.perf_counter() - start
        within = budget is None or secs < budget
        extra = f"  [{info['note']}]" if "note" in info else ""
        limit = f" (limit {budget:g} s)" if budget else ""
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok and within else 'FAIL'}  "
                  f"{title}: {secs:.2f} s{limit}{extra}")
    assert within, f"criterion {number} took {secs:.2f} s"


def exact(a, b):
    return compare(a, b, mode="exact").verdict is Verdict.EXACT_EQUAL


@pytest.fixture(scope="module")
def square():
    return diagonal_exchange(catalog.get("torus-hole-1").tri, 1)[1]


def test_1_relations(capsys):
    with criterion(capsys, 1, "edge generator relations", 1.0) as info:
        rng = random.Random(0)
        names = catalog.names()
        checked = 0
        for name in names:
            tri = catalog.get(name).tri
            gens, sf, n = tri.gens, compute_skew_form(tri), tri.edge_count
            unit = [[int(k == e) for k in range(n)] for e in range(n)]
            for i, j in itertools.combinations(range(n), 2):
                s = sf(i + 1, j + 1)
                z = [Element.weyl(gens, edge_vector(tri, unit[k])) for k in (i, j)]
                x = [Element.weyl(gens, edge_vector(tri, [2 * a for a in unit[k]])) for k in (i, j)]
                assert z[0] * z[1] == (z[1] * z[0]).shift(2 * s)      # q^{s/2}
                assert x[0] * x[1] == (x[1] * x[0]).shift(8 * s)      # q^{2s}
        for k in range(1000):
            tri = catalog.get(names[k % len(names)]).tri
            sf, n = compute_skew_form(tri), tri.edge_count
            u = [rng.randint(-2, 2) for _ in range(n)]
            v = [rng.randint(-2, 2) for _ in range(n)]
            a, b = (Element.weyl(tri.gens, edge_vector(tri, w)) for w in (u, v))
            form = sum(u[i] * v[j] * sf(i + 1, j + 1) for i in range(n) for j in range(n))
            assert a * b == (b * a).shift(2 * form)
            checked += 1
        info["note"] = f"{len(names)} triangulations, {checked} random monomial pairs"


def test_2_weyl_invariance(capsys):
    with criterion(capsys, 2, "Weyl ordering invariance", 1.0) as info:
        rng = random.Random(1)
        gens = catalog.get("torus-hole-2").tri.gens
        for _ in range(500):
            word = [(gens.slot(rng.randrange(gens.size)), rng.choice([-2, -1, 1, 2]))
                    for _ in range(rng.randint(1, 6))]
            perm = word[:]
            rng.shuffle(perm)
            assert (Element.word(gens, word) * weyl_coefficient(gens, word)
                    == Element.word(gens, perm) * weyl_coefficient(gens, perm))
        info["note"] = "500 words"


def test_3_block_identities(capsys, square):
    with criterion(capsys, 3, "six coordinate-change identities", 1.0) as info:
        pairs = identity_pairs(square)
        assert sorted(pairs) == sorted(CASES)
        for case, (src, want, arc) in pairs.items():
            assert compare(theta_flip(src, arc, square), want, mode="exact").verdict \
                is Verdict.EXACT_EQUAL, case
        info["note"] = "6/6 ExactEqual"


def test_4_square_and_inverse(capsys, square):
    with criterion(capsys, 4, "square root and inverse of the coordinate change", 10.0) as info:
        samples = [(block_element(square, "e"), square_arc(square, "e"))]
        rng = random.Random(4)
        samples += [random_odd_element(square, rng) for _ in range(50)]
        for t, arc in samples:
            assert theta_square_holds(t, arc, square).verdict is Verdict.EXACT_EQUAL
            img = theta_flip(t, arc, square)
            assert exact(theta_inverse(img, transport_curve(arc, square), square), t)
        info["note"] = f"{len(samples)} elements"


def test_5_skew_preservation(capsys, square):
    with criterion(capsys, 5, "block skew exponents") as info:
        results = [skew_exponents(square, a, b)[1] for a, b in itertools.product(CASES, repeat=2)]
        assert len(results) == 36 and all(results)
        info["note"] = "36/36 ordered pairs"


def test_6_pentagon(capsys):
    with criterion(capsys, 6, "pentagon relation", 10.0) as info:
        cfg = catalog.get("torus-hole-1")
        rep = verify_pentagon(cfg.tri, *cfg.pentagon, cfg.pentagon_arcs)
        alpha, beta = rep.arcs["alpha"], rep.arcs["beta"]
        # q^{-1/4}, q^{-2/4}, q^{-3/4} on words of 2, 4, 6 letters
        assert [(l.slots, l.exponent) for l in alpha.forward] == [(2, -1), (4, -2), (6, -3)]
        assert [l.exponent for l in alpha.backward] == [-1, -1, -2, -3]
        assert beta.forward[0].exponent == 0 and beta.forward[0].slots == 4
        assert all(crossing_reference_forms(beta, rep.stages).values())
        assert rep.ok
        info["note"] = f"{len(rep.arcs)} arcs close"


def test_7_torus_skein(capsys):
    with criterion(capsys, 7, "torus skein relation", 30.0) as info:
        cfg = catalog.get("torus-hole-1")
        t = {n: quantum_trace(cfg.curve(n), cfg.tri).element for n in TORUS}
        counts = {n: t[n].term_count() for n in TORUS}
        assert counts == {"alpha": 4, "beta": 4, "alpha-beta": 3, "beta-alpha": 13}
        r = verify_skein_single(*(cfg.curve(n) for n in TORUS), cfg.tri, mode="exact")
        assert r.comparison.verdict is Verdict.EXACT_EQUAL
        assert r.term_counts["product-expanded"] == 16
        assert r.alternatives["q^(1/2), q^(-1/2)"] and not r.alternatives["q, q^-1"]
        info["note"] = "closes with q^(1/2); the q, q^-1 variant does not"


def test_8_sphere_skein(capsys):
    with criterion(capsys, 8, "sphere skein relation", 300.0) as info:
        sizes = {}
        for name in [n for n in catalog.names() if n.startswith("sphere")]:
            cfg = catalog.get(name)
            sk = cfg.skein
            r = verify_skein_double(*(cfg.curve(sk[k]) for k in ("alpha", "beta", "ab", "ba")),
                                    [cfg.curve(g) for g in sk["gammas"]], cfg.tri, mode="exact")
            assert r.comparison.verdict is Verdict.EXACT_EQUAL, name
            sizes[name] = r.term_counts["intermediate"]
        info["note"] = (f"intermediate terms {sizes['sphere-4p']} (4 punctures) to "
                        f"{sizes['sphere-4h']} (4 holes), reference {REFERENCE_INTERMEDIATE}")


def test_9_classical_limits(capsys):
    with criterion(capsys, 9, "classical limits") as info:
        n = 0
        for name in catalog.names():
            cfg = catalog.get(name)
            for curve in cfg.curves.values():
                cl = quantum_trace(curve, cfg.tri).classical()
                assert cl == classical_trace(curve, cfg.tri), (name, curve.name)
                assert cl.positive()
                n += 1
        info["note"] = f"{n} curves"


def test_10_transport(capsys):
    with criterion(capsys, 10, "transport invariance") as info:
        n = 0
        for name in ("torus-1p", "torus-hole-1", "sphere-4p"):
            cfg = catalog.get(name)
            e = flippable_edges(cfg.tri)[0]
            for curve in cfg.curves.values():
                cmp = verify_transport(curve, cfg.tri, [e], mode="exact", depth_bound=12)
                assert cmp.verdict is Verdict.EXACT_EQUAL, (name, curve.name)
                n += 1
        assert n >= 10
        info["note"] = f"{n} triples"


def test_11_numeric_oracle(capsys):
    with criterion(capsys, 11, "numeric re-verification") as info:
        opts = cli.Options(mode="both", dims=(5, 7, 8), seed=0)
        reports = cli.run_checks(list(cli.CHECKS), opts)
        worst = 0.0
        for r in reports:
            assert r.status == "exact", (r.check, r.details)
            dev = r.details.get("max numeric deviation")
            bound = 1e-12 if r.check == "relations" else 1e-9
            assert dev is not None and dev <= bound, (r.check, dev)
            worst = max(worst, dev)
        info["note"] = f"{len(reports)} checks, N in (5, 7, 8), seeds 0-2, max deviation {worst:.1e}"
