"""Command-line harness: catalog, triangulation utilities, traces and verification suites."""

from __future__ import annotations

import itertools
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import click
import numpy as np

from . import catalog
from .coordchange import (
    CASES, block_element, crossing_reference_forms, identity_pairs, phi, random_odd_element,
    relation_sides, skew_exponents, square_arc, theta_flip, theta_inverse, verify_penner_moves,
    verify_pentagon,
)
from .division import Comparison, ExactTierStalled, Verdict, as_wordsum, compare
from .qalg import Element, mul, weyl_coefficient
from .repcheck import build_rep, check_relations as representation_defect, default_seed, evaluate
from .surface import (
    CurvePath, PathNotFound, Triangulation, TriangulationError, compute_skew_form,
    curve_from_json, diagonal_exchange, edge_vector, find_pentagons, flippable_edges, topology,
    transport_curve,
)
from .trace import (
    classical_trace, is_boundary_parallel, quantum_trace, verify_skein_double,
    verify_skein_single, verify_transport,
)

SCHEMA = "qteich.report/1"
REFERENCE_INTERMEDIATE_TERMS = 476
# curve-order exponents (quarter units) of the open arc crossing one pentagon side
PENTAGON_ALPHA_REFERENCE = {"forward": [-1, -2, -3], "backward": [-1, -1, -2, -3]}


# ---------------------------------------------------------------------------
# Options and targets


@dataclass(frozen=True)
class Target:
    name: str
    tri: Triangulation
    curves: dict[str, CurvePath]
    config: catalog.Configuration | None = None


@dataclass(frozen=True)
class Options:
    mode: str = "both"
    dims: tuple[int, ...] = (5, 7, 8)
    seed: int = 0
    depth_bound: int = 12
    targets: tuple[Target, ...] | None = None   # None: each check's default surfaces
    curve: str | None = None                    # curve name; file curves live in target.curves

    @property
    def seeds(self) -> tuple[int, ...]:
        return (self.seed, self.seed + 1, self.seed + 2)

    @property
    def exact(self) -> bool:
        return self.mode in ("exact", "both")

    @property
    def numeric(self) -> bool:
        return self.mode in ("numeric", "both")


def catalog_target(name: str) -> Target:
    cfg = catalog.get(name)
    return Target(name, cfg.tri, dict(cfg.curves), cfg)


def load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"malformed JSON in {path}: {exc}") from None


def resolve_targets(surface: str | None, tri_file: str | None,
                    curve: str | None) -> tuple[tuple[Target, ...] | None, str | None]:
    """Targets chosen on the command line and the curve name to use on them."""
    if surface and tri_file:
        raise click.UsageError("give --surface or --tri, not both")
    targets: list[Target] | None = None
    try:
        if surface:
            targets = [catalog_target(surface)]
        elif tri_file:
            tri = Triangulation.from_json(load_json(tri_file))
            targets = [Target(tri.name, tri, {})]
    except catalog.UnknownName as exc:
        raise click.UsageError(str(exc.args[0])) from None
    except TriangulationError as exc:
        raise click.UsageError(str(exc)) from None
    if curve is None:
        return (tuple(targets) if targets else None), None
    if Path(curve).is_file():
        data = load_json(curve)
        if targets is None:
            raise click.UsageError("a curve file needs --surface or --tri")
        t = targets[0]
        try:
            c = curve_from_json(t.tri, data)
        except TriangulationError as exc:
            raise click.UsageError(str(exc)) from None
        name = c.name or Path(curve).stem
        return (Target(t.name, t.tri, {**t.curves, name: c.renamed(name)}, t.config),), name
    pool = targets or [catalog_target(n) for n in catalog.names()]
    if not any(curve in t.curves for t in pool):
        raise click.UsageError(f"unknown curve {curve!r}")
    if targets:
        return tuple(targets), curve
    return tuple(t for t in pool if curve in t.curves), curve


def _targets(opts: Options, default: Iterable[str],
             keep: Callable[[Target], bool] = lambda t: True) -> list[Target]:
    if opts.targets is not None:
        return [t for t in opts.targets if keep(t)]
    return [t for t in (catalog_target(n) for n in default) if keep(t)]


def _curves(opts: Options, target: Target, default: Sequence[str] | None = None) -> dict[str, CurvePath]:
    if opts.curve is not None:
        return {opts.curve: target.curves[opts.curve]} if opts.curve in target.curves else {}
    if default is None:
        return dict(target.curves)
    return {n: target.curves[n] for n in default if n in target.curves}


# ---------------------------------------------------------------------------
# Reports


@dataclass
class Report:
    check: str
    status: str                  # exact, numeric, failed or inconclusive
    anchor: str
    terms: dict = field(default_factory=dict)
    ms: int = 0
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "check": self.check, "status": self.status,
                "anchor": self.anchor, "terms": self.terms, "ms": self.ms,
                "params": self.params, "details": self.details}

    def passed(self, require_exact: bool = False) -> bool:
        return self.status == "exact" or (self.status == "numeric" and not require_exact)


class Tally:
    """Accumulates the outcome of the individual comparisons behind one report."""

    def __init__(self, opts: Options):
        self.opts = opts
        self.verdicts: list[Verdict] = []
        self.failures: list[str] = []
        self.deviation: float | None = None
        self.terms: dict = {}
        self.details: dict = {}

    def exact(self, ok: bool, what: str) -> bool:
        """Record an exact structural check."""
        self.verdicts.append(Verdict.EXACT_EQUAL if ok else Verdict.NOT_EQUAL)
        if not ok:
            self.failures.append(what)
        return ok

    def numeric_bound(self, dev: float, bound: float, what: str) -> bool:
        self._deviation(dev)
        ok = dev <= bound
        self.verdicts.append(Verdict.NUMERIC_EQUAL if ok else Verdict.NOT_EQUAL)
        if not ok:
            self.failures.append(f"{what} (deviation {dev:.3e})")
        return ok

    def comparison(self, cmp: Comparison, what: str) -> bool:
        if cmp.numeric_deviation is not None:
            self._deviation(cmp.numeric_deviation)
        self.verdicts.append(cmp.verdict)
        if cmp.notes:
            self.failures.extend(f"{what}: {n}" for n in cmp.notes)
            self.verdicts.append(Verdict.INCONCLUSIVE)
        if cmp.verdict is Verdict.NOT_EQUAL:
            self.failures.append(what)
        elif cmp.verdict is Verdict.INCONCLUSIVE:
            self.failures.append(f"{what}: inconclusive")
        return cmp.equal

    def compare(self, a, b, what: str) -> bool:
        return self.comparison(compare(a, b, mode=self.opts.mode, dims=self.opts.dims,
                                       seeds=self.opts.seeds), what)

    def corroborate(self, a, b, what: str) -> None:
        """Numeric check of an identity the exact tier already decided."""
        if self.opts.numeric:
            self.comparison(compare(a, b, mode="numeric", dims=self.opts.dims,
                                    seeds=self.opts.seeds), what)

    def _deviation(self, dev: float) -> None:
        self.deviation = dev if self.deviation is None else max(self.deviation, dev)

    def status(self) -> str:
        if Verdict.NOT_EQUAL in self.verdicts:
            return "failed"
        if not self.verdicts or Verdict.INCONCLUSIVE in self.verdicts:
            return "inconclusive"
        if Verdict.EXACT_EQUAL in self.verdicts:
            return "exact"
        return "numeric"


# ---------------------------------------------------------------------------
# Checks


ALL_SURFACES = tuple(catalog.names())


def check_relations(opts: Options, t: Tally) -> None:
    rng = random.Random(opts.seed)
    targets = _targets(opts, ALL_SURFACES)
    per = -(-1000 // max(len(targets), 1))
    pairs = randoms = 0
    for tg in targets:
        tri, gens = tg.tri, tg.tri.gens
        sigma = compute_skew_form(tri)
        n = tri.edge_count
        if opts.exact:
            unit = [[int(k == e) for k in range(n)] for e in range(n)]
            for i, j in itertools.combinations(range(n), 2):
                s = sigma(i + 1, j + 1)
                for h in (1, 2):    # square roots and edge generators
                    a = Element.weyl(gens, edge_vector(tri, [h * x for x in unit[i]]))
                    b = Element.weyl(gens, edge_vector(tri, [h * x for x in unit[j]]))
                    t.exact(a * b == (b * a).shift(2 * h * h * s),
                            f"{tg.name}: edges {i + 1},{j + 1} at exponent {h}")
                    pairs += 1
            for _ in range(per):
                u = [rng.randint(-2, 2) for _ in range(n)]
                v = [rng.randint(-2, 2) for _ in range(n)]
                a, b = Element.weyl(gens, edge_vector(tri, u)), Element.weyl(gens, edge_vector(tri, v))
                form = sum(u[i] * v[j] * sigma(i + 1, j + 1) for i in range(n) for j in range(n))
                t.exact(a * b == (b * a).shift(2 * form), f"{tg.name}: monomials {u}, {v}")
                randoms += 1
        if opts.numeric:
            units = [gens.unit_vector(gens.slot(k)) for k in range(gens.size)]
            for N in opts.dims:
                for seed in opts.seeds:
                    rep = build_rep(gens, N, seed)
                    t.numeric_bound(representation_defect(rep, units), 1e-12,
                                    f"{tg.name}: representation N={N} seed={seed}")
    t.terms = {"edge pairs": pairs, "random monomial pairs": randoms}


def check_weyl(opts: Options, t: Tally) -> None:
    rng = random.Random(opts.seed)
    targets = _targets(opts, ALL_SURFACES)
    per = -(-500 // max(len(targets), 1))
    words = 0
    for tg in targets:
        gens = tg.tri.gens
        for _ in range(per):
            word = [(gens.slot(rng.randrange(gens.size)), rng.choice([-2, -1, 1, 2]))
                    for _ in range(rng.randint(1, 6))]
            total = [0] * gens.size
            for s, e in word:
                total[gens.slot_index(s)] += e
            want = Element.weyl(gens, total)
            perm = word[:]
            rng.shuffle(perm)
            for w in (word, perm):
                got = Element.word(gens, w) * weyl_coefficient(gens, w)
                t.exact(got == want, f"{tg.name}: word {w}")
                t.corroborate(got, want, f"{tg.name}: word {w}")
            words += 1
    t.terms = {"words": words}


def check_phi(opts: Options, t: Tally) -> None:
    flips = 0
    for tg in _targets(opts, ALL_SURFACES):
        for e in flippable_edges(tg.tri):
            _, ctx = diagonal_exchange(tg.tri, e)
            for x, y, lhs, rhs in relation_sides(ctx):
                what = f"{tg.name}: flip {e}, {x} with {y}"
                if t.exact(compare(lhs, rhs, mode="exact").equal, what):
                    t.corroborate(lhs, rhs, what)
            flips += 1
    t.terms = {"flips": flips}


def _square(opts: Options):
    tg = _targets(opts, ["torus-hole-1"])[0]
    e = flippable_edges(tg.tri)[0]
    return tg, diagonal_exchange(tg.tri, e)[1]


def _odd_samples(opts: Options, ctx) -> list[tuple[str, Element, CurvePath]]:
    out = [(f"block {c}", block_element(ctx, c), square_arc(ctx, c)) for c in CASES]
    rng = random.Random(opts.seed)
    for k in range(50):
        el, arc = random_odd_element(ctx, rng)
        out.append((f"fuzzed {k}", el, arc))
    return out


def check_blocks(opts: Options, t: Tally) -> None:
    tg, ctx = _square(opts)
    for case, (src, want, arc) in identity_pairs(ctx).items():
        t.compare(theta_flip(src, arc, ctx), want, f"identity {case}")
    exps = {}
    for c1, c2 in itertools.product(CASES, repeat=2):
        c, ok = skew_exponents(ctx, c1, c2)
        t.exact(ok, f"skew pair {c1}{c2}")
        exps[c1 + c2] = c
    t.terms = {"identities": 6, "skew pairs": len(exps)}
    t.details["skew exponents"] = exps


def check_theta_square(opts: Options, t: Tally) -> None:
    _, ctx = _square(opts)
    samples = _odd_samples(opts, ctx)
    for what, el, arc in samples:
        img = as_wordsum(theta_flip(el, arc, ctx))
        t.compare(img * img, phi(el * el, ctx), what)
    t.terms = {"elements": len(samples)}


def check_theta_inverse(opts: Options, t: Tally) -> None:
    _, ctx = _square(opts)
    samples = _odd_samples(opts, ctx)
    for what, el, arc in samples:
        back = theta_inverse(theta_flip(el, arc, ctx), transport_curve(arc, ctx), ctx)
        t.compare(back, el, what)
    t.terms = {"elements": len(samples)}


def check_pentagon(opts: Options, t: Tally) -> None:
    for tg in _targets(opts, ["torus-hole-1"]):
        cfg = tg.config
        if cfg is not None and cfg.pentagon:
            x, y = cfg.pentagon
            named = cfg.pentagon_arcs
        else:
            found = find_pentagons(tg.tri)
            if not found:
                t.exact(False, f"{tg.name}: no pentagon")
                continue
            (x, y), named = found[0], {}
        rep = verify_pentagon(tg.tri, x, y, named)
        chains = {}
        for name, arc in rep.arcs.items():
            t.exact(arc.meet, f"{tg.name} {name}: chains meet")
            t.exact(arc.cycle, f"{tg.name} {name}: five flips compose to the identity")
            if name in named:
                t.corroborate(arc.backward[-1].value, arc.forward[-1].value, f"{name}: chains meet")
                chains[name] = {"forward": [l.exponent for l in arc.forward],
                                "backward": [l.exponent for l in arc.backward],
                                "backward stages": [l.stage for l in arc.backward]}
        if "alpha" in chains:
            got = {k: chains["alpha"][k] for k in ("forward", "backward")}
            t.exact(got == PENTAGON_ALPHA_REFERENCE, f"{tg.name}: alpha chain exponents {got}")
        if "beta" in rep.arcs:
            forms = crossing_reference_forms(rep.arcs["beta"], rep.stages)
            for stage, ok in forms.items():
                t.exact(ok, f"{tg.name}: beta closed form at stage {stage}")
            chains.setdefault("beta", {})["closed forms"] = {str(k): v for k, v in forms.items()}
        t.terms[tg.name] = {"arcs": len(rep.arcs)}
        t.details[tg.name] = {"flips": [x, y, x, y, x], "chains": chains}


def check_penner(opts: Options, t: Tally) -> None:
    defaults = {"torus-hole-1": ["alpha", "beta-alpha"], "sphere-4p": ["alpha"]}
    for tg in _targets(opts, defaults):
        for name, c in _curves(opts, tg, defaults.get(tg.name, list(tg.curves)[:1])).items():
            value = quantum_trace(c, tg.tri, opts.depth_bound).element
            witnesses: list = []
            res = verify_penner_moves(value, c, tg.tri, witnesses)
            for rel, a, b in witnesses:
                t.corroborate(a, b, f"{tg.name} {name}: {rel}")
            for rel, ok in res.items():
                if ok is not None:
                    t.exact(ok, f"{tg.name} {name}: {rel}")
            t.details[f"{tg.name} {name}"] = {k: ("n/a" if v is None else v) for k, v in res.items()}


def check_skein_torus(opts: Options, t: Tally) -> None:
    for tg in _targets(opts, ["torus-hole-1", "torus-hole-2"], lambda t: bool(t.config and t.config.skein)
                       and "gammas" not in t.config.skein):
        sk = tg.config.skein
        r = verify_skein_single(*(tg.curves[sk[k]] for k in ("alpha", "beta", "ab", "ba")),
                                tg.tri, mode=opts.mode, dims=opts.dims, seeds=opts.seeds,
                                depth_bound=opts.depth_bound)
        t.comparison(r.comparison, f"{tg.name}: skein")
        t.terms[tg.name] = r.term_counts
        t.details[tg.name] = {"variant": r.variant, "alternatives": r.alternatives,
                              "closing": [k for k, v in r.alternatives.items() if v]}


def check_skein_sphere(opts: Options, t: Tally) -> None:
    spheres = [n for n in ALL_SURFACES if n.startswith("sphere")]
    for tg in _targets(opts, spheres, lambda t: bool(t.config and t.config.skein)
                       and "gammas" in t.config.skein):
        sk = tg.config.skein
        r = verify_skein_double(*(tg.curves[sk[k]] for k in ("alpha", "beta", "ab", "ba")),
                                [tg.curves[g] for g in sk["gammas"]], tg.tri, mode=opts.mode,
                                dims=opts.dims, seeds=opts.seeds, depth_bound=opts.depth_bound)
        t.comparison(r.comparison, f"{tg.name}: skein")
        t.terms[tg.name] = {**r.term_counts, "reference intermediate": REFERENCE_INTERMEDIATE_TERMS}
        t.details[tg.name] = {"variant": r.variant, "alternatives": r.alternatives,
                              "gamma pairing": [list(sk["gammas"][:2]), list(sk["gammas"][2:])]}


def _commuting_numeric(opts: Options, t: Tally, tg: Target, todo, trace_of) -> None:
    """Compare ``A B`` with ``B A`` for the trace matrices in each representation."""
    names = sorted({x for pair in todo for x in pair})
    vectors = [m for n in names for m in trace_of(n).monomials()]
    for N in opts.dims:
        for seed in opts.seeds:
            rep = build_rep(tg.tri.gens, N, seed, vectors)
            mats = {n: evaluate(trace_of(n), rep) for n in names}
            for p, n in todo:
                ab, ba = mats[p] @ mats[n], mats[n] @ mats[p]
                scale = max(float(np.abs(ab).max()), float(np.abs(ba).max()), 1e-300)
                t.numeric_bound(float(np.abs(ab - ba).max()) / scale, 1e-9,
                                f"{tg.name}: {p} with {n} at N={N}, seed={seed}")


def check_commuting(opts: Options, t: Tally) -> None:
    pairs = 0
    for tg in _targets(opts, ALL_SURFACES):
        peripheral = [n for n, c in tg.curves.items() if c.closed and is_boundary_parallel(c, tg.tri)]
        traces: dict[str, Element] = {}

        def trace_of(name: str) -> Element:
            if name not in traces:
                traces[name] = quantum_trace(tg.curves[name], tg.tri, opts.depth_bound).element
            return traces[name]

        todo = [(p, n) for p in peripheral for n in _curves(opts, tg) if n != p]
        if opts.exact:
            for p, n in todo:
                a, b = trace_of(p), trace_of(n)
                t.exact(mul(a, b) == mul(b, a), f"{tg.name}: {p} with {n}")
        if opts.numeric and todo:
            _commuting_numeric(opts, t, tg, todo, trace_of)
        pairs += len(todo)
    t.terms = {"pairs": pairs}


def _evaluation_gap(a, b, rng: random.Random, points: int = 3) -> float:
    """Relative gap between two classical polynomials at random positive square-root shears."""
    worst = 0.0
    for _ in range(points):
        roots = [rng.uniform(0.5, 2.0) for _ in range(a.nvars)]

        def value(p):
            return sum(c * float(np.prod([r ** k for r, k in zip(roots, key)]))
                       for key, c in p.terms.items())

        va, vb = value(a), value(b)
        worst = max(worst, abs(va - vb) / max(abs(va), abs(vb), 1e-300))
    return worst


def check_classical(opts: Options, t: Tally) -> None:
    rng = random.Random(opts.seed)
    n = 0
    for tg in _targets(opts, ALL_SURFACES):
        for name, c in _curves(opts, tg).items():
            if not c.closed:
                continue
            qt = quantum_trace(c, tg.tri, opts.depth_bound)
            cl = qt.classical()
            ref = classical_trace(c, tg.tri)
            t.exact(cl == ref, f"{tg.name} {name}: limit")
            if opts.numeric:
                t.numeric_bound(_evaluation_gap(cl, ref, rng), 1e-9, f"{tg.name} {name}: limit")
            t.exact(cl.positive(), f"{tg.name} {name}: positivity")
            n += 1
    t.terms = {"curves": n}


def check_transport(opts: Options, t: Tally) -> None:
    n = 0
    for tg in _targets(opts, ["torus-1p", "torus-hole-1", "sphere-4p"]):
        e = flippable_edges(tg.tri)[0]
        for name, c in _curves(opts, tg).items():
            if not c.closed:
                continue
            cmp = verify_transport(c, tg.tri, [e], opts.mode, opts.depth_bound,
                                   dims=opts.dims, seeds=opts.seeds)
            t.comparison(cmp, f"{tg.name} {name}: flip {e}")
            n += 1
    t.terms = {"triples": n}


@dataclass(frozen=True)
class Check:
    run: Callable[[Options, Tally], None]
    anchor: str


CHECKS: dict[str, Check] = {
    "relations": Check(check_relations, "commutation relations of embedded edge generators"),
    "weyl": Check(check_weyl, "Weyl ordering is independent of letter order"),
    "phi": Check(check_phi, "flip isomorphism preserves the slot relations"),
    "blocks": Check(check_blocks, "coordinate change on the six square blocks and their skew exponents"),
    "theta-square": Check(check_theta_square, "square of the coordinate change equals the flip isomorphism"),
    "theta-inverse": Check(check_theta_inverse, "coordinate change composed with its inverse"),
    "pentagon": Check(check_pentagon, "pentagon relation on open arcs"),
    "penner-moves": Check(check_penner, "relations among flips and reindexings"),
    "skein-torus": Check(check_skein_torus, "skein relation for curves meeting once"),
    "skein-sphere": Check(check_skein_sphere, "skein relation for curves meeting twice"),
    "commuting": Check(check_commuting, "peripheral traces are central"),
    "classical-limit": Check(check_classical, "classical limit is the trace of the monodromy"),
    "transport": Check(check_transport, "traces agree under change of triangulation"),
}


def run_check(name: str, opts: Options) -> Report:
    check = CHECKS[name]
    tally = Tally(opts)
    start = time.perf_counter()
    error = None
    try:
        check.run(opts, tally)
        status = tally.status()
    except ExactTierStalled as exc:
        status, error = "inconclusive", f"exact tier stalled: {exc}"
    except PathNotFound as exc:
        status, error = "inconclusive", f"no flip path within the depth bound: {exc}"
    except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
        status, error = "failed", f"{type(exc).__name__}: {exc}"
    ms = int((time.perf_counter() - start) * 1000)
    details = dict(tally.details)
    if not tally.verdicts and error is None:
        details["note"] = "nothing to check on the selected surfaces"
    if tally.failures:
        details["failures"] = tally.failures[:20]
    if tally.deviation is not None:
        details["max numeric deviation"] = tally.deviation
    if error:
        details["error"] = error
    params = {"mode": opts.mode, "N": list(opts.dims), "seed": opts.seed,
              "depth_bound": opts.depth_bound,
              "surfaces": [t.name for t in opts.targets] if opts.targets else "default"}
    if opts.curve:
        params["curve"] = opts.curve
    return Report(name, status, check.anchor, tally.terms, ms, params, details)


def run_checks(names: Sequence[str], opts: Options, jobs: int = 1) -> list[Report]:
    """Run checks, concurrently when ``jobs > 1``; reports come back in the order given."""
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_check, names, itertools.repeat(opts)))
    return [run_check(n, opts) for n in names]


# ---------------------------------------------------------------------------
# Output


def emit(payload: dict, as_json: bool, text: Callable[[], str]) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
    else:
        click.echo(text())


def render_reports(reports: Sequence[Report]) -> str:
    lines = []
    for r in reports:
        lines.append(f"{r.check:<16} {r.status:<12} {r.ms:>7} ms  {r.anchor}")
        if r.terms:
            lines.append(f"    terms: {json.dumps(r.terms, sort_keys=True)}")
        dev = r.details.get("max numeric deviation")
        if dev is not None:
            lines.append(f"    max numeric deviation: {dev:.3e}")
        for f in r.details.get("failures", []):
            lines.append(f"    failure: {f}")
        if "error" in r.details:
            lines.append(f"    error: {r.details['error']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Commands


def _surface_options(fn):
    fn = click.option("--surface", help="Catalog surface name.")(fn)
    fn = click.option("--tri", "tri_file", type=click.Path(dir_okay=False),
                      help="Triangulation JSON file.")(fn)
    return fn


def _json_option(fn):
    return click.option("--json", "as_json", is_flag=True, help="Emit JSON.")(fn)


def _one_target(surface: str | None, tri_file: str | None) -> Target:
    targets, _ = resolve_targets(surface, tri_file, None)
    if not targets:
        raise click.UsageError("give --surface or --tri")
    return targets[0]


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Exact quantum traces and verification of their coordinate-change identities."""


@main.group("catalog")
def catalog_group() -> None:
    """Built-in surfaces."""


@catalog_group.command("list")
@_json_option
def catalog_list(as_json: bool) -> None:
    """List catalog surfaces and their curves."""
    rows = []
    for cfg in catalog.all_configurations():
        rows.append({"name": cfg.tri.name, "description": cfg.description,
                     "edges": cfg.tri.edge_count, "triangles": len(cfg.tri.triangles),
                     "curves": sorted(cfg.curves)})
    emit({"schema": SCHEMA, "surfaces": rows}, as_json, lambda: "\n".join(
        f"{r['name']:<14} {r['description']}\n    curves: {', '.join(r['curves'])}" for r in rows))


@main.group("tri")
def tri_group() -> None:
    """Triangulation utilities."""


@tri_group.command("show")
@_surface_options
@_json_option
def tri_show(surface: str | None, tri_file: str | None, as_json: bool) -> None:
    """Show a triangulation, its topology and its flippable edges."""
    tg = _one_target(surface, tri_file)
    top = topology(tg.tri)
    payload = {"schema": SCHEMA, "triangulation": tg.tri.to_json(),
               "topology": {"genus": top.genus, "interior_punctures": top.interior_punctures,
                            "boundary_punctures": top.boundary_punctures, "holes": top.holes},
               "flippable": flippable_edges(tg.tri), "curves": sorted(tg.curves)}

    def text() -> str:
        lines = [f"{tg.name}: genus {top.genus}, {top.interior_punctures} punctures, "
                 f"{top.holes} holes, {top.boundary_punctures} boundary punctures"]
        lines += [f"  triangle {k}: {t}" for k, t in enumerate(tg.tri.triangles)]
        lines.append(f"  boundary edges: {sorted(tg.tri.boundary_edges)}")
        lines.append(f"  flippable: {payload['flippable']}")
        if tg.curves:
            lines.append(f"  curves: {', '.join(sorted(tg.curves))}")
        return "\n".join(lines)

    emit(payload, as_json, text)


@tri_group.command("flip")
@_surface_options
@click.option("--edge", type=int, required=True, help="Edge to flip.")
@_json_option
def tri_flip(surface: str | None, tri_file: str | None, edge: int, as_json: bool) -> None:
    """Flip one edge and print the new triangulation."""
    tg = _one_target(surface, tri_file)
    if edge not in flippable_edges(tg.tri):
        raise click.UsageError(f"edge {edge} is not flippable on {tg.name}")
    new, _ = diagonal_exchange(tg.tri, edge)
    emit(new.to_json(), as_json, lambda: new.dumps())


@tri_group.command("sigma")
@_surface_options
@_json_option
def tri_sigma(surface: str | None, tri_file: str | None, as_json: bool) -> None:
    """Print the edge skew form."""
    tg = _one_target(surface, tri_file)
    sf = compute_skew_form(tg.tri)
    rows = [list(r[1:]) for r in sf.sigma[1:]]
    emit({"schema": SCHEMA, "surface": tg.name, "sigma": rows}, as_json,
         lambda: "\n".join(" ".join(f"{x:>3}" for x in r) for r in rows))


@main.group("trace")
def trace_group() -> None:
    """Quantum trace computation."""


@trace_group.command("compute")
@_surface_options
@click.option("--curve", required=True, help="Curve name or curve JSON file.")
@click.option("--depth-bound", default=12, show_default=True, help="Flip search depth.")
@_json_option
def trace_compute(surface: str | None, tri_file: str | None, curve: str, depth_bound: int,
                  as_json: bool) -> None:
    """Compute the quantum trace of a curve."""
    if not surface and not tri_file:
        raise click.UsageError("give --surface or --tri")
    targets, name = resolve_targets(surface, tri_file, curve)
    tg = targets[0]
    c = tg.curves[name]
    try:
        qt = quantum_trace(c, tg.tri, depth_bound)
    except PathNotFound as exc:
        raise click.ClickException(f"no flip path within depth {depth_bound}: {exc}") from None
    el = qt.element
    payload = {"schema": SCHEMA, "surface": tg.name, "curve": name, "method": qt.method,
               "path": [str(m) for m in qt.path], "render": el.render()}
    if isinstance(el, Element):
        payload.update(terms=el.term_count(), monomials=el.support_size(), element=el.to_json(),
                       classical=qt.classical().render())
    emit(payload, as_json, lambda: (
        f"T[{name}] on {tg.name} ({qt.method}"
        + (f", {payload['monomials']} monomials, {payload['terms']} terms" if "terms" in payload else "")
        + f"):\n{payload['render']}"))


@main.command("verify")
@click.argument("checks", nargs=-1, required=True)
@_surface_options
@click.option("--curve", help="Curve name or curve JSON file.")
@click.option("--mode", type=click.Choice(["exact", "numeric", "both"]), default="both",
              show_default=True)
@click.option("-N", "dims", type=int, multiple=True, help="Representation size (repeatable).")
@click.option("--seed", type=int, default=None, help="Seed (default: QTEICH_SEED or 0).")
@click.option("--depth-bound", default=12, show_default=True, help="Flip search depth.")
@click.option("--require-exact", is_flag=True, help="Fail unless every check is exact.")
@click.option("--jobs", default=1, show_default=True, help="Checks to run concurrently.")
@_json_option
def verify(checks: tuple[str, ...], surface: str | None, tri_file: str | None, curve: str | None,
           mode: str, dims: tuple[int, ...], seed: int | None, depth_bound: int,
           require_exact: bool, jobs: int, as_json: bool) -> None:
    """Run verification checks by name, or all of them."""
    names = list(CHECKS) if "all" in checks else list(dict.fromkeys(checks))
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise click.UsageError(f"unknown check {', '.join(unknown)}; "
                               f"choose from {', '.join(CHECKS)} or all")
    if any(n < 2 for n in dims):
        raise click.UsageError("-N must be at least 2")
    targets, cname = resolve_targets(surface, tri_file, curve)
    opts = Options(mode=mode, dims=tuple(dims) or (5, 7, 8),
                   seed=default_seed() if seed is None else seed, depth_bound=depth_bound,
                   targets=targets, curve=cname)
    reports = run_checks(names, opts, jobs)
    ok = all(r.passed(require_exact) for r in reports)
    emit({"schema": SCHEMA, "ok": ok, "reports": [r.to_json() for r in reports]}, as_json,
         lambda: render_reports(reports) + f"\n{'PASS' if ok else 'FAIL'}")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
