"""Reproduction rows: each returns a verdict with what was expected and what was seen."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alpha import (af_survey, alpha_enclosure, alpha_exact, check_facts, closed_backward, exact_in_enclosure,
                    exactness_test, fatten, landmark_cells, refinement_violations, verdicts_pass)
from .combinators import (ProductSpace, brute_force_lines, check_chain_of_sines, find_bichromatic_line,
                          quotient_collapse)
from .constructors import (arc_realization, random_closed_cells, random_cylinder_set, verify_pointwise,
                           verify_zero_dim, zero_dim_realization)
from .cylinder import CylinderSpace
from .graph import transition_graph
from .maps import Z_CASES, MapSpec, build_named_map, z_target
from .spaces import Pt, build_named_space


@dataclass
class Row:
    key: str
    claim: str
    expected: str
    observed: str
    passed: bool
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key}: {self.claim} | expected {self.expected} | " \
               f"observed {self.observed} | {self.seconds:.2f}s"


def _timed(fn):
    def run(*args, **kw):
        t = time.perf_counter()
        row = fn(*args, **kw)
        row.seconds = time.perf_counter() - t
        return row

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def row_exactness() -> Row:
    sp = build_named_space("interval", "1/64")
    g = transition_graph(sp, build_named_map(sp, "horseshoe"))
    exact = exactness_test(g, 20)
    xs = [Pt("I", Fraction(k, 7)) for k in (-6, -3, 0, 2, 5)]
    full = [len(alpha_enclosure(g, x).cells) == sp.n_cells for x in xs]
    row = Row("exactness", "horseshoe is exact and every enclosure is the whole interval",
              "exact within 20 steps; 5/5 full enclosures", f"exact={exact}; {sum(full)}/5 full",
              exact and all(full))
    return row


@_timed
def row_sine() -> Row:
    sp = build_named_space("sine", "1/128", pieces=6)
    g = transition_graph(sp, build_named_map(sp, "sine"))
    E = alpha_enclosure(g, sp.points["b"]).cells
    ab = sp.landmark("[a,b]").cells
    far = landmark_cells(sp, "P3+P4+P5+P6") - fatten(sp, ab, 1)
    ok = ab <= E and not (E & far)
    return Row("sine", "enclosure of alpha(b) under the sine map is [a,b]",
               "all [a,b] cells in, no P3..P6 cell beyond the collar",
               f"[a,b] in: {ab <= E}; stray P3..P6 cells: {len(E & far)}", ok)


@_timed
def row_extended() -> Row:
    sp = build_named_space("extended_sine", "1/128", pieces=6)
    g = transition_graph(sp, build_named_map(sp, "extended_sine"))
    E = alpha_enclosure(g, sp.points["b"]).cells
    ac = sp.landmark("[a,c]").cells
    bc = sp.landmark("[b,c]").cells
    far = sp.landmark("S").cells - fatten(sp, ac, 1)
    ok = ac <= E and bc <= E and not (E & far)
    return Row("extended-sine", "enclosure of alpha(b) under the extended sine map is [a,c]",
               "[a,c] cells in, all [b,c] cells in, no S cell beyond the collar",
               f"[a,c] in: {ac <= E}; [b,c] in: {bc <= E}; stray S cells: {len(E & far)}", ok)


@_timed
def row_chain() -> Row:
    sp = build_named_space("chain_of_sines", "1/128", curves=4, pieces=6)
    notes, ok = [], True
    for n in (1, 2, 3):
        g = transition_graph(sp, build_named_map(sp, "chain", n=n))
        E = alpha_enclosure(g, sp.points[f"b{n}"]).cells
        An = sp.landmark(f"A{n}").cells
        before = frozenset().union(*[sp.landmark(f"Sbar{i}").cells for i in range(1, n)]) - fatten(sp, An, 1)
        good = An <= E and not (E & before)
        ok &= good
        notes.append(f"n={n}:{'ok' if good else 'bad'}")
    return Row("chain", "enclosure of alpha(b_n) under the chain map is A_n, n=1..3",
               "A_n cells in, no earlier curve cell beyond the collar", " ".join(notes), ok)


@_timed
def row_f4() -> Row:
    sp = build_named_space("F4")
    m = build_named_map(sp, "F4")
    rep = alpha_exact(m, sp.points["origin"], 40, 0.05)
    pts = set(rep.points)
    has1, has2 = Pt("<1,0>", Fraction(0)) in pts, Pt("<2,0>", Fraction(0)) in pts
    facts = check_facts(m, None, [sp.points["origin"]], engine="exact", K=40, eps=0.05)
    f4 = next(r for r in facts if r.fact == "F4")
    ok = has1 and not has2 and f4.verdict == "strict inclusion" and "<1,0>" in f4.detail
    return Row("F4", "alpha(<0,0>) contains <1,0> but not its only preimage <2,0>",
               "<1,0> in, <2,0> out, F4 strict", f"<1,0> in: {has1}; <2,0> in: {has2}; F4: {f4.verdict}", ok)


@_timed
def row_arc(n_sets: int = 50, seed: int = 6) -> Row:
    sp = build_named_space("interval", "1/64")
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(n_sets):
        A = random_closed_cells(sp, rng)
        r = arc_realization(sp, A)
        v = verify_pointwise(sp, r.map, A, r.basepoint)
        g = transition_graph(sp, r.map)
        v.update({"graph " + k: x for k, x in alpha_enclosure(g, r.basepoint).compare(A).items()})
        v.update({"exact " + k: x for k, x in
                  alpha_exact(r.map, r.basepoint, 6, eps=float(sp.h) / 2).compare(A).items()})
        fails += not verdicts_pass(v)
    return Row("arc", f"arc realization on {n_sets} random closed sets (seed {seed})",
               "0 failures", f"{fails} failures", fails == 0)


@_timed
def row_zero_dim(n_sets: int = 20, seed: int = 7) -> Row:
    cs = CylinderSpace(10)
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(n_sets):
        A = random_cylinder_set(cs, rng)
        r = zero_dim_realization(cs, A)
        fails += not all(verify_zero_dim(r).values())
    return Row("zero-dim", f"zero-dimensional realization on {n_sets} random closed sets (seed {seed})",
               "0 failures", f"{fails} failures", fails == 0)


def _line_agreement(prod: ProductSpace, rng, n_sets: int) -> int:
    bad = 0
    for _ in range(n_sets):
        mask = rng.random(prod.n_cells) < rng.uniform(0.05, 0.95)
        cells = frozenset(np.flatnonzero(mask).tolist())
        if not cells or len(cells) == prod.n_cells:
            cells = frozenset([0])
        brute = brute_force_lines(prod, cells)
        z, lam = find_bichromatic_line(prod, cells)
        bad += not (brute and (z, lam) in brute)
    return bad


@_timed
def row_lines(n_sets: int = 100, seed: int = 8) -> Row:
    rng = np.random.default_rng(seed)
    I = build_named_space("interval", "1/8")
    P2 = ProductSpace((I, I))
    four = build_named_space("finite", 1, k=4)
    P3 = ProductSpace((four, four, four))
    b2 = _line_agreement(P2, rng, n_sets)
    b3 = _line_agreement(P3, rng, n_sets)
    return Row("line", "line walk agrees with brute force on both products",
               "0 disagreements", f"interval^2: {b2}; 4-point^3: {b3}", b2 == 0 and b3 == 0)


@_timed
def row_z_survey(n: int = 2) -> Row:
    sp = build_named_space("Z", "1/128", curves=4, pieces=6)
    family = {z_target(c, n): landmark_cells(sp, z_target(c, n)) for c in Z_CASES}
    rows = af_survey(sp, family)
    ok = [r.name for r in rows if r.realized and r.method.startswith("special:Z:")]
    return Row("af-survey:Z", "all eight Z constructions realize their sets",
               "8/8 realized within one-cell collar", f"{len(ok)}/8 realized", len(ok) == 8)


@_timed
def row_quotient() -> Row:
    W = build_named_space("W", "1/32", curves=4, pieces=6)
    q = quotient_collapse(W, W.landmark("S_inf"), "s_inf")
    res = check_chain_of_sines(q)
    checks = {k: v for k, v in res.items() if k != "distances"}
    failed = [k for k, v in checks.items() if not v]
    return Row("quotient", "collapsing S_inf in W gives a chain of sine curves",
               "all structural checks pass", "all pass" if not failed else "failed: " + ", ".join(failed),
               not failed)


def soundness_cases():
    """(label, map, basepoint, exact K, exact eps) for the gallery maps at a desk-scale mesh."""
    h = "1/32"
    cases = []
    sp = build_named_space("interval", h)
    cases.append(("horseshoe", build_named_map(sp, "horseshoe"), Pt("I", Fraction(0)), 8, None))
    cases.append(("identity", build_named_map(sp, "identity"), Pt("I", Fraction(1, 4)), 6, None))
    cases.append(("constant", build_named_map(sp, "constant", at="-1"), sp.points["-1"], 4, None))
    arc = arc_realization(sp, frozenset(range(0, 20)))
    cases.append(("arc", arc.map, arc.basepoint, 4, float(sp.h) / 2))
    sp = build_named_space("sine", h)
    cases.append(("sine", build_named_map(sp, "sine"), sp.points["b"], 6, None))
    sp = build_named_space("extended_sine", h)
    cases.append(("extended_sine", build_named_map(sp, "extended_sine"), sp.points["b"], 6, None))
    sp = build_named_space("chain_of_sines", h)
    for n in (1, 2, 3):
        cases.append((f"chain n={n}", build_named_map(sp, "chain", n=n), sp.points[f"b{n}"], 6, None))
    sp = build_named_space("F4")
    cases.append(("F4", build_named_map(sp, "F4"), sp.points["origin"], 40, 0.05))
    sp = build_named_space("Z", h)
    for c in Z_CASES:
        m = build_named_map(sp, "Z:" + c, n=2)
        cases.append((f"Z:{c}", m, m.fixed[0], 5, None))
    return cases


def soundness_violations(label, fmap, x, K, eps) -> dict:
    sp = fmap.space
    g = transition_graph(sp, fmap)
    enc = alpha_enclosure(g, x)
    out = {"backward": len(closed_backward(g, enc.cells))}
    ex = alpha_exact(fmap, x, K, eps)
    out["exact"] = len(exact_in_enclosure(ex, enc))
    if sp.kind != "F4":
        fine_space = sp.refine(2)
        fine_map = MapSpec(fine_space, fmap.behaviors, fmap.name, fmap.params, fmap.fixed)
        fine = alpha_enclosure(transition_graph(fine_space, fine_map), x)
        out["refine"] = len(refinement_violations(enc, fine))
    return out


@_timed
def row_soundness() -> Row:
    total = {"backward": 0, "exact": 0, "refine": 0}
    bad = []
    cases = soundness_cases()
    for case in cases:
        v = soundness_violations(*case)
        for k, n in v.items():
            total[k] += n
        if any(v.values()):
            bad.append(case[0])
    ok = not any(total.values())
    return Row("soundness", f"engine properties on {len(cases)} gallery maps",
               "0 violations", ", ".join(f"{k}={v}" for k, v in total.items()) + (f" ({bad})" if bad else ""), ok)


ROWS = {
    "exactness": row_exactness,
    "sine": row_sine,
    "extended-sine": row_extended,
    "chain": row_chain,
    "F4": row_f4,
    "arc": row_arc,
    "zero-dim": row_zero_dim,
    "line": row_lines,
    "af-survey:Z": row_z_survey,
    "quotient": row_quotient,
    "soundness": row_soundness,
}


def _run_row(key: str) -> Row:
    return ROWS[key]()


def run_gallery(only: list[str] | None = None, jobs: int = 1) -> list[Row]:
    """Run the selected rows, in worker processes when ``jobs > 1``; order follows ``only``."""
    keys = only or list(ROWS)
    unknown = [k for k in keys if k not in ROWS]
    if unknown:
        raise KeyError(f"unknown gallery rows {unknown}; known: {list(ROWS)}")
    if jobs <= 1 or len(keys) == 1:
        return [_run_row(k) for k in keys]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_row, keys))


def summary_table(rows: list[Row]) -> str:
    out = ["claim\texpected\tobserved\tverdict"]
    for r in rows:
        out.append(f"{r.key}: {r.claim}\t{r.expected}\t{r.observed}\t{'pass' if r.passed else 'fail'}")
    return "\n".join(out) + "\n"


def render_figures() -> dict[str, str]:
    """SVG drawings of the sine curves, the chain and Z with their alpha enclosures."""
    from .render import render_svg

    figs = {}
    for kind, mname, params, base, target in [
        ("sine", "sine", {}, "b", "[a,b]"),
        ("extended_sine", "extended_sine", {}, "b", "[a,c]"),
        ("chain_of_sines", "chain", {"n": 2}, "b2", "A2"),
    ]:
        sp = build_named_space(kind, "1/32")
        g = transition_graph(sp, build_named_map(sp, mname, **params))
        E = alpha_enclosure(g, sp.points[base]).cells
        figs[kind] = render_svg(sp, {"landmark": sp.landmark(target).cells, "enclosure": E},
                                title=f"{kind}: alpha({base}) vs {target}")
    sp = build_named_space("Z", "1/32")
    m = build_named_map(sp, "Z:S_inf+[a,c]", n=2)
    E = alpha_enclosure(transition_graph(sp, m), m.fixed[0]).cells
    figs["Z"] = render_svg(sp, {"enclosure": E}, title="Z: alpha(b) for S_inf + [a,c]")
    return figs
