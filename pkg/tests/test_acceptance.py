"""Acceptance criteria, one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL
lines. Bounds whose constants are theorems are asserted exactly (with
float slack only); asymptotic statements are asserted as bounded-ratio
trends, never against invented constants.
"""

import itertools
import math
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from ffexpand.curves import build_curve, count_points, is_absolutely_irreducible, \
    reducibility_locus_sweep
from ffexpand.errors import FFExpandError
from ffexpand.expansion import erdos_spec, expansion_report, image_size
from ffexpand.field import make_field, parse_field_spec
from ffexpand.graph import build_graph, cube_entry, mixing_check, spectrum
from ffexpand.harness import (additive_equivalence_scan, composition_exhaustive_scan,
                              composition_harness)
from ffexpand.incidence import theorem_sweep
from ffexpand.poly import parse_poly, validate_kernel
from ffexpand.seeding import stable_seed

from conftest import lambda2_from
from oracles import absolutely_irreducible_bruteforce, all_bivariate, \
    certify_factorization, reducible_bruteforce

KERNELS = ["(a+x)^2", "(a+x)^3", "a*x + a^2*x^2"]
QLIST = ["7^1", "3^2", "11^1", "13^1", "2^4", "5^2", "3^3", "7^2"]

_SWEEPS: dict = {}


def _verdict(num, ok, desc):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}: {desc}"
    print(line)
    assert ok, line


def _valid_cells(kernel_string):
    cells = []
    for spec in QLIST:
        ctx = parse_field_spec(spec)
        try:
            validate_kernel(parse_poly(ctx, kernel_string))
        except FFExpandError:
            continue
        cells.append(spec)
    return cells


def _sweep(spec, kernel_string="(a+x)^2"):
    key = (spec, kernel_string)
    if key not in _SWEEPS:
        ctx = parse_field_spec(spec)
        kernel = validate_kernel(parse_poly(ctx, kernel_string))
        _SWEEPS[key] = reducibility_locus_sweep(kernel)
    return _SWEEPS[key]


def test_criterion_01_regularity_and_principal_eigenvalue(spectral_cell):
    failures = []
    checked = 0
    for kern in KERNELS:
        for spec in _valid_cells(kern):
            g, evals = spectral_cell(kern, spec)
            q = g.q
            checked += 1
            if not np.all(g.row_sums() == q):
                failures.append((kern, spec, "row sums"))
            lam1 = float(evals[-1])
            if abs(lam1 - q) > 1e-6 * q:
                failures.append((kern, spec, f"lambda1 {lam1}"))
    assert checked >= 17  # q=16 excluded everywhere, q in {9, 27} for two kernels
    _verdict(1, not failures,
             f"row sums exactly q and |lambda1 - q| <= 1e-6 q on {checked} "
             f"(kernel, field) cells; failures: {failures}")


def test_criterion_02_cube_identity():
    start = time.time()
    mismatches = 0
    checked = 0
    for spec in ["3^1", "5^1", "7^1"]:
        ctx = parse_field_spec(spec)
        kernel = validate_kernel(parse_poly(ctx, "(a+x)^2"))
        g = build_graph(kernel)
        a3 = np.linalg.matrix_power(g.adjacency_matrix(np.int64), 3)
        counts: dict = {}
        q = ctx.q
        for ab in range(q * q):
            for cd in range(q * q):
                t = (*g.vertex_pair(ab), *g.vertex_pair(cd))
                curve = build_curve(kernel, t)
                key = curve.eq.key()
                if key not in counts:
                    counts[key] = count_points(curve)
                checked += 1
                if a3[ab, cd] != counts[key]:
                    mismatches += 1
    ctx = parse_field_spec("5^2")
    kernel = validate_kernel(parse_poly(ctx, "(a+x)^2"))
    g = build_graph(kernel)
    rng = random.Random(stable_seed("acceptance-cube", 25))
    counts = {}
    for _ in range(1000):
        t = tuple(rng.randrange(25) for _ in range(4))
        curve = build_curve(kernel, t)
        key = curve.eq.key()
        if key not in counts:
            counts[key] = count_points(curve)
        checked += 1
        if cube_entry(g, (t[0], t[1]), (t[2], t[3])) != counts[key]:
            mismatches += 1
    elapsed = time.time() - start
    _verdict(2, mismatches == 0 and elapsed <= 60.0,
             f"{checked} path-count/point-count identities, {mismatches} mismatches, "
             f"{elapsed:.1f}s (budget 60s)")


def test_criterion_03_spectral_bound_trend(spectral_cell):
    failures = []
    lines = []
    for kern in KERNELS:
        cells = _valid_cells(kern)
        ratios = []
        for spec in cells:
            g, evals = spectral_cell(kern, spec)
            lam2 = lambda2_from(evals)
            ratios.append((g.q, lam2 / g.q ** (5.0 / 6.0)))
            it = spectrum(g, "iterative", seed=1)
            if lam2 > 0 and abs(it.lambda2_abs - lam2) > 1e-6 * lam2:
                failures.append((kern, spec, "exact/iterative disagree",
                                 lam2, it.lambda2_abs))
        ratios.sort()
        threshold = 2.0 * max(r for _, r in ratios[:3])
        for q, r in ratios:
            if r > threshold + 1e-12:
                failures.append((kern, q, "ratio above trend bound", r, threshold))
        lines.append(f"{kern}: " + " ".join(f"q={q}:{r:.3f}" for q, r in ratios))
    _verdict(3, not failures,
             "lambda2/q^(5/6) bounded by 2x the small-q maximum and exact==iterative "
             f"to 1e-6 [{'; '.join(lines)}] failures: {failures}")


def test_criterion_04_mixing_audit(spectral_cell):
    violations = 0
    cells = 0
    for kern in KERNELS:
        for spec in _valid_cells(kern):
            g, evals = spectral_cell(kern, spec)
            rep = mixing_check(g, lambda2_from(evals), trials=500, seed=4)
            violations += len(rep.violations)
            cells += 1
    _verdict(4, violations == 0,
             f"500 random (S,T) pairs per graph over {cells} graphs, "
             f"{violations} mixing violations")


def test_criterion_05_constant_one_incidence_bounds():
    fields = [parse_field_spec(s) for s in ("7^1", "11^1", "13^1")]
    worst = 0.0
    rows = theorem_sweep("line", fields, trials=200, seed=55)
    worst = max(worst, max(r["ratio"] for r in rows))
    for degree in (2, 3):
        rows = theorem_sweep("polygraph", fields, trials=200, seed=56 + degree,
                             degree=degree)
        worst = max(worst, max(r["ratio"] for r in rows))
    _verdict(5, worst <= 1 + 1e-9,
             f"lines and degree-2/3 graphs over q in {{7,11,13}}, 200 instances "
             f"each: max deviation ratio {worst:.6f} <= 1 + 1e-9")


def test_criterion_06_weil_dichotomy():
    violations = 0
    checked = 0
    for spec in ["7^1", "3^2", "11^1", "13^1"]:
        report = _sweep(spec)
        q = report.q
        for rec in report.records:
            if not rec.abs_irred:
                continue
            checked += 1
            bound = (rec.D - 1) * (rec.D - 2) * math.sqrt(q) + rec.D + 1
            if abs(rec.N - q) > bound:
                violations += 1
    _verdict(6, violations == 0,
             f"{checked} absolutely irreducible curves at q in {{7,9,11,13}}: "
             f"{violations} outside (D-1)(D-2)sqrt(q)+D+1")


def test_criterion_07_reducibility_locus():
    fractions = {}
    for spec in ["3^1", "5^1", "7^1", "11^1"]:
        report = _sweep(spec)
        fractions[report.q] = report.fraction
        if not (0 < report.reducible_count < report.total):
            _verdict(7, False, f"locus at q={report.q} empty or everything")
    base = 3 * fractions[3]
    trend_ok = all(q * f <= 2 * base + 1e-12 for q, f in fractions.items())
    _verdict(7, trend_ok,
             "reducible fraction nonzero, proper, and q*fraction(q) within 2x of "
             f"its q=3 value: {({q: round(q * f, 6) for q, f in fractions.items()})}")


def test_criterion_08_absolute_irreducibility_oracle():
    disagreements = 0
    checked = 0
    for p in (2, 3):
        ctx = make_field(p)
        for f in all_bivariate(ctx, 3):
            if f.total_degree() < 1:
                continue
            checked += 1
            if is_absolutely_irreducible(f) != absolutely_irreducible_bruteforce(f, ctx):
                disagreements += 1
    ctx5 = make_field(5)
    rng = random.Random(stable_seed("acceptance-oracle", 5))
    sampled = 0
    while sampled < 500:
        terms = {}
        for _ in range(rng.randrange(1, 8)):
            e1 = rng.randrange(5)
            e2 = rng.randrange(5 - e1)
            terms[(e1, e2)] = rng.randrange(5)
        from ffexpand.poly import MultiPoly
        f = MultiPoly(ctx5, terms, ("x1", "x2"))
        if f.is_zero() or f.total_degree() < 1 or f.total_degree() > 4:
            continue
        sampled += 1
        from ffexpand.curves import factor_bivariate
        factors = factor_bivariate(f)
        impl_reducible = len(factors) > 1 or factors[0][1] > 1 \
            or factors[0][0].total_degree() < f.total_degree()
        if impl_reducible != reducible_bruteforce(f, ctx5):
            disagreements += 1
            continue
        if not certify_factorization(f, ctx5):
            disagreements += 1
            continue
        if f.total_degree() <= 3:
            if is_absolutely_irreducible(f) != absolutely_irreducible_bruteforce(f, ctx5):
                disagreements += 1
    _verdict(8, disagreements == 0,
             f"{checked} exhaustive polynomials (deg<=3, F_2 and F_3) plus "
             f"{sampled} random degree<=4 samples over F_5: {disagreements} "
             "disagreements with brute-force enumeration")


def test_criterion_09_composition_lemma_harness():
    bad = 0
    for spec in ("5^1", "7^1", "3^2"):
        ctx = parse_field_spec(spec)
        result = composition_harness(ctx, trials=500, seed=9)
        bad += result["counterexamples"] + result["construction_failures"] \
            + result["relation_failures"]
        if result["hypothesis_cases"] != 500:
            bad += 1
    scan = composition_exhaustive_scan(make_field(3), max_degree=2)
    bad += scan["counterexamples"]
    _verdict(9, bad == 0,
             "500 forced-hypothesis instances per field (F_5, F_7, F_9) all "
             f"conclude; exhaustive deg<=2 scan over F_3 covered "
             f"{scan['hypothesis_cases']} hypothesis cases with 0 counterexamples")


def test_criterion_10_additive_equivalence():
    results = {}
    for p in (2, 3):
        ctx = make_field(p)
        results[p] = additive_equivalence_scan(ctx)  # degree cap p^2
    bad = sum(r["disagreements"] for r in results.values())
    _verdict(10, bad == 0,
             "formal additivity iff p-power decomposition, exhaustively: "
             + ", ".join(f"p={p}: {r['checked']} polys, {r['additive_count']} additive"
                         for p, r in results.items()))


def test_criterion_11_expansion_pipeline(spectral_cell):
    bad = []
    densities = (0.15, 0.3, 0.6, 1.0)
    for spec in ("5^2", "7^2"):
        ctx = parse_field_spec(spec)
        q = ctx.q
        tern = erdos_spec(ctx, 2)
        if image_size(tern, list(range(q)), list(range(q)), list(range(q))) != q:
            bad.append((spec, "full image not everything"))
        _, evals = spectral_cell("(a+x)^2", spec)
        lam2 = lambda2_from(evals)
        bound = (lam2 * q) ** 2
        missing_by_density = {d: [] for d in densities}
        for trial in range(50):
            rng = random.Random(stable_seed("acceptance-expansion", spec, trial))
            perms = [rng.sample(range(q), q) for _ in range(3)]
            prev_missing = None
            for d in densities:
                size = max(1, round(d * q))
                xs, ys, zs = (sorted(perm[:size]) for perm in perms)
                rep = expansion_report(tern, xs, ys, zs)
                if rep.incidence_count != 0:
                    bad.append((spec, trial, d, "nonzero incidences"))
                if rep.p_set_size * rep.q_set_size > bound + 1e-6:
                    bad.append((spec, trial, d, "eigenvalue chain violated"))
                if prev_missing is not None and rep.missing > prev_missing:
                    bad.append((spec, trial, d, "missing grew with nested sets"))
                prev_missing = rep.missing
                missing_by_density[d].append(rep.missing)
        # ratio trend recorded, not asserted: the headline constant is out of
        # desk-scale reach by design
        means = {d: sum(v) / len(v) for d, v in missing_by_density.items()}
        print(f"    [info] q={q}: mean missing by density "
              + " ".join(f"{d}:{means[d]:.2f}" for d in densities))
    _verdict(11, not bad,
             "zero-incidence and eigenvalue-chain identities exact on 100 trials x 2 "
             f"fields x 4 nested densities; full-field image equals q; issues: {bad}")


def test_criterion_12_determinism(tmp_path):
    base = ["incidence", "--theorem", "1", "--field", "7^1,11^1", "--trials", "40",
            "--seed", "77", "--no-figures"]
    outs = []
    for name in ("r1", "r2"):
        res = subprocess.run(
            [sys.executable, "-m", "ffexpand.cli", *base, "--out", f"{name}.csv"],
            capture_output=True, text=True, cwd=tmp_path)
        assert res.returncode == 0, res.stderr
        outs.append(((tmp_path / f"{name}.csv").read_bytes(),
                     (tmp_path / f"{name}_summary.json").read_text()))
    same_csv = outs[0][0] == outs[1][0]
    import json
    s1, s2 = (json.loads(o[1]) for o in outs)
    _verdict(12, same_csv and s1 == s2,
             "identical config + seed reruns produce byte-identical CSV and "
             "equal summaries")
