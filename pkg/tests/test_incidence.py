import random
from fractions import Fraction

import pytest

from ffexpand.errors import MixedFields, ValidationError
from ffexpand.field import make_field
from ffexpand import incidence as inc
from ffexpand.poly import parse_poly, validate_kernel

from oracles import incidences_naive


def kernel_over(ctx, text="(a+x)^2"):
    return validate_kernel(parse_poly(ctx, text))


def test_member_examples(f7):
    k = kernel_over(f7)
    assert inc.member(inc.KernelCurve(k, 0, 0), (1, f7.neg(1)), f7)
    assert inc.member(inc.Line(2, 3), (1, 5), f7)
    assert not inc.member(inc.Line(2, 3), (1, 4), f7)
    assert inc.member(inc.PolyGraph((3, 0, 1)), (2, 0), f7)  # 4 + 3 = 0 mod 7


def test_kernel_curve_has_q_points(f5):
    k = kernel_over(f5)
    for a in range(5):
        for b in range(5):
            pts = sum(inc.member(inc.KernelCurve(k, a, b), (x, y), f5)
                      for x in range(5) for y in range(5))
            assert pts == 5


def test_line_matches_polygraph_degree_one(f5):
    full = inc.PointSet.full(f5)
    for s in range(5):
        for t in range(5):
            line = inc.Line(s, t)
            graph = inc.PolyGraph((t, s))
            for pt in full.points:
                assert inc.member(line, pt, f5) == inc.member(graph, pt, f5)


def test_full_times_full_is_exact(f5):
    k = kernel_over(f5)
    p = inc.PointSet.full(f5)
    q_kernel = inc.CurveSet(f5, tuple(inc.KernelCurve(k, a, b)
                                      for a in range(5) for b in range(5)))
    rep = inc.incidences(p, q_kernel)
    assert rep.I == 125 and rep.deviation == 0 and rep.collisions == 0
    q_lines = inc.CurveSet(f5, tuple(inc.Line(s, t)
                                     for s in range(5) for t in range(5)))
    rep2 = inc.incidences(p, q_lines)
    assert rep2.I == 125 and rep2.deviation == 0


def test_empty_sets(f5):
    k = kernel_over(f5)
    assert inc.incidences(inc.PointSet(f5, frozenset()),
                          inc.CurveSet(f5, (inc.KernelCurve(k, 0, 0),))).I == 0
    assert inc.incidences(inc.PointSet.full(f5), inc.CurveSet(f5, ())).I == 0


def test_report_fields_and_bounds(f7):
    rng = random.Random(17)
    pts = inc.random_point_set(f7, 12, rng)
    curves = inc.random_curve_set(f7, "line", 9, rng)
    rep = inc.incidences(pts, curves)
    assert 0 <= rep.I <= 12 * 9
    assert rep.main == Fraction(12 * 9, 7)
    assert rep.deviation == abs(Fraction(rep.I) - rep.main)
    assert rep.ratio <= 1 + 1e-9  # constant-1 theorem


def test_against_naive_oracle(f7):
    k = kernel_over(f7)
    rng = random.Random(71)
    for variant in ("line", "polygraph", "kernel"):
        for _ in range(10):
            pts = inc.random_point_set(f7, rng.randrange(1, 30), rng)
            curves = inc.random_curve_set(f7, variant, rng.randrange(1, 20), rng,
                                          kernel=k, degree=2)
            assert inc.incidences(pts, curves).I == incidences_naive(pts, curves)


def test_monotonicity(f5):
    k = kernel_over(f5)
    rng = random.Random(5)
    pts = inc.random_point_set(f5, 8, rng)
    curves = inc.random_curve_set(f5, "kernel", 6, rng, kernel=k)
    base = inc.incidences(pts, curves).I
    extra_pt = next(iter(inc.PointSet.full(f5).points - pts.points))
    bigger = inc.PointSet(f5, pts.points | {extra_pt})
    assert inc.incidences(bigger, curves).I >= base
    extra_curve = inc.KernelCurve(k, 4, 4)
    bigger_q = inc.CurveSet(f5, curves.members + (extra_curve,))
    assert inc.incidences(pts, bigger_q).I >= base


def test_each_point_on_q_kernel_curves(f5):
    # summing curve sizes over all q^2 curves double-counts: q per point
    k = kernel_over(f5)
    all_curves = inc.CurveSet(f5, tuple(inc.KernelCurve(k, a, b)
                                        for a in range(5) for b in range(5)))
    rng = random.Random(2)
    pts = inc.random_point_set(f5, 7, rng)
    rep = inc.incidences(pts, all_curves)
    assert rep.I == 5 * len(pts)


def test_polygraph_requires_q_above_degree(f3):
    with pytest.raises(ValidationError):
        inc.CurveSet(f3, (inc.PolyGraph((0, 1, 2, 1)),))  # degree 3, q = 3


def test_mixed_fields(f5, f7):
    with pytest.raises(MixedFields):
        inc.incidences(inc.PointSet.full(f5),
                       inc.CurveSet(f7, (inc.Line(0, 0),)))


def test_theorem_sweep_rows_and_determinism(f7):
    rows1 = inc.theorem_sweep("line", [f7], 20, seed=9)
    rows2 = inc.theorem_sweep("line", [f7], 20, seed=9)
    assert rows1 == rows2
    assert len(rows1) == 20
    assert all(r["ratio"] <= 1 + 1e-9 for r in rows1)
    rows3 = inc.theorem_sweep("line", [f7], 20, seed=10)
    assert rows3 != rows1


def test_theorem_sweep_kernel_variant(f9):
    k = kernel_over(f9)
    rows = inc.theorem_sweep("kernel", [f9], 15, seed=1, kernels={f9.key: k})
    assert len(rows) == 15
    assert all(r["variant"] == "kernel" for r in rows)


def test_collision_reporting(f5):
    k = kernel_over(f5)
    # two identical lines by distinct construction is impossible; force a
    # duplicate parameter to confirm the surfacing path
    dup = inc.CurveSet(f5, (inc.Line(1, 1), inc.Line(1, 1)))
    rep = inc.incidences(inc.PointSet.full(f5), dup)
    assert rep.collisions == 1
