import math
import random

import pytest

from ffexpand.curves import (CurveParams, build_curve, count_points, factor_bivariate,
                             is_absolutely_irreducible, reducibility_locus_sweep,
                             weil_check)
from ffexpand.errors import (DegreeCapExceeded, NotAbsolutelyIrreducible,
                             SizeCapExceeded, ZeroPolynomial)
from ffexpand.field import extend, make_field
from ffexpand.poly import MultiPoly, lift, parse_poly, validate_kernel

from oracles import (absolutely_irreducible_bruteforce, certify_factorization,
                     has_linear_factor, reducible_bruteforce)


def kernel_over(ctx, text="(a+x)^2"):
    return validate_kernel(parse_poly(ctx, text))


def rand_poly(ctx, rng, deg, min_terms=1):
    terms = {}
    for _ in range(rng.randrange(min_terms, 7)):
        e1 = rng.randrange(deg + 1)
        e2 = rng.randrange(deg + 1 - e1)
        terms[(e1, e2)] = rng.randrange(ctx.q)
    return MultiPoly(ctx, terms, ("x1", "x2"))


def test_build_curve_examples(f3):
    k = kernel_over(f3)
    c0 = build_curve(k, (0, 0, 0, 0))
    assert c0.eq == parse_poly(f3, "x1*x2")
    c1 = build_curve(k, (0, 1, 0, 0))
    assert c1.eq == parse_poly(f3, "x1*x2 + 1")


def test_curve_parameter_swap_symmetry(f5):
    # swapping (a,b) with (c,d) transposes the curve equation
    k = kernel_over(f5, "a*x + a^2*x^2")
    rng = random.Random(4)
    for _ in range(30):
        a, b, c, d = (rng.randrange(5) for _ in range(4))
        eq1 = build_curve(k, (a, b, c, d)).eq
        eq2 = build_curve(k, (c, d, a, b)).eq
        swapped = MultiPoly(f5, {(j, i): v for (i, j), v in
                                 eq2._remap(("x1", "x2")).items()}, ("x1", "x2"))
        assert eq1 == swapped


def test_count_points_examples(f3):
    k = kernel_over(f3)
    assert count_points(build_curve(k, (0, 0, 0, 0))) == 5
    assert count_points(build_curve(k, (0, 1, 0, 0))) == 2


def test_count_points_extension_and_cache(f3):
    k = kernel_over(f3)
    curve = build_curve(k, (0, 1, 0, 0))
    n9 = count_points(curve, 2)
    # x1 x2 = -1 over F_9: x1 ranges over nonzero -> 8 points
    assert n9 == 8
    assert curve._counts == {1: 2, 2: 8} or curve._counts == {2: 8}


def test_count_points_cap(f3, monkeypatch):
    monkeypatch.setenv("FFEXPAND_CAP_OVERRIDE", '{"point_scan": 5}')
    k = kernel_over(f3)
    with pytest.raises(SizeCapExceeded):
        count_points(build_curve(k, (0, 1, 0, 0)))


def test_schwartz_zippel_bound(f7):
    k = kernel_over(f7)
    rng = random.Random(7)
    for _ in range(50):
        params = tuple(rng.randrange(7) for _ in range(4))
        curve = build_curve(k, params)
        d = curve.total_degree()
        assert count_points(curve) <= d * 7


def test_factor_examples(f3):
    xy = parse_poly(f3, "x1*x2")
    factors = factor_bivariate(xy)
    assert sorted(str(g) for g, _ in factors) == ["x1", "x2"]
    sq = parse_poly(f3, "x1^2 + x2^2")
    assert len(factor_bivariate(sq)) == 1
    f9c, emb = extend(f3, 2)
    split = factor_bivariate(lift(sq, emb))
    assert len(split) == 2
    assert all(g.total_degree() == 1 for g, _ in split)


def test_factor_rejects_zero_and_big(f3):
    with pytest.raises(ZeroPolynomial):
        factor_bivariate(MultiPoly.zero(f3))
    with pytest.raises(DegreeCapExceeded):
        factor_bivariate(parse_poly(f3, "x1^13 + x2"))


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_factor_roundtrip_random_products(p, n):
    ctx = make_field(p, n)
    rng = random.Random(1000 + ctx.q)
    done = 0
    while done < 200:
        parts = [rand_poly(ctx, rng, rng.randrange(1, 4)) for _ in range(rng.randrange(2, 4))]
        prod = MultiPoly.const(ctx, 1)
        for g in parts:
            prod = prod * g
        if prod.is_zero() or prod.total_degree() < 1 or prod.total_degree() > 9:
            continue
        done += 1
        assert certify_factorization(prod, ctx), str(prod)


def test_factor_multiplicities(f3):
    f = parse_poly(f3, "x1^2 * (x1 + x2)^3")
    factors = dict((str(g), m) for g, m in factor_bivariate(f))
    assert factors == {"x1": 2, "x1 + x2": 3}


def test_factor_pth_power_extraction():
    f2 = make_field(2)
    f = parse_poly(f2, "x1^2*x2^2 + x2^2")  # = (x1 x2 + x2)^2 = x2^2 (x1+1)^2
    factors = dict((str(g), m) for g, m in factor_bivariate(f))
    assert factors == {"x1 + 1": 2, "x2": 2}


def test_abs_irred_examples(f3):
    assert is_absolutely_irreducible(parse_poly(f3, "x1*x2 + 1"))
    assert not is_absolutely_irreducible(parse_poly(f3, "x1^2 + x2^2"))
    assert not is_absolutely_irreducible(parse_poly(f3, "x1*x2"))
    assert is_absolutely_irreducible(parse_poly(f3, "x1 + 2*x2"))


def test_abs_irred_scaling_invariance(f5):
    rng = random.Random(50)
    for _ in range(40):
        f = rand_poly(f5, rng, 3)
        if f.is_zero() or f.total_degree() < 1:
            continue
        flag = is_absolutely_irreducible(f)
        for c in range(2, 5):
            assert is_absolutely_irreducible(f.scale(c)) == flag


def test_abs_irred_against_bruteforce_random_f5(f5):
    rng = random.Random(555)
    for _ in range(60):
        f = rand_poly(f5, rng, 3)
        if f.is_zero() or f.total_degree() < 1:
            continue
        assert is_absolutely_irreducible(f) == absolutely_irreducible_bruteforce(f, f5)


def test_linear_factor_oracle_agrees_with_division(f5):
    rng = random.Random(505)
    for _ in range(80):
        f = rand_poly(f5, rng, 3)
        if f.is_zero() or f.total_degree() < 1:
            continue
        factors = factor_bivariate(f)
        has_lin = any(g.total_degree() == 1 for g, _ in factors)
        assert has_linear_factor(f, f5) == has_lin


def test_weil_check_example(f3):
    k = kernel_over(f3)
    curve = build_curve(k, (0, 1, 0, 0))
    rep = weil_check(curve)
    assert (rep.N, rep.q, rep.D) == (2, 3, 2)
    assert rep.within_interval
    with pytest.raises(NotAbsolutelyIrreducible):
        weil_check(build_curve(k, (0, 0, 0, 0)))


def test_degree_two_interval_everywhere(f7):
    # degree-2 absolutely irreducible curves satisfy |N - q| <= 3
    k = kernel_over(f7)
    report = reducibility_locus_sweep(k)
    for rec in report.records:
        if rec.abs_irred and rec.D == 2:
            assert abs(rec.N - 7) <= 3


def test_reducibility_sweep_q3(f3):
    k = kernel_over(f3)
    report = reducibility_locus_sweep(k)
    assert report.total == 81
    by_params = {rec.params: rec for rec in report.records}
    assert not by_params[CurveParams(0, 0, 0, 0)].abs_irred
    assert by_params[CurveParams(0, 1, 0, 0)].abs_irred
    assert 0 < report.reducible_count < report.total
    # the kernel (a+x)^2 yields curves reducible iff (a+c)^2 + b + d = 0,
    # exactly one d per (a, b, c): fraction = 1/q
    assert report.reducible_count == 27


def test_reducibility_fraction_trend():
    fractions = {}
    for q in (3, 5, 7):
        ctx = make_field(q)
        k = kernel_over(ctx)
        fractions[q] = reducibility_locus_sweep(k).fraction
    assert fractions[3] > fractions[5] > fractions[7]
    for q, frac in fractions.items():
        assert abs(q * frac - 1.0) < 1e-12


def test_sampled_sweep_is_deterministic(f7, monkeypatch):
    monkeypatch.setenv("FFEXPAND_CAP_OVERRIDE", '{"sweep_exhaustive_q": 5}')
    k = kernel_over(f7)
    r1 = reducibility_locus_sweep(k, sample=200, seed=42)
    r2 = reducibility_locus_sweep(k, sample=200, seed=42)
    assert r1.records == r2.records
    r3 = reducibility_locus_sweep(k, sample=200, seed=43)
    assert r3.records != r1.records
    with pytest.raises(SizeCapExceeded):
        reducibility_locus_sweep(k)
