"""Independent brute-force oracles used to validate the algebra engine.

These deliberately avoid the code paths they check: factor candidates
are enumerated by coefficient vectors and tested by exact division,
linear-divisor sweeps use the remainder-by-substitution identity, and
incidences are counted with the scalar membership predicate.
"""

from __future__ import annotations

import itertools

import numpy as np

from ffexpand.curves import factor_bivariate
from ffexpand.field import FieldCtx, extend
from ffexpand.poly import MultiPoly, lift
from ffexpand import incidence as inc


def all_bivariate(ctx: FieldCtx, max_degree: int, vars_=("x1", "x2"),
                  normalized: bool = True):
    """Every polynomial of total degree <= max_degree (up to scaling).

    `normalized` keeps one representative per scalar class: the first
    nonzero coefficient in monomial order is 1. Yields nonzero polys.
    """
    monomials = [(i, j) for i in range(max_degree + 1)
                 for j in range(max_degree + 1 - i)]
    monomials.sort()
    q = ctx.q
    for coeffs in itertools.product(range(q), repeat=len(monomials)):
        if not any(coeffs):
            continue
        if normalized:
            first = next(c for c in coeffs if c)
            if first != 1:
                continue
        yield MultiPoly(ctx, {m: c for m, c in zip(monomials, coeffs) if c}, vars_)


def divides(g: MultiPoly, f: MultiPoly) -> bool:
    """Exact bivariate divisibility by repeated leading-term elimination."""
    from ffexpand.curves import _to_bv
    from ffexpand.bifactor import bv_div
    xv = ("x1", "x2")
    return bv_div(_to_bv(f, *xv), _to_bv(g, *xv), f.ctx) is not None


def has_linear_factor(f: MultiPoly, ctx: FieldCtx) -> bool:
    """Vectorised sweep over all affine linear candidates.

    x1 + b x2 + c divides f iff f(-(b x2 + c), x2) vanishes identically;
    x2 + c divides f iff f(x1, -c) vanishes identically.
    """
    q = ctx.q
    terms = f._remap(("x1", "x2"))
    d = max(i for i, _ in terms)          # degree in x1, for the powers of s
    total = max(i + j for i, j in terms)  # bounds the x2-degree after substitution
    bs, cs = np.divmod(np.arange(q * q, dtype=np.int64), q)
    alpha = ctx.neg_vec(bs)
    beta = ctx.neg_vec(cs)
    # powers of s = alpha x2 + beta as coefficient arrays in x2
    s_pows = [[np.zeros(q * q, dtype=np.int64) for _ in range(d + 1)]
              for _ in range(d + 1)]
    s_pows[0][0] = np.ones(q * q, dtype=np.int64)
    for k in range(1, d + 1):
        prev = s_pows[k - 1]
        cur = s_pows[k]
        for e in range(k + 1):
            acc = np.zeros(q * q, dtype=np.int64)
            if e >= 1:
                acc = ctx.add_vec(acc, ctx.mul_vec(prev[e - 1], alpha)).astype(np.int64)
            if e <= k - 1:
                acc = ctx.add_vec(acc, ctx.mul_vec(prev[e], beta)).astype(np.int64)
            cur[e] = acc
    out = [np.zeros(q * q, dtype=np.int64) for _ in range(total + 1)]
    for (i, j), coef in terms.items():
        for e in range(i + 1):
            contrib = ctx.mul_vec(s_pows[i][e], np.int64(coef))
            out[e + j] = ctx.add_vec(out[e + j], contrib).astype(np.int64)
    nonzero = np.zeros(q * q, dtype=bool)
    for arr in out:
        nonzero |= arr != 0
    if not nonzero.all():
        return True
    # candidates x2 + c: substitute x2 = -c
    for c in range(q):
        val = {}
        x2 = ctx.neg(c)
        ok = True
        for (i, j), coef in terms.items():
            v = ctx.mul(coef, ctx.pow(x2, j)) if j else coef
            val[i] = ctx.add(val.get(i, 0), v)
        if all(v == 0 for v in val.values()):
            return True
    return False


def quadratic_divisor_candidates(f: MultiPoly, ctx: FieldCtx):
    """All candidates of total degree <= 2 passing a zero-set pre-filter.

    A divisor's zero set is contained in the dividend's, over the base
    field and its quadratic extension; survivors get the exact division.
    """
    from ffexpand.poly import grid_eval2
    ext, emb = extend(ctx, 2)
    f_zero = grid_eval2(f, "x1", "x2") == 0
    f_zero_ext = grid_eval2(lift(f, emb), "x1", "x2") == 0
    found = []
    for g in all_bivariate(ctx, 2):
        if g.total_degree() < 1:
            continue
        g_zero = grid_eval2(g, "x1", "x2") == 0
        if np.any(g_zero & ~f_zero):
            continue
        g_ext = grid_eval2(lift(g, emb), "x1", "x2") == 0
        if np.any(g_ext & ~f_zero_ext):
            continue
        found.append(g)
    return found


def reducible_bruteforce(f: MultiPoly, ctx: FieldCtx) -> bool:
    """Has a proper factor of total degree <= deg/2, by candidate enumeration."""
    d = f.total_degree()
    if d < 2:
        return False
    if has_linear_factor(f, ctx):
        return True
    if d >= 4:
        for g in quadratic_divisor_candidates(f, ctx):
            if g.total_degree() == 2 and divides(g, f):
                return True
    return False


def absolutely_irreducible_bruteforce(f: MultiPoly, ctx: FieldCtx,
                                      max_candidate_degree: int = 1) -> bool:
    """Brute-force over every extension up to the total degree.

    Enumerates divisor candidates of total degree <= deg/2 capped at
    max_candidate_degree (degree-1 candidates decide everything for
    inputs of total degree <= 3).
    """
    d = f.total_degree()
    if d < 1:
        return False
    if d == 1:
        return True
    for m in range(1, d + 1):
        if m == 1:
            ff, ctx_m = f, ctx
        else:
            ctx_m, emb = extend(ctx, m)
            ff = lift(f, emb)
        if has_linear_factor(ff, ctx_m):
            return False
        if max_candidate_degree >= 2 and d >= 4:
            for g in quadratic_divisor_candidates(ff, ctx_m):
                if g.total_degree() == 2 and divides(g, ff):
                    return False
    return True


def certify_factorization(f: MultiPoly, ctx: FieldCtx) -> bool:
    """Check the implementation's factorization as a certificate.

    The factor product must reproduce f up to a constant and every
    reported factor must itself resist the candidate sweep (degree <= 2
    candidates), which proves irreducibility for factors of degree <= 5.
    """
    factors = factor_bivariate(f)
    prod = MultiPoly.const(ctx, 1)
    for g, m in factors:
        prod = prod * (g ** m)
    if set(prod.terms) != set(f.terms):
        return False
    e0 = next(iter(f.terms))
    c = ctx.mul(f.terms[e0], ctx.inv(prod.terms[e0]))
    if any(ctx.mul(prod.terms[e], c) != f.terms[e] for e in f.terms):
        return False
    for g, _ in factors:
        if g.total_degree() >= 2 and has_linear_factor(g, ctx):
            return False
        if g.total_degree() >= 4 and reducible_bruteforce(g, ctx):
            return False
    return True


def incidences_naive(points: inc.PointSet, curves: inc.CurveSet) -> int:
    """Double loop over the membership predicate."""
    ctx = points.ctx
    return sum(1 for p in points.points for c in curves.members
               if inc.member(c, p, ctx))
