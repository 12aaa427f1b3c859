"""Bivariate factorization over small finite fields.

A bivariate polynomial is carried as a list of UniPoly: entry i is the
coefficient (a polynomial in the second variable) of the i-th power of
the main variable. The pipeline is the classical one:

  content/primitive split -> squarefree split via gcd with the main-
  variable derivative (with p-th power extraction when both derivatives
  vanish) -> pick a fibre point where the leading coefficient survives
  and the specialisation stays squarefree -> factor the fibre, Hensel-
  lift the factors to power-series precision past every candidate's
  degree -> subset recombination with exact division tests.

Tiny base fields may admit no usable fibre point in either variable
order. In that case the polynomial is factored over an extension where
a point exists and the factors are regrouped along Frobenius orbits;
each orbit product has coefficients fixed by z -> z^q and is pulled back
to the base field.
"""

from __future__ import annotations

import itertools

from .caps import get_caps
from .errors import SizeCapExceeded
from .field import FieldCtx, extend
from . import unipoly
from .unipoly import UniPoly

BV = list  # list[UniPoly]; index = power of the main variable


# ---------------------------------------------------------------------------
# Basic arithmetic on the list-of-UniPoly representation


def bv_trim(c: BV) -> BV:
    while c and c[-1].is_zero():
        c.pop()
    return c


def bv_is_zero(c: BV) -> bool:
    return not c


def bv_deg_x(c: BV) -> int:
    return len(c) - 1


def bv_deg_y(c: BV) -> int:
    return max((u.degree() for u in c), default=-1)


def bv_total_degree(c: BV) -> int:
    return max((i + u.degree() for i, u in enumerate(c) if not u.is_zero()), default=-1)


def bv_mul(a: BV, b: BV, ctx: FieldCtx) -> BV:
    if not a or not b:
        return []
    out = [UniPoly.zero(ctx) for _ in range(len(a) + len(b) - 1)]
    for i, ai in enumerate(a):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b):
            if not bj.is_zero():
                out[i + j] = out[i + j] + ai * bj
    return bv_trim(out)


def bv_sub(a: BV, b: BV) -> BV:
    out = []
    for i in range(max(len(a), len(b))):
        x = a[i] if i < len(a) else None
        y = b[i] if i < len(b) else None
        if x is None:
            out.append(-y)
        elif y is None:
            out.append(x)
        else:
            out.append(x - y)
    return bv_trim(out)


def bv_scale_uni(a: BV, u: UniPoly) -> BV:
    return bv_trim([c * u for c in a])


def bv_div(a: BV, b: BV, ctx: FieldCtx) -> BV | None:
    """Exact quotient a / b in F_q[y][x], or None when b does not divide a."""
    rem = list(a)
    bv_trim(rem)
    if not b:
        raise ZeroDivisionError("bivariate division by zero")
    db = bv_deg_x(b)
    lead_b = b[-1]
    quo = [UniPoly.zero(ctx) for _ in range(max(0, len(rem) - db))]
    while len(rem) - 1 >= db and rem:
        shift = len(rem) - 1 - db
        q_coef, r_coef = rem[-1].divmod(lead_b)
        if not r_coef.is_zero():
            return None
        quo[shift] = q_coef
        for i, bi in enumerate(b):
            if not bi.is_zero():
                rem[shift + i] = rem[shift + i] - q_coef * bi
        bv_trim(rem)
    return quo if not rem else None


def bv_content(a: BV) -> UniPoly:
    ctx = a[0].ctx
    g = UniPoly.zero(ctx)
    for c in a:
        if not c.is_zero():
            g = unipoly.gcd(g, c)
            if g.degree() == 0:
                break
    return g


def bv_primitive(a: BV) -> tuple[UniPoly, BV]:
    """(content, primitive part); content monic, primitive * content = a up to a unit."""
    cont = bv_content(a)
    if cont.degree() < 1:
        return cont, list(a)
    ctx = a[0].ctx
    prim = [c.divmod(cont)[0] for c in a]
    return cont, prim


def bv_eval_y(a: BV, y0: int, ctx: FieldCtx) -> UniPoly:
    return UniPoly(ctx, (c.evaluate(y0) for c in a))


def bv_shift_y(a: BV, c: int, ctx: FieldCtx) -> BV:
    """Substitute y -> y + c in every coefficient."""
    lin = UniPoly(ctx, (c, 1))
    return [u.compose(lin) for u in a]


def bv_derivative_x(a: BV, ctx: FieldCtx) -> BV:
    out = []
    for e in range(1, len(a)):
        out.append(a[e].scale(ctx.scalar(e)))
    return bv_trim(out)


def bv_transpose(a: BV, ctx: FieldCtx) -> BV:
    dy = bv_deg_y(a)
    out = [[0] * len(a) for _ in range(dy + 1)]
    for i, u in enumerate(a):
        for j, c in enumerate(u.coeffs):
            out[j][i] = c
    return bv_trim([UniPoly(ctx, row) for row in out])


def bv_map_coeffs(a: BV, fn, target: FieldCtx) -> BV:
    return [UniPoly(target, (fn(c) for c in u.coeffs)) for u in a]


def bv_normalize(a: BV, ctx: FieldCtx) -> BV:
    """Scale so that the leading coefficient of the leading UniPoly is 1."""
    if not a:
        return a
    c = a[-1].lead()
    if c == 1:
        return list(a)
    inv = ctx.inv(c)
    return [u.scale(inv) for u in a]


def bv_key(a: BV) -> tuple:
    return tuple(u.coeffs for u in a)


def bv_prem(a: BV, b: BV, ctx: FieldCtx) -> BV:
    """Pseudo-remainder of a by b along the main variable."""
    r = list(a)
    bv_trim(r)
    db = bv_deg_x(b)
    lead_b = b[-1]
    while r and len(r) - 1 >= db:
        shift = len(r) - 1 - db
        lead_r = r[-1]
        r = [c * lead_b for c in r]
        for i, bi in enumerate(b):
            if not bi.is_zero():
                r[shift + i] = r[shift + i] - lead_r * bi
        bv_trim(r)
    return r


def bv_gcd(a: BV, b: BV, ctx: FieldCtx) -> BV:
    """GCD via the primitive polynomial remainder sequence."""
    if bv_is_zero(a):
        return bv_normalize(b, ctx)
    if bv_is_zero(b):
        return bv_normalize(a, ctx)
    ca, pa = bv_primitive(a)
    cb, pb = bv_primitive(b)
    cont = unipoly.gcd(ca, cb) if ca.degree() > 0 or cb.degree() > 0 else UniPoly.const(ctx, 1)
    if bv_deg_x(pa) < bv_deg_x(pb):
        pa, pb = pb, pa
    while not bv_is_zero(pb):
        r = bv_prem(pa, pb, ctx)
        pa, pb = pb, bv_primitive(r)[1] if r else []
    g = bv_primitive(pa)[1]
    if cont.degree() > 0:
        g = bv_scale_uni(g, cont)
    return bv_normalize(g, ctx)


# ---------------------------------------------------------------------------
# Truncated power series in t with polynomial-in-x structure on top


def s_mul(a: list[int], b: list[int], k: int, ctx: FieldCtx) -> list[int]:
    out = [0] * k
    for i, ai in enumerate(a[:k]):
        if ai:
            for j, bj in enumerate(b[:k - i]):
                if bj:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(ai, bj))
    return out


def s_inv(a: list[int], k: int, ctx: FieldCtx) -> list[int]:
    inv0 = ctx.inv(a[0])
    out = [inv0] + [0] * (k - 1)
    for m in range(1, k):
        acc = 0
        for i in range(1, min(m, len(a) - 1) + 1):
            if i < len(a) and a[i]:
                acc = ctx.add(acc, ctx.mul(a[i], out[m - i]))
        out[m] = ctx.neg(ctx.mul(inv0, acc))
    return out


def ps_from_bv(a: BV, k: int) -> list[list[int]]:
    return [list(u.coeffs) + [0] * (k - len(u.coeffs)) for u in a]


def ps_mul(a: list[list[int]], b: list[list[int]], k: int, ctx: FieldCtx) -> list[list[int]]:
    out = [[0] * k for _ in range(len(a) + len(b) - 1)]
    for i, ai in enumerate(a):
        if not any(ai):
            continue
        for j, bj in enumerate(b):
            if any(bj):
                prod = s_mul(ai, bj, k, ctx)
                tgt = out[i + j]
                for m in range(k):
                    if prod[m]:
                        tgt[m] = ctx.add(tgt[m], prod[m])
    while out and not any(out[-1]):
        out.pop()
    return out


def ps_to_bv(a: list[list[int]], ctx: FieldCtx) -> BV:
    return bv_trim([UniPoly(ctx, series) for series in a])


def _slice_t(a: list[list[int]], m: int, ctx: FieldCtx) -> UniPoly:
    """The coefficient of t^m as a polynomial in x."""
    return UniPoly(ctx, (series[m] if m < len(series) else 0 for series in a))


def _hensel_pair(fbar: list[list[int]], g0: UniPoly, h0: UniPoly,
                 k: int, ctx: FieldCtx) -> tuple[list[list[int]], list[list[int]]]:
    """Lift fbar = g0*h0 (mod t) to G*H (mod t^k) with G, H monic in x."""
    _, a, b = unipoly.xgcd(g0, h0)  # a*g0 + b*h0 = 1
    G = [[c] + [0] * (k - 1) for c in g0.coeffs]
    H = [[c] + [0] * (k - 1) for c in h0.coeffs]
    for step in range(1, k):
        prod = ps_mul(G, H, k, ctx)
        delta = _slice_t(fbar, step, ctx) - _slice_t(prod, step, ctx)
        if delta.is_zero():
            continue
        u = (b * delta) % g0
        num = delta - u * h0
        v, rem = num.divmod(g0)
        assert rem.is_zero(), "Hensel correction failed to divide"
        for e, c in enumerate(u.coeffs):
            if c:
                G[e][step] = ctx.add(G[e][step], c)
        for e, c in enumerate(v.coeffs):
            if c:
                H[e][step] = ctx.add(H[e][step], c)
    return G, H


def _lift_tree(fbar: list[list[int]], mods: list[UniPoly], k: int,
               ctx: FieldCtx) -> list[list[list[int]]]:
    if len(mods) == 1:
        return [fbar]
    mid = len(mods) // 2
    g0 = mods[0]
    for m in mods[1:mid]:
        g0 = g0 * m
    h0 = mods[mid]
    for m in mods[mid + 1:]:
        h0 = h0 * m
    G, H = _hensel_pair(fbar, g0, h0, k, ctx)
    return _lift_tree(G, mods[:mid], k, ctx) + _lift_tree(H, mods[mid:], k, ctx)


# ---------------------------------------------------------------------------
# Squarefree primitive factorization


def _good_point(f: BV, ctx: FieldCtx) -> int | None:
    """First y0 where the leading coefficient survives and the fibre is squarefree."""
    lead = f[-1]
    for y0 in ctx.enumerate():
        if lead.evaluate(y0) == 0:
            continue
        fibre = bv_eval_y(f, y0, ctx)
        deriv = fibre.derivative()
        if deriv.is_zero():
            continue
        if unipoly.gcd(fibre, deriv).degree() == 0:
            return y0
    return None


def _hensel_factor(f: BV, y0: int, ctx: FieldCtx, seed: int) -> list[BV]:
    """Irreducible factors of a squarefree primitive f with a good point y0."""
    g = bv_shift_y(f, y0, ctx)
    lead = g[-1]
    k = bv_deg_y(g) + lead.degree() + 1
    fibre = bv_eval_y(g, 0, ctx)
    fibre_factors = unipoly.factor_squarefree(fibre.monic(), seed)
    if len(fibre_factors) == 1:
        return [list(f)]
    linv = s_inv(list(lead.coeffs) + [0] * (k - len(lead.coeffs)), k, ctx)
    fbar = [s_mul(list(u.coeffs) + [0] * (k - len(u.coeffs)), linv, k, ctx) for u in g]
    lifted = _lift_tree(fbar, fibre_factors, k, ctx)
    # the leading coefficient as a degree-0 polynomial in x over the series ring
    lead_ps = [list(lead.coeffs) + [0] * (k - len(lead.coeffs))]

    def candidate(subset) -> BV:
        prod = lead_ps
        for i in subset:
            prod = ps_mul(prod, lifted[i], k, ctx)
        return bv_primitive(ps_to_bv(prod, ctx))[1]

    remaining = list(range(len(lifted)))
    current = g
    found: list[BV] = []
    size = 1
    while 2 * size <= len(remaining):
        hit = False
        for subset in itertools.combinations(remaining, size):
            cand = candidate(subset)
            if bv_deg_x(cand) < 1:
                continue
            quo = bv_div(current, cand, ctx)
            if quo is not None:
                found.append(cand)
                current = quo
                remaining = [i for i in remaining if i not in subset]
                hit = True
                break
        if not hit:
            size += 1
    if bv_total_degree(current) > 0:
        found.append(current)
    return [bv_shift_y(h, ctx.neg(y0), ctx) for h in found]


def _factor_by_extension(f: BV, ctx: FieldCtx, seed: int) -> list[BV]:
    """Factor over an extension with a usable fibre, then descend Frobenius orbits."""
    caps = get_caps()
    d = bv_total_degree(f)
    r = 2
    while True:
        if ctx.q ** r > caps.field_size:
            raise SizeCapExceeded("extension for factorization", ctx.q ** r, caps.field_size)
        ext, emb = extend(ctx, r)
        fe = bv_map_coeffs(f, emb, ext)
        y0 = _good_point(fe, ext)
        if y0 is not None:
            ext_factors = _hensel_factor(fe, y0, ext, seed)
            return _descend_orbits(ext_factors, ctx, ext, emb)
        assert ctx.q ** r <= d + 2 * d * d + 1, "no good point below the proven bound"
        r += 1


def _descend_orbits(factors: list[BV], ctx: FieldCtx, ext: FieldCtx, emb) -> list[BV]:
    norm = [bv_normalize(g, ext) for g in factors]
    index = {bv_key(g): i for i, g in enumerate(norm)}
    frob = lambda z: ext.pow(z, ctx.q)
    out = []
    used: set[int] = set()
    for i, g in enumerate(norm):
        if i in used:
            continue
        orbit = [i]
        used.add(i)
        cur = bv_map_coeffs(g, frob, ext)
        while bv_key(cur) != bv_key(g):
            j = index[bv_key(cur)]
            orbit.append(j)
            used.add(j)
            cur = bv_map_coeffs(cur, frob, ext)
        prod = norm[orbit[0]]
        for j in orbit[1:]:
            prod = bv_mul(prod, norm[j], ext)
        out.append(bv_map_coeffs(bv_normalize(prod, ext), emb.section, ctx))
    return out


def _factor_squarefree_primitive(f: BV, ctx: FieldCtx, seed: int) -> list[tuple[BV, int]]:
    y0 = _good_point(f, ctx)
    if y0 is not None:
        return [(g, 1) for g in _hensel_factor(f, y0, ctx, seed)]
    # No usable fibre along x over the base field: try the swapped
    # orientation, which often has one (cheaper than extending).
    tr = bv_transpose(f, ctx)
    cont, prim = bv_primitive(tr)
    if bv_deg_x(prim) >= 1:
        y1 = _good_point(prim, ctx)
        if y1 is not None:
            results: list[tuple[BV, int]] = []
            if cont.degree() > 0:
                # content of the transpose = factors in the original main variable alone
                for fac in unipoly.factor_squarefree(cont, seed):
                    results.append(([fac], 1))
            results.extend((g, 1) for g in _hensel_factor(prim, y1, ctx, seed))
            return [(bv_transpose(g, ctx), m) for g, m in results]
    # Extension fallback stays in the x-orientation: gcd(f, f_x) = 1 holds
    # there (certified by the squarefree split), so the discriminant
    # resultant is a nonzero polynomial and a good fibre exists once the
    # field outgrows its root count. The transposed orientation carries no
    # such guarantee (a factor may have zero derivative in that variable).
    return [(g, 1) for g in _factor_by_extension(f, ctx, seed)]


def factor_bv(f: BV, ctx: FieldCtx, seed: int = 0) -> list[tuple[BV, int]]:
    """Irreducible factors with multiplicities; product equals f up to a unit."""
    f = bv_trim(list(f))
    if bv_total_degree(f) < 1:
        return []
    if bv_deg_x(f) == 0:
        return [([fac], m) for fac, m in unipoly.factor(f[0], seed)]
    out: list[tuple[BV, int]] = []
    cont, f = bv_primitive(f)
    if cont.degree() > 0:
        out.extend(([fac], m) for fac, m in unipoly.factor(cont, seed))
    fx = bv_derivative_x(f, ctx)
    if bv_is_zero(fx):
        tr = bv_transpose(f, ctx)
        if bv_is_zero(bv_derivative_x(tr, ctx)):
            # both partials vanish: f is a p-th power
            root = _pth_root_bv(f, ctx)
            out.extend((g, m * ctx.p) for g, m in factor_bv(root, ctx, seed))
            return _merge(out)
        out.extend((bv_transpose(g, ctx), m) for g, m in factor_bv(tr, ctx, seed))
        return _merge(out)
    g = bv_gcd(f, fx, ctx)
    if bv_total_degree(g) > 0:
        rest = bv_div(f, g, ctx)
        assert rest is not None, "gcd must divide"
        out.extend(factor_bv(g, ctx, seed))
        out.extend(factor_bv(rest, ctx, seed))
        return _merge(out)
    out.extend(_factor_squarefree_primitive(f, ctx, seed))
    return _merge(out)


def _pth_root_bv(f: BV, ctx: FieldCtx) -> BV:
    # reachable only when both partials vanish: x-exponents divisible by p,
    # every coefficient a polynomial in y^p; UniPoly.pth_root does the rest
    out = []
    for e in range(0, len(f), ctx.p):
        out.append(f[e].pth_root())
    return bv_trim(out)


def _merge(factors: list[tuple[BV, int]]) -> list[tuple[BV, int]]:
    ctx = None
    acc: dict[tuple, tuple[BV, int]] = {}
    for g, m in factors:
        if not g:
            continue
        ctx = g[0].ctx
        gn = bv_normalize(g, ctx)
        key = bv_key(gn)
        if key in acc:
            prev, pm = acc[key]
            acc[key] = (prev, pm + m)
        else:
            acc[key] = (gn, m)
    return [acc[k] for k in sorted(acc)]
