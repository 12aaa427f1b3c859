"""Plane curves attached to a kernel, point counting and irreducibility.

For a kernel F and parameters (a, b, c, d) the attached affine curve is

    F(a, x1) + F(x2, c) - F(x1, x2) + b + d = 0

in coordinates (x1, x2). Its F_q-point count equals a cube entry of the
incidence graph's adjacency matrix, which the graph module audits.

Absolute irreducibility is decided by factoring over extensions: an
irreducible polynomial of total degree D splits over the closure into r
conjugate components of equal degree, so r divides D and any splitting
is already visible over F_{q^l} for some prime l dividing D. Checking
those extensions is therefore equivalent to checking all degrees up to
D, and is what the brute-force oracle in the test suite is compared
against.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional

import numpy as np

from .caps import get_caps
from .errors import (DegenerateCurve, DegreeCapExceeded, NotAbsolutelyIrreducible,
                     MixedFields, SizeCapExceeded, ZeroPolynomial)
from .field import FieldCtx, extend
from .poly import MultiPoly, SymmetricKernel, grid_eval2, lift
from .seeding import stable_seed
from . import bifactor
from .unipoly import UniPoly

__all__ = ["CurveParams", "PlaneCurve", "build_curve", "count_points",
           "factor_bivariate", "is_absolutely_irreducible", "weil_check",
           "WeilReport", "SweepRecord", "SweepReport", "reducibility_locus_sweep"]

X1, X2 = "x1", "x2"


class CurveParams(NamedTuple):
    a: int
    b: int
    c: int
    d: int


@dataclass
class PlaneCurve:
    """The affine curve cut out by eq = 0 over ctx; eq is never zero."""

    eq: MultiPoly
    ctx: FieldCtx
    params: Optional[CurveParams] = None
    _counts: dict = dc_field(default_factory=dict, repr=False)

    def total_degree(self) -> int:
        return self.eq.total_degree()


def build_curve(kernel: SymmetricKernel, params: CurveParams | tuple) -> PlaneCurve:
    """Assemble F(a,x1) + F(x2,c) - F(x1,x2) + b + d."""
    params = CurveParams(*params)
    ctx = kernel.ctx
    for v in params:
        if not 0 <= v < ctx.q:
            raise MixedFields(f"parameter {v} is not an element index of {ctx!r}")
    a, b, c, d = params
    eq = (kernel.at(a, X1) + kernel.at(X2, c) - kernel.at(X1, X2)
          + MultiPoly.const(ctx, ctx.add(b, d)))
    if eq.is_zero():
        raise DegenerateCurve(
            "curve equation vanished identically; the kernel cannot have been "
            "validated (a non-diagonal kernel never produces the zero curve)")
    return PlaneCurve(eq, ctx, params)


def count_points(curve: PlaneCurve, m: int = 1) -> int:
    """Exact number of (x1, x2) in F_{q^m}^2 on the curve, by full scan."""
    cached = curve._counts.get(m)
    if cached is not None:
        return cached
    caps = get_caps()
    ctx = curve.ctx
    size = ctx.q ** m
    if size * size > caps.point_scan:
        raise SizeCapExceeded("point scan q^(2m)", size * size, caps.point_scan)
    if m == 1:
        eq = curve.eq
    else:
        _, emb = extend(ctx, m)
        eq = lift(curve.eq, emb)
    values = grid_eval2(eq, X1, X2)
    count = int(np.count_nonzero(values == 0))
    curve._counts[m] = count
    return count


# ---------------------------------------------------------------------------
# Factorization interface on MultiPoly


def _split_vars(f: MultiPoly) -> tuple[str, str]:
    if len(f.vars) > 2:
        raise DegreeCapExceeded(f"bivariate factorization got {len(f.vars)} variables")
    if len(f.vars) == 2:
        return f.vars
    if len(f.vars) == 1:
        v = f.vars[0]
        return v, (X2 if v != X2 else X1)
    return X1, X2


def _to_bv(f: MultiPoly, xvar: str, yvar: str) -> list[UniPoly]:
    ctx = f.ctx
    dx = f.degree_in(xvar)
    rows: list[list[int]] = [[] for _ in range(max(dx, 0) + 1)]
    ix = f.vars.index(xvar) if xvar in f.vars else None
    iy = f.vars.index(yvar) if yvar in f.vars else None
    for e, c in f.terms.items():
        ex = e[ix] if ix is not None else 0
        ey = e[iy] if iy is not None else 0
        row = rows[ex]
        if len(row) <= ey:
            row.extend([0] * (ey + 1 - len(row)))
        row[ey] = c
    return bifactor.bv_trim([UniPoly(ctx, row) for row in rows])


def _from_bv(bv: list[UniPoly], ctx: FieldCtx, xvar: str, yvar: str) -> MultiPoly:
    acc = MultiPoly.zero(ctx)
    for ex, u in enumerate(bv):
        for ey, c in enumerate(u.coeffs):
            if c:
                acc = acc + MultiPoly(ctx, {(ex, ey): c}, (xvar, yvar))
    return acc


def factor_bivariate(f: MultiPoly, ctx: FieldCtx | None = None,
                     seed: int = 0) -> list[tuple[MultiPoly, int]]:
    """Irreducible factors over the base field, with multiplicities.

    The product of the factors (to their multiplicities) equals f up to
    a nonzero constant; each factor is normalised so its leading
    coefficient is 1.
    """
    if ctx is not None and ctx.key != f.ctx.key:
        raise MixedFields("polynomial belongs to a different field")
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    caps = get_caps()
    if f.total_degree() > caps.factor_degree:
        raise DegreeCapExceeded(
            f"total degree {f.total_degree()} exceeds factor cap {caps.factor_degree}")
    xvar, yvar = _split_vars(f)
    bv = _to_bv(f, xvar, yvar)
    out = bifactor.factor_bv(bv, f.ctx, seed)
    return [(_from_bv(g, f.ctx, xvar, yvar), m) for g, m in out]


_ABS_IRRED_CACHE: dict = {}


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_absolutely_irreducible(f: MultiPoly, ctx: FieldCtx | None = None,
                              seed: int = 0) -> bool:
    """True iff f stays irreducible over F_{q^m} for every m up to deg(f)."""
    if ctx is not None and ctx.key != f.ctx.key:
        raise MixedFields("polynomial belongs to a different field")
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial cuts out no curve")
    key = f.key()
    hit = _ABS_IRRED_CACHE.get(key)
    if hit is not None:
        return hit
    result = _abs_irred(f, seed)
    _ABS_IRRED_CACHE[key] = result
    return result


def _abs_irred(f: MultiPoly, seed: int) -> bool:
    factors = factor_bivariate(f, seed=seed)
    if len(factors) != 1 or factors[0][1] != 1:
        return False
    degree = f.total_degree()
    if degree <= 1:
        return True
    # an irreducible f with r > 1 conjugate absolute components splits over
    # F_{q^l} for every prime l dividing r, and r divides deg(f)
    for ell in _prime_divisors(degree):
        ext, emb = extend(f.ctx, ell)
        lifted = lift(f, emb)
        if len(factor_bivariate(lifted, seed=seed)) != 1:
            return False
    return True


@dataclass(frozen=True)
class WeilReport:
    N: int
    q: int
    D: int
    bound: float
    within_interval: bool


def weil_check(curve: PlaneCurve) -> WeilReport:
    """Check |N - q| against the explicit interval (D-1)(D-2)sqrt(q) + D + 1."""
    if not is_absolutely_irreducible(curve.eq):
        raise NotAbsolutelyIrreducible(
            f"curve {curve.params} is not absolutely irreducible; "
            "the point-count interval only applies to absolutely irreducible curves")
    n_points = count_points(curve, 1)
    q = curve.ctx.q
    d = curve.total_degree()
    bound = (d - 1) * (d - 2) * math.sqrt(q) + d + 1
    return WeilReport(n_points, q, d, bound, abs(n_points - q) <= bound)


@dataclass(frozen=True)
class SweepRecord:
    params: CurveParams
    N: int
    D: int
    abs_irred: bool


@dataclass(frozen=True)
class SweepReport:
    q: int
    kernel: str
    total: int
    reducible_count: int
    fraction: float
    exhaustive: bool
    seed: Optional[int]
    records: tuple[SweepRecord, ...]

    def summary(self) -> dict:
        return {"q": self.q, "kernel": self.kernel, "total": self.total,
                "reducible_count": self.reducible_count,
                "fraction": self.fraction,
                "q_times_fraction": self.q * self.fraction,
                "exhaustive": self.exhaustive,
                "seed": self.seed}


def reducibility_locus_sweep(kernel: SymmetricKernel, sample: int | None = None,
                             seed: int = 0, with_counts: bool = True) -> SweepReport:
    """Classify the curves over all q^4 parameters (or a uniform sample).

    Distinct parameters frequently share one curve equation, so the
    classification (and the point count) is memoised per equation.
    """
    ctx = kernel.ctx
    caps = get_caps()
    q = ctx.q
    exhaustive = sample is None
    if exhaustive and q > caps.sweep_exhaustive_q:
        raise SizeCapExceeded(
            "exhaustive sweep q", q,
            caps.sweep_exhaustive_q)
    if exhaustive:
        tuples = ((a, b, c, d) for a in range(q) for b in range(q)
                  for c in range(q) for d in range(q))
        total = q ** 4
    else:
        rng = random.Random(stable_seed("curve-sweep", seed, ctx.key))
        tuples = (tuple(rng.randrange(q) for _ in range(4)) for _ in range(sample))
        total = sample
    records = []
    reducible = 0
    eq_cache: dict = {}
    for tup in tuples:
        curve = build_curve(kernel, tup)
        key = curve.eq.key()
        hit = eq_cache.get(key)
        if hit is None:
            flag = is_absolutely_irreducible(curve.eq)
            n_points = count_points(curve, 1) if with_counts else -1
            hit = (flag, n_points, curve.total_degree())
            eq_cache[key] = hit
        flag, n_points, degree = hit
        if not flag:
            reducible += 1
        records.append(SweepRecord(CurveParams(*tup), n_points, degree, flag))
    return SweepReport(q=q, kernel=str(kernel), total=total,
                       reducible_count=reducible,
                       fraction=reducible / total if total else 0.0,
                       exhaustive=exhaustive,
                       seed=None if exhaustive else seed,
                       records=tuple(records))
