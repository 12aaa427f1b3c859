"""Value sets of ternary polynomials F(x, G(y,z)) + H(y,z) + J(x).

The shape matters: for such a polynomial the complement of the value set
translates into a point/curve configuration with no incidences at all,
so the incidence machinery bounds how small the value set can be. The
report records the measured deficit q - |P(X,Y,Z)| against the scale
q^(11/3) / (|X||Y||Z|); the constant in that bound is unknown, so ratios
are reported, never asserted.

Two identities here are exact and are asserted by the test suite: the
constructed point set and curve set have zero incidences, and (given the
measured second eigenvalue) |P_set| * |Q_set| <= (lambda2 * q)^2.

Algebraic independence of G and H is decided by exact linear algebra:
products G^i H^j up to a degree cap are expanded in the monomial basis
and tested for linear dependence over F_q. The default cap deg(G)*deg(H)
is a classical elimination bound for the minimal relation; below it the
answer may miss relations, which is flagged as a warning.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .caps import get_caps
from .errors import (CapTooSmallWarning, CharTooSmall, DependentGH, MixedFields,
                     SizeCapExceeded, ValidationError)
from .field import FieldCtx
from .incidence import CurveSet, KernelCurve, PointSet, incidences
from .poly import MultiPoly, SymmetricKernel, grid_eval1, grid_eval2, validate_kernel
from .seeding import stable_seed

__all__ = ["TernaryPolySpec", "build_ternary", "algebraically_independent",
           "phi_image_stats", "PhiReport", "image_size", "ExpansionReport",
           "expansion_report", "erdos_preset", "erdos_spec"]

VX, VY, VZ = "x", "y", "z"


def _rank_rows(rows, ctx: FieldCtx) -> bool:
    """True iff the coefficient rows are linearly independent over ctx."""
    pivots: dict = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = max(row)
            piv = pivots.get(lead)
            if piv is None:
                inv = ctx.inv(row[lead])
                pivots[lead] = {k: ctx.mul(v, inv) for k, v in row.items()}
                break
            c = row[lead]
            for k, v in piv.items():
                nv = ctx.sub(row.get(k, 0), ctx.mul(c, v))
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        else:
            return False
    return True


def algebraically_independent(g_poly: MultiPoly, h_poly: MultiPoly,
                              degree_cap: int | None = None) -> bool:
    """No nonzero R with deg(R) <= cap and R(G, H) = 0 identically.

    Complete for the default cap deg(G)*deg(H); an explicit smaller cap
    emits CapTooSmallWarning because it may miss relations.
    """
    if g_poly.ctx.key != h_poly.ctx.key:
        raise MixedFields("the two polynomials live over different fields")
    ctx = g_poly.ctx
    dg, dh = g_poly.total_degree(), h_poly.total_degree()
    if dg < 1 or dh < 1:
        return False  # a constant satisfies the linear relation u - c = 0
    full_cap = dg * dh
    cap = degree_cap if degree_cap is not None else full_cap
    if cap < 1:
        raise ValidationError("degree cap must be at least 1")
    if cap < full_cap:
        warnings.warn(CapTooSmallWarning(
            f"independence tested only up to degree {cap} < {full_cap}; "
            "relations above the cap would be missed"))
    pair = tuple(sorted(set(g_poly.vars) | set(h_poly.vars)))
    if len(pair) > 2:
        raise ValidationError(f"expected at most two variables, got {pair}")

    g_pows = [MultiPoly.const(ctx, 1)]
    h_pows = [MultiPoly.const(ctx, 1)]
    for _ in range(cap):
        g_pows.append(g_pows[-1] * g_poly)
        h_pows.append(h_pows[-1] * h_poly)
    rows = []
    for total in range(cap + 1):
        for i in range(total + 1):
            j = total - i
            prod = g_pows[i] * h_pows[j]
            rows.append(prod._remap(pair))
    return _rank_rows(rows, ctx)


@dataclass(frozen=True)
class TernaryPolySpec:
    """A validated P(x,y,z) = F(x, G(y,z)) + H(y,z) + J(x)."""

    kernel: SymmetricKernel
    g_poly: MultiPoly
    h_poly: MultiPoly
    j_poly: MultiPoly
    assembled: MultiPoly

    @property
    def ctx(self) -> FieldCtx:
        return self.kernel.ctx

    def evaluate(self, x: int, y: int, z: int) -> int:
        return self.assembled.evaluate({VX: x, VY: y, VZ: z})

    def evaluate_direct(self, x: int, y: int, z: int) -> int:
        """Composition evaluated pointwise, independent of `assembled`."""
        ctx = self.ctx
        g = self.g_poly.evaluate({VY: y, VZ: z})
        h = self.h_poly.evaluate({VY: y, VZ: z})
        j = self.j_poly.evaluate({VX: x})
        f = self.kernel.at(x, g).constant_value()
        return ctx.add(ctx.add(f, h), j)


def build_ternary(kernel: SymmetricKernel, g_poly: MultiPoly, h_poly: MultiPoly,
                  j_poly: MultiPoly, independence_cap: int | None = None) -> TernaryPolySpec:
    """Assemble and validate the ternary polynomial."""
    ctx = kernel.ctx
    for part, allowed in ((g_poly, {VY, VZ}), (h_poly, {VY, VZ}), (j_poly, {VX})):
        if part.ctx.key != ctx.key:
            raise MixedFields("all parts must live over the kernel's field")
        if not set(part.vars) <= allowed:
            raise ValidationError(
                f"polynomial in {part.vars} must use only variables {sorted(allowed)}")
    if not algebraically_independent(g_poly, h_poly, independence_cap):
        raise DependentGH(
            "inner polynomials are algebraically dependent; the construction "
            "requires algebraically independent G and H")
    assembled = kernel.at(MultiPoly.var(ctx, VX), g_poly) + h_poly + j_poly
    caps = get_caps()
    if assembled.total_degree() > caps.ternary_degree:
        raise SizeCapExceeded("ternary degree", assembled.total_degree(),
                              caps.ternary_degree)
    spec = TernaryPolySpec(kernel, g_poly, h_poly, j_poly, assembled)
    rng = random.Random(stable_seed("ternary-selfcheck", ctx.key))
    for _ in range(20):
        x, y, z = (rng.randrange(ctx.q) for _ in range(3))
        if spec.evaluate(x, y, z) != spec.evaluate_direct(x, y, z):
            raise AssertionError("assembled polynomial disagrees with composition")
    return spec


@dataclass(frozen=True)
class PhiReport:
    image_size: int
    pairs: int
    ratio: float

    def to_json(self) -> dict:
        return {"image_size": self.image_size, "pairs": self.pairs, "ratio": self.ratio}


def _phi_codes(g_poly: MultiPoly, h_poly: MultiPoly,
               ys: Sequence[int], zs: Sequence[int]) -> np.ndarray:
    ctx = g_poly.ctx
    gg = grid_eval2(g_poly, VY, VZ)
    hh = grid_eval2(h_poly, VY, VZ)
    iy = np.asarray(sorted(ys), dtype=np.int64)
    iz = np.asarray(sorted(zs), dtype=np.int64)
    gv = gg[np.ix_(iy, iz)].ravel()
    hv = hh[np.ix_(iy, iz)].ravel()
    return np.unique(gv * ctx.q + hv)


def phi_image_stats(g_poly: MultiPoly, h_poly: MultiPoly,
                    ys: Sequence[int], zs: Sequence[int]) -> PhiReport:
    """Exact size of {(G(y,z), H(y,z))} over Y x Z."""
    pairs = len(ys) * len(zs)
    if pairs == 0:
        return PhiReport(0, 0, 0.0)
    codes = _phi_codes(g_poly, h_poly, ys, zs)
    return PhiReport(int(codes.size), pairs, codes.size / pairs)


def _image_mask(spec: TernaryPolySpec, xs, ys, zs) -> np.ndarray:
    ctx = spec.ctx
    caps = get_caps()
    if len(xs) * len(ys) * len(zs) > caps.image_evals:
        raise SizeCapExceeded("pointwise evaluations |X||Y||Z|",
                              len(xs) * len(ys) * len(zs), caps.image_evals)
    q = ctx.q
    codes = _phi_codes(spec.g_poly, spec.h_poly, ys, zs)
    gs, hs = codes // q, codes % q
    fgrid = spec.kernel.value_grid()
    jvals = grid_eval1(spec.j_poly, VX)
    seen = np.zeros(q, dtype=bool)
    for x in sorted(xs):
        vals = ctx.add_vec(ctx.add_vec(fgrid[x, gs], hs), np.int64(jvals[x]))
        seen[vals] = True
        if seen.all():
            break
    return seen


def image_size(spec: TernaryPolySpec, xs, ys, zs) -> int:
    """|P(X, Y, Z)| computed exactly."""
    if not xs or not ys or not zs:
        return 0
    return int(_image_mask(spec, xs, ys, zs).sum())


@dataclass(frozen=True)
class ExpansionReport:
    q: int
    field: str
    x_size: int
    y_size: int
    z_size: int
    image_size: int
    missing: int
    predicted_missing_scale: float
    ratio: float
    phi_image: int
    phi_ratio: float
    zero_incidence_checked: bool
    incidence_count: Optional[int]
    p_set_size: Optional[int]
    q_set_size: Optional[int]
    lambda2_abs: Optional[float] = None
    product_bound: Optional[float] = None
    chain_ok: Optional[bool] = None

    def to_json(self) -> dict:
        return {"q": self.q, "field": self.field,
                "sizes": [self.x_size, self.y_size, self.z_size],
                "image_size": self.image_size, "missing": self.missing,
                "predicted_missing_scale": self.predicted_missing_scale,
                "ratio": self.ratio, "phi_image": self.phi_image,
                "phi_ratio": self.phi_ratio,
                "zero_incidence_checked": self.zero_incidence_checked,
                "incidence_count": self.incidence_count,
                "p_set_size": self.p_set_size, "q_set_size": self.q_set_size,
                "lambda2_abs": self.lambda2_abs,
                "product_bound": self.product_bound, "chain_ok": self.chain_ok}


def expansion_report(spec: TernaryPolySpec, xs, ys, zs,
                     with_graph_crosscheck: bool = False) -> ExpansionReport:
    """Measure the value set and audit the exact identities behind the bound."""
    ctx = spec.ctx
    q = ctx.q
    xs, ys, zs = sorted(xs), sorted(ys), sorted(zs)
    if xs and ys and zs:
        seen = _image_mask(spec, xs, ys, zs)
    else:
        seen = np.zeros(q, dtype=bool)
    img = int(seen.sum())
    missing = q - img
    volume = len(xs) * len(ys) * len(zs)
    scale = q ** (11.0 / 3.0) / volume if volume else float("inf")
    phi = phi_image_stats(spec.g_poly, spec.h_poly, ys, zs)

    # complement translation: points (x, J(x) - w) for missing values w,
    # curves indexed by the distinct (G, H) pairs; zero incidences is exact
    jvals = grid_eval1(spec.j_poly, VX)
    w_vals = np.nonzero(~seen)[0]
    pts = [(int(x), ctx.sub(int(jvals[x]), int(w))) for x in xs for w in w_vals]
    p_set = PointSet.from_pairs(ctx, pts)
    codes = _phi_codes(spec.g_poly, spec.h_poly, ys, zs) if ys and zs else np.empty(0, np.int64)
    q_set = CurveSet(ctx, tuple(KernelCurve(spec.kernel, int(c // q), int(c % q))
                                for c in codes))
    inc = incidences(p_set, q_set)

    lam2 = prod_bound = chain_ok = None
    if with_graph_crosscheck:
        from .graph import build_graph, spectrum
        caps = get_caps()
        g = build_graph(spec.kernel)
        method = "exact" if q <= caps.dense_spectrum_q else "iterative"
        lam2 = spectrum(g, method).lambda2_abs
        prod_bound = (lam2 * q) ** 2
        chain_ok = (inc.I == 0) and (len(p_set) * len(q_set) <= prod_bound + 1e-6)

    return ExpansionReport(
        q=q, field=f"{ctx.p}^{ctx.n}", x_size=len(xs), y_size=len(ys),
        z_size=len(zs), image_size=img, missing=missing,
        predicted_missing_scale=scale,
        ratio=missing / scale if scale not in (0.0, float("inf")) else 0.0,
        phi_image=phi.image_size, phi_ratio=phi.ratio,
        zero_incidence_checked=True, incidence_count=inc.I,
        p_set_size=len(p_set), q_set_size=len(q_set),
        lambda2_abs=lam2, product_bound=prod_bound, chain_ok=chain_ok)


def erdos_spec(ctx: FieldCtx, k: int) -> TernaryPolySpec:
    """The preset P(x,y,z) = (x-y)^k + z; needs characteristic > k."""
    if k < 2:
        raise ValidationError("exponent k must be at least 2")
    if ctx.char <= k:
        raise CharTooSmall(k, ctx.char)
    u, v = MultiPoly.var(ctx, "u"), MultiPoly.var(ctx, "v")
    kernel = validate_kernel((u + v) ** k)
    g_poly = -MultiPoly.var(ctx, VY)
    h_poly = MultiPoly.var(ctx, VZ)
    j_poly = MultiPoly.zero(ctx)
    return build_ternary(kernel, g_poly, h_poly, j_poly)


def erdos_preset(k: int, ctx: FieldCtx, sizes: Sequence[int] | None = None,
                 densities: Sequence[float] | None = None, seed: int = 0,
                 with_graph_crosscheck: bool = False) -> ExpansionReport:
    """Build the (x-y)^k + z preset, sample X, Y, Z, and report."""
    spec = erdos_spec(ctx, k)
    q = ctx.q
    if sizes is None:
        if densities is not None:
            sizes = [max(1, min(q, round(d * q))) for d in densities]
        else:
            sizes = [q, q, q]
    if len(sizes) != 3:
        raise ValidationError("exactly three sizes are required")
    rng = random.Random(stable_seed("erdos", seed, ctx.key, k))
    sets = [sorted(rng.sample(range(q), min(int(s), q))) for s in sizes]
    return expansion_report(spec, *sets, with_graph_crosscheck=with_graph_crosscheck)
