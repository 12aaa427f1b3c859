"""Incidence counting between point sets and curve families.

Three families, all graphs of functions x -> y: lines y = s x + t,
polynomial graphs y = a_n x^n + ... + a_0 (requires q > n), and kernel
curves F(a, x) + b + y = 0. A point set is a subset of F_q^2; an
incidence is a (point, curve) pair with the point on the curve.

The report compares the count against the main term |P||Q|/q, kept as an
exact rational, with the family's error scale: sqrt(q |P||Q|) for lines,
sqrt(q^n |P||Q|) for degree-n graphs, and q^(5/6) sqrt(|P||Q|) for
kernel curves. The first two bounds are unconditional inequalities with
constant exactly 1, so any ratio above 1 is treated as a bug, not noise.

Curve sets are lists of distinct parameters. Distinct parameters can in
principle carry identical point sets; the report counts such collisions
instead of hiding them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import MixedFields, ValidationError
from .field import FieldCtx
from .poly import SymmetricKernel
from .seeding import stable_seed

__all__ = ["PointSet", "Line", "PolyGraph", "KernelCurve", "CurveSet",
           "member", "IncidenceReport", "incidences", "theorem_sweep",
           "random_point_set", "random_curve_set"]


@dataclass(frozen=True)
class PointSet:
    ctx: FieldCtx
    points: frozenset

    @classmethod
    def from_pairs(cls, ctx: FieldCtx, pairs: Iterable[tuple[int, int]]) -> "PointSet":
        pts = frozenset((int(x), int(y)) for x, y in pairs)
        for x, y in pts:
            if not (0 <= x < ctx.q and 0 <= y < ctx.q):
                raise ValidationError(f"point ({x}, {y}) outside {ctx!r}^2")
        return cls(ctx, pts)

    @classmethod
    def full(cls, ctx: FieldCtx) -> "PointSet":
        return cls(ctx, frozenset((x, y) for x in range(ctx.q) for y in range(ctx.q)))

    def __len__(self):
        return len(self.points)

    def grid(self) -> np.ndarray:
        g = np.zeros((self.ctx.q, self.ctx.q), dtype=bool)
        for x, y in self.points:
            g[x, y] = True
        return g


@dataclass(frozen=True)
class Line:
    slope: int
    intercept: int


@dataclass(frozen=True)
class PolyGraph:
    coeffs: tuple  # ascending: y = coeffs[0] + coeffs[1] x + ... + coeffs[n] x^n


@dataclass(frozen=True)
class KernelCurve:
    kernel: SymmetricKernel
    a: int
    b: int


CurveVariant = Union[Line, PolyGraph, KernelCurve]


def _y_values(curve: CurveVariant, ctx: FieldCtx,
              kernel_grid: np.ndarray | None = None) -> np.ndarray:
    """The q values y(x) of the function whose graph the curve is."""
    xs = np.arange(ctx.q, dtype=np.int64)
    if isinstance(curve, Line):
        return ctx.add_vec(ctx.mul_vec(np.int64(curve.slope), xs),
                           np.int64(curve.intercept))
    if isinstance(curve, PolyGraph):
        acc = np.zeros(ctx.q, dtype=np.int64)
        for c in reversed(curve.coeffs):
            acc = ctx.add_vec(ctx.mul_vec(acc, xs), np.int64(c)).astype(np.int64)
        return acc
    if isinstance(curve, KernelCurve):
        grid = kernel_grid if kernel_grid is not None else curve.kernel.value_grid()
        return ctx.neg_vec(ctx.add_vec(grid[curve.a], np.int64(curve.b)))
    raise ValidationError(f"unknown curve variant {curve!r}")


def member(curve: CurveVariant, point: tuple[int, int], ctx: FieldCtx) -> bool:
    """Is the point on the curve?"""
    x, y = point
    if isinstance(curve, Line):
        return y == ctx.add(ctx.mul(curve.slope, x), curve.intercept)
    if isinstance(curve, PolyGraph):
        acc = 0
        for c in reversed(curve.coeffs):
            acc = ctx.add(ctx.mul(acc, x), c)
        return y == acc
    if isinstance(curve, KernelCurve):
        val = curve.kernel.at(curve.a, x).constant_value()
        return ctx.add(ctx.add(val, curve.b), y) == 0
    raise ValidationError(f"unknown curve variant {curve!r}")


@dataclass(frozen=True)
class CurveSet:
    ctx: FieldCtx
    members: tuple

    def __post_init__(self):
        kinds = {type(m) for m in self.members}
        if len(kinds) > 1:
            raise ValidationError(f"curve set mixes variants {kinds}")
        if self.members and isinstance(self.members[0], PolyGraph):
            n = max(len(m.coeffs) - 1 for m in self.members)
            if self.ctx.q <= n:
                raise ValidationError(
                    f"polynomial graphs of degree {n} need q > {n}, got q = {self.ctx.q}")

    def __len__(self):
        return len(self.members)

    @property
    def variant(self) -> str:
        if not self.members:
            return "empty"
        return {Line: "line", PolyGraph: "polygraph",
                KernelCurve: "kernel"}[type(self.members[0])]

    def polygraph_degree(self) -> int:
        return max((len(m.coeffs) - 1 for m in self.members), default=0)


@dataclass(frozen=True)
class IncidenceReport:
    q: int
    variant: str
    I: int
    p_size: int
    q_size: int
    main: Fraction
    deviation: Fraction
    error_scale: float
    ratio: float
    collisions: int

    def to_json(self) -> dict:
        return {"q": self.q, "variant": self.variant, "incidences": self.I,
                "p_size": self.p_size, "q_size": self.q_size,
                "main": [self.main.numerator, self.main.denominator],
                "deviation": [self.deviation.numerator, self.deviation.denominator],
                "error_scale": self.error_scale, "ratio": self.ratio,
                "collisions": self.collisions}


def _error_scale(curve_set: CurveSet, p_size: int, q_size: int) -> float:
    q = curve_set.ctx.q
    size_term = math.sqrt(p_size * q_size)
    if curve_set.variant in ("line", "empty"):
        return math.sqrt(q) * size_term
    if curve_set.variant == "polygraph":
        return q ** (curve_set.polygraph_degree() / 2.0) * size_term
    return q ** (5.0 / 6.0) * size_term


def incidences(points: PointSet, curve_set: CurveSet) -> IncidenceReport:
    """Exact incidence count with the variant's error normalisation."""
    if points.ctx.key != curve_set.ctx.key:
        raise MixedFields("points and curves live over different fields")
    ctx = points.ctx
    q = ctx.q
    grid = points.grid()
    xs = np.arange(q)
    kernel_grid = None
    if curve_set.members and isinstance(curve_set.members[0], KernelCurve):
        kernel_grid = curve_set.members[0].kernel.value_grid()
    total = 0
    signatures = set()
    collisions = 0
    for curve in curve_set.members:
        yv = _y_values(curve, ctx, kernel_grid)
        sig = yv.tobytes()
        if sig in signatures:
            collisions += 1
        else:
            signatures.add(sig)
        total += int(grid[xs, yv].sum())
    p_size, q_size = len(points), len(curve_set)
    main = Fraction(p_size * q_size, q)
    deviation = abs(Fraction(total) - main)
    scale = _error_scale(curve_set, p_size, q_size)
    ratio = float(deviation) / scale if scale > 0 else 0.0
    return IncidenceReport(q, curve_set.variant, total, p_size, q_size,
                           main, deviation, scale, ratio, collisions)


# ---------------------------------------------------------------------------
# Randomised sweeps


def random_point_set(ctx: FieldCtx, size: int, rng: random.Random) -> PointSet:
    if size > ctx.q * ctx.q:
        raise ValidationError(f"cannot sample {size} points from {ctx.q}^2")
    codes = rng.sample(range(ctx.q * ctx.q), size)
    return PointSet(ctx, frozenset(divmod(c, ctx.q) for c in codes))


def random_curve_set(ctx: FieldCtx, variant: str, size: int, rng: random.Random,
                     kernel: SymmetricKernel | None = None,
                     degree: int = 1) -> CurveSet:
    q = ctx.q
    if variant == "line":
        codes = rng.sample(range(q * q), size)
        members = tuple(Line(*divmod(c, q)) for c in codes)
    elif variant == "polygraph":
        space = q ** (degree + 1)
        codes = rng.sample(range(space), size)
        members = []
        for c in codes:
            coeffs = []
            for _ in range(degree + 1):
                c, r = divmod(c, q)
                coeffs.append(r)
            members.append(PolyGraph(tuple(coeffs)))
        members = tuple(members)
    elif variant == "kernel":
        if kernel is None:
            raise ValidationError("kernel curves need a kernel")
        codes = rng.sample(range(q * q), size)
        members = tuple(KernelCurve(kernel, *divmod(c, q)) for c in codes)
    else:
        raise ValidationError(f"unknown curve variant {variant!r}")
    return CurveSet(ctx, members)


def default_sizes(q: int) -> tuple[int, ...]:
    """Size menu probing both terms of the bounds: q, q^(3/2), q^2/4."""
    return (q, min(round(q ** 1.5), q * q), max(q * q // 4, 1))


def theorem_sweep(variant: str, fields: Sequence[FieldCtx], trials: int,
                  sizes: Sequence[int] | None = None, seed: int = 0,
                  kernels: dict | None = None, degree: int = 1) -> list[dict]:
    """Randomised incidence experiments; one row per (field, trial).

    Every cell derives its own RNG from (seed, q, trial), so scheduling
    cannot affect the output.
    """
    rows = []
    for ctx in fields:
        q = ctx.q
        menu = tuple(sizes) if sizes else default_sizes(q)
        kernel = kernels.get(ctx.key) if kernels else None
        for trial in range(trials):
            rng = random.Random(stable_seed("incidence", seed, q, trial))
            p_size = rng.choice(menu)
            q_size = rng.choice(menu)
            points = random_point_set(ctx, min(p_size, q * q), rng)
            curves = random_curve_set(ctx, variant, min(q_size, q * q), rng,
                                      kernel=kernel, degree=degree)
            rep = incidences(points, curves)
            row = {"trial": trial, **rep.to_json()}
            if variant == "polygraph":
                row["degree"] = degree
            rows.append(row)
    return rows
