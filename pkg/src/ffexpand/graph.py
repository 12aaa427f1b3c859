"""The q-regular incidence graph of a kernel on the vertex set F_q^2.

Vertices (a, b) and (x, y) are adjacent when F(a, x) + b + y = 0. The
first coordinate of a neighbour determines it, so every vertex has
exactly q neighbours and rows of the adjacency matrix sum to q exactly;
symmetry of F makes the adjacency symmetric. A vertex is its own
neighbour when F(a, a) + 2b = 0; such a loop contributes one to the row
sum and sits on the diagonal of A, which all audits here account for.

Spectral quantities come from two independent routes: the dense in-repo
eigensolver, and power iteration on the complement of the all-ones
eigenvector. Cube entries of A are cross-checked against curve point
counts, and the expander mixing inequality is audited on random vertex
sets; both identities are theorems, so a single violation is a bug, not
a statistic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .caps import get_caps
from .curves import build_curve, count_points
from .eigensolver import symmetric_eigenvalues
from .errors import ConvergenceFailure, SizeCapExceeded, SymmetryViolation
from .field import FieldCtx
from .poly import SymmetricKernel
from .seeding import stable_seed

__all__ = ["IncidenceGraph", "build_graph", "cube_entry", "SpectralReport",
           "spectrum", "exact_eigenvalues", "CubeAuditReport", "cube_identity_audit",
           "MixingReport", "mixing_check", "field_spec"]


def field_spec(ctx: FieldCtx) -> str:
    return f"{ctx.p}^{ctx.n}"


class IncidenceGraph:
    """Adjacency lists of the kernel graph; immutable after construction."""

    def __init__(self, kernel: SymmetricKernel, nbrs: np.ndarray):
        self.kernel = kernel
        self.ctx = kernel.ctx
        self.q = self.ctx.q
        self.n = self.q * self.q
        self.nbrs = nbrs  # (n, q) int32, row sorted; entry = x*q + y
        vs = np.arange(self.n, dtype=np.int64)
        self.loop_mask = nbrs[vs, (vs // self.q)] == vs
        self.loop_count = int(self.loop_mask.sum())

    def vertex_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return int(v)
        a, b = v
        return int(a) * self.q + int(b)

    def vertex_pair(self, i: int) -> tuple[int, int]:
        return divmod(int(i), self.q)

    def neighbors(self, v) -> np.ndarray:
        return self.nbrs[self.vertex_index(v)]

    def has_edge(self, v, w) -> bool:
        row = self.nbrs[self.vertex_index(v)]
        wi = self.vertex_index(w)
        pos = int(np.searchsorted(row, wi))
        return pos < row.size and row[pos] == wi

    def adjacency_matrix(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        rows = np.repeat(np.arange(self.n), self.q)
        a[rows, self.nbrs.ravel()] = 1
        return a

    def row_sums(self) -> np.ndarray:
        """Degrees recomputed from the adjacency lists (distinct-neighbour check)."""
        uniq = np.array([len(np.unique(row)) for row in self.nbrs], dtype=np.int64)
        return uniq

    def __repr__(self):
        return f"IncidenceGraph(q={self.q}, kernel={self.kernel})"


def build_graph(kernel: SymmetricKernel) -> IncidenceGraph:
    """Construct adjacency by the defining formula and validate it."""
    ctx = kernel.ctx
    caps = get_caps()
    q = ctx.q
    if q > caps.graph_q:
        raise SizeCapExceeded("graph field size q", q, caps.graph_q)
    fgrid = kernel.value_grid()  # [a, x] = F(a, x)
    bcol = np.arange(q, dtype=np.int64)
    # ys[a, b, x] = -(F(a, x) + b)
    ys = ctx.neg_vec(ctx.add_vec(fgrid[:, None, :], bcol[None, :, None]))
    xs = np.arange(q, dtype=np.int64)[None, None, :]
    nbrs = (xs * q + ys).reshape(q * q, q).astype(np.int32)
    g = IncidenceGraph(kernel, nbrs)
    _validate(g)
    return g


def _validate(g: IncidenceGraph):
    q, n = g.q, g.n
    if not np.all(g.row_sums() == q):
        raise SymmetryViolation("a vertex has fewer than q distinct neighbours")
    if q <= 64:
        a = g.adjacency_matrix(np.int8)
        if not np.array_equal(a, a.T):
            raise SymmetryViolation("adjacency came out asymmetric; kernel bug")
    else:
        rng = np.random.default_rng(stable_seed("graph-symmetry", g.ctx.key))
        vs = rng.integers(0, n, size=2000)
        xs = rng.integers(0, q, size=2000)
        ws = g.nbrs[vs, xs]
        for v, w in zip(vs.tolist(), ws.tolist()):
            if not g.has_edge(w, v):
                raise SymmetryViolation("adjacency came out asymmetric; kernel bug")


def cube_entry(g: IncidenceGraph, v, w) -> int:
    """(A^3)_{v,w}: paths of length 3 from v to w, including loop steps."""
    vi, wi = g.vertex_index(v), g.vertex_index(w)
    mask = np.zeros(g.n, dtype=bool)
    mask[g.nbrs[wi]] = True
    mid = g.nbrs[g.nbrs[vi]]
    return int(mask[mid].sum())


@dataclass(frozen=True)
class SpectralReport:
    q: int
    field: str
    kernel: str
    lambda1: float
    lambda2_abs: float
    ratio_q56: float
    method: str
    residual: Optional[float] = None
    iterations: Optional[int] = None

    def to_json(self) -> dict:
        return {"q": self.q, "field": self.field, "kernel": self.kernel,
                "lambda1": self.lambda1, "lambda2_abs": self.lambda2_abs,
                "ratio_q56": self.ratio_q56, "method": self.method,
                "residual": self.residual, "iterations": self.iterations}


def exact_eigenvalues(g: IncidenceGraph) -> np.ndarray:
    """Full spectrum via the in-repo dense solver, ascending."""
    caps = get_caps()
    if g.q > caps.dense_spectrum_q:
        raise SizeCapExceeded("dense spectrum q", g.q, caps.dense_spectrum_q)
    return symmetric_eigenvalues(g.adjacency_matrix(np.float64))


def _matvec(nbrs: np.ndarray, x: np.ndarray) -> np.ndarray:
    return x[nbrs].sum(axis=1)


def _iterative_lambda2(g: IncidenceGraph, seed: int, tol: float,
                       max_iter: int) -> tuple[float, int, float]:
    rng = np.random.default_rng(stable_seed("power-iteration", seed, g.ctx.key,
                                            str(g.kernel)))
    x = rng.standard_normal(g.n)
    x -= x.mean()
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        x = np.zeros(g.n)
        x[0] = 1.0
        x -= x.mean()
        nrm = np.linalg.norm(x)
    x /= nrm
    residual = math.inf
    for it in range(1, max_iter + 1):
        y = _matvec(g.nbrs, x)
        y -= y.mean()
        y = _matvec(g.nbrs, y)
        y -= y.mean()
        rho = float(x @ y)  # x A^2 x >= 0 on the deflated subspace
        residual = float(np.linalg.norm(y - rho * x)) / max(abs(rho), 1e-30)
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0 or rho <= 1e-12:
            return 0.0, it, 0.0
        x = y / norm_y
        if residual <= tol:
            return math.sqrt(max(rho, 0.0)), it, residual
    raise ConvergenceFailure(residual, max_iter)


def spectrum(g: IncidenceGraph, method: str = "exact", seed: int = 0,
             tol: float = 1e-8, max_iter: int = 100_000) -> SpectralReport:
    """Spectral summary; exact = dense in-repo solver, iterative = power iteration."""
    q = g.q
    scale = q ** (5.0 / 6.0)
    if method == "exact":
        evals = exact_eigenvalues(g)
        lam1 = float(evals[-1])
        rest = np.delete(evals, len(evals) - 1)
        lam2 = float(np.abs(rest).max()) if rest.size else 0.0
        return SpectralReport(q, field_spec(g.ctx), str(g.kernel), lam1, lam2,
                              lam2 / scale, "exact")
    if method in ("iter", "iterative"):
        lam2, iters, residual = _iterative_lambda2(g, seed, tol, max_iter)
        # row sums are exactly q, so the principal eigenvalue is q with
        # eigenvector all-ones; verified in integer arithmetic here
        sums = _matvec(g.nbrs, np.ones(g.n))
        assert np.all(sums == q), "row sums must equal q exactly"
        return SpectralReport(q, field_spec(g.ctx), str(g.kernel), float(q), lam2,
                              lam2 / scale, "iterative", residual, iters)
    raise ValueError(f"unknown spectrum method {method!r}")


@dataclass(frozen=True)
class CubeAuditReport:
    q: int
    field: str
    kernel: str
    checked: int
    exhaustive: bool
    mismatches: tuple

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"q": self.q, "field": self.field, "kernel": self.kernel,
                "checked": self.checked, "exhaustive": self.exhaustive,
                "mismatch_count": len(self.mismatches),
                "mismatches": [list(m) for m in self.mismatches[:32]]}


def cube_identity_audit(g: IncidenceGraph, sample: int | None = None,
                        seed: int = 0) -> CubeAuditReport:
    """Check (A^3)_{(a,b),(c,d)} = #C_(a,b,c,d)(F_q) on all or sampled tuples."""
    q = g.q
    kernel = g.kernel
    counts: dict = {}

    def curve_count(t) -> int:
        curve = build_curve(kernel, t)
        key = curve.eq.key()
        hit = counts.get(key)
        if hit is None:
            hit = count_points(curve, 1)
            counts[key] = hit
        return hit

    mismatches = []
    if sample is None:
        a = g.adjacency_matrix(np.int64)
        a3 = a @ a @ a
        for ab in range(g.n):
            for cd in range(g.n):
                t = (*g.vertex_pair(ab), *g.vertex_pair(cd))
                paths = int(a3[ab, cd])
                pts = curve_count(t)
                if paths != pts:
                    mismatches.append((t, paths, pts))
        checked = g.n * g.n
    else:
        rng = random.Random(stable_seed("cube-audit", seed, g.ctx.key, str(kernel)))
        checked = sample
        for _ in range(sample):
            t = tuple(rng.randrange(q) for _ in range(4))
            paths = cube_entry(g, (t[0], t[1]), (t[2], t[3]))
            pts = curve_count(t)
            if paths != pts:
                mismatches.append((t, paths, pts))
    return CubeAuditReport(q, field_spec(g.ctx), str(kernel), checked,
                           sample is None, tuple(mismatches))


@dataclass(frozen=True)
class MixingReport:
    q: int
    field: str
    kernel: str
    lambda2_abs: float
    trials: int
    violations: tuple
    max_ratio: float  # max of |e - st/q| / (lambda2 sqrt(st)) over nonempty pairs

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"q": self.q, "field": self.field, "kernel": self.kernel,
                "lambda2_abs": self.lambda2_abs, "trials": self.trials,
                "violation_count": len(self.violations),
                "violations": [list(v) for v in self.violations[:32]],
                "max_ratio": self.max_ratio}


def mixing_check(g: IncidenceGraph, lambda2_abs: float, trials: int = 500,
                 seed: int = 0) -> MixingReport:
    """Audit |e(S,T) - |S||T|/q| <= lambda2 sqrt(|S||T|) on random vertex sets.

    e(S, T) counts ordered adjacent pairs; a loop at v contributes one
    for each ordered occurrence of (v, v), matching 1_S^T A 1_T.
    """
    rng = random.Random(stable_seed("mixing", seed, g.ctx.key, str(g.kernel)))
    n, q = g.n, g.q
    verts = list(range(n))
    violations = []
    max_ratio = 0.0
    for t in range(trials):
        s_size = rng.randrange(0, n + 1)
        t_size = rng.randrange(0, n + 1)
        s_set = rng.sample(verts, s_size)
        t_set = rng.sample(verts, t_size)
        t_mask = np.zeros(n, dtype=bool)
        t_mask[t_set] = True
        edges = int(t_mask[g.nbrs[s_set].ravel()].sum()) if s_size else 0
        main = s_size * t_size / q
        slack = lambda2_abs * math.sqrt(s_size * t_size) + 1e-6
        dev = abs(edges - main)
        if s_size and t_size:
            max_ratio = max(max_ratio, dev / (lambda2_abs * math.sqrt(s_size * t_size))
                            if lambda2_abs > 0 else 0.0)
        if dev > slack:
            violations.append((t, s_size, t_size, edges, dev, slack))
    return MixingReport(q, field_spec(g.ctx), str(g.kernel), lambda2_abs,
                        trials, tuple(violations), max_ratio)
