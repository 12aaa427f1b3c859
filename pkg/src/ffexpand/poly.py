"""Sparse multivariate polynomials over a finite field, plus the kernel
predicates every construction downstream is gated on.

A polynomial stores a map from exponent vectors to nonzero coefficients
(element indices of its field). Variables are explicit names kept in
sorted order, and variables that no longer occur are dropped, so equal
polynomials always have equal representations. The degree of the zero
polynomial is -1.

A "kernel" is a symmetric bivariate polynomial with at least one mixed
monomial and total degree below the characteristic; validate_kernel is
the single gate that enforces those three hypotheses.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import (Diagonal, DegreeTooLarge, MissingVariable, MixedFields,
                     NotBivariate, NotSymmetric, PolyParseError, ValidationError)
from .field import Embedding, FieldCtx

__all__ = ["MultiPoly", "SymmetricKernel", "parse_poly", "is_symmetric",
           "is_diagonal", "validate_kernel", "lift", "grid_eval1", "grid_eval2"]


class MultiPoly:
    """Immutable sparse polynomial; all operations return new instances."""

    __slots__ = ("ctx", "vars", "terms")

    def __init__(self, ctx: FieldCtx, terms: Mapping[tuple[int, ...], int],
                 variables: tuple[str, ...]):
        live = {e: c for e, c in terms.items() if c}
        active = [i for i in range(len(variables)) if any(e[i] for e in live)]
        if len(active) != len(variables):
            variables = tuple(variables[i] for i in active)
            live = {tuple(e[i] for i in active): c for e, c in live.items()}
        self.ctx = ctx
        self.vars = variables
        self.terms = live

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx) -> "MultiPoly":
        return cls(ctx, {}, ())

    @classmethod
    def const(cls, ctx: FieldCtx, c: int) -> "MultiPoly":
        return cls(ctx, {(): c}, ())

    @classmethod
    def var(cls, ctx: FieldCtx, name: str) -> "MultiPoly":
        return cls(ctx, {(1,): 1}, (name,))

    # -- basic queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        if name not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def constant_value(self) -> int:
        """The value of a constant polynomial (0 for the zero polynomial)."""
        if self.vars:
            raise ValidationError("polynomial is not constant")
        return self.terms.get((), 0)

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and self.ctx.key == other.ctx.key
                and self.vars == other.vars and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ctx.key, self.vars, frozenset(self.terms.items())))

    def key(self):
        """Canonical hashable form, for memoisation."""
        return (self.ctx.key, self.vars, tuple(sorted(self.terms.items())))

    # -- alignment -------------------------------------------------------------

    def _aligned_with(self, other: "MultiPoly"):
        if self.ctx.key != other.ctx.key:
            raise MixedFields("polynomials over different fields")
        merged = tuple(sorted(set(self.vars) | set(other.vars)))
        return merged, self._remap(merged), other._remap(merged)

    def _remap(self, merged: tuple[str, ...]) -> dict:
        pos = [merged.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            full = [0] * len(merged)
            for p_i, exp in zip(pos, e):
                full[p_i] = exp
            out[tuple(full)] = c
        return out

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        merged, a, b = self._aligned_with(other)
        out = dict(a)
        add = self.ctx.add
        for e, c in b.items():
            out[e] = add(out.get(e, 0), c)
        return MultiPoly(self.ctx, out, merged)

    def __neg__(self) -> "MultiPoly":
        neg = self.ctx.neg
        return MultiPoly(self.ctx, {e: neg(c) for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        merged, a, b = self._aligned_with(other)
        ctx = self.ctx
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                prod = ctx.mul(ca, cb)
                cur = out.get(e)
                out[e] = prod if cur is None else ctx.add(cur, prod)
        return MultiPoly(ctx, out, merged)

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise ValidationError("negative polynomial power")
        result = MultiPoly.const(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c: int) -> "MultiPoly":
        mul = self.ctx.mul
        return MultiPoly(self.ctx, {e: mul(v, c) for e, v in self.terms.items()}, self.vars)

    # -- substitution and evaluation ------------------------------------------------

    def substitute(self, name: str, value: Union[int, "MultiPoly"]) -> "MultiPoly":
        """Replace one variable by a field element or another polynomial."""
        if name not in self.vars:
            return self
        i = self.vars.index(name)
        rest_vars = self.vars[:i] + self.vars[i + 1:]
        ctx = self.ctx
        if isinstance(value, MultiPoly):
            if value.ctx.key != ctx.key:
                raise MixedFields("substituted polynomial lives in a different field")
            acc = MultiPoly.zero(ctx)
            powers: dict[int, MultiPoly] = {0: MultiPoly.const(ctx, 1)}
            for e, c in sorted(self.terms.items()):
                k = e[i]
                if k not in powers:
                    powers[k] = value ** k
                rest = MultiPoly(ctx, {e[:i] + e[i + 1:]: c}, rest_vars)
                acc = acc + rest * powers[k]
            return acc
        out: dict = {}
        for e, c in self.terms.items():
            coeff = ctx.mul(c, ctx.pow(value, e[i])) if e[i] else c
            key = e[:i] + e[i + 1:]
            cur = out.get(key)
            out[key] = coeff if cur is None else ctx.add(cur, coeff)
        return MultiPoly(ctx, out, rest_vars)

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """Term-wise evaluation; the assignment must cover every variable."""
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise MissingVariable(f"no value for variable(s) {missing}")
        ctx = self.ctx
        total = 0
        vals = [assignment[v] for v in self.vars]
        for e, c in self.terms.items():
            t = c
            for val, exp in zip(vals, e):
                if exp:
                    t = ctx.mul(t, ctx.pow(val, exp))
            total = ctx.add(total, t)
        return total

    # -- presentation -----------------------------------------------------------------

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            factors = []
            if c != 1 or not any(e):
                factors.append(str(c))
            for name, exp in zip(self.vars, e):
                if exp == 1:
                    factors.append(name)
                elif exp > 1:
                    factors.append(f"{name}^{exp}")
            bits.append("*".join(factors))
        return " + ".join(bits)

    def to_json(self) -> list[dict]:
        records = []
        for e, c in sorted(self.terms.items()):
            records.append({"exponents": {v: k for v, k in zip(self.vars, e) if k},
                            "coefficient": c})
        return records

    @classmethod
    def from_json(cls, ctx: FieldCtx, records: list[dict]) -> "MultiPoly":
        acc = cls.zero(ctx)
        for rec in records:
            exps = rec["exponents"]
            variables = tuple(sorted(exps))
            term = cls(ctx, {tuple(exps[v] for v in variables): rec["coefficient"] % ctx.q},
                       variables)
            acc = acc + term
        return acc


def parse_poly(ctx: FieldCtx, text: str) -> MultiPoly:
    """Parse expressions like "(a+x)^2" or "x*y + 3*x + 3*y".

    Integer literals are reduced into the prime subfield; exponents must
    be nonnegative integer constants.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolyParseError(f"cannot parse polynomial {text!r}: {exc}") from None

    def walk(node) -> MultiPoly:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Name):
            return MultiPoly.var(ctx, node.id)
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, int):
                raise PolyParseError(f"non-integer literal {node.value!r}")
            return MultiPoly.const(ctx, ctx.scalar(node.value))
        if isinstance(node, ast.UnaryOp):
            operand = walk(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return operand
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant)
                        and isinstance(node.right.value, int) and node.right.value >= 0):
                    raise PolyParseError("exponent must be a nonnegative integer literal")
                return walk(node.left) ** node.right.value
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
        raise PolyParseError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)


# ---------------------------------------------------------------------------
# Kernel predicates


def _as_pair(f: MultiPoly, pair) -> tuple[str, str]:
    if pair is not None:
        if len(pair) != 2:
            raise NotBivariate("a variable pair is required")
        if not set(f.vars) <= set(pair):
            raise NotBivariate(f"polynomial in {f.vars} does not fit pair {tuple(pair)}")
        return tuple(pair)
    if len(f.vars) == 2:
        return f.vars
    if len(f.vars) > 2:
        raise NotBivariate(f"polynomial has {len(f.vars)} variables: {f.vars}")
    # constants and univariate polynomials: pad with a fresh name
    u = f.vars[0] if f.vars else "u"
    return (u, u + "'")


def is_symmetric(f: MultiPoly, pair=None) -> bool:
    """True iff the coefficient table is invariant under swapping the two variables."""
    u, v = _as_pair(f, pair)
    table = f._remap(tuple(sorted((u, v))))
    return all(table.get((j, i)) == c for (i, j), c in table.items())


def is_diagonal(f: MultiPoly, pair=None) -> bool:
    """True iff every monomial involves at most one variable."""
    _as_pair(f, pair)
    return all(sum(1 for k in e if k) <= 1 for e in f.terms)


@dataclass(frozen=True)
class SymmetricKernel:
    """A validated kernel: symmetric, non-diagonal, degree < characteristic."""

    f: MultiPoly
    degree: int

    @property
    def ctx(self) -> FieldCtx:
        return self.f.ctx

    @property
    def pair(self) -> tuple[str, str]:
        return self.f.vars

    def at(self, first, second) -> MultiPoly:
        """The kernel applied to two arguments (elements, names or polynomials)."""
        ctx = self.ctx

        def coerce(arg):
            if isinstance(arg, MultiPoly):
                return arg
            if isinstance(arg, str):
                return MultiPoly.var(ctx, arg)
            return MultiPoly.const(ctx, arg)

        a, b = coerce(first), coerce(second)
        acc = MultiPoly.zero(ctx)
        pows_a: dict[int, MultiPoly] = {0: MultiPoly.const(ctx, 1)}
        pows_b: dict[int, MultiPoly] = {0: MultiPoly.const(ctx, 1)}
        for (i, j), c in sorted(self.f.terms.items()):
            if i not in pows_a:
                pows_a[i] = a ** i
            if j not in pows_b:
                pows_b[j] = b ** j
            acc = acc + (pows_a[i] * pows_b[j]).scale(c)
        return acc

    def value_grid(self) -> np.ndarray:
        """(q, q) table of kernel values, [i, j] = F(i, j)."""
        return grid_eval2(self.f, *self.pair)

    def __str__(self):
        return str(self.f)


def validate_kernel(f: MultiPoly, ctx: FieldCtx | None = None) -> SymmetricKernel:
    """Gate for every downstream construction; raises naming the violated hypothesis."""
    if ctx is not None and ctx.key != f.ctx.key:
        raise MixedFields("kernel polynomial belongs to a different field")
    ctx = f.ctx
    if len(f.vars) > 2:
        raise NotBivariate(f"kernel must be bivariate, got variables {f.vars}")
    if not is_symmetric(f):
        raise NotSymmetric("kernel must satisfy F(a,x) = F(x,a)")
    deg = f.total_degree()
    if deg >= ctx.char:
        raise DegreeTooLarge(deg, ctx.char)
    if is_diagonal(f):
        raise Diagonal("kernel must contain a monomial mixing both variables")
    return SymmetricKernel(f, deg)


def lift(f: MultiPoly, embedding: Embedding) -> MultiPoly:
    """Coefficient-wise image of f in the extension; degrees are unchanged."""
    if f.ctx.key != embedding.source.key:
        raise MixedFields("embedding source does not match the polynomial's field")
    return MultiPoly(embedding.target, {e: embedding(c) for e, c in f.terms.items()}, f.vars)


# ---------------------------------------------------------------------------
# Vectorised evaluation over the whole field


def _power_arrays(ctx: FieldCtx, max_exp: int) -> list[np.ndarray]:
    xs = np.arange(ctx.q, dtype=np.int64)
    pows = [np.ones(ctx.q, dtype=np.int64)]
    for _ in range(max_exp):
        pows.append(ctx.mul_vec(pows[-1], xs).astype(np.int64))
    return pows


def grid_eval1(f: MultiPoly, name: str) -> np.ndarray:
    """Evaluate a univariate (or constant) polynomial at every field element."""
    if any(v != name for v in f.vars):
        raise MissingVariable(f"polynomial has variables {f.vars}, expected only {name!r}")
    ctx = f.ctx
    pows = _power_arrays(ctx, f.degree_in(name) if f.vars else 0)
    acc = np.zeros(ctx.q, dtype=np.int64)
    for e, c in f.terms.items():
        exp = e[0] if e else 0
        acc = ctx.add_vec(acc, ctx.mul_vec(pows[exp], np.int64(c))).astype(np.int64)
    return acc


def grid_eval2(f: MultiPoly, uname: str, vname: str) -> np.ndarray:
    """(q, q) table of values, [i, j] = f(uname=i, vname=j)."""
    if any(v not in (uname, vname) for v in f.vars):
        raise MissingVariable(f"polynomial has variables {f.vars}, "
                              f"expected only {uname!r}, {vname!r}")
    ctx = f.ctx
    du, dv = f.degree_in(uname), f.degree_in(vname)
    pows_u = _power_arrays(ctx, max(du, 0))
    pows_v = _power_arrays(ctx, max(dv, 0))
    iu = f.vars.index(uname) if uname in f.vars else None
    iv = f.vars.index(vname) if vname in f.vars else None
    acc = np.zeros((ctx.q, ctx.q), dtype=np.int64)
    for e, c in f.terms.items():
        eu = e[iu] if iu is not None else 0
        ev = e[iv] if iv is not None else 0
        t = ctx.mul_vec(pows_u[eu][:, None], pows_v[ev][None, :])
        t = ctx.mul_vec(t, np.int64(c))
        acc = ctx.add_vec(acc, t).astype(np.int64)
    return acc
