"""Dense univariate polynomials over a finite field.

Coefficients are stored ascending with no trailing zeros; [] is the zero
polynomial and its degree is -1. Besides ring arithmetic this module
carries the univariate factorization stack (squarefree decomposition,
distinct-degree, Cantor-Zassenhaus equal-degree splitting with the trace
construction in characteristic 2) that the bivariate factorizer reduces
to. Randomised steps draw from a generator seeded by the input
polynomial, so factorizations are reproducible.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

import numpy as np

from .errors import DivisionByZero, MixedFields, ValidationError
from .field import FieldCtx
from .seeding import stable_seed

__all__ = ["UniPoly", "xgcd", "factor", "is_irreducible", "squarefree_decomposition"]


class UniPoly:
    """Immutable dense polynomial in one variable over a FieldCtx."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, ())

    @classmethod
    def const(cls, ctx, c):
        return cls(ctx, (c,))

    @classmethod
    def x(cls, ctx):
        return cls(ctx, (0, 1))

    @classmethod
    def monomial(cls, ctx, e, c=1):
        return cls(ctx, (0,) * e + (c,))

    # -- queries -------------------------------------------------------------

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        if not self.coeffs:
            raise ValidationError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        return (isinstance(other, UniPoly) and self.ctx.key == other.ctx.key
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ctx.key, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if not c:
                continue
            if e == 0:
                bits.append(str(c))
            else:
                xs = "x" if e == 1 else f"x^{e}"
                bits.append(xs if c == 1 else f"{c}*{xs}")
        return " + ".join(bits)

    def _check(self, other: "UniPoly"):
        if self.ctx.key != other.ctx.key:
            raise MixedFields("polynomials over different fields")

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        ctx = self.ctx
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = ctx.add(out[i], c)
        return UniPoly(ctx, out)

    def __neg__(self):
        neg = self.ctx.neg
        return UniPoly(self.ctx, (neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        ctx = self.ctx
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly.zero(ctx)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = ctx.add(out[i + j], ctx.mul(ai, bj))
        return UniPoly(ctx, out)

    def scale(self, c: int):
        mul = self.ctx.mul
        return UniPoly(self.ctx, (mul(a, c) for a in self.coeffs))

    def shift(self, e: int):
        """Multiply by x^e."""
        if not self.coeffs:
            return self
        return UniPoly(self.ctx, (0,) * e + self.coeffs)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        ctx = self.ctx
        rem = list(self.coeffs)
        db = other.degree()
        inv_lead = ctx.inv(other.lead())
        quo = [0] * max(0, len(rem) - db)
        while len(rem) - 1 >= db and rem:
            shift = len(rem) - 1 - db
            factor = ctx.mul(rem[-1], inv_lead)
            quo[shift] = factor
            for i, bi in enumerate(other.coeffs):
                if bi:
                    rem[shift + i] = ctx.sub(rem[shift + i], ctx.mul(factor, bi))
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(ctx, quo), UniPoly(ctx, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero() or self.lead() == 1:
            return self
        return self.scale(self.ctx.inv(self.lead()))

    def derivative(self) -> "UniPoly":
        ctx = self.ctx
        out = []
        for e in range(1, len(self.coeffs)):
            out.append(ctx.mul(self.coeffs[e], ctx.scalar(e)))
        return UniPoly(ctx, out)

    def evaluate(self, x: int) -> int:
        ctx = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, x), c)
        return acc

    def evaluate_vec(self, xs: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        acc = np.zeros(np.shape(xs), dtype=np.int64)
        for c in reversed(self.coeffs):
            acc = ctx.add_vec(ctx.mul_vec(acc, xs), np.int64(c)).astype(np.int64)
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        """self(inner(x)), by Horner over polynomial arithmetic."""
        self._check(inner)
        acc = UniPoly.zero(self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * inner + UniPoly.const(self.ctx, c)
        return acc

    def pow_mod(self, e: int, modulus: "UniPoly") -> "UniPoly":
        result = UniPoly.const(self.ctx, 1) % modulus
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            e >>= 1
            if e:
                base = (base * base) % modulus
        return result

    def pth_root(self) -> "UniPoly":
        """Inverse of the Frobenius on a polynomial whose exponents are all divisible by p."""
        ctx = self.ctx
        p = ctx.p
        root_exp = ctx.p ** (ctx.n - 1)  # a -> a^(1/p) on elements
        out = []
        for e, c in enumerate(self.coeffs):
            if c and e % p:
                raise ValidationError("polynomial is not a p-th power")
            if e % p == 0:
                out.append(ctx.pow(c, root_exp) if c else 0)
        return UniPoly(ctx, out)

    def roots(self) -> list[int]:
        """All roots in the base field, ascending."""
        if self.is_zero():
            raise ValidationError("every element is a root of the zero polynomial")
        ctx = self.ctx
        if ctx.q <= 65536:
            xs = np.arange(ctx.q, dtype=np.int64)
            vals = self.evaluate_vec(xs)
            return [int(r) for r in np.nonzero(vals == 0)[0]]
        return sorted(ctx.neg(f.coeffs[0]) for f, _ in factor(self) if f.degree() == 1)


def gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def xgcd(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """(g, s, t) with g = gcd monic and s*a + t*b = g."""
    ctx = a.ctx
    r0, r1 = a, b
    s0, s1 = UniPoly.const(ctx, 1), UniPoly.zero(ctx)
    t0, t1 = UniPoly.zero(ctx), UniPoly.const(ctx, 1)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    c = ctx.inv(r0.lead())
    return r0.scale(c), s0.scale(c), t0.scale(c)


# ---------------------------------------------------------------------------
# Factorization


def squarefree_decomposition(f: UniPoly) -> list[tuple[UniPoly, int]]:
    """Monic squarefree parts with multiplicities; input need not be monic."""
    if f.degree() < 1:
        return []
    f = f.monic()
    p = f.ctx.p
    fp = f.derivative()
    if fp.is_zero():
        return [(g, m * p) for g, m in squarefree_decomposition(f.pth_root())]
    out = []
    c = gcd(f, fp)
    w = f // c
    i = 1
    while w.degree() > 0:
        y = gcd(w, c)
        z = w // y
        if z.degree() > 0:
            out.append((z, i))
        w, c = y, c // y
        i += 1
    if c.degree() > 0:
        out.extend((g, m * p) for g, m in squarefree_decomposition(c.pth_root()))
    return out


def _distinct_degree(f: UniPoly) -> list[tuple[UniPoly, int]]:
    # f monic squarefree
    ctx = f.ctx
    out = []
    h = UniPoly.x(ctx) % f
    d = 0
    fstar = f
    while fstar.degree() > 0:
        d += 1
        if 2 * d > fstar.degree():
            out.append((fstar, fstar.degree()))
            break
        h = h.pow_mod(ctx.q, fstar)
        g = gcd(h - UniPoly.x(ctx), fstar)
        if g.degree() > 0:
            out.append((g, d))
            fstar = fstar // g
            h = h % fstar
    return out


def _equal_degree(f: UniPoly, d: int, rng: random.Random) -> list[UniPoly]:
    # f monic squarefree, all irreducible factors of degree d
    if f.degree() == d:
        return [f]
    ctx = f.ctx
    q = ctx.q
    while True:
        h = UniPoly(ctx, [rng.randrange(q) for _ in range(f.degree())])
        if h.degree() < 1:
            continue
        if ctx.p == 2:
            # absolute trace to F_2 of F_{q^d} = F_2^{n d}
            t = h % f
            acc = t
            for _ in range(ctx.n * d - 1):
                t = (t * t) % f
                acc = acc + t
            g = gcd(acc, f)
        else:
            e = (q ** d - 1) // 2
            g = gcd(h.pow_mod(e, f) - UniPoly.const(ctx, 1), f)
        if 0 < g.degree() < f.degree():
            return sorted(_equal_degree(g, d, rng) + _equal_degree(f // g, d, rng),
                          key=lambda u: u.coeffs)


def factor_squarefree(f: UniPoly, seed: int = 0) -> list[UniPoly]:
    """Distinct monic irreducible factors of a squarefree polynomial."""
    rng = random.Random(stable_seed("unipoly", seed, f.ctx.key, f.coeffs))
    out = []
    for g, d in _distinct_degree(f.monic()):
        out.extend(_equal_degree(g, d, rng))
    return sorted(out, key=lambda u: u.coeffs)


def factor(f: UniPoly, seed: int = 0) -> list[tuple[UniPoly, int]]:
    """Full factorization into monic irreducibles with multiplicities.

    The product of the factors times lead(f) reproduces f exactly.
    """
    if f.is_zero():
        raise ValidationError("cannot factor the zero polynomial")
    out = []
    for g, mult in squarefree_decomposition(f):
        for irr in factor_squarefree(g, seed):
            out.append((irr, mult))
    return sorted(out, key=lambda t: (t[0].degree(), t[0].coeffs, t[1]))


def is_irreducible(f: UniPoly) -> bool:
    """Rabin's test: x^(q^d) = x mod f and proper-divisor powers are coprime."""
    d = f.degree()
    if d < 1:
        return False
    if d == 1:
        return True
    ctx = f.ctx
    x = UniPoly.x(ctx)
    primes = set()
    m = d
    k = 2
    while k * k <= m:
        while m % k == 0:
            primes.add(k)
            m //= k
        k += 1
    if m > 1:
        primes.add(m)
    for ell in primes:
        h = x.pow_mod(ctx.q ** (d // ell), f) - x
        if gcd(h, f).degree() != 0:
            return False
    return x.pow_mod(ctx.q ** d, f) == x % f
