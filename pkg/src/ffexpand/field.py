"""Exact arithmetic in small finite fields F_{p^n}.

An element is identified with its canonical index in [0, q): the
coefficient vector (c_0, ..., c_{n-1}) of the element in the power basis
of the modulus is read as the base-p integer c_0 + c_1*p + .... With that
convention the enumeration order, table indexing and serialized form are
all the same thing, and the integers 0..p-1 are exactly the prime
subfield.

Construction is deterministic: the modulus of F_{p^n} is the first monic
irreducible of degree n in base-p digit order (constant coefficient the
least significant digit), so independent processes agree on every
element. Fields with q up to the dense-table cap get q x q operation
tables, built vectorised; larger fields operate directly on digit
vectors, which is slower per operation but never needed in a hot loop.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np

from .caps import Caps, get_caps
from .errors import DivisionByZero, MixedFields, NonPrime, SizeCapExceeded, ValidationError

__all__ = ["FieldCtx", "Embedding", "make_field", "extend", "parse_field_spec", "is_prime"]


def is_prime(n: int) -> bool:
    """Trial-division primality check; fine for the sizes we allow."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# Raw polynomial arithmetic over F_p on coefficient tuples (ascending).
# Used for modulus search and as the fallback scalar path of large fields.

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    _trim(a)
    db, da = len(b) - 1, len(a) - 1
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p) if b[-1] != 1 else 1
    quo = [0] * max(0, da - db + 1)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = (a[-1] * inv_lead) % p
        quo[shift] = factor
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % p
        _trim(a)
    return _trim(quo), a


def _poly_mod(a, b, p):
    return _poly_divmod(a, b, p)[1]


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    m = max(len(a), len(b))
    a = list(a) + [0] * (m - len(a))
    b = list(b) + [0] * (m - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _irreducible_over_fp(f: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    deg = len(f) - 1
    if deg <= 0:
        return False
    for d in range(1, deg // 2 + 1):
        for k in range(p ** d):
            trial, x = [], k
            for _ in range(d):
                x, r = divmod(x, p)
                trial.append(r)
            trial.append(1)
            if not _poly_mod(f, trial, p):
                return False
    return True


def _first_irreducible(p: int, n: int) -> tuple[int, ...]:
    """First monic irreducible of degree n over F_p in base-p digit order."""
    for k in range(p ** n):
        cand, x = [], k
        for _ in range(n):
            x, r = divmod(x, p)
            cand.append(r)
        cand.append(1)
        if _irreducible_over_fp(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found; unreachable")


class FieldCtx:
    """The field F_{p^n} with elements as canonical indices in [0, q).

    Immutable after construction; every operation is a pure function of
    its arguments, so instances are safe to share across threads.
    """

    def __init__(self, p: int, n: int, caps: Caps | None = None):
        caps = caps or get_caps()
        self.p = p
        self.n = n
        self.q = p ** n
        self.modulus = _first_irreducible(p, n)
        self.key = (p, n, self.modulus)
        self._caps = caps
        # lazily built structures
        self._mul: np.ndarray | None = None
        self._add: np.ndarray | None = None
        self._neg: np.ndarray | None = None
        self._inv: np.ndarray | None = None
        self._digit_mat: np.ndarray | None = None
        self._red_mat: np.ndarray | None = None

    # -- identification ----------------------------------------------------

    @property
    def char(self) -> int:
        return self.p

    def __repr__(self):
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def same(self, other: "FieldCtx"):
        if self.key != other.key:
            raise MixedFields(f"elements of {self!r} and {other!r} cannot be mixed")

    # -- element plumbing ----------------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        """Coefficient vector of x in the power basis, ascending."""
        out = []
        for _ in range(self.n):
            x, r = divmod(x, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, cs: Iterable[int]) -> int:
        cs = list(cs)
        if len(cs) > self.n:
            raise ValidationError(f"coefficient vector longer than degree {self.n}")
        x = 0
        for c in reversed(cs):
            x = x * self.p + c % self.p
        return x

    def scalar(self, k: int) -> int:
        """Image of the integer k in the prime subfield."""
        return k % self.p

    def enumerate(self) -> range:
        """All q elements in canonical (base-p digit) order; index 0 is zero."""
        return range(self.q)

    # -- digit-matrix machinery (large fields and table construction) -------

    def _digits_all(self) -> np.ndarray:
        if self._digit_mat is None:
            idx = np.arange(self.q, dtype=np.int64)
            out = np.empty((self.q, self.n), dtype=np.int16)
            for i in range(self.n):
                out[:, i] = idx % self.p
                idx //= self.p
            self._digit_mat = out
        return self._digit_mat

    def _reduction_matrix(self) -> np.ndarray:
        # row k = coefficient vector of x^(n+k) mod modulus, k = 0..n-2
        if self._red_mat is None:
            p, n = self.p, self.n
            rows = np.zeros((max(n - 1, 0), n), dtype=np.int64)
            cur = [(-c) % p for c in self.modulus[:n]]  # x^n
            for k in range(n - 1):
                rows[k, :len(cur)] = cur
                cur = [0] + cur  # multiply by x
                if len(cur) > n:
                    lead = cur.pop()
                    if lead:
                        cur = [(ci + lead * ri) % p for ci, ri in
                               zip(cur, ((-c) % p for c in self.modulus[:n]))]
            self._red_mat = rows
        return self._red_mat

    def _encode(self, digs: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.n, dtype=np.int64)
        return (digs.astype(np.int64) @ weights)

    def _mul_digits(self, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        # row-wise product of digit vectors, reduced mod (modulus, p)
        n, p = self.n, self.p
        m = da.shape[0]
        conv = np.zeros((m, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            conv[:, i:i + n] += da[:, i:i + 1].astype(np.int64) * db
        conv %= p
        low = conv[:, :n]
        if n > 1:
            low = (low + conv[:, n:] @ self._reduction_matrix()) % p
        return low

    # -- dense tables --------------------------------------------------------

    @property
    def has_tables(self) -> bool:
        return self.q <= self._caps.dense_table

    def _build_tables(self):
        q, p, n = self.q, self.p, self.n
        digs = self._digits_all()
        add = (digs[:, None, :] + digs[None, :, :]) % p
        self._add = self._encode(add.reshape(q * q, n)).reshape(q, q).astype(np.int32)
        self._neg = self._encode((-digs) % p).astype(np.int32)
        mul = np.empty((q, q), dtype=np.int32)
        block = max(1, 4_000_000 // max(q, 1))
        for start in range(0, q, block):
            stop = min(start + block, q)
            a = np.repeat(digs[start:stop], q, axis=0)
            b = np.tile(digs, (stop - start, 1))
            prod = self._mul_digits(a, b)
            mul[start:stop] = self._encode(prod).reshape(stop - start, q)
        self._mul = mul
        inv = np.zeros(q, dtype=np.int32)
        ai, bi = np.nonzero(mul == 1)
        inv[ai] = bi
        self._inv = inv

    def _tables(self):
        if self._mul is None:
            if not self.has_tables:
                return None
            self._build_tables()
        return self._mul

    # -- scalar operations ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self._tables() is not None:
            return int(self._add[a, b])
        return self.from_coeffs((x + y) % self.p
                                for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        if self._tables() is not None:
            return int(self._neg[a])
        return self.from_coeffs((-x) % self.p for x in self.coeffs(a))

    def mul(self, a: int, b: int) -> int:
        if self._tables() is not None:
            return int(self._mul[a, b])
        prod = _poly_mul(_trim(list(self.coeffs(a))), _trim(list(self.coeffs(b))), self.p)
        return self.from_coeffs(_poly_mod(prod, list(self.modulus), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in {self!r}")
        if self._tables() is not None:
            return int(self._inv[a])
        # extended Euclid on coefficient polynomials; invariant s_k * a = r_k
        p = self.p
        r0, r1 = list(self.modulus), _trim(list(self.coeffs(a)))
        s0, s1 = [], [1]
        while r1:
            quo, rem = _poly_divmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1, p), p)
        c_inv = pow(r0[0], p - 2, p)
        res = [(c * c_inv) % p for c in s0]
        return self.from_coeffs(_poly_mod(res, list(self.modulus), p))

    def pow(self, a: int, e: int) -> int:
        """Square-and-multiply; negative exponents go through inv."""
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # -- vectorised operations (numpy arrays of element indices) -------------

    def add_vec(self, a, b) -> np.ndarray:
        if self._tables() is not None:
            return self._add[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        digs = self._digits_all()
        out = (digs[a.ravel()] + digs[b.ravel()]) % self.p
        return self._encode(out).reshape(a.shape)

    def neg_vec(self, a) -> np.ndarray:
        if self._tables() is not None:
            return self._neg[a]
        a = np.asarray(a)
        digs = self._digits_all()
        return self._encode((-digs[a.ravel()]) % self.p).reshape(a.shape)

    def mul_vec(self, a, b) -> np.ndarray:
        if self._tables() is not None:
            return self._mul[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        digs = self._digits_all()
        prod = self._mul_digits(digs[a.ravel()], digs[b.ravel()])
        return self._encode(prod).reshape(a.shape)


class Embedding:
    """Injective ring homomorphism F_{p^n} -> F_{p^{nm}}.

    Determined by the first root (in canonical order) of the source
    modulus inside the target; any root gives an isomorphic embedding,
    the first one makes the choice reproducible.
    """

    def __init__(self, source: FieldCtx, target: FieldCtx, root: int):
        self.source = source
        self.target = target
        self.root = root
        pows = [1]
        for _ in range(source.n - 1):
            pows.append(target.mul(pows[-1], root))
        self._pows = pows
        self._cache: dict[int, int] = {}
        self._inverse: dict[int, int] | None = None

    def __call__(self, x: int) -> int:
        y = self._cache.get(x)
        if y is None:
            y = 0
            for c, r in zip(self.source.coeffs(x), self._pows):
                if c:
                    y = self.target.add(y, self.target.mul(c, r))
            self._cache[x] = y
        return y

    def section(self, y: int) -> int:
        """Preimage of y; raises if y is not in the embedded subfield."""
        if self._inverse is None:
            self._inverse = {self(x): x for x in self.source.enumerate()}
        try:
            return self._inverse[y]
        except KeyError:
            raise ValidationError(f"{y} is not in the image of {self.source!r}") from None

    def __repr__(self):
        return f"Embedding({self.source!r} -> {self.target!r}, root={self.root})"


@functools.lru_cache(maxsize=None)
def _field_cached(p: int, n: int) -> FieldCtx:
    return FieldCtx(p, n)


def make_field(p: int, n: int = 1, caps: Caps | None = None) -> FieldCtx:
    """The canonical F_{p^n}: first-irreducible modulus, cached per (p, n)."""
    caps = caps or get_caps()
    if not isinstance(p, int) or not is_prime(p):
        raise NonPrime(p)
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"extension degree must be a positive integer, got {n}")
    if p ** n > caps.field_size:
        raise SizeCapExceeded("field size q", p ** n, caps.field_size)
    return _field_cached(p, n)


@functools.lru_cache(maxsize=None)
def _extend_cached(key, m: int):
    ctx = _field_cached(key[0], key[1])
    big = make_field(ctx.p, ctx.n * m)
    # find the first root of ctx.modulus in the extension (Horner, vectorised)
    xs = np.arange(big.q, dtype=np.int64)
    acc = np.full(big.q, ctx.modulus[-1], dtype=np.int64)
    for c in reversed(ctx.modulus[:-1]):
        acc = big.add_vec(big.mul_vec(acc, xs), np.full(big.q, c, dtype=np.int64))
    roots = np.nonzero(acc == 0)[0]
    root = int(roots[0])
    return big, Embedding(ctx, big, root)


def extend(ctx: FieldCtx, m: int, caps: Caps | None = None) -> tuple[FieldCtx, Embedding]:
    """F_{q^m} together with the canonical embedding F_q -> F_{q^m}."""
    caps = caps or get_caps()
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"extension degree must be a positive integer, got {m}")
    if ctx.q ** m > caps.field_size:
        raise SizeCapExceeded("extension size q^m", ctx.q ** m, caps.field_size)
    return _extend_cached(ctx.key, m)


def parse_field_spec(spec: str, caps: Caps | None = None) -> FieldCtx:
    """Parse "p^n" (or plain "p") into the canonical field."""
    text = spec.strip()
    try:
        if "^" in text:
            p_str, n_str = text.split("^", 1)
            p, n = int(p_str), int(n_str)
        else:
            p, n = int(text), 1
    except ValueError:
        raise ValidationError(f"bad field spec {spec!r}; expected 'p^n'") from None
    return make_field(p, n, caps)
