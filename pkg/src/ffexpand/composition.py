"""Polynomial composition identities and additive-polynomial detection.

Two independent characterisations of additivity live here on purpose:
is_additive expands P(x+y) - P(x) - P(y) formally as a bivariate
polynomial and asks whether it vanishes, while additive_decompose reads
off whether every exponent is a power of the characteristic. Their
equivalence is a theorem; the test suite checks it exhaustively at small
degrees rather than assuming it.

The formal identity is used instead of point sampling because over F_q
sampling cannot tell P(x) from P(x) + (x^q - x) * anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ConstantQ, MixedFields, NotAdditiveShape
from .poly import MultiPoly
from .unipoly import UniPoly

__all__ = ["UniPoly", "compose", "find_linear_relation", "LemmaVerdict",
           "check_composition_lemma", "is_additive", "additive_decompose"]


def compose(outer: UniPoly, inner: UniPoly) -> UniPoly:
    """outer(inner(x)); degrees multiply when both are nonconstant."""
    if outer.ctx.key != inner.ctx.key:
        raise MixedFields("composition of polynomials over different fields")
    return outer.compose(inner)


def find_linear_relation(q_poly: UniPoly, s_poly: UniPoly) -> Optional[tuple[int, int]]:
    """(alpha, beta) with s = alpha*q + beta and alpha != 0, if they exist."""
    if q_poly.degree() < 1:
        raise ConstantQ("the reference polynomial must be nonconstant")
    if s_poly.degree() != q_poly.degree():
        return None
    ctx = q_poly.ctx
    alpha = ctx.mul(s_poly.lead(), ctx.inv(q_poly.lead()))
    diff = s_poly - q_poly.scale(alpha)
    if diff.degree() > 0:
        return None
    beta = diff[0]
    return alpha, beta


@dataclass(frozen=True)
class LemmaVerdict:
    """Outcome of one composition-lemma instance.

    hypotheses_hold: P∘Q = R∘S with 0 < deg P = deg R < char.
    conclusion_holds: S = L∘Q for a linear L (found constructively).
    The lemma predicts hypotheses_hold implies conclusion_holds; a
    counterexample is recorded, never silently patched.
    """

    hypotheses_hold: bool
    conclusion_holds: bool
    relation: Optional[tuple[int, int]] = None

    def counterexample(self) -> bool:
        return self.hypotheses_hold and not self.conclusion_holds


def check_composition_lemma(p_poly: UniPoly, q_poly: UniPoly,
                            r_poly: UniPoly, s_poly: UniPoly) -> LemmaVerdict:
    """Falsification harness for the composition lemma; never raises on content."""
    ctx = p_poly.ctx
    for other in (q_poly, r_poly, s_poly):
        if other.ctx.key != ctx.key:
            raise MixedFields("lemma instance mixes fields")
    dp, dr = p_poly.degree(), r_poly.degree()
    hypotheses = (0 < dp == dr < ctx.char
                  and compose(p_poly, q_poly) == compose(r_poly, s_poly))
    if q_poly.degree() < 1:
        return LemmaVerdict(hypotheses, False, None)
    rel = find_linear_relation(q_poly, s_poly)
    return LemmaVerdict(hypotheses, rel is not None, rel)


def is_additive(p_poly: UniPoly) -> bool:
    """Formal check that P(x+y) - P(x) - P(y) is the zero polynomial."""
    ctx = p_poly.ctx
    x = MultiPoly.var(ctx, "x")
    y = MultiPoly.var(ctx, "y")

    def as_multi(arg: MultiPoly) -> MultiPoly:
        acc = MultiPoly.zero(ctx)
        power = MultiPoly.const(ctx, 1)
        for c in p_poly.coeffs:
            if c:
                acc = acc + power.scale(c)
            power = power * arg
        return acc

    return (as_multi(x + y) - as_multi(x) - as_multi(y)).is_zero()


def additive_decompose(p_poly: UniPoly) -> list[int]:
    """Coefficients (a_0, ..., a_K) with P = sum a_j X^(p^j).

    Succeeds iff every exponent carrying a nonzero coefficient is a
    power of the characteristic; recomposition is coefficient-exact.
    """
    p = p_poly.ctx.p
    slots: dict[int, int] = {}
    for e, c in enumerate(p_poly.coeffs):
        if not c:
            continue
        j, power = 0, 1
        while power < e:
            power *= p
            j += 1
        if power != e or e == 0:
            raise NotAdditiveShape(e)
        slots[j] = c
    if not slots:
        return []
    return [slots.get(j, 0) for j in range(max(slots) + 1)]


def recompose_additive(ctx, coefficients: list[int]) -> UniPoly:
    """Inverse of additive_decompose, for round-trip checks."""
    acc = UniPoly.zero(ctx)
    for j, c in enumerate(coefficients):
        if c:
            acc = acc + UniPoly.monomial(ctx, ctx.p ** j, c)
    return acc
