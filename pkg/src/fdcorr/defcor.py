"""Arbitrary-order derivative formulas by iterated error-term cancellation.

Every generator here starts from a short difference quotient whose exact
error expansion is known (see :mod:`fdcorr.taylorseries`) and repeatedly
removes the first surviving term.  If the running identity is

    u^(m)(x) = B u(x) - sum_t c_t k**(d_t - m) W_t u(x)
               - C_l k**(l - m) u^(l)(x) - ...

then subtracting ``C_l k**(l - m) V u(x)`` for any word ``V`` of
differentiation order ``l`` cancels the ``u^(l)`` term, because ``V`` itself
equals ``u^(l)`` plus higher-order corrections.  One-sided seeds gain one
order per step; symmetric seeds gain two, since their expansions skip every
other index.  The subtracted multiples are the formula's coefficients, all
exact rationals, and the first surviving expansion coefficient is the error
constant:

    formula(u)(x) = u^(m)(x) + error_constant * k**order * u^(m+order)(x) + ...

The named generators (`centered_formula`, `forward_centered`, ...) are thin
configurations of :func:`general_defcor`; each fixes a seed and a sequence of
correction words and relabels the engine coefficients in the convention its
defining identity is usually written in (``family_coefficients``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .exactmath import Rational, RationalLike, format_rational
from .gridops import OperatorExpr, word
from .taylorseries import default_truncation, error_series

__all__ = [
    "CorrectionFormula",
    "DegenerateChoiceError",
    "general_defcor",
    "centered_formula",
    "centered_average_formula",
    "interior_centered",
    "forward_centered",
    "backward_centered",
    "standard_forward",
    "standard_backward",
]


class DegenerateChoiceError(ValueError):
    """A correction word cannot cancel the current leading error term."""


@dataclass(frozen=True)
class CorrectionFormula:
    """A derivative approximation ``base - sum_t coeff_t k**(d_t - m) W_t``.

    ``terms`` holds the subtracted corrections in generation order; term
    ``t``'s word has differentiation order ``d_t`` and was scaled by the exact
    coefficient ``coeff_t``.  ``family_coefficients`` holds the same data
    relabelled in the family's conventional orientation (for families whose
    defining identity *adds* its corrections, these are the negated engine
    coefficients), keyed by the word order they multiply; the key
    ``order + m`` slot of that convention is the error constant.
    """

    m: int
    base_expr: OperatorExpr
    terms: tuple[tuple[Rational, OperatorExpr], ...]
    order: int
    error_constant: Rational
    family: str = "general"
    family_coefficients: Mapping[int, Rational] = None  # type: ignore[assignment]
    label: str = ""

    def __post_init__(self) -> None:
        if self.family_coefficients is None:
            object.__setattr__(
                self,
                "family_coefficients",
                {expr.diff_order: coeff for coeff, expr in self.terms},
            )

    @property
    def evaluation_shift(self) -> Rational:
        return self.base_expr.base_shift

    def term_coefficients(self) -> dict[int, Rational]:
        """Subtracted coefficient per word differentiation order."""
        return {expr.diff_order: coeff for coeff, expr in self.terms}

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "m": self.m,
            "order": self.order,
            "error_constant": format_rational(self.error_constant),
            "base": self.base_expr.to_json_dict(),
            "terms": [
                {"coeff": format_rational(c), "operator": e.to_json_dict()}
                for c, e in self.terms
            ],
            "family_coefficients": {
                str(i): format_rational(v)
                for i, v in sorted(self.family_coefficients.items())
            },
        }


def _default_seed(m: int) -> OperatorExpr:
    if m == 0:
        return word(avg=1)
    if m % 2 == 0:
        return word(fwd=m // 2, bwd=m // 2)
    return word(cent=1, fwd=(m - 1) // 2, bwd=(m - 1) // 2)


def general_defcor(
    m: int,
    order: int,
    choices: Sequence[OperatorExpr],
    epsilons: Sequence[RationalLike] | None = None,
    base: OperatorExpr | None = None,
    family: str = "general",
    label: str = "",
) -> CorrectionFormula:
    """Cancel error terms of a seed until the requested order is reached.

    ``choices`` supplies the correction words in the order they are consumed;
    each must match the differentiation order of the term it is meant to
    cancel (the engine raises :class:`DegenerateChoiceError` otherwise, e.g.
    when a word skips over a surviving term or targets one that symmetry has
    already removed).  ``epsilons`` optionally re-steps each choice relative
    to the global spacing.  With no ``base`` given, a centered seed of the
    right order is used.  Unused trailing choices are ignored; running out of
    them before reaching ``order`` is an error.
    """
    if m < 0:
        raise ValueError("derivative order m must be nonnegative")
    if order < 1:
        raise ValueError("target order must be positive")
    if base is None:
        base = _default_seed(m)
    if base.diff_order != m:
        raise ValueError(
            f"seed word differentiates {base.diff_order} times, need {m}"
        )
    effective = list(choices)
    if epsilons is not None:
        if len(epsilons) != len(effective):
            raise ValueError("epsilons must pair one-to-one with choices")
        effective = [
            expr.with_spacing(eps) for expr, eps in zip(effective, epsilons)
        ]

    truncation = default_truncation(m, order)
    residual = dict.fromkeys(range(m + 1, truncation + 1), Fraction(0))
    for i, value in error_series(base, truncation).coeffs.items():
        residual[i] = value

    applied: list[tuple[Rational, OperatorExpr]] = []
    queue = iter(effective)
    while True:
        leading = next((i for i in sorted(residual) if residual[i]), None)
        if leading is None:
            raise ValueError(
                f"error expansion vanishes through truncation {truncation}; "
                "cannot determine the achieved order"
            )
        achieved = leading - m
        if achieved >= order:
            break
        choice = next(queue, None)
        if choice is None:
            raise ValueError(
                f"ran out of correction words at order {achieved} "
                f"(target {order}); next needs differentiation order {leading}"
            )
        if choice.diff_order != leading:
            raise DegenerateChoiceError(
                f"word of differentiation order {choice.diff_order} cannot "
                f"cancel the surviving u^({leading}) term"
            )
        coeff = residual[leading]
        correction = error_series(choice, truncation)
        residual[leading] = Fraction(0)
        for i in range(leading + 1, truncation + 1):
            e_i = correction.coefficient(i)
            if e_i:
                residual[i] -= coeff * e_i
        applied.append((coeff, choice))

    return CorrectionFormula(
        m=m,
        base_expr=base,
        terms=tuple(applied),
        order=achieved,
        error_constant=residual[leading],
        family=family,
        label=label,
    )


def _relabel(
    formula: CorrectionFormula, coefficients: Mapping[int, Rational], label: str
) -> CorrectionFormula:
    return replace(formula, family_coefficients=dict(coefficients), label=label)


def centered_formula(p: int) -> CorrectionFormula:
    """First derivative at a half-point, order ``2p + 2``.

    Seed: the two-point difference across the evaluation point.  Corrections:
    centered odd words of orders 3, 5, ..., 2p+1, each subtracted, each buying
    two orders.  ``family_coefficients[2i+1]`` is the subtracted multiple of
    the order-``2i+1`` word and the error constant continues the sequence.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    base = word(cent=1)
    choices = [word(cent=1, fwd=i, bwd=i) for i in range(1, p + 1)]
    formula = general_defcor(1, 2 * p + 2, choices, base=base, family="centered")
    coeffs = {expr.diff_order: c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"C{2 * p + 2}")


def centered_average_formula(p: int) -> CorrectionFormula:
    """Value (not derivative) at a half-point from the two-point average.

    The order-0 sibling of :func:`centered_formula`: corrections are the even
    centered words followed by an average, orders 2, 4, ..., 2p, achieving
    order ``2p + 2`` for the midpoint value itself.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    base = word(avg=1)
    choices = [word(avg=1, fwd=i, bwd=i) for i in range(1, p + 1)]
    formula = general_defcor(
        0, 2 * p + 2, choices, base=base, family="centered-average"
    )
    coeffs = {expr.diff_order: c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"CA{2 * p + 2}")


def interior_centered(p: int) -> tuple[CorrectionFormula, CorrectionFormula]:
    """Midpoint derivative/value formulas whose widest nodes are the endpoints.

    Split an interval into ``2p + 1`` equal steps; the midpoint falls halfway
    between grid nodes.  The seeds are the endpoint difference quotient and
    endpoint average, words with spacing factor ``2p + 1``, corrected by
    fine-spacing centered words, so every node stays inside the interval.
    Both formulas reach order ``2p + 2``.

    ``family_coefficients`` follows the convention in which the derivative
    identity carries an overall ``1 / (interval length)`` in front of its
    correction sum: odd entries are the engine coefficients times ``2p + 1``,
    even entries (from the value formula) are the engine coefficients.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    span = 2 * p + 1
    deriv = general_defcor(
        1,
        2 * p + 2,
        [word(cent=1, fwd=i, bwd=i) for i in range(1, p + 1)],
        base=word(cent=1, spacing=span),
        family="interior-centered",
    )
    deriv_coeffs = {expr.diff_order: span * c for c, expr in deriv.terms}
    deriv = _relabel(deriv, deriv_coeffs, label=f"IC{2 * p + 2}")

    value = general_defcor(
        0,
        2 * p + 2,
        [word(avg=1, fwd=i, bwd=i) for i in range(1, p + 1)],
        base=word(avg=1, spacing=span),
        family="interior-centered",
    )
    value_coeffs = {expr.diff_order: c for c, expr in value.terms}
    value = _relabel(value, value_coeffs, label=f"IC{2 * p + 2}-value")
    return deriv, value


def _mixed_words(upto: int) -> list[OperatorExpr]:
    # order-i word: bwd^(i % 2) (fwd bwd)^(i // 2); widest pattern that keeps
    # at most one node ahead of the evaluation point.
    return [word(fwd=i // 2, bwd=i // 2 + i % 2) for i in range(2, upto + 1)]


def forward_centered(p: int) -> CorrectionFormula:
    """Derivative at a node from the forward quotient plus near-centered words.

    Corrections of order ``i`` use ``bwd^(i % 2) (fwd bwd)^(i // 2)``, whose
    nodes hug the evaluation point instead of marching off one-sidedly; the
    resulting coefficients shrink factorially, unlike the ``1/i`` pattern of
    :func:`standard_forward`.  Achieves order ``p`` with error constant equal
    to the next coefficient in the family sequence.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    formula = general_defcor(
        1, p, _mixed_words(p), base=word(fwd=1), family="forward-centered"
    )
    coeffs = {expr.diff_order: c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"FC{p}")


def backward_centered(p: int) -> CorrectionFormula:
    """Mirror of :func:`forward_centered` seeded by the backward quotient.

    Its defining identity *adds* the correction words, so
    ``family_coefficients`` are the negated engine coefficients: they share
    the order-2 entry with the forward variant and flip sign from order 3 on.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    formula = general_defcor(
        1, p, _mixed_words(p), base=word(bwd=1), family="backward-centered"
    )
    coeffs = {expr.diff_order: -c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"BC{p}")


def standard_forward(p: int) -> CorrectionFormula:
    """Classical one-sided forward formula of order ``p``.

    Corrections are the pure forward powers; the subtracted coefficients come
    out as ``(-1)**i / i`` with error constant ``(-1)**(p+1) / (p+1)``.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    choices = [word(fwd=i) for i in range(2, p + 1)]
    formula = general_defcor(
        1, p, choices, base=word(fwd=1), family="standard-forward"
    )
    coeffs = {expr.diff_order: c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"F{p}")


def standard_backward(p: int) -> CorrectionFormula:
    """Classical one-sided backward formula of order ``p``.

    The conventional statement adds ``(1/i) k**(i-1)`` times the backward
    powers, so ``family_coefficients[i] == 1/i`` while the stored engine
    coefficients are their negatives; the subtracted-side error constant is
    ``-1 / (p + 1)``.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    choices = [word(bwd=i) for i in range(2, p + 1)]
    formula = general_defcor(
        1, p, choices, base=word(bwd=1), family="standard-backward"
    )
    coeffs = {expr.diff_order: -c for c, expr in formula.terms}
    return _relabel(formula, coeffs, label=f"B{p}")
