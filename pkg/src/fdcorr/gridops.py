"""Difference-operator words on a uniform grid and their exact node expansions.

A word is a commuting product of powers of four elementary operators, all
tied to a step ``s = spacing_factor * k`` where ``k`` is the global grid
spacing:

    forward    (u(x + s) - u(x)) / s
    backward   (u(x) - u(x - s)) / s
    centered   (u(x + s/2) - u(x - s/2)) / s
    average    (u(x + s/2) + u(x - s/2)) / 2

The first three differentiate once each; the average does not.  Forward and
backward powers commute, and the centered/average factors act at half-steps,
which is how two-point-per-step families live on half-integer grids.

:func:`expand` turns a word into flat node/weight form.  Offsets are kept in
units of the *global* spacing with the word's own step folded into offsets
and weights, so words with different steps combine without rescaling:

    word(u)(x) = k**-m * sum_j w_j * u(x + o_j * k)

with ``m`` the word's total differentiation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .exactmath import Rational, RationalLike, binom, format_rational

__all__ = [
    "OperatorExpr",
    "RawStencil",
    "GridFunction",
    "GridRangeError",
    "word",
    "expand",
    "normalize_composite",
    "apply",
    "product_rule_check",
]


@dataclass(frozen=True)
class OperatorExpr:
    """A difference word ``fwd^p_fwd bwd^p_bwd cent^p_cent avg^p_avg``.

    ``base_shift`` records where the word is anchored relative to the index it
    is applied at, in units of the global spacing (used by
    :func:`normalize_composite` to express equivalent re-anchored words).
    ``spacing_factor`` scales the word's step relative to the global spacing.
    """

    p_fwd: int = 0
    p_bwd: int = 0
    p_cent: int = 0
    p_avg: int = 0
    base_shift: Rational = Fraction(0)
    spacing_factor: Rational = Fraction(1)

    def __post_init__(self) -> None:
        for name in ("p_fwd", "p_bwd", "p_cent", "p_avg"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        object.__setattr__(self, "base_shift", Fraction(self.base_shift))
        spacing = Fraction(self.spacing_factor)
        if spacing <= 0:
            raise ValueError("spacing_factor must be positive")
        object.__setattr__(self, "spacing_factor", spacing)

    @property
    def diff_order(self) -> int:
        """Total differentiation order of the word."""
        return self.p_fwd + self.p_bwd + self.p_cent

    def shifted(self, delta: RationalLike) -> "OperatorExpr":
        return replace(self, base_shift=self.base_shift + Fraction(delta))

    def with_spacing(self, spacing: RationalLike) -> "OperatorExpr":
        return replace(self, spacing_factor=Fraction(spacing))

    def __mul__(self, other: "OperatorExpr") -> "OperatorExpr":
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if self.spacing_factor != other.spacing_factor:
            raise ValueError("cannot compose words with different spacing factors")
        return OperatorExpr(
            p_fwd=self.p_fwd + other.p_fwd,
            p_bwd=self.p_bwd + other.p_bwd,
            p_cent=self.p_cent + other.p_cent,
            p_avg=self.p_avg + other.p_avg,
            base_shift=self.base_shift + other.base_shift,
            spacing_factor=self.spacing_factor,
        )

    def describe(self) -> str:
        parts = []
        for sym, power in (
            ("fwd", self.p_fwd),
            ("bwd", self.p_bwd),
            ("cent", self.p_cent),
            ("avg", self.p_avg),
        ):
            if power == 1:
                parts.append(sym)
            elif power > 1:
                parts.append(f"{sym}^{power}")
        text = "*".join(parts) or "id"
        if self.base_shift:
            text += f" @ {format_rational(self.base_shift)}"
        if self.spacing_factor != 1:
            text += f" (step x{format_rational(self.spacing_factor)})"
        return text

    def to_json_dict(self) -> dict:
        return {
            "fwd": self.p_fwd,
            "bwd": self.p_bwd,
            "cent": self.p_cent,
            "avg": self.p_avg,
            "base_shift": format_rational(self.base_shift),
            "spacing_factor": format_rational(self.spacing_factor),
        }


def word(
    fwd: int = 0,
    bwd: int = 0,
    cent: int = 0,
    avg: int = 0,
    shift: RationalLike = 0,
    spacing: RationalLike = 1,
) -> OperatorExpr:
    """Shorthand constructor for :class:`OperatorExpr`."""
    return OperatorExpr(
        p_fwd=fwd,
        p_bwd=bwd,
        p_cent=cent,
        p_avg=avg,
        base_shift=Fraction(shift),
        spacing_factor=Fraction(spacing),
    )


@dataclass(frozen=True)
class RawStencil:
    """Flat node/weight form of a word, offsets in units of the global spacing.

    The represented value is ``k**-scale_order * sum_j w_j u(base + o_j k)``
    where ``base`` is the application point plus ``base_shift`` steps.
    """

    scale_order: int
    base_shift: Rational
    nodes: Mapping[Rational, Rational]

    def sorted_nodes(self) -> list[tuple[Rational, Rational]]:
        return sorted(self.nodes.items())

    def to_json_dict(self) -> dict:
        return {
            "scale_order": self.scale_order,
            "base_shift": format_rational(self.base_shift),
            "nodes": [
                {"offset": format_rational(o), "weight": format_rational(w)}
                for o, w in self.sorted_nodes()
            ],
        }


# Elementary factors as {local offset: weight}, in units of the word's own step.
_ELEMENTARY: tuple[tuple[str, tuple[tuple[Fraction, Fraction], ...]], ...] = (
    ("p_fwd", ((Fraction(1), Fraction(1)), (Fraction(0), Fraction(-1)))),
    ("p_bwd", ((Fraction(0), Fraction(1)), (Fraction(-1), Fraction(-1)))),
    ("p_cent", ((Fraction(1, 2), Fraction(1)), (Fraction(-1, 2), Fraction(-1)))),
    ("p_avg", ((Fraction(1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(1, 2)))),
)


def _convolve(
    nodes: dict[Fraction, Fraction], factor: Iterable[tuple[Fraction, Fraction]]
) -> dict[Fraction, Fraction]:
    out: dict[Fraction, Fraction] = {}
    for o1, w1 in nodes.items():
        for o2, w2 in factor:
            key = o1 + o2
            out[key] = out.get(key, Fraction(0)) + w1 * w2
    return {o: w for o, w in out.items() if w}


def expand(expr: OperatorExpr) -> RawStencil:
    """Exact node/weight expansion of a word.

    Pure composites come out with alternating binomial weights; the word's
    spacing factor is folded into offsets and weights so the result is always
    expressed against the global spacing.
    """
    nodes: dict[Fraction, Fraction] = {Fraction(0): Fraction(1)}
    for name, factor in _ELEMENTARY:
        for _ in range(getattr(expr, name)):
            nodes = _convolve(nodes, factor)
    order = expr.diff_order
    spacing = expr.spacing_factor
    if spacing != 1:
        rescale = Fraction(1) / spacing**order
        nodes = {o * spacing: w * rescale for o, w in nodes.items()}
    return RawStencil(scale_order=order, base_shift=expr.base_shift, nodes=nodes)


def normalize_composite(
    expr: OperatorExpr,
) -> tuple[OperatorExpr, Rational] | None:
    """Rewrite an even pure forward/backward word as a centered composite.

    ``fwd^a bwd^b`` with ``a + b`` even equals ``(fwd bwd)^((a+b)/2)`` anchored
    ``(a - b)/2`` steps away.  Returns the re-anchored word and the shift
    delta, or ``None`` when ``a + b`` is odd (no such rewrite exists).
    """
    if expr.p_cent or expr.p_avg:
        raise ValueError("normalize_composite applies to pure forward/backward words")
    total = expr.p_fwd + expr.p_bwd
    if total % 2:
        return None
    half = total // 2
    delta = Fraction(expr.p_fwd - half)
    normalized = OperatorExpr(
        p_fwd=half,
        p_bwd=half,
        base_shift=expr.base_shift + delta,
        spacing_factor=expr.spacing_factor,
    )
    return normalized, delta


class GridRangeError(LookupError):
    """A required grid sample is missing; the message names the index."""

    def __init__(self, index: Rational):
        self.index = index
        super().__init__(f"no sample at grid index {format_rational(index)}")


class GridFunction:
    """Samples of a function on (possibly half-integer) grid indices."""

    def __init__(self, samples: Mapping[RationalLike, object]):
        self.samples = {Fraction(i): v for i, v in samples.items()}

    @classmethod
    def tabulate(
        cls, fn: Callable[[Rational], object], indices: Iterable[RationalLike]
    ) -> "GridFunction":
        return cls({Fraction(i): fn(Fraction(i)) for i in indices})

    def value(self, index: RationalLike):
        try:
            return self.samples[Fraction(index)]
        except KeyError:
            raise GridRangeError(Fraction(index)) from None

    def __contains__(self, index: RationalLike) -> bool:
        return Fraction(index) in self.samples

    def __iter__(self) -> Iterator[Rational]:
        return iter(sorted(self.samples))

    def __len__(self) -> int:
        return len(self.samples)


def apply(expr: OperatorExpr, u: GridFunction, at: RationalLike, k):
    """Evaluate a word on grid samples at index ``at``.

    Exact when samples and ``k`` are rational; nodes are visited in ascending
    offset order so float evaluations are reproducible too.
    """
    st = expand(expr)
    base = Fraction(at) + expr.base_shift
    total = None
    for offset, weight in st.sorted_nodes():
        term = weight * u.value(base + offset)
        total = term if total is None else total + term
    if total is None:
        total = Fraction(0)
    return total / k**st.scale_order if st.scale_order else total


def product_rule_check(
    m: int, f: GridFunction, g: GridFunction, n: RationalLike, k
) -> tuple[object, object]:
    """Evaluate both sides of the even composite's product expansion.

    One application of the second-difference composite ``A = fwd*bwd``
    distributes over a product as

        A(fg) = Af*g + f*Ag + fwd(f)*bwd(g) + bwd(f)*fwd(g) + k**2 * Af*Ag,

    and since the five pieces commute as difference symbols, ``A**m`` is
    their plain multinomial power: a sum over split counts (i1..i5) of

        m!/(i1!..i5!) * k**(2*i5) * word(fwd=i1+i3+i5, bwd=i1+i4+i5) f
                                  * word(fwd=i2+i4+i5, bwd=i2+i3+i5) g.

    Grouped by j = i5, the pair of words applied to f and g splits the
    double index (m+j, m+j); the multinomial weight counts how many ways
    the split arises.  Both sides are returned so a caller (or test) can
    report any discrepancy, which for exact samples must be zero.
    """
    if m < 1:
        raise ValueError("product_rule_check: m must be positive")
    base = Fraction(n)
    composite = word(fwd=m, bwd=m)
    span = expand(composite).nodes
    product = GridFunction(
        {base + o: f.value(base + o) * g.value(base + o) for o in span}
    )
    lhs = apply(composite, product, base, k)
    factorial_m = math.factorial(m)
    rhs = None
    for i1 in range(m + 1):
        for i2 in range(m + 1 - i1):
            for i3 in range(m + 1 - i1 - i2):
                for i4 in range(m + 1 - i1 - i2 - i3):
                    i5 = m - i1 - i2 - i3 - i4
                    weight = factorial_m // (
                        math.factorial(i1)
                        * math.factorial(i2)
                        * math.factorial(i3)
                        * math.factorial(i4)
                        * math.factorial(i5)
                    )
                    left = apply(word(fwd=i1 + i3 + i5, bwd=i1 + i4 + i5), f, base, k)
                    right = apply(word(fwd=i2 + i4 + i5, bwd=i2 + i3 + i5), g, base, k)
                    term = weight * k ** (2 * i5) * left * right
                    rhs = term if rhs is None else rhs + term
    return lhs, rhs
