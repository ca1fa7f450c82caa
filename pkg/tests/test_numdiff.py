"""Float evaluation, exact evaluation, and convergence-study mechanics."""

import math
import random
from fractions import Fraction

import pytest

from fdcorr import (
    GridFunction,
    Stencil,
    apply_stencil,
    apply_stencil_exact,
    apply_to_samples,
    centered_formula,
    convergence_study,
    flatten,
    general_defcor,
    oracle_weights,
    standard_backward,
    standard_forward,
)

C4 = flatten(centered_formula(1))
SECOND = flatten(general_defcor(2, 2, []))
# classical integer-offset central difference, built from the moment solver
CENTRAL = Stencil(
    m=1,
    order=2,
    offsets=(Fraction(-1), Fraction(0), Fraction(1)),
    weights=tuple(oracle_weights([-1, 0, 1], 1)),
    error_constant=Fraction(1, 6),
    provenance="central",
)


class TestApplyStencil:
    def test_central_difference_on_even_function_at_origin(self):
        value = apply_stencil(CENTRAL, lambda x: x * x, 0.0, 0.1)
        assert abs(value) < 1e-15

    def test_second_difference_on_quadratic(self):
        value = apply_stencil(SECOND, lambda x: 3.0 * x * x, 1.0, 0.01)
        assert abs(value - 6.0) < 1e-9

    def test_rejects_nonpositive_spacing(self):
        with pytest.raises(ValueError):
            apply_stencil(CENTRAL, math.sin, 0.0, 0.0)

    def test_nonfinite_sample_warns_and_propagates(self):
        with pytest.warns(RuntimeWarning, match="nonfinite"):
            value = apply_stencil(CENTRAL, lambda x: math.inf if x > 0 else 0.0, 0.0, 0.5)
        assert not math.isfinite(value)

    def test_determinism(self):
        st = flatten(standard_backward(6))
        f = lambda x: math.sin(100 * math.pi * x)
        runs = {apply_stencil(st, f, 0.0, 1e-3) for _ in range(5)}
        assert len(runs) == 1


class TestApplyStencilExact:
    def test_lead_monomial_gives_factorial_scaled_derivative(self):
        # fourth derivative of t**4 is 24 everywhere
        st = flatten(general_defcor(4, 2, []))
        assert apply_stencil_exact(st, lambda t: t**4, 0, 1) == 24

    @pytest.mark.parametrize(
        "st", [C4, SECOND, flatten(standard_forward(4))], ids=lambda s: s.provenance
    )
    def test_polynomial_exactness_below_order_bound(self, st):
        x0 = Fraction(3, 7)
        h = Fraction(1, 5)
        for r in range(st.m + st.order):
            def monomial(t, r=r):
                return t**r

            exact = (
                math.factorial(r)
                // math.factorial(r - st.m)
                * x0 ** (r - st.m)
                if r >= st.m
                else Fraction(0)
            )
            assert apply_stencil_exact(st, monomial, x0, h) == exact

    def test_float_mode_matches_exact_scale(self):
        # float error stays far below the computation's own magnitude
        for st in (C4, flatten(standard_backward(6))):
            for h in (1e-3, 1e-2, 0.1, 1.0):
                x0 = 0.618
                for r in range(st.m + st.order):
                    f = lambda x: x**r
                    got = apply_stencil(st, f, x0, h)
                    exact = (
                        math.factorial(r) / math.factorial(r - st.m) * x0 ** (r - st.m)
                        if r >= st.m
                        else 0.0
                    )
                    scale = sum(
                        abs(float(w)) * abs(f(x0 + float(o) * h))
                        for o, w in st.nodes()
                    ) / h**st.m
                    assert abs(got - exact) <= 1e-12 * max(scale, abs(exact))


class TestApplyToSamples:
    def test_linear_samples(self):
        samples = GridFunction({i: Fraction(i) for i in range(-3, 4)})
        assert apply_to_samples(CENTRAL, samples, 0, Fraction(1)) == 1

    def test_quartic_samples(self):
        st = flatten(general_defcor(4, 2, []))
        samples = GridFunction({i: Fraction(i) ** 4 for i in range(-4, 5)})
        assert apply_to_samples(st, samples, 0, Fraction(1)) == 24

    def test_matches_lookup_backed_callable(self):
        rng = random.Random(5)
        table = {Fraction(i, 2): rng.uniform(-1, 1) for i in range(-12, 13)}
        samples = GridFunction(table)
        h = 0.25

        def lookup(x):
            return table[Fraction(x / h).limit_denominator(64)]

        direct = apply_to_samples(C4, samples, 0, h)
        via_callable = apply_stencil(C4, lookup, 0.0, h)
        assert direct == pytest.approx(via_callable, abs=0.0, rel=1e-15)

    def test_missing_index_is_named(self):
        samples = GridFunction({0: 1, 1: 1})
        with pytest.raises(LookupError, match="3/2"):
            apply_to_samples(C4, samples, 0, 1.0)


class TestConvergenceStudy:
    def test_requires_three_decreasing_spacings(self):
        f = math.sin
        with pytest.raises(ValueError):
            convergence_study(C4, f, 1.0, 0.0, [0.1, 0.05])
        with pytest.raises(ValueError):
            convergence_study(C4, f, 1.0, 0.0, [0.1, 0.1, 0.05])

    def test_sixth_order_backward_on_oscillatory_function(self):
        st = flatten(standard_backward(6))
        omega = 100 * math.pi
        grid = [1e-3 * 2.0**-j for j in range(9)]
        report = convergence_study(
            st, lambda x: math.sin(omega * x), omega, 0.0, grid, formula_id="B6"
        )
        assert abs(report.fitted_order() - 6) <= 0.2
        assert report.roundoff_floor_index <= len(grid)

    def test_pairwise_orders_match_definition(self):
        st = flatten(standard_backward(6))
        omega = 100 * math.pi
        grid = [1e-3, 5e-4, 2.5e-4]
        report = convergence_study(st, lambda x: math.sin(omega * x), omega, 0.0, grid)
        e, h = report.abs_errors, report.spacings
        for i in range(2):
            expected = math.log(e[i] / e[i + 1]) / math.log(h[i] / h[i + 1])
            assert report.observed_orders[i] == pytest.approx(expected)

    def test_polynomial_exactness_floors_everything(self):
        report = convergence_study(
            C4, lambda x: x**3, 0.0, 0.0, [0.1, 0.05, 0.025], formula_id="C4"
        )
        assert max(report.abs_errors) < 1e-12

    def test_exactly_zero_errors_give_no_fit(self):
        # binary-exact weights and an even integrand cancel to exactly zero
        report = convergence_study(CENTRAL, lambda x: x * x, 0.0, 0.0, [0.5, 0.25, 0.125])
        assert report.abs_errors == (0.0, 0.0, 0.0)
        assert math.isnan(report.fitted_order())

    def test_csv_rows(self):
        st = flatten(standard_backward(6))
        report = convergence_study(
            st, lambda x: math.sin(x), 1.0, 0.0, [0.4, 0.2, 0.1], formula_id="B6"
        )
        rows = report.csv_rows()
        assert rows[0] == ("h", "abs_error", "observed_order")
        assert rows[1][2] == ""
        assert rows[2][2] != ""
        assert len(rows) == 4

    def test_fit_window_spans_clean_monotone_grid(self):
        st = flatten(standard_backward(6))
        grid = [0.4, 0.2, 0.1]
        report = convergence_study(st, math.sin, 1.0, 0.0, grid)
        assert report.fit_window() == [0, 1, 2]
