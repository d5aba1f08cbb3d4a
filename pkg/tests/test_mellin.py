import math

import numpy as np
import pytest

from ekstat.errors import PoleError, UsageError
from ekstat.kober import DimParams, MultiDensity, exponential_product, gamma_product
from ekstat.mellin import (
    default_s_grid,
    kober_mellin_ratio,
    mellin_factorization_check,
    mellin_numeric,
)

SQRT_PI = 1.7724538509055159
# Gamma(2.5)/Gamma(4), frozen from log-gamma evaluation
RATIO_HALF = 0.22155673136318954


class TestMellinNumeric:
    def test_gamma_integral_identity(self):
        res = mellin_numeric(exponential_product(1), 2.0)
        assert res.value.real == pytest.approx(1.0, rel=1e-8)
        assert abs(res.value.imag) < 1e-12
        assert res.converged

    def test_half_integer_point(self):
        res = mellin_numeric(exponential_product(1), 0.5)
        assert res.value.real == pytest.approx(SQRT_PI, rel=1e-8)

    def test_two_dim_product(self):
        res = mellin_numeric(exponential_product(2), np.array([2.0, 3.0]))
        assert res.value.real == pytest.approx(2.0, rel=1e-8)

    def test_conjugate_symmetry(self):
        f = gamma_product((2.0,))
        s = np.array([1.5 + 0.5j])
        plus = mellin_numeric(f, s, refine=False).value
        minus = mellin_numeric(f, s.conj(), refine=False).value
        assert minus == pytest.approx(plus.conjugate(), rel=1e-12)

    def test_matches_closed_form_at_complex_point(self):
        f = gamma_product((2.0,))
        s = np.array([1.5 + 0.5j])
        res = mellin_numeric(f, s, refine=False)
        assert res.value == pytest.approx(f.mellin(s), rel=1e-8)

    def test_divergent_point_flags_nonconvergence(self):
        # integral of u^(s-1) e^-u diverges at s = -0.2
        res = mellin_numeric(exponential_product(1), -0.2)
        assert res.converged is False

    def test_refinement_bound_on_smooth_case(self):
        res = mellin_numeric(gamma_product((3.0,)), 1.7)
        exact = math.gamma(3.0 + 1.7 - 1.0) / math.gamma(3.0)
        assert abs(res.value.real - exact) <= max(res.est_error * 10.0, 1e-12)


class TestMellinRatio:
    def test_second_kind_value(self):
        val = kober_mellin_ratio("second", [DimParams(0.5, 1.5)], 2.0)
        assert val.real == pytest.approx(RATIO_HALF, rel=1e-12)

    def test_first_kind_value(self):
        # Gamma(1.5)/Gamma(2.5) = 1/1.5
        val = kober_mellin_ratio("first", [DimParams(1.0, 1.0)], 0.5)
        assert val.real == pytest.approx(1.0 / 1.5, rel=1e-12)

    def test_vanishing_order_gives_unity(self):
        val = kober_mellin_ratio("second", [DimParams(0.5, 1e-13)], 1.7)
        assert val.real == pytest.approx(1.0, rel=1e-10)

    def test_pole_detection_names_dimension(self):
        with pytest.raises(PoleError) as info:
            kober_mellin_ratio("second", [DimParams(0.5, 1.0), DimParams(1.0, 1.0)],
                               np.array([2.0, -1.0]))
        assert info.value.dimension == 1


class TestDefaultGrid:
    def test_second_kind_keeps_whole_base_grid(self):
        grid = default_s_grid("second", [DimParams(0.5, 1.5)])
        assert len(grid) == 5

    def test_first_kind_respects_strip(self):
        grid = default_s_grid("first", [DimParams(1.0, 1.0)])
        for s in grid:
            assert s[0].real < 2.0
        assert len(grid) == 3  # 0.8, 1.5, 1.5+0.5i

    def test_two_dim_is_cartesian_product(self):
        grid = default_s_grid("first", [DimParams(1.0, 0.7), DimParams(2.0, 1.3)])
        assert len(grid) == 3 * 4


class TestFactorizationCheck:
    def test_second_kind_exponential_single_point(self):
        f = exponential_product(1)
        rep = mellin_factorization_check(
            "second", [DimParams(0.5, 1.5)], f, s_grid=[np.array([2.0])]
        )
        assert rep.passed
        # lhs equals Gamma(2.5)/Gamma(4) * Gamma(2)
        assert rep.lhs[0].real == pytest.approx(RATIO_HALF, rel=1e-7)

    def test_second_kind_default_grid_one_dim(self):
        f = gamma_product((2.0,))
        rep = mellin_factorization_check("second", [DimParams(0.5, 0.7)], f)
        assert rep.passed and rep.max_rel_err < 1e-6

    def test_first_kind_default_grid_one_dim(self):
        f = gamma_product((2.0,))
        rep = mellin_factorization_check("first", [DimParams(1.0, 0.7)], f)
        assert rep.passed and rep.max_rel_err < 1e-6

    def test_identity_limit_small_alpha(self):
        f = gamma_product((2.0,))
        rep = mellin_factorization_check(
            "second", [DimParams(0.5, 1e-9)], f, s_grid=[np.array([1.5])]
        )
        assert rep.lhs[0] == pytest.approx(f.mellin(np.array([1.5])), rel=1e-6)

    def test_requires_closed_form(self):
        bare = MultiDensity(dim=1, pdf=lambda p: np.exp(-p[..., 0]))
        with pytest.raises(UsageError):
            mellin_factorization_check("second", [DimParams(0.5, 1.0)], bare)

    def test_report_dict_shape(self):
        f = gamma_product((2.0,))
        rep = mellin_factorization_check(
            "second", [DimParams(0.5, 1.5)], f, s_grid=[np.array([2.0])]
        )
        doc = rep.to_dict()
        assert doc["pass"] is True
        assert doc["points"][0]["s"][0]["re"] == pytest.approx(2.0)
