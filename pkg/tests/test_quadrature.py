"""Disc, box and circle quadrature and the supremum grids."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreykit.quadrature import (
    Arc, BoxRule, DiscRule, ParamGrid, QuadratureError, Resolution, abs2_modes, depth_for,
    first_argmax, integrate_box, integrate_circle, integrate_disc, sup_over_grid,
)
from morreykit.series import evaluate_circle, random_polynomial
from morreykit.spaces import garsia_measure
from morreykit.verify import standard_corpus


@pytest.fixture(scope="module")
def rule():
    return DiscRule.standard()


class TestIntegrateDisc:
    def test_constant(self, rule):
        assert integrate_disc(rule, lambda z: np.ones(z.shape)) == pytest.approx(1.0, abs=1e-13)

    def test_radial_moment(self, rule):
        assert integrate_disc(rule, lambda z: np.abs(z) ** 2) == pytest.approx(0.5, abs=1e-13)

    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_log_weight(self, rule, n):
        def dens(z):
            r = np.abs(z)
            return 2 * n * n * r ** (2 * n - 2) * np.log(1 / r)
        # the log singularity at 0 costs a few ulps of the inner panels
        assert integrate_disc(rule, dens) == pytest.approx(1.0, abs=1e-10)

    def test_non_finite_node_is_named(self, rule):
        with pytest.raises(QuadratureError, match="node r="), np.errstate(divide="ignore"):
            integrate_disc(rule, lambda z: 1 / (np.abs(z) - rule.nodes[3]))

    def test_refinement_convergence(self):
        coarse = DiscRule.from_resolution(Resolution())
        fine = DiscRule.from_resolution(Resolution().refine())
        for label, f in standard_corpus():
            if f.degree == 0:
                continue
            mu = garsia_measure(f)
            a, b = integrate_disc(coarse, mu), integrate_disc(fine, mu)
            assert abs(a - b) / abs(b) < 1e-6, label
        for dens in (lambda z: np.abs(1 - 0.9 * z) ** -2, lambda z: np.abs(z) ** 6):
            a, b = integrate_disc(coarse, dens), integrate_disc(fine, dens)
            assert abs(a - b) / abs(b) < 1e-6

    def test_modes_agree_with_sampling(self, rule):
        f = random_polynomial(30, 5)
        exact = abs2_modes(f.coeffs, rule.nodes)
        vals = np.abs(evaluate_circle(f, rule.nodes, rule.m)) ** 2
        assert np.allclose(exact[:, 0], vals.mean(axis=1), rtol=1e-12)


class TestIntegrateBox:
    @pytest.mark.parametrize("h", [0.5, 0.25, 2.0 ** -6])
    def test_area(self, h):
        box = BoxRule.for_lengths([h])
        val = integrate_box(box, lambda z: np.ones(z.shape), Arc(1.3, h))
        assert val == pytest.approx(h * h * (2 - h), rel=1e-12)

    def test_full_box_is_the_disc(self, rule):
        for dens in (lambda z: np.ones(z.shape), lambda z: np.abs(1 + z) ** 2 * (1 - np.abs(z)),
                     lambda z: np.abs(z - 0.3) ** 3):
            assert integrate_box(rule, dens, Arc(0.7, 1.0)) == \
                pytest.approx(integrate_disc(rule, dens), abs=1e-10)

    def test_zero_density(self, rule):
        assert integrate_box(rule, lambda z: np.zeros(z.shape), Arc(0.0, 0.5)) == 0.0

    def test_break_added_on_demand(self, rule):
        # 1 - 0.3 is not a panel break of the standard rule
        val = integrate_box(rule, lambda z: np.ones(z.shape), Arc(0.0, 0.3))
        assert val == pytest.approx(0.09 * 1.7, rel=1e-12)

    def test_additivity_over_arcs(self, rule):
        dens = lambda z: np.abs(1 - 0.5 * z) ** 2  # noqa: E731
        halves = [integrate_box(rule, dens, Arc(t, 0.5)) for t in (0.0, math.pi)]
        assert sum(halves) == pytest.approx(integrate_box(rule, dens, Arc(0.0, 1.0)) -
                                            integrate_disc(rule, lambda z: np.where(
                                                np.abs(z) < 0.5, dens(z), 0.0)), rel=1e-3)

    def test_arc_length_range(self):
        with pytest.raises(QuadratureError):
            Arc(0.0, 0.0)
        with pytest.raises(QuadratureError):
            Arc(0.0, 1.5)


class TestIntegrateCircle:
    def test_examples(self):
        assert integrate_circle(lambda z: np.ones(z.shape)) == pytest.approx(1.0)
        assert integrate_circle(lambda z: np.abs(z) ** 6, 0.7) == pytest.approx(0.7 ** 6)
        assert integrate_circle(lambda z: np.abs(1 + z) ** 2) == pytest.approx(2.0, abs=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 200), st.integers(0, 10_000))
    def test_exact_for_polynomials(self, deg, seed):
        f = random_polynomial(deg, seed)
        c = f.coeffs[::-1]
        val = integrate_circle(lambda z: np.abs(np.polyval(c, z)) ** 2, 1.0, 512)
        assert val == pytest.approx(math.fsum(np.abs(f.coeffs) ** 2), rel=1e-12)

    def test_radius_range(self):
        with pytest.raises(QuadratureError):
            integrate_circle(lambda z: z, 0.0)


class TestGrids:
    def test_depth_coupling(self):
        assert depth_for(256) == 4
        assert depth_for(16) == 0
        with pytest.raises(QuadratureError):
            depth_for(8)

    def test_standard_grid(self):
        g = ParamGrid.standard(4)
        assert g.radii == (0.0, 0.5, 0.75, 0.875, 0.9375)
        assert g.angle_counts[0] == 1
        assert g.angle_counts[-1] == max(16, math.ceil(2 * math.pi / 0.0625))
        assert g.lengths[-1] == 1 / 16

    def test_refined_grid_keeps_the_floor(self):
        g0 = ParamGrid.from_resolution(Resolution())
        g1 = ParamGrid.from_resolution(Resolution().refine())
        assert g1.radii[-1] == g0.radii[-1]
        assert set(g0.radii) <= set(g1.radii)

    def test_arc_centres_cover(self):
        g = ParamGrid.standard(3)
        for h in g.lengths[1:]:
            c = g.centers(h)
            assert np.max(np.diff(np.append(c, 2 * np.pi))) <= np.pi * h + 1e-12

    def test_sup_constant_first_point(self):
        g = ParamGrid.standard(2)
        val, arg = sup_over_grid(g, lambda a: 3.0)
        assert val == 3.0 and arg == g.points()[0]

    def test_sup_radial(self):
        val, arg = sup_over_grid(ParamGrid.standard(3).radii, lambda r: 1 - r)
        assert (val, arg) == (1.0, 0.0)

    def test_sup_over_arcs(self):
        val, arc = sup_over_grid(ParamGrid.standard(2), lambda I: I.h, over="arcs")
        assert val == 1.0 and isinstance(arc, Arc)

    def test_empty_grid(self):
        with pytest.raises(QuadratureError):
            sup_over_grid([], lambda x: 0.0)
        with pytest.raises(QuadratureError):
            first_argmax(np.array([]), [])

    def test_first_argmax_ties(self):
        assert first_argmax(np.array([1.0, 2.0, 2.0]), ["a", "b", "c"]) == (2.0, "b")

    def test_invalid_resolution(self):
        with pytest.raises(QuadratureError):
            Resolution(m=4)
