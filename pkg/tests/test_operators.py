"""Coefficient operators and the operator-norm sweeps."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreykit.operators import (
    OperatorError, OperatorSpec, SpacePair, apply, decomposition_check, default_family,
    essential_proxy, family_grid, opnorm_lower, theorem_comparator,
)
from morreykit.quadrature import Resolution
from morreykit.series import (PowerSeries, TestFamilyKind, constant, geometric, lacunary,
                              monomial, random_polynomial, test_function)

RES = Resolution()


def _same(a: PowerSeries, b: PowerSeries, tol=0.0) -> bool:
    n = max(len(a), len(b))
    x, y = np.pad(a.coeffs, (0, n - len(a))), np.pad(b.coeffs, (0, n - len(b)))
    return bool(np.max(np.abs(x - y)) <= tol)


class TestApply:
    def test_tg_constant_symbol(self):
        out = apply(OperatorSpec("Tg", constant(5)), random_polynomial(9, 0))
        assert not np.any(out.coeffs)

    def test_tg_examples(self):
        assert _same(apply(OperatorSpec("Tg", monomial(1)), constant(1)), monomial(1))
        out = apply(OperatorSpec("Tg", monomial(2)), PowerSeries([1, 1]))
        assert _same(out, PowerSeries([0, 0, 1, 2 / 3]), 1e-16)

    def test_ig_constant_symbol(self):
        f = random_polynomial(12, 1)
        out = apply(OperatorSpec("Ig", constant(2.0)), f)
        expect = 2.0 * (f - f.coeffs[0])
        assert _same(out, expect, 1e-15)

    def test_mg_one(self):
        g = geometric(0.5, 32)
        assert _same(apply(OperatorSpec("Mg", g), constant(1)), g)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(["Tg", "Ig"]), st.integers(0, 30), st.integers(0, 1000))
    def test_zero_constant_term(self, kind, d, seed):
        out = apply(OperatorSpec(kind, random_polynomial(d, seed)), random_polynomial(d, seed + 1))
        assert out.coeffs[0] == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 30), st.integers(0, 1000),
           st.complex_numbers(max_magnitude=3, allow_nan=False),
           st.complex_numbers(max_magnitude=3, allow_nan=False))
    def test_linear_in_symbol(self, d, seed, alpha, beta):
        g, h, f = (random_polynomial(d, seed + k) for k in range(3))
        lhs = apply(OperatorSpec("Tg", alpha * g + beta * h), f)
        rhs = alpha * apply(OperatorSpec("Tg", g), f) + beta * apply(OperatorSpec("Tg", h), f)
        assert _same(lhs, rhs, 1e-12)

    def test_cap_reported(self):
        with pytest.warns(RuntimeWarning):
            out = apply(OperatorSpec("Mg", monomial(5)), monomial(5), cap=6)
        assert out.truncated

    def test_spec_json(self):
        op = OperatorSpec.from_json('{"kind": "Ig", "g": "geometric:0.5"}', 16)
        assert op.kind == "Ig" and op.g.degree == 16
        again = OperatorSpec.from_json(json.dumps(op.to_json()))
        assert again.g == op.g

    def test_unknown_kind(self):
        with pytest.raises(OperatorError):
            OperatorSpec("Xg", monomial(1))


class TestDecomposition:
    @pytest.mark.parametrize("seed", range(6))
    def test_random(self, seed):
        assert decomposition_check(random_polynomial(64, seed), random_polynomial(64, seed + 50)) < 1e-12

    def test_z(self):
        assert decomposition_check(monomial(1), monomial(1)) == 0.0

    def test_families(self):
        g = test_function(TestFamilyKind("Fb", 0.5, 0.5), 256)
        f = test_function(TestFamilyKind("fb", 0.3, 0.5), 256)
        assert decomposition_check(g, f) < 1e-10


class TestSpacePair:
    def test_hardy_codomain(self):
        assert SpacePair.hardy(4).codomain_lambda == 0.5
        assert SpacePair.hardy(2).codomain_lambda == 0.0
        assert SpacePair.hardy(math.inf).codomain_lambda == 1.0
        assert SpacePair.parse("hardy:inf").is_hardy

    @pytest.mark.parametrize("text", ["morrey:1", "bmoa", "hardy:1", "morrey:1.5"])
    def test_inadmissible(self, text):
        with pytest.raises(OperatorError):
            SpacePair.parse(text)

    def test_family_admissibility(self):
        op = OperatorSpec("Ig", constant(1))
        with pytest.raises(OperatorError, match="admissible"):
            opnorm_lower(op, SpacePair.morrey(0.5), "hb", RES)
        with pytest.raises(OperatorError, match="admissible"):
            opnorm_lower(op, SpacePair.hardy(4), "fb", RES)

    def test_defaults(self):
        assert default_family(OperatorSpec("Tg", monomial(1)), SpacePair.hardy(3)) == "hb"
        assert default_family(OperatorSpec("Ig", monomial(1)), SpacePair.hardy(3)) == "kernel"
        assert default_family(OperatorSpec("Tg", monomial(1)), SpacePair.morrey(0.5)) == "Fb"

    def test_family_grid(self):
        grid = family_grid(RES, "kernel")
        assert min(abs(b) for b in grid) >= 0.5
        assert max(abs(b) for b in grid) == pytest.approx(0.9375)


class TestComparator:
    def test_values(self):
        assert theorem_comparator(OperatorSpec("Ig", constant(-3))) == pytest.approx(3.0)
        assert theorem_comparator(OperatorSpec("Tg", monomial(1)), res=RES) == \
            pytest.approx(1.0, abs=1e-3)
        assert theorem_comparator(OperatorSpec("Mg", constant(0))) == 0.0
        assert theorem_comparator(OperatorSpec("Tg", constant(7)), res=RES) == 0.0


class TestOpnorm:
    def test_zero_symbol(self):
        est = opnorm_lower(OperatorSpec("Ig", constant(0.0)), SpacePair.morrey(0.5), "fb", RES)
        assert est.lower == 0.0 and est.ratio is None

    def test_ig_constant(self):
        est = opnorm_lower(OperatorSpec("Ig", constant(1.0)), SpacePair.morrey(0.5), "fb", RES)
        assert est.comparator == 1.0
        assert 0.2 < est.ratio <= 1.0 + 1e-3
        assert est.refinement_delta < 0.1

    def test_tg_z(self):
        est = opnorm_lower(OperatorSpec("Tg", monomial(1)), SpacePair.morrey(0.5), "Fb", RES)
        assert est.lower > 0 and est.comparator == pytest.approx(1.0, abs=1e-3)
        doc = est.as_dict()
        assert doc["family"] == "Fb" and doc["grid"]["pair"] == "morrey:0.5 -> morrey:0.5"

    def test_tg_hardy(self):
        est = opnorm_lower(OperatorSpec("Tg", monomial(1)), SpacePair.hardy(4), res=RES,
                           refine=False)
        assert est.family == "hb" and est.grid["pair"].endswith("morrey:0.5")
        assert est.lower > 0

    def test_unit_bound_flag(self):
        est = opnorm_lower(OperatorSpec("Ig", constant(1.0)), SpacePair.morrey(0.5), "fb", RES,
                           refine=False)
        assert est.unit_bound >= est.lower or est.flag
        assert est.lower >= 0 and est.comparator >= 0

    def test_corpus_family(self):
        est = opnorm_lower(OperatorSpec("Mg", constant(2.0)), SpacePair.morrey(0.5), "corpus",
                           RES, corpus=[monomial(1), geometric(0.5, 64)], refine=False)
        assert est.lower == pytest.approx(2.0, rel=1e-12)
        with pytest.raises(OperatorError):
            opnorm_lower(OperatorSpec("Mg", constant(2.0)), SpacePair.morrey(0.5), "corpus", RES)


class TestEssentialProxy:
    def test_constant(self):
        out = essential_proxy(OperatorSpec("Tg", constant(3.0)), SpacePair.morrey(0.5),
                              [0.5, 0.75], RES)
        assert all(bm == 0 and lo == 0 for _, bm, lo in out["rows"])
        assert all(d == 0 for _, d in out["profile"])

    def test_polynomial_monotone(self):
        out = essential_proxy(OperatorSpec("Tg", monomial(3)), SpacePair.morrey(0.5),
                              [0.5, 0.75, 0.875], RES)
        col = [bm for _, bm, _ in out["rows"]]
        assert col[0] > col[1] > col[2] > 0

    def test_lacunary_contrast(self):
        lac = lacunary([1.0] * 9, 256)
        dec = lacunary([2.0 ** -k for k in range(9)], 256)
        r = [1 - 2.0 ** -6]
        a = essential_proxy(OperatorSpec("Tg", lac), SpacePair.morrey(0.5), r, RES)["rows"][0]
        b = essential_proxy(OperatorSpec("Tg", dec), SpacePair.morrey(0.5), r, RES)["rows"][0]
        assert a[1] >= 5 * b[1] and a[2] >= 5 * b[2]

    def test_rejects(self):
        with pytest.raises(OperatorError):
            essential_proxy(OperatorSpec("Ig", monomial(1)), SpacePair.morrey(0.5))
        with pytest.raises(OperatorError):
            essential_proxy(OperatorSpec("Tg", monomial(1)), SpacePair.morrey(0.5), [1.0])
