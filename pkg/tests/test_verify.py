"""Verification harness: tables, verdicts, calibration and determinism."""
import json
import math

import pytest

from morreykit import verify as V
from morreykit.quadrature import Resolution
from morreykit.series import monomial


@pytest.fixture(scope="module")
def ctx():
    return V.Context(Resolution())


@pytest.fixture(scope="module")
def calibrated(ctx):
    return V.calibrate(ctx, ["thmB", "lem5"])


class TestCorpus:
    def test_standard(self):
        c = V.standard_corpus()
        labels = [k for k, _ in c]
        for need in ("const", "z", "z2", "z5", "geo0.3", "geo0.6", "geo0.9", "lac", "lacdec",
                     "pow8", "rand0"):
            assert need in labels
        assert all(f.tail_bound <= 1e-4 for _, f in c)

    def test_seed_changes_random_entry_only(self):
        a, b = V.standard_corpus(seed=0), V.standard_corpus(seed=1)
        assert a.get("z5") == b.get("z5")
        assert "rand1" in [k for k, _ in b]

    def test_empty_rejected(self):
        with pytest.raises(V.VerifyError, match="empty corpus"):
            V.Corpus("none", ())

    def test_lacunary_pair(self):
        lac, dec = V.lacunary_pair()
        assert lac.coeffs[256] == 1 and dec.coeffs[256] == 2.0 ** -8


class TestVerdicts:
    def _row(self, *vals, kind="stable", bound=None, ok=None):
        return V._finish("x", V.RawRow("r", "p", *vals, kind, bound, ok), None)

    def test_degenerate(self):
        assert self._row(0.0, 0.0, 0.0, 0.0).verdict == "degenerate-pass"
        assert self._row(1e-3, 0.0, 1e-3, 0.0).verdict == "violation"

    def test_stable(self):
        assert self._row(1.0, 2.0, 1.01, 2.0).verdict == "pass"
        assert self._row(1.0, 2.0, 1.5, 2.0).verdict == "unstable"
        assert self._row(-1.0, 1.0, -1.0, 1.0, bound=0.0).verdict == "violation"

    def test_upper_and_exact(self):
        assert self._row(1.0, 1.0, 1.0, 1.0, kind="upper", bound=1.001).verdict == "pass"
        assert self._row(1.1, 1.0, 1.0, 1.0, kind="upper", bound=1.001).verdict == "violation"
        assert self._row(1.0, 1.0 + 1e-9, 1.0, 1.0, kind="exact", bound=1e-8).verdict == "pass"
        assert self._row(1.0, 1.1, 1.0, 1.0, kind="exact", bound=1e-8).verdict == "violation"

    def test_abs_flag_contrast(self):
        assert self._row(1e-13, 0.0, 1e-13, 0.0, kind="abs", bound=1e-12).verdict == "pass"
        assert self._row(1.0, 1.0, 1.0, 1.0, kind="flag", ok=False).verdict == "violation"
        assert self._row(6.0, 1.0, 7.0, 1.0, kind="contrast", bound=5.0).verdict == "pass"
        assert self._row(4.0, 1.0, 7.0, 1.0, kind="contrast", bound=5.0).verdict == "violation"

    def test_window(self):
        raw = V.RawRow("r", "p", 1.0, 1.0, 1.0, 1.0, "window")
        wins = {"x": {"p": (0.5, 0.95)}}
        assert V._finish("x", raw, wins).verdict == "pass"  # inside the 10% widening
        assert V._finish("x", raw, {"x": {"p": (2.0, 3.0)}}).verdict == "out-of-window"
        with pytest.raises(V.CalibrationRequired):
            V._finish("x", raw, None)
        with pytest.raises(V.CalibrationRequired):
            V._finish("x", raw, {"x": {}})

    def test_non_finite_row(self):
        row = V.Row("x", "r", "p", math.nan, 1.0, None, None, "pass")
        with pytest.raises(V.VerifyError, match="non-finite"):
            V.RatioTable("x", {}, [row])


class TestChecks:
    def test_lp(self, ctx):
        t = V.check("lp", ctx)
        assert t.passed and t.stable and len(t.rows) == 20
        assert all(abs(r.ratio - 1) < 1e-8 for r in t.rows)

    def test_kernel_and_boxweight(self, ctx):
        for name in ("kernel", "boxweight"):
            t = V.check(name, ctx)
            assert t.passed, t.failures()
        assert V.check("boxweight", ctx).summary()["min_ratio"] > 0.1

    def test_windowed_requires_calibration(self, ctx):
        with pytest.raises(V.CalibrationRequired, match="calibration required"):
            V.check("thm2", ctx)

    def test_inadmissible_params(self, ctx):
        with pytest.raises(V.VerifyError, match="λ out of range"):
            V.raw_rows("lem2", ctx, 1.5)
        with pytest.raises(V.VerifyError):
            V.raw_rows("thm4", ctx, 1.0)

    def test_unknown(self, ctx):
        with pytest.raises(V.VerifyError, match="unknown check"):
            V.check("thm99", ctx)

    def test_param_sweeps(self):
        assert V.param_values("thm1") == [0.25, 0.5, 0.75]
        assert V.param_values("thm4") == [2.0, 3.0, 4.0, math.inf]
        assert V.param_values("thm4", p=3.0) == [3.0]
        assert V.param_values("lp") == [None]

    def test_calibrated_tables(self, ctx, calibrated):
        doc, raws = calibrated
        wins = V.load_windows(V.dump_windows(doc), ctx)
        for name in ("thmB", "lem5"):
            t = V.check(name, ctx, wins, raws=raws)
            assert t.passed, t.failures()
        thm_b = V.check("thmB", ctx, wins, raws=raws)
        const = [r for r in thm_b.rows if r.row == "const"][0]
        assert const.verdict == "degenerate-pass"

    def test_table_serialisation(self, ctx):
        t = V.check("kernel", ctx)
        lines = t.to_csv().splitlines()
        assert lines[0] == ",".join(V.CSV_COLUMNS)
        assert len(lines) == len(t.rows) + 1
        doc = json.loads(t.to_json())
        assert doc["grid"]["m"] == ctx.res.m and doc["summary"]["passed"]


class TestCalibration:
    def test_window_file_shape(self, calibrated):
        doc, _ = calibrated
        assert set(doc["windows"]) == {"thmB", "lem5"}
        lo, hi = doc["windows"]["thmB"]["garsia/mobius"]
        assert 0 < lo <= hi

    def test_byte_identical_rerun(self, ctx, calibrated):
        again, _ = V.calibrate(V.Context(Resolution()), ["thmB", "lem5"])
        assert V.dump_windows(again) == V.dump_windows(calibrated[0])

    def test_tables_deterministic(self, ctx):
        a = V.check("kernel", ctx).to_csv()
        b = V.check("kernel", V.Context(Resolution(), threads=4)).to_csv()
        assert a == b

    def test_grid_mismatch(self, calibrated):
        text = V.dump_windows(calibrated[0])
        with pytest.raises(V.VerifyError, match="does not match"):
            V.load_windows(text, V.Context(Resolution(m=512)))

    def test_malformed(self):
        with pytest.raises(V.VerifyError, match="malformed"):
            V.load_windows("{}")

    def test_drift_names_row(self, ctx, monkeypatch):
        bad = [V.RawRow("g=z", "lam=0.5", 1.0, 1.0, 2.0, 1.0, "window")]
        monkeypatch.setattr(V, "raw_rows", lambda name, ctx, value=None: bad)
        with pytest.raises(V.CalibrationError, match="row g=z"):
            V.calibrate(ctx, ["thm2"], lam=0.5)

    def test_empty_custom_corpus(self):
        with pytest.raises(V.VerifyError):
            V.Context(Resolution(), corpus=V.Corpus("c", ()))

    def test_custom_corpus_used(self):
        c = V.Corpus("mini", (("z", monomial(1)),))
        t = V.check("thmB", V.Context(Resolution(), corpus=c),
                    {"thmB": {"garsia/mobius": (0.5, 1.0)}})
        assert [r.row for r in t.rows] == ["z"]
