"""Command-line behavior: outputs, determinism, and exit codes.

Most cases drive cli.main() in process; one smoke test goes through an
actual `python -m docdegrade` subprocess.
"""

import json
import subprocess
import sys

import pytest

from docdegrade import cli, cluster, noise, predict, synthpage
from docdegrade.raster import read_pbm
from docdegrade.rng import Rng

from tiffbytes import make_tiff


def run(*args):
    return cli.main([str(a) for a in args])


@pytest.fixture
def page(tmp_path):
    spec = synthpage.PageSpec(
        width=320, height=240, margin=12, glyph_width=12, glyph_height=14,
        glyphs_per_line=10, lines=8,
    )
    path = tmp_path / "page.pbm"
    spec_path = tmp_path / "page.json"
    spec_path.write_text(synthpage.page_spec_to_json(spec, seed=3))
    assert run("gen", "--spec", spec_path, "-o", path) == 0
    return path


class TestCost:
    def test_prints_the_estimate(self, capsys):
        assert run("cost", 10, 2, 5) == 0
        assert capsys.readouterr().out.strip() == "16.4"

    def test_negative_counts_are_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("cost", 10, -2, 5)
        assert exc.value.code == 2


class TestGen:
    def test_writes_a_readable_page(self, page):
        img = read_pbm(page.read_bytes())
        assert (img.width, img.height) == (320, 240)
        assert img.count_black() == 10 * 8 * 12 * 14

    def test_bad_spec_is_a_format_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert run("gen", "--spec", bad, "-o", tmp_path / "x.pbm") == cli.EXIT_FORMAT

    def test_unfittable_layout_is_a_format_error(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            '{"width": 30, "height": 30, "margin": 0, "glyph_width": 12,'
            ' "glyph_height": 12, "glyphs_per_line": 10, "lines": 1}'
        )
        assert run("gen", "--spec", spec, "-o", tmp_path / "x.pbm") == cli.EXIT_FORMAT


class TestAnalyze:
    def test_csv_outputs_match_library(self, page, tmp_path):
        feats_csv = tmp_path / "features.csv"
        hist_csv = tmp_path / "hist.csv"
        assert run(
            "analyze", page, "--features-out", feats_csv, "--histogram-out", hist_csv,
            "--page-id", "demo",
        ) == 0
        img = read_pbm(page.read_bytes())
        analysis = cluster.analyze(img, 8)
        feats = cluster.features(analysis)
        assert feats_csv.read_bytes() == cluster.features_csv("demo", feats)
        assert hist_csv.read_bytes() == cluster.histogram_csv(analysis, 10)

    def test_connectivity_and_bin_width_flags(self, page, tmp_path):
        hist_csv = tmp_path / "hist4.csv"
        assert run(
            "analyze", page, "--histogram-out", hist_csv,
            "--connectivity", 4, "--bin-width", 25,
        ) == 0
        img = read_pbm(page.read_bytes())
        assert hist_csv.read_bytes() == cluster.histogram_csv(cluster.analyze(img, 4), 25)

    def test_missing_file(self, tmp_path):
        assert run("analyze", tmp_path / "nope.pbm") == cli.EXIT_ERROR

    def test_bad_pbm(self, tmp_path):
        bad = tmp_path / "bad.pbm"
        bad.write_bytes(b"P9\n1 1\n\x00")
        assert run("analyze", bad) == cli.EXIT_FORMAT

    def test_unsupported_tiff(self, tmp_path):
        lzw = tmp_path / "page.tif"
        lzw.write_bytes(make_tiff(1, 1, b"\x80", compression=5))
        assert run("analyze", lzw) == cli.EXIT_UNSUPPORTED

    def test_reads_plain_tiff(self, tmp_path, capsys):
        good = tmp_path / "dot.tif"
        good.write_bytes(make_tiff(1, 1, b"\x80"))
        assert run("analyze", good) == 0
        assert "black=1" in capsys.readouterr().out


class TestDegrade:
    def test_empty_recipe_copies_the_input(self, page, tmp_path):
        recipe = tmp_path / "identity.json"
        recipe.write_text('{"seed": 5, "steps": []}')
        out = tmp_path / "out.pbm"
        assert run("degrade", page, "--recipe", recipe, "-o", out) == 0
        assert out.read_bytes() == page.read_bytes()

    def test_same_seed_same_bytes(self, page, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(noise.recipe_to_json(noise.default_recipe(42)))
        out1, out2 = tmp_path / "a.pbm", tmp_path / "b.pbm"
        assert run("degrade", page, "--recipe", recipe, "-o", out1) == 0
        assert run("degrade", page, "--recipe", recipe, "-o", out2) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_flag_overrides_recipe(self, page, tmp_path):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(noise.recipe_to_json(noise.default_recipe(1)))
        flagged, reseeded = tmp_path / "f.pbm", tmp_path / "r.pbm"
        assert run("degrade", page, "--recipe", recipe, "-o", flagged, "--seed", 9) == 0
        recipe.write_text(noise.recipe_to_json(noise.default_recipe(9)))
        assert run("degrade", page, "--recipe", recipe, "-o", reseeded) == 0
        assert flagged.read_bytes() == reseeded.read_bytes()


class TestCompare:
    def degraded(self, page, tmp_path, seed=4):
        recipe = tmp_path / "recipe.json"
        recipe.write_text(noise.recipe_to_json(noise.default_recipe(seed)))
        out = tmp_path / f"degraded-{seed}.pbm"
        assert run("degrade", page, "--recipe", recipe, "-o", out) == 0
        return out, recipe

    def test_deterministic_reports_are_byte_identical(self, page, tmp_path):
        degraded, _ = self.degraded(page, tmp_path)
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert run("compare", page, degraded, "-o", r1, "--deterministic") == 0
        assert run("compare", page, degraded, "-o", r2, "--deterministic") == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_report_contents(self, page, tmp_path):
        degraded, recipe = self.degraded(page, tmp_path)
        report_path = tmp_path / "report.json"
        assert run(
            "compare", page, degraded, "-o", report_path,
            "--recipe", recipe, "--counts", 10, 2, 5, "--deterministic",
        ) == 0
        report = json.loads(report_path.read_text())

        img_a = read_pbm(page.read_bytes())
        img_b = read_pbm(degraded.read_bytes())
        feats_a = cluster.features(cluster.analyze(img_a, 8))
        feats_b = cluster.features(cluster.analyze(img_b, 8))
        assert report["features"]["a"]["bsfl"] == feats_a.bsfl
        assert report["features"]["b"]["bsfl"] == feats_b.bsfl
        assert report["delta"]["bsfl"] == feats_b.bsfl - feats_a.bsfl
        assert report["delta"]["black_pixels"] == (
            feats_b.total_black_pixels - feats_a.total_black_pixels
        )
        assert report["work_estimate"]["cost"] == 16.4
        assert report["metadata"]["seed"] == 4
        assert "created" not in report["metadata"]

    def test_timestamp_present_without_flag(self, page, tmp_path):
        degraded, _ = self.degraded(page, tmp_path)
        report_path = tmp_path / "report.json"
        assert run("compare", page, degraded, "-o", report_path) == 0
        assert "created" in json.loads(report_path.read_text())["metadata"]

    def test_report_to_stdout(self, page, tmp_path, capsys):
        degraded, _ = self.degraded(page, tmp_path)
        capsys.readouterr()  # discard the degrade command's status line
        assert run("compare", page, degraded, "--deterministic") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["connectivity"] == 8


class TestFitPredict:
    def make_records(self, tmp_path):
        rows = [
            predict.PageRecord(f"p{i}", cluster.PageFeatures(lo, hi, lo + hi, 100),
                               3 + 2 * lo + hi)
            for i, (lo, hi) in enumerate([(0, 0), (5, 1), (9, 4), (12, 0), (20, 7)])
        ]
        path = tmp_path / "records.csv"
        path.write_bytes(predict.write_records(rows))
        return path

    def test_fit_then_predict_image(self, page, tmp_path, capsys):
        records = self.make_records(tmp_path)
        model_path = tmp_path / "model.json"
        assert run("fit", records, "-o", model_path) == 0
        model = predict.model_from_json(model_path.read_bytes())
        assert model.n == 5

        out_csv = tmp_path / "pred.csv"
        assert run("predict", page, "--model", model_path, "-o", out_csv) == 0
        img = read_pbm(page.read_bytes())
        feats = cluster.features(cluster.analyze(img, 8))
        expected = predict.predict_suspects(model, feats)
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "page_id,bsfl,bsfh,predicted_suspects"
        assert lines[1] == f"page,{feats.bsfl},{feats.bsfh},{expected!r}"

    def test_predict_from_features_csv(self, tmp_path, capsys):
        records = self.make_records(tmp_path)
        model_path = tmp_path / "model.json"
        assert run("fit", records, "-o", model_path) == 0
        feats_csv = tmp_path / "feats.csv"
        feats_csv.write_bytes(
            cluster.features_csv("solo", cluster.PageFeatures(5, 1, 6, 100))
        )
        assert run("predict", feats_csv, "--model", model_path, "--from-features") == 0
        out = capsys.readouterr().out
        assert "solo" in out

    def test_degenerate_records_exit_code(self, tmp_path):
        rows = [
            predict.PageRecord(f"d{i}", cluster.PageFeatures(0, 0, 0, 0), i)
            for i in range(4)
        ]
        path = tmp_path / "flat.csv"
        path.write_bytes(predict.write_records(rows))
        model_path = tmp_path / "model.json"
        assert run("fit", path, "-o", model_path) == cli.EXIT_DEGENERATE

    def test_insufficient_records_exit_code(self, tmp_path):
        rows = [predict.PageRecord("only", cluster.PageFeatures(1, 2, 3, 4), 5)]
        path = tmp_path / "one.csv"
        path.write_bytes(predict.write_records(rows))
        assert run("fit", path, "-o", tmp_path / "m.json") == cli.EXIT_DEGENERATE


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "docdegrade", "cost", "10", "2", "5"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert result.stdout.strip() == "16.4"

    def test_version_flag(self):
        result = subprocess.run(
            [sys.executable, "-m", "docdegrade", "--version"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "docdegrade" in result.stdout
