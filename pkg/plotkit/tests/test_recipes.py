import subprocess
import sys
from pathlib import Path

import pytest
from PIL import Image

from plotkit import FigureRecipe, SchemaMismatch, manifest_hash, render

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def png_source(path):
    return Image.open(path).info.get("Source", "")


class TestRender:
    def test_scatter_with_guides(self, tiny_outputs, tmp_path):
        out = render(FigureRecipe(
            "scatter", {"data": tiny_outputs["scan"] / "lle.csv"},
            tmp_path / "scatter.png",
            {"x": "E0_over_eps", "y": "lambda_tau", "vlines": [0.8]}))
        assert Path(out).stat().st_size > 0
        assert png_source(out).startswith("manifest-sha256:")

    def test_dipoverlay_with_predictions(self, tiny_outputs, tmp_path):
        out = render(FigureRecipe(
            "dipoverlay",
            {"data": tiny_outputs["scan"] / "randomization.csv",
             "dips": tiny_outputs["dips"]},
            tmp_path / "dips.png",
            {"x": "amp_hbarD_over_eps", "y": "R", "group_by": "center"}))
        assert png_source(out).startswith("manifest-sha256:")

    def test_timeseries_delta2(self, tiny_outputs, tmp_path):
        series = sorted((tiny_outputs["scan"] / "delta2").glob("*.csv"))
        assert series
        out = render(FigureRecipe(
            "timeseries", {"run": series[0]}, tmp_path / "ts.png",
            {"x": "t_over_tau_s", "y": "delta2", "logy": True}))
        assert Path(out).exists()

    def test_heatmap(self, tiny_outputs, tmp_path):
        out = render(FigureRecipe(
            "heatmap", {"data": tiny_outputs["scan"] / "lle.csv"},
            tmp_path / "hm.png",
            {"x": "amp_hbarD_over_eps", "y": "E0_over_eps", "value": "lambda_tau"}))
        assert Path(out).exists()

    def test_schema_mismatch_lists_missing(self, tiny_outputs, tmp_path):
        with pytest.raises(SchemaMismatch) as exc:
            render(FigureRecipe(
                "scatter", {"data": tiny_outputs["scan"] / "lle.csv"},
                tmp_path / "bad.png", {"x": "nope", "y": "lambda_tau"}))
        assert "nope" in str(exc.value)

    def test_empty_input_schema_mismatch(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaMismatch):
            render(FigureRecipe("scatter", {"data": empty}, tmp_path / "x.png", {}))

    def test_render_is_deterministic(self, tiny_outputs, tmp_path):
        def go(name):
            return render(FigureRecipe(
                "scatter", {"data": tiny_outputs["scan"] / "lle.csv"},
                tmp_path / name, {"x": "E0_over_eps", "y": "lambda_tau"}))
        a = Path(go("a.png")).read_bytes()
        b = Path(go("b.png")).read_bytes()
        assert a == b

    def test_hash_matches_manifest(self, tiny_outputs, tmp_path):
        out = render(FigureRecipe(
            "scatter", {"data": tiny_outputs["scan"] / "lle.csv"},
            tmp_path / "h.png", {"x": "E0_over_eps", "y": "lambda_tau"}))
        expected = manifest_hash(tiny_outputs["scan"] / "lle.csv")
        assert png_source(out) == f"manifest-sha256:{expected}"

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            FigureRecipe("sparkline", {}, tmp_path / "x.png")


class TestScripts:
    def run_script(self, name, *args):
        proc = subprocess.run([sys.executable, str(SCRIPTS / name), *args],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return [Path(p) for p in proc.stdout.strip().splitlines()]

    def test_fig2_script(self, preset_outputs, tmp_path):
        imgs = self.run_script("render_fig2.py",
                               "--scan-dir", str(preset_outputs / "fig2"),
                               "--out", str(tmp_path))
        assert len(imgs) == 2 and all(p.exists() for p in imgs)
        assert all(png_source(p).startswith("manifest-sha256:") for p in imgs)

    def test_fig4_style_script_on_driven_grid(self, preset_outputs, tmp_path):
        imgs = self.run_script("render_fig4.py",
                               "--scan-dir", str(preset_outputs / "driven"),
                               "--out", str(tmp_path))
        assert all(p.exists() for p in imgs)

    def test_fig5_style_script(self, preset_outputs, tmp_path):
        imgs = self.run_script("render_fig5.py",
                               "--scan-dir", str(preset_outputs / "rand_desk"),
                               "--out", str(tmp_path))
        assert all(p.exists() for p in imgs)

    def test_fig6_script_with_dip_overlay(self, preset_outputs, tiny_outputs, tmp_path):
        imgs = self.run_script("render_fig6.py",
                               "--scan-dir", str(preset_outputs / "fig6win"),
                               "--dips", str(tiny_outputs["dips"]),
                               "--out", str(tmp_path))
        assert all(p.exists() for p in imgs)
        assert all(png_source(p).startswith("manifest-sha256:") for p in imgs)

    def test_fig7_script(self, tiny_outputs, tmp_path):
        imgs = self.run_script("render_fig7.py",
                               "--scan-dir", str(tiny_outputs["trace"]),
                               "--out", str(tmp_path))
        assert imgs and all(p.exists() for p in imgs)

    def test_fig3_script_on_tiny_scan(self, tiny_outputs, tmp_path):
        imgs = self.run_script("render_fig3.py",
                               "--scan-dir", str(tiny_outputs["scan"]),
                               "--out", str(tmp_path))
        assert len(imgs) == 2 and all(p.exists() for p in imgs)

    def test_appC_script_on_tiny_scan(self, tiny_outputs, tmp_path):
        imgs = self.run_script("render_appC.py",
                               "--scan-dir", str(tiny_outputs["scan"]),
                               "--dips", str(tiny_outputs["dips"]),
                               "--out", str(tmp_path))
        assert len(imgs) == 2 and all(p.exists() for p in imgs)
