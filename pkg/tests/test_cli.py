"""Command-line interface: exit codes, file outputs, idempotency."""

import json

import pytest

from invisiscat.cli import EXIT_ASSERTION, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main


@pytest.fixture
def ball_scene(tmp_path):
    cfg = {
        "dimension": 2,
        "wavenumber": 1.0,
        "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 0.7},
        "intensity": {"kind": "constant", "value": 1.0},
    }
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(cfg))
    return path


class TestSourceCommand:
    def test_far_field_output(self, ball_scene, tmp_path, capsys):
        out = tmp_path / "ff.csv"
        code = main(["source", str(ball_scene), "--farfield", str(out), "--dirs", "16"])
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "theta,re,im"
        assert len(lines) == 17

    def test_bessel_zero_scene_silent(self, tmp_path):
        from invisiscat.source import radiationless_radius

        r0 = radiationless_radius(1.0, 2, 1)
        cfg = {
            "dimension": 2,
            "wavenumber": 1.0,
            "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": r0},
            "intensity": {"kind": "constant", "value": 1.0},
        }
        scene = tmp_path / "silent.json"
        scene.write_text(json.dumps(cfg))
        out = tmp_path / "ff.csv"
        code = main(["source", str(scene), "--farfield", str(out), "--dirs", "16"])
        assert code == EXIT_OK
        rows = out.read_text().strip().splitlines()[1:]
        sup = max(
            abs(complex(float(r.split(",")[1]), float(r.split(",")[2])))
            for r in rows
        )
        assert sup < 1e-6

    def test_zero_intensity_all_zero(self, tmp_path):
        cfg = {
            "dimension": 2,
            "wavenumber": 1.0,
            "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 0.7},
            "intensity": {"kind": "constant", "value": 0.0},
        }
        scene = tmp_path / "zero.json"
        scene.write_text(json.dumps(cfg))
        out = tmp_path / "ff.csv"
        assert main(["source", str(scene), "--farfield", str(out)]) == EXIT_OK
        rows = out.read_text().strip().splitlines()[1:]
        assert all(float(r.split(",")[1]) == 0.0 for r in rows)

    def test_malformed_json_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["source", str(bad)]) == EXIT_CONFIG

    def test_bad_schema_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dimension": 2}))
        assert main(["source", str(bad)]) == EXIT_CONFIG

    def test_idempotent_outputs(self, ball_scene, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        main(["source", str(ball_scene), "--farfield", str(out1), "--dirs", "16"])
        main(["source", str(ball_scene), "--farfield", str(out2), "--dirs", "16"])
        assert out1.read_bytes() == out2.read_bytes()

    def test_field_samples_output(self, ball_scene, tmp_path):
        out = tmp_path / "u.csv"
        code = main(
            ["source", str(ball_scene), "--fields", str(out), "--grid", "8", "--dirs", "16"]
        )
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x1,x2,re,im"
        assert len(lines) == 1 + 64


class TestMediumCommand:
    def test_far_field_output(self, tmp_path):
        cfg = {
            "dimension": 2,
            "wavenumber": 0.5,
            "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
            "contrast": {"kind": "constant", "value": 0.1},
            "incident": {"kind": "plane_wave", "direction": [1.0, 0.0]},
        }
        scene = tmp_path / "m.json"
        scene.write_text(json.dumps(cfg))
        out = tmp_path / "ff.csv"
        code = main(["medium", str(scene), "--farfield", str(out), "--dirs", "16"])
        assert code == EXIT_OK
        assert out.exists()


class TestTeigCommand:
    def test_table(self, tmp_path):
        cfg = tmp_path / "itp.json"
        cfg.write_text(json.dumps({"radius": 1.0, "contrast": 15.0}))
        out = tmp_path / "eigs.csv"
        code = main(
            ["teig", str(cfg), "--kmax", "2.0", "--modes", "0,1", "--out", str(out)]
        )
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "mode,index,k_eig,boundary_value_u"
        ks = [float(l.split(",")[2]) for l in lines[1:]]
        assert any(abs(k - 0.993997561886) < 1e-8 for k in ks)

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "itp.json"
        cfg.write_text(json.dumps({"radius": 1.0}))
        out = tmp_path / "eigs.csv"
        assert main(["teig", str(cfg), "--kmax", "2.0", "--out", str(out)]) == EXIT_CONFIG


class TestCgoVerifyCommand:
    def test_passes_small_sample(self):
        assert main(["cgo-verify", "--n", "2", "--samples", "4"]) == EXIT_OK

    def test_unreachable_tolerance_exit_1(self):
        code = main(["cgo-verify", "--n", "2", "--samples", "3", "--tol", "1e-16"])
        assert code == EXIT_ASSERTION


class TestNumericalFailureExit:
    def test_oversized_field_grid_exit_3(self, tmp_path):
        cfg = {
            "dimension": 2,
            "wavenumber": 5000.0,
            "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 0.7},
            "intensity": {"kind": "constant", "value": 1.0},
        }
        scene = tmp_path / "hf.json"
        scene.write_text(json.dumps(cfg))
        code = main(
            ["source", str(scene), "--fields", str(tmp_path / "u.csv"), "--grid", "4"]
        )
        assert code == EXIT_NUMERICAL


class TestExperimentCommand:
    def test_unknown_suite(self, tmp_path):
        code = main(["experiment", "nope", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_smallness_suite(self, tmp_path):
        code = main(["experiment", "smallness_source", "--out", str(tmp_path)])
        assert code == EXIT_OK
        summary = json.loads((tmp_path / "smallness_source.json").read_text())
        assert summary["passed"] is True
        assert summary["counterexamples"] == 0
        assert (tmp_path / "smallness_source.csv").exists()

    def test_config_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"radii": [0.5], "n_dirs": 16}))
        code = main(
            ["experiment", "smallness_source", str(cfg), "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        rows = (tmp_path / "smallness_source.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 3  # header + one radius + two Bessel rows

    def test_bad_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus_key": 1}))
        code = main(
            ["experiment", "smallness_source", str(cfg), "--out", str(tmp_path)]
        )
        assert code == EXIT_CONFIG
