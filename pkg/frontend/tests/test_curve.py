import json

import pytest

from plotviz.cli import main_error, main_heatmap
from plotviz.curve import plot_error_curve, read_error_curve


def write_curve(path, pairs):
    path.write_text(json.dumps(
        {"command": "image-recover",
         "curve": [{"p": p, "rel_error": e} for p, e in pairs]}))


class TestReadErrorCurve:
    def test_sorted_pairs(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(1350, 1e-9), (700, 0.4)])
        assert read_error_curve(path) == [(700, 0.4), (1350, 1e-9)]

    def test_missing_curve_key(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{}")
        with pytest.raises(ValueError, match="curve"):
            read_error_curve(path)

    def test_entry_missing_key_named(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"curve": [{"p": 10}]}))
        with pytest.raises(ValueError, match="rel_error"):
            read_error_curve(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="malformed"):
            read_error_curve(path)

    def test_empty_curve(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [])
        with pytest.raises(ValueError, match="empty"):
            read_error_curve(path)


class TestPlotErrorCurve:
    def test_monotone_fixture_renders(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(100, 0.9), (200, 0.1), (300, 1e-4), (400, 1e-9)])
        out = tmp_path / "c.png"
        plot_error_curve(path, out)
        assert out.stat().st_size > 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_single_point_no_crash(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(100, 0.5)])
        out = tmp_path / "c.png"
        plot_error_curve(path, out)
        assert out.exists()

    def test_bracketing_fixture_renders_both_regimes(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(700, 0.4), (1350, 1e-9)])
        out = tmp_path / "c.png"
        plot_error_curve(path, out)
        assert out.exists()

    def test_error_leaves_no_file(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [])
        out = tmp_path / "c.png"
        with pytest.raises(ValueError):
            plot_error_curve(path, out)
        assert not out.exists()

    def test_render_deterministic(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(100, 0.9), (400, 1e-9)])
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        plot_error_curve(path, a)
        plot_error_curve(path, b)
        assert a.read_bytes() == b.read_bytes()


class TestCli:
    def test_heatmap_end_to_end(self, tmp_path):
        csv_path = tmp_path / "g.csv"
        csv_path.write_text(
            "n,p,r,trial,seed,rel_error,success,status,wall_time_s\n"
            "6,36,1,0,1,1e-9,1,converged,0.1\n")
        out = tmp_path / "g.png"
        assert main_heatmap([str(csv_path), str(out)]) == 0
        assert out.exists()

    def test_error_curve_end_to_end(self, tmp_path):
        path = tmp_path / "c.json"
        write_curve(path, [(100, 0.5), (200, 1e-6)])
        out = tmp_path / "c.png"
        assert main_error([str(path), str(out)]) == 0
        assert out.exists()

    def test_bad_input_exit_code(self, tmp_path, capsys):
        out = tmp_path / "g.png"
        missing = tmp_path / "missing.csv"
        assert main_heatmap([str(missing), str(out)]) == 1
        assert "error:" in capsys.readouterr().err
