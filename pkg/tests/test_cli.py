import json
import math

import pytest

from multibump.cli import main, merge_options, parse_points, read_config_file


def load_summary(outdir):
    return json.loads((outdir / "summary.json").read_text())


def test_ground_state_oracle(tmp_path):
    out = tmp_path / "out"
    assert main(["ground-state", "--dim", "1", "--p", "3",
                 "--out", str(out)]) == 0
    summary = load_summary(out)
    assert abs(summary["w0"] - math.sqrt(2.0)) < 1e-5
    assert (out / "tables" / "profile.csv").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("p = 2\ndim = 1\n# comment\n")
    out = tmp_path / "out"
    # flag overrides the config file value
    assert main(["ground-state", "--config", str(cfg), "--p", "3",
                 "--out", str(out)]) == 0
    assert abs(load_summary(out)["w0"] - math.sqrt(2.0)) < 1e-5


def test_invalid_config_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    assert main(["ground-state", "--config", str(bad)]) == 2
    assert main(["ledger", "--potential", "zero", "--delta", "1e-9",
                 "--out", str(tmp_path / "o")]) == 2
    assert main(["reduce", "--out", str(tmp_path / "o2")]) == 2  # no points


def test_reduce_dumps_fields(tmp_path):
    out = tmp_path / "out"
    rc = main(["reduce", "--points", "0;10", "--potential", "zero",
               "--delta", "0", "--dump-fields", "--out", str(out)])
    assert rc == 0
    summary = load_summary(out)
    assert summary["orthogonality_defect"] <= 1e-10
    assert (out / "fields" / "correction.bin").exists()
    meta = json.loads((out / "fields" / "correction.json").read_text())
    assert set(meta) >= {"dim", "half_width", "spacing", "points_per_axis"}


def test_spectrum_summary(tmp_path):
    out = tmp_path / "out"
    assert main(["spectrum", "--out", str(out)]) == 0
    summary = load_summary(out)
    assert abs(summary["lambda1"] - 3.0) < 1e-3
    assert summary["kernel_dim"] == 1


def test_maximize_deterministic(tmp_path):
    args = ["maximize", "--k", "1", "--potential", "algebraic",
            "--delta", "1e-9", "--seed", "5"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "summary.json").read_text() == \
        (out2 / "summary.json").read_text()


def test_parse_points():
    pts = parse_points("0,1;2,3", 2)
    assert pts.shape == (2, 2)
    with pytest.raises(Exception):
        parse_points("0,1;2", 2)


def test_read_config_file_rejects_garbage(tmp_path):
    bad = tmp_path / "x.cfg"
    bad.write_text("just words\n")
    with pytest.raises(Exception):
        read_config_file(bad)
