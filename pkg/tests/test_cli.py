import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from chebsurf.cli import main
from chebsurf.hilbert import curve_for_image
from chebsurf.imageio import read_label_map


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


@pytest.fixture
def half_split(tmp_path, capsys):
    img, truth = tmp_path / "img.png", tmp_path / "truth.png"
    code, _ = run(capsys, "synth", "--kind", "half_split", "--size", 32, "--out", img, "--out-truth", truth)
    assert code == 0
    return img, truth


def test_synth_and_segment_and_eval(tmp_path, capsys, half_split):
    img, truth = half_split
    labels = tmp_path / "labels.png"
    code, out = run(capsys, "segment", "--input", img, "--epsilon", 4, "--npar", 0.95, "--clusters", 2,
                    "--replicates", 5, "--out-labels", labels, "--report", tmp_path / "rep.json")
    assert code == 0
    rep = json.loads(out.out)
    assert rep["n_surfaces"] == 2 and rep["reduction_factor"] == 512
    assert (tmp_path / "rep.png").exists()
    code, out = run(capsys, "eval", "--pred", labels, "--truth", truth)
    assert code == 0
    score = json.loads(out.out)
    assert score["f_score"] == 1.0 and score["tolerance"] == 2


def test_decompose_outputs(tmp_path, capsys, half_split):
    img, _ = half_split
    code, out = run(capsys, "decompose", "--input", img, "--epsilon", 4, "--npar", 0.95,
                    "--out-json", tmp_path / "d.json", "--out-overlay", tmp_path / "o.png")
    assert code == 0
    doc = json.loads((tmp_path / "d.json").read_text())
    assert [s["n_pixels"] for s in doc["surfaces"]] == [512, 512]
    assert json.loads(out.out)["n_surfaces"] == 2


def test_decompose_summary_only(capsys, half_split):
    code, out = run(capsys, "decompose", "--input", half_split[0], "--epsilon", 4, "--npar", 0.95,
                    "--formulation", "univariate")
    assert code == 0
    assert json.loads(out.out)["formulation"] == "univariate"


def test_strict_paper_flag(tmp_path, capsys, half_split):
    code, _ = run(capsys, "decompose", "--input", half_split[0], "--epsilon", 4, "--npar", 0.95,
                  "--strict-paper", "--out-json", tmp_path / "d.json")
    assert code == 0
    sizes = [s["n_pixels"] for s in json.loads((tmp_path / "d.json").read_text())["surfaces"]]
    # the flat left half absorbs one right-half pixel before the test tightens
    assert sizes == [513, 511]


def test_bounds(capsys):
    code, out = run(capsys, "bounds", "--pixels", 4096, "--features", 3, "--epsilon", 4)
    assert code == 0
    rep = json.loads(out.out)
    assert rep["tail_bound"] == 0.75 and rep["expected_surfaces"] == 1024 and rep["max_order"] == 64
    code, out = run(capsys, "bounds", "--pixels", 16, "--features", 3)
    assert json.loads(out.out)["epsilon"] is None


def test_curve_csv(capsys):
    code, out = run(capsys, "curve", "--height", 3, "--width", 5)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.out)))
    assert rows[0] == ["index", "row", "col"]
    body = np.array(rows[1:], dtype=int)
    np.testing.assert_array_equal(body[:, 0], np.arange(15))
    np.testing.assert_array_equal(body[:, 1:], curve_for_image(3, 5))


def test_eval_directories(tmp_path, capsys):
    from chebsurf.imageio import write_label_map

    (tmp_path / "p").mkdir()
    (tmp_path / "t").mkdir()
    lab = np.repeat([[0, 0, 1, 1]], 4, axis=0)
    write_label_map(lab, tmp_path / "p" / "a.png")
    write_label_map(lab, tmp_path / "t" / "a.png")
    write_label_map(np.zeros((4, 4), int), tmp_path / "p" / "b.png")
    write_label_map(lab, tmp_path / "t" / "b.png")
    code, out = run(capsys, "eval", "--pred", tmp_path / "p", "--truth", tmp_path / "t")
    assert code == 0
    doc = json.loads(out.out)
    assert doc["mean"]["f_score"] == 0.5
    assert "mean" in doc["aggregation"]


def test_batch_segment(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    for kind in ("quad", "half_split"):
        run(capsys, "synth", "--kind", kind, "--size", 16, "--out", src / f"{kind}.png",
            "--out-truth", tmp_path / f"{kind}_truth.png")
    code, out = run(capsys, "segment", "--input-dir", src, "--epsilon", 4, "--npar", 0.95,
                    "--clusters", 2, "--replicates", 3, "--jobs", 2, "--out-labels", tmp_path / "lab")
    assert code == 0
    doc = json.loads(out.out)
    assert [r["input"].rsplit("/", 1)[-1] for r in doc["images"]] == ["half_split.png", "quad.png"]
    assert read_label_map(tmp_path / "lab" / "quad_labels.png").shape == (16, 16)


@pytest.mark.parametrize("argv, code", [
    (["bounds", "--pixels", "10", "--features", "3", "--epsilon", "-1"], 2),
    (["decompose", "--input", "{missing}", "--epsilon", "4", "--npar", "0.9"], 3),
    (["decompose", "--input", "{img}", "--epsilon", "0", "--npar", "0.9"], 2),
    (["decompose", "--input", "{img}", "--epsilon", "4", "--npar", "2"], 2),
    (["segment", "--input", "{img}", "--epsilon", "4", "--npar", "0.9", "--clusters", "5000",
      "--out-labels", "{out}"], 2),
    (["eval", "--pred", "{img_rgb}", "--truth", "{img}"], 3),
    (["decompose", "--input", "{garbage}", "--epsilon", "4", "--npar", "0.9"], 3),
])
def test_exit_codes(tmp_path, capsys, half_split, argv, code):
    garbage = tmp_path / "garbage.png"
    garbage.write_bytes(b"not an image")
    subs = {"missing": tmp_path / "missing.png", "img": half_split[1], "img_rgb": half_split[0],
            "out": tmp_path / "o.png", "garbage": garbage}
    assert main([a.format(**subs) for a in argv]) == code


def test_json_import_invariant_exit_code(tmp_path, capsys, half_split):
    from chebsurf.cli import _exit_code
    from chebsurf.decompose import DecompositionError
    from chebsurf.pipeline import StageError

    assert _exit_code(StageError("validate", DecompositionError("x"))) == 4
    assert _exit_code(StageError("load", FileNotFoundError("x"))) == 3


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as err:
        main(["segment", "--input", "x.png", "--epsilon", "4", "--npar", "0.9", "--clusters", "0",
              "--out-labels", "y.png"])
    assert err.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "chebsurf.cli", "bounds", "--pixels", "4096",
                           "--features", "3"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["max_order"] == 64.0


def test_log_level_env(tmp_path, monkeypatch, capsys, half_split):
    monkeypatch.setenv("CHEBSURF_LOG", "error")
    code, out = run(capsys, "decompose", "--input", half_split[0], "--epsilon", 2, "--npar", 0.9)
    assert code == 0
    assert "WARNING" not in out.err
