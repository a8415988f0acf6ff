"""cli module: argument handling, exit codes, end-to-end subcommands."""

import numpy as np
import pytest

from helpers import textured_image
from quilt import load_image, save_image
from quilt.cli import run


@pytest.fixture()
def images(tmp_path):
    cpath = tmp_path / "content.png"
    spath = tmp_path / "style.png"
    save_image(textured_image(150, 20, 20), cpath, "png")
    save_image(textured_image(151, 20, 20), spath, "png")
    return cpath, spath


# ------------------------------------------------------------- usage


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    out = capsys.readouterr().out
    assert "synth" in out and "transfer" in out and "sweep" in out and "compare" in out


def test_subcommand_help_lists_documented_defaults(capsys):
    assert run(["transfer", "--help"]) == 0
    out = capsys.readouterr().out
    assert "0.1" in out  # tolerance default
    assert "0.8" in out  # alpha default
    assert "42" in out  # seed default
    assert "round(patch_size/6)" in out
    assert run(["sweep", "--help"]) == 0
    out = capsys.readouterr().out
    assert "5,11,16,20" in out


def test_unknown_flag_is_usage_error(capsys):
    assert run(["transfer", "--bogus-flag"]) == 2
    assert capsys.readouterr().err != ""


def test_missing_subcommand_is_usage_error(capsys):
    assert run([]) == 2


def test_non_integer_patch_size_is_usage_error(capsys):
    assert run(["synth", "--style", "s.png", "--out", "o.png", "--width", "32",
                "--height", "32", "--patch-size", "five"]) == 2


# ------------------------------------------------------------- synth


def test_synth_writes_output(tmp_path, images, capsys):
    _, spath = images
    out = tmp_path / "out.png"
    code = run(["synth", "--style", str(spath), "--out", str(out),
                "--width", "28", "--height", "24", "--patch-size", "6", "--seed", "3"])
    assert code == 0
    img = load_image(out)
    assert img.width == 28 and img.height == 24


def test_synth_runs_are_byte_identical(tmp_path, images):
    _, spath = images
    out_a, out_b = tmp_path / "a.png", tmp_path / "b.png"
    args = ["synth", "--style", str(spath), "--width", "26", "--height", "26",
            "--patch-size", "6", "--seed", "8", "--threads", "1"]
    assert run(args + ["--out", str(out_a)]) == 0
    assert run(args + ["--out", str(out_b), "--threads", "3"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_synth_ppm_output(tmp_path, images):
    _, spath = images
    out = tmp_path / "out.ppm"
    assert run(["synth", "--style", str(spath), "--out", str(out),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 0
    assert out.read_bytes().startswith(b"P6\n22 22\n255\n")


def test_synth_unknown_output_suffix_is_config_error(tmp_path, images):
    _, spath = images
    assert run(["synth", "--style", str(spath), "--out", str(tmp_path / "x.jpg"),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 2


def test_synth_missing_style_file_is_runtime_error(tmp_path, capsys):
    assert run(["synth", "--style", str(tmp_path / "absent.png"),
                "--out", str(tmp_path / "o.png"),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 1
    assert "error:" in capsys.readouterr().err


def test_synth_unwritable_output_is_runtime_error(tmp_path, images, capsys):
    _, spath = images
    assert run(["synth", "--style", str(spath),
                "--out", str(tmp_path / "no" / "dir" / "o.png"),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 1


def test_synth_invalid_config_is_exit_two(tmp_path, images, capsys):
    _, spath = images
    base = ["synth", "--style", str(spath), "--out", str(tmp_path / "o.png")]
    assert run(base + ["--width", "22", "--height", "22", "--patch-size", "1"]) == 2
    assert run(base + ["--width", "22", "--height", "22", "--patch-size", "6",
                       "--tolerance", "-0.5"]) == 2
    assert run(base + ["--width", "4", "--height", "22", "--patch-size", "6"]) == 2
    assert run(base + ["--width", "22", "--height", "22", "--patch-size", "30"]) == 2


def test_synth_debug_seams(tmp_path, images):
    _, spath = images
    out = tmp_path / "deb.png"
    assert run(["synth", "--style", str(spath), "--out", str(out),
                "--width", "16", "--height", "16", "--patch-size", "9",
                "--debug-seams"]) == 0
    seam_dir = tmp_path / "deb_seams"
    assert seam_dir.is_dir()
    assert any(p.suffix == ".png" for p in seam_dir.iterdir())


# ------------------------------------------------------------- transfer


def test_transfer_defaults_output_to_content_size(tmp_path, images):
    cpath, spath = images
    out = tmp_path / "t.png"
    assert run(["transfer", "--content", str(cpath), "--style", str(spath),
                "--out", str(out), "--patch-size", "6", "--alpha", "0.7"]) == 0
    img = load_image(out)
    assert img.width == 20 and img.height == 20


def test_transfer_explicit_output_size(tmp_path, images):
    cpath, spath = images
    out = tmp_path / "t.png"
    assert run(["transfer", "--content", str(cpath), "--style", str(spath),
                "--out", str(out), "--patch-size", "6",
                "--width", "26", "--height", "14"]) == 0
    img = load_image(out)
    assert img.width == 26 and img.height == 14


def test_transfer_alpha_out_of_range_is_exit_two(tmp_path, images):
    cpath, spath = images
    assert run(["transfer", "--content", str(cpath), "--style", str(spath),
                "--out", str(tmp_path / "t.png"), "--patch-size", "6",
                "--alpha", "1.5"]) == 2


# ------------------------------------------------------------- sweep


def test_sweep_end_to_end(tmp_path, images, capsys):
    cpath, spath = images
    out_dir = tmp_path / "runs"
    code = run(["sweep", "--content", str(cpath), "--style", str(spath),
                "--out-dir", str(out_dir), "--sizes", "5,8", "--seed", "4"])
    assert code == 0
    printed = capsys.readouterr().out.strip()
    assert printed
    run_dir = out_dir / printed.split("/")[-1]
    assert (run_dir / "metrics.csv").is_file()
    lines = (run_dir / "metrics.csv").read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == "image_id,patch_size,color_distance,structure_score,wall_time_s"
    assert len(data) == 3


def test_sweep_rejects_unordered_sizes(tmp_path, images):
    cpath, spath = images
    assert run(["sweep", "--content", str(cpath), "--style", str(spath),
                "--out-dir", str(tmp_path / "runs"), "--sizes", "8,5"]) == 2
    assert run(["sweep", "--content", str(cpath), "--style", str(spath),
                "--out-dir", str(tmp_path / "runs"), "--sizes", "5,abc"]) == 2


# ------------------------------------------------------------- compare


def test_compare_end_to_end(tmp_path, images, capsys):
    cpath, spath = images
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(f"content,style,external\n{cpath.name},{spath.name},\n")
    code = run(["compare", "--manifest", str(manifest),
                "--out-dir", str(tmp_path / "runs"), "--patch-size", "6"])
    assert code == 0
    printed = capsys.readouterr().out.strip()
    assert printed


def test_compare_failing_row_exits_nonzero(tmp_path, images, capsys):
    cpath, spath = images
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(
        "content,style,external\n"
        f"missing.png,{spath.name},\n"
        f"{cpath.name},{spath.name},\n"
    )
    code = run(["compare", "--manifest", str(manifest),
                "--out-dir", str(tmp_path / "runs"), "--patch-size", "6"])
    assert code == 1
    captured = capsys.readouterr()
    assert "row 0 failed" in captured.err
    assert captured.out.strip()  # run dir still printed for the surviving row


def test_compare_bad_manifest_is_runtime_error(tmp_path, capsys):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("wrong,header\n")
    assert run(["compare", "--manifest", str(manifest),
                "--out-dir", str(tmp_path / "runs"), "--patch-size", "6"]) == 1


# ------------------------------------------------------------- threads


def test_threads_env_fallback(tmp_path, images, monkeypatch):
    _, spath = images
    monkeypatch.setenv("QUILT_THREADS", "2")
    out = tmp_path / "o.png"
    assert run(["synth", "--style", str(spath), "--out", str(out),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 0
    assert out.is_file()


def test_threads_env_invalid_is_exit_two(tmp_path, images, monkeypatch, capsys):
    _, spath = images
    monkeypatch.setenv("QUILT_THREADS", "lots")
    assert run(["synth", "--style", str(spath), "--out", str(tmp_path / "o.png"),
                "--width", "22", "--height", "22", "--patch-size", "6"]) == 2
    assert "QUILT_THREADS" in capsys.readouterr().err


def test_threads_zero_is_exit_two(tmp_path, images):
    _, spath = images
    assert run(["synth", "--style", str(spath), "--out", str(tmp_path / "o.png"),
                "--width", "22", "--height", "22", "--patch-size", "6",
                "--threads", "0"]) == 2
