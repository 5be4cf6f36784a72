"""End-to-end command line runs with real files."""

import json
import math

import pytest

from pathcert import cli


def _run(argv, capsys):
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def _write_witness(tmp_path, name="witness.json", count=120, stop=0.02):
    target = tmp_path / name
    document = {
        "dimension": 2,
        "generator": {"kind": "diagonal", "count": count, "stop": stop},
    }
    target.write_text(json.dumps(document))
    return str(target)


def _build_path_file(tmp_path, capsys, k_max=12):
    witness = _write_witness(tmp_path)
    out = str(tmp_path / "path.json")
    rc, _, _ = _run(["build", "--witness", witness, "--k-max", str(k_max), "--out", out], capsys)
    assert rc == 0
    return out


def test_cover_prints_json(capsys):
    rc, out, _ = _run(["cover", "--dimension", "1"], capsys)
    assert rc == 0
    document = json.loads(out)
    assert document["dimension"] == 1
    assert document["directions"] == [[1.0], [-1.0]]


def test_cover_writes_file(tmp_path, capsys):
    target = tmp_path / "cover.json"
    rc, out, _ = _run(
        ["cover", "--dimension", "2", "--out", str(target)], capsys
    )
    assert rc == 0
    assert out.startswith("cover:")
    document = json.loads(target.read_text())
    assert document["dimension"] == 2
    assert len(document["directions"]) >= 3
    for row in document["directions"]:
        assert math.isclose(sum(v * v for v in row), 1.0, rel_tol=1e-12)


def test_build_writes_path_file(tmp_path, capsys):
    witness = _write_witness(tmp_path)
    out = tmp_path / "path.json"
    rc, text, _ = _run(
        ["build", "--witness", witness, "--k-max", "12", "--out", str(out)], capsys
    )
    assert rc == 0
    assert text.startswith("build:")
    assert "parity" in text
    document = json.loads(out.read_text())
    assert document["k_max"] == 12
    assert len(document["matched"]) >= 2
    assert len(document["anchors"]) == 13


def test_build_rerun_is_byte_identical(tmp_path, capsys):
    witness = _write_witness(tmp_path)
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    for out in (first, second):
        rc, _, _ = _run(
            ["build", "--witness", witness, "--k-max", "12", "--out", str(out)], capsys
        )
        assert rc == 0
    assert first.read_bytes() == second.read_bytes()


def test_build_missing_witness_file(tmp_path, capsys):
    rc, _, err = _run(
        ["build", "--witness", str(tmp_path / "nope.json"), "--out", str(tmp_path / "p.json")],
        capsys,
    )
    assert rc == 2
    assert "error:" in err


def test_sample_log_grid(tmp_path, capsys):
    path_file = _build_path_file(tmp_path, capsys)
    out = tmp_path / "samples.csv"
    rc, text, _ = _run(
        ["sample", "--path", path_file, "--out", str(out), "--points", "64"], capsys
    )
    assert rc == 0
    assert "sample: 64 rows (log grid)" in text
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 65
    assert lines[0].startswith("t,s1,s2,")


def test_sample_uniform_grid_with_range(tmp_path, capsys):
    path_file = _build_path_file(tmp_path, capsys)
    out = tmp_path / "samples.csv"
    rc, _, _ = _run(
        [
            "sample", "--path", path_file, "--out", str(out),
            "--grid", "uniform", "--points", "10",
            "--t-min", "0.1", "--t-max", "0.4",
        ],
        capsys,
    )
    assert rc == 0
    rows = out.read_text().strip().split("\n")[1:]
    ts = [float(r.split(",")[0]) for r in rows]
    assert ts[0] == 0.1
    assert ts[-1] == 0.4
    assert len(ts) == 10


def test_sample_range_outside_domain(tmp_path, capsys):
    path_file = _build_path_file(tmp_path, capsys)
    rc, _, err = _run(
        ["sample", "--path", path_file, "--out", str(tmp_path / "s.csv"), "--t-max", "2.0"],
        capsys,
    )
    assert rc == 2
    assert "error:" in err


def test_check_subset_passes_and_reports(tmp_path, capsys):
    path_file = _build_path_file(tmp_path, capsys)
    out = tmp_path / "reports.json"
    rc, text, _ = _run(
        [
            "check", "--path", path_file,
            "--suite", "envelope,interpolation,product",
            "--restricted",
            "--per-decade", "256", "--per-window", "16",
            "--out", str(out),
        ],
        capsys,
    )
    assert rc == 0
    lines = text.strip().split("\n")
    assert lines[0].startswith("check envelope: PASS measured=")
    assert lines[1].startswith("check interpolation: PASS")
    assert lines[2].startswith("check product: PASS")
    assert all("threshold=" in line for line in lines)
    reports = json.loads(out.read_text())
    assert [r["name"] for r in reports] == ["envelope", "interpolation", "product"]
    assert all(r["passed"] for r in reports)


def test_check_unknown_suite(tmp_path, capsys):
    path_file = _build_path_file(tmp_path, capsys)
    rc, _, err = _run(["check", "--path", path_file, "--suite", "volume"], capsys)
    assert rc == 2
    assert "error:" in err


def test_probe_certifies_builtin_rational(tmp_path, capsys):
    report_file = tmp_path / "probe.json"
    tail_file = tmp_path / "tail.csv"
    path_file = tmp_path / "probe-path.json"
    rc, out, _ = _run(
        [
            "probe", "--field", "builtin:rational2d",
            "--generator", "diagonal", "--count", "120", "--stop", "0.02",
            "--k-max", "25",
            "--out", str(report_file),
            "--tail-csv", str(tail_file),
            "--path-out", str(path_file),
        ],
        capsys,
    )
    assert rc == 0
    assert out.startswith("probe rational2d: discontinuous-certified")
    report = json.loads(report_file.read_text())
    assert report["verdict"] == "discontinuous-certified"
    assert report["limsup_estimate"] >= 1.0 - 1e-9
    assert report["epsilon"] == 0.5
    assert tail_file.read_text().startswith("delta,sup\n")
    saved = json.loads(path_file.read_text())
    assert saved["k_max"] == 25


def test_probe_parabola_reports_no_violation(capsys):
    rc, out, err = _run(
        [
            "probe", "--field", "parabola",
            "--generator", "diagonal", "--count", "120", "--stop", "0.02",
            "--k-max", "25",
        ],
        capsys,
    )
    assert rc == 1
    assert "falling back to the unfiltered sequence" in err
    assert "no-violation-found" in out


def test_probe_expression_field(capsys):
    rc, out, _ = _run(
        [
            "probe", "--field", "2*x1*x2/(x1^2+x2^2)",
            "--generator", "diagonal", "--count", "120", "--stop", "0.02",
            "--k-max", "25",
        ],
        capsys,
    )
    assert rc == 0
    assert "discontinuous-certified" in out


def test_probe_witness_file_with_directions(tmp_path, capsys):
    root = 1.0 / math.sqrt(2.0)
    pairs = [
        {"x": [r * root, r * root], "y": [root, root]}
        for r in (0.4, 0.2, 0.09, 0.045)
    ]
    witness = tmp_path / "pairs.json"
    witness.write_text(json.dumps({"dimension": 2, "pairs": pairs}))
    rc, out, _ = _run(
        [
            "probe", "--field", "rational2d",
            "--witness", str(witness), "--k-max", "12",
        ],
        capsys,
    )
    assert rc == 0
    assert "discontinuous-certified" in out


def test_probe_unknown_builtin(capsys):
    rc, _, err = _run(["probe", "--field", "builtin:nope"], capsys)
    assert rc == 2
    assert "unknown builtin field" in err


def test_build_pipeline_failure_exits_3(tmp_path, capsys):
    document = {
        "dimension": 2,
        "pairs": [{"x": [0.4, 0.0]}, {"x": [0.41, 0.0]}, {"x": [0.42, 0.0]}],
    }
    witness = tmp_path / "narrow.json"
    witness.write_text(json.dumps(document))
    rc, _, err = _run(
        ["build", "--witness", str(witness), "--out", str(tmp_path / "p.json")], capsys
    )
    assert rc == 3
    assert "pipeline error" in err


def test_usage_errors_exit_2(capsys):
    assert _run([], capsys)[0] == 2
    assert _run(["cover"], capsys)[0] == 2
    assert _run(["cover", "--dimension", "2", "--bogus"], capsys)[0] == 2
    assert _run(["sample", "--path", "x.json"], capsys)[0] == 2
