from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from dopcalc.cli import run
from dopcalc.tables import REPORT_SCHEMA, RingFileError, RunConfig, parse_ring

HERE = Path(__file__).parent
RINGS = HERE / "rings"
GOLDEN = HERE / "golden"


def call(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
    try:
        code = run([str(a) for a in argv], out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def ring_path(name):
    return RINGS / f"{name}.ring"


# ring files


def test_parse_ring_file():
    desc = parse_ring("# comment\nfield QQ\nvars a b:2 c:3\nrel a^3 - c + a*b; rel b^3 - c^2")
    assert desc.field == "QQ"
    assert desc.variables == [("a", 1), ("b", 2), ("c", 3)]
    assert len(desc.relations) == 2


def test_ring_text_round_trip():
    for path in sorted(RINGS.glob("*.ring")):
        desc = parse_ring(path.read_text())
        again = parse_ring(desc.to_text())
        assert again == desc
        assert again.to_text() == desc.to_text()


def test_parse_error_positions():
    with pytest.raises(RingFileError) as err:
        parse_ring("field QQ;\nvars x y;\nrel x^2 + q;")
    assert (err.value.line, err.value.column) == (3, 11)
    with pytest.raises(RingFileError) as err:
        parse_ring("field QQ\nvars x y\nrel x^2 + y")
    assert err.value.line == 3 and "inhomogeneous" in err.value.message
    assert "term y" in err.value.message
    with pytest.raises(RingFileError) as err:
        parse_ring("field Fp 6; vars x;")
    assert "not a prime" in err.value.message
    with pytest.raises(RingFileError) as err:
        parse_ring("field QQ; vars x:0;")
    assert err.value.column == 16
    with pytest.raises(RingFileError):
        parse_ring("vars x;")
    with pytest.raises(RingFileError):
        parse_ring("field QQ; vars x x;")
    with pytest.raises(RingFileError):
        parse_ring("field ZZ; vars x; rel 1/2*x;")


def test_config_defaults_follow_window_width():
    cfg = RunConfig(window=(-3, 2))
    assert cfg.tmax == cfg.nmax == 8


def test_config_rejects_bounds_above_cap():
    with pytest.raises(ValueError, match="degree-cap"):
        RunConfig(window=(-2, 2), order=10, degree_cap=8).validate()


# exit codes


def test_dops_on_f2x():
    code, out, _ = call("dops", ring_path("f2x"), "--order", "2", "--window", "-2:2")
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines() if line and not line.startswith("#")]
    assert ["2", "0", "3"] in rows


def test_parse_error_exit_code_and_message(tmp_path):
    bad = tmp_path / "bad.ring"
    bad.write_text("field QQ;\nvars x y;\nrel x^2 + )")
    code, out, err = call("dops", bad)
    assert code == 2 and out == ""
    assert "line 3" in err and "column" in err


def test_missing_file_is_an_error():
    code, _, err = call("dops", RINGS / "does_not_exist.ring")
    assert code == 2 and "No such file" in err


def test_bad_flags_are_errors():
    assert call("dops", ring_path("qx"), "--window", "3:1")[0] == 2
    assert call("dops", ring_path("qx"), "--order", "99")[0] == 2
    assert call("nonsense", ring_path("qx"))[0] == 2
    assert call("torsion-scan", ring_path("elliptic_cone_zz"))[0] == 2
    assert call("dops", ring_path("zxy"))[0] == 2
    assert call("frobenius", ring_path("qx"))[0] == 2


def test_inconclusive_exit_code():
    # i = 0 colimit cells keep growing, so svdb cannot certify them
    code, out, _ = call("svdb", ring_path("qx"), "--window", "-1:1", "--nmax", "4")
    assert code == 1 and "# verdict inconclusive" in out


def test_ring_from_stdin():
    code, out, _ = call("dops", "-", "--order", "1", "--window", "0:0",
                        stdin="field QQ; vars x y;")
    assert code == 0
    assert "1\t0\t5" in out


def test_lc_methods_agree():
    args = ("lc", ring_path("qxy"), "--i", "2", "--window", "-3:0", "--tmax", "5")
    a = call(*args, "--method", "koszul")
    b = call(*args, "--method", "powers")
    assert a[0] == b[0] == 0

    def body(text):
        return [line for line in text.splitlines() if not line.startswith("# config")]

    assert body(a[1]) == body(b[1])


def test_theorem_a_on_the_line_matches_everywhere():
    code, out, _ = call("theorem-a", ring_path("qx"), "--window", "-3:3", "--nmax", "5")
    assert code == 0
    assert "mismatch" not in out


def test_quotient_module_option():
    code, out, _ = call("svdb", ring_path("quadric_cone"), "--quotient", "b", "--i", "2",
                        "--window", "-1:0", "--nmax", "4")
    assert code in (0, 1)
    assert '"quotient": ["b"]' in out


# reports


def test_json_report_schema():
    code, out, _ = call("torsion-scan", ring_path("elliptic_cone_zz"), "--primes", "2,3",
                        "--order", "2", "--window", "-1:1", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == REPORT_SCHEMA
    assert set(rep) == {"schema", "tool", "version", "command", "ring", "config", "tables",
                        "notes", "verdict"}
    assert rep["config"]["primes"] == [2, 3]
    assert rep["tables"]["primes"]["rows"] == [[2, "TorsionWitness"], [3, "BadPrime"]]
    assert any(n.startswith("assumption:") for n in rep["notes"])


def test_reports_are_identical_across_worker_counts():
    base = ("torsion-scan", ring_path("elliptic_cone_zz"), "--primes", "2,3,5", "--order", "2",
            "--window", "-1:1", "--format", "json")
    one = call(*base, "--workers", "1")
    eight = call(*base, "--workers", "8")
    assert one == eight
    dops = ("dops", ring_path("quadric_cone"), "--order", "2", "--window", "-1:1")
    assert call(*dops, "--workers", "1") == call(*dops, "--workers", "8")


GOLDEN_RUNS = {
    "depth_quadric_3fold.tsv": ("depth", "quadric_3fold", "--window", "-2:0", "--nmax", "4",
                                "--imax", "1"),
    "theorem_a_quadric_cone_i1.tsv": ("theorem-a", "quadric_cone", "--i", "1", "--window",
                                      "-2:2", "--nmax", "4"),
    "theorem_a_quadric_cone_i0.tsv": ("theorem-a", "quadric_cone", "--i", "0", "--window",
                                      "-2:2", "--nmax", "4"),
    "horrocks_quadric_3fold.tsv": ("horrocks", "quadric_3fold", "--window", "-1:1", "--tmax",
                                   "4"),
    "dops_f2x.tsv": ("dops", "f2x", "--order", "2", "--window", "-2:2"),
    "torsion_scan_elliptic.json": ("torsion-scan", "elliptic_cone_zz", "--primes", "2,3,5",
                                   "--order", "3", "--window", "-1:1", "--format", "json"),
    "leftright_fat_point.tsv": ("leftright", "fat_point"),
    "frobenius_elliptic_f2.tsv": ("frobenius", "elliptic_cone_f2", "--window", "0:2"),
}


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_reports(name):
    cmd, ring, *rest = GOLDEN_RUNS[name]
    _, out, _ = call(cmd, ring_path(ring), *rest)
    assert out == (GOLDEN / name).read_text()


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "dopcalc", "dops", str(ring_path("qx")), "--order", "1",
         "--window", "-1:1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# dopcalc ")
