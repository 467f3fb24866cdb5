import json
import math

import pytest

from crw.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def lorentz(tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"omega": 5.0, "topology": {"type": "serial"}, "channels": [[{"emitter": {"omega0": 4.0, "g": 1.0}}]]}))
    return str(p)


@pytest.fixture
def bare(tmp_path):
    p = tmp_path / "bare.json"
    p.write_text(json.dumps({"omega": 0.0, "topology": {"type": "serial"}, "channels": [[{}, {}, {}]]}))
    return str(p)


def test_point_lorentzian(capsys, lorentz):
    code, out, _ = run(capsys, "point", "--config", lorentz, "--k", repr(math.pi / 2))
    assert code == 0
    doc = json.loads(out)
    assert doc["R"] == pytest.approx(0.2, abs=1e-12)
    assert doc["hermitian"] is True
    assert set(doc) == {"k", "E", "r_re", "r_im", "tN_re", "tN_im", "R", "T", "hermitian"}


@pytest.mark.parametrize("k, code", [("3.5", 2), ("0", 2), ("-1", 2), ("nan", 3), ("abc", 3)])
def test_point_exit_codes(capsys, lorentz, k, code):
    assert run(capsys, "point", "--config", lorentz, "--k", k)[0] == code


def test_missing_config_is_input_error(capsys, tmp_path):
    assert run(capsys, "point", "--config", str(tmp_path / "nope.json"), "--k", "1")[0] == 3


def test_invalid_config_is_input_error(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"omega": 5.0, "topology": {"type": "identical_parallel"}, "copies": 0, "channels": [[{}]]}))
    code, _, err = run(capsys, "point", "--config", str(p), "--k", "1")
    assert code == 3 and "copies" in err


def test_sweep_transparent_chain(capsys, bare):
    code, out, _ = run(capsys, "sweep", "--config", bare, "--k-min", "0.1", "--k-max", "3.0", "--points", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,E,detuning,R,T"
    assert len(lines) == 6
    for line in lines[1:]:
        k, E, det, R, T = line.split(",")
        assert det == ""
        assert abs(float(R)) < 1e-12 and abs(float(T) - 1) < 1e-12
        assert float(E) == pytest.approx(-2 * math.cos(float(k)))


def test_sweep_json_lines_and_out(capsys, bare, tmp_path):
    out_file = tmp_path / "s.jsonl"
    code, out, _ = run(
        capsys, "sweep", "--config", bare, "--k-min", "0.1", "--k-max", "3.0", "--points", "3",
        "--format", "json-lines", "--out", str(out_file),
    )
    assert code == 0 and out == ""
    rows = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert len(rows) == 3 and rows[0]["detuning"] is None


@pytest.mark.parametrize(
    "extra, code",
    [
        (["--k-min", "0", "--k-max", "1", "--points", "4"], 2),
        (["--k-min", "1", "--k-max", "4", "--points", "4"], 2),
        (["--k-min", "2", "--k-max", "1", "--points", "4"], 3),
        (["--k-min", "1", "--k-max", "2", "--points", "1"], 3),
        (["--k-min", "1", "--k-max", "2", "--points", "4", "--reference-emitter", "0"], 3),
    ],
)
def test_sweep_bad_arguments(capsys, bare, extra, code):
    assert run(capsys, "sweep", "--config", bare, *extra)[0] == code


def test_windows_header_only(capsys, bare):
    code, out, _ = run(capsys, "windows", "--config", bare, "--k-min", "0.1", "--k-max", "3.0", "--points", "64")
    assert code == 0
    assert out == "k_lo,k_hi,max_R,slope_lo,slope_hi\n"


def test_windows_threshold_range(capsys, bare):
    base = ["windows", "--config", bare, "--k-min", "0.1", "--k-max", "3.0", "--points", "8"]
    assert run(capsys, *base, "--threshold", "1.5")[0] == 3
    assert run(capsys, *base, "--threshold", "0")[0] == 3


def test_verify(capsys, lorentz):
    code, out, _ = run(capsys, "verify", "--config", lorentz, "--samples", "20", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["samples"] == 20 and doc["seed"] == 3
    assert doc["max_abs_dr"] < 1e-8
    assert run(capsys, "verify", "--config", lorentz, "--samples", "0", "--seed", "3")[0] == 3


def test_verify_failure_exit_code(capsys, lorentz, monkeypatch):
    import crw.cli as cli
    from crw.sweep import VerificationReport

    monkeypatch.setattr(cli, "verify_against_oracle", lambda c, s, seed: VerificationReport(s, seed, 1.0, 0.0, 1.0))
    assert run(capsys, "verify", "--config", lorentz, "--samples", "2", "--seed", "0")[0] == 1


def test_usage_errors_exit_3(capsys):
    for argv in ([], ["bogus"], ["point", "--k", "1"]):
        assert main(argv) == 3
    capsys.readouterr()


def test_sweep_matches_golden(capsys, configs_dir, golden_dir):
    k_min, k_max = math.pi / 1024, math.pi - math.pi / 1024
    for name in ("fig2a_n2_w0_2pi", "fig3_aba_in", "fig4b_ring_ab_ba", "fig5_aba_copies5"):
        code, out, _ = run(
            capsys, "sweep", "--config", str(configs_dir / f"{name}.json"),
            "--k-min", repr(k_min), "--k-max", repr(k_max), "--points", "512", "--reference-emitter", "0",
        )
        assert code == 0
        assert out == (golden_dir / "sweeps" / f"{name}.csv").read_text()
