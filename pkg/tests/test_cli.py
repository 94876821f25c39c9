import json

import pytest

from arborsign.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out else None
    return code, payload, captured.err


@pytest.fixture(scope="module")
def trace_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("traces") / "t3.json"
    assert main(["simulate", "--steps", "3", "--height", "100", "--out", str(path)]) == 0
    return path


class TestDiscSeq:
    def test_success(self, capsys):
        code, payload, _ = run_cli(capsys, "disc-seq", "--poly", "x^2-3", "--levels", "2")
        assert code == 0
        assert payload == {"classes": [3, 6], "subspace": [2, 3]}

    def test_base_absorbed(self, capsys):
        code, payload, _ = run_cli(
            capsys, "disc-seq", "--poly", "x^2+1", "--levels", "2", "--base", "-1"
        )
        assert code == 0
        assert payload["subspace"] == [-1, 2]

    def test_inseparable_exit_1(self, capsys):
        code, payload, _ = run_cli(capsys, "disc-seq", "--poly", "x^2", "--levels", "1")
        assert code == 1
        assert payload == {"inseparable": 1}

    def test_parse_error_exit_2(self, capsys):
        code, payload, err = run_cli(capsys, "disc-seq", "--poly", "x^^2", "--levels", "1")
        assert code == 2
        assert payload is None
        assert "position" in err

    def test_bad_levels_exit_2(self, capsys):
        assert run_cli(capsys, "disc-seq", "--poly", "x^2-3", "--levels", "0")[0] == 2

    def test_meta_flag(self, capsys):
        code, payload, _ = run_cli(
            capsys, "--meta", "disc-seq", "--poly", "x^2-3", "--levels", "1"
        )
        assert code == 0
        assert payload["meta"]["tool"] == "arborsign"


class TestIndexReport:
    def test_refutes_exit_1(self, capsys):
        code, payload, _ = run_cli(
            capsys, "index-report", "--poly", "x^2-3", "--base", "3",
            "--level", "1", "--n", "1", "--primes", "10",
        )
        assert code == 1
        assert payload["verdict"] == "REFUTES_INDEX_AT_MOST(1)"
        assert payload["killed"] == [1]

    def test_consistent_exit_0(self, capsys):
        code, payload, _ = run_cli(
            capsys, "index-report", "--poly", "x^2+1",
            "--level", "1", "--n", "1", "--primes", "10",
        )
        assert code == 0
        assert payload["degree_lower_bound"] == 2

    def test_no_good_primes_exit_3(self, capsys):
        code, payload, err = run_cli(
            capsys, "index-report", "--poly", "x^2-3",
            "--level", "1", "--n", "1", "--primes", "1",
        )
        assert code == 3
        assert payload is None and err

    def test_level_zero_exit_2(self, capsys):
        assert run_cli(
            capsys, "index-report", "--poly", "x^2+1", "--level", "0", "--n", "1"
        )[0] == 2


class TestSimulateVerifyAudit:
    def test_simulate_summary(self, capsys, tmp_path):
        out = tmp_path / "t1.json"
        code, payload, _ = run_cli(
            capsys, "simulate", "--steps", "1", "--height", "100", "--out", str(out)
        )
        assert code == 0
        assert payload["steps"] == 1 and payload["dim"] == 1
        data = json.loads(out.read_text())
        assert data["schema"] == 1
        assert data["final"]["F"] == [-1]

    def test_simulate_abort_exit_3_with_partial_trace(self, capsys, tmp_path):
        out = tmp_path / "abort.json"
        code = main(["simulate", "--steps", "1", "--height", "1", "--out", str(out)])
        capsys.readouterr()
        assert code == 3
        assert json.loads(out.read_text())["steps"] == []

    def test_verify_clean(self, capsys, trace_file):
        code, payload, _ = run_cli(capsys, "verify", "--trace", str(trace_file))
        assert code == 0
        assert payload == {"violations": []}

    def test_verify_tampered_point(self, capsys, trace_file, tmp_path):
        data = json.loads(trace_file.read_text())
        data["steps"][0]["point"] = "1/1"  # square fiber on y^2 = t
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        code, payload, _ = run_cli(capsys, "verify", "--trace", str(bad))
        assert code == 1
        assert any(v.startswith("(2_1)") for v in payload["violations"])

    def test_verify_truncated_file_exit_2(self, capsys, trace_file, tmp_path):
        bad = tmp_path / "trunc.json"
        bad.write_text(trace_file.read_text()[:40])
        assert run_cli(capsys, "verify", "--trace", str(bad))[0] == 2

    def test_verify_missing_file_exit_2(self, capsys, tmp_path):
        assert run_cli(capsys, "verify", "--trace", str(tmp_path / "nope.json"))[0] == 2

    def test_audit(self, capsys, trace_file):
        code, payload, _ = run_cli(capsys, "audit", "--trace", str(trace_file), "--level", "2")
        assert code == 0
        assert payload["final_dim"] == 3
        assert any(entry["killed"] for entry in payload["polynomials"])

    def test_audit_bad_level_exit_2(self, capsys, trace_file):
        assert run_cli(capsys, "audit", "--trace", str(trace_file), "--level", "-1")[0] == 2


class TestVastWitness:
    def test_primes_stream(self, capsys):
        code, payload, _ = run_cli(
            capsys, "vast-witness", "--stream", "primes", "--base", "2,3", "--depth", "10"
        )
        assert code == 0
        assert payload["witness"] == 5

    def test_disc_stream(self, capsys):
        code, payload, _ = run_cli(
            capsys, "vast-witness", "--stream", "disc:x^2+1:1", "--base", "-1", "--depth", "5"
        )
        assert code == 0
        assert payload["witness"] == 2

    def test_depth_exhausted_exit_3(self, capsys):
        code, payload, err = run_cli(
            capsys, "vast-witness", "--stream", "primes", "--base", "2,3,5", "--depth", "3"
        )
        assert code == 3
        assert payload is None and err

    def test_unknown_stream_exit_2(self, capsys):
        assert run_cli(capsys, "vast-witness", "--stream", "???", "--depth", "3")[0] == 2


class TestGroupOrder:
    def test_values(self, capsys):
        code, payload, _ = run_cli(capsys, "group-order", "--arity", "2", "--depth", "3")
        assert code == 0
        assert payload == {
            "arity": 2, "depth": 3, "order": 128, "ambient_supernatural": "2^inf"
        }

    def test_bad_arity_exit_2(self, capsys):
        assert run_cli(capsys, "group-order", "--arity", "1", "--depth", "3")[0] == 2


class TestArgparseContract:
    def test_unknown_command_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        capsys.readouterr()
        assert exc.value.code == 2

    def test_missing_required_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["disc-seq"])
        capsys.readouterr()
        assert exc.value.code == 2
