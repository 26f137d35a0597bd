import json

import pytest

from twosq.cli import run


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_pattern_example(capsys):
    code, out, _ = run_capture(capsys, ["pattern", "4", "1,2", "10"])
    assert code == 0
    assert out == 'pattern,count\n"[1,2]",2\n'


def test_admissible_example(capsys):
    code, out, _ = run_capture(capsys, ["admissible", "4"])
    assert code == 0
    assert out == "0,1,2\n"


def test_admissible_json(capsys):
    code, out, _ = run_capture(capsys, ["admissible", "4", "--format", "json"])
    assert code == 0
    assert json.loads(out) == {"q": "4", "admissible": ["0", "1", "2"]}


def test_sieve_output(capsys):
    code, out, _ = run_capture(capsys, ["sieve", "0", "11"])
    assert code == 0
    assert out.splitlines() == ["value", "0", "1", "2", "4", "5", "8", "9", "10"]


def test_sieve_chunked_equals_whole(capsys):
    code, big, _ = run_capture(capsys, ["sieve", "0", "5000"])
    assert code == 0
    code, chunked, _ = run_capture(capsys, ["sieve", "0", "5000", "--segment-length", "700"])
    assert code == 0
    assert big == chunked


def test_witness_jsonl_and_verify(capsys, tmp_path):
    code, out, err = run_capture(capsys, ["witness", "4", "1", "4", "8", "--tmax", "4"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert [json.loads(l)["t"] for l in lines] == ["0", "2", "4"]
    assert [json.loads(l)["n"] for l in lines] == ["1", "41", "145"]
    path = tmp_path / "certs.jsonl"
    path.write_text(out, encoding="utf-8")
    code, _, err = run_capture(capsys, ["verify", str(path)])
    assert code == 0
    assert "3 certificates verified" in err


def test_verify_rejects_bad_certificate(capsys, tmp_path):
    code, out, _ = run_capture(capsys, ["witness", "4", "1", "4", "8", "--tmax", "4"])
    data = json.loads(out.splitlines()[0])
    data["n"] = "7"
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(data) + "\n", encoding="utf-8")
    code, _, err = run_capture(capsys, ["verify", str(path)])
    assert code == 1


def test_census_csv(capsys):
    code, out, _ = run_capture(capsys, ["census", "4", "1", "10"])
    assert code == 0
    assert out.splitlines() == ["pattern,count", "[0],3", "[1],3", "[2],2"]


def test_census_counts_include_zero_patterns(capsys):
    code, out, _ = run_capture(capsys, ["census", "5", "2", "10"])
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "pattern,count"
    assert len(rows) == 26  # 5^2 admissible pairs plus header
    total = sum(int(r.rsplit(",", 1)[1]) for r in rows[1:])
    assert total == 8


def test_exit_codes(capsys):
    code, _, _ = run_capture(capsys, ["no-such-command"])
    assert code == 64
    code, _, err = run_capture(capsys, ["witness", "4", "2", "2", "4"])
    assert code == 2
    assert json.loads(err.splitlines()[-1])["error"] == "hypothesis_violation"
    code, _, _ = run_capture(capsys, ["pattern", "4", "1,9", "10"])
    assert code == 64
    code, _, _ = run_capture(capsys, ["tuple", "5", "1", "2", "1", "2", "0.2", "0.2"])
    assert code == 1  # theta domain error -> TwoSqError


def test_determinism_bytes(capsys):
    first = run_capture(capsys, ["force-triple", "4", "1", "2", "0", "--xbudget", "200"])
    second = run_capture(capsys, ["force-triple", "4", "1", "2", "0", "--xbudget", "200"])
    assert first == second
    assert first[0] == 0
    payload = json.loads(first[1])
    assert payload["count"] != "0"
    assert payload["blocking_system"]["q"] == "4"


@pytest.mark.parametrize(
    "argv",
    [
        ["sieve", "0", "2000"],
        ["admissible", "48"],
        ["census", "5", "2", "5000", "--format", "json"],
        ["pattern", "8", "1,2,4", "5000"],
        ["witness", "16", "2", "8", "24", "--tmax", "30"],
        ["tuple", "5", "0", "4", "1", "2", "0.025", "0.025", "--sizes", "2,2"],
    ],
)
def test_subcommands_byte_identical(capsys, argv):
    first = run_capture(capsys, argv)
    second = run_capture(capsys, argv)
    assert first == second and first[0] == 0


def test_output_file(capsys, tmp_path):
    path = tmp_path / "adm.csv"
    code, out, _ = run_capture(capsys, ["admissible", "5", "--output", str(path)])
    assert code == 0 and out == ""
    assert path.read_text(encoding="utf-8") == "0,1,2,3,4\n"


def test_tuple_sizes_override(capsys):
    code, out, _ = run_capture(
        capsys, ["tuple", "5", "1", "2", "1", "2", "0.025", "0.025", "--sizes", "2,3"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["offsets"] == ["1", "21", "37", "57", "97"]


def test_sieve_dump(capsys, tmp_path):
    path = tmp_path / "seg.bits"
    code, _, _ = run_capture(capsys, ["sieve", "0", "64", "--dump", str(path)])
    assert code == 0
    blob = path.read_bytes()
    assert blob[:8] == (0).to_bytes(8, "little")
    assert blob[8:16] == (64).to_bytes(8, "little")
