import json
import subprocess
import sys

import pytest

from flatrank.cli import run
from flatrank.forms import HomogeneousForm, write_form


def run_cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def strip_timing(recs):
    return [{k: v for k, v in r.items() if k != "timing"} for r in recs]


def test_comon_structured(capsys):
    code, out, _ = run_cli(capsys, "comon", "--n", "5", "--d", "3", "--h", "6", "--seed", "1", "--output", "structured")
    assert code == 0
    (rec,) = records(out)
    assert rec["branch"] == "HoldsNewMethod" and rec["threshold"] == 6 and rec["seed"] == 1
    assert rec["det_provenance"] == "Exact" and "timing" in rec


def test_comon_human_line(capsys):
    code, out, _ = run_cli(capsys, "comon", "--n", "5", "--d", "3", "--h", "4", "--seed", "1")
    assert code == 0
    assert "Lowest rank for which the usual flattenings method does not work = 6" in out
    assert "UsualFlattenings" in out


def test_not_applicable_verdict_still_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "comon", "--n", "5", "--d", "3", "--h", "7", "--seed", "1")
    assert code == 0 and "DeterminantVanishedNA" in out


def test_missing_flag_is_a_usage_error(capsys):
    code, _, err = run_cli(capsys, "comon", "--n", "5", "--d", "3")
    assert code == 2 and "--h" in err


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["comon", "--n", "5", "--d", "3", "--h", "6", "--field", "fp:100"],
    ["comon", "--n", "5", "--d", "3", "--h", "6", "--seed", "-4"],
    ["sweep", "--d", "3", "--n", "two..five"],
    ["osculate", "--n", "3", "--d", "3", "--s", "1"],
])
def test_usage_errors(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


def test_seed_is_echoed_when_omitted(capsys):
    code, out, _ = run_cli(capsys, "comon", "--n", "2", "--d", "3", "--h", "2", "--output", "structured")
    assert code == 0 and isinstance(records(out)[0]["seed"], int)


def test_replay_is_byte_identical(capsys):
    argv = ["sweep", "--d", "3", "--n", "2..6", "--seed", "9", "--jobs", "1", "--output", "structured"]
    _, a, _ = run_cli(capsys, *argv)
    _, b, _ = run_cli(capsys, *argv)
    ra, rb = strip_timing(records(a)), strip_timing(records(b))
    assert ra == rb
    assert [json.dumps(r) for r in ra] == [json.dumps(r) for r in rb]
    assert [r["n"] for r in ra] == [2, 3, 4, 5, 6]
    assert all(r["branch"] == "HoldsNewMethod" and r["field"] == "fp:2147483647" for r in ra)


def test_sweep_human_summary(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--d", "3", "--n", "2,4", "--seed", "3", "--jobs", "1")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("HoldsNewMethod: 2")


@pytest.fixture
def forms_dir(tmp_path):
    write_form(tmp_path / "g.json", HomogeneousForm.from_terms(4, 3, {(0, 0, 3, 0): 1, (0, 0, 0, 3): 1}))
    write_form(tmp_path / "f4.json", HomogeneousForm.from_terms(4, 3, {(3, 0, 0, 0): 1}))
    write_form(tmp_path / "bin.json", HomogeneousForm.from_terms(2, 3, {(3, 0): 1, (0, 3): 1}))
    return tmp_path


def test_catalecticant_command(capsys, forms_dir):
    code, out, _ = run_cli(capsys, "catalecticant", "--form", str(forms_dir / "bin.json"), "--seed", "0",
                           "--output", "structured")
    assert code == 0
    rec = records(out)[0]
    assert rec["ranks"] == [1, 2, 2, 1] and rec["bound"] == 2
    code, out, _ = run_cli(capsys, "catalecticant", "--form", str(forms_dir / "bin.json"), "--s", "1",
                           "--show-matrix", "--seed", "0")
    assert code == 0 and "Cat_1: rank 2" in out and "[3, 0, 0]" in out and "[0, 0, 3]" in out


def test_strassen_command(capsys, forms_dir):
    code, out, _ = run_cli(capsys, "strassen", "--f", str(forms_dir / "f4.json"), "--g", str(forms_dir / "g.json"),
                           "--s", "1", "--rank-f", "1", "--rank-g", "2", "--seed", "0", "--output", "structured")
    assert code == 0
    rec = records(out)[0]
    assert rec["additivity_certified"] and rec["rank_sum"] == 3


def test_strassen_rejects_shared_variables(capsys, forms_dir):
    code, _, err = run_cli(capsys, "strassen", "--f", str(forms_dir / "f4.json"), "--g", str(forms_dir / "f4.json"),
                           "--s", "1", "--rank-f", "1", "--rank-g", "1", "--seed", "0")
    assert code == 2 and "error" in err


def test_bad_form_file(capsys, forms_dir):
    (forms_dir / "bad.json").write_text("{}")
    assert run_cli(capsys, "catalecticant", "--form", str(forms_dir / "bad.json"))[0] == 2
    (forms_dir / "dec.json").write_text('{"nvars": 1, "degree": 1, "terms": [{"exponents": [1], "coeff": "0.5"}]}')
    assert run_cli(capsys, "catalecticant", "--form", str(forms_dir / "dec.json"))[0] == 2
    assert run_cli(capsys, "catalecticant", "--form", str(forms_dir / "missing.json"))[0] == 2


def test_hankel_command(capsys, forms_dir):
    code, out, _ = run_cli(capsys, "hankel", "--z", "1,0,0,1", "--seed", "0", "--output", "structured")
    rec = records(out)[0]
    assert code == 0 and rec["matrix"] == [["1/1", "0/1"], ["0/1", "0/1"], ["0/1", "1/1"]] and rec["rank"] == 2
    code, out, _ = run_cli(capsys, "hankel", "--form", str(forms_dir / "bin.json"), "--seed", "0")
    assert code == 0 and "rank 2" in out


def test_lift_command(capsys):
    code, out, _ = run_cli(capsys, "lift", "--z", "3,3/2,6", "--seed", "0")
    assert code == 0 and out.strip() == "Z' = [3, 1, 2, 0]"
    code, out, _ = run_cli(capsys, "lift", "--z", "1,0,0", "--seed", "0", "--output", "structured")
    assert records(out)[0]["Z"] == ["1/1", "0/1", "0/1", "0/1"]


def test_osculate_command(capsys):
    code, out, _ = run_cli(capsys, "osculate", "--n", "2", "--d", "3", "--s", "2", "--trials", "1",
                           "--seed", "1", "--output", "structured")
    rec = records(out)[0]
    assert code == 0 and rec["status"] == "NotContained" and rec["witness_seed"] is not None


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "flatrank", "lift", "--z", "1,0,0", "--seed", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "Z' = [1, 0, 0, 0]"
    proc = subprocess.run([sys.executable, "-m", "flatrank", "comon"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
