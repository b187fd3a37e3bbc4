import json
import subprocess
import sys

import pytest

from rank2dist.cli import Request, batch, main, run
from rank2dist.errors import InputError

ACCEPTANCE_CASES = [
    {"command": "jacobi", "payload": {"n": 5, "r": [0, 0], "mode": "velocity"}},
    {"command": "jacobi", "payload": {"n": 5, "r": [0, -1], "mode": "wilczynski"}},
    {"command": "jacobi", "payload": {"n": 6, "r": [1, 0, 0], "mode": "velocity"}},
]


def call(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_classify(capsys):
    code, out = call(capsys, "classify", "--tuple", "[10,9]")
    assert code == 0
    rep = json.loads(out)
    assert rep["is_exceptional"] is True
    assert rep["progression_step_squared"] == "1"


def test_malformed_json(capsys):
    code, out = call(capsys, "classify", "--tuple", "[1,2,3")
    assert code == 2
    assert json.loads(out)["error"] == "InputError"


def test_jacobi_wilczynski(capsys):
    code, out = call(capsys, "jacobi", "--n", "5", "--r", "[0,-1]", "--mode", "wilczynski")
    assert code == 0
    rep = json.loads(out)
    assert rep["curvatures"] == ["0", "-1"]
    assert rep["epsilon"] == 1
    assert "timings" not in rep


def test_equiv(capsys):
    code, out = call(capsys, "equiv", "--tuple", "[1,1]", "--tuple", "[4,16]")
    assert code == 0
    assert json.loads(out)["c"] == "2"


def test_exit_codes(capsys):
    assert call(capsys, "jacobi", "--n", "5", "--r", "[10,9]", "--mode", "wilczynski")[0] == 3
    assert call(capsys, "model", "--n", "4", "--r", "[1]")[0] == 2
    assert call(capsys, "frobnicate")[0] == 2
    ode = json.dumps({"m": 2, "B": [["0"], ["0"], ["0"], ["0"]]})
    assert call(capsys, "invariants", "--ode", ode)[0] == 4


def test_model_and_frame(capsys):
    code, out = call(capsys, "model", "--n", "5", "--r", "[0,-1]")
    assert code == 0
    assert json.loads(out)["growth_vector"] == [2, 3, 5]
    code, out = call(capsys, "frame", "--n", "5", "--r", "[0,0]")
    assert code == 0
    assert json.loads(out)["all_zero"] is True


def test_float_backend(capsys):
    code, out = call(capsys, "jacobi", "--n", "5", "--r", "[0,-1]", "--backend", "float")
    assert code == 0
    assert [abs(x - y) < 1e-9 for x, y in zip(json.loads(out)["curvatures"], [0, -1])] == [True, True]


def test_pretty_output(capsys):
    code, out = call(capsys, "classify", "--tuple", "[0,-16]", "--pretty")
    assert code == 0
    assert "is_exceptional: false" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_timings_flag(capsys):
    _, out = call(capsys, "jacobi", "--n", "5", "--r", "[0,0]", "--timings")
    assert "timings" in json.loads(out)


def test_batch_acceptance_cases():
    code, rep = batch(ACCEPTANCE_CASES)
    assert code == 0
    assert rep["summary"] == {"cases": 3, "passed": 3, "failed": 0}
    assert [r["report"]["curvatures"] for r in rep["results"]] == [["0", "0"], ["0", "-1"], ["1", "0", "0"]]


def test_batch_with_bad_case():
    code, rep = batch([ACCEPTANCE_CASES[0], {"command": "classify"}, {"command": "classify", "payload": {"tuple": [1, 0]}}])
    assert code == 1
    assert [r["exit_code"] for r in rep["results"]] == [0, 2, 0]


def test_batch_empty_and_parallel(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    code, out = call(capsys, "batch", str(path))
    assert code == 0
    assert json.loads(out)["summary"]["cases"] == 0
    path = tmp_path / "three.json"
    path.write_text(json.dumps(ACCEPTANCE_CASES))
    code, out = call(capsys, "batch", str(path), "--jobs", "2")
    assert code == 0
    assert json.loads(out)["summary"]["passed"] == 3


def test_request_validation():
    with pytest.raises(InputError):
        Request.from_json({"command": "classify", "payload": {"tuple": [1], "extra": 1}})
    with pytest.raises(InputError):
        Request.from_json({"command": "jacobi", "payload": {"n": "5", "r": [0, 0]}})
    with pytest.raises(InputError):
        Request.from_json({"command": "classify", "payload": {"tuple": [1]}, "backend": "quad"})
    assert run(Request("classify", {"tuple": [0, -16]}))[0] == 0


def test_output_is_deterministic():
    argv = [sys.executable, "-m", "rank2dist.cli", "jacobi", "--n", "5", "--r", "[1,2]"]
    outs = {subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)}
    assert len(outs) == 1
