import io
import json

import numpy as np
import pytest

from designlab import __version__
from designlab.cli import run
from designlab.operator import Operator
from designlab.records import dumps, make_record, record_hash, to_csv


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def result_of(text):
    return json.loads(text)["result"]


def test_pairings_count():
    code, out, _ = invoke("pairings", "--t", "3", "--count-only")
    assert code == 0
    assert result_of(out) == {"count": 15, "t": 3}


def test_pairings_list():
    _, out, _ = invoke("pairings", "--t", "2")
    assert result_of(out)["pairings"] == ["2; (1,3)(2,4)", "2; (1,4)(2,3)", "2; (1,2)(3,4)"]


def test_design_test_exact():
    code, out, _ = invoke("design-test", "--family", "sp", "--t", "3", "--d", "4", "--mode", "exact")
    assert code == 0
    res = result_of(out)
    assert res["verdict"] is True and res["distance"] <= 1e-10


def test_design_test_csv_sweep():
    code, out, _ = invoke("design-test", "--t", "2", "--d", "4", "--mode", "monte_carlo",
                          "--n", "200", "400", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "family,t,d,mode,samples,distance,tolerance,verdict"
    assert [line.split(",")[4] for line in lines[1:]] == ["200", "400"]


def test_selftest():
    code, out, _ = invoke("selftest")
    assert code == 0
    res = result_of(out)
    assert res["passed"] and all(c["ok"] for c in res["checks"])


def test_twirl_from_file(tmp_path):
    x = np.zeros((16, 16))
    x[0, 0] = 1
    path = tmp_path / "x.json"
    path.write_text(json.dumps(Operator(4, 2, x).to_dict("coo")))
    code, out, _ = invoke("twirl", "--family", "unitary", "--t", "2", "--d", "4", "--input", str(path))
    assert code == 0
    res = result_of(out)
    assert res["basis_labels"] == ["2; (1,3)(2,4)", "2; (1,4)(2,3)"]
    assert res["coefficients"] == pytest.approx([1 / 20, 1 / 20])
    assert res["trace_in"] == pytest.approx(res["trace_out"])


def test_lemma1_and_mixed_gap():
    _, out, _ = invoke("lemma1", "--t", "3", "--d", "4", "--state", "random", "--seed", "3")
    assert result_of(out)["max_nonpermutation_residual"] <= 1e-10
    _, out, _ = invoke("mixed-gap", "--lam0", "0.5", "--d", "4")
    res = result_of(out)
    assert res["gap"] > 1e-3 and res["spectrum"] == [0.5, 0.5]
    _, out, _ = invoke("mixed-gap", "--lam0", "0.5", "--d", "2")
    assert result_of(out)["closed_form_applicable"] is False


def test_shadows_command():
    code, out, _ = invoke("shadows", "--d", "4", "--ensemble", "sp", "--n", "2000", "--streams", "2")
    assert code == 0
    res = result_of(out)
    assert set(res) >= {"mean", "variance", "stderr", "exact_variance", "channel_distance"}
    assert res["channel_distance"] <= 1e-10


def test_gap_and_ratio():
    _, out, _ = invoke("gap", "--n", "3", "--architecture", "symplectic")
    assert result_of(out)["lambda"] == pytest.approx(0.4, abs=1e-8)
    _, out, _ = invoke("ratio", "--lam-u", "0.5", "--lam-sp", "0.5", "--n-u", "3", "--n-sp", "3")
    assert result_of(out)["ratio"] == pytest.approx(1.0)


def test_gap_csv_sweep():
    code, out, _ = invoke("gap", "--n", "2", "3", "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("n,architecture,lambda")
    assert len(rows) == 3


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("pairings", "--t", "3", "--no-such-flag"),
    ("pairings",),
    ("design-test", "--family", "sp", "--t", "2", "--d", "3"),
    ("mixed-gap", "--lam0", "2", "--d", "4"),
    ("ratio", "--lam-u", "1.5", "--lam-sp", "0.5", "--n-u", "1", "--n-sp", "1"),
    ("design-test", "--t", "2", "--d", "4", "--mode", "monte_carlo"),
])
def test_validation_exit_code(argv):
    code, out, err = invoke(*argv)
    assert code == 2
    assert out == "" and err


def test_budget_exit_code():
    code, _, err = invoke("design-test", "--t", "3", "--d", "8", "--budget-dim", "100")
    assert code == 3 and "budget" in err


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("DESIGNLAB_BUDGET_DIM", "10")
    code, _, _ = invoke("design-test", "--t", "2", "--d", "4")
    assert code == 3


def test_convergence_exit_code():
    code, _, err = invoke("gap", "--n", "4", "--architecture", "symplectic", "--max-iters", "2")
    assert code == 4 and "convergence" in err


def test_output_file(tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = invoke("pairings", "--t", "2", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["result"]["count"] == 3


def test_record_is_reproducible():
    _, a, _ = invoke("design-test", "--t", "2", "--d", "4", "--mode", "monte_carlo", "--n", "300", "--seed", "5")
    _, b, _ = invoke("design-test", "--t", "2", "--d", "4", "--mode", "monte_carlo", "--n", "300", "--seed", "5")
    ra, rb = json.loads(a), json.loads(b)
    assert ra["hash"] == rb["hash"]
    strip = [line for line in a.splitlines() if '"timestamp"' not in line]
    assert strip == [line for line in b.splitlines() if '"timestamp"' not in line]
    assert ra["version"] == __version__
    assert ra["config"]["seed"] == 5 and ra["config"]["n"] == [300]


def test_record_hash_ignores_timestamp():
    a = make_record("x", {"k": 1}, {"v": 0.1}, timestamp="t1")
    b = make_record("x", {"k": 1}, {"v": 0.1}, timestamp="t2")
    assert a["hash"] == b["hash"] == record_hash(a)
    c = make_record("x", {"k": 2}, {"v": 0.1}, timestamp="t1")
    assert c["hash"] != a["hash"]


@pytest.mark.parametrize("x", [0.1, 1 / 3, 2.0**-40, 1e300, -7.25])
def test_floats_round_trip_with_17_digits(x):
    text = dumps({"x": x})
    assert float(json.loads(text)["x"]) == x
    assert "%.17g" % x in text


def test_dumps_handles_numpy_and_complex():
    text = dumps({"a": np.arange(3), "z": 1 + 2j, "b": np.bool_(True), "f": np.float64(0.5)})
    assert json.loads(text) == {"a": [0, 1, 2], "b": True, "f": 0.5, "z": [1.0, 2.0]}


def test_to_csv():
    text = to_csv([{"n": 1, "v": 0.1}, {"n": 2, "v": 0.25}])
    assert text == "n,v\n1,0.10000000000000001\n2,0.25\n"
