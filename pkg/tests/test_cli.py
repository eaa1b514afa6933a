import io
import json
from pathlib import Path

import pytest

from effalg.cli import run_command
from effalg.proofs import shipped

GOLDEN = Path(__file__).parent / "golden"

EXAMPLES = [
    ("leq_nondet.json", ["leq", "--effect", "nondet", "bot", "or(top,bot)"]),
    ("eval_nondet_prob.json", ["eval", "--effect", "nondet_prob", "por(top, or(top,bot))"]),
    ("single_valued_scheduler.json", ["single-valued", "--effect", "nondet_prob",
                                      "por(or(x0,x1),or(x0,x2))", "or(x0,por(x1,x2))"]),
]


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("golden, argv", EXAMPLES)
def test_goldens(golden, argv):
    code, out, _ = run(argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")
    assert run(argv)[1] == out  # stable across runs


def test_golden_contents():
    leq = json.loads((GOLDEN / "leq_nondet.json").read_text())
    assert leq["result"] == "holds"
    ev = json.loads((GOLDEN / "eval_nondet_prob.json").read_text())
    assert ev["values"]["value"] == ["1/2^1", "1/2^0"]
    sv = json.loads((GOLDEN / "single_valued_scheduler.json").read_text())
    assert sv["result"] == "refuted" and sv["values"]["table_holds"]
    assert len(sv["values"]["table"]) == 8
    assert sv["witness"] == {"x0": ["1/2^1", "1/2^1"], "x1": ["0/2^0", "0/2^0"],
                             "x2": ["1/2^0", "1/2^0"]}
    assert sv["values"]["full"] == [["1/2^2", "3/2^2"], ["1/2^1", "1/2^1"]]


def test_schema_keys():
    _, out, _ = run(["leq", "--effect", "nondet", "top", "or(top,bot)"])
    rep = json.loads(out)
    assert list(rep) == ["command", "effect", "params", "result", "witness", "values", "timings"]
    assert rep["values"] == ["top", "diamond"] and rep["timings"] == {}


def test_timings_flag():
    _, out, _ = run(["leq", "--effect", "nondet", "top", "top", "--timings"])
    assert "wall_ms" in json.loads(out)["timings"]


@pytest.mark.parametrize("argv", [
    ["leq", "--effect", "nondet", "or(top)", "bot"],
    ["leq", "bot", "top"],
    ["frobnicate"],
    ["eval", "--effect", "nondet", "top", "--plot", "x.png"],
    ["eval", "--effect", "prob", "x0", "--assign", "x0=2"],
    ["quotient", "--effect", "nondet_prob", "--depth", "1"],
    ["check-proof", "/nonexistent/proof.json"],
    ["leq", "--effect", "store", "--store-size", "0", "bot", "top"],
])
def test_usage_errors(argv):
    code, out, err = run(argv)
    assert code == 1 and out == "" and err.startswith("effalg: error:")


def test_parse_error_has_position():
    _, _, err = run(["leq", "--effect", "nondet", "or(top,\n frob)", "bot"])
    assert "line 2" in err


def test_undecided_exit_codes():
    code, out, _ = run(["leq", "--effect", "nondet_prob", "x0", "or(x0,x0)"])
    assert code == 2 and json.loads(out)["resolution"] == 3
    code, out, _ = run(["eval", "--effect", "prob", "rec s. por(top,s)", "--depth", "10"])
    rep = json.loads(out)
    assert code == 2 and rep["result"] == "unconverged"
    assert rep["values"]["lower"] == "1023/2^10"


def test_eval_converges_and_plots(tmp_path):
    fig = tmp_path / "bounds.png"
    code, out, _ = run(["eval", "--effect", "prob", "rec s. por(top,s)", "--plot", str(fig)])
    rep = json.loads(out)
    assert code == 0 and rep["result"] == "converged"
    assert rep["values"] == {"lower": "1048575/2^20", "upper": "1/2^0", "depth": 20}
    assert fig.stat().st_size > 0 and rep["params"]["plot"] == str(fig)


def test_eval_assign_and_text():
    code, out, _ = run(["eval", "--effect", "nondet_prob", "por(x0, x1)",
                        "--assign", "x0=(0,1),x1=[1/2^1, 1]", "--format", "text"])
    assert code == 0
    assert 'values: {"value": ["1/2^2", "1/2^0"]}' in out


def test_store_assign():
    _, out, _ = run(["eval", "--effect", "store", "upd[1](x0)", "--assign", "x0=[1]"])
    assert json.loads(out)["values"]["value"] == [0, 1]


def test_distinguish():
    _, out, _ = run(["distinguish", "--effect", "exceptions", "raise[e1]", "raise[e2]"])
    rep = json.loads(out)
    assert rep["result"] == "distinguished" and rep["values"] == ["raise[e1]", "raise[e2]"]
    _, out, _ = run(["distinguish", "--effect", "nondet", "or(x0,x0)", "x0"])
    assert json.loads(out)["result"] == "equivalent"


def test_check_proof(tmp_path):
    code, out, _ = run(["check-proof", str(shipped("exception_collapse"))])
    assert code == 0 and json.loads(out)["result"] == "ok"
    bad = json.loads(shipped("nondet_absorb").read_text())
    bad["conclusion"]["rhs"] = "bot"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(["check-proof", str(path)])
    rep = json.loads(out)
    assert code == 0 and rep["result"] == "rejected" and "step" in rep["witness"]


def test_quotient_relator_involution_modal():
    _, out, _ = run(["quotient", "--effect", "nondet", "--depth", "3"])
    assert [c["canonical"] for c in json.loads(out)["values"]["classes"]] == \
        ["bot", "top", "or(bot, top)"]
    _, out, _ = run(["relator-laws", "--effect", "nondet"])
    assert json.loads(out)["result"] == "holds"
    _, out, _ = run(["involution", "--effect", "nondet", "--samples", "50"])
    assert json.loads(out)["witness"]["tree"] == "rec s. or(s, s)"
    code, out, _ = run(["modal-leq", "--effect", "nondet", "top", "or(top,bot)"])
    assert code == 0 and json.loads(out)["result"] == "refuted"
