import contextlib
import io
import json

import pytest

from pckfo.cli import main
from pckfo.evaluator import satisfies
from pckfo.model import validate
from pckfo.parser import load_model, parse_formula


def run(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, out.getvalue()


@pytest.fixture()
def chain(fixtures_dir):
    return str(fixtures_dir / "models" / "chain3.json")


@pytest.fixture()
def tiny(fixtures_dir):
    return str(fixtures_dir / "models" / "tiny.json")


class TestEval:
    def test_always_probable(self, tiny):
        code, out = run("eval", "--model", tiny, "--formula", "P[a]>=0 p")
        assert code == 0
        assert "verdict: sat" in out

    def test_common_knowledge_fails_at_chain_head(self, chain):
        code, out = run("eval", "--model", chain, "--formula", "C{G} p",
                        "--state", "s0")
        assert code == 1
        assert "unsat-at-state" in out

    def test_per_state_rows(self, chain):
        code, out = run("eval", "--model", chain, "--formula", "p")
        assert code == 1  # false at the last chain state
        assert out.count("state=") == 3

    def test_unknown_state_is_usage_error(self, chain):
        code, _ = run("eval", "--model", chain, "--formula", "p",
                      "--state", "zz")
        assert code == 2

    def test_free_variable_needs_valuation(self, fixtures_dir):
        model = str(fixtures_dir / "models" / "functions.json")
        code, _ = run("eval", "--model", model, "--formula", "R(x)")
        assert code == 2
        code, out = run("eval", "--model", model, "--formula", "R(x)",
                        "--valuation", "x=d1", "--state", "s0")
        assert code == 0

    def test_parse_error_exit(self, tiny):
        code, _ = run("eval", "--model", tiny, "--formula", "p &")
        assert code == 3

    def test_not_measurable_exit(self, tmp_path, tiny):
        doc = json.loads(open(tiny).read())
        doc["states"] = ["s0", "s1"]
        doc["relations"] = [{"symbol": "p", "arity": 0,
                             "table": {"s0": [[]], "s1": []}}]
        doc["prob"] = {"a": {"s0": {"sample": ["s0", "s1"],
                                    "atoms": [["s0", "s1"]],
                                    "weights": {"0": "1"}}}}
        path = tmp_path / "coarse.json"
        path.write_text(json.dumps(doc))
        code, _ = run("eval", "--model", str(path),
                      "--formula", "P[a]>=1/2 p", "--state", "s0")
        assert code == 5


class TestValidateClassify:
    def test_validate_ok(self, tiny):
        code, out = run("validate", "--model", tiny)
        assert code == 0 and "verdict: ok" in out

    def test_validate_broken_weights(self, tmp_path, tiny):
        doc = json.loads(open(tiny).read())
        doc["prob"]["a"]["s0"]["weights"] = {"0": "3/4"}
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(doc))
        code, out = run("validate", "--model", str(path))
        assert code == 4
        assert "not normalized" in out

    def test_classify_con_model(self, fixtures_dir):
        code, out = run("classify", "--model",
                        str(fixtures_dir / "models" / "con.json"))
        assert code == 0
        assert "CON" in out

    def test_classify_noncon(self, fixtures_dir):
        code, out = run("classify", "--model",
                        str(fixtures_dir / "models" / "noncon.json"), "--json")
        assert code == 0
        flags = json.loads(out)["details"][0]["flags"]
        assert "CON" not in flags


class TestCheckProof:
    def test_shipped_artifacts(self, fixtures_dir):
        proofs = fixtures_dir / "proofs"
        code, out = run("check-proof", "--proof",
                        str(proofs / "k_distribution.json"))
        assert code == 0 and "verdict: accepted" in out
        code, out = run("check-proof", "--proof",
                        str(proofs / "group_pair.json"))
        assert code == 0
        code, out = run("check-proof", "--proof",
                        str(proofs / "fixed_point.json"))
        assert code == 6
        assert "accepted-with-bounded-certificates" in out

    def test_rp_rejected_in_con_mode(self, tmp_path):
        doc = {
            "hypotheses": [],
            "steps": [
                {"formula": "p -> p", "just": {"kind": "axiom", "name": "Prop"}},
                {"formula": "P[a]>=1 (p -> p)",
                 "just": {"kind": "RP", "premise": 0, "agent": "a"}},
            ],
        }
        path = tmp_path / "rp.json"
        path.write_text(json.dumps(doc))
        assert run("check-proof", "--proof", str(path))[0] == 0
        code, out = run("check-proof", "--proof", str(path), "--mode", "con")
        assert code == 1 and "rejected" in out


class TestFindFuzzDemo:
    def test_find_writes_replayable_witness(self, tmp_path):
        out_path = tmp_path / "witness.json"
        code, _ = run("find", "--formula", "p & !K[a] p",
                      "--budget-states", "2", "--grid", "1",
                      "--out", str(out_path))
        assert code == 0
        m = load_model(json.loads(out_path.read_text()))
        assert validate(m).passed
        assert any(satisfies(m, s, parse_formula("p & !K[a] p"))
                   for s in m.states)

    def test_find_miss_exit(self):
        code, out = run("find", "--formula", "p & !p",
                        "--budget-states", "1", "--grid", "1")
        assert code == 1
        assert "not-found-within-budget" in out

    def test_fuzz_deterministic_output(self):
        args = ("fuzz", "--n", "40", "--seed", "7", "--budget-states", "2",
                "--atom-mode", "singleton", "--json")
        code1, out1 = run(*args)
        code2, out2 = run(*args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_fuzz_class_restricted(self):
        code, out = run("fuzz", "--n", "30", "--class", "CON",
                        "--class-models", "10", "--budget-states", "2",
                        "--atom-mode", "singleton")
        assert code == 0

    def test_demo_noncompactness(self, tmp_path):
        code, out = run("demo", "noncompactness", "--m", "2",
                        "--out", str(tmp_path / "wit"))
        assert code == 0
        written = sorted((tmp_path / "wit").glob("*.json"))
        assert written
        for path in written:
            assert validate(load_model(json.loads(path.read_text()))).passed

    def test_demo_invalid_distribution(self):
        code, out = run("demo", "validity", "--family", "invalid-distribution")
        assert code == 0
        assert "counterexample found" in out

    def test_usage_errors(self):
        assert run("eval", "--formula", "p")[0] == 2      # missing --model
        assert run("demo", "validity", "--family", "zzz")[0] == 2

    def test_eval_on_invalid_model_exits_4(self, tmp_path, tiny):
        doc = json.loads(open(tiny).read())
        doc["prob"]["a"]["s0"]["weights"] = {"0": "1/2"}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, out = run("eval", "--model", str(path), "--formula", "p")
        assert code == 4
        assert "not normalized" in out
