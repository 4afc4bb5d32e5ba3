import json
from fractions import Fraction

import pytest

from pckfo.errors import ParseError, SchemaError
from pckfo.parser import (
    load_model, model_to_json, parse_formula, parse_model, parse_proof,
    parse_term, print_formula,
)
from pckfo.syntax import (
    And, App, Atom, CommonKnows, CommonProb, EveryoneKnows, EveryoneProb,
    Knows, Not, ProbAtLeast, Var, exists, implies, knows_prob, top,
)


class TestParseFormula:
    def test_group_operators_example(self):
        got = parse_formula("E{G}(!K[i] phi -> C{G} psi)")
        want = EveryoneKnows(("G",), implies(
            Not(Knows("i", Atom("phi"))), CommonKnows(("G",), Atom("psi"))))
        assert got == want

    def test_single_probability_operator(self):
        assert parse_formula("P[i]>=0 phi") == \
            ProbAtLeast("i", Fraction(0), Atom("phi"))

    def test_probabilistic_group_example(self):
        got = parse_formula("Es{G,1/2}(K[i] exists x phi(x) & !Cs{G,1/3} psi)")
        want = EveryoneProb(("G",), Fraction(1, 2), And(
            Knows("i", exists("x", Atom("phi", (Var("x"),)))),
            Not(CommonProb(("G",), Fraction(1, 3), Atom("psi")))))
        assert got == want

    def test_knows_prob_sugar(self):
        assert parse_formula("Ks[i,1/4] p") == \
            parse_formula("K[i] P[i]>=1/4 p")

    def test_decimal_rational_exact(self):
        f = parse_formula("P[i]>=0.25 p")
        assert f.bound == Fraction(1, 4)

    def test_precedence(self):
        assert parse_formula("!p & q") == And(Not(Atom("p")), Atom("q"))
        assert parse_formula("K[i] p & q") == And(Knows("i", Atom("p")), Atom("q"))
        assert parse_formula("p -> q -> r") == \
            implies(Atom("p"), implies(Atom("q"), Atom("r")))

    def test_terms(self):
        assert parse_term("f(c,x)") == App("f", (App("c"), Var("x")))

    @pytest.mark.parametrize("bad", [
        "P[i]>=5/4 p",      # rational outside [0, 1]
        "P[i]>=1/0 p",      # zero denominator
        "E{} p",            # empty group
        "Es{G} p",          # missing threshold
        "E{G,1/2} p",       # threshold on plain group operator
        "p &",              # dangling connective
        "forall P p",       # non-variable binder
        "x",                # variable in formula position
        "x(y)",             # variable applied as function
        "(p & q",           # unbalanced parenthesis
        "p # q",            # stray character
    ])
    def test_errors_carry_spans(self, bad):
        with pytest.raises(ParseError) as err:
            parse_formula(bad)
        start, end = err.value.span
        assert 0 <= start <= end <= len(bad) + 1


class TestPrintFormula:
    def test_probability(self):
        assert print_formula(ProbAtLeast("i", Fraction(0), Atom("phi"))) == \
            "P[i]>=0 phi"

    def test_knows_prob(self):
        f = knows_prob("i", Fraction(1, 4), Atom("phi"))
        assert print_formula(f) == "K[i] P[i]>=1/4 phi"

    def test_top_prints_expanded(self):
        assert print_formula(top()) == "!(ff & !ff)"
        assert parse_formula(print_formula(top())) == top()

    def test_round_trip_golden_corpus(self, golden_dir):
        lines = (golden_dir / "formulas.txt").read_text().splitlines()
        assert len(lines) == 100
        for line in lines:
            f = parse_formula(line)
            assert parse_formula(print_formula(f)) == f, line

    def test_round_trip_generated(self):
        import random

        from pckfo.oracle import random_formula
        rng = random.Random("parser-roundtrip")
        for _ in range(300):
            f = random_formula(rng, ("a", "b"), depth=4, vars_allowed=("x", "y"))
            assert parse_formula(print_formula(f)) == f


class TestModelDocuments:
    def test_minimal_model(self, fixtures_dir):
        m = parse_model((fixtures_dir / "models" / "tiny.json").read_text())
        assert m.states == ("s0",)
        assert m.domain == ("d0",)
        assert m.prob[("a", "s0")].weights == (Fraction(1),)

    def test_sample_outside_states_rejected(self, fixtures_dir):
        doc = json.loads((fixtures_dir / "models" / "tiny.json").read_text())
        doc["prob"]["a"]["s0"]["sample"] = ["s0", "szz"]
        doc["prob"]["a"]["s0"]["atoms"] = [["s0"], ["szz"]]
        doc["prob"]["a"]["s0"]["weights"] = {"0": "1/2", "1": "1/2"}
        with pytest.raises(SchemaError, match="subset of the states"):
            parse_model(json.dumps(doc))

    def test_per_state_function_tables_rejected(self, fixtures_dir):
        # Function interpretations are state-independent; a document keying a
        # function table by states does not even fit the schema.
        doc = json.loads((fixtures_dir / "models" / "tiny.json").read_text())
        doc["functions"] = [{"symbol": "f", "arity": 1,
                             "table": {"s0": [{"args": ["d0"], "value": "d0"}]}}]
        with pytest.raises(SchemaError):
            parse_model(json.dumps(doc))

    def test_order_insensitive(self, fixtures_dir):
        text = (fixtures_dir / "models" / "functions.json").read_text()
        doc = json.loads(text)
        doc["states"] = list(reversed(doc["states"]))
        doc["domain"] = list(reversed(doc["domain"]))
        assert parse_model(json.dumps(doc)) == parse_model(text)

    def test_canonical_serialization(self, fixtures_dir):
        for path in sorted((fixtures_dir / "models").glob("*.json")):
            text = path.read_text()
            assert model_to_json(parse_model(text)) == text

    def test_default_spaces_and_atoms(self):
        doc = {"states": ["s0", "s1"], "domain": ["d0"], "agents": ["a"],
               "prob": {"a": {"s0": {"sample": ["s0", "s1"],
                                     "weights": {"0": "1/3", "1": "2/3"}}}}}
        m = load_model(doc)
        # omitted atoms default to singletons over the sample
        assert m.prob[("a", "s0")].atoms == (frozenset(["s0"]), frozenset(["s1"]))
        # omitted spaces default to the one-point space at that state
        assert m.prob[("a", "s1")].sample == frozenset(["s1"])


class TestProofDocuments:
    def test_two_step_necessitation(self):
        doc = {
            "hypotheses": [],
            "steps": [
                {"formula": "p -> p", "just": {"kind": "axiom", "name": "Prop"}},
                {"formula": "K[i](p -> p)",
                 "just": {"kind": "RK", "premise": 0, "agent": "i"}},
            ],
        }
        proof = parse_proof(json.dumps(doc))
        assert len(proof.steps) == 2

    def test_forward_reference_rejected(self):
        doc = {
            "hypotheses": [],
            "steps": [
                {"formula": "K[i](p -> p)",
                 "just": {"kind": "RK", "premise": 1, "agent": "i"}},
                {"formula": "p -> p", "just": {"kind": "axiom", "name": "Prop"}},
            ],
        }
        with pytest.raises(SchemaError, match="earlier step"):
            parse_proof(json.dumps(doc))

    def test_group_rule_premise_per_member(self):
        # one RE premise per member of {a, b}, resolved to step indices
        top_text = "!(ff & !ff)"
        spec = {"k": 0, "thetas": [top_text], "guards": []}
        doc = {
            "hypotheses": ["K[a] p", "K[b] p"],
            "steps": [
                {"formula": f"!({top_text} & !K[a] p)",
                 "just": {"kind": "axiom", "name": "Prop"}},
                {"formula": f"!({top_text} & !K[b] p)",
                 "just": {"kind": "axiom", "name": "Prop"}},
                {"formula": f"!({top_text} & !E{{a,b}} p)",
                 "just": {"kind": "RE", "spec": spec,
                          "premises": {"a": 0, "b": 1}}},
            ],
        }
        proof = parse_proof(json.dumps(doc))
        assert dict(proof.steps[2].just.premises) == {"a": 0, "b": 1}

    def test_unknown_rule_name(self):
        doc = {"hypotheses": [],
               "steps": [{"formula": "p", "just": {"kind": "XX"}}]}
        with pytest.raises(SchemaError, match="unknown rule"):
            parse_proof(json.dumps(doc))

    def test_con_axiom_alias(self):
        doc = {"mode": "con", "hypotheses": [],
               "steps": [{"formula": "K[i] p -> P[i]>=1 p",
                          "just": {"kind": "CON-axiom"}}]}
        proof = parse_proof(json.dumps(doc))
        assert proof.steps[0].just.name == "CON"
