"""Brute-force ground truth at desk scale.

Exhaustive model enumeration over a small budget, seeded random generation,
satisfiability search, soundness fuzzing of the axiom schemata, the
non-compactness demonstrations and the derived-theorem validity suites.
Nothing here is a decision procedure: a search that ends without a witness
reports not-found-within-budget, never unsatisfiability.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from fractions import Fraction

from . import axioms as ax
from .errors import BudgetError, EvalError, NonSentenceError, NotMeasurable
from .evaluator import Evaluator, satisfies
from .model import Model, ProbSpace, classify, validate
from .parser import model_to_doc, print_formula
from .report import (
    CheckReport, NOT_FOUND, OK, REJECTED, SAT, VALID_IN_SUITE,
)
from .syntax import (
    And, App, Atom, CommonKnows, CommonProb, EveryoneKnows, EveryoneProb,
    Forall, Knows, Not, ProbAtLeast, Var, disj, free_vars, iff, implies,
    is_sentence, iterate_everyone, knows_prob, prob_eq, subformulas,
)

DEFAULT_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2),
                Fraction(2, 3), Fraction(3, 4), Fraction(1))

_AGENT_POOL = ("a", "b", "c", "d", "e", "f", "g", "h")


@dataclass(frozen=True)
class SearchBudget:
    """Shape of the model space to enumerate or sample.

    Enumeration ranges over 1..max_states states with exactly max_agents
    agents and max_domain domain elements; sample_mode/atom_mode restrict the
    probability spaces ("full" forces the sample to be the whole state set,
    "singleton"/"merged" fix the partition).  The cap is a hard error, not a
    truncation.
    """

    max_states: int = 2
    max_domain: int = 1
    max_agents: int = 1
    weight_grid: tuple = DEFAULT_GRID
    relation_symbols: tuple = (("p", 0), ("q", 0))
    seed: int = 0
    sample_mode: str = "any"   # "any" | "full"
    atom_mode: str = "any"     # "any" | "singleton" | "merged"
    max_models: int = 200_000

    def __post_init__(self):
        if self.max_states < 1 or self.max_domain < 1 or self.max_agents < 1:
            raise BudgetError("budget bounds must be at least 1")
        if self.max_agents > len(_AGENT_POOL):
            raise BudgetError(f"at most {len(_AGENT_POOL)} agents supported")
        if self.sample_mode not in ("any", "full"):
            raise BudgetError(f"unknown sample_mode {self.sample_mode!r}")
        if self.atom_mode not in ("any", "singleton", "merged"):
            raise BudgetError(f"unknown atom_mode {self.atom_mode!r}")
        grid = tuple(Fraction(w) for w in self.weight_grid)
        if any(w < 0 or w > 1 for w in grid):
            raise BudgetError("weight grid entries must lie in [0, 1]")
        object.__setattr__(self, "weight_grid", grid)

    @property
    def agents(self) -> tuple:
        return _AGENT_POOL[:self.max_agents]

    @property
    def domain(self) -> tuple:
        return tuple(f"d{i}" for i in range(self.max_domain))


def _set_partitions(items: list) -> list:
    """All partitions of items into nonempty blocks, deterministic order."""
    if not items:
        return [[]]
    head, rest = items[0], items[1:]
    out = []
    for part in _set_partitions(rest):
        for ix in range(len(part)):
            out.append(part[:ix] + [[head] + part[ix]] + part[ix + 1:])
        out.append([[head]] + part)
    return out


def _weight_rows(grid, k) -> list:
    """All grid^k tuples summing exactly to 1."""
    rows = []
    for combo in itertools.product(grid, repeat=k):
        if sum(combo) == 1:
            rows.append(combo)
    return rows


def _space_options(states, budget) -> list:
    """Every probability space over the given states allowed by the budget."""
    if budget.sample_mode == "full":
        samples = [tuple(states)]
    else:
        samples = []
        for size in range(1, len(states) + 1):
            samples.extend(itertools.combinations(states, size))
    out = []
    for sample in samples:
        if budget.atom_mode == "singleton":
            partitions = [[[s] for s in sample]]
        elif budget.atom_mode == "merged":
            partitions = [[list(sample)]]
        else:
            partitions = _set_partitions(list(sample))
        for part in partitions:
            atoms = tuple(frozenset(b) for b in part)
            for row in _weight_rows(budget.weight_grid, len(atoms)):
                out.append(ProbSpace(frozenset(sample), atoms, row))
    return out


def _relation_options(states, budget) -> list:
    """Per (symbol, state) lists of possible tuple sets."""
    slots = []
    for sym, arity in budget.relation_symbols:
        tuples = list(itertools.product(budget.domain, repeat=arity))
        subsets = []
        for size in range(len(tuples) + 1):
            subsets.extend(itertools.combinations(tuples, size))
        for state in states:
            slots.append((sym, state, [frozenset(s) for s in subsets]))
    return slots


def _access_options(states) -> list:
    pairs = list(itertools.product(states, states))
    out = []
    for size in range(len(pairs) + 1):
        out.extend(itertools.combinations(pairs, size))
    return [frozenset(s) for s in out]


def _assemble(budget, states, rel_choice, rel_slots, access_choice, spaces):
    relations = {}
    for (sym, arity) in budget.relation_symbols:
        relations[sym] = (arity, {})
    for (sym, state, _), chosen in zip(rel_slots, rel_choice):
        relations[sym][1][state] = chosen
    agents = budget.agents
    access = {agent: access_choice[ix] for ix, agent in enumerate(agents)}
    prob = {}
    ix = 0
    for agent in agents:
        for state in states:
            prob[(agent, state)] = spaces[ix]
            ix += 1
    return Model(
        states=tuple(states), domain=budget.domain, agents=agents,
        functions={}, relations=relations, access=access, prob=prob,
        groups={"G": tuple(agents)},
    )


def enumeration_size(budget: SearchBudget) -> int:
    total = 0
    for n in range(1, budget.max_states + 1):
        states = [f"s{i}" for i in range(n)]
        rel = 1
        for (_, _, options) in _relation_options(states, budget):
            rel *= len(options)
        spaces = len(_space_options(states, budget))
        acc = len(_access_options(states))
        total += rel * (acc ** budget.max_agents) * \
            (spaces ** (budget.max_agents * n))
    return total


def enumerate_models(budget: SearchBudget):
    """Deterministic stream of every valid model over the budget's shape."""
    size = enumeration_size(budget)
    if size > budget.max_models:
        raise BudgetError(
            f"enumeration space has {size} models, over the cap of"
            f" {budget.max_models}; shrink the budget")
    for n in range(1, budget.max_states + 1):
        states = [f"s{i}" for i in range(n)]
        rel_slots = _relation_options(states, budget)
        rel_lists = [options for (_, _, options) in rel_slots]
        access_opts = _access_options(states)
        space_opts = _space_options(states, budget)
        n_spaces = budget.max_agents * n
        for rel_choice in itertools.product(*rel_lists):
            for access_choice in itertools.product(
                    access_opts, repeat=budget.max_agents):
                for spaces in itertools.product(space_opts, repeat=n_spaces):
                    m = _assemble(budget, states, rel_choice, rel_slots,
                                  access_choice, spaces)
                    yield m


# ---------------------------------------------------------------------------
# random generation


def _rng_for(budget: SearchBudget, tag) -> random.Random:
    return random.Random(f"{budget.seed}:{tag}")


def random_model(budget: SearchBudget, rng: random.Random) -> Model:
    n = rng.randint(1, budget.max_states)
    states = [f"s{i}" for i in range(n)]
    relations = {}
    for sym, arity in budget.relation_symbols:
        tuples = list(itertools.product(budget.domain, repeat=arity))
        table = {}
        for state in states:
            table[state] = frozenset(t for t in tuples if rng.random() < 0.5)
        relations[sym] = (arity, table)
    access = {}
    for agent in budget.agents:
        pairs = [p for p in itertools.product(states, states)
                 if rng.random() < 0.5]
        access[agent] = frozenset(pairs)
    prob = {}
    for agent in budget.agents:
        for state in states:
            prob[(agent, state)] = _random_space(budget, rng, states)
    m = Model(states=tuple(states), domain=budget.domain, agents=budget.agents,
              functions={}, relations=relations, access=access, prob=prob,
              groups={"G": tuple(budget.agents)})
    assert validate(m).passed
    return m


def _random_space(budget, rng, states) -> ProbSpace:
    if budget.sample_mode == "full":
        sample = list(states)
    else:
        size = rng.randint(1, len(states))
        sample = rng.sample(sorted(states), size)
    if budget.atom_mode == "merged":
        part = [list(sample)]
    elif budget.atom_mode == "singleton":
        part = [[s] for s in sample]
    else:
        part = rng.choice(_set_partitions(sorted(sample)))
    rows = _weight_rows(budget.weight_grid, len(part))
    if not rows:
        # Grid cannot normalize this partition; a point mass always can.
        part = [list(sample)]
        rows = [(Fraction(1),)]
    return ProbSpace(frozenset(sample), tuple(frozenset(b) for b in part),
                     rng.choice(rows))


def random_models(budget: SearchBudget, count: int, tag="models") -> list:
    rng = _rng_for(budget, tag)
    return [random_model(budget, rng) for _ in range(count)]


def targeted_class_models(budget: SearchBudget, flag: str, count: int) -> list:
    """Random models guaranteed to carry the given class flag."""
    rng = _rng_for(budget, f"class:{flag}")
    out = []
    while len(out) < count:
        m = random_model(budget, rng)
        if flag == "CON":
            access = {
                agent: m.access[agent] | frozenset(
                    (s, t) for s in m.states
                    for t in m.space(agent, s).sample)
                for agent in m.agents}
            m = replace(m, access=access)
        elif flag == "OBJ":
            first = m.agents[0]
            prob = {(agent, s): m.prob[(first, s)]
                    for agent in m.agents for s in m.states}
            m = replace(m, prob=prob)
        elif flag in ("SDP", "UNIF"):
            prob = {}
            for agent in m.agents:
                shared = _random_space(budget, rng, m.states)
                for s in m.states:
                    prob[(agent, s)] = shared
            m = replace(m, prob=prob)
        else:
            raise BudgetError(f"unknown class flag {flag!r}")
        assert validate(m).passed and flag in classify(m)
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# satisfiability search


def _function_symbols(f) -> set:
    syms = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            stack = list(g.args)
            while stack:
                t = stack.pop()
                if isinstance(t, App):
                    syms.add(t.fn)
                    stack.extend(t.args)
    return syms


def find_model(f, budget: SearchBudget) -> CheckReport:
    """Search the budget's models for a state satisfying the sentence.

    A miss is reported as not-found-within-budget; the logic is not compact,
    so this is never an unsatisfiability claim.
    """
    if not is_sentence(f):
        raise NonSentenceError(
            f"free variables {sorted(free_vars(f))} in search formula")
    funcs = _function_symbols(f)
    if funcs:
        raise BudgetError(
            f"enumerated models interpret no function symbols; remove"
            f" {sorted(funcs)} or evaluate against a written model file")
    checked = 0
    for m in enumerate_models(budget):
        ev = Evaluator(m)
        checked += 1
        for s in m.states:
            try:
                hit = ev.satisfies(s, f)
            except NotMeasurable:
                continue
            except EvalError:
                break  # symbols beyond this model's signature
            if hit:
                rep = CheckReport(SAT)
                rep.add(formula=print_formula(f), state=s,
                        models_checked=checked)
                rep.artifacts["witness-model"] = model_to_doc(m)
                rep.artifacts["witness-state"] = s
                assert satisfies(m, s, f)
                return rep
    rep = CheckReport(NOT_FOUND)
    rep.add(formula=print_formula(f), models_checked=checked,
            note="not an unsatisfiability verdict: the search budget is"
                 " finite and the logic is not compact")
    return rep


# ---------------------------------------------------------------------------
# random formulas and axiom instances


def random_formula(rng, agents, depth=2, vars_allowed=()):
    """Small random formula over the default fuzz signature."""
    atoms = [Atom("p"), Atom("q")]
    for v in vars_allowed:
        atoms.append(Atom("R", (Var(v),)))
    if depth <= 0:
        return rng.choice(atoms)
    roll = rng.random()
    sub = lambda: random_formula(rng, agents, depth - 1, vars_allowed)
    if roll < 0.30:
        return rng.choice(atoms)
    if roll < 0.45:
        return Not(sub())
    if roll < 0.60:
        return And(sub(), sub())
    if roll < 0.70:
        return implies(sub(), sub())
    if roll < 0.80:
        return Knows(rng.choice(agents), sub())
    if roll < 0.90:
        return ProbAtLeast(rng.choice(agents),
                           rng.choice((Fraction(0), Fraction(1, 2), Fraction(1))),
                           sub())
    return EveryoneKnows(_random_group(rng, agents), sub())


def _random_group(rng, agents) -> tuple:
    size = rng.randint(1, len(agents))
    return tuple(sorted(rng.sample(list(agents), size)))


_TAUT_TEMPLATES = (
    lambda a, b: implies(a, a),
    lambda a, b: implies(a, implies(b, a)),
    lambda a, b: implies(And(a, b), a),
    lambda a, b: disj(a, Not(a)),
    lambda a, b: implies(Not(Not(a)), a),
    lambda a, b: iff(And(a, b), And(b, a)),
    lambda a, b: implies(And(a, implies(a, b)), b),
)

#: Schemata exercised by the default soundness fuzz.
FUZZ_AXIOMS = (ax.PROP, ax.FO1, ax.FO2, ax.FO3, ax.AK, ax.AE, ax.AC,
               ax.P1, ax.P2, ax.P3, ax.P4, ax.P5, ax.APE, ax.APC)


def random_axiom_instance(name, rng, agents, grid) -> ax.AxiomInstance:
    """A random instance of the named schema with side conditions satisfied."""
    agent = rng.choice(agents)
    group = _random_group(rng, agents)
    member = rng.choice(group)
    phi = random_formula(rng, agents)
    psi = random_formula(rng, agents)
    grid = [Fraction(g) for g in grid]

    if name == ax.PROP:
        template = rng.choice(_TAUT_TEMPLATES)
        formula = template(phi, psi)
        return ax.AxiomInstance(name, formula, {"formula": formula})
    if name == ax.FO1:
        open_psi = random_formula(rng, agents, vars_allowed=("x",))
        params = {"x": "x", "phi": phi, "psi": open_psi}
    elif name == ax.FO2:
        open_phi = random_formula(rng, agents, vars_allowed=("x",))
        term = Var(rng.choice(("x", "y")))
        from .syntax import is_free_for
        if not is_free_for(term, "x", open_phi):
            term = Var("x")
        params = {"x": "x", "phi": open_phi, "term": term}
    elif name == ax.FO3:
        open_phi = random_formula(rng, agents, vars_allowed=("x",))
        params = {"x": "x", "i": agent, "phi": open_phi}
    elif name == ax.AK:
        params = {"i": agent, "phi": phi, "psi": psi}
    elif name == ax.AE:
        params = {"group": group, "i": member, "phi": phi}
    elif name == ax.AC:
        params = {"group": group, "m": rng.randint(1, 3), "phi": phi}
    elif name == ax.P1:
        params = {"i": agent, "phi": phi}
    elif name == ax.P2:
        r, t = sorted(rng.sample(grid, 2))
        params = {"i": agent, "r": r, "t": t, "phi": phi}
    elif name == ax.P3:
        params = {"i": agent, "t": rng.choice(grid), "phi": phi}
    elif name == ax.P4:
        params = {"i": agent, "r": rng.choice(grid), "t": rng.choice(grid),
                  "phi": phi, "psi": psi}
    elif name == ax.P5:
        while True:
            r, t = rng.choice(grid), rng.choice(grid)
            if r + t <= 1:
                break
        params = {"i": agent, "r": r, "t": t, "phi": phi, "psi": psi}
    elif name == ax.APE:
        params = {"group": group, "i": member, "r": rng.choice(grid), "phi": phi}
    elif name == ax.APC:
        params = {"group": group, "r": rng.choice(grid),
                  "m": rng.randint(0, 3), "phi": phi}
    elif name == ax.CON:
        params = {"i": agent, "phi": phi}
    elif name == ax.OBJ:
        params = {"i": agent, "j": rng.choice(agents), "r": rng.choice(grid),
                  "phi": phi}
    elif name in (ax.SDP_A, ax.UNIF_A):
        params = {"i": agent, "r": rng.choice(grid), "phi": phi}
    else:
        raise BudgetError(f"no random generator for axiom {name!r}")
    return ax.AxiomInstance(name, ax.instantiate(name, params), params)


def holds_everywhere(m: Model, f, ev: Evaluator = None) -> bool:
    """True iff f holds at every state under every valuation of its free
    variables (over the model's domain)."""
    if ev is None:
        ev = Evaluator(m)
    fv = sorted(free_vars(f))
    if not fv:
        return ev.extension(f) == frozenset(m.states)
    for values in itertools.product(m.domain, repeat=len(fv)):
        valuation = dict(zip(fv, values))
        if ev.extension(f, valuation) != frozenset(m.states):
            return False
    return True


def fuzz_soundness(budget: SearchBudget, n: int, names=FUZZ_AXIOMS,
                   models=None) -> CheckReport:
    """n seeded random (schema, instance, model) triples; every instance must
    hold at every state of its model.  A failure would point at an evaluator
    or schema bug and ships a replayable counterexample."""
    if models is None:
        pool = list(itertools.islice(enumerate_models(
            replace(budget, max_models=10 ** 9)), 100))
        pool += random_models(budget, max(0, 200 - len(pool)), tag="fuzz-pool")
    else:
        pool = list(models)
    rep = CheckReport(VALID_IN_SUITE)
    failures = 0
    skipped = 0
    for ix in range(n):
        rng = _rng_for(budget, f"fuzz:{ix}")
        name = names[ix % len(names)]
        inst = random_axiom_instance(name, rng, budget.agents,
                                     budget.weight_grid)
        m = pool[ix % len(pool)]
        try:
            ok = holds_everywhere(m, inst.formula)
        except NotMeasurable:
            # Soundness is stated over measurable models; a coarse algebra
            # that cannot measure this instance's events is out of scope.
            skipped += 1
            continue
        if not ok:
            failures += 1
            rep.add(axiom=name, formula=print_formula(inst.formula),
                    problem="instance falsified")
            rep.artifacts[f"counterexample-{failures}"] = model_to_doc(m)
    rep.add(instances=n, models=len(pool), failures=failures,
            skipped_not_measurable=skipped, axioms=list(names))
    if failures:
        rep.verdict = REJECTED
    return rep


# ---------------------------------------------------------------------------
# non-compactness demonstrations


def chain_model(length: int) -> Model:
    """A one-agent chain s0 -> s1 -> ... with p true everywhere but the end."""
    states = tuple(f"s{i}" for i in range(length))
    access = {"a": frozenset((f"s{i}", f"s{i+1}") for i in range(length - 1))}
    relations = {"p": (0, {s: (frozenset([()]) if i < length - 1 else frozenset())
                           for i, s in enumerate(states)})}
    prob = {("a", s): ProbSpace(frozenset([s]), (frozenset([s]),), (Fraction(1),))
            for s in states}
    return Model(states=states, domain=("d0",), agents=("a",),
                 functions={}, relations=relations, access=access, prob=prob,
                 groups={"G": ("a",)})


def near_certain_model(n: int) -> Model:
    """Two states with p carrying weight exactly 1 - 1/n (0 when n == 1)."""
    w = Fraction(1) - Fraction(1, n)
    states = ("s0", "s1")
    relations = {"p": (0, {"s0": frozenset([()]), "s1": frozenset()})}
    space = ProbSpace(frozenset(states),
                      (frozenset(["s0"]), frozenset(["s1"])),
                      (w, 1 - w))
    prob = {("a", s): space for s in states}
    return Model(states=states, domain=("d0",), agents=("a",), functions={},
                 relations=relations, access={"a": frozenset()}, prob=prob,
                 groups={"G": ("a",)})


def noncompactness_demo(bound: int) -> CheckReport:
    """Finite fragments of the two classic unsatisfiable-set families, each
    fragment re-verified on an explicit witness.

    The full infinite sets are unsatisfiable (the demos only document this;
    no infinite check is claimed).
    """
    if bound > 4:
        raise BudgetError("demo bound capped at 4")
    rep = CheckReport(OK)
    group = ("a",)
    p = Atom("p")
    for m in range(1, bound + 1):
        model = chain_model(m + 2)
        ev = Evaluator(model)
        head = "s0"
        fragment = [iterate_everyone(group, k, p) for k in range(1, m + 1)]
        fragment.append(Not(CommonKnows(group, p)))
        ok = all(ev.satisfies(head, f) for f in fragment)
        rep.add(family="group-knowledge-degrees", m=m, state=head,
                formulas=[print_formula(f) for f in fragment],
                satisfied=ok)
        rep.artifacts[f"chain-{m}"] = model_to_doc(model)
        if not ok:
            rep.verdict = REJECTED
    for n in range(1, bound + 1):
        model = near_certain_model(n)
        ev = Evaluator(model)
        fragment = [ProbAtLeast("a", 1 - Fraction(1, k), p)
                    for k in range(1, n + 1)]
        fragment.append(Not(prob_eq("a", Fraction(1), p)))
        ok = all(ev.satisfies("s0", f) for f in fragment)
        rep.add(family="near-certainty", n=n, state="s0",
                formulas=[print_formula(f) for f in fragment],
                satisfied=ok)
        rep.artifacts[f"near-certain-{n}"] = model_to_doc(model)
        if not ok:
            rep.verdict = REJECTED
    rep.add(note="each finite fragment above is satisfiable; the full"
                 " infinite sets are unsatisfiable, which is documented"
                 " here, not machine-checked")
    return rep


# ---------------------------------------------------------------------------
# derived-theorem validity suites

VALIDITY_FAMILIES = ("epistemic-distribution", "fixed-point",
                     "finite-group-equivalence", "probabilistic-monotonicity")


def _family_formulas(family: str, agents) -> list:
    p, q = Atom("p"), Atom("q")
    pairs = [(p, q), (And(p, q), p)]
    groups = [agents[:1]]
    if len(agents) >= 2:
        groups.append(agents[:2])
    rates = (Fraction(0), Fraction(1, 2), Fraction(1))
    out = []

    if family == "epistemic-distribution":
        for phi, psi in pairs:
            for i in agents:
                out.append(("knowledge-distribution", implies(
                    Knows(i, implies(phi, psi)),
                    implies(Knows(i, phi), Knows(i, psi)))))
            for g in groups:
                out.append(("group-distribution", implies(
                    EveryoneKnows(g, implies(phi, psi)),
                    implies(EveryoneKnows(g, phi), EveryoneKnows(g, psi)))))
                out.append(("common-distribution", implies(
                    CommonKnows(g, implies(phi, psi)),
                    implies(CommonKnows(g, phi), CommonKnows(g, psi)))))
        for i in agents:
            out.append(("knowledge-conjunction", iff(
                Knows(i, And(p, q)), And(Knows(i, p), Knows(i, q)))))
        for g in groups:
            out.append(("group-conjunction", iff(
                EveryoneKnows(g, And(p, q)),
                And(EveryoneKnows(g, p), EveryoneKnows(g, q)))))
        return out

    if family == "fixed-point":
        for g in groups:
            for phi in (p, q, implies(p, q)):
                out.append(("fixed-point", implies(
                    CommonKnows(g, phi),
                    EveryoneKnows(g, And(phi, CommonKnows(g, phi))))))
        return out

    if family == "finite-group-equivalence":
        for g in groups:
            conj = Knows(g[0], p)
            for i in g[1:]:
                conj = And(conj, Knows(i, p))
            out.append(("group-equivalence", iff(EveryoneKnows(g, p), conj)))
            for r in rates:
                conj_r = knows_prob(g[0], r, p)
                for i in g[1:]:
                    conj_r = And(conj_r, knows_prob(i, r, p))
                out.append(("group-prob-equivalence",
                            iff(EveryoneProb(g, r, p), conj_r)))
        return out

    if family == "probabilistic-monotonicity":
        phi, psi = And(p, q), p  # phi -> psi is the tautology (p & q) -> p
        for r in rates:
            for i in agents:
                out.append(("knows-prob-monotone", implies(
                    knows_prob(i, r, phi), knows_prob(i, r, psi))))
            for g in groups:
                out.append(("group-prob-monotone", implies(
                    EveryoneProb(g, r, phi), EveryoneProb(g, r, psi))))
                out.append(("common-prob-monotone", implies(
                    CommonProb(g, r, phi), CommonProb(g, r, psi))))
        return out

    raise BudgetError(f"unknown validity family {family!r}")


def validity_suite(family: str, budget: SearchBudget, extra_models=(),
                   models=None) -> CheckReport:
    """Check every family instance at every state of every budget model.

    With `models` given, that pool replaces the budget enumeration (the
    budget still fixes the agents the instances mention).  Non-measurable
    (model, instance) pairs are counted and skipped: the derived laws are
    stated over measurable models only.
    """
    formulas = _family_formulas(family, budget.agents)
    rep = CheckReport(VALID_IN_SUITE)
    models_seen = 0
    failures = 0
    skipped = 0
    if models is None:
        pool = itertools.chain(enumerate_models(budget), extra_models)
    else:
        pool = itertools.chain(models, extra_models)
    for m in pool:
        models_seen += 1
        ev = Evaluator(m)
        for label, f in formulas:
            try:
                ok = holds_everywhere(m, f, ev)
            except NotMeasurable:
                skipped += 1
                continue
            if not ok:
                failures += 1
                rep.add(family=family, instance=label,
                        formula=print_formula(f), problem="falsified")
                rep.artifacts[f"counterexample-{failures}"] = model_to_doc(m)
    rep.add(family=family, instances=len(formulas), models=models_seen,
            failures=failures, skipped_not_measurable=skipped)
    if failures:
        rep.verdict = REJECTED
    return rep


def expected_invalid_counterexample(budget=None) -> CheckReport:
    """The group-probability distribution schema is NOT valid; find the
    counterexample.  Failing to find one within the default budget would mean
    the evaluator went trivial, so a miss is an error verdict."""
    if budget is None:
        budget = SearchBudget(
            max_states=3, max_domain=1, max_agents=1,
            weight_grid=(Fraction(1, 3),), sample_mode="full",
            atom_mode="singleton", max_models=50_000)
    g = budget.agents[:1]
    r = Fraction(1, 2)
    p, q = Atom("p"), Atom("q")
    schema = implies(
        EveryoneProb(g, r, implies(p, q)),
        implies(EveryoneProb(g, r, p), EveryoneProb(g, r, q)))
    rep = CheckReport(REJECTED)
    checked = 0
    for m in enumerate_models(budget):
        checked += 1
        ev = Evaluator(m)
        for s in m.states:
            try:
                if not ev.satisfies(s, schema):
                    rep.verdict = VALID_IN_SUITE
                    rep.add(expected_invalid=print_formula(schema),
                            state=s, models_checked=checked,
                            note="counterexample found, as required")
                    rep.artifacts["counterexample-model"] = model_to_doc(m)
                    rep.artifacts["counterexample-state"] = s
                    return rep
            except NotMeasurable:
                continue
    rep.add(expected_invalid=print_formula(schema), models_checked=checked,
            problem="no counterexample found within the default budget")
    return rep
