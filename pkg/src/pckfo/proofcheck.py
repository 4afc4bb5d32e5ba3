"""Finite proof objects and their verification.

A proof is a forward-referencing sequence of steps over a hypothesis list
(the theory).  Knowledge/probabilistic necessitation premises must be
theorems: each step carries a computed from-theory-only flag and the checker
enforces the restriction.  The rules with countably many premises are checked
against explicit bounded certificates and downgrade the verdict to
"accepted-with-bounded-certificates"; a bounded check is never reported as
full derivability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import axioms as ax
from .errors import ProofTransformError
from .report import ACCEPTED, ACCEPTED_BOUNDED, REJECTED, CheckReport
from .syntax import (
    And, CommonKnows, CommonProb, EveryoneKnows, EveryoneProb, Forall, Guard,
    GUARD_KNOWS, Knows, NestedImplicationSpec, Not, ProbAtLeast, implies,
    is_sentence, iterate_everyone, knows_prob, nested_implication, peel_nested,
    prob_common_stage, top,
)

MODE_PLAIN = "plain"
MODE_CON = "con"


# ---------------------------------------------------------------------------
# justifications


@dataclass(frozen=True)
class AxiomJust:
    name: str
    params: tuple = ()  # optional ((key, value), ...) cross-check


@dataclass(frozen=True)
class HypJust:
    index: int


@dataclass(frozen=True)
class MPJust:
    premise: int      # step proving phi
    implication: int  # step proving phi -> psi


@dataclass(frozen=True)
class FORJust:
    premise: int
    var: str


@dataclass(frozen=True)
class RKJust:
    premise: int
    agent: str


@dataclass(frozen=True)
class RPJust:
    premise: int
    agent: str


@dataclass(frozen=True)
class REJust:
    spec: NestedImplicationSpec
    premises: tuple  # ((agent, step), ...) one per group member


@dataclass(frozen=True)
class RPEJust:
    spec: NestedImplicationSpec
    bound: Fraction
    premises: tuple


@dataclass(frozen=True)
class Certificate:
    """Finite stand-in for an infinite premise family: steps for the indices
    up to a declared bound."""

    bound: int
    premises: tuple  # ((index, step), ...)


@dataclass(frozen=True)
class RCJust:
    spec: NestedImplicationSpec
    certificate: Certificate


@dataclass(frozen=True)
class RPCJust:
    spec: NestedImplicationSpec
    bound: Fraction
    certificate: Certificate


@dataclass(frozen=True)
class RAJust:
    spec: NestedImplicationSpec
    agent: str
    bound: Fraction
    certificate: Certificate


BOUNDED_RULES = (RCJust, RPCJust, RAJust)


@dataclass(frozen=True)
class Step:
    formula: "object"
    just: "object"


@dataclass(frozen=True)
class Proof:
    hypotheses: tuple
    steps: tuple
    mode: str = MODE_PLAIN

    @property
    def conclusion(self):
        return self.steps[-1].formula if self.steps else None


# ---------------------------------------------------------------------------
# checking


def check(proof: Proof) -> CheckReport:
    """Verify every step; deterministic and total.

    The returned report's details carry one entry per failing step plus the
    computed theorem flags; artifacts stay empty.
    """
    rep = CheckReport(ACCEPTED)
    if proof.mode not in (MODE_PLAIN, MODE_CON):
        rep.verdict = REJECTED
        rep.add(step=None, problem=f"unknown mode {proof.mode!r}")
        return rep

    axiom_names = ax.CON_AXIOMS if proof.mode == MODE_CON else ax.PLAIN_AXIOMS
    for hx, h in enumerate(proof.hypotheses):
        if not is_sentence(h):
            rep.add(step=None, problem=f"hypothesis {hx} is not a sentence")

    flags = []
    bounded = []

    for ix, step in enumerate(proof.steps):
        problem, flag = _check_step(proof, ix, step, flags, axiom_names)
        if problem is not None:
            rep.add(step=ix, problem=problem)
            flag = False
        if isinstance(step.just, BOUNDED_RULES):
            bounded.append((ix, step.just.certificate.bound))
        flags.append(flag)

    if not proof.steps:
        rep.add(step=None, problem="proof has no steps")

    if any("problem" in d for d in rep.details):
        rep.verdict = REJECTED
    elif bounded:
        rep.verdict = ACCEPTED_BOUNDED
        rep.add(note="bounded certificates stand in for infinite premise "
                     "families; this is not full derivability",
                bounds=[b for (_, b) in bounded])
    rep.add(theorem_steps=flags)
    return rep


def theorem_flags(proof: Proof) -> list:
    """from-theory-only flag per step (True iff no hypothesis is used)."""
    flags = []
    for ix, step in enumerate(proof.steps):
        _, flag = _check_step(proof, ix, step, flags, ax.ALL_AXIOMS)
        flags.append(flag)
    return flags


def _refs(just) -> list:
    if isinstance(just, MPJust):
        return [just.premise, just.implication]
    if isinstance(just, (FORJust, RKJust, RPJust)):
        return [just.premise]
    if isinstance(just, (REJust, RPEJust)):
        return [s for (_, s) in just.premises]
    if isinstance(just, BOUNDED_RULES):
        return [s for (_, s) in just.certificate.premises]
    return []


def _check_step(proof, ix, step, flags, axiom_names):
    """Returns (problem or None, theorem_flag)."""
    f = step.formula
    just = step.just

    for ref in _refs(just):
        if not (0 <= ref < ix):
            return (f"reference to step {ref} is not an earlier step", False)

    if isinstance(just, AxiomJust):
        if just.name not in axiom_names:
            return (f"axiom {just.name!r} not available in mode "
                    f"{proof.mode!r}", False)
        matches = ax.match_axiom(f, names=(just.name,))
        if not matches:
            return (f"formula is not an instance of {just.name}", False)
        if just.params:
            want = dict(just.params)
            try:
                built = ax.instantiate(just.name, want)
            except Exception as exc:  # side condition or missing key
                return (f"axiom parameters rejected: {exc}", False)
            if built != f:
                return ("axiom parameters do not produce this formula", False)
        return (None, True)

    if isinstance(just, HypJust):
        if not (0 <= just.index < len(proof.hypotheses)):
            return (f"hypothesis index {just.index} out of range", False)
        if proof.hypotheses[just.index] != f:
            return ("formula differs from the cited hypothesis", False)
        return (None, False)

    if isinstance(just, MPJust):
        a = proof.steps[just.premise].formula
        imp = proof.steps[just.implication].formula
        if imp != implies(a, f):
            return ("implication step is not 'premise -> this formula'", False)
        return (None, flags[just.premise] and flags[just.implication])

    if isinstance(just, FORJust):
        body = proof.steps[just.premise].formula
        if f != Forall(just.var, body):
            return ("formula is not the universal closure of the premise"
                    " over the cited variable", False)
        return (None, flags[just.premise])

    if isinstance(just, RKJust):
        body = proof.steps[just.premise].formula
        if not flags[just.premise]:
            return ("premise of knowledge necessitation is not a theorem", False)
        if f != Knows(just.agent, body):
            return ("formula is not the knowledge-wrapped premise", False)
        return (None, True)

    if isinstance(just, RPJust):
        if proof.mode == MODE_CON:
            return ("probabilistic necessitation is not a rule of the"
                    " consistency-condition system", False)
        body = proof.steps[just.premise].formula
        if not flags[just.premise]:
            return ("premise of probabilistic necessitation is not a theorem",
                    False)
        if f != ProbAtLeast(just.agent, Fraction(1), body):
            return ("formula is not the probability-one-wrapped premise", False)
        return (None, True)

    if isinstance(just, REJust):
        tau = peel_nested(just.spec, f)
        if tau is None or not isinstance(tau, EveryoneKnows):
            return ("conclusion does not have the nested-implication shape"
                    " around a group-knowledge formula", False)
        return _check_group_rule(
            proof, just, tau.group, flags,
            lambda i: nested_implication(just.spec, Knows(i, tau.body)))

    if isinstance(just, RPEJust):
        tau = peel_nested(just.spec, f)
        if tau is None or not isinstance(tau, EveryoneProb):
            return ("conclusion does not have the nested-implication shape"
                    " around a group-probability formula", False)
        if tau.bound != just.bound:
            return ("cited threshold differs from the conclusion's", False)
        return _check_group_rule(
            proof, just, tau.group, flags,
            lambda i: nested_implication(just.spec, knows_prob(i, tau.bound, tau.body)))

    if isinstance(just, RCJust):
        tau = peel_nested(just.spec, f)
        if tau is None or not isinstance(tau, CommonKnows):
            return ("conclusion does not have the nested-implication shape"
                    " around a common-knowledge formula", False)
        return _check_certificate(
            proof, just.certificate, flags, start=1,
            expect=lambda m: nested_implication(
                just.spec, iterate_everyone(tau.group, m, tau.body)))

    if isinstance(just, RPCJust):
        tau = peel_nested(just.spec, f)
        if tau is None or not isinstance(tau, CommonProb):
            return ("conclusion does not have the nested-implication shape"
                    " around a probabilistic-common-knowledge formula", False)
        if tau.bound != just.bound:
            return ("cited threshold differs from the conclusion's", False)
        return _check_certificate(
            proof, just.certificate, flags, start=1,
            expect=lambda m: nested_implication(
                just.spec, prob_common_stage(tau.group, tau.bound, m, tau.body)))

    if isinstance(just, RAJust):
        tau = peel_nested(just.spec, f)
        if tau is None or not isinstance(tau, ProbAtLeast):
            return ("conclusion does not have the nested-implication shape"
                    " around a probability formula", False)
        if tau.agent != just.agent or tau.bound != just.bound:
            return ("cited agent/threshold differ from the conclusion's", False)
        r = tau.bound
        if r == 0:
            return ("the Archimedean rule requires a strictly positive"
                    " threshold", False)
        start = math.ceil(1 / r)
        return _check_certificate(
            proof, just.certificate, flags, start=start,
            expect=lambda m: nested_implication(
                just.spec, ProbAtLeast(tau.agent, r - Fraction(1, m), tau.body)))

    return (f"unknown justification {type(just).__name__}", False)


def _check_group_rule(proof, just, group, flags, expect):
    given = dict(just.premises)
    if set(given) != set(group):
        missing = sorted(set(group) - set(given))
        extra = sorted(set(given) - set(group))
        return (f"premise map must cover the group exactly"
                f" (missing {missing}, extra {extra})", False)
    for agent in group:
        got = proof.steps[given[agent]].formula
        if got != expect(agent):
            return (f"premise for member {agent!r} is not the required"
                    " nested implication", False)
    return (None, all(flags[s] for s in given.values()))


def _check_certificate(proof, cert, flags, start, expect):
    if cert.bound < start:
        return (f"certificate bound {cert.bound} is below the first premise"
                f" index {start}", False)
    given = dict(cert.premises)
    want = set(range(start, cert.bound + 1))
    if set(given) != want:
        return (f"certificate must cover indices {start}..{cert.bound}"
                " exactly", False)
    for m in sorted(want):
        got = proof.steps[given[m]].formula
        if got != expect(m):
            return (f"certificate premise for index {m} has the wrong"
                    " formula", False)
    return (None, all(flags[s] for s in given.values()))


# ---------------------------------------------------------------------------
# proof construction helper


class ProofBuilder:
    """Append-only builder used by the transformations and shipped proofs."""

    def __init__(self, hypotheses=(), mode=MODE_PLAIN):
        self.hypotheses = tuple(hypotheses)
        self.steps = []
        self.mode = mode

    def add(self, formula, just) -> int:
        self.steps.append(Step(formula, just))
        return len(self.steps) - 1

    def hyp(self, index) -> int:
        return self.add(self.hypotheses[index], HypJust(index))

    def axiom(self, name, params) -> int:
        return self.add(ax.instantiate(name, params), AxiomJust(name))

    def prop(self, formula) -> int:
        """Add a propositional-tautology axiom step (verified here)."""
        return self.add(ax.instantiate(ax.PROP, {"formula": formula}),
                        AxiomJust(ax.PROP))

    def mp(self, premise: int, implication: int) -> int:
        imp = self.steps[implication].formula
        body = imp.body.right.body  # consequent of the implication expansion
        return self.add(body, MPJust(premise, implication))

    def imp_chain(self, a: int, b_formula) -> int:
        """From step a proving phi, derive phi-weakening b -> a? No: derive
        (b_formula -> step_a)."""
        fa = self.steps[a].formula
        taut = self.prop(implies(fa, implies(b_formula, fa)))
        return self.mp(a, taut)

    def build(self) -> Proof:
        return Proof(self.hypotheses, tuple(self.steps), self.mode)


# ---------------------------------------------------------------------------
# the deduction-theorem transformation


def _ensure_accepted(proof: Proof) -> list:
    rep = check(proof)
    if not rep.passed:
        raise ProofTransformError(f"input proof rejected: {rep.details}")
    return theorem_flags(proof)


def _fresh_guarded_spec(spec: NestedImplicationSpec, extra) -> NestedImplicationSpec:
    """Replace the outermost theta with (extra AND theta_k)."""
    thetas = spec.thetas[:-1] + (And(extra, spec.thetas[-1]),)
    return NestedImplicationSpec(spec.k, thetas, spec.guards)


class _SubtreeCopier:
    """Copies hypothesis-free justification subtrees verbatim into a builder."""

    def __init__(self, proof, out):
        self.proof = proof
        self.out = out
        self.done = {}

    def copy(self, ix: int) -> int:
        hit = self.done.get(ix)
        if hit is not None:
            return hit
        step = self.proof.steps[ix]
        for ref in _refs(step.just):
            self.copy(ref)
        just = _remap_just(step.just, self.done)
        new = self.out.add(step.formula, just)
        self.done[ix] = new
        return new


def _remap_just(just, mapping):
    if isinstance(just, MPJust):
        return MPJust(mapping[just.premise], mapping[just.implication])
    if isinstance(just, FORJust):
        return FORJust(mapping[just.premise], just.var)
    if isinstance(just, RKJust):
        return RKJust(mapping[just.premise], just.agent)
    if isinstance(just, RPJust):
        return RPJust(mapping[just.premise], just.agent)
    if isinstance(just, REJust):
        return REJust(just.spec, tuple((a, mapping[s]) for a, s in just.premises))
    if isinstance(just, RPEJust):
        return RPEJust(just.spec, just.bound,
                       tuple((a, mapping[s]) for a, s in just.premises))
    if isinstance(just, RCJust):
        return RCJust(just.spec, _remap_cert(just.certificate, mapping))
    if isinstance(just, RPCJust):
        return RPCJust(just.spec, just.bound, _remap_cert(just.certificate, mapping))
    if isinstance(just, RAJust):
        return RAJust(just.spec, just.agent, just.bound,
                      _remap_cert(just.certificate, mapping))
    return just  # axioms and hypotheses carry no references


def _remap_cert(cert, mapping):
    return Certificate(cert.bound, tuple((m, mapping[s]) for m, s in cert.premises))


def deduction_transform(proof: Proof, phi) -> Proof:
    """Turn a proof of psi from T ∪ {phi} into a proof of phi -> psi from T.

    Nested-implication rule steps are rebuilt with (phi AND theta_k) as the
    outermost antecedent; necessitation steps copy their hypothesis-free
    subtrees verbatim.
    """
    flags = _ensure_accepted(proof)
    if phi not in proof.hypotheses:
        raise ProofTransformError("phi is not among the hypotheses")
    if not is_sentence(phi):
        raise ProofTransformError("phi must be a sentence")

    new_hyps = tuple(h for h in proof.hypotheses if h != phi)
    hyp_map = {}
    for old_ix, h in enumerate(proof.hypotheses):
        if h != phi:
            hyp_map[old_ix] = new_hyps.index(h)

    out = ProofBuilder(new_hyps, proof.mode)
    copier = _SubtreeCopier(proof, out)
    done = {}  # old index -> new index proving (phi -> old formula)

    def weaken_over_phi(new_ix) -> int:
        """From a step proving g, derive phi -> g."""
        return out.imp_chain(new_ix, phi)

    for ix, step in enumerate(proof.steps):
        f, just = step.formula, step.just

        if isinstance(just, AxiomJust):
            done[ix] = weaken_over_phi(out.add(f, just))
            continue

        if isinstance(just, HypJust):
            if f == phi:
                done[ix] = out.prop(implies(phi, phi))
            else:
                done[ix] = weaken_over_phi(out.hyp(hyp_map[just.index]))
            continue

        if isinstance(just, MPJust):
            a = proof.steps[just.premise].formula
            taut = out.prop(implies(
                implies(phi, a),
                implies(implies(phi, implies(a, f)), implies(phi, f))))
            half = out.mp(done[just.premise], taut)
            done[ix] = out.mp(done[just.implication], half)
            continue

        if isinstance(just, FORJust):
            body = proof.steps[just.premise].formula
            closed = out.add(Forall(just.var, implies(phi, body)),
                             FORJust(done[just.premise], just.var))
            dist = out.axiom(ax.FO1, {"x": just.var, "phi": phi, "psi": body})
            done[ix] = out.mp(closed, dist)
            continue

        if isinstance(just, (RKJust, RPJust)):
            # The premise is a theorem: replay its subtree, re-apply the rule,
            # then weaken over phi.
            base = copier.copy(just.premise)
            cls = RKJust if isinstance(just, RKJust) else RPJust
            wrapped = out.add(f, cls(base, just.agent))
            done[ix] = weaken_over_phi(wrapped)
            continue

        if isinstance(just, (REJust, RPEJust, RCJust, RPCJust, RAJust)):
            done[ix] = _deduction_nested(out, proof, ix, just, done, phi, flags)
            continue

        raise ProofTransformError(f"unsupported justification {just!r}")

    return out.build()


def _bridge_in(out, phi, spec, body) -> int:
    """phi -> Phi_spec(body) implies Phi_specbar(body); both directions are
    propositional over the tower's opaque head."""
    src = implies(phi, nested_implication(spec, body))
    dst = nested_implication(_fresh_guarded_spec(spec, phi), body)
    return out.prop(implies(src, dst))


def _bridge_out(out, phi, spec, body) -> int:
    src = nested_implication(_fresh_guarded_spec(spec, phi), body)
    dst = implies(phi, nested_implication(spec, body))
    return out.prop(implies(src, dst))


def _deduction_nested(out, proof, ix, just, done, phi, flags):
    spec = just.spec
    spec_bar = _fresh_guarded_spec(spec, phi)
    conclusion = proof.steps[ix].formula
    tau = peel_nested(spec, conclusion)

    def premise_in(body, old_step) -> int:
        bridged = _bridge_in(out, phi, spec, body)
        return out.mp(done[old_step], bridged)

    if isinstance(just, REJust):
        new_premises = tuple(
            (agent, premise_in(Knows(agent, tau.body), s))
            for agent, s in just.premises)
        new_just = REJust(spec_bar, new_premises)
    elif isinstance(just, RPEJust):
        new_premises = tuple(
            (agent, premise_in(knows_prob(agent, tau.bound, tau.body), s))
            for agent, s in just.premises)
        new_just = RPEJust(spec_bar, just.bound, new_premises)
    elif isinstance(just, RCJust):
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_in(iterate_everyone(tau.group, m, tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RCJust(spec_bar, cert)
    elif isinstance(just, RPCJust):
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_in(prob_common_stage(tau.group, tau.bound, m, tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RPCJust(spec_bar, just.bound, cert)
    else:
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_in(ProbAtLeast(tau.agent, tau.bound - Fraction(1, m),
                                       tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RAJust(spec_bar, just.agent, just.bound, cert)

    rebuilt = out.add(nested_implication(spec_bar, tau), new_just)
    back = _bridge_out(out, phi, spec, tau)
    return out.mp(rebuilt, back)


# ---------------------------------------------------------------------------
# strong necessitation


def k_distribution(out: ProofBuilder, agent, a, b) -> int:
    """Derive K_i(a -> b) -> (K_i a -> K_i b) from the distribution axiom."""
    akx = out.axiom(ax.AK, {"i": agent, "phi": a, "psi": b})
    shuffle = out.prop(implies(
        out.steps[akx].formula,
        implies(Knows(agent, implies(a, b)),
                implies(Knows(agent, a), Knows(agent, b)))))
    return out.mp(akx, shuffle)


def strong_necessitation_transform(proof: Proof, agent: str) -> Proof:
    """Turn a proof of psi from T into a proof of K_i psi from K_i T."""
    _ensure_accepted(proof)

    new_hyps = tuple(Knows(agent, h) for h in proof.hypotheses)
    out = ProofBuilder(new_hyps, proof.mode)
    copier = _SubtreeCopier(proof, out)
    done = {}  # old index -> new index proving K_agent(old formula)

    for ix, step in enumerate(proof.steps):
        f, just = step.formula, step.just

        if isinstance(just, AxiomJust):
            base = out.add(f, just)
            done[ix] = out.add(Knows(agent, f), RKJust(base, agent))
            continue

        if isinstance(just, HypJust):
            done[ix] = out.hyp(just.index)
            continue

        if isinstance(just, MPJust):
            a = proof.steps[just.premise].formula
            dist = k_distribution(out, agent, a, f)
            half = out.mp(done[just.implication], dist)
            done[ix] = out.mp(done[just.premise], half)
            continue

        if isinstance(just, FORJust):
            body = proof.steps[just.premise].formula
            closed = out.add(Forall(just.var, Knows(agent, body)),
                             FORJust(done[just.premise], just.var))
            barcan = out.axiom(ax.FO3, {"x": just.var, "i": agent, "phi": body})
            done[ix] = out.mp(closed, barcan)
            continue

        if isinstance(just, (RKJust, RPJust)):
            base = copier.copy(just.premise)
            cls = RKJust if isinstance(just, RKJust) else RPJust
            inner = out.add(f, cls(base, just.agent))
            done[ix] = out.add(Knows(agent, f), RKJust(inner, agent))
            continue

        if isinstance(just, (REJust, RPEJust, RCJust, RPCJust, RAJust)):
            done[ix] = _necessitation_nested(out, proof, ix, just, done, agent)
            continue

        raise ProofTransformError(f"unsupported justification {just!r}")

    return out.build()


def _extended_spec(spec: NestedImplicationSpec, agent) -> NestedImplicationSpec:
    return NestedImplicationSpec(
        spec.k + 1,
        spec.thetas + (top(),),
        spec.guards + (Guard(GUARD_KNOWS, agent),))


def _necessitation_nested(out, proof, ix, just, done, agent):
    spec = just.spec
    spec_ext = _extended_spec(spec, agent)
    conclusion = proof.steps[ix].formula
    tau = peel_nested(spec, conclusion)

    def premise_ext(body, old_step) -> int:
        # K_i Phi(body)  propositionally yields  top -> K_i Phi(body),
        # which is Phi_ext(body).
        src = Knows(agent, nested_implication(spec, body))
        taut = out.prop(implies(src, nested_implication(spec_ext, body)))
        return out.mp(done[old_step], taut)

    if isinstance(just, REJust):
        new_premises = tuple(
            (a, premise_ext(Knows(a, tau.body), s)) for a, s in just.premises)
        new_just = REJust(spec_ext, new_premises)
    elif isinstance(just, RPEJust):
        new_premises = tuple(
            (a, premise_ext(knows_prob(a, tau.bound, tau.body), s))
            for a, s in just.premises)
        new_just = RPEJust(spec_ext, just.bound, new_premises)
    elif isinstance(just, RCJust):
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_ext(iterate_everyone(tau.group, m, tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RCJust(spec_ext, cert)
    elif isinstance(just, RPCJust):
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_ext(prob_common_stage(tau.group, tau.bound, m, tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RPCJust(spec_ext, just.bound, cert)
    else:
        cert = Certificate(just.certificate.bound, tuple(
            (m, premise_ext(ProbAtLeast(tau.agent, tau.bound - Fraction(1, m),
                                        tau.body), s))
            for m, s in just.certificate.premises))
        new_just = RAJust(spec_ext, just.agent, just.bound, cert)

    rebuilt = out.add(nested_implication(spec_ext, tau), new_just)
    peel = out.prop(implies(nested_implication(spec_ext, tau),
                            Knows(agent, nested_implication(spec, tau))))
    return out.mp(rebuilt, peel)
