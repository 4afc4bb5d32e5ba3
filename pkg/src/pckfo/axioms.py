"""Axiom schemata: instantiation, recognition and the tautology decision.

Schema matching is purely syntactic over core formulas.  A formula can
instantiate several schemata at once; match_axiom reports every (name,
parameters) pair whose instantiation is structurally equal to the input, with
all side conditions verified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PckfoError, SideConditionError
from . import syntax as syn
from .syntax import (
    And, Atom, CommonKnows, CommonProb, EveryoneKnows, EveryoneProb, Forall,
    Knows, Not, ProbAtLeast, Var, free_vars, implies, is_free_for,
    iterate_everyone, prob_common_stage, prob_le, prob_lt, split_implies,
    substitute, top,
)

PROP = "Prop"
FO1 = "FO1"
FO2 = "FO2"
FO3 = "FO3"
AK = "AK"
AE = "AE"
AC = "AC"
P1 = "P1"
P2 = "P2"
P3 = "P3"
P4 = "P4"
P5 = "P5"
APE = "APE"
APC = "APC"
CON = "CON"
OBJ = "OBJ"
SDP_A = "SDP-A"
UNIF_A = "UNIF-A"

#: Axioms of the base system.
PLAIN_AXIOMS = (PROP, FO1, FO2, FO3, AK, AE, AC, P1, P2, P3, P4, P5, APE, APC)
#: Axioms of the consistency-condition system (probabilistic necessitation
#: becomes derivable and is dropped as a rule; see proofcheck).
CON_AXIOMS = PLAIN_AXIOMS + (CON,)
#: Class axioms matched only on request, for the class-relative suites.
CLASS_AXIOMS = (CON, OBJ, SDP_A, UNIF_A)
ALL_AXIOMS = PLAIN_AXIOMS + CLASS_AXIOMS

_TAUT_ATOM_CAP = 18


@dataclass
class AxiomInstance:
    name: str
    formula: "syn.Formula"
    params: dict = field(default_factory=dict)


def tautology_check(f) -> bool:
    """Is f a boolean tautology over its maximal non-boolean subformulas?

    Subformulas whose head is not negation/conjunction are treated as opaque
    atoms (identified up to structural equality) and a truth table decides.
    """
    atoms: dict = {}
    skel = _skeleton(f, atoms)
    n = len(atoms)
    if n > _TAUT_ATOM_CAP:
        raise PckfoError(
            f"tautology check over {n} opaque atoms exceeds the cap of "
            f"{_TAUT_ATOM_CAP}")
    for bits in range(1 << n):
        if not _eval_skeleton(skel, bits):
            return False
    return True


def _skeleton(f, atoms: dict):
    if isinstance(f, Not):
        return ("not", _skeleton(f.body, atoms))
    if isinstance(f, And):
        return ("and", _skeleton(f.left, atoms), _skeleton(f.right, atoms))
    ix = atoms.setdefault(f, len(atoms))
    return ("atom", ix)


def _eval_skeleton(node, bits) -> bool:
    tag = node[0]
    if tag == "atom":
        return bool(bits >> node[1] & 1)
    if tag == "not":
        return not _eval_skeleton(node[1], bits)
    return _eval_skeleton(node[1], bits) and _eval_skeleton(node[2], bits)


# ---------------------------------------------------------------------------
# instantiation


def instantiate(name: str, params: dict):
    """Build the schema instance; raises SideConditionError on bad parameters."""
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise SideConditionError(f"unknown axiom name {name!r}") from None
    return build(params)


def _rat(params, key) -> Fraction:
    v = Fraction(params[key])
    if v < 0 or v > 1:
        raise SideConditionError(f"{key}={v} outside [0, 1]")
    return v


def _build_prop(p):
    f = p["formula"]
    if not tautology_check(f):
        raise SideConditionError("formula is not a propositional tautology")
    return f


def _build_fo1(p):
    x, phi, psi = p["x"], p["phi"], p["psi"]
    if x in free_vars(phi):
        raise SideConditionError(f"variable {x!r} must not be free in the antecedent")
    return implies(Forall(x, implies(phi, psi)), implies(phi, Forall(x, psi)))


def _build_fo2(p):
    x, phi, term = p["x"], p["phi"], p["term"]
    if not is_free_for(term, x, phi):
        raise SideConditionError(f"term {term!r} is not free for {x!r}")
    return implies(Forall(x, phi), substitute(phi, x, term))


def _build_fo3(p):
    x, i, phi = p["x"], p["i"], p["phi"]
    return implies(Forall(x, Knows(i, phi)), Knows(i, Forall(x, phi)))


def _build_ak(p):
    i, phi, psi = p["i"], p["phi"], p["psi"]
    return implies(And(Knows(i, phi), Knows(i, implies(phi, psi))), Knows(i, psi))


def _build_ae(p):
    g, i, phi = tuple(p["group"]), p["i"], p["phi"]
    if i not in syn.EveryoneKnows(g, phi).group:
        raise SideConditionError(f"agent {i!r} not in the group")
    return implies(EveryoneKnows(g, phi), Knows(i, phi))


def _build_ac(p):
    g, m, phi = tuple(p["group"]), int(p["m"]), p["phi"]
    if m < 1:
        raise SideConditionError("iteration depth m must be at least 1")
    return implies(CommonKnows(g, phi), iterate_everyone(g, m, phi))


def _build_p1(p):
    return ProbAtLeast(p["i"], Fraction(0), p["phi"])


def _build_p2(p):
    i, phi = p["i"], p["phi"]
    r, t = _rat(p, "r"), _rat(p, "t")
    if not t > r:
        raise SideConditionError(f"need t > r, got t={t}, r={r}")
    return implies(prob_le(i, r, phi), prob_lt(i, t, phi))


def _build_p3(p):
    i, phi, t = p["i"], p["phi"], _rat(p, "t")
    return implies(prob_lt(i, t, phi), prob_le(i, t, phi))


def _build_p4(p):
    i, phi, psi = p["i"], p["phi"], p["psi"]
    r, t = _rat(p, "r"), _rat(p, "t")
    return implies(
        And(And(ProbAtLeast(i, r, phi), ProbAtLeast(i, t, psi)),
            ProbAtLeast(i, Fraction(1), Not(And(phi, psi)))),
        ProbAtLeast(i, min(Fraction(1), r + t), syn.disj(phi, psi)))


def _build_p5(p):
    i, phi, psi = p["i"], p["phi"], p["psi"]
    r, t = _rat(p, "r"), _rat(p, "t")
    if r + t > 1:
        raise SideConditionError(f"need r + t <= 1, got {r} + {t}")
    return implies(
        And(prob_le(i, r, phi), prob_lt(i, t, psi)),
        prob_lt(i, r + t, syn.disj(phi, psi)))


def _build_ape(p):
    g, i, phi, r = tuple(p["group"]), p["i"], p["phi"], _rat(p, "r")
    if i not in syn.EveryoneProb(g, r, phi).group:
        raise SideConditionError(f"agent {i!r} not in the group")
    return implies(EveryoneProb(g, r, phi), syn.knows_prob(i, r, phi))


def _build_apc(p):
    g, phi, r, m = tuple(p["group"]), p["phi"], _rat(p, "r"), int(p["m"])
    if m < 0:
        raise SideConditionError("stage index m must be a natural number")
    return implies(CommonProb(g, r, phi), prob_common_stage(g, r, m, phi))


def _build_con(p):
    i, phi = p["i"], p["phi"]
    return implies(Knows(i, phi), ProbAtLeast(i, Fraction(1), phi))


def _build_obj(p):
    i, j, phi, r = p["i"], p["j"], p["phi"], _rat(p, "r")
    return implies(ProbAtLeast(i, r, phi), ProbAtLeast(j, r, phi))


def _build_sdp(p):
    i, phi, r = p["i"], p["phi"], _rat(p, "r")
    return implies(ProbAtLeast(i, r, phi), Knows(i, ProbAtLeast(i, r, phi)))


def _build_unif(p):
    i, phi, r = p["i"], p["phi"], _rat(p, "r")
    return implies(ProbAtLeast(i, r, phi),
                   ProbAtLeast(i, Fraction(1), ProbAtLeast(i, r, phi)))


_BUILDERS = {
    PROP: _build_prop, FO1: _build_fo1, FO2: _build_fo2, FO3: _build_fo3,
    AK: _build_ak, AE: _build_ae, AC: _build_ac,
    P1: _build_p1, P2: _build_p2, P3: _build_p3, P4: _build_p4, P5: _build_p5,
    APE: _build_ape, APC: _build_apc,
    CON: _build_con, OBJ: _build_obj, SDP_A: _build_sdp, UNIF_A: _build_unif,
}


# ---------------------------------------------------------------------------
# matching


def match_axiom(f, names=ALL_AXIOMS) -> list:
    """Every axiom instance (among `names`) structurally equal to f."""
    out = []
    for name in names:
        out.extend(_MATCHERS[name](f))
    return out


def _subterms(f):
    """Distinct terms occurring in a formula (including nested subterms)."""
    seen = []
    stack = []
    for g in syn.subformulas(f):
        if isinstance(g, Atom):
            stack.extend(g.args)
    while stack:
        t = stack.pop()
        if t not in seen:
            seen.append(t)
            if isinstance(t, syn.App):
                stack.extend(t.args)
    return seen


def _dest_prob_le(f):
    """Recover (agent, r, phi) from the expansion of 'probability at most r'."""
    if isinstance(f, ProbAtLeast) and isinstance(f.body, Not):
        return (f.agent, 1 - f.bound, f.body.body)
    return None


def _dest_prob_lt(f):
    if isinstance(f, Not) and isinstance(f.body, ProbAtLeast):
        return (f.body.agent, f.body.bound, f.body.body)
    return None


def _dest_disj(f):
    if isinstance(f, Not) and isinstance(f.body, And) \
            and isinstance(f.body.left, Not) and isinstance(f.body.right, Not):
        return (f.body.left.body, f.body.right.body)
    return None


def _match_prop(f):
    try:
        ok = tautology_check(f)
    except PckfoError:
        return []
    return [AxiomInstance(PROP, f, {"formula": f})] if ok else []


def _match_fo1(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], Forall):
        return []
    ante, cons = pair
    inner = split_implies(ante.body)
    outer = split_implies(cons)
    if not inner or not outer:
        return []
    phi, psi = inner
    if (outer[0] == phi and isinstance(outer[1], Forall)
            and outer[1].var == ante.var and outer[1].body == psi
            and ante.var not in free_vars(phi)):
        return [AxiomInstance(FO1, f, {"x": ante.var, "phi": phi, "psi": psi})]
    return []


def _match_fo2(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], Forall):
        return []
    quant, rhs = pair
    x, phi = quant.var, quant.body
    if x not in free_vars(phi):
        # Any term instantiates trivially; report the canonical identity one.
        if phi == rhs:
            return [AxiomInstance(FO2, f, {"x": x, "phi": phi, "term": Var(x)})]
        return []
    out = []
    for t in _subterms(rhs) + [Var(x)]:
        if is_free_for(t, x, phi) and substitute(phi, x, t) == rhs:
            inst = AxiomInstance(FO2, f, {"x": x, "phi": phi, "term": t})
            if all(prev.params != inst.params for prev in out):
                out.append(inst)
    return out


def _match_fo3(f):
    pair = split_implies(f)
    if not pair:
        return []
    ante, cons = pair
    if (isinstance(ante, Forall) and isinstance(ante.body, Knows)
            and isinstance(cons, Knows) and isinstance(cons.body, Forall)
            and cons.agent == ante.body.agent and cons.body.var == ante.var
            and cons.body.body == ante.body.body):
        return [AxiomInstance(FO3, f, {
            "x": ante.var, "i": cons.agent, "phi": ante.body.body})]
    return []


def _match_ak(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], And) or not isinstance(pair[1], Knows):
        return []
    conj, cons = pair
    if not (isinstance(conj.left, Knows) and isinstance(conj.right, Knows)):
        return []
    i = cons.agent
    if conj.left.agent != i or conj.right.agent != i:
        return []
    phi, psi = conj.left.body, cons.body
    if conj.right.body == implies(phi, psi):
        return [AxiomInstance(AK, f, {"i": i, "phi": phi, "psi": psi})]
    return []


def _match_ae(f):
    pair = split_implies(f)
    if not pair:
        return []
    ante, cons = pair
    if (isinstance(ante, EveryoneKnows) and isinstance(cons, Knows)
            and cons.body == ante.body and cons.agent in ante.group):
        return [AxiomInstance(AE, f, {
            "group": ante.group, "i": cons.agent, "phi": ante.body})]
    return []


def _match_ac(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], CommonKnows):
        return []
    ante, cons = pair
    g, phi = ante.group, ante.body
    out = []
    m, cur = 0, cons
    while isinstance(cur, EveryoneKnows) and cur.group == g:
        m += 1
        cur = cur.body
        if cur == phi:
            out.append(AxiomInstance(AC, f, {"group": g, "m": m, "phi": phi}))
    return out


def _match_p1(f):
    if isinstance(f, ProbAtLeast) and f.bound == 0:
        return [AxiomInstance(P1, f, {"i": f.agent, "phi": f.body})]
    return []


def _match_p2(f):
    pair = split_implies(f)
    if not pair:
        return []
    le = _dest_prob_le(pair[0])
    lt = _dest_prob_lt(pair[1])
    if le and lt and le[0] == lt[0] and le[2] == lt[2] and lt[1] > le[1]:
        return [AxiomInstance(P2, f, {
            "i": le[0], "r": le[1], "t": lt[1], "phi": le[2]})]
    return []


def _match_p3(f):
    pair = split_implies(f)
    if not pair:
        return []
    lt = _dest_prob_lt(pair[0])
    le = _dest_prob_le(pair[1])
    if lt and le and lt[0] == le[0] and lt[1] == le[1] and lt[2] == le[2]:
        return [AxiomInstance(P3, f, {"i": lt[0], "t": lt[1], "phi": lt[2]})]
    return []


def _match_p4(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], And) or not isinstance(pair[0].left, And):
        return []
    first, second = pair[0].left.left, pair[0].left.right
    third, cons = pair[0].right, pair[1]
    dis = _dest_disj(cons.body) if isinstance(cons, ProbAtLeast) else None
    if not (isinstance(first, ProbAtLeast) and isinstance(second, ProbAtLeast)
            and isinstance(third, ProbAtLeast) and dis):
        return []
    i, r, phi = first.agent, first.bound, first.body
    t, psi = second.bound, second.body
    if (second.agent == i and third.agent == i and cons.agent == i
            and third.bound == 1 and third.body == Not(And(phi, psi))
            and dis == (phi, psi)
            and cons.bound == min(Fraction(1), r + t)):
        return [AxiomInstance(P4, f, {
            "i": i, "r": r, "t": t, "phi": phi, "psi": psi})]
    return []


def _match_p5(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], And):
        return []
    le = _dest_prob_le(pair[0].left)
    lt = _dest_prob_lt(pair[0].right)
    cl = _dest_prob_lt(pair[1])
    if not (le and lt and cl):
        return []
    i, r, phi = le
    if lt[0] != i or cl[0] != i:
        return []
    t, psi = lt[1], lt[2]
    dis = _dest_disj(cl[2])
    if dis == (phi, psi) and cl[1] == r + t and r + t <= 1:
        return [AxiomInstance(P5, f, {
            "i": i, "r": r, "t": t, "phi": phi, "psi": psi})]
    return []


def _match_ape(f):
    pair = split_implies(f)
    if not pair:
        return []
    ante, cons = pair
    if (isinstance(ante, EveryoneProb) and isinstance(cons, Knows)
            and isinstance(cons.body, ProbAtLeast)
            and cons.body.agent == cons.agent
            and cons.agent in ante.group
            and cons.body.bound == ante.bound
            and cons.body.body == ante.body):
        return [AxiomInstance(APE, f, {
            "group": ante.group, "i": cons.agent, "r": ante.bound,
            "phi": ante.body})]
    return []


def _match_apc(f):
    pair = split_implies(f)
    if not pair or not isinstance(pair[0], CommonProb):
        return []
    ante, cons = pair
    g, r, phi = ante.group, ante.bound, ante.body
    out = []
    if cons == top():
        out.append(AxiomInstance(APC, f, {"group": g, "r": r, "m": 0, "phi": phi}))
    m, cur = 0, cons
    while (isinstance(cur, EveryoneProb) and cur.group == g and cur.bound == r
           and isinstance(cur.body, And) and cur.body.left == phi):
        m += 1
        cur = cur.body.right
        if cur == top():
            out.append(AxiomInstance(APC, f, {"group": g, "r": r, "m": m, "phi": phi}))
            break
    return out


def _match_con(f):
    pair = split_implies(f)
    if not pair:
        return []
    ante, cons = pair
    if (isinstance(ante, Knows) and isinstance(cons, ProbAtLeast)
            and cons.agent == ante.agent and cons.bound == 1
            and cons.body == ante.body):
        return [AxiomInstance(CON, f, {"i": ante.agent, "phi": ante.body})]
    return []


def _match_obj(f):
    pair = split_implies(f)
    if not pair:
        return []
    a, b = pair
    if (isinstance(a, ProbAtLeast) and isinstance(b, ProbAtLeast)
            and a.bound == b.bound and a.body == b.body):
        return [AxiomInstance(OBJ, f, {
            "i": a.agent, "j": b.agent, "r": a.bound, "phi": a.body})]
    return []


def _match_sdp(f):
    pair = split_implies(f)
    if not pair:
        return []
    a, b = pair
    if (isinstance(a, ProbAtLeast) and isinstance(b, Knows)
            and b.agent == a.agent and b.body == a):
        return [AxiomInstance(SDP_A, f, {"i": a.agent, "r": a.bound, "phi": a.body})]
    return []


def _match_unif(f):
    pair = split_implies(f)
    if not pair:
        return []
    a, b = pair
    if (isinstance(a, ProbAtLeast) and isinstance(b, ProbAtLeast)
            and b.agent == a.agent and b.bound == 1 and b.body == a):
        return [AxiomInstance(UNIF_A, f, {"i": a.agent, "r": a.bound, "phi": a.body})]
    return []


_MATCHERS = {
    PROP: _match_prop, FO1: _match_fo1, FO2: _match_fo2, FO3: _match_fo3,
    AK: _match_ak, AE: _match_ae, AC: _match_ac,
    P1: _match_p1, P2: _match_p2, P3: _match_p3, P4: _match_p4, P5: _match_p5,
    APE: _match_ape, APC: _match_apc,
    CON: _match_con, OBJ: _match_obj, SDP_A: _match_sdp, UNIF_A: _match_unif,
}
