"""Graded alternating tree automata with hesitant structure.

Transition conditions are positive Boolean formulas over graded atoms
(dia k, q) / (box k, q) and, for two-way automata, parent atoms (up, q).
The partition is an ordered list of components, lowest first, so that
transitions from component i only name states in components j <= i.

Besides the structural checks (hesitant, polarised, linear) this module
holds dualisation, the very-precise-form normalisation of linear automata,
the linearisation of a component into an annotated word automaton, and the
three-valued visibility check on annotations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import (BadAutomaton, NotLinearHesitant, TransientComponent,
                     TransitionBlowup, TwoWayUnsupported, WrongKind)
from .ltl import alphabet_of

COMPONENT_TYPES = ("transient", "existential", "universal", "upward")

CLAUSE_CAP = 10_000


# ---------------------------------------------------------------------------
# transition formulas

class TransitionFormula:
    __slots__ = ()


@dataclass(frozen=True)
class TTrue(TransitionFormula):
    pass


@dataclass(frozen=True)
class TFalse(TransitionFormula):
    pass


@dataclass(frozen=True)
class TAtom(TransitionFormula):
    atom: tuple


@dataclass(frozen=True)
class TAnd(TransitionFormula):
    left: TransitionFormula
    right: TransitionFormula


@dataclass(frozen=True)
class TOr(TransitionFormula):
    left: TransitionFormula
    right: TransitionFormula


def dia(k: int, state: str) -> TransitionFormula:
    if k < 1:
        raise BadAutomaton("grades start at 1")
    return TAtom(("dia", k, state))


def box(k: int, state: str) -> TransitionFormula:
    if k < 1:
        raise BadAutomaton("grades start at 1")
    return TAtom(("box", k, state))


def up(state: str) -> TransitionFormula:
    return TAtom(("up", 0, state))


def tf_and(left, right):
    if isinstance(left, TFalse) or isinstance(right, TFalse):
        return TFalse()
    if isinstance(left, TTrue):
        return right
    if isinstance(right, TTrue):
        return left
    return TAnd(left, right)


def tf_or(left, right):
    if isinstance(left, TTrue) or isinstance(right, TTrue):
        return TTrue()
    if isinstance(left, TFalse):
        return right
    if isinstance(right, TFalse):
        return left
    return TOr(left, right)


def tf_and_all(items):
    out = TTrue()
    for item in items:
        out = tf_and(out, item)
    return out


def tf_or_all(items):
    out = TFalse()
    for item in items:
        out = tf_or(out, item)
    return out


def tf_atoms(tf) -> set:
    if isinstance(tf, TAtom):
        return {tf.atom}
    if isinstance(tf, (TAnd, TOr)):
        return tf_atoms(tf.left) | tf_atoms(tf.right)
    return set()


def dnf_clauses(tf) -> list:
    """Clauses of the disjunctive normal form as sorted atom frozensets."""
    out = _nf(tf, True)
    return sorted(out, key=lambda c: (len(c), sorted(c)))


def cnf_clauses(tf) -> list:
    out = _nf(tf, False)
    return sorted(out, key=lambda c: (len(c), sorted(c)))


def _nf(tf, disjunctive):
    unit, absorb = (TTrue, TFalse) if disjunctive else (TFalse, TTrue)
    gather, distribute = (TOr, TAnd) if disjunctive else (TAnd, TOr)
    if isinstance(tf, unit):
        return [frozenset()]
    if isinstance(tf, absorb):
        return []
    if isinstance(tf, TAtom):
        return [frozenset({tf.atom})]
    if isinstance(tf, gather):
        left = _nf(tf.left, disjunctive)
        right = _nf(tf.right, disjunctive)
        merged = list(dict.fromkeys(left + right))
        if len(merged) > CLAUSE_CAP:
            raise TransitionBlowup("normal form exceeds the clause cap")
        return merged
    if isinstance(tf, distribute):
        left = _nf(tf.left, disjunctive)
        right = _nf(tf.right, disjunctive)
        if len(left) * len(right) > CLAUSE_CAP:
            raise TransitionBlowup("normal form exceeds the clause cap")
        return list(dict.fromkeys(a | b for a in left for b in right))
    raise BadAutomaton(f"not a transition formula: {tf!r}")


def atom_to_obj(atom: tuple) -> dict:
    op, k, state = atom
    if op == "up":
        return {"op": "up", "state": state}
    return {"op": op, "k": k, "state": state}


def atom_from_obj(obj: dict) -> tuple:
    op = obj["op"]
    if op == "up":
        return ("up", 0, obj["state"])
    if op in ("dia", "box"):
        return (op, obj["k"], obj["state"])
    raise BadAutomaton(f"unknown atom op {op!r}")


def tf_to_obj(tf) -> dict:
    if isinstance(tf, TTrue):
        return {"op": "true"}
    if isinstance(tf, TFalse):
        return {"op": "false"}
    if isinstance(tf, TAtom):
        return atom_to_obj(tf.atom)
    op = "and" if isinstance(tf, TAnd) else "or"
    return {"op": op, "args": [tf_to_obj(tf.left), tf_to_obj(tf.right)]}


def tf_from_obj(obj) -> TransitionFormula:
    op = obj["op"]
    if op == "true":
        return TTrue()
    if op == "false":
        return TFalse()
    if op in ("dia", "box", "up"):
        return TAtom(atom_from_obj(obj))
    if op in ("and", "or"):
        args = [tf_from_obj(a) for a in obj["args"]]
        if len(args) != 2:
            raise BadAutomaton("and/or nodes are binary")
        return (TAnd if op == "and" else TOr)(*args)
    raise BadAutomaton(f"unknown formula op {op!r}")


# ---------------------------------------------------------------------------
# the automaton type


@dataclass(frozen=True)
class TreeAutomaton:
    states: tuple
    ap: frozenset
    two_way: bool
    init: str
    accepting: frozenset
    partition: tuple  # ordered lowest-first: ((states frozenset, type), ...)
    delta: dict  # (state, sigma frozenset, flag) -> TransitionFormula

    def flags(self) -> tuple:
        return ("root", "nonroot") if self.two_way else ("any",)

    def dval(self, state, sigma, at_root=False) -> TransitionFormula:
        flag = ("root" if at_root else "nonroot") if self.two_way else "any"
        return self.delta[(state, frozenset(sigma), flag)]

    def component_index(self, state) -> int:
        for i, (comp, _) in enumerate(self.partition):
            if state in comp:
                return i
        raise BadAutomaton(f"state {state!r} not in the partition")

    def component_type(self, state) -> str:
        return self.partition[self.component_index(state)][1]


def make_tree_automaton(states, ap, two_way, init, accepting, partition, delta) -> TreeAutomaton:
    """Build and validate an automaton.  Missing delta entries default to
    false, matching the usual 'bot otherwise' convention of examples."""
    ap = frozenset(ap)
    states = tuple(states)
    flags = ("root", "nonroot") if two_way else ("any",)
    norm = {}
    for key, tf in delta.items():
        if len(key) == 2:
            q, sigma = key
            flag = "any" if not two_way else None
            if flag is None:
                raise BadAutomaton("two-way automata need a root flag in delta keys")
        else:
            q, sigma, flag = key
        norm[(q, frozenset(sigma), flag)] = tf
    for q in states:
        for sigma in alphabet_of(ap):
            for flag in flags:
                norm.setdefault((q, sigma, flag), TFalse())
    auto = TreeAutomaton(
        states=states,
        ap=ap,
        two_way=two_way,
        init=init,
        accepting=frozenset(accepting),
        partition=tuple((frozenset(s), t) for s, t in partition),
        delta=norm,
    )
    validate_tree_automaton(auto)
    return auto


def validate_tree_automaton(auto: TreeAutomaton) -> None:
    states = set(auto.states)
    if len(states) != len(auto.states):
        raise BadAutomaton("duplicate states")
    if auto.init not in states:
        raise BadAutomaton("initial state unknown")
    if not auto.accepting <= states:
        raise BadAutomaton("accepting set mentions unknown states")
    covered = set()
    for comp, ctype in auto.partition:
        if ctype not in COMPONENT_TYPES:
            raise BadAutomaton(f"unknown component type {ctype!r}")
        if ctype == "upward" and not auto.two_way:
            raise BadAutomaton("upward components need a two-way automaton")
        if comp & covered:
            raise BadAutomaton("partition components overlap")
        covered |= comp
    if covered != states:
        raise BadAutomaton("partition must cover exactly the states")
    expected = {(q, sigma, flag) for q in auto.states
                for sigma in alphabet_of(auto.ap) for flag in auto.flags()}
    if set(auto.delta) != expected:
        raise BadAutomaton("delta must cover exactly states x alphabet x flags")
    for (q, sigma, flag), tf in auto.delta.items():
        for op, k, s in tf_atoms(tf):
            if s not in states:
                raise BadAutomaton(f"transition of {q!r} names unknown state {s!r}")
            if op == "up" and not auto.two_way:
                raise BadAutomaton("up atoms need a two-way automaton")
            if op in ("dia", "box") and k < 1:
                raise BadAutomaton("grades start at 1")


# ---------------------------------------------------------------------------
# structural checks


@dataclass(frozen=True)
class HesitantReport:
    ok: bool
    component_types: tuple
    violations: tuple


def validate_hesitant(auto: TreeAutomaton) -> HesitantReport:
    """Check the hesitant conditions component by component.

    Violations are (kind, message) pairs; kinds: OrderBreach (transition
    names a strictly higher component), TransientSelfAtom, GradedSelfLoop
    (own-component atom with the wrong operator or grade), ClauseOverload
    (two own atoms in one DNF/CNF clause), UpwardForm.
    """
    index = {}
    for i, (comp, _) in enumerate(auto.partition):
        for q in comp:
            index[q] = i
    violations = []
    for i, (comp, ctype) in enumerate(auto.partition):
        for q in sorted(comp):
            for sigma in alphabet_of(auto.ap):
                for flag in auto.flags():
                    tf = auto.delta[(q, sigma, flag)]
                    where = f"delta({q}, {sorted(sigma)}, {flag})"
                    for op, k, s in sorted(tf_atoms(tf)):
                        if index[s] > i:
                            violations.append(
                                ("OrderBreach", f"{where} names {s} from a higher component"))
                        if index[s] != i:
                            continue
                        if ctype == "transient":
                            violations.append(
                                ("TransientSelfAtom", f"{where} names own component state {s}"))
                        elif ctype == "existential" and (op, k) != ("dia", 1):
                            violations.append(
                                ("GradedSelfLoop", f"{where} uses ({op},{k}) on own state {s}"))
                        elif ctype == "universal" and (op, k) != ("box", 1):
                            violations.append(
                                ("GradedSelfLoop", f"{where} uses ({op},{k}) on own state {s}"))
                        elif ctype == "upward" and op != "up":
                            violations.append(
                                ("UpwardForm", f"{where} uses ({op},{k}) on own state {s}"))
                    if ctype in ("existential", "universal"):
                        clauses = dnf_clauses(tf) if ctype == "existential" else cnf_clauses(tf)
                        for clause in clauses:
                            own = [a for a in clause if index[a[2]] == i]
                            if len(own) > 1:
                                violations.append(
                                    ("ClauseOverload", f"{where} has a clause with {len(own)} own atoms"))
    return HesitantReport(
        ok=not violations,
        component_types=tuple(t for _, t in auto.partition),
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class StructuralReport:
    hesitant: bool
    polarised: bool
    linear: bool
    two_way: bool


def structural_report(auto: TreeAutomaton) -> StructuralReport:
    hesitant = validate_hesitant(auto).ok
    polarised = True
    for comp, ctype in auto.partition:
        if ctype == "existential" and comp & auto.accepting:
            polarised = False
        if ctype == "universal" and not comp <= auto.accepting:
            polarised = False
    linear = all(len(comp) == 1 for comp, _ in auto.partition)
    return StructuralReport(hesitant, polarised, linear, auto.two_way)


# ---------------------------------------------------------------------------
# duality


@dataclass
class DualityRegistry:
    """Symmetric pairing of atoms whose subtree languages complement each
    other, with provenance ByConstruction (emitted by the compilers) or
    Unverified."""

    pairs: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def register(self, left: tuple, right: tuple, provenance: str = "ByConstruction"):
        for a, b in ((left, right), (right, left)):
            if a in self.pairs and self.pairs[a] != b:
                raise BadAutomaton(f"conflicting duality for {a}")
            self.pairs[a] = b
        self.provenance[frozenset((left, right))] = provenance

    def partner(self, atom: tuple):
        return self.pairs.get(atom)

    def renamed(self, mapping: dict) -> "DualityRegistry":
        def ren(atom):
            op, k, s = atom
            return (op, k, mapping.get(s, s))

        out = DualityRegistry()
        for key, prov in self.provenance.items():
            a, b = sorted(key)
            out.register(ren(a), ren(b), prov)
        return out

    def merge(self, other: "DualityRegistry") -> "DualityRegistry":
        out = DualityRegistry(dict(self.pairs), dict(self.provenance))
        for key, prov in other.provenance.items():
            a, b = sorted(key)
            out.register(a, b, prov)
        return out


def dual_atom(atom: tuple) -> tuple:
    op, k, s = atom
    if op == "dia":
        return ("box", k, s)
    if op == "box":
        return ("dia", k, s)
    raise WrongKind("up atoms have no dual")


def dualize_tf(tf) -> TransitionFormula:
    if isinstance(tf, TTrue):
        return TFalse()
    if isinstance(tf, TFalse):
        return TTrue()
    if isinstance(tf, TAtom):
        return TAtom(dual_atom(tf.atom))
    if isinstance(tf, TAnd):
        return TOr(dualize_tf(tf.left), dualize_tf(tf.right))
    return TAnd(dualize_tf(tf.left), dualize_tf(tf.right))


_DUAL_TYPE = {"transient": "transient", "existential": "universal",
              "universal": "existential"}


def dualize_tree(auto: TreeAutomaton, registry: DualityRegistry = None) -> TreeAutomaton:
    """Complement a one-way automaton: swap and/or, dia/box, true/false,
    accepting set, and existential/universal component types.  When a
    registry is passed, each atom of the original is paired with its dual."""
    if auto.two_way:
        raise TwoWayUnsupported("dualisation is defined for one-way automata")
    delta = {key: dualize_tf(tf) for key, tf in auto.delta.items()}
    if registry is not None:
        seen = set()
        for tf in auto.delta.values():
            for atom in tf_atoms(tf):
                if atom not in seen:
                    seen.add(atom)
                    if registry.partner(atom) is None:
                        registry.register(atom, dual_atom(atom))
    dual = TreeAutomaton(
        states=auto.states,
        ap=auto.ap,
        two_way=False,
        init=auto.init,
        accepting=frozenset(auto.states) - auto.accepting,
        partition=tuple((comp, _DUAL_TYPE[t]) for comp, t in auto.partition),
        delta=delta,
    )
    validate_tree_automaton(dual)
    return dual


# ---------------------------------------------------------------------------
# very precise form for linear automata

_SELF_OP = {"existential": "dia", "universal": "box", "upward": "up"}


def linear_split(auto: TreeAutomaton, state, sigma, flag="any"):
    """Split delta(state, sigma) of a linear automaton into
    (self_atom, alpha, alpha_prime) with delta = (self_atom & alpha) | alpha_prime.
    Transient states return (None, None, delta) unchanged."""
    ctype = auto.component_type(state)
    tf = auto.delta[(state, frozenset(sigma), flag)]
    if ctype == "transient":
        return None, None, tf
    op = _SELF_OP[ctype]
    k = 0 if op == "up" else 1
    self_atom = (op, k, state)
    stays = []
    exits = []
    for clause in dnf_clauses(tf):
        if self_atom in clause:
            stays.append(tf_and_all([TAtom(a) for a in sorted(clause - {self_atom})]))
        else:
            exits.append(tf_and_all([TAtom(a) for a in sorted(clause)]))
    return self_atom, tf_or_all(stays), tf_or_all(exits)


def normalize_linear_transitions(auto: TreeAutomaton) -> TreeAutomaton:
    """Rewrite every non-transient delta entry of a linear hesitant automaton
    into the shape ((op, q) & alpha) | alpha' where alpha, alpha' do not name
    q.  Transient entries are kept as they are."""
    report = structural_report(auto)
    if not (report.hesitant and report.linear):
        raise NotLinearHesitant("very precise form needs a linear hesitant automaton")
    delta = {}
    for (q, sigma, flag), tf in auto.delta.items():
        self_atom, alpha, alpha_prime = linear_split(auto, q, sigma, flag)
        if self_atom is None:
            delta[(q, sigma, flag)] = tf
        else:
            delta[(q, sigma, flag)] = TOr(TAnd(TAtom(self_atom), alpha), alpha_prime)
    out = TreeAutomaton(auto.states, auto.ap, auto.two_way, auto.init,
                        auto.accepting, auto.partition, delta)
    validate_tree_automaton(out)
    return out


# ---------------------------------------------------------------------------
# linearisation of a component


def _fresh_exit(states) -> str:
    name = "exit"
    while name in states:
        name = name + "'"
    return name


def component_letter_clauses(auto: TreeAutomaton, comp_index: int):
    """For each state of the component and sigma, the (annotation, target)
    pairs of its linearisation: target None encodes the exit.

    Existential components read off DNF clauses, universal ones CNF clauses,
    per the linearisation cases.
    """
    comp, ctype = auto.partition[comp_index]
    if ctype not in ("existential", "universal"):
        raise TransientComponent(f"component {comp_index} is {ctype}")
    to_clauses = dnf_clauses if ctype == "existential" else cnf_clauses
    own_op = "dia" if ctype == "existential" else "box"
    table = {}
    for q in sorted(comp):
        for sigma in alphabet_of(auto.ap):
            moves = []
            for clause in to_clauses(auto.delta[(q, sigma, "any")]):
                own = [a for a in clause if a[2] in comp]
                if not own:
                    moves.append((frozenset(clause), None))
                elif len(own) == 1 and own[0][:2] == (own_op, 1):
                    moves.append((frozenset(clause - {own[0]}), own[0][2]))
                else:
                    raise WrongKind("component is not hesitant")
            table[(q, sigma)] = moves
    return table


def linearize_component(auto: TreeAutomaton, state) -> "WordAutomaton":
    """Word automaton of a non-transient component over letters (sigma, C).

    A stay move follows a clause with the single own atom removed and the
    remaining atoms as annotation; a clause without own atoms exits to the
    fresh sink.  Existential components give an NCA (runs accept by leaving),
    universal ones a UBA (every run must stay), and both are looping.
    """
    from .words import make_word_automaton

    if auto.two_way:
        raise WrongKind("linearisation works on one-way automata")
    comp_index = auto.component_index(state)
    comp, ctype = auto.partition[comp_index]
    table = component_letter_clauses(auto, comp_index)
    atoms = set()
    for moves in table.values():
        for annot, target in moves:
            atoms |= annot
    b_atoms = sorted(atoms)
    letters = []
    for sigma in alphabet_of(auto.ap):
        for mask in range(1 << len(b_atoms)):
            letters.append((sigma, frozenset(a for i, a in enumerate(b_atoms) if mask >> i & 1)))
    comp_states = [q for q in auto.states if q in comp]
    exit_state = _fresh_exit(comp)
    delta = {}
    for q in comp_states:
        for sigma, annot in letters:
            targets = set()
            for move_annot, target in table[(q, sigma)]:
                if move_annot == annot:
                    targets.add(exit_state if target is None else target)
            delta[(q, (sigma, annot))] = targets
    for letter in letters:
        delta[(exit_state, letter)] = {exit_state}
    kind, mode = ("cobuchi", "existential") if ctype == "existential" else ("buchi", "universal")
    return make_word_automaton(kind, mode, letters, comp_states + [exit_state],
                               state, comp_states, delta)


def component_annotations(auto: TreeAutomaton, comp_index: int):
    """Annotations of a component, ordered with exit annotations first."""
    table = component_letter_clauses(auto, comp_index)
    exit_annots = set()
    stay_annots = set()
    for moves in table.values():
        for annot, target in moves:
            (exit_annots if target is None else stay_annots).add(annot)
    def key(annot):
        return (len(annot), sorted(annot))
    ordered = sorted(exit_annots, key=key) + sorted(stay_annots - exit_annots, key=key)
    return ordered


# ---------------------------------------------------------------------------
# visibility


@dataclass(frozen=True)
class VisibilityResult:
    status: str  # Visible | Violated | Unknown
    certificate: tuple = ()
    witness: tuple = None
    falsifications: tuple = ()


def visibility_check(auto: TreeAutomaton, registry: DualityRegistry = None,
                     samples: int = 20) -> VisibilityResult:
    """Visibility of every non-transient component.

    Each pair of distinct annotations C, C' needs atoms theta in C and
    theta' in C' whose subtree languages are complementary.  An empty
    annotation against any other is an immediate violation (no atom to
    pick).  Registry pairings certify Visible.  Everything else is Unknown,
    with a sampling report of models on which both annotation conjunctions
    hold at the root, when such models exist.
    """
    if registry is None:
        registry = DualityRegistry()
    certificate = []
    unknown_pairs = []
    for i, (comp, ctype) in enumerate(auto.partition):
        if ctype in ("transient", "upward"):
            continue
        annots = component_annotations(auto, i)
        for x in range(len(annots)):
            for y in range(x + 1, len(annots)):
                c1, c2 = annots[x], annots[y]
                if not c1 or not c2:
                    empty, other = (c1, c2) if not c1 else (c2, c1)
                    return VisibilityResult("Violated", witness=(i, empty, other))
                pair = _certified(c1, c2, registry)
                if pair is not None:
                    certificate.append((i, c1, c2) + pair)
                else:
                    unknown_pairs.append((i, c1, c2))
    if not unknown_pairs:
        return VisibilityResult("Visible", certificate=tuple(certificate))
    falsifications = _sample_overlaps(auto, unknown_pairs, samples)
    return VisibilityResult("Unknown", certificate=tuple(certificate),
                            falsifications=tuple(falsifications))


def _certified(c1, c2, registry):
    for theta in sorted(c1):
        partner = registry.partner(theta)
        if partner is not None and partner in c2:
            return theta, partner
    return None


def _sample_overlaps(auto, pairs, samples):
    from .models import random_model
    from .treerun import atom_holds_at_root

    found = []
    for comp_index, c1, c2 in pairs:
        for seed in range(samples):
            model = random_model(seed, n_states=3, ap=sorted(auto.ap))
            if all(atom_holds_at_root(auto, atom, model) for atom in c1) and all(
                    atom_holds_at_root(auto, atom, model) for atom in c2):
                found.append((comp_index, c1, c2, seed))
                break
    return found


# ---------------------------------------------------------------------------
# serialization


def tree_to_obj(auto: TreeAutomaton) -> dict:
    rows = []
    for q in auto.states:
        for sigma in alphabet_of(auto.ap):
            for flag in auto.flags():
                rows.append({
                    "state": q,
                    "sigma": sorted(sigma),
                    "root": flag,
                    "formula": tf_to_obj(auto.delta[(q, sigma, flag)]),
                })
    return {
        "states": list(auto.states),
        "ap": sorted(auto.ap),
        "two_way": auto.two_way,
        "initial": auto.init,
        "F": sorted(auto.accepting),
        "partition": [
            {"states": sorted(comp), "type": ctype} for comp, ctype in auto.partition
        ],
        "delta": rows,
    }


def tree_from_obj(obj: dict) -> TreeAutomaton:
    try:
        delta = {}
        for row in obj["delta"]:
            delta[(row["state"], frozenset(row["sigma"]), row["root"])] = tf_from_obj(row["formula"])
        return make_tree_automaton(
            obj["states"],
            obj["ap"],
            obj["two_way"],
            obj["initial"],
            obj["F"],
            [(r["states"], r["type"]) for r in obj["partition"]],
            delta,
        )
    except KeyError as exc:
        raise BadAutomaton(f"missing field {exc.args[0]!r}") from None


def random_tree_automaton(seed: int, n_states: int = 3, ap=("p",)) -> TreeAutomaton:
    """Small pseudo-random one-way hesitant polarised automaton.

    Components are singletons in a random type mix; transitions only name
    the state itself (per its component discipline) or strictly lower
    states, keeping the hesitant order valid by construction.
    """
    rng = random.Random(seed)
    states = [f"s{i}" for i in range(n_states)]
    partition = []
    accepting = []
    for i, q in enumerate(states):
        ctype = rng.choice(("transient", "existential", "universal"))
        partition.append(((q,), ctype))
        if ctype == "universal":
            accepting.append(q)
        elif ctype == "transient" and rng.random() < 0.5:
            accepting.append(q)
    delta = {}
    for i, q in enumerate(states):
        ctype = partition[i][1]
        for sigma in alphabet_of(frozenset(ap)):
            pool = []
            for j in range(i):
                op = rng.choice(("dia", "box"))
                pool.append(TAtom((op, rng.randint(1, 2), states[j])))
            if ctype == "existential":
                pool.append(TAtom(("dia", 1, q)))
            elif ctype == "universal":
                pool.append(TAtom(("box", 1, q)))
            pool.append(TTrue())
            pool.append(TFalse())
            left = rng.choice(pool)
            right = rng.choice(pool)
            tf = rng.choice((left, tf_and(left, right), tf_or(left, right)))
            delta[(q, sigma, "any")] = tf
    return make_tree_automaton(states, ap, False, states[-1], accepting,
                               partition, delta)