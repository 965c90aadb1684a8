"""Automata on infinite and finite words.

One automaton type covers the acceptance kinds (buchi, cobuchi, finite) and
branching modes (existential, universal, deterministic) the toolkit needs.
Letters are either plain sets of atoms or pairs (atoms, annotations) coming
from the linearisation of a tree-automaton component; both are hashable and
the code never looks inside a letter except for serialization.

Acceptance conventions: a buchi run is successful when it visits F
infinitely often, a cobuchi run when it visits F only finitely often.  A
looping automaton has F = Q minus a single absorbing sink, so under the
buchi reading (universal branching) runs must avoid the sink and under the
cobuchi reading (existential branching) a run succeeds by reaching it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (BadAutomaton, BadWord, LetterOutOfAlphabet, NotUBA,
                     TransitionBlowup, WrongKind)

KINDS = ("buchi", "cobuchi", "finite")
MODES = ("existential", "universal", "deterministic")

MONOID_CAP = 200_000


@dataclass(frozen=True)
class WordAutomaton:
    kind: str
    mode: str
    sigma: tuple
    states: tuple
    init: str
    accepting: frozenset
    delta: dict

    def targets(self, state, letter) -> frozenset:
        try:
            return self.delta[(state, letter)]
        except KeyError:
            raise LetterOutOfAlphabet(
                f"letter {letter!r} not handled in state {state!r}") from None


def make_word_automaton(kind, mode, sigma, states, init, accepting, delta) -> WordAutomaton:
    auto = WordAutomaton(
        kind=kind,
        mode=mode,
        sigma=tuple(sigma),
        states=tuple(states),
        init=init,
        accepting=frozenset(accepting),
        delta={k: frozenset(v) for k, v in delta.items()},
    )
    validate_word_automaton(auto)
    return auto


def validate_word_automaton(auto: WordAutomaton) -> None:
    if auto.kind not in KINDS:
        raise BadAutomaton(f"unknown acceptance kind {auto.kind!r}")
    if auto.mode not in MODES:
        raise BadAutomaton(f"unknown branching mode {auto.mode!r}")
    states = set(auto.states)
    if len(states) != len(auto.states):
        raise BadAutomaton("duplicate states")
    if len(set(auto.sigma)) != len(auto.sigma):
        raise BadAutomaton("duplicate letters")
    if auto.init not in states:
        raise BadAutomaton("initial state unknown")
    if not auto.accepting <= states:
        raise BadAutomaton("accepting set mentions unknown states")
    expected = {(q, a) for q in auto.states for a in auto.sigma}
    if set(auto.delta) != expected:
        raise BadAutomaton("transition map must cover exactly states x alphabet")
    for (q, a), targets in auto.delta.items():
        if not targets <= states:
            raise BadAutomaton(f"transition from {q!r} leaves the state set")
        if auto.mode == "deterministic" and len(targets) != 1:
            raise BadAutomaton(f"deterministic automaton needs one target at ({q!r}, {a!r})")


@dataclass(frozen=True)
class LassoWord:
    """Finite presentation of the ultimately periodic word prefix.loop^omega."""

    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise BadWord("empty loop")


def mk_lasso(prefix, loop) -> LassoWord:
    return LassoWord(tuple(prefix), tuple(loop))


# ---------------------------------------------------------------------------
# running words


def accepts_finite(auto: WordAutomaton, word) -> bool:
    if auto.kind != "finite":
        raise WrongKind("finite words need finite acceptance")
    current = {auto.init}
    for a in word:
        current = set().union(*(auto.targets(q, a) for q in current)) if current else set()
    if auto.mode == "universal":
        return current <= auto.accepting
    return bool(current & auto.accepting)


def accepts_lasso(auto: WordAutomaton, lasso: LassoWord) -> bool:
    """Acceptance of the ultimately periodic word prefix.loop^omega.

    Decided on the product of the automaton with the lasso graph: a buchi run
    succeeds through a reachable loop-aligned cycle meeting F, a cobuchi run
    through one avoiding F.  Universal acceptance asks that no run fails,
    where only full infinite sequences count as runs.
    """
    if auto.kind == "finite":
        raise WrongKind("lasso acceptance needs an omega acceptance kind")
    prefix, loop = lasso.prefix, lasso.loop
    current = {auto.init}
    for a in prefix:
        current = set().union(*(auto.targets(q, a) for q in current)) if current else set()
    if not current:
        return auto.mode == "universal"

    n_loop = len(loop)
    index = {q: i for i, q in enumerate(auto.states)}

    def node_succ(node):
        q, j = node
        a = loop[j]
        nj = (j + 1) % n_loop
        return [(t, nj) for t in sorted(auto.targets(q, a), key=index.get)]

    start = sorted(((q, 0) for q in current), key=lambda n: index[n[0]])
    reach = _reachable(start, node_succ)

    fin = auto.accepting
    in_f = lambda n: n[0] in fin
    out_f = lambda n: n[0] not in fin
    anywhere = lambda n: True
    if auto.kind == "buchi":
        success = _cycle_exists(reach, node_succ, in_f, anywhere)
        failure = _cycle_exists(reach, node_succ, out_f, out_f)
    else:
        success = _cycle_exists(reach, node_succ, out_f, out_f)
        failure = _cycle_exists(reach, node_succ, in_f, anywhere)
    if auto.mode == "universal":
        return not failure
    return success


def _reachable(start, node_succ):
    seen = list(start)
    seen_set = set(start)
    frontier = list(start)
    while frontier:
        node = frontier.pop()
        for nxt in node_succ(node):
            if nxt not in seen_set:
                seen_set.add(nxt)
                seen.append(nxt)
                frontier.append(nxt)
    return seen


def _cycle_exists(reach, node_succ, on_cycle, restrict) -> bool:
    for node in reach:
        if not on_cycle(node):
            continue
        frontier = [n for n in node_succ(node) if restrict(n)]
        seen = set(frontier)
        while frontier:
            cur = frontier.pop()
            if cur == node:
                return True
            for nxt in node_succ(cur):
                if restrict(nxt) and nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if node in seen:
            return True
    return False


# ---------------------------------------------------------------------------
# transition monoid and counter freedom


def _letter_matrix(auto, a, index):
    rows = []
    for q in auto.states:
        mask = 0
        for t in auto.delta[(q, a)]:
            mask |= 1 << index[t]
        rows.append(mask)
    return tuple(rows)


def _mat_mul(left, right):
    out = []
    for row in left:
        acc = 0
        rest = row
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc |= right[j]
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class TransitionMonoid:
    """Boolean path matrices of all words, each with a shortest word for it.

    Matrices are tuples of row bitmasks over the state order of the source
    automaton; `elements` maps matrix -> word, and the empty word maps the
    identity.  Closed under `compose`.
    """

    elements: dict
    generators: dict
    identity: tuple

    @staticmethod
    def compose(left, right):
        return _mat_mul(left, right)


def transition_monoid(auto: WordAutomaton) -> TransitionMonoid:
    index = {q: i for i, q in enumerate(auto.states)}
    identity = tuple(1 << i for i in range(len(auto.states)))
    generators = {a: _letter_matrix(auto, a, index) for a in auto.sigma}
    monoid = {identity: ()}
    frontier = []
    for a in auto.sigma:
        mat = generators[a]
        if mat not in monoid:
            monoid[mat] = (a,)
            frontier.append(mat)
    while frontier:
        new_frontier = []
        for mat in frontier:
            word = monoid[mat]
            for a in auto.sigma:
                nxt = _mat_mul(mat, generators[a])
                if nxt not in monoid:
                    if len(monoid) >= MONOID_CAP:
                        raise TransitionBlowup("transition monoid exceeds cap")
                    monoid[nxt] = word + (a,)
                    new_frontier.append(nxt)
        frontier = new_frontier
    return TransitionMonoid(monoid, generators, identity)


def _power_cycle(mat):
    """Return (first_repeat_index, period, powers) of the sequence mat^1, mat^2, ..."""
    seen = {mat: 1}
    powers = [mat]
    cur = mat
    k = 1
    while True:
        cur = _mat_mul(cur, mat)
        k += 1
        if cur in seen:
            i = seen[cur]
            return i, k - i, powers
        seen[cur] = k
        powers.append(cur)


def is_counter_free(auto: WordAutomaton):
    """Literal counter-freeness check on the transition monoid.

    The automaton is counter-free when a path on w^n from q back to q forces
    a path on w from q to q, for every word w and n >= 1.  Checked on the
    finite monoid: for each element's power sequence up to its first repeat,
    no diagonal entry may appear in a power without being in the element
    itself.  Returns (True, None) or (False, (state, word, n)).
    """
    monoid = transition_monoid(auto)
    for mat, word in monoid.elements.items():
        if not word:
            continue
        _, _, powers = _power_cycle(mat)
        for n in range(2, len(powers) + 1):
            diag = powers[n - 1]
            for i, q in enumerate(auto.states):
                if diag[i] >> i & 1 and not mat[i] >> i & 1:
                    return False, (q, word, n)
    return True, None


# ---------------------------------------------------------------------------
# shape tests


def looping_sink(auto: WordAutomaton):
    """The unique state outside F when it is an all-letters self-loop sink,
    else None."""
    rejecting = [q for q in auto.states if q not in auto.accepting]
    if len(rejecting) != 1:
        return None
    sink = rejecting[0]
    for a in auto.sigma:
        if auto.delta[(sink, a)] != frozenset({sink}):
            return None
    return sink


def is_looping(auto: WordAutomaton):
    """Whether F = Q minus a single absorbing sink; returns (flag, sink)."""
    sink = looping_sink(auto)
    return sink is not None, sink


# ---------------------------------------------------------------------------
# determinization


def canonical_rename(auto: WordAutomaton, prefix: str = "d") -> WordAutomaton:
    """Rename states to prefix0, prefix1, ... in breadth-first discovery
    order from the initial state, dropping unreachable states."""
    order = [auto.init]
    seen = {auto.init}
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for a in auto.sigma:
            for t in sorted(auto.delta[(q, a)], key=auto.states.index):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    mapping = {q: f"{prefix}{i}" for i, q in enumerate(order)}
    delta = {}
    for q in order:
        for a in auto.sigma:
            delta[(mapping[q], a)] = frozenset(mapping[t] for t in auto.delta[(q, a)])
    return make_word_automaton(
        auto.kind,
        auto.mode,
        auto.sigma,
        [mapping[q] for q in order],
        mapping[auto.init],
        [mapping[q] for q in order if q in auto.accepting],
        delta,
    )


def subset_construct(auto: WordAutomaton) -> WordAutomaton:
    """Determinize a finite-acceptance automaton by the subset construction."""
    if auto.kind != "finite":
        raise WrongKind("subset construction is for finite acceptance")
    if auto.mode == "deterministic":
        return canonical_rename(auto)
    universal = auto.mode == "universal"
    init = frozenset({auto.init})
    states = [init]
    seen = {init}
    delta = {}
    head = 0
    while head < len(states):
        cur = states[head]
        head += 1
        for a in auto.sigma:
            nxt = frozenset().union(*(auto.delta[(q, a)] for q in cur)) if cur else frozenset()
            delta[(cur, a)] = frozenset({nxt})
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
    if universal:
        accepting = [s for s in states if s <= auto.accepting]
    else:
        accepting = [s for s in states if s & auto.accepting]
    big = WordAutomaton("finite", "deterministic", auto.sigma, tuple(states), init,
                        frozenset(accepting), delta)
    return canonical_rename(big)


def breakpoint_determinize(auto: WordAutomaton) -> WordAutomaton:
    """Breakpoint determinization of a universal buchi automaton.

    States are pairs (S, O) with O the runs still owing a visit to F since
    the last breakpoint; a state with empty O is a breakpoint and is final.
    The word is accepted iff breakpoints recur forever, so the output is a
    deterministic buchi automaton.  On looping input every (S, {sink}) pair
    is fused into a single non-final absorbing sink, which reduces the whole
    construction to a subset automaton and keeps the result looping.
    """
    if auto.kind != "buchi" or auto.mode != "universal":
        raise NotUBA("breakpoint determinization expects a universal buchi automaton")
    fin = auto.accepting
    sink = looping_sink(auto)
    fused = (None, frozenset({sink}))

    def fuse(s, o):
        if sink is not None and o == frozenset({sink}):
            return fused
        return s, o

    init = fuse(frozenset({auto.init}), frozenset({auto.init}) - fin)
    states = [init]
    seen = {init}
    delta = {}
    head = 0
    while head < len(states):
        s, o = states[head]
        head += 1
        if (s, o) == fused:
            for a in auto.sigma:
                delta[(fused, a)] = frozenset({fused})
            continue
        for a in auto.sigma:
            ns = frozenset().union(*(auto.delta[(q, a)] for q in s)) if s else frozenset()
            if o:
                no = frozenset().union(*(auto.delta[(q, a)] for q in o)) - fin
            else:
                no = ns - fin
            nxt = fuse(ns, no)
            delta[((s, o), a)] = frozenset({nxt})
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
    accepting = [st for st in states if st != fused and not st[1]]
    big = WordAutomaton("buchi", "deterministic", auto.sigma, tuple(states), init,
                        frozenset(accepting), delta)
    return canonical_rename(big, prefix="m")


# ---------------------------------------------------------------------------
# DFA minimization and equivalence


def minimize_dfa(auto: WordAutomaton) -> WordAutomaton:
    """Moore partition refinement on a deterministic finite-acceptance
    automaton, with canonical state names on the result."""
    if auto.kind != "finite" or auto.mode != "deterministic":
        raise WrongKind("minimization is for deterministic finite acceptance")
    auto = canonical_rename(auto)

    def single(q, a):
        (t,) = auto.delta[(q, a)]
        return t

    block = {q: (q in auto.accepting) for q in auto.states}
    while True:
        signature = {}
        for q in auto.states:
            signature[q] = (block[q],) + tuple(block[single(q, a)] for a in auto.sigma)
        order = []
        for q in auto.states:
            if signature[q] not in order:
                order.append(signature[q])
        new_block = {q: order.index(signature[q]) for q in auto.states}
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    reps = {}
    for q in auto.states:
        reps.setdefault(block[q], q)
    states = [reps[b] for b in sorted(reps)]
    delta = {}
    for q in states:
        for a in auto.sigma:
            delta[(q, a)] = frozenset({reps[block[single(q, a)]]})
    small = WordAutomaton("finite", "deterministic", auto.sigma, tuple(states),
                          reps[block[auto.init]],
                          frozenset(q for q in states if q in auto.accepting), delta)
    return canonical_rename(small)


def dfa_equivalent(left: WordAutomaton, right: WordAutomaton) -> bool:
    """Language equivalence of two deterministic finite-acceptance automata
    over the same alphabet."""
    if set(left.sigma) != set(right.sigma):
        return False
    a = minimize_dfa(left)
    b = minimize_dfa(WordAutomaton(right.kind, right.mode, left.sigma, right.states,
                                   right.init, right.accepting, right.delta))
    if len(a.states) != len(b.states):
        return False
    pairs = [(a.init, b.init)]
    matched = {a.init: b.init}
    while pairs:
        qa, qb = pairs.pop()
        if (qa in a.accepting) != (qb in b.accepting):
            return False
        for letter in a.sigma:
            (ta,) = a.delta[(qa, letter)]
            (tb,) = b.delta[(qb, letter)]
            if ta in matched:
                if matched[ta] != tb:
                    return False
            else:
                matched[ta] = tb
                pairs.append((ta, tb))
    return True


# ---------------------------------------------------------------------------
# serialization


def letter_to_obj(letter):
    if isinstance(letter, frozenset):
        return {"atoms": sorted(letter)}
    from .trees import atom_to_obj

    atoms, annots = letter
    return {"atoms": sorted(atoms), "annots": [atom_to_obj(x) for x in sorted(annots)]}


def letter_from_obj(obj):
    if "annots" in obj:
        from .trees import atom_from_obj

        return (frozenset(obj["atoms"]), frozenset(atom_from_obj(x) for x in obj["annots"]))
    return frozenset(obj["atoms"])


def word_to_obj(auto: WordAutomaton) -> dict:
    letters = list(auto.sigma)
    return {
        "kind": auto.kind,
        "mode": auto.mode,
        "sigma": [letter_to_obj(a) for a in letters],
        "states": list(auto.states),
        "init": auto.init,
        "accepting": sorted(auto.accepting),
        "delta": [
            {
                "state": q,
                "letter": letter_to_obj(a),
                "targets": sorted(auto.delta[(q, a)]),
            }
            for q in auto.states
            for a in letters
        ],
    }


def word_from_obj(obj: dict) -> WordAutomaton:
    try:
        sigma = [letter_from_obj(o) for o in obj["sigma"]]
        delta = {}
        for row in obj["delta"]:
            delta[(row["state"], letter_from_obj(row["letter"]))] = row["targets"]
        return make_word_automaton(obj["kind"], obj["mode"], sigma, obj["states"],
                                   obj["init"], obj["accepting"], delta)
    except KeyError as exc:
        raise BadAutomaton(f"missing field {exc.args[0]!r}") from None
