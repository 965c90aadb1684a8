"""Linear-time semantics and LTL-to-automaton bridges.

Finite words get the strong/weak next distinction; ultimately periodic
infinite words are evaluated through their lasso presentation.  The DFA
construction works by formula progression with residuals canonicalised as
minterm sets over the temporal subformulas, which bounds the state space and
makes termination obvious.
"""

from __future__ import annotations

from .errors import (BadWord, NotPureFuture, TransitionBlowup,
                     UnsupportedFragment, WrongFragment)
from .formulas import (
    And,
    Atom,
    Embed,
    Next,
    Not,
    Or,
    PathAnd,
    PathFormula,
    PathNot,
    PathOr,
    Release,
    Since,
    StateFormula,
    Until,
    WeakNext,
    Yesterday,
    atoms_of,
)
from .fragments import Fragment, classify_fragment
from .rewrites import nnf_path_negation
from .words import (
    LassoWord,
    WordAutomaton,
    canonical_rename,
    make_word_automaton,
    minimize_dfa,
)

DFA_STATE_CAP = 20_000
BASE_CAP = 14


def eval_prop(phi: StateFormula, letter: frozenset) -> bool:
    """Truth of a propositional state formula at a single letter."""
    if isinstance(phi, Atom):
        return phi.name in letter
    if isinstance(phi, Not):
        return not eval_prop(phi.sub, letter)
    if isinstance(phi, And):
        return eval_prop(phi.left, letter) and eval_prop(phi.right, letter)
    if isinstance(phi, Or):
        return eval_prop(phi.left, letter) or eval_prop(phi.right, letter)
    raise WrongFragment(f"not a propositional formula: {phi!r}")


# ---------------------------------------------------------------------------
# finite-word semantics


def holds_finite(psi: PathFormula, word, pos: int = 0) -> bool:
    """Finite-path satisfaction at a position: X requires a successor
    position, wX accepts the last one, U/R/S quantify inside the word."""
    word = tuple(word)
    if not word:
        raise BadWord("finite semantics needs a nonempty word")
    if not 0 <= pos < len(word):
        raise BadWord(f"position {pos} outside the word")
    return _fin(psi, word, pos)


def _fin(psi, word, i):
    n = len(word)
    if isinstance(psi, Embed):
        return eval_prop(psi.state, word[i])
    if isinstance(psi, PathNot):
        return not _fin(psi.sub, word, i)
    if isinstance(psi, PathAnd):
        return _fin(psi.left, word, i) and _fin(psi.right, word, i)
    if isinstance(psi, PathOr):
        return _fin(psi.left, word, i) or _fin(psi.right, word, i)
    if isinstance(psi, Next):
        return i + 1 < n and _fin(psi.sub, word, i + 1)
    if isinstance(psi, WeakNext):
        return i + 1 >= n or _fin(psi.sub, word, i + 1)
    if isinstance(psi, Yesterday):
        return i > 0 and _fin(psi.sub, word, i - 1)
    if isinstance(psi, Until):
        for j in range(i, n):
            if _fin(psi.right, word, j):
                return True
            if not _fin(psi.left, word, j):
                return False
        return False
    if isinstance(psi, Release):
        for j in range(i, n):
            if not _fin(psi.right, word, j):
                return False
            if _fin(psi.left, word, j):
                return True
        return True
    if isinstance(psi, Since):
        for j in range(i, -1, -1):
            if _fin(psi.right, word, j):
                return True
            if not _fin(psi.left, word, j):
                return False
        return False
    raise WrongFragment(f"no finite semantics for {psi!r}")


# ---------------------------------------------------------------------------
# omega-word semantics on lassos


def _future_free(psi) -> bool:
    if isinstance(psi, Embed):
        return True
    if isinstance(psi, (PathNot, Yesterday)):
        return _future_free(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Since)):
        return _future_free(psi.left) and _future_free(psi.right)
    return False


def _collect_past(psi, acc):
    if isinstance(psi, (Yesterday, Since)):
        if not _future_free(psi):
            raise UnsupportedFragment("past operators over future subformulas")
        if psi not in acc:
            acc.append(psi)
        return
    if isinstance(psi, Embed):
        return
    if isinstance(psi, (PathNot, Next, WeakNext)):
        _collect_past(psi.sub, acc)
    elif isinstance(psi, (PathAnd, PathOr, Until, Release)):
        _collect_past(psi.left, acc)
        _collect_past(psi.right, acc)
    else:
        raise WrongFragment(f"no omega semantics for {psi!r}")


def _past_closure(node, acc):
    if node in acc:
        return
    if isinstance(node, Embed):
        acc.append(node)
        return
    if isinstance(node, (PathNot, Yesterday)):
        _past_closure(node.sub, acc)
    else:
        _past_closure(node.left, acc)
        _past_closure(node.right, acc)
    acc.append(node)


def holds_omega_lasso(psi: PathFormula, lasso: LassoWord) -> bool:
    """Satisfaction at position 0 of the infinite word prefix.loop^omega.

    wX coincides with X here since every position has a successor.  Past
    operators are supported when their operands are themselves past (no
    future operator beneath Y or S): their values are computed by a forward
    scan that re-cuts the lasso once the carried past valuation repeats.
    Future operators are then solved by fixpoints over the re-cut lasso.
    """
    top_past = []
    _collect_past(psi, top_past)
    closure = []
    for node in top_past:
        _past_closure(node, closure)

    def letter_at(t):
        if t < len(lasso.prefix):
            return lasso.prefix[t]
        return lasso.loop[(t - len(lasso.prefix)) % len(lasso.loop)]

    def scan_step(prev, t):
        letter = letter_at(t)
        vals = {}
        for node in closure:
            if isinstance(node, Embed):
                vals[node] = eval_prop(node.state, letter)
            elif isinstance(node, PathNot):
                vals[node] = not vals[node.sub]
            elif isinstance(node, PathAnd):
                vals[node] = vals[node.left] and vals[node.right]
            elif isinstance(node, PathOr):
                vals[node] = vals[node.left] or vals[node.right]
            elif isinstance(node, Yesterday):
                vals[node] = t > 0 and prev[node.sub]
            else:
                vals[node] = vals[node.right] or (
                    vals[node.left] and t > 0 and prev[node]
                )
        return vals

    # scan forward until the loop-position/past-valuation pair repeats
    positions = []
    prev = {}
    seen = {}
    t = 0
    cut = None
    while True:
        if t >= len(lasso.prefix):
            key = ((t - len(lasso.prefix)) % len(lasso.loop),
                   tuple(prev.get(n, False) for n in closure))
            if key in seen:
                cut = seen[key]
                break
            seen[key] = t
        vals = scan_step(prev, t)
        positions.append((letter_at(t), vals))
        prev = vals
        t += 1

    n = len(positions)

    def succ(i):
        return i + 1 if i + 1 < n else cut

    memo = {}

    def ev(node):
        if node in memo:
            return memo[node]
        if isinstance(node, (Yesterday, Since)):
            out = [positions[i][1][node] for i in range(n)]
        elif isinstance(node, Embed):
            out = [eval_prop(node.state, positions[i][0]) for i in range(n)]
        elif isinstance(node, PathNot):
            out = [not v for v in ev(node.sub)]
        elif isinstance(node, PathAnd):
            out = [a and b for a, b in zip(ev(node.left), ev(node.right))]
        elif isinstance(node, PathOr):
            out = [a or b for a, b in zip(ev(node.left), ev(node.right))]
        elif isinstance(node, (Next, WeakNext)):
            sub = ev(node.sub)
            out = [sub[succ(i)] for i in range(n)]
        elif isinstance(node, Until):
            left, right = ev(node.left), ev(node.right)
            out = [False] * n
            changed = True
            while changed:
                changed = False
                for i in range(n - 1, -1, -1):
                    v = right[i] or (left[i] and out[succ(i)])
                    if v != out[i]:
                        out[i] = v
                        changed = True
        elif isinstance(node, Release):
            left, right = ev(node.left), ev(node.right)
            out = [True] * n
            changed = True
            while changed:
                changed = False
                for i in range(n - 1, -1, -1):
                    v = right[i] and (left[i] or out[succ(i)])
                    if v != out[i]:
                        out[i] = v
                        changed = True
        else:
            raise WrongFragment(f"no omega semantics for {node!r}")
        memo[node] = out
        return out

    return ev(psi)[0]


def omega_negate(psi: PathFormula) -> PathFormula:
    """NNF negation under omega semantics; wX is treated as X."""
    return nnf_path_negation(drop_weak_next(psi))


def drop_weak_next(psi: PathFormula) -> PathFormula:
    """Replace wX by X, sound on infinite words."""
    if isinstance(psi, Embed):
        return psi
    if isinstance(psi, PathNot):
        return PathNot(drop_weak_next(psi.sub))
    if isinstance(psi, (Next, WeakNext)):
        return Next(drop_weak_next(psi.sub))
    if isinstance(psi, Yesterday):
        return Yesterday(drop_weak_next(psi.sub))
    if isinstance(psi, (PathAnd, PathOr, Until, Release, Since)):
        return type(psi)(drop_weak_next(psi.left), drop_weak_next(psi.right))
    raise WrongFragment(f"cannot rewrite {psi!r}")


# ---------------------------------------------------------------------------
# finite-word DFA by progression


def path_subformulas(psi: PathFormula) -> list:
    """Distinct path subformulas in children-first order."""
    acc = []

    def visit(node):
        if node in acc:
            return
        if isinstance(node, (PathNot, Next, WeakNext, Yesterday)):
            visit(node.sub)
        elif isinstance(node, (PathAnd, PathOr, Until, Release, Since)):
            visit(node.left)
            visit(node.right)
        acc.append(node)

    visit(psi)
    return acc


def alphabet_of(ap) -> tuple:
    """All letters over the atom set, in binary-counter order."""
    atoms = sorted(ap)
    letters = []
    for mask in range(1 << len(atoms)):
        letters.append(frozenset(a for i, a in enumerate(atoms) if mask >> i & 1))
    return tuple(letters)


def ltl_finite_to_dfa(psi: PathFormula, ap=None) -> WordAutomaton:
    """Minimal DFA of the nonempty finite words satisfying a pure-future
    formula under finite-path semantics.

    Residual obligations after a prefix are Boolean combinations over the
    base of temporal subformulas; they are kept canonical as sets of
    satisfying base assignments (minterms), so equal residuals merge and the
    construction terminates.  A second state component remembers whether the
    word read so far satisfies the formula when treated as complete.
    """
    for node in path_subformulas(psi):
        if isinstance(node, (Yesterday, Since)):
            raise NotPureFuture("finite-word DFA needs a pure-future formula")
    if ap is None:
        ap = atoms_of(psi)
    sigma = alphabet_of(ap)

    base = [n for n in path_subformulas(psi)
            if isinstance(n, (Embed, Next, WeakNext, Until, Release))]
    if len(base) > BASE_CAP:
        raise TransitionBlowup("too many temporal subformulas")
    base_index = {n: i for i, n in enumerate(base)}
    k = len(base)
    full = frozenset(range(1 << k))

    def minterms(node):
        if node in base_index:
            bit = base_index[node]
            return frozenset(m for m in full if m >> bit & 1)
        if isinstance(node, PathNot):
            return full - minterms(node.sub)
        if isinstance(node, PathAnd):
            return minterms(node.left) & minterms(node.right)
        if isinstance(node, PathOr):
            return minterms(node.left) | minterms(node.right)
        raise WrongFragment(f"unexpected node {node!r}")

    pr_memo = {}

    def progress(node, letter):
        key = (node, letter)
        if key in pr_memo:
            return pr_memo[key]
        if isinstance(node, Embed):
            out = full if eval_prop(node.state, letter) else frozenset()
        elif isinstance(node, PathNot):
            out = full - progress(node.sub, letter)
        elif isinstance(node, PathAnd):
            out = progress(node.left, letter) & progress(node.right, letter)
        elif isinstance(node, PathOr):
            out = progress(node.left, letter) | progress(node.right, letter)
        elif isinstance(node, (Next, WeakNext)):
            out = minterms(node.sub)
        elif isinstance(node, Until):
            out = progress(node.right, letter) | (
                progress(node.left, letter) & minterms(node)
            )
        elif isinstance(node, Release):
            out = progress(node.right, letter) & (
                progress(node.left, letter) | minterms(node)
            )
        else:
            raise WrongFragment(f"unexpected node {node!r}")
        pr_memo[key] = out
        return out

    def now_value(node, letter):
        # truth when `letter` is the last position of the word
        if isinstance(node, Embed):
            return eval_prop(node.state, letter)
        if isinstance(node, Next):
            return False
        if isinstance(node, WeakNext):
            return True
        if isinstance(node, (Until, Release)):
            return now_value(node.right, letter)
        raise WrongFragment(f"unexpected node {node!r}")

    last_assign = {}
    for letter in sigma:
        mask = 0
        for n, i in base_index.items():
            if now_value(n, letter):
                mask |= 1 << i
        last_assign[letter] = mask

    def step(res, letter):
        out = set()
        for m in res:
            acc = full
            for n, i in base_index.items():
                picked = progress(n, letter)
                acc = acc & (picked if m >> i & 1 else full - picked)
                if not acc:
                    break
            out |= acc
        return frozenset(out)

    init = (minterms(psi), False)
    states = [init]
    seen = {init}
    delta = {}
    head = 0
    while head < len(states):
        cur = states[head]
        head += 1
        res = cur[0]
        for letter in sigma:
            nxt = (step(res, letter), last_assign[letter] in res)
            delta[(cur, letter)] = frozenset({nxt})
            if nxt not in seen:
                if len(seen) >= DFA_STATE_CAP:
                    raise TransitionBlowup("progression state space too large")
                seen.add(nxt)
                states.append(nxt)
    raw = WordAutomaton("finite", "deterministic", sigma, tuple(states), init,
                        frozenset(s for s in states if s[1]), delta)
    return minimize_dfa(canonical_rename(raw))


# ---------------------------------------------------------------------------
# safety and co-safety fragments to looping automata


def fragment_to_looping_word_automaton(psi: PathFormula, polarity: str, ap=None) -> WordAutomaton:
    """Compile a co-safety formula to a looping NCA or a safety formula to a
    looping UBA.

    cosafe: a run may jump to the accepting sink exactly when the prefix
    read so far satisfies the formula under finite semantics, which for
    X/U-positive formulas means it is a good prefix.  safe: the same DFA
    construction on the negation detects bad prefixes; here the sink is the
    rejecting trap of a universal automaton, so one bad prefix kills the
    word.  Both outputs are looping: F is everything but the sink.
    """
    if polarity not in ("cosafe", "safe"):
        raise WrongFragment(f"unknown polarity {polarity!r}")
    if ap is None:
        ap = atoms_of(psi)
    frags = classify_fragment(psi)
    if polarity == "cosafe":
        if Fragment.COSAFELTL not in frags:
            raise WrongFragment("cosafe polarity needs an X/U formula in NNF")
        dfa = ltl_finite_to_dfa(drop_weak_next(psi), ap)
        kind, mode = "cobuchi", "existential"
    else:
        if Fragment.SAFELTL not in frags:
            raise WrongFragment("safe polarity needs an X/R formula in NNF")
        dfa = ltl_finite_to_dfa(omega_negate(psi), ap)
        kind, mode = "buchi", "universal"
    sink = "sink"
    states = dfa.states + (sink,)
    delta = {}
    for q in dfa.states:
        for a in dfa.sigma:
            targets = set(dfa.delta[(q, a)])
            if q in dfa.accepting:
                targets.add(sink)
            delta[(q, a)] = targets
    for a in dfa.sigma:
        delta[(sink, a)] = {sink}
    return make_word_automaton(kind, mode, dfa.sigma, states, dfa.init,
                               dfa.states, delta)


def good_prefix_bound(psi: PathFormula, lasso: LassoWord) -> int:
    """Prefix length after which a good or bad prefix must have appeared on
    the lasso, if one exists at all: |u| + |v| * 2^{|sub(psi)|}."""
    return len(lasso.prefix) + len(lasso.loop) * (2 ** len(path_subformulas(psi)))


def lasso_prefix(lasso: LassoWord, n: int) -> tuple:
    """First n letters of the lasso's infinite word."""
    out = list(lasso.prefix[:n])
    while len(out) < n:
        out.extend(lasso.loop[: n - len(out)])
    return tuple(out)


def prefix_semantics(psi: PathFormula, polarity: str, lasso: LassoWord) -> bool:
    """Decide psi on the lasso through finite prefixes alone.

    Satisfaction of an X/U-positive formula is monotone in the prefix, so
    one evaluation at the good-prefix bound is equivalent to enumerating
    every prefix up to it.  The safe side dually looks for a bad prefix of
    the negation.
    """
    if polarity == "cosafe":
        target = drop_weak_next(psi)
    elif polarity == "safe":
        target = omega_negate(psi)
    else:
        raise WrongFragment(f"unknown polarity {polarity!r}")
    bound = good_prefix_bound(target, lasso)
    found = holds_finite(target, lasso_prefix(lasso, bound))
    return found if polarity == "cosafe" else not found
