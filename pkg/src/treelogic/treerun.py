"""Running tree automata on regular tree models.

One-way acceptance exploits polarisation: each component contributes a
predicate on model states, solved lowest component first as a least fixpoint
(existential, infinite stays reject), greatest fixpoint (universal, infinite
stays accept) or direct evaluation (transient).

Two-way linear automata are decided on an enriched graph whose nodes carry,
besides the model state, a root flag and one bit per parent-referenced state
holding that state's value at the parent node.  Upward components become
deterministic forward recurrences over these bits; downward components are
then the usual fixpoints on the enriched graph.
"""

from __future__ import annotations

from .errors import BadAutomaton, NotPolarisedHesitant, NotTwoWayLinear, WrongKind
from .models import RegularTreeModel
from .trees import TAnd, TAtom, TFalse, TOr, TTrue, TreeAutomaton, structural_report


def _holds(tf, children, member, up_value=None):
    """Evaluate a transition formula.  children is a node list counted with
    multiplicity, member(state, node) the current predicate, up_value(state)
    the value of an up atom at this node."""
    if isinstance(tf, TTrue):
        return True
    if isinstance(tf, TFalse):
        return False
    if isinstance(tf, TAnd):
        return _holds(tf.left, children, member, up_value) and \
            _holds(tf.right, children, member, up_value)
    if isinstance(tf, TOr):
        return _holds(tf.left, children, member, up_value) or \
            _holds(tf.right, children, member, up_value)
    if isinstance(tf, TAtom):
        op, k, s = tf.atom
        if op == "dia":
            return sum(1 for c in children if member(s, c)) >= k
        if op == "box":
            return sum(1 for c in children if not member(s, c)) <= k - 1
        if up_value is None:
            raise BadAutomaton("up atom in a one-way evaluation")
        return up_value(s)
    raise BadAutomaton(f"not a transition formula: {tf!r}")


def _letter(auto, model, v):
    # the automaton reads the projection of the label onto its own alphabet
    return model.label(v) & auto.ap


def state_predicates(auto: TreeAutomaton, model: RegularTreeModel) -> dict:
    """Model states satisfying each automaton state, by component fixpoints."""
    if auto.two_way:
        raise WrongKind("state predicates are one-way; see accepts_two_way")
    report = structural_report(auto)
    if not (report.hesitant and report.polarised):
        raise NotPolarisedHesitant("acceptance needs a polarised hesitant automaton")
    preds = {}

    def evaluate(q, v, env):
        def member(s, c):
            return c in env[s]
        tf = auto.delta[(q, _letter(auto, model, v), "any")]
        return _holds(tf, model.successors(v), member)

    for comp, ctype in auto.partition:
        comp_states = [q for q in auto.states if q in comp]
        if ctype == "transient":
            for q in comp_states:
                preds[q] = frozenset(v for v in model.states if evaluate(q, v, preds))
            continue
        start = frozenset() if ctype == "existential" else frozenset(model.states)
        cur = {q: start for q in comp_states}
        while True:
            env = dict(preds)
            env.update(cur)
            new = {q: frozenset(v for v in model.states if evaluate(q, v, env))
                   for q in comp_states}
            if new == cur:
                break
            cur = new
        preds.update(cur)
    return preds


def accepts(auto: TreeAutomaton, model: RegularTreeModel) -> bool:
    """Whether the automaton accepts the unfolding of the model."""
    preds = state_predicates(auto, model)
    return model.root in preds[auto.init]


def atom_holds_at_root(auto: TreeAutomaton, atom: tuple, model: RegularTreeModel) -> bool:
    """Whether a graded atom holds at the model root, children evaluated by
    the automaton.  Parent atoms are false there."""
    preds = state_predicates(auto, model)
    op, k, s = atom
    children = model.successors(model.root)
    if op == "dia":
        return sum(1 for c in children if c in preds[s]) >= k
    if op == "box":
        return sum(1 for c in children if c not in preds[s]) <= k - 1
    return False


def _up_references(auto, comp):
    from .trees import tf_atoms

    refs = set()
    for (q, sigma, flag), tf in auto.delta.items():
        if q in comp:
            for op, _, s in tf_atoms(tf):
                if op == "up":
                    refs.add(s)
    return refs


def accepts_two_way(auto: TreeAutomaton, model: RegularTreeModel) -> bool:
    """Acceptance for two-way linear automata via history bits.

    Graph nodes are (model state, root flag, bits); the bit for a carried
    state holds its value at the parent, so an up atom reads the local bit.
    An upward state's own value is a forward recurrence: value at a child's
    bit := delta evaluated at the current node, with the state's own up atom
    reading the node's last bit.
    """
    report = structural_report(auto)
    if not (auto.two_way and report.linear and report.hesitant and report.polarised):
        raise NotTwoWayLinear("needs a two-way linear polarised hesitant automaton")

    carried = []
    pred_len = {}
    preds = {}
    root = (model.root, True, ())
    edges = {}
    queue = [root]
    while queue:
        node = queue.pop()
        if node in edges:
            continue
        v, _, _ = node
        kids = tuple((w, False, ()) for w in model.successors(v))
        edges[node] = kids
        queue.extend(kids)

    def member(s, node):
        v, isroot, bits = node
        return (v, isroot, bits[:pred_len[s]]) in preds[s]

    def extend(value_at):
        """Add one bit: each child's new bit is value_at of its parent."""
        nonlocal root, edges
        new_root = (root[0], True, root[2] + (False,))
        new_edges = {}
        queue = [new_root]
        values = {}
        while queue:
            node = queue.pop()
            if node in new_edges:
                continue
            v, isroot, bits = node
            bit = value_at(node)
            values[node] = bit
            old = (v, isroot, bits[:-1])
            kids = tuple((w, False, ob + (bit,)) for w, _, ob in edges[old])
            new_edges[node] = kids
            queue.extend(kids)
        root, edges = new_root, new_edges
        return values

    def carry_known(s):
        extend(lambda node: member(s, node))
        carried.append(s)

    def solve_upward(q):
        def value_at(node):
            v, isroot, bits = node
            tf = auto.delta[(q, _letter(auto, model, v), "root" if isroot else "nonroot")]
            old = (v, isroot, bits[:-1])

            def child_member(s, c):
                return member(s, c)

            def up_value(s):
                if isroot:
                    return False
                if s == q:
                    return bits[-1]
                return bits[carried.index(s)]

            return _holds(tf, edges[old], child_member, up_value)

        values = extend(value_at)
        carried.append(q)
        pred_len[q] = len(carried)
        preds[q] = frozenset(n for n, b in values.items() if b)

    def solve_downward(comp, ctype):
        comp_states = [q for q in auto.states if q in comp]

        def evaluate(q, node, env):
            v, isroot, bits = node

            def mem(s, c):
                if s in env:
                    return c in env[s]
                return member(s, c)

            def up_value(s):
                if isroot:
                    return False
                return bits[carried.index(s)]

            tf = auto.delta[(q, _letter(auto, model, v), "root" if isroot else "nonroot")]
            return _holds(tf, edges[node], mem, up_value)

        all_nodes = sorted(edges)
        if ctype == "transient":
            for q in comp_states:
                preds[q] = frozenset(n for n in all_nodes if evaluate(q, n, {}))
                pred_len[q] = len(carried)
            return
        start = frozenset() if ctype == "existential" else frozenset(all_nodes)
        cur = {q: start for q in comp_states}
        while True:
            new = {q: frozenset(n for n in all_nodes if evaluate(q, n, cur))
                   for q in comp_states}
            if new == cur:
                break
            cur = new
        for q in comp_states:
            pred_len[q] = len(carried)
            preds[q] = cur[q]

    for comp, ctype in auto.partition:
        order = {s: i for i, (c, _) in enumerate(auto.partition) for s in c}
        needed = sorted(_up_references(auto, comp) - set(carried) - set(comp),
                        key=lambda s: (order[s], s))
        for s in needed:
            carry_known(s)
        if ctype == "upward":
            (q,) = comp
            solve_upward(q)
        else:
            solve_downward(comp, ctype)

    return member(auto.init, root)


def brute_accepts(auto: TreeAutomaton, model: RegularTreeModel, depth: int = None) -> bool:
    """Independent bounded run search on the unfolding.

    Truncates at a depth where all component fixpoints must have stabilised
    and scores a cut-off stay by acceptance membership.  Exponential bound,
    meant for small cross-checks only.
    """
    if auto.two_way:
        raise WrongKind("bounded run search is one-way")
    if depth is None:
        depth = len(model.states) * (2 ** len(auto.states))
    memo = {}

    def value(q, v, fuel):
        if fuel == 0:
            return q in auto.accepting
        key = (q, v, fuel)
        if key not in memo:
            def member(s, w):
                return value(s, w, fuel - 1)
            tf = auto.delta[(q, _letter(auto, model, v), "any")]
            memo[key] = _holds(tf, model.successors(v), member)
        return memo[key]

    return value(auto.init, model.root, depth)