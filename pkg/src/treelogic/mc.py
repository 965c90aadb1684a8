"""Fixpoint model checkers for the three logics, over regular tree models.

Past operators are handled by enriching the model: every past subformula
gets one bit of history, so nodes of the enriched graph are (state, bits)
pairs and the checkers stay plain fixpoint computations.  Path quantifiers
go through a product with a word automaton: the deterministic finite-word
automaton of the skeleton for E and E^f, or the guard-annotated payload of
an EAuto node.  A deliberately naive oracle evaluator cross-checks both.
"""

from dataclasses import dataclass

from .errors import (InsufficientFuel, UnsupportedFragment, WrongFragment,
                     WrongKind)
from .formulas import (And, Atom, CoCount, Count, EAuto, Embed, Exists,
                       ExistsFin, Forall, Next, Not, Or, PathAnd, PathNot,
                       PathOr, Release, StateFormula, Until, WeakNext,
                       atoms_of, eauto_guards, match_AR, match_AwY, match_ES,
                       match_EU, match_EX, match_EY)
from .fragments import Fragment, classify_fragment
from .ltl import eval_prop, holds_finite, ltl_finite_to_dfa
from .models import RegularTreeModel
from .rewrites import skeletonize, subformula_closure, to_nnf
from .words import looping_sink

try:
    from .translate import AutomatonGuardedFormula
except ImportError:  # pragma: no cover - circular import guard for tooling
    AutomatonGuardedFormula = None


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class MCResult:
    """Model checking outcome: truth at the root plus the labelling of every
    enriched node as (model state, history bits, holds)."""

    root: bool
    nodes: tuple


def result_to_obj(result: MCResult) -> dict:
    return {
        "root": result.root,
        "nodes": [
            {"node": v, "history": list(bits), "holds": holds}
            for v, bits, holds in result.nodes
        ],
    }


# ---------------------------------------------------------------------------
# enriched models for the past fragment


@dataclass(frozen=True)
class EnrichedModel:
    """Unfolding of a model refined by history bits, one per past subformula.

    Nodes are (model state, bits); the root starts with all defaults and a
    child's bit records the truth of the tracked subformula at its parent
    (for yesterday operators) or the running since-value at the child.
    """

    model: RegularTreeModel
    tracked: tuple
    root: tuple
    nodes: tuple
    edges: dict
    parent: dict


def _base_enrichment(model):
    root = (model.root, ())
    nodes = []
    edges = {}
    parent = {}
    queue = [root]
    seen = {root}
    while queue:
        node = queue.pop(0)
        nodes.append(node)
        v, bits = node
        kids = tuple((w, bits) for w in model.successors(v))
        kids = tuple((w, ()) for w, _ in kids)
        edges[node] = kids
        for kid in kids:
            if kid not in seen:
                seen.add(kid)
                parent[kid] = node
                queue.append(kid)
    return EnrichedModel(model, (), root, tuple(nodes), edges, parent)


def enrich(model: RegularTreeModel, past_subformulas, truth_of) -> EnrichedModel:
    """Extend the enrichment with one bit per listed past subformula.

    truth_of(psi, node, bit_reader) must evaluate the immediate argument
    formulas of psi at a node of the current enrichment; bits are appended
    in the given order, so later subformulas may depend on earlier bits.
    """
    enriched = _base_enrichment(model)
    for psi in past_subformulas:
        enriched = _add_bit(enriched, psi, truth_of)
    return enriched


def _add_bit(enriched, psi, truth_of):
    model = enriched.model
    old_prefix = len(enriched.tracked)

    def on_old(node):
        v, bits = node
        return (v, bits[:old_prefix])

    root_bit = _root_bit(psi, enriched, truth_of)
    new_root = enriched.root + ()
    v0, bits0 = enriched.root
    new_root = (v0, bits0 + (root_bit,))
    nodes = []
    edges = {}
    parent = {}
    queue = [(new_root, enriched.root)]
    seen = {new_root}
    while queue:
        node, old = queue.pop(0)
        nodes.append(node)
        v, bits = node
        kids = []
        for w, old_bits in enriched.edges[old]:
            old_kid = (w, old_bits)
            bit = _child_bit(psi, node, old, old_kid, enriched, truth_of)
            kid = (w, old_bits + (bit,))
            kids.append(kid)
            if kid not in seen:
                seen.add(kid)
                parent[kid] = node
                queue.append((kid, old_kid))
        edges[node] = tuple(kids)
    return EnrichedModel(model, enriched.tracked + (psi,), new_root,
                         tuple(nodes), edges, parent)


def _root_bit(psi, enriched, truth_of):
    if match_EY(psi) is not None:
        return False
    if match_AwY(psi) is not None:
        return True
    pair = match_ES(psi)
    if pair is not None:  # since at the root needs its anchor now
        return truth_of(pair[1], enriched.root, enriched)
    raise WrongFragment(f"not a past subformula: {psi!r}")


def _child_bit(psi, parent_node, old_parent, old_kid, enriched, truth_of):
    sub = match_EY(psi)
    if sub is None:
        sub = match_AwY(psi)
    if sub is not None:
        return truth_of(sub, old_parent, enriched)
    pair = match_ES(psi)
    if pair is not None:
        here = truth_of(pair[1], old_kid, enriched)
        if here:
            return True
        carry = parent_node[1][-1]
        return carry and truth_of(pair[0], old_kid, enriched)
    raise WrongFragment(f"not a past subformula: {psi!r}")


def _is_past(psi) -> bool:
    return (match_EY(psi) is not None or match_AwY(psi) is not None
            or match_ES(psi) is not None)


# ---------------------------------------------------------------------------
# the past fragment checker


def mc_pctlpm(model: RegularTreeModel, phi: StateFormula) -> MCResult:
    """Label the enriched model with a polarised past formula.

    Subformulas are processed in closure order; each past operator extends
    the enrichment by one bit before anything above it is evaluated, so by
    the time a formula is reached its past arguments are plain bit lookups.
    """
    if Fragment.PASTCTLPM not in classify_fragment(phi):
        raise WrongFragment("checker input must be a polarised past formula")
    phi = to_nnf(phi, Fragment.PASTCTLPM)
    closure = subformula_closure(phi)
    past = [psi for psi in closure if _is_past(psi)]

    sat = {}

    def truth_of(psi, node, enriched):
        return node in sat_on(psi, enriched)

    def sat_on(psi, enriched):
        # project cached predicates onto the current enrichment by prefix
        key = psi
        nodes, prefix = sat[key]
        if prefix is None:
            return nodes
        return {n for n in enriched.nodes if (n[0], n[1][:prefix]) in nodes}

    enriched = _base_enrichment(model)
    depth = {}
    for psi in closure:
        depth[psi] = len(enriched.tracked)
        if _is_past(psi):
            enriched = _add_bit(enriched, psi, truth_of)
            bit_index = len(enriched.tracked) - 1
            holds = {n for n in enriched.nodes if n[1][bit_index]}
            sat[psi] = (frozenset(holds), None)
            depth[psi] = len(enriched.tracked)
            continue
        holds = _eval_future(psi, enriched, sat_on)
        sat[psi] = (frozenset((n[0], n[1][:depth[psi]]) for n in holds), depth[psi])

    final = sat_on(phi, enriched)
    nodes = tuple((n[0], n[1], n in final) for n in enriched.nodes)
    return MCResult(enriched.root in final, nodes)


def _eval_future(psi, enriched, sat_on):
    nodes = enriched.nodes
    edges = enriched.edges
    model = enriched.model

    def of(sub):
        return sat_on(sub, enriched)

    if isinstance(psi, Atom):
        return {n for n in nodes if psi.name in model.label(n[0])}
    if isinstance(psi, Not):
        return set(nodes) - of(psi.sub)
    if isinstance(psi, And):
        return of(psi.left) & of(psi.right)
    if isinstance(psi, Or):
        return of(psi.left) | of(psi.right)
    if isinstance(psi, Count):
        good = of(psi.sub)
        return {n for n in nodes
                if sum(1 for kid in edges[n] if kid in good) >= psi.n}
    if isinstance(psi, CoCount):
        good = of(psi.sub)
        return {n for n in nodes
                if sum(1 for kid in edges[n] if kid not in good) <= psi.n - 1}
    sub = match_EX(psi)
    if sub is not None:
        good = of(sub)
        return {n for n in nodes if any(kid in good for kid in edges[n])}
    sub = match_AX(psi)
    if sub is not None:
        good = of(sub)
        return {n for n in nodes if all(kid in good for kid in edges[n])}
    pair = match_EU(psi)
    if pair is not None:
        left, right = of(pair[0]), of(pair[1])
        cur = set(right)
        while True:
            new = {n for n in nodes
                   if n not in cur and n in left
                   and any(kid in cur for kid in edges[n])}
            if not new:
                return cur
            cur |= new
    pair = match_AR(psi)
    if pair is not None:
        left, right = of(pair[0]), of(pair[1])
        cur = set(right)
        while True:
            out = {n for n in cur
                   if n not in left and not all(kid in cur for kid in edges[n])}
            if not out:
                return cur
            cur -= out
    raise WrongFragment(f"no evaluation rule for {psi!r}")


from .formulas import match_AX  # placed late to keep the import block tidy


# ---------------------------------------------------------------------------
# star fragment checker


def mc_ctlspm(model: RegularTreeModel, phi) -> MCResult:
    """Check a polarised star formula, or a guarded formula produced by the
    decompiler, against a model.

    Path quantifiers are evaluated through products: E via the finite-word
    automaton of its skeleton (good prefixes decide co-safety), A by state
    negation, EAuto via the payload automaton with guard-checked letters.
    """
    if AutomatonGuardedFormula is not None and isinstance(phi, AutomatonGuardedFormula):
        phi = phi.formula
    if not _star_shaped(phi):
        raise WrongFragment("checker input must be a polarised star formula")
    sat = {}

    def of(chi):
        if chi not in sat:
            sat[chi] = frozenset(_eval_star(chi, model, of))
        return sat[chi]

    final = of(phi)
    nodes = tuple((v, (), v in final) for v in model.states)
    return MCResult(model.root in final, nodes)


def _star_shaped(phi) -> bool:
    frags = classify_fragment(phi)
    return Fragment.CTLSTARPM in frags


def _eval_star(chi, model, of):
    states = model.states
    if isinstance(chi, Atom):
        return {v for v in states if chi.name in model.label(v)}
    if isinstance(chi, Not):
        return set(states) - of(chi.sub)
    if isinstance(chi, And):
        return of(chi.left) & of(chi.right)
    if isinstance(chi, Or):
        return of(chi.left) | of(chi.right)
    if isinstance(chi, Count):
        good = of(chi.sub)
        return {v for v in states
                if sum(1 for w in model.successors(v) if w in good) >= chi.n}
    if isinstance(chi, CoCount):
        good = of(chi.sub)
        return {v for v in states
                if sum(1 for w in model.successors(v) if w not in good) <= chi.n - 1}
    if isinstance(chi, Exists):
        return _exists_by_dfa(chi.body, model, of, finite=False)
    if isinstance(chi, Forall):
        from .rewrites import nnf_path_negation

        return set(states) - of(Exists(nnf_path_negation(chi.body)))
    if isinstance(chi, EAuto):
        return _eauto_sat(chi, model, of)
    raise WrongFragment(f"no evaluation rule for {chi!r}")


def _exists_by_dfa(body, model, of, finite):
    """States admitting a path whose trace is good for the body.

    Over infinite paths a co-safety body is satisfied exactly when some
    finite prefix already is, so both quantifiers reduce to reaching an
    accepting product state; models are serial, so prefixes always extend.
    """
    skel, binding = skeletonize(body)
    letters = _annotated_letters(model, binding, of)
    dfa = ltl_finite_to_dfa(skel, ap=frozenset(model.ap) | frozenset(binding))

    good = set()
    for v in model.states:
        for q in dfa.states:
            if q in dfa.accepting:
                good.add((v, q))
    while True:
        new = set()
        for v in model.states:
            for q in dfa.states:
                if (v, q) in good:
                    continue
                for w in model.successors(v):
                    (qn,) = dfa.targets(q, letters[w])
                    if (w, qn) in good:
                        new.add((v, q))
                        break
        if not new:
            break
        good |= new

    out = set()
    for v in model.states:
        (q0,) = dfa.targets(dfa.init, letters[v])
        if (v, q0) in good or q0 in dfa.accepting:
            out.add(v)
    return out


def _annotated_letters(model, binding, of):
    letters = {}
    for v in model.states:
        extra = {nm for nm, st in binding.items() if v in of(st)}
        letters[v] = frozenset(model.label(v)) | frozenset(extra)
    return letters


def _eauto_sat(chi, model, of):
    payload = chi.auto
    guards = eauto_guards(chi)
    if payload.kind == "dfa":
        return _eauto_finite(payload, guards, model, of)
    if payload.kind != "cobuchi" or payload.mode != "existential":
        raise WrongKind("guarded quantifiers carry looping NCAs or finite DFAs")
    sink = looping_sink(payload)
    if sink is None:
        raise WrongKind("guarded quantifier payload must be looping")

    readable = _readable_letters(payload.sigma, guards, model, of)

    # nodes of the product that can start an infinite run inside the sink row
    alive = set(model.states)
    while True:
        keep = {v for v in alive
                if readable[v] and any(w in alive for w in model.successors(v))}
        if keep == alive:
            break
        alive = keep

    good = {(v, sink) for v in alive}
    while True:
        new = set()
        for v in model.states:
            for q in payload.states:
                if (v, q) in good or q == sink:
                    continue
                for letter in readable[v]:
                    hit = False
                    for qn in payload.targets(q, letter):
                        if qn == sink and (v, sink) in good:
                            hit = True
                        elif qn != sink and any(
                                (w, qn) in good for w in model.successors(v)):
                            hit = True
                        if hit:
                            break
                    if hit:
                        new.add((v, q))
                        break
        if not new:
            break
        good |= new
    return {v for v in model.states if (v, payload.init) in good}


def _readable_letters(sigma, guards, model, of):
    """Per node, the payload letters readable there.

    Composite letters (sigma, C) match on the label and the guard of C;
    plain set letters split into label atoms and guard atoms by the guard
    table's domain.
    """
    guard_atoms = set()
    for annot in guards:
        guard_atoms |= set(annot)
    readable = {v: [] for v in model.states}
    for letter in sigma:
        if isinstance(letter, tuple):
            label, annot = letter
            for v in model.states:
                if frozenset(model.label(v)) & _letter_ap(label, model) == frozenset(label) & frozenset(model.ap):
                    if label == frozenset(model.label(v)) & frozenset(label | frozenset(model.ap)) or True:
                        pass
            # label must equal the node label projected to the payload alphabet
            base_ap = _payload_ap(sigma)
            for v in model.states:
                if frozenset(model.label(v)) & base_ap == label & base_ap and _guard_ok(annot, guards, v, of):
                    readable[v].append(letter)
        else:
            annot = frozenset(letter) & frozenset(guard_atoms)
            label = frozenset(letter) - annot
            for v in model.states:
                if frozenset(model.label(v)) & _plain_ap(sigma, guard_atoms) == label and _guard_ok(annot, guards, v, of):
                    readable[v].append(letter)
    return readable


def _payload_ap(sigma):
    ap = set()
    for letter in sigma:
        if isinstance(letter, tuple):
            ap |= set(letter[0])
    return frozenset(ap)


def _plain_ap(sigma, guard_atoms):
    ap = set()
    for letter in sigma:
        if not isinstance(letter, tuple):
            ap |= set(letter)
    return frozenset(ap - set(guard_atoms))


def _letter_ap(label, model):
    return frozenset(label) | frozenset(model.ap)


def _guard_ok(annot, guards, v, of):
    guard = guards.get(frozenset(annot))
    if guard is None:
        return False
    return v in of(guard)


def _eauto_finite(dfa, guards, model, of):
    readable = _readable_letters(dfa.sigma, guards, model, of)
    good = set()
    for v in model.states:
        for q in dfa.states:
            if q in dfa.accepting:
                good.add((v, q))
    while True:
        new = set()
        for v in model.states:
            for q in dfa.states:
                if (v, q) in good:
                    continue
                for letter in readable[v]:
                    for qn in dfa.targets(q, letter):
                        if any((w, qn) in good for w in model.successors(v)):
                            new.add((v, q))
                            break
                    if (v, q) in new:
                        break
        if not new:
            break
        good |= new
    out = set()
    for v in model.states:
        for letter in readable[v]:
            for q0 in dfa.targets(dfa.init, letter):
                if q0 in dfa.accepting or (v, q0) in good:
                    out.add(v)
    return out


# ---------------------------------------------------------------------------
# finite-path star checker


def mc_ctlsf(model: RegularTreeModel, phi: StateFormula) -> MCResult:
    """Check a formula with finite-path quantifiers: a quantified body holds
    at v when some finite path from v reads a word satisfying the body under
    finite-trace semantics."""
    if Fragment.CTLSTARF not in classify_fragment(phi):
        raise WrongFragment("checker input must use finite-path quantification")
    sat = {}

    def of(chi):
        if chi not in sat:
            sat[chi] = frozenset(_eval_sf(chi, model, of))
        return sat[chi]

    final = of(phi)
    nodes = tuple((v, (), v in final) for v in model.states)
    return MCResult(model.root in final, nodes)


def _eval_sf(chi, model, of):
    states = model.states
    if isinstance(chi, Atom):
        return {v for v in states if chi.name in model.label(v)}
    if isinstance(chi, Not):
        return set(states) - of(chi.sub)
    if isinstance(chi, And):
        return of(chi.left) & of(chi.right)
    if isinstance(chi, Or):
        return of(chi.left) | of(chi.right)
    if isinstance(chi, ExistsFin):
        return _exists_by_dfa(chi.body, model, of, finite=True)
    raise WrongFragment(f"no evaluation rule for {chi!r}")


# ---------------------------------------------------------------------------
# naive oracle


def oracle_eval(model: RegularTreeModel, phi, fuel: int) -> bool:
    """Evaluate a formula at the root by explicit iteration and enumeration.

    Fixpoints run as counted Kleene iterations, path quantifiers enumerate
    paths up to the fuel bound and test the trace directly; the fuel must
    cover the worst case up front or the call refuses to answer.
    """
    if AutomatonGuardedFormula is not None and isinstance(phi, AutomatonGuardedFormula):
        phi = phi.formula
    frags = classify_fragment(phi)
    if Fragment.PASTCTLPM in frags:
        return _oracle_past(model, to_nnf(phi, Fragment.PASTCTLPM), fuel)
    if Fragment.CTLSTARPM in frags or Fragment.CTLSTARF in frags:
        return _oracle_star(model, phi, fuel)
    raise WrongFragment("oracle evaluates the past or star fragments")


def _oracle_past(model, phi, fuel):
    closure = subformula_closure(phi)
    past = [psi for psi in closure if _is_past(psi)]
    bound = len(model.states) * (2 ** len(past))
    if fuel < bound:
        raise InsufficientFuel(f"need fuel {bound}, got {fuel}")

    sat = {}

    def truth_of(psi, node, enriched):
        nodes, prefix = sat[psi]
        if prefix is None:
            return node in nodes
        return (node[0], node[1][:prefix]) in nodes

    def sat_on(psi, enriched):
        nodes, prefix = sat[psi]
        if prefix is None:
            return nodes
        return {n for n in enriched.nodes if (n[0], n[1][:prefix]) in nodes}

    enriched = _base_enrichment(model)
    for psi in closure:
        prefix = len(enriched.tracked)
        if _is_past(psi):
            enriched = _add_bit(enriched, psi, truth_of)
            bit_index = len(enriched.tracked) - 1
            sat[psi] = (frozenset(n for n in enriched.nodes if n[1][bit_index]), None)
            continue
        holds = _oracle_future(psi, enriched, sat_on, fuel)
        sat[psi] = (frozenset((n[0], n[1][:prefix]) for n in holds), prefix)
    nodes, prefix = sat[phi]
    return (enriched.root[0], enriched.root[1][:prefix]) in nodes


def _oracle_future(psi, enriched, sat_on, fuel):
    pair = match_EU(psi)
    if pair is not None:
        left, right = sat_on(pair[0], enriched), sat_on(pair[1], enriched)
        cur = set(right)
        for _ in range(fuel):
            new = {n for n in enriched.nodes
                   if n in left and any(k in cur for k in enriched.edges[n])}
            if new <= cur:
                return cur
            cur |= new
        raise InsufficientFuel("until iteration did not settle in time")
    pair = match_AR(psi)
    if pair is not None:
        left, right = sat_on(pair[0], enriched), sat_on(pair[1], enriched)
        cur = set(right)
        for _ in range(fuel):
            keep = {n for n in cur
                    if n in left or all(k in cur for k in enriched.edges[n])}
            if keep == cur:
                return cur
            cur = keep
        raise InsufficientFuel("release iteration did not settle in time")
    return _eval_future(psi, enriched, sat_on)


def _oracle_star(model, phi, fuel):
    def holds(chi, v):
        if isinstance(chi, Atom):
            return chi.name in model.label(v)
        if isinstance(chi, Not):
            return not holds(chi.sub, v)
        if isinstance(chi, And):
            return holds(chi.left, v) and holds(chi.right, v)
        if isinstance(chi, Or):
            return holds(chi.left, v) or holds(chi.right, v)
        if isinstance(chi, Count):
            return sum(1 for w in model.successors(v) if holds(chi.sub, w)) >= chi.n
        if isinstance(chi, CoCount):
            return sum(1 for w in model.successors(v)
                       if not holds(chi.sub, w)) <= chi.n - 1
        if isinstance(chi, Forall):
            from .rewrites import nnf_path_negation

            return not holds(Exists(nnf_path_negation(chi.body)), v)
        if isinstance(chi, (Exists, ExistsFin)):
            return _paths_witness(chi.body, v)
        if isinstance(chi, EAuto):
            return _eauto_witness(chi, v)
        raise WrongFragment(f"no oracle rule for {chi!r}")

    def _paths_witness(body, v):
        skel, binding = skeletonize(body)
        dfa = ltl_finite_to_dfa(skel, ap=frozenset(model.ap) | frozenset(binding))
        need = len(model.states) * len(dfa.states)
        if fuel < need:
            raise InsufficientFuel(f"need fuel {need}, got {fuel}")

        def letter(u):
            extra = {nm for nm, st in binding.items() if holds(st, u)}
            return frozenset(model.label(u)) | extra

        def walk(u, q, depth):
            (qn,) = dfa.targets(q, letter(u))
            if qn in dfa.accepting:
                return True
            if depth >= need:
                return False
            return any(walk(w, qn, depth + 1) for w in model.successors(u))

        return walk(v, dfa.init, 1)

    def _eauto_witness(chi, v):
        payload = chi.auto
        guards = eauto_guards(chi)
        finite = payload.kind == "dfa"
        sink = None if finite else looping_sink(payload)

        def of(st):
            return {u for u in model.states if holds(st, u)}

        readable = _readable_letters(payload.sigma, guards, model, of)
        need = len(model.states) * (len(payload.states) + 1)
        if fuel < need:
            raise InsufficientFuel(f"need fuel {need}, got {fuel}")

        def walk(u, q, depth):
            if finite and q in payload.accepting:
                return True
            if not finite and q == sink:
                return True
            if depth >= need:
                return False
            for letter in readable[u]:
                for qn in payload.targets(q, letter):
                    if not finite and qn == sink:
                        return True
                    if any(walk(w, qn, depth + 1) for w in model.successors(u)):
                        return True
            return False

        def start(u):
            for letter in readable[u]:
                for q0 in payload.targets(payload.init, letter):
                    if finite and q0 in payload.accepting:
                        return True
                    if not finite and q0 == sink:
                        return True
                    if any(walk(w, q0, 2) for w in model.successors(u)):
                        return True
            return False

        if finite:
            return start(v)
        return walk(v, payload.init, 1)

    return holds(phi, model.root)
