"""Compilers between branching-time formulas and hesitant tree automata.

Four passes: the polarised past logic compiles to a two-way linear automaton
and back (state space = subformula closure, decompilation through the f
tables), and the polarised star logic compiles to a one-way counter-free
visible automaton and back (decompilation emits automaton-guarded path
quantifiers instead of extracting co-safety formulas syntactically).
"""

import itertools
from dataclasses import dataclass

from .errors import (BadAutomaton, NotPolarisedHesitant, NotSimpleForm,
                     NotTwoWayLinear, UnsupportedFragment, VisibilityViolated,
                     WrongFragment)
from .formulas import (And, Atom, CoCount, Count, EAuto, Embed, Exists,
                       ExistsFin, Forall, Next, Not, Or, PathAnd, PathOr,
                       StateFormula, Until, WeakNext, atoms_of, f_and,
                       f_and_all, f_imp, f_not, f_or_all, match_AR, match_AwY,
                       match_AX, match_ES, match_EU, match_EX, match_EY, mk_ES, mk_EU,
                       mk_EY, mk_eauto, mk_false, mk_true, to_text)
from .fragments import Fragment, classify_fragment
from .ltl import alphabet_of, fragment_to_looping_word_automaton
from .rewrites import (FRESH_PREFIX, nnf_path_negation, skeletonize,
                       subformula_closure, to_nnf)
from .trees import (DualityRegistry, TAnd, TAtom, TFalse, TOr, TTrue,
                    TreeAutomaton, box, dia, dual_atom, dualize_tree,
                    linear_split, linearize_component, make_tree_automaton,
                    normalize_linear_transitions, structural_report, tf_and,
                    tf_and_all, tf_or, tf_or_all, up, validate_tree_automaton,
                    visibility_check)
from .words import looping_sink


# ---------------------------------------------------------------------------
# past fragment -> two-way linear automaton


def pctlpm_to_hta(phi: StateFormula) -> TreeAutomaton:
    """Compile a polarised past formula into a two-way linear automaton whose
    states are the closure subformulas.

    Every state unfolds its own operator one step: until loops through a
    diamond on itself, release through a box, since through an up move.  The
    component order is the closure order, so the result is hesitant by
    construction, and polarised because only release states are accepting.
    """
    if Fragment.PASTCTLPM not in classify_fragment(phi):
        raise WrongFragment("compilation input must be a polarised past formula")
    phi = to_nnf(phi, Fragment.PASTCTLPM)
    closure = subformula_closure(phi)
    ap = frozenset(atoms_of(phi))
    sigmas = alphabet_of(ap)

    names = {}
    used = set()
    for psi in closure:
        base = to_text(psi)
        name = base
        n = 2
        while name in used:  # true/false sugar can collide across atom choices
            name = f"{base}#{n}"
            n += 1
        names[psi] = name
        used.add(name)

    accepting = set()
    partition = []
    for psi in closure:
        if match_EU(psi) is not None:
            ctype = "existential"
        elif match_AR(psi) is not None:
            ctype = "universal"
            accepting.add(names[psi])
        elif match_ES(psi) is not None:
            ctype = "upward"
        else:
            ctype = "transient"
        partition.append((frozenset({names[psi]}), ctype))

    memo = {}

    def dtf(psi, sigma, flag):
        key = (psi, sigma, flag)
        if key in memo:
            return memo[key]
        out = _past_delta(psi, sigma, flag, names, dtf)
        memo[key] = out
        return out

    delta = {}
    for psi in closure:
        for sigma in sigmas:
            for flag in ("root", "nonroot"):
                delta[(names[psi], sigma, flag)] = dtf(psi, sigma, flag)

    return make_tree_automaton(
        states=tuple(names[psi] for psi in closure),
        ap=ap,
        two_way=True,
        init=names[phi],
        accepting=accepting,
        partition=partition,
        delta=delta,
    )


def _past_delta(psi, sigma, flag, names, dtf):
    if isinstance(psi, Atom):
        return TTrue() if psi.name in sigma else TFalse()
    if isinstance(psi, Not):  # NNF: negation sits on an atom
        return TTrue() if psi.sub.name not in sigma else TFalse()
    if isinstance(psi, And):
        return tf_and(dtf(psi.left, sigma, flag), dtf(psi.right, sigma, flag))
    if isinstance(psi, Or):
        return tf_or(dtf(psi.left, sigma, flag), dtf(psi.right, sigma, flag))
    if isinstance(psi, Count):
        return dia(psi.n, names[psi.sub])
    if isinstance(psi, CoCount):
        return box(psi.n, names[psi.sub])
    sub = match_EX(psi)
    if sub is not None:
        return dia(1, names[sub])
    sub = match_AX(psi)
    if sub is not None:
        return box(1, names[sub])
    sub = match_EY(psi)
    if sub is not None:
        return up(names[sub]) if flag == "nonroot" else TFalse()
    sub = match_AwY(psi)
    if sub is not None:
        return up(names[sub]) if flag == "nonroot" else TTrue()
    pair = match_EU(psi)
    if pair is not None:
        return tf_or(dtf(pair[1], sigma, flag),
                     tf_and(dtf(pair[0], sigma, flag), dia(1, names[psi])))
    pair = match_AR(psi)
    if pair is not None:
        return tf_and(dtf(pair[1], sigma, flag),
                      tf_or(dtf(pair[0], sigma, flag), box(1, names[psi])))
    pair = match_ES(psi)
    if pair is not None:
        if flag == "root":  # no parent: since collapses to its anchor
            return dtf(pair[1], sigma, flag)
        return tf_or(dtf(pair[1], sigma, flag),
                     tf_and(dtf(pair[0], sigma, flag), up(names[psi])))
    raise WrongFragment(f"no transition rule for {psi!r}")


# ---------------------------------------------------------------------------
# two-way linear automaton -> past fragment


def hta_to_pctlpm(auto: TreeAutomaton) -> StateFormula:
    """Decompile a two-way linear automaton into a polarised past formula.

    Each state q becomes a formula over the split transitions: beta describes
    one step of staying in q, beta' one step of leaving, both with an
    explicit root/non-root case distinction keyed on E Y true.  Weak until
    for universal states is spelled with negations to stay in the grammar.
    """
    rep = structural_report(auto)
    if not (rep.two_way and rep.linear and rep.hesitant and rep.polarised):
        raise NotTwoWayLinear("decompilation needs a two-way linear polarised hesitant automaton")
    if not auto.ap:
        raise BadAutomaton("decompilation needs at least one atomic proposition")
    auto = normalize_linear_transitions(auto)
    ap = sorted(auto.ap)
    sigmas = alphabet_of(auto.ap)
    has_parent = mk_EY(mk_true(ap))
    label_of = {sigma: _label_formula(sigma, ap) for sigma in sigmas}
    memo = {}

    def f_state(q):
        if q in memo:
            return memo[q]
        ctype = auto.component_type(q)

        def beta(primed):
            cases = []
            for flag, guard in (("nonroot", has_parent), ("root", f_not(has_parent))):
                parts = []
                for sigma in sigmas:
                    _self, alpha, alpha_prime = linear_split(auto, q, sigma, flag)
                    tf = alpha_prime if primed else alpha
                    parts.append(f_imp(label_of[sigma], f_tf(tf)))
                cases.append(f_imp(guard, f_and_all(parts, ap)))
            return f_and(cases[0], cases[1])

        if ctype == "transient":
            out = beta(True)
        elif ctype == "existential":
            out = mk_EU(beta(False), beta(True))
        elif ctype == "upward":
            out = mk_ES(beta(False), beta(True))
        else:  # universal: A(b W b') as !E(!b' U (!b & !b'))
            b, bp = beta(False), beta(True)
            out = f_not(mk_EU(f_not(bp), f_and(f_not(b), f_not(bp))))
        memo[q] = out
        return out

    def f_tf(tf):
        if isinstance(tf, TTrue):
            return mk_true(ap)
        if isinstance(tf, TFalse):
            return mk_false(ap)
        if isinstance(tf, TAnd):
            return f_and(f_tf(tf.left), f_tf(tf.right))
        if isinstance(tf, TOr):
            return f_or_all([f_tf(tf.left), f_tf(tf.right)], ap)
        op, k, q = tf.atom
        if op == "dia":
            return Count(k, f_state(q))
        if op == "box":
            return Not(Count(k, Not(f_state(q))))
        return mk_EY(f_state(q))

    return f_state(auto.init)


def _label_formula(sigma, ap):
    lits = [Atom(p) if p in sigma else Not(Atom(p)) for p in ap]
    return f_and_all(lits, ap)


# ---------------------------------------------------------------------------
# star fragment -> counter-free visible automaton


def ctlspm_to_hta(phi: StateFormula):
    """Compile a polarised star formula into a counter-free visible hesitant
    automaton, returning it with the duality registry that certifies
    visibility.

    The path-quantifier case turns the body into an LTL skeleton over fresh
    atoms, compiles the skeleton to a looping word automaton, and grafts that
    automaton in as the top existential component; each fresh atom is decided
    at every step by guessing whether the graded subformula behind it holds
    and spawning the positive or dualised sub-automaton accordingly.
    """
    if Fragment.CTLSTARPM not in classify_fragment(phi):
        raise WrongFragment("compilation input must be a polarised star formula")
    registry = DualityRegistry()
    compiler = _StarCompiler(frozenset(atoms_of(phi)), registry)
    raw = compiler.compile(phi)
    mapping = {s: f"s{i}" for i, s in enumerate(raw.states)}
    auto = _rename_tree(raw, mapping)
    validate_tree_automaton(auto)
    return auto, _renamed_filtered(registry, mapping, set(raw.states))


class _StarCompiler:
    def __init__(self, ap, registry):
        self.ap = frozenset(ap)
        self.sigmas = alphabet_of(ap)
        self.registry = registry
        self._counter = itertools.count()

    def fresh(self, tag="t"):
        return f"{tag}{next(self._counter)}"

    def compile(self, phi) -> TreeAutomaton:
        if isinstance(phi, Atom):
            return self._atom(phi.name)
        if isinstance(phi, Not):
            return self.dual_copy(self.compile(phi.sub))
        if isinstance(phi, (And, Or)):
            return self._boolean(phi)
        if isinstance(phi, Count):
            return self._graded(phi.n, self.compile(phi.sub), positive=True)
        if isinstance(phi, CoCount):
            dual = self.dual_copy(self.compile(phi.sub))
            return self._graded(phi.n, dual, positive=False)
        if isinstance(phi, Exists):
            return self._exists(phi.body)
        if isinstance(phi, Forall):
            return self.dual_copy(self.compile(Exists(nnf_path_negation(phi.body))))
        if isinstance(phi, EAuto):
            raise UnsupportedFragment("guarded-automaton nodes are model checked, not compiled")
        raise WrongFragment(f"no compilation case for {phi!r}")

    # -- leaf and glue cases

    def _atom(self, p):
        q = self.fresh()
        delta = {(q, sigma, "any"): TTrue() if p in sigma else TFalse()
                 for sigma in self.sigmas}
        return TreeAutomaton((q,), self.ap, False, q, frozenset(),
                             ((frozenset({q}), "transient"),), delta)

    def _boolean(self, phi):
        left = self.compile(phi.left)
        right = self.compile(phi.right)
        glue = tf_and if isinstance(phi, And) else tf_or
        q = self.fresh()
        delta = dict(left.delta)
        delta.update(right.delta)
        for sigma in self.sigmas:
            delta[(q, sigma, "any")] = glue(left.delta[(left.init, sigma, "any")],
                                            right.delta[(right.init, sigma, "any")])
        states = right.states + left.states + (q,)
        partition = right.partition + left.partition + ((frozenset({q}), "transient"),)
        return TreeAutomaton(states, self.ap, False, q,
                             left.accepting | right.accepting, partition, delta)

    def _graded(self, n, sub, positive):
        q = self.fresh()
        atom = dia(n, sub.init) if positive else box(n, sub.init)
        delta = dict(sub.delta)
        for sigma in self.sigmas:
            delta[(q, sigma, "any")] = atom
        return TreeAutomaton(sub.states + (q,), self.ap, False, q, sub.accepting,
                             sub.partition + ((frozenset({q}), "transient"),), delta)

    # -- duality with pair bookkeeping

    def dual_copy(self, base: TreeAutomaton) -> TreeAutomaton:
        dual = dualize_tree(base)
        mapping = {s: self.fresh("d") for s in dual.states}
        renamed = _rename_tree(dual, mapping)
        base_states = set(base.states)
        for key in list(self.registry.provenance):
            a, b = sorted(key)
            if a[2] in base_states and b[2] in base_states:
                ra = _rename_atom(dual_atom(a), mapping)
                rb = _rename_atom(dual_atom(b), mapping)
                self.registry.register(ra, rb)
        return renamed

    # -- the path quantifier case

    def _exists(self, gamma) -> TreeAutomaton:
        body = _guard_path(gamma, self.ap)
        skel, binding = skeletonize(body)
        names = sorted(binding, key=lambda nm: int(nm[len(FRESH_PREFIX):]))
        grades = []
        for nm in names:
            target = binding[nm]
            if not isinstance(target, Count):
                raise NotSimpleForm(f"path body embeds {to_text(target)} outside a grade")
            pos = self.compile(target.sub)
            neg = self.dual_copy(pos)
            grades.append((target.n, pos, neg))
            self.registry.register(("dia", target.n, pos.init),
                                   ("box", target.n, neg.init))

        nca = fragment_to_looping_word_automaton(
            skel, "cosafe", ap=self.ap | frozenset(names))
        sink = looping_sink(nca)
        rename = {q: self.fresh("n") for q in nca.states if q != sink}
        comp_states = tuple(rename[q] for q in nca.states if q != sink)

        delta = {}
        states = []
        partition = []
        accepting = frozenset()
        for _n, pos, neg in grades:
            for sub in (pos, neg):
                delta.update(sub.delta)
                states.extend(sub.states)
                partition.extend(sub.partition)
                accepting |= sub.accepting

        k = len(names)
        for q in nca.states:
            if q == sink:
                continue
            for sigma in self.sigmas:
                clauses = []
                for mask in range(1 << k):
                    chosen = [i for i in range(k) if mask >> i & 1]
                    letter = frozenset(sigma | {names[i] for i in chosen})
                    obligations = [
                        dia(grades[i][0], grades[i][1].init) if mask >> i & 1
                        else box(grades[i][0], grades[i][2].init)
                        for i in range(k)
                    ]
                    for q2 in sorted(nca.targets(q, letter)):
                        conj = list(obligations)
                        if q2 != sink:
                            conj.append(dia(1, rename[q2]))
                        clauses.append(tf_and_all(conj))
                delta[(rename[q], sigma, "any")] = tf_or_all(clauses)

        states.extend(comp_states)
        partition.append((frozenset(comp_states), "existential"))
        return TreeAutomaton(tuple(states), self.ap, False, rename[nca.init],
                             accepting, tuple(partition), delta)


def _rename_atom(atom, mapping):
    op, k, s = atom
    return (op, k, mapping.get(s, s))


def _map_tf(tf, mapping):
    if isinstance(tf, TAtom):
        return TAtom(_rename_atom(tf.atom, mapping))
    if isinstance(tf, TAnd):
        return TAnd(_map_tf(tf.left, mapping), _map_tf(tf.right, mapping))
    if isinstance(tf, TOr):
        return TOr(_map_tf(tf.left, mapping), _map_tf(tf.right, mapping))
    return tf


def _rename_tree(auto: TreeAutomaton, mapping: dict) -> TreeAutomaton:
    return TreeAutomaton(
        states=tuple(mapping[s] for s in auto.states),
        ap=auto.ap,
        two_way=auto.two_way,
        init=mapping[auto.init],
        accepting=frozenset(mapping[s] for s in auto.accepting),
        partition=tuple((frozenset(mapping[s] for s in comp), t)
                        for comp, t in auto.partition),
        delta={(mapping[q], sigma, flag): _map_tf(tf, mapping)
               for (q, sigma, flag), tf in auto.delta.items()},
    )


def _renamed_filtered(registry, mapping, live_states):
    out = DualityRegistry()
    for key, prov in registry.provenance.items():
        a, b = sorted(key)
        if a[2] in live_states and b[2] in live_states:
            out.register(_rename_atom(a, mapping), _rename_atom(b, mapping), prov)
    return out


# -- sound guarding of embedded path quantifiers
#
# A quantifier nested below another path quantifier has to sit under a grade
# before skeletonisation can treat it as a letter.  Wrapping E psi in D^1
# changes its meaning, so instead we unfold one step: E psi is equivalent to
# the disjunction over first-step decompositions psi = now & X tail of
# now & D^1 E tail, which is a state-level equivalence and safe to substitute
# at any path position.


def _guard_path(psi, ap):
    if isinstance(psi, Embed):
        return Embed(_guard_embedded(psi.state, ap))
    if isinstance(psi, (PathAnd, PathOr, Until)):
        return type(psi)(_guard_path(psi.left, ap), _guard_path(psi.right, ap))
    if isinstance(psi, Next):
        return Next(_guard_path(psi.sub, ap))
    raise WrongFragment("existential bodies combine X and U over state formulas")


def _guard_embedded(chi, ap):
    if isinstance(chi, Atom):
        return chi
    if isinstance(chi, Not):
        return Not(_guard_embedded(chi.sub, ap))
    if isinstance(chi, (And, Or)):
        return type(chi)(_guard_embedded(chi.left, ap), _guard_embedded(chi.right, ap))
    if isinstance(chi, Count):
        return chi
    if isinstance(chi, CoCount):
        return Not(Count(chi.n, Not(chi.sub)))
    if isinstance(chi, Exists):
        return _expand_exists(chi.body, ap)
    if isinstance(chi, Forall):
        return Not(_expand_exists(nnf_path_negation(chi.body), ap))
    raise UnsupportedFragment(f"cannot guard {chi!r} inside a path body")


def _expand_exists(gamma, ap) -> StateFormula:
    parts = []
    for now, tail in _first_step(_guard_path(gamma, ap)):
        if tail is None:
            parts.append(now)
        else:
            step = Count(1, Exists(tail))
            parts.append(step if now is None else And(now, step))
    return f_or_all(parts, ap)


def _first_step(psi):
    """Decompose into pairs (now, tail) with psi equivalent to the
    disjunction of now & X tail; either slot may be None for 'no demand'."""
    if isinstance(psi, Embed):
        return [(psi.state, None)]
    if isinstance(psi, Next):
        return [(None, psi.sub)]
    if isinstance(psi, PathOr):
        return _first_step(psi.left) + _first_step(psi.right)
    if isinstance(psi, PathAnd):
        out = []
        for s1, t1 in _first_step(psi.left):
            for s2, t2 in _first_step(psi.right):
                now = s1 if s2 is None else s2 if s1 is None else And(s1, s2)
                tail = t1 if t2 is None else t2 if t1 is None else PathAnd(t1, t2)
                out.append((now, tail))
        return out
    if isinstance(psi, Until):
        out = list(_first_step(psi.right))
        for s, t in _first_step(psi.left):
            out.append((s, psi if t is None else PathAnd(t, psi)))
        return out
    raise WrongFragment(f"cannot take a first step of {psi!r}")


# ---------------------------------------------------------------------------
# counter-free visible automaton -> star fragment with guarded quantifiers


@dataclass(frozen=True)
class AutomatonGuardedFormula:
    """Star-fragment formula whose path quantifiers are word automata with
    guard tables; carries a flag when visibility rested on sampling only."""

    formula: StateFormula
    visibility_warning: bool = False


def hta_to_ctlspm(auto: TreeAutomaton, registry: DualityRegistry = None) -> AutomatonGuardedFormula:
    """Decompile a counter-free visible automaton into a guarded star formula.

    Transient states enumerate their letters, existential states become a
    guarded quantifier over the component linearisation, and universal states
    go through the dual automaton and a negation.  The annotation guard for C
    is the conjunction of the translations of the atoms in C.
    """
    rep = structural_report(auto)
    if auto.two_way or not (rep.hesitant and rep.polarised):
        raise NotPolarisedHesitant("decompilation needs a one-way polarised hesitant automaton")
    if not auto.ap:
        raise BadAutomaton("decompilation needs at least one atomic proposition")
    vis = visibility_check(auto, registry)
    if vis.status == "Violated":
        raise VisibilityViolated(f"overlapping annotations: {vis.witness}")

    ap = sorted(auto.ap)
    sigmas = alphabet_of(auto.ap)
    label_of = {sigma: _label_formula(sigma, ap) for sigma in sigmas}
    autos = {False: auto, True: dualize_tree(auto)}
    memo = {}

    def trans(q, flipped):
        key = (q, flipped)
        if key in memo:
            return memo[key]
        source = autos[flipped]
        ctype = source.component_type(q)
        if ctype == "transient":
            out = f_or_all(
                [f_and(label_of[sigma], from_tf(source.dval(q, sigma), flipped))
                 for sigma in sigmas], ap)
        elif ctype == "existential":
            nca = linearize_component(source, q)
            annots = sorted({c for _sigma, c in nca.sigma},
                            key=lambda c: (len(c), sorted(c)))
            guards = {c: f_and_all([from_atom(th, flipped) for th in sorted(c)], ap)
                      for c in annots}
            out = mk_eauto(nca, guards)
        else:
            out = Not(trans(q, not flipped))
        memo[key] = out
        return out

    def from_tf(tf, flipped):
        if isinstance(tf, TTrue):
            return mk_true(ap)
        if isinstance(tf, TFalse):
            return mk_false(ap)
        if isinstance(tf, TAnd):
            return f_and(from_tf(tf.left, flipped), from_tf(tf.right, flipped))
        if isinstance(tf, TOr):
            return f_or_all([from_tf(tf.left, flipped), from_tf(tf.right, flipped)], ap)
        return from_atom(tf.atom, flipped)

    def from_atom(th, flipped):
        op, k, q = th
        if op == "dia":
            return Count(k, trans(q, flipped))
        if op == "box":
            return Not(Count(k, Not(trans(q, flipped))))
        raise NotPolarisedHesitant("up atoms cannot appear in one-way automata")

    return AutomatonGuardedFormula(trans(auto.init, False),
                                   vis.status == "Unknown")


# ---------------------------------------------------------------------------
# finite-path quantification bridge


def ctlsf_bridge(phi: StateFormula) -> StateFormula:
    """Rewrite finite-path quantifiers into automaton-guarded form.

    Release is eliminated first (finite semantics makes it an until), a
    finite-path quantifier over a weak next is plain truth, and every
    surviving quantifier becomes a deterministic finite-word automaton over
    the skeleton letters, checked by good-path reachability.
    """
    if Fragment.CTLSTARF not in classify_fragment(phi):
        raise WrongFragment("bridge input must use finite-path quantification")
    return _bridge_state(phi, frozenset(atoms_of(phi)))


def _bridge_state(chi, ap):
    if isinstance(chi, Atom):
        return chi
    if isinstance(chi, Not):
        return Not(_bridge_state(chi.sub, ap))
    if isinstance(chi, (And, Or)):
        return type(chi)(_bridge_state(chi.left, ap), _bridge_state(chi.right, ap))
    if isinstance(chi, ExistsFin):
        body = _bridge_path(chi.body, ap)
        if isinstance(body, WeakNext):
            return mk_true(sorted(ap))  # one-node paths satisfy any weak next
        from .rewrites import eliminate_release_finite
        from .ltl import ltl_finite_to_dfa

        flat = eliminate_release_finite(body, ap=sorted(ap))
        skel, binding = skeletonize(flat)
        bound = {nm: _bridge_state(st, ap) for nm, st in binding.items()}
        dfa = ltl_finite_to_dfa(skel, ap=ap | frozenset(bound))
        guards = {}
        for mask_names in _subsets(sorted(bound)):
            present = frozenset(mask_names)
            lits = [bound[nm] if nm in present else Not(bound[nm])
                    for nm in sorted(bound)]
            guards[present] = f_and_all(lits, sorted(ap))
        return mk_eauto(dfa, guards)
    raise WrongFragment(f"cannot bridge {chi!r}")


def _bridge_path(psi, ap):
    if isinstance(psi, Embed):
        return Embed(_bridge_state(psi.state, ap))
    if isinstance(psi, (PathAnd, PathOr, Until)):
        return type(psi)(_bridge_path(psi.left, ap), _bridge_path(psi.right, ap))
    if isinstance(psi, (Next, WeakNext)):
        return type(psi)(_bridge_path(psi.sub, ap))
    from .formulas import PathNot, Release

    if isinstance(psi, Release):
        return Release(_bridge_path(psi.left, ap), _bridge_path(psi.right, ap))
    if isinstance(psi, PathNot):
        return PathNot(_bridge_path(psi.sub, ap))
    raise WrongFragment(f"cannot bridge path formula {psi!r}")


def _subsets(items):
    for mask in range(1 << len(items)):
        yield [x for i, x in enumerate(items) if mask >> i & 1]
