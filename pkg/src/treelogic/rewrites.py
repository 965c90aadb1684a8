"""Normal forms and syntactic rewrites on formulas.

Covers negation normal form for the two polarised fragments, the subformula
closure driving the automaton construction, release elimination for finite
path semantics, the simple form used before compiling counting formulas, and
skeleton extraction (abstracting maximal quantified or counting state
subformulas out of a path formula).
"""

from __future__ import annotations

from .errors import NotInNNF, UnsupportedFragment, WrongFragment
from .formulas import (
    And,
    Atom,
    CoCount,
    Count,
    EAuto,
    Embed,
    Exists,
    ExistsFin,
    Forall,
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
    is_false,
    is_true,
    match_AR,
    match_AwY,
    match_AX,
    match_ES,
    match_EU,
    match_EX,
    match_EY,
    mk_AR,
    mk_AwY,
    mk_AX,
    mk_ES,
    mk_EU,
    mk_EX,
    mk_EY,
    mk_false,
)
from .fragments import Fragment, classify_fragment

FRESH_PREFIX = "$a"


# ---------------------------------------------------------------------------
# negation normal form


def to_nnf(phi: StateFormula, target: Fragment) -> StateFormula:
    if target == Fragment.PASTCTLPM:
        if Fragment.PASTCTLPM not in classify_fragment(phi):
            raise WrongFragment("formula is not in the polarised past fragment")
        ap = atoms_of(phi)
        return _nnf_pctlpm(phi, False, ap)
    if target == Fragment.CTLSTARPM:
        if Fragment.CTLSTARPM not in classify_fragment(phi):
            raise WrongFragment("formula is not in the polarised star fragment")
        return _nnf_star_state(phi, False)
    raise UnsupportedFragment(f"no negation normal form for {target}")


def _nnf_pctlpm(phi, neg, ap):
    if is_true(phi) or is_false(phi):
        return And(phi.left, phi.right) if (is_true(phi) and neg) else (
            Or(phi.left, phi.right) if (is_false(phi) and neg) else phi
        )
    if isinstance(phi, Atom):
        return Not(phi) if neg else phi
    if isinstance(phi, Not):
        return _nnf_pctlpm(phi.sub, not neg, ap)
    if isinstance(phi, And):
        left = _nnf_pctlpm(phi.left, neg, ap)
        right = _nnf_pctlpm(phi.right, neg, ap)
        return Or(left, right) if neg else And(left, right)
    if isinstance(phi, Or):
        left = _nnf_pctlpm(phi.left, neg, ap)
        right = _nnf_pctlpm(phi.right, neg, ap)
        return And(left, right) if neg else Or(left, right)
    if isinstance(phi, Count):
        sub = _nnf_pctlpm(phi.sub, neg, ap)
        return CoCount(phi.n, sub) if neg else Count(phi.n, sub)
    if isinstance(phi, CoCount):
        sub = _nnf_pctlpm(phi.sub, neg, ap)
        return Count(phi.n, sub) if neg else CoCount(phi.n, sub)
    sub = match_EX(phi)
    if sub is not None:
        inner = _nnf_pctlpm(sub, neg, ap)
        return mk_AX(inner) if neg else mk_EX(inner)
    sub = match_AX(phi)
    if sub is not None:
        inner = _nnf_pctlpm(sub, neg, ap)
        return mk_EX(inner) if neg else mk_AX(inner)
    sub = match_EY(phi)
    if sub is not None:
        inner = _nnf_pctlpm(sub, neg, ap)
        return mk_AwY(inner) if neg else mk_EY(inner)
    sub = match_AwY(phi)
    if sub is not None:
        inner = _nnf_pctlpm(sub, neg, ap)
        return mk_EY(inner) if neg else mk_AwY(inner)
    pair = match_EU(phi)
    if pair is not None:
        left = _nnf_pctlpm(pair[0], neg, ap)
        right = _nnf_pctlpm(pair[1], neg, ap)
        return mk_AR(left, right) if neg else mk_EU(left, right)
    pair = match_AR(phi)
    if pair is not None:
        left = _nnf_pctlpm(pair[0], neg, ap)
        right = _nnf_pctlpm(pair[1], neg, ap)
        return mk_EU(left, right) if neg else mk_AR(left, right)
    pair = match_ES(phi)
    if pair is not None:
        if not neg:
            return mk_ES(_nnf_pctlpm(pair[0], False, ap), _nnf_pctlpm(pair[1], False, ap))
        # !E(a S b) turns into E(!b S (!b & (AwY false | !a)))
        na = _nnf_pctlpm(pair[0], True, ap)
        nb = _nnf_pctlpm(pair[1], True, ap)
        return mk_ES(nb, And(nb, Or(mk_AwY(mk_false(ap)), na)))
    raise WrongFragment(f"cannot normalise {phi!r}")


def _nnf_star_state(phi, neg):
    if is_true(phi) or is_false(phi):
        if neg:
            return And(phi.left, phi.right) if is_true(phi) else Or(phi.left, phi.right)
        return phi
    if isinstance(phi, Atom):
        return Not(phi) if neg else phi
    if isinstance(phi, Not):
        return _nnf_star_state(phi.sub, not neg)
    if isinstance(phi, And):
        left = _nnf_star_state(phi.left, neg)
        right = _nnf_star_state(phi.right, neg)
        return Or(left, right) if neg else And(left, right)
    if isinstance(phi, Or):
        left = _nnf_star_state(phi.left, neg)
        right = _nnf_star_state(phi.right, neg)
        return And(left, right) if neg else Or(left, right)
    if isinstance(phi, Count):
        sub = _nnf_star_state(phi.sub, neg)
        return CoCount(phi.n, sub) if neg else Count(phi.n, sub)
    if isinstance(phi, CoCount):
        sub = _nnf_star_state(phi.sub, neg)
        return Count(phi.n, sub) if neg else CoCount(phi.n, sub)
    if isinstance(phi, Exists):
        body = _nnf_star_path(phi.body, neg)
        return Forall(body) if neg else Exists(body)
    if isinstance(phi, Forall):
        body = _nnf_star_path(phi.body, neg)
        return Exists(body) if neg else Forall(body)
    if isinstance(phi, EAuto):
        return Not(phi) if neg else phi
    raise WrongFragment(f"cannot normalise {phi!r}")


def _nnf_star_path(psi, neg):
    if isinstance(psi, Embed):
        return Embed(_nnf_star_state(psi.state, neg))
    if isinstance(psi, PathNot):
        return _nnf_star_path(psi.sub, not neg)
    if isinstance(psi, PathAnd):
        left = _nnf_star_path(psi.left, neg)
        right = _nnf_star_path(psi.right, neg)
        return PathOr(left, right) if neg else PathAnd(left, right)
    if isinstance(psi, PathOr):
        left = _nnf_star_path(psi.left, neg)
        right = _nnf_star_path(psi.right, neg)
        return PathAnd(left, right) if neg else PathOr(left, right)
    if isinstance(psi, Next):
        # over infinite paths X is self-dual
        return Next(_nnf_star_path(psi.sub, neg))
    if isinstance(psi, Until):
        left = _nnf_star_path(psi.left, neg)
        right = _nnf_star_path(psi.right, neg)
        return Release(left, right) if neg else Until(left, right)
    if isinstance(psi, Release):
        left = _nnf_star_path(psi.left, neg)
        right = _nnf_star_path(psi.right, neg)
        return Until(left, right) if neg else Release(left, right)
    raise WrongFragment(f"cannot normalise path formula {psi!r}")


def nnf_path_negation(psi: PathFormula) -> PathFormula:
    """Negate a star-fragment path formula, pushing the negation inward."""
    return _nnf_star_path(psi, True)


# ---------------------------------------------------------------------------
# negation normal form recognition and subformula closure


def is_nnf_pctlpm(phi) -> bool:
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Not):
        return isinstance(phi.sub, Atom)
    if isinstance(phi, (And, Or)):
        return is_nnf_pctlpm(phi.left) and is_nnf_pctlpm(phi.right)
    if isinstance(phi, (Count, CoCount)):
        return is_nnf_pctlpm(phi.sub)
    for matcher in (match_EX, match_AX, match_EY, match_AwY):
        sub = matcher(phi)
        if sub is not None:
            return is_nnf_pctlpm(sub)
    for matcher in (match_EU, match_AR, match_ES):
        pair = matcher(phi)
        if pair is not None:
            return is_nnf_pctlpm(pair[0]) and is_nnf_pctlpm(pair[1])
    return False


def subformula_closure(phi: StateFormula) -> list:
    """Closure of a polarised past formula in dependency order.

    Every entry appears after its proper subformulas, and the formula itself
    is the last entry.  Double duty: the result is both the state space of
    the compiled automaton and the processing order for its components.
    """
    if not is_nnf_pctlpm(phi):
        raise NotInNNF("subformula closure needs a polarised past formula in NNF")
    seen = {}
    order = []

    def visit(psi):
        if psi in seen:
            return
        if isinstance(psi, Not):
            visit(psi.sub)
        elif isinstance(psi, (And, Or)):
            visit(psi.left)
            visit(psi.right)
        elif isinstance(psi, (Count, CoCount)):
            visit(psi.sub)
        else:
            for matcher in (match_EX, match_AX, match_EY, match_AwY):
                sub = matcher(psi)
                if sub is not None:
                    visit(sub)
                    break
            else:
                for matcher in (match_EU, match_AR, match_ES):
                    pair = matcher(psi)
                    if pair is not None:
                        visit(pair[0])
                        visit(pair[1])
                        break
        seen[psi] = True
        order.append(psi)

    visit(phi)
    return order


# ---------------------------------------------------------------------------
# finite-path release elimination


def eliminate_release_finite(psi: PathFormula, ap=None) -> PathFormula:
    """Rewrite R into U for finite path semantics.

    a R b becomes b U ((wX false | a) & b): either b holds up to a position
    satisfying a & b, or b holds through the last position, which the wX
    false disjunct detects.
    """
    if ap is None:
        ap = atoms_of(psi)
    bot = Embed(mk_false(ap))

    def walk(p):
        if isinstance(p, Embed):
            return p
        if isinstance(p, PathNot):
            return PathNot(walk(p.sub))
        if isinstance(p, PathAnd):
            return PathAnd(walk(p.left), walk(p.right))
        if isinstance(p, PathOr):
            return PathOr(walk(p.left), walk(p.right))
        if isinstance(p, Next):
            return Next(walk(p.sub))
        if isinstance(p, WeakNext):
            return WeakNext(walk(p.sub))
        if isinstance(p, Until):
            return Until(walk(p.left), walk(p.right))
        if isinstance(p, Release):
            left = walk(p.left)
            right = walk(p.right)
            return Until(right, PathAnd(PathOr(WeakNext(bot), left), right))
        raise WrongFragment("release elimination handles future operators only")

    return walk(psi)


# ---------------------------------------------------------------------------
# simple form


def to_simple_form(phi: StateFormula) -> StateFormula:
    """Wrap every path quantifier in a count so the compiler sees only
    counting formulas as maximal state subformulas of path bodies."""
    if Fragment.CTLSTARPM not in classify_fragment(phi):
        raise WrongFragment("simple form is defined on the polarised star fragment")
    return _simple_state(phi)


def _simple_state(phi):
    if isinstance(phi, Atom):
        return phi
    if isinstance(phi, Not):
        return Not(_simple_state(phi.sub))
    if isinstance(phi, And):
        return And(_simple_state(phi.left), _simple_state(phi.right))
    if isinstance(phi, Or):
        return Or(_simple_state(phi.left), _simple_state(phi.right))
    if isinstance(phi, Count):
        if isinstance(phi.sub, Exists):
            return Count(phi.n, Exists(_simple_path(phi.sub.body)))
        return Count(phi.n, _simple_state(phi.sub))
    if isinstance(phi, CoCount):
        if isinstance(phi.sub, Exists):
            return CoCount(phi.n, Exists(_simple_path(phi.sub.body)))
        return CoCount(phi.n, _simple_state(phi.sub))
    if isinstance(phi, Exists):
        return Count(1, Exists(_simple_path(phi.body)))
    if isinstance(phi, Forall):
        return Forall(_simple_path(phi.body))
    if isinstance(phi, EAuto):
        return phi
    raise WrongFragment(f"cannot build simple form of {phi!r}")


def _simple_path(psi):
    if isinstance(psi, Embed):
        return Embed(_simple_state(psi.state))
    if isinstance(psi, PathNot):
        return PathNot(_simple_path(psi.sub))
    if isinstance(psi, (Next, WeakNext, Yesterday)):
        return type(psi)(_simple_path(psi.sub))
    if isinstance(psi, (PathAnd, PathOr, Until, Release, Since)):
        return type(psi)(_simple_path(psi.left), _simple_path(psi.right))
    raise WrongFragment(f"cannot build simple form of {psi!r}")


# ---------------------------------------------------------------------------
# skeletons


def skeletonize(psi: PathFormula):
    """Abstract maximal quantified/counting state subformulas out of a path
    formula, yielding a linear-time skeleton over fresh atoms.

    Returns (skeleton, binding) with fresh atoms named $a1, $a2, ... in order
    of first occurrence; equal subformulas share one fresh atom.
    """
    binding = {}
    names = {}

    def fresh_for(st):
        if st in names:
            return names[st]
        name = f"{FRESH_PREFIX}{len(binding) + 1}"
        names[st] = name
        binding[name] = st
        return name

    def abstract_state(st):
        if isinstance(st, Atom):
            return st
        if isinstance(st, Not):
            return Not(abstract_state(st.sub))
        if isinstance(st, And):
            return And(abstract_state(st.left), abstract_state(st.right))
        if isinstance(st, Or):
            return Or(abstract_state(st.left), abstract_state(st.right))
        return Atom(fresh_for(st))

    def walk(p):
        if isinstance(p, Embed):
            return Embed(abstract_state(p.state))
        if isinstance(p, PathNot):
            return PathNot(walk(p.sub))
        if isinstance(p, (Next, WeakNext, Yesterday)):
            return type(p)(walk(p.sub))
        if isinstance(p, (PathAnd, PathOr, Until, Release, Since)):
            return type(p)(walk(p.left), walk(p.right))
        raise WrongFragment(f"cannot skeletonize {p!r}")

    return walk(psi), binding


def substitute_skeleton(skeleton: PathFormula, binding: dict) -> PathFormula:
    def subst_state(st):
        if isinstance(st, Atom):
            return binding.get(st.name, st)
        if isinstance(st, Not):
            return Not(subst_state(st.sub))
        if isinstance(st, And):
            return And(subst_state(st.left), subst_state(st.right))
        if isinstance(st, Or):
            return Or(subst_state(st.left), subst_state(st.right))
        return st

    def walk(p):
        if isinstance(p, Embed):
            return Embed(subst_state(p.state))
        if isinstance(p, PathNot):
            return PathNot(walk(p.sub))
        if isinstance(p, (Next, WeakNext, Yesterday)):
            return type(p)(walk(p.sub))
        if isinstance(p, (PathAnd, PathOr, Until, Release, Since)):
            return type(p)(walk(p.left), walk(p.right))
        return p

    return walk(skeleton)
