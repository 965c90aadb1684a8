"""Syntactic fragment classification for state and path formulas.

Membership is judged against each fragment's grammar closed under the usual
abbreviations: A-forms count as negated E-forms, conjunction as a derived
connective, C<k> as the dual of D<k>.  Path formulas are classified against
the linear-time fragments, state formulas against the branching-time ones.
"""

from __future__ import annotations

import enum

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
    is_false,
    is_true,
    match_AR,
    match_AwY,
    match_AX,
    match_ES,
    match_EU,
    match_EX,
    match_EY,
)


class Fragment(enum.Enum):
    PASTCTLSTAR = "PastCTLStar"
    CTLSTAR = "CTLStar"
    PASTCTL = "PastCTL"
    CTL = "CTL"
    PASTCTLPM = "PastCTLpm"
    CTLPM = "CTLpm"
    CTLSTARPM = "CTLStarPm"
    CTLSTARF = "CTLStarF"
    LTL = "LTL"
    PASTLTL = "PastLTL"
    PUREPASTLTL = "PurePastLTL"
    SAFELTL = "SafeLTL"
    COSAFELTL = "CoSafeLTL"
    SAFEPASTLTL = "SafePastLTL"
    COSAFEPASTLTL = "CoSafePastLTL"


def classify_fragment(formula) -> frozenset:
    if isinstance(formula, PathFormula):
        return frozenset(f for f, chk in _PATH_CHECKS if chk(formula))
    if isinstance(formula, StateFormula):
        return frozenset(f for f, chk in _STATE_CHECKS if chk(formula))
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# helpers shared by several fragments


def _walk(formula):
    yield formula
    if isinstance(formula, EAuto):
        for _annot, guard in formula.guards:
            yield from _walk(guard)
        return
    for field in getattr(formula, "__dataclass_fields__", {}):
        value = getattr(formula, field)
        if isinstance(value, (StateFormula, PathFormula)):
            yield from _walk(value)


def _no_past(formula) -> bool:
    return not any(isinstance(f, (Yesterday, Since)) for f in _walk(formula))


def _no_finite(formula) -> bool:
    return not any(isinstance(f, (ExistsFin, EAuto)) for f in _walk(formula))


def _no_exists_fin(formula) -> bool:
    return not any(isinstance(f, ExistsFin) for f in _walk(formula))


# ---------------------------------------------------------------------------
# branching-time fragments


def _is_pastctlstar(phi) -> bool:
    return _no_finite(phi)


def _is_ctlstar(phi) -> bool:
    return _no_finite(phi) and _no_past(phi)


def _boolean_case(phi, rec) -> bool | None:
    """Handle the cases shared by every branching fragment, or None."""
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Not):
        return rec(phi.sub)
    if isinstance(phi, (And, Or)):
        return rec(phi.left) and rec(phi.right)
    if isinstance(phi, (Count, CoCount)):
        return rec(phi.sub)
    return None


def _is_pastctl(phi) -> bool:
    shared = _boolean_case(phi, _is_pastctl)
    if shared is not None:
        return shared
    if isinstance(phi, (Exists, Forall)):
        return _pastctl_body(phi.body)
    return False


def _pastctl_future_free(psi) -> bool:
    if isinstance(psi, Embed):
        return _is_pastctl(psi.state)
    if isinstance(psi, PathNot):
        return _pastctl_future_free(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Since)):
        return _pastctl_future_free(psi.left) and _pastctl_future_free(psi.right)
    if isinstance(psi, Yesterday):
        return _pastctl_future_free(psi.sub)
    return False


def _pastctl_body(psi) -> bool:
    """One future operator at the top at most, future-free below it."""
    if isinstance(psi, (Next, WeakNext)):
        return _pastctl_future_free(psi.sub)
    if isinstance(psi, (Until, Release)):
        return _pastctl_future_free(psi.left) and _pastctl_future_free(psi.right)
    return _pastctl_future_free(psi)


def _is_ctl(phi) -> bool:
    shared = _boolean_case(phi, _is_ctl)
    if shared is not None:
        return shared
    if isinstance(phi, (Exists, Forall)):
        body = phi.body
        if isinstance(body, Next):
            return isinstance(body.sub, Embed) and _is_ctl(body.sub.state)
        if isinstance(body, (Until, Release)):
            return (
                isinstance(body.left, Embed)
                and isinstance(body.right, Embed)
                and _is_ctl(body.left.state)
                and _is_ctl(body.right.state)
            )
    return False


def _is_pastctlpm(phi) -> bool:
    shared = _boolean_case(phi, _is_pastctlpm)
    if shared is not None:
        return shared
    for matcher in (match_EX, match_AX, match_EY, match_AwY):
        sub = matcher(phi)
        if sub is not None:
            return _is_pastctlpm(sub)
    for matcher in (match_EU, match_AR, match_ES):
        pair = matcher(phi)
        if pair is not None:
            return _is_pastctlpm(pair[0]) and _is_pastctlpm(pair[1])
    return False


def _is_ctlpm(phi) -> bool:
    shared = _boolean_case(phi, _is_ctlpm)
    if shared is not None:
        return shared
    for matcher in (match_EX, match_AX):
        sub = matcher(phi)
        if sub is not None:
            return _is_ctlpm(sub)
    for matcher in (match_EU, match_AR):
        pair = matcher(phi)
        if pair is not None:
            return _is_ctlpm(pair[0]) and _is_ctlpm(pair[1])
    return False


def _is_ctlstarpm(phi) -> bool:
    shared = _boolean_case(phi, _is_ctlstarpm)
    if shared is not None:
        return shared
    if isinstance(phi, Exists):
        return _ctlstarpm_cosafe(phi.body)
    if isinstance(phi, Forall):
        return _ctlstarpm_safe(phi.body)
    if isinstance(phi, EAuto):
        return all(_is_ctlstarpm(guard) for _annot, guard in phi.guards)
    return False


def _ctlstarpm_cosafe(psi) -> bool:
    if isinstance(psi, Embed):
        return _is_ctlstarpm(psi.state)
    if isinstance(psi, (PathAnd, PathOr, Until)):
        return _ctlstarpm_cosafe(psi.left) and _ctlstarpm_cosafe(psi.right)
    if isinstance(psi, Next):
        return _ctlstarpm_cosafe(psi.sub)
    return False


def _ctlstarpm_safe(psi) -> bool:
    if isinstance(psi, Embed):
        return _is_ctlstarpm(psi.state)
    if isinstance(psi, (PathAnd, PathOr, Release)):
        return _ctlstarpm_safe(psi.left) and _ctlstarpm_safe(psi.right)
    if isinstance(psi, Next):
        return _ctlstarpm_safe(psi.sub)
    return False


def _is_ctlstarf(phi) -> bool:
    shared = _boolean_case(phi, _is_ctlstarf)
    if shared is not None:
        return shared
    if isinstance(phi, ExistsFin):
        return _ctlstarf_body(phi.body)
    return False


def _ctlstarf_body(psi) -> bool:
    if isinstance(psi, Embed):
        return _is_ctlstarf(psi.state)
    if isinstance(psi, PathNot):
        return _ctlstarf_body(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Until, Release)):
        return _ctlstarf_body(psi.left) and _ctlstarf_body(psi.right)
    if isinstance(psi, (Next, WeakNext)):
        return _ctlstarf_body(psi.sub)
    return False


# ---------------------------------------------------------------------------
# linear-time fragments


def _propositional(phi) -> bool:
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Not):
        return _propositional(phi.sub)
    if isinstance(phi, (And, Or)):
        return _propositional(phi.left) and _propositional(phi.right)
    return False


def _prop_literal_nnf(phi) -> bool:
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Not):
        return isinstance(phi.sub, Atom)
    if isinstance(phi, (And, Or)):
        return _prop_literal_nnf(phi.left) and _prop_literal_nnf(phi.right)
    return False


def _is_ltl(psi) -> bool:
    if isinstance(psi, Embed):
        return _propositional(psi.state)
    if isinstance(psi, PathNot):
        return _is_ltl(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Until, Release)):
        return _is_ltl(psi.left) and _is_ltl(psi.right)
    if isinstance(psi, (Next, WeakNext)):
        return _is_ltl(psi.sub)
    return False


def _is_pastltl(psi) -> bool:
    if isinstance(psi, Embed):
        return _propositional(psi.state)
    if isinstance(psi, PathNot):
        return _is_pastltl(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Until, Release, Since)):
        return _is_pastltl(psi.left) and _is_pastltl(psi.right)
    if isinstance(psi, (Next, WeakNext, Yesterday)):
        return _is_pastltl(psi.sub)
    return False


def _is_purepastltl(psi) -> bool:
    if isinstance(psi, Embed):
        return _propositional(psi.state)
    if isinstance(psi, PathNot):
        return _is_purepastltl(psi.sub)
    if isinstance(psi, (PathAnd, PathOr, Since)):
        return _is_purepastltl(psi.left) and _is_purepastltl(psi.right)
    if isinstance(psi, Yesterday):
        return _is_purepastltl(psi.sub)
    return False


def _is_safeltl(psi) -> bool:
    if isinstance(psi, Embed):
        return _prop_literal_nnf(psi.state)
    if isinstance(psi, (PathAnd, PathOr, Release)):
        return _is_safeltl(psi.left) and _is_safeltl(psi.right)
    if isinstance(psi, (Next, WeakNext)):
        return _is_safeltl(psi.sub)
    return False


def _is_cosafeltl(psi) -> bool:
    if isinstance(psi, Embed):
        return _prop_literal_nnf(psi.state)
    if isinstance(psi, (PathAnd, PathOr, Until)):
        return _is_cosafeltl(psi.left) and _is_cosafeltl(psi.right)
    if isinstance(psi, (Next, WeakNext)):
        return _is_cosafeltl(psi.sub)
    return False


def _is_safepastltl(psi) -> bool:
    return (
        isinstance(psi, Release)
        and isinstance(psi.left, Embed)
        and is_false(psi.left.state)
        and _is_purepastltl(psi.right)
    )


def _is_cosafepastltl(psi) -> bool:
    return (
        isinstance(psi, Until)
        and isinstance(psi.left, Embed)
        and is_true(psi.left.state)
        and _is_purepastltl(psi.right)
    )


_STATE_CHECKS = (
    (Fragment.PASTCTLSTAR, _is_pastctlstar),
    (Fragment.CTLSTAR, _is_ctlstar),
    (Fragment.PASTCTL, _is_pastctl),
    (Fragment.CTL, _is_ctl),
    (Fragment.PASTCTLPM, _is_pastctlpm),
    (Fragment.CTLPM, _is_ctlpm),
    (Fragment.CTLSTARPM, _is_ctlstarpm),
    (Fragment.CTLSTARF, _is_ctlstarf),
)

_PATH_CHECKS = (
    (Fragment.LTL, _is_ltl),
    (Fragment.PASTLTL, _is_pastltl),
    (Fragment.PUREPASTLTL, _is_purepastltl),
    (Fragment.SAFELTL, _is_safeltl),
    (Fragment.COSAFELTL, _is_cosafeltl),
    (Fragment.SAFEPASTLTL, _is_safepastltl),
    (Fragment.COSAFEPASTLTL, _is_cosafepastltl),
)
