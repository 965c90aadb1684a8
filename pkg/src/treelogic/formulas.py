"""Formula ASTs for branching-time logics with counting and past operators.

State formulas and path formulas are separate sorts.  Path connectives keep
maximal state subformulas embedded: ``E ((p | q) U r)`` stores ``p | q`` as a
single embedded state formula, never as a path-level disjunction.  The parser
and all rewrites maintain this invariant, so fragment checks and skeleton
extraction can rely on it.

Derived operators (F, G, O, W, wY, ->, true, false) are expanded while
parsing and re-introduced only by the printer.  The truth constants expand
over the alphabetically first atom of the declared alphabet: ``true`` becomes
``p | !p`` and ``false`` becomes ``p & !p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, UnknownAtom


class StateFormula:
    __slots__ = ()


class PathFormula:
    __slots__ = ()


# ---------------------------------------------------------------------------
# state sort


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str


@dataclass(frozen=True)
class Not(StateFormula):
    sub: StateFormula


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Or(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Count(StateFormula):
    """At least n distinct successors satisfy the operand (written D<n>)."""

    n: int
    sub: StateFormula


@dataclass(frozen=True)
class CoCount(StateFormula):
    """All but at most n-1 successors satisfy the operand (written C<n>)."""

    n: int
    sub: StateFormula


@dataclass(frozen=True)
class Exists(StateFormula):
    body: PathFormula


@dataclass(frozen=True)
class Forall(StateFormula):
    body: PathFormula


@dataclass(frozen=True)
class ExistsFin(StateFormula):
    """Path quantifier ranging over finite paths (written Ef)."""

    body: PathFormula


@dataclass(frozen=True)
class EAuto(StateFormula):
    """Exists an infinite (or finite, for DFA payloads) path whose trace,
    annotated letter by letter, is accepted by a word automaton.

    ``guards`` maps each letter annotation to the state formula a node must
    satisfy for the annotated letter to be readable there.  Stored as a
    sorted tuple of pairs so the node stays hashable.
    """

    auto: object
    guards: tuple


# ---------------------------------------------------------------------------
# path sort


@dataclass(frozen=True)
class Embed(PathFormula):
    state: StateFormula


@dataclass(frozen=True)
class PathNot(PathFormula):
    sub: PathFormula


@dataclass(frozen=True)
class PathAnd(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class PathOr(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class Next(PathFormula):
    sub: PathFormula


@dataclass(frozen=True)
class WeakNext(PathFormula):
    """Weak next: true at the last position of a finite path (written wX)."""

    sub: PathFormula


@dataclass(frozen=True)
class Yesterday(PathFormula):
    sub: PathFormula


@dataclass(frozen=True)
class Until(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class Release(PathFormula):
    left: PathFormula
    right: PathFormula


@dataclass(frozen=True)
class Since(PathFormula):
    left: PathFormula
    right: PathFormula


Formula = StateFormula | PathFormula


# ---------------------------------------------------------------------------
# constants and folding constructors


def first_atom(ap) -> str:
    if not ap:
        raise ParseError("truth constants need a non-empty alphabet")
    return min(ap)


def mk_true(ap) -> StateFormula:
    p = Atom(first_atom(ap))
    return Or(p, Not(p))


def mk_false(ap) -> StateFormula:
    p = Atom(first_atom(ap))
    return And(p, Not(p))


def is_true(phi) -> bool:
    return (
        isinstance(phi, Or)
        and isinstance(phi.left, Atom)
        and phi.right == Not(phi.left)
    )


def is_false(phi) -> bool:
    return (
        isinstance(phi, And)
        and isinstance(phi.left, Atom)
        and phi.right == Not(phi.left)
    )


def f_not(phi: StateFormula) -> StateFormula:
    """Negation with double-negation and constant folding."""
    if isinstance(phi, Not):
        return phi.sub
    if is_true(phi):
        return And(phi.left, phi.right)
    if is_false(phi):
        return Or(phi.left, phi.right)
    return Not(phi)


def f_and(a: StateFormula, b: StateFormula) -> StateFormula:
    if is_false(a):
        return a
    if is_false(b):
        return b
    if is_true(a):
        return b
    if is_true(b):
        return a
    if a == b:
        return a
    return And(a, b)


def f_or(a: StateFormula, b: StateFormula) -> StateFormula:
    if is_true(a):
        return a
    if is_true(b):
        return b
    if is_false(a):
        return b
    if is_false(b):
        return a
    if a == b:
        return a
    return Or(a, b)


def f_and_all(items, ap) -> StateFormula:
    acc = mk_true(ap)
    for item in items:
        acc = f_and(acc, item)
    return acc


def f_or_all(items, ap) -> StateFormula:
    acc = mk_false(ap)
    for item in items:
        acc = f_or(acc, item)
    return acc


def f_imp(a: StateFormula, b: StateFormula) -> StateFormula:
    return f_or(f_not(a), b)


def p_embed(phi: StateFormula) -> PathFormula:
    return Embed(phi)


def p_not(psi: PathFormula) -> PathFormula:
    """Path negation that keeps state content embedded."""
    if isinstance(psi, Embed):
        return Embed(f_not(psi.state))
    if isinstance(psi, PathNot):
        return psi.sub
    return PathNot(psi)


def p_and(a: PathFormula, b: PathFormula) -> PathFormula:
    if isinstance(a, Embed) and isinstance(b, Embed):
        return Embed(f_and(a.state, b.state))
    if isinstance(a, Embed) and is_false(a.state):
        return a
    if isinstance(a, Embed) and is_true(a.state):
        return b
    if isinstance(b, Embed) and is_false(b.state):
        return b
    if isinstance(b, Embed) and is_true(b.state):
        return a
    return PathAnd(a, b)


def p_or(a: PathFormula, b: PathFormula) -> PathFormula:
    if isinstance(a, Embed) and isinstance(b, Embed):
        return Embed(f_or(a.state, b.state))
    if isinstance(a, Embed) and is_true(a.state):
        return a
    if isinstance(a, Embed) and is_false(a.state):
        return b
    if isinstance(b, Embed) and is_true(b.state):
        return b
    if isinstance(b, Embed) and is_false(b.state):
        return a
    return PathOr(a, b)


def mk_EX(phi: StateFormula) -> StateFormula:
    return Exists(Next(Embed(phi)))


def mk_AX(phi: StateFormula) -> StateFormula:
    return Forall(Next(Embed(phi)))


def mk_EY(phi: StateFormula) -> StateFormula:
    return Exists(Yesterday(Embed(phi)))


def mk_AwY(phi: StateFormula) -> StateFormula:
    """All paths satisfy weak yesterday: true at the root."""
    return Forall(PathNot(Yesterday(Embed(f_not(phi)))))


def mk_EU(a: StateFormula, b: StateFormula) -> StateFormula:
    return Exists(Until(Embed(a), Embed(b)))


def mk_AR(a: StateFormula, b: StateFormula) -> StateFormula:
    return Forall(Release(Embed(a), Embed(b)))


def mk_ES(a: StateFormula, b: StateFormula) -> StateFormula:
    return Exists(Since(Embed(a), Embed(b)))


def mk_EF(phi: StateFormula, ap) -> StateFormula:
    return Exists(Until(Embed(mk_true(ap)), Embed(phi)))


def mk_EO(phi: StateFormula, ap) -> StateFormula:
    return Exists(Since(Embed(mk_true(ap)), Embed(phi)))


def mk_eauto(auto, guards: dict) -> EAuto:
    items = tuple(sorted(guards.items(), key=lambda kv: _annot_key(kv[0])))
    return EAuto(auto, items)


def _annot_key(annot):
    return tuple(sorted(map(repr, annot)))


def eauto_guards(phi: EAuto) -> dict:
    return dict(phi.guards)


# ---------------------------------------------------------------------------
# shape matchers for the polarised past fragment


def match_EX(phi):
    if isinstance(phi, Exists) and isinstance(phi.body, Next):
        if isinstance(phi.body.sub, Embed):
            return phi.body.sub.state
    return None


def match_AX(phi):
    if isinstance(phi, Forall) and isinstance(phi.body, Next):
        if isinstance(phi.body.sub, Embed):
            return phi.body.sub.state
    return None


def match_EY(phi):
    if isinstance(phi, Exists) and isinstance(phi.body, Yesterday):
        if isinstance(phi.body.sub, Embed):
            return phi.body.sub.state
    return None


def match_AwY(phi):
    if isinstance(phi, Forall) and isinstance(phi.body, PathNot):
        inner = phi.body.sub
        if isinstance(inner, Yesterday) and isinstance(inner.sub, Embed):
            st = inner.sub.state
            if isinstance(st, Not):
                return st.sub
            return f_not(st)
    return None


def match_EU(phi):
    if isinstance(phi, Exists) and isinstance(phi.body, Until):
        b = phi.body
        if isinstance(b.left, Embed) and isinstance(b.right, Embed):
            return (b.left.state, b.right.state)
    return None


def match_AR(phi):
    if isinstance(phi, Forall) and isinstance(phi.body, Release):
        b = phi.body
        if isinstance(b.left, Embed) and isinstance(b.right, Embed):
            return (b.left.state, b.right.state)
    return None


def match_ES(phi):
    if isinstance(phi, Exists) and isinstance(phi.body, Since):
        b = phi.body
        if isinstance(b.left, Embed) and isinstance(b.right, Embed):
            return (b.left.state, b.right.state)
    return None


# ---------------------------------------------------------------------------
# atom collection


def atoms_of(formula) -> frozenset:
    acc = set()
    _collect_atoms(formula, acc)
    return frozenset(acc)


def _collect_atoms(formula, acc):
    if isinstance(formula, Atom):
        acc.add(formula.name)
    elif isinstance(formula, EAuto):
        for _annot, guard in formula.guards:
            _collect_atoms(guard, acc)
        auto = formula.auto
        for letter in getattr(auto, "alphabet", ()):
            sigma = letter[0] if isinstance(letter, tuple) else letter
            for p in sigma:
                if isinstance(p, str):
                    acc.add(p)
    else:
        for field in getattr(formula, "__dataclass_fields__", {}):
            value = getattr(formula, field)
            if isinstance(value, (StateFormula, PathFormula)):
                _collect_atoms(value, acc)


# ---------------------------------------------------------------------------
# tokenizer


_WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_COUNT_RE = re.compile(r"([DC])([0-9]+)\Z")
_SINGLE_OPS = set("EAXYURWSFGO")


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()!&|":
            tokens.append((ch, ch))
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(("->", "->"))
            i += 2
            continue
        m = _WORD_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {ch!r} at position {i}")
        word = m.group(0)
        i = m.end()
        if word in ("true", "false"):
            tokens.append((word, word))
        elif _ATOM_RE.match(word):
            tokens.append(("atom", word))
        elif word in ("Ef", "wX", "wY"):
            tokens.append((word, word))
        else:
            cm = _COUNT_RE.match(word)
            if cm:
                tokens.append((cm.group(1), int(cm.group(2))))
            elif len(word) == 1 and word in _SINGLE_OPS:
                tokens.append((word, word))
            else:
                raise ParseError(f"unknown token {word!r}")
    tokens.append(("end", None))
    return tokens


# ---------------------------------------------------------------------------
# recursive descent to a raw operator tree


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}")
        return tok

    def parse(self):
        tree = self.parse_imp()
        self.expect("end")
        return tree

    def parse_imp(self):
        left = self.parse_or()
        if self.peek() == "->":
            self.take()
            right = self.parse_imp()
            return ("or", ("not", left), right)
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.peek() == "|":
            self.take()
            left = ("or", left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_temp()
        while self.peek() == "&":
            self.take()
            left = ("and", left, self.parse_temp())
        return left

    def parse_temp(self):
        left = self.parse_unary()
        kind = self.peek()
        if kind in ("U", "R", "S"):
            self.take()
            return (kind, left, self.parse_temp())
        if kind == "W":
            self.take()
            right = self.parse_temp()
            return ("R", right, ("or", left, right))
        return left

    def parse_unary(self):
        kind = self.peek()
        if kind == "!":
            self.take()
            return ("not", self.parse_unary())
        if kind in ("E", "A", "Ef", "X", "wX", "Y"):
            self.take()
            return (kind, self.parse_unary())
        if kind == "wY":
            self.take()
            return ("not", ("Y", ("not", self.parse_unary())))
        if kind == "F":
            self.take()
            return ("U", ("true",), self.parse_unary())
        if kind == "G":
            self.take()
            return ("R", ("false",), self.parse_unary())
        if kind == "O":
            self.take()
            return ("S", ("true",), self.parse_unary())
        if kind in ("D", "C"):
            tok = self.take()
            if tok[1] < 1:
                raise ParseError(f"{kind}{tok[1]}: grade must be at least 1")
            return (kind, tok[1], self.parse_unary())
        return self.parse_primary()

    def parse_primary(self):
        kind = self.peek()
        if kind == "atom":
            return ("atom", self.take()[1])
        if kind in ("true", "false"):
            self.take()
            return (kind,)
        if kind == "(":
            self.take()
            tree = self.parse_imp()
            self.expect(")")
            return tree
        raise ParseError(f"unexpected token {kind!r}")


_PATH_OPS = ("X", "wX", "Y", "U", "R", "S")


def _raw_atoms(tree, acc):
    if tree[0] == "atom":
        acc.add(tree[1])
    else:
        for child in tree[1:]:
            if isinstance(child, tuple):
                _raw_atoms(child, acc)


def _stateish(tree) -> bool:
    """True when the raw tree denotes a state formula (no naked path ops)."""
    op = tree[0]
    if op in _PATH_OPS:
        return False
    if op in ("not", "and", "or"):
        return all(_stateish(c) for c in tree[1:])
    return True


def _elab_state(tree, ap) -> StateFormula:
    op = tree[0]
    if op == "atom":
        if tree[1] not in ap:
            raise UnknownAtom(f"atom {tree[1]!r} is not in the alphabet")
        return Atom(tree[1])
    if op == "true":
        return mk_true(ap)
    if op == "false":
        return mk_false(ap)
    if op == "not":
        return Not(_elab_state(tree[1], ap))
    if op == "and":
        return And(_elab_state(tree[1], ap), _elab_state(tree[2], ap))
    if op == "or":
        return Or(_elab_state(tree[1], ap), _elab_state(tree[2], ap))
    if op == "D":
        return Count(tree[1], _elab_state(tree[2], ap))
    if op == "C":
        return CoCount(tree[1], _elab_state(tree[2], ap))
    if op == "E":
        return Exists(_elab_path(tree[1], ap))
    if op == "A":
        return Forall(_elab_path(tree[1], ap))
    if op == "Ef":
        return ExistsFin(_elab_path(tree[1], ap))
    raise ParseError(f"path operator {op!r} needs an enclosing path quantifier")


def _elab_path(tree, ap) -> PathFormula:
    if _stateish(tree):
        return Embed(_elab_state(tree, ap))
    op = tree[0]
    if op == "not":
        return PathNot(_elab_path(tree[1], ap))
    if op == "and":
        return PathAnd(_elab_path(tree[1], ap), _elab_path(tree[2], ap))
    if op == "or":
        return PathOr(_elab_path(tree[1], ap), _elab_path(tree[2], ap))
    if op == "X":
        return Next(_elab_path(tree[1], ap))
    if op == "wX":
        return WeakNext(_elab_path(tree[1], ap))
    if op == "Y":
        return Yesterday(_elab_path(tree[1], ap))
    if op == "U":
        return Until(_elab_path(tree[1], ap), _elab_path(tree[2], ap))
    if op == "R":
        return Release(_elab_path(tree[1], ap), _elab_path(tree[2], ap))
    if op == "S":
        return Since(_elab_path(tree[1], ap), _elab_path(tree[2], ap))
    raise ParseError(f"cannot use {op!r} in a path formula")


def _prepare(text, ap):
    tree = _Parser(_tokenize(text)).parse()
    if ap is None:
        found = set()
        _raw_atoms(tree, found)
        ap = frozenset(found)
    else:
        ap = frozenset(ap)
    return tree, ap


def parse_state_formula(text: str, ap=None) -> StateFormula:
    """Parse text as a state formula.

    When ``ap`` is omitted the alphabet is the set of atoms occurring in the
    text; truth constants then require at least one atom somewhere.
    """
    tree, ap = _prepare(text, ap)
    if not _stateish(tree):
        raise ParseError("top-level path operator outside a path quantifier")
    return _elab_state(tree, ap)


def parse_path_formula(text: str, ap=None) -> PathFormula:
    tree, ap = _prepare(text, ap)
    return _elab_path(tree, ap)


# ---------------------------------------------------------------------------
# printer

_LVL_OR = 1
_LVL_AND = 2
_LVL_TEMP = 3
_LVL_UNARY = 4
_LVL_ATOM = 5


def to_text(formula) -> str:
    return _pr(formula)[0]


def _wrap(formula, min_level):
    text, level = _pr(formula)
    if level < min_level:
        return "(" + text + ")"
    return text


def _pr(phi):
    if isinstance(phi, Atom):
        return phi.name, _LVL_ATOM
    if is_true(phi):
        return "true", _LVL_ATOM
    if is_false(phi):
        return "false", _LVL_ATOM
    if isinstance(phi, Not):
        return "!" + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, (And, PathAnd)):
        return (
            _wrap(phi.left, _LVL_AND) + " & " + _wrap(phi.right, _LVL_AND + 1),
            _LVL_AND,
        )
    if isinstance(phi, (Or, PathOr)):
        return (
            _wrap(phi.left, _LVL_OR) + " | " + _wrap(phi.right, _LVL_OR + 1),
            _LVL_OR,
        )
    if isinstance(phi, Count):
        return f"D{phi.n} " + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, CoCount):
        return f"C{phi.n} " + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, Exists):
        return "E " + _wrap(phi.body, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, Forall):
        return "A " + _wrap(phi.body, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, ExistsFin):
        return "Ef " + _wrap(phi.body, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, EAuto):
        n = len(getattr(phi.auto, "states", ()))
        return f"<eauto states={n} guards={len(phi.guards)}>", _LVL_ATOM
    if isinstance(phi, Embed):
        return _pr(phi.state)
    if isinstance(phi, PathNot):
        sugared = _try_weak_yesterday(phi)
        if sugared is not None:
            return sugared
        return "!" + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, Next):
        return "X " + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, WeakNext):
        return "wX " + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, Yesterday):
        return "Y " + _wrap(phi.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(phi, Until):
        if isinstance(phi.left, Embed) and is_true(phi.left.state):
            return "F " + _wrap(phi.right, _LVL_UNARY), _LVL_UNARY
        return (
            _wrap(phi.left, _LVL_UNARY) + " U " + _wrap(phi.right, _LVL_TEMP),
            _LVL_TEMP,
        )
    if isinstance(phi, Release):
        if isinstance(phi.left, Embed) and is_false(phi.left.state):
            return "G " + _wrap(phi.right, _LVL_UNARY), _LVL_UNARY
        return (
            _wrap(phi.left, _LVL_UNARY) + " R " + _wrap(phi.right, _LVL_TEMP),
            _LVL_TEMP,
        )
    if isinstance(phi, Since):
        if isinstance(phi.left, Embed) and is_true(phi.left.state):
            return "O " + _wrap(phi.right, _LVL_UNARY), _LVL_UNARY
        return (
            _wrap(phi.left, _LVL_UNARY) + " S " + _wrap(phi.right, _LVL_TEMP),
            _LVL_TEMP,
        )
    raise TypeError(f"not a formula: {phi!r}")


def _try_weak_yesterday(phi: PathNot):
    inner = phi.sub
    if isinstance(inner, Yesterday) and isinstance(inner.sub, Embed):
        st = inner.sub.state
        if isinstance(st, Not):
            return "wY " + _wrap(Embed(st.sub), _LVL_UNARY), _LVL_UNARY
    return None


# ---------------------------------------------------------------------------
# JSON form

_STATE_OPS = {
    Atom: "atom",
    Not: "not",
    And: "and",
    Or: "or",
    Count: "count",
    CoCount: "cocount",
    Exists: "exists",
    Forall: "forall",
    ExistsFin: "existsfin",
}

_PATH_OPS_JSON = {
    Embed: "embed",
    PathNot: "pnot",
    PathAnd: "pand",
    PathOr: "por",
    Next: "next",
    WeakNext: "wnext",
    Yesterday: "yesterday",
    Until: "until",
    Release: "release",
    Since: "since",
}


def formula_to_obj(phi):
    if isinstance(phi, Atom):
        return {"op": "atom", "name": phi.name}
    if isinstance(phi, (Count, CoCount)):
        op = _STATE_OPS[type(phi)]
        return {"op": op, "n": phi.n, "args": [formula_to_obj(phi.sub)]}
    if isinstance(phi, EAuto):
        from .words import word_to_obj
        from .trees import atom_to_obj

        return {
            "op": "eauto",
            "auto": word_to_obj(phi.auto),
            "guards": [
                {
                    "annot": [atom_to_obj(a) for a in sorted(annot, key=repr)],
                    "formula": formula_to_obj(guard),
                }
                for annot, guard in phi.guards
            ],
        }
    op = _STATE_OPS.get(type(phi)) or _PATH_OPS_JSON.get(type(phi))
    if op is None:
        raise TypeError(f"not a formula: {phi!r}")
    args = []
    for field in phi.__dataclass_fields__:
        value = getattr(phi, field)
        if isinstance(value, (StateFormula, PathFormula)):
            args.append(formula_to_obj(value))
    return {"op": op, "args": args}


_OBJ_STATE = {
    "not": Not,
    "and": And,
    "or": Or,
    "exists": Exists,
    "forall": Forall,
    "existsfin": ExistsFin,
}

_OBJ_PATH = {
    "embed": Embed,
    "pnot": PathNot,
    "pand": PathAnd,
    "por": PathOr,
    "next": Next,
    "wnext": WeakNext,
    "yesterday": Yesterday,
    "until": Until,
    "release": Release,
    "since": Since,
}


def formula_from_obj(obj):
    op = obj["op"]
    if op == "atom":
        return Atom(obj["name"])
    if op == "count":
        return Count(obj["n"], formula_from_obj(obj["args"][0]))
    if op == "cocount":
        return CoCount(obj["n"], formula_from_obj(obj["args"][0]))
    if op == "eauto":
        from .words import word_from_obj
        from .trees import atom_from_obj

        guards = {}
        for entry in obj["guards"]:
            annot = frozenset(atom_from_obj(a) for a in entry["annot"])
            guards[annot] = formula_from_obj(entry["formula"])
        return mk_eauto(word_from_obj(obj["auto"]), guards)
    cls = _OBJ_STATE.get(op) or _OBJ_PATH.get(op)
    if cls is None:
        raise ParseError(f"unknown formula op {op!r}")
    args = [formula_from_obj(a) for a in obj["args"]]
    return cls(*args)
