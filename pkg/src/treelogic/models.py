"""Finite pointed models and their tree unfoldings.

A model is a finite graph with a total successor relation, atom labels on
states, and a distinguished root.  Formulas are interpreted over the infinite
unfolding from the root; `unfold` materialises a finite prefix of it for
inspection and for bounded run searches.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import BadModel, DepthNegative


@dataclass(frozen=True)
class RegularTreeModel:
    ap: frozenset
    states: tuple
    root: str
    labels: dict
    succ: dict

    def label(self, state: str) -> frozenset:
        return self.labels[state]

    def successors(self, state: str) -> tuple:
        return self.succ[state]


def make_model(ap, states, root, labels, succ) -> RegularTreeModel:
    model = RegularTreeModel(
        ap=frozenset(ap),
        states=tuple(states),
        root=root,
        labels={s: frozenset(v) for s, v in labels.items()},
        succ={s: tuple(v) for s, v in succ.items()},
    )
    validate_model(model)
    return model


def validate_model(model: RegularTreeModel) -> None:
    states = set(model.states)
    if len(states) != len(model.states):
        raise BadModel("duplicate state names")
    if model.root not in states:
        raise BadModel(f"root {model.root!r} is not a state")
    if set(model.labels) != states:
        raise BadModel("labels must cover exactly the states")
    if set(model.succ) != states:
        raise BadModel("successor map must cover exactly the states")
    for s in model.states:
        if not model.labels[s] <= model.ap:
            extra = sorted(model.labels[s] - model.ap)
            raise BadModel(f"state {s!r} labelled with unknown atoms {extra}")
        succs = model.succ[s]
        if not succs:
            raise BadModel(f"state {s!r} has no successor")
        for t in succs:
            if t not in states:
                raise BadModel(f"state {s!r} has unknown successor {t!r}")


@dataclass(frozen=True)
class ExplicitTree:
    state: str
    label: frozenset
    children: tuple


def unfold(model: RegularTreeModel, depth: int) -> ExplicitTree:
    """Unfold the model from its root into an explicit tree of the given
    depth.  Depth 0 gives a single node with no children."""
    if depth < 0:
        raise DepthNegative(f"negative unfolding depth {depth}")

    def build(state, d):
        if d == 0:
            children = ()
        else:
            children = tuple(build(t, d - 1) for t in model.succ[state])
        return ExplicitTree(state, model.labels[state], children)

    return build(model.root, depth)


def random_model(seed: int, n_states: int = 4, ap=("p", "q"), extra_edges: int = 2) -> RegularTreeModel:
    """Deterministic pseudo-random model: a cycle through all states keeps
    the successor relation total, plus a few extra edges and random labels."""
    if n_states < 1:
        raise BadModel("need at least one state")
    rng = random.Random(seed)
    ap = tuple(ap)
    states = tuple(f"s{i}" for i in range(n_states))
    succ = {s: {states[(i + 1) % n_states]} for i, s in enumerate(states)}
    for _ in range(extra_edges):
        a = rng.choice(states)
        b = rng.choice(states)
        succ[a].add(b)
    labels = {}
    for s in states:
        labels[s] = frozenset(a for a in ap if rng.random() < 0.5)
    return make_model(
        ap,
        states,
        states[0],
        labels,
        {s: tuple(sorted(v)) for s, v in succ.items()},
    )


# ---------------------------------------------------------------------------
# serialization


def model_to_obj(model: RegularTreeModel) -> dict:
    return {
        "ap": sorted(model.ap),
        "states": list(model.states),
        "root": model.root,
        "labels": {s: sorted(model.labels[s]) for s in model.states},
        "succ": {s: list(model.succ[s]) for s in model.states},
    }


def model_from_obj(obj: dict) -> RegularTreeModel:
    try:
        return make_model(obj["ap"], obj["states"], obj["root"], obj["labels"], obj["succ"])
    except KeyError as exc:
        raise BadModel(f"missing field {exc.args[0]!r}") from None
