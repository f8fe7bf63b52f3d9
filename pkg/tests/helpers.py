"""Shared brute-force oracles and random-instance generators for the tests.

Everything here is deliberately naive (path enumeration, exhaustive search)
so it stays independent of the library's own algorithms.
"""

import itertools
import random as pyrandom

import numpy as np

from causalid import MixedGraph, ProbTable


# ------------------------------------------------------- random instances

def random_admg(rng: pyrandom.Random, n: int, p_dir: float = 0.35, p_bid: float = 0.25):
    """Random ADMG on n vertices; directed edges follow a shuffled order."""
    names = [f"V{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    directed, bidirected = [], []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p_dir:
            directed.append((order[i], order[j]))
        if rng.random() < p_bid:
            bidirected.append((order[i], order[j]))
    return MixedGraph(random=names, directed=directed, bidirected=bidirected)


def random_hidden_dag(rng: pyrandom.Random, n_obs: int, n_hidden: int, p_dir: float = 0.4):
    """Random DAG over observed V* and hidden H* vertices."""
    names = [f"V{i}" for i in range(n_obs)] + [f"H{i}" for i in range(n_hidden)]
    order = names[:]
    rng.shuffle(order)
    directed = []
    for i, j in itertools.combinations(range(len(order)), 2):
        if rng.random() < p_dir:
            directed.append((order[i], order[j]))
    return MixedGraph(
        random=names,
        hidden=[v for v in names if v.startswith("H")],
        directed=directed,
    )


def random_query_sets(rng: pyrandom.Random, observed, max_outcomes=2, max_treatments=2):
    observed = sorted(observed)
    n_y = rng.randint(1, min(max_outcomes, len(observed)))
    outcomes = rng.sample(observed, n_y)
    rest = [v for v in observed if v not in outcomes]
    n_a = rng.randint(0, min(max_treatments, len(rest)))
    treatments = rng.sample(rest, n_a)
    return sorted(outcomes), sorted(treatments)


def random_positive_joint(seed: int, variables, cards) -> ProbTable:
    """Arbitrary strictly positive joint (not Markov to any particular graph)."""
    variables = tuple(variables)
    cards = tuple(cards)
    rng = np.random.default_rng(seed)
    vals = rng.random(size=cards) + 0.05
    vals /= vals.sum()
    return ProbTable(variables=variables, cards=cards, values=vals)


# ----------------------------------------------------- brute-force oracles

def directed_paths(g: MixedGraph, source: str, sink: str):
    """All simple directed paths from source to sink (lists of vertices)."""
    ch = {v: sorted({h for t, h in g.directed if t == v}) for v in g.vertices}
    out = []

    def walk(path):
        v = path[-1]
        if v == sink:
            out.append(path[:])
            return
        for c in ch[v]:
            if c not in path:
                walk(path + [c])

    walk([source])
    return out


def brute_ancestors(g: MixedGraph, targets):
    targets = set(targets)
    return frozenset(
        v
        for v in g.vertices
        if v in targets or any(directed_paths(g, v, t) for t in targets)
    )


def brute_descendants(g: MixedGraph, sources):
    sources = set(sources)
    return frozenset(
        v
        for v in g.vertices
        if v in sources or any(directed_paths(g, s, v) for s in sources)
    )


def brute_ancestral_avoiding(g: MixedGraph, outcomes, avoid):
    outcomes, avoid = set(outcomes), set(avoid)
    keep = set()
    for v in g.vertices:
        if v in avoid:
            continue
        if v in outcomes:
            keep.add(v)
            continue
        for y in outcomes:
            if any(not (set(p) & avoid) for p in directed_paths(g, v, y)):
                keep.add(v)
                break
    return frozenset(keep)


def brute_districts(g: MixedGraph):
    """Bidirected components among random vertices via naive flood fill."""
    sib = {v: set() for v in g.random}
    for e in g.bidirected:
        u, v = sorted(e)
        sib[u].add(v)
        sib[v].add(u)
    seen, blocks = set(), []
    for v in g.random:
        if v in seen:
            continue
        block, frontier = {v}, [v]
        while frontier:
            for s in sib[frontier.pop()]:
                if s not in block:
                    block.add(s)
                    frontier.append(s)
        seen |= block
        blocks.append(tuple(sorted(block)))
    return sorted(blocks)


def exhaustive_valid_orderings(g: MixedGraph, targets):
    """Every permutation of targets that replays as a valid fixing sequence."""
    from causalid import NotFixableError, fix_all

    valid = []
    for perm in itertools.permutations(sorted(targets)):
        try:
            fix_all(g, perm)
        except NotFixableError:
            continue
        valid.append(perm)
    return valid
