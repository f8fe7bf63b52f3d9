"""Fixability tests, the fixing operator, valid sequences, and reachability.

Fixing never adds edges, so a vertex that is fixable stays fixable as other
vertices are fixed. The greedy search below exploits this: it repeatedly fixes
the lexicographically least fixable vertex and never backtracks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple, Union

from .errors import GraphError, NotFixableError, UnknownVertexError
from .graph import MixedGraph


@dataclass(frozen=True)
class FixingSequence:
    """An ordered, replayable sequence of fixed vertices."""

    steps: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.steps)) != len(self.steps):
            raise GraphError(f"fixing sequence has repeated steps: {list(self.steps)}")

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class NotReachable:
    """Greedy search got stuck: ``residual`` could not be fixed.

    ``graph`` is the CADMG at the stuck point, kept so diagnostics can build a
    hedge certificate without replaying the search.
    """

    residual: Tuple[str, ...]
    graph: MixedGraph


def is_fixable(g: MixedGraph, r: str) -> bool:
    """True iff no other vertex is both a descendant of ``r`` and bidirected-
    connected to ``r`` among the random vertices."""
    if r not in set(g.random):
        if r in set(g.fixed):
            raise GraphError(f"{r!r} is already fixed")
        raise UnknownVertexError(r)
    return g.descendants({r}) & g.district_of(r) == {r}


def fix(g: MixedGraph, r: str) -> MixedGraph:
    """Move ``r`` to the fixed set, dropping every edge with an arrowhead at it."""
    if not is_fixable(g, r):
        raise NotFixableError(f"{r!r} is not fixable")
    return MixedGraph(
        random=[v for v in g.random if v != r],
        fixed=list(g.fixed) + [r],
        directed=[(t, h) for t, h in g.directed if h != r],
        bidirected=[e for e in g.bidirected if r not in e],
    )


def fix_all(g: MixedGraph, seq: Union[FixingSequence, Iterable[str]]) -> MixedGraph:
    """Replay a fixing sequence, checking fixability at every step."""
    steps = list(seq)
    cur = g
    for i, r in enumerate(steps):
        try:
            cur = fix(cur, r)
        except NotFixableError:
            raise NotFixableError(f"{r!r} not fixable at step {i + 1}") from None
    return cur


def find_valid_sequence(
    g: MixedGraph, targets: Iterable[str]
) -> Union[FixingSequence, NotReachable]:
    """Greedily fix all of ``targets``, or report the stuck residual set."""
    remaining = set(targets)
    unknown = remaining - set(g.random)
    if unknown:
        raise UnknownVertexError(sorted(unknown)[0])
    cur = g
    steps = []
    while remaining:
        for r in sorted(remaining):
            if is_fixable(cur, r):
                cur = fix(cur, r)
                steps.append(r)
                remaining.discard(r)
                break
        else:
            return NotReachable(residual=tuple(sorted(remaining)), graph=cur)
    return FixingSequence(steps=tuple(steps))


def is_reachable(g: MixedGraph, s: Iterable[str]) -> bool:
    """True iff the complement of ``s`` admits a valid fixing sequence."""
    s = set(s)
    return isinstance(find_valid_sequence(g, set(g.random) - s), FixingSequence)


def reachable_closure(g: MixedGraph, s: Iterable[str]) -> FrozenSet[str]:
    """Smallest reachable superset of ``s``.

    One greedy pass suffices: whatever cannot be fixed when aiming at the
    complement of ``s`` is exactly the extra material of the closure.
    """
    s = set(s)
    unknown = s - set(g.random)
    if unknown:
        raise UnknownVertexError(sorted(unknown)[0])
    res = find_valid_sequence(g, set(g.random) - s)
    if isinstance(res, FixingSequence):
        return frozenset(s)
    return frozenset(s) | set(res.residual)


def is_intrinsic(g: MixedGraph, d: Iterable[str]) -> bool:
    """True iff ``d`` is bidirected-connected and equal to its reachable closure."""
    d = set(d)
    if not d:
        raise GraphError("intrinsic-set test requires a nonempty set")
    sub = g.induced_subgraph(d)
    if len(sub.districts()) != 1:
        return False
    return reachable_closure(g, d) == d
