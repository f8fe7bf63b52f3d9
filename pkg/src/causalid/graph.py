"""Mixed graphs and their structural queries.

A single :class:`MixedGraph` covers three shapes of input:

* a DAG with designated hidden vertices (``hidden`` nonempty, no bidirected
  edges, no fixed vertices),
* an ADMG (directed + bidirected edges, everything random),
* a CADMG (vertices partitioned into ``random`` and ``fixed``).

All graphs are immutable after construction; every operation returns a new
graph or a plain value. Sets are externalized in sorted order so outputs are
deterministic.
"""

from __future__ import annotations

import json
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from .errors import CycleError, GraphError, QueryError, UnknownVertexError

_RESERVED_CHARS = set("|,;")

_GRAPH_JSON_KEYS = {"vertices", "hidden", "fixed", "directed", "bidirected"}


def _check_name(name) -> str:
    if not isinstance(name, str) or not name:
        raise GraphError(f"vertex names must be non-empty strings, got {name!r}")
    if any(ch.isspace() or ch in _RESERVED_CHARS for ch in name):
        raise GraphError(
            f"vertex name {name!r} contains whitespace or a reserved character (| , ;)"
        )
    return name


class MixedGraph:
    """Immutable acyclic directed mixed graph with random/fixed/hidden roles."""

    __slots__ = (
        "random",
        "fixed",
        "hidden",
        "directed",
        "bidirected",
        "_pa",
        "_ch",
        "_sib",
        "_hash",
    )

    def __init__(
        self,
        random: Iterable[str],
        fixed: Iterable[str] = (),
        hidden: Iterable[str] = (),
        directed: Iterable[Tuple[str, str]] = (),
        bidirected: Iterable[Iterable[str]] = (),
    ):
        rnd = tuple(sorted({_check_name(v) for v in random}))
        fxd = tuple(sorted({_check_name(v) for v in fixed}))
        hid = frozenset(_check_name(v) for v in hidden)
        dedges = frozenset((t, h) for t, h in directed)
        bedges = frozenset(frozenset(e) for e in bidirected)

        object.__setattr__(self, "random", rnd)
        object.__setattr__(self, "fixed", fxd)
        object.__setattr__(self, "hidden", hid)
        object.__setattr__(self, "directed", dedges)
        object.__setattr__(self, "bidirected", bedges)
        self._validate()

        pa: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        ch: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        sib: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        for t, h in dedges:
            ch[t].add(h)
            pa[h].add(t)
        for e in bedges:
            u, v = sorted(e)
            sib[u].add(v)
            sib[v].add(u)
        object.__setattr__(self, "_pa", pa)
        object.__setattr__(self, "_ch", ch)
        object.__setattr__(self, "_sib", sib)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("MixedGraph is immutable")

    # ------------------------------------------------------------------ basics

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(sorted(self.random + self.fixed))

    def is_random(self, v: str) -> bool:
        return v in set(self.random)

    def _require(self, vs: Iterable[str]) -> Set[str]:
        known = set(self.random) | set(self.fixed)
        vs = set(vs)
        for v in vs:
            if v not in known:
                raise UnknownVertexError(v)
        return vs

    def _validate(self) -> None:
        rnd, fxd, hid = set(self.random), set(self.fixed), self.hidden
        if rnd & fxd:
            raise GraphError(f"vertices both random and fixed: {sorted(rnd & fxd)}")
        if not hid <= rnd:
            raise GraphError(f"hidden vertices must be random: {sorted(hid - rnd)}")
        allv = rnd | fxd
        for t, h in self.directed:
            _check_name(t), _check_name(h)
            if t not in allv or h not in allv:
                raise UnknownVertexError(t if t not in allv else h)
            if t == h:
                raise GraphError(f"self-loop on {t!r}")
        for e in self.bidirected:
            if len(e) != 2:
                raise GraphError(f"bidirected self-loop or malformed edge: {sorted(e)}")
            for v in e:
                _check_name(v)
                if v not in allv:
                    raise UnknownVertexError(v)
        for t, h in self.directed:
            if h in fxd:
                raise GraphError(f"directed edge into fixed vertex {h!r}")
        for e in self.bidirected:
            bad = sorted(set(e) & fxd)
            if bad:
                raise GraphError(f"bidirected edge incident to fixed vertex {bad[0]!r}")
        if hid and self.bidirected:
            raise GraphError("a hidden-variable input must be a plain DAG (no bidirected edges)")
        if hid and fxd:
            raise GraphError("a hidden-variable input must have no fixed vertices")
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        indeg = {v: 0 for v in set(self.random) | set(self.fixed)}
        for _, h in self.directed:
            indeg[h] += 1
        queue = [v for v, d in indeg.items() if d == 0]
        seen = 0
        ch: Dict[str, List[str]] = {v: [] for v in indeg}
        for t, h in self.directed:
            ch[t].append(h)
        while queue:
            v = queue.pop()
            seen += 1
            for c in ch[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != len(indeg):
            # extract one cycle among the leftover vertices for the error message
            leftover = {v for v, d in indeg.items() if d > 0}
            start = min(leftover)
            path, cur = [start], start
            while True:
                cur = min(c for c in ch[cur] if c in leftover)
                if cur in path:
                    raise CycleError(path[path.index(cur):])
                path.append(cur)

    # --------------------------------------------------------------- ancestry

    def parents(self, vs: Iterable[str]) -> FrozenSet[str]:
        """One-step parents of the set, excluding the set itself."""
        vs = self._require(vs)
        out: Set[str] = set()
        for v in vs:
            out |= self._pa[v]
        return frozenset(out - vs)

    def children(self, vs: Iterable[str]) -> FrozenSet[str]:
        vs = self._require(vs)
        out: Set[str] = set()
        for v in vs:
            out |= self._ch[v]
        return frozenset(out - vs)

    def _closure(self, vs: Set[str], step: Dict[str, Set[str]]) -> FrozenSet[str]:
        out = set(vs)
        frontier = list(vs)
        while frontier:
            nxt = step[frontier.pop()]
            for u in nxt:
                if u not in out:
                    out.add(u)
                    frontier.append(u)
        return frozenset(out)

    def ancestors(self, vs: Iterable[str]) -> FrozenSet[str]:
        """Reflexive-transitive closure along incoming directed edges."""
        return self._closure(self._require(vs), self._pa)

    def descendants(self, vs: Iterable[str]) -> FrozenSet[str]:
        """Reflexive-transitive closure along outgoing directed edges."""
        return self._closure(self._require(vs), self._ch)

    # -------------------------------------------------------------- districts

    def district_of(self, v: str) -> FrozenSet[str]:
        """Bidirected-connected component of ``v`` among random vertices."""
        self._require([v])
        if not self.is_random(v):
            raise GraphError(f"district_of requires a random vertex, {v!r} is fixed")
        return self._closure({v}, self._sib)

    def districts(self) -> List[Tuple[str, ...]]:
        """Partition of the random vertices into bidirected-connected blocks.

        Blocks are sorted by their least vertex name.
        """
        seen: Set[str] = set()
        blocks: List[Tuple[str, ...]] = []
        for v in self.random:
            if v not in seen:
                block = self.district_of(v)
                seen |= block
                blocks.append(tuple(sorted(block)))
        blocks.sort(key=lambda b: b[0])
        return blocks

    # ------------------------------------------------------------- subgraphs

    def induced_subgraph(self, vs: Iterable[str]) -> "MixedGraph":
        vs = self._require(vs)
        return MixedGraph(
            random=[v for v in self.random if v in vs],
            fixed=[v for v in self.fixed if v in vs],
            hidden=[v for v in self.hidden if v in vs],
            directed=[(t, h) for t, h in self.directed if t in vs and h in vs],
            bidirected=[e for e in self.bidirected if set(e) <= vs],
        )

    def ancestral_avoiding(self, outcomes: Iterable[str], avoid: Iterable[str]) -> FrozenSet[str]:
        """Vertices with a directed path to ``outcomes`` that dodges ``avoid``.

        Includes ``outcomes`` themselves. Equivalent to the ancestors of
        ``outcomes`` in the subgraph with ``avoid`` removed.
        """
        outcomes = self._require(outcomes)
        avoid = self._require(avoid)
        if outcomes & avoid:
            raise QueryError(
                f"outcome set intersects avoided set: {sorted(outcomes & avoid)}"
            )
        keep = (set(self.random) | set(self.fixed)) - avoid
        return self.induced_subgraph(keep).ancestors(outcomes)

    # -------------------------------------------------------- collider paths

    def collider_blanket(self, v: str, include_single_directed: bool = False) -> FrozenSet[str]:
        """Random vertices that are parents of ``v`` or collider-path endpoints.

        The default reading treats a collider path as one whose first edge is
        bidirected (so a lone directed edge out of ``v`` does not count); this
        coincides with the district of ``v`` together with the district's
        parents, and is the reading that matches the conditioning set used in
        kernel synthesis on the shipped fixtures.  With
        ``include_single_directed=True`` the literal reading is used instead:
        every path whose interior triples all collide at their middle vertex
        qualifies, including single directed edges out of ``v``.
        """
        self._require([v])
        if not self.is_random(v):
            raise GraphError(f"collider_blanket requires a random vertex, {v!r} is fixed")
        rnd = set(self.random)
        if not include_single_directed:
            dis = self.district_of(v)
            return frozenset(((dis | self.parents(dis)) & rnd) - {v})
        return frozenset(self._collider_path_endpoints(v) | (self._pa[v] & rnd))

    def _collider_path_endpoints(self, v: str) -> Set[str]:
        # Enumerate simple paths whose interior triples are all colliders.
        # Graphs here are desk-scale, so explicit enumeration is fine.
        rnd = set(self.random)
        out: Set[str] = set()

        def edges_from(u: str):
            for c in self._ch[u]:
                yield c, False, True  # u -> c : head at c only
            for p in self._pa[u]:
                yield p, True, False  # u <- p : head at u only
            for s in self._sib[u]:
                yield s, True, True  # u <-> s : heads at both

        def walk(u: str, head_at_u: bool, visited: Set[str]):
            for w, head_u, head_w in edges_from(u):
                if w in visited:
                    continue
                if u != v and not (head_at_u and head_u):
                    continue  # interior triple must collide at u
                if w in rnd:
                    out.add(w)
                walk(w, head_w, visited | {w})

        walk(v, False, {v})
        return out - {v}

    # ------------------------------------------------------ latent projection

    def latent_project(self) -> "MixedGraph":
        """Project a hidden-variable DAG onto its observed vertices.

        Directed edges survive when the endpoints are connected by a directed
        path through hidden vertices only; bidirected edges appear between
        observed vertices sharing a hidden common-ancestor trek whose interior
        stays hidden.
        """
        if self.bidirected:
            raise GraphError("latent projection expects a DAG without bidirected edges")
        if self.fixed:
            raise GraphError("latent projection expects a DAG without fixed vertices")
        observed = [v for v in self.random if v not in self.hidden]
        obs = set(observed)

        # hreach[u]: vertices reachable from u by directed paths whose
        # intermediate vertices are all hidden
        hreach: Dict[str, Set[str]] = {}
        for u in self.random:
            reach: Set[str] = set()
            frontier = list(self._ch[u])
            while frontier:
                w = frontier.pop()
                if w in reach:
                    continue
                reach.add(w)
                if w in self.hidden:
                    frontier.extend(self._ch[w])
            hreach[u] = reach

        directed = [(u, w) for u in observed for w in hreach[u] & obs]
        bidirected = []
        for h in sorted(self.hidden):
            ends = sorted(hreach[h] & obs)
            for i, a in enumerate(ends):
                for b in ends[i + 1:]:
                    bidirected.append((a, b))
        return MixedGraph(random=observed, directed=directed, bidirected=bidirected)

    # ---------------------------------------------------------- serialization

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "hidden": sorted(self.hidden),
            "fixed": list(self.fixed),
            "directed": sorted([t, h] for t, h in self.directed),
            "bidirected": sorted(sorted(e) for e in self.bidirected),
        }

    def to_json(self) -> str:
        """Canonical JSON form: sorted vertices and edges, two-space indent."""
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "MixedGraph":
        if not isinstance(data, dict):
            raise GraphError("graph JSON must be an object")
        unknown = set(data) - _GRAPH_JSON_KEYS
        if unknown:
            raise GraphError(f"unknown keys in graph JSON: {sorted(unknown)}")
        for key in ("vertices", "directed", "bidirected"):
            if key not in data:
                raise GraphError(f"graph JSON missing required key {key!r}")
        vertices = list(data["vertices"])
        hidden = list(data.get("hidden", []))
        fixed = list(data.get("fixed", []))
        fixed_set = set(fixed)
        for v in fixed:
            if v not in vertices:
                raise UnknownVertexError(v)
        return cls(
            random=[v for v in vertices if v not in fixed_set],
            fixed=fixed,
            hidden=hidden,
            directed=[tuple(e) for e in data["directed"]],
            bidirected=[tuple(e) for e in data["bidirected"]],
        )

    @classmethod
    def from_json(cls, text: str) -> "MixedGraph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid graph JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dot(self) -> str:
        lines = ["digraph G {"]
        for v in self.vertices:
            shape = "box" if v in set(self.fixed) else "ellipse"
            lines.append(f'  "{v}" [shape={shape}];')
        for t, h in sorted(self.directed):
            lines.append(f'  "{t}" -> "{h}";')
        for e in sorted(sorted(p) for p in self.bidirected):
            lines.append(f'  "{e[0]}" -> "{e[1]}" [dir=both, style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # --------------------------------------------------------------- equality

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            self.random == other.random
            and self.fixed == other.fixed
            and self.hidden == other.hidden
            and self.directed == other.directed
            and self.bidirected == other.bidirected
        )

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self,
                "_hash",
                hash((self.random, self.fixed, self.hidden, self.directed, self.bidirected)),
            )
        return self._hash

    def __repr__(self) -> str:
        parts = [f"random={list(self.random)}"]
        if self.fixed:
            parts.append(f"fixed={list(self.fixed)}")
        if self.hidden:
            parts.append(f"hidden={sorted(self.hidden)}")
        parts.append(f"directed={sorted(self.directed)}")
        parts.append(f"bidirected={sorted(sorted(e) for e in self.bidirected)}")
        return "MixedGraph(" + ", ".join(parts) + ")"
