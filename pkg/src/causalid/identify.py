"""The identification engine.

Given an ADMG and a query p(Y | do(a)), either synthesize a symbolic estimand
over the observed joint or construct a hedge certificate of
non-identifiability. Kernel synthesis conditions on the complement of the
current descendant set at each fixing step, expressed as a quotient of
marginals of the running kernel; no algebraic simplification is attempted,
correctness is certified numerically by the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from . import estimand as ex
from .errors import GraphError, QueryError
from .fixing import (
    FixingSequence,
    NotReachable,
    find_valid_sequence,
    fix,
    is_intrinsic,
    reachable_closure,
)
from .graph import MixedGraph


# ---------------------------------------------------------------------- query

@dataclass(frozen=True)
class Query:
    """An interventional query p(outcomes | do(treatments))."""

    outcomes: Tuple[str, ...]
    treatments: Tuple[str, ...] = ()
    treatment_values: Mapping[str, str] = None

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(sorted(set(self.outcomes))))
        object.__setattr__(self, "treatments", tuple(sorted(set(self.treatments))))
        values = dict(self.treatment_values or {})
        for a in self.treatments:
            values.setdefault(a, a.lower())
        extra = set(values) - set(self.treatments)
        if extra:
            raise QueryError(f"treatment values for non-treatments: {sorted(extra)}")
        object.__setattr__(self, "treatment_values", values)

    def validate(self, g: MixedGraph) -> None:
        if not self.outcomes:
            raise QueryError("outcome set must be nonempty")
        overlap = set(self.outcomes) & set(self.treatments)
        if overlap:
            raise QueryError(f"outcome intersects treatment: {sorted(overlap)}")
        observed = set(g.random) - g.hidden
        missing = (set(self.outcomes) | set(self.treatments)) - observed
        if missing:
            raise QueryError(f"query vertices not observed in graph: {sorted(missing)}")


def _require_admg(g: MixedGraph) -> None:
    if g.hidden:
        raise QueryError("identification expects a latent projection; project the hidden DAG first")
    if g.fixed:
        raise QueryError("identification expects an ADMG without fixed vertices")


# -------------------------------------------------------------- decomposition

@dataclass(frozen=True)
class Decomposition:
    ystar: Tuple[str, ...]
    districts: Tuple[Tuple[str, ...], ...]
    contexts: Mapping[Tuple[str, ...], Tuple[Tuple[str, ex.Ref], ...]]


def decompose(g: MixedGraph, query: Query) -> Decomposition:
    """Split the query into districts of the relevant ancestral subgraph.

    Each district's context is its parent set outside the district, bound
    either to a treatment value or to the matching outer index variable.
    """
    _require_admg(g)
    query.validate(g)
    ystar = tuple(sorted(g.ancestral_avoiding(query.outcomes, query.treatments)))
    sub = g.induced_subgraph(ystar)
    districts = tuple(sub.districts())
    treatments = set(query.treatments)
    contexts: Dict[Tuple[str, ...], Tuple[Tuple[str, ex.Ref], ...]] = {}
    for d in districts:
        ctx: List[Tuple[str, ex.Ref]] = []
        for p in sorted(g.parents(d)):
            if p in treatments:
                ctx.append((p, ex.Var(query.treatment_values[p])))
            elif p in set(ystar):
                ctx.append((p, ex.Var(p)))
            else:
                raise GraphError(
                    f"internal error: context vertex {p!r} of district {list(d)} "
                    "is neither a treatment nor in the relevant ancestral set"
                )
        contexts[d] = tuple(ctx)
    return Decomposition(ystar=ystar, districts=districts, contexts=contexts)


# ----------------------------------------------------------- kernel synthesis

def _marginalize(e: ex.Expr, vertices) -> ex.Expr:
    vertices = sorted(vertices)
    if not vertices:
        return e
    return ex.Marginal(indices=tuple((v, v) for v in vertices), body=e)


def identify_district(g: MixedGraph, district) -> Union[ex.Expr, NotReachable]:
    """Symbolic kernel for one bidirected-connected set, or the stuck point.

    The kernel's free variables are named after the graph's vertices: the
    district members plus every other vertex as context.
    """
    _require_admg(g)
    d = set(district)
    sub = g.induced_subgraph(d)
    if len(sub.districts()) != 1:
        raise GraphError(f"district {sorted(d)} is not bidirected-connected")
    res = find_valid_sequence(g, set(g.random) - d)
    if isinstance(res, NotReachable):
        return res
    kernel: ex.Expr = ex.Factor(outcomes=tuple(ex.Slot(v, ex.Var(v)) for v in g.random))
    cur = g
    for j in res.steps:
        desc = cur.descendants({j})
        # p(j | everything left that is not a descendant of j), taken within
        # the running kernel, as a quotient of its marginals
        conditional = ex.Quotient(
            numerator=_marginalize(kernel, desc - {j}),
            denominator=_marginalize(kernel, desc),
        )
        kernel = ex.Quotient(numerator=kernel, denominator=conditional)
        cur = fix(cur, j)
    return ex.simplify(kernel)


# --------------------------------------------------------------- hedge checks

@dataclass(frozen=True)
class CForest:
    """A bidirected-connected set with a chosen in-forest toward its roots."""

    vertices: Tuple[str, ...]
    roots: Tuple[str, ...]
    witness_edges: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class HedgeWitness:
    inner: CForest
    outer: CForest
    query: Query

    def to_dict(self) -> dict:
        return {
            "inner": list(self.inner.vertices),
            "outer": list(self.outer.vertices),
            "roots": list(self.inner.roots),
        }


def _spanning_in_forest(g: MixedGraph, vertices, roots) -> Tuple[Tuple[str, str], ...]:
    """Each non-root keeps one edge to its least child that still reaches a root."""
    vs = set(vertices)
    sub = g.induced_subgraph(vs)
    reach = set(roots)
    changed = True
    while changed:
        changed = False
        for v in vs - reach:
            if sub.children({v}) & reach:
                reach.add(v)
                changed = True
    edges = []
    for v in sorted(vs - set(roots)):
        if v not in reach:
            continue  # cannot reach a root; the candidate will fail validation
        child = min(c for c in sub.children({v}) if c in reach)
        edges.append((v, child))
    return tuple(edges)


def find_hedge(g: MixedGraph, query: Query, district) -> HedgeWitness:
    """Constructive witness for a failing district: the district itself nested
    inside its reachable closure, rooted at the district's childless vertices."""
    d = tuple(sorted(set(district)))
    if is_intrinsic(g, d):
        raise GraphError(f"district {list(d)} is intrinsic; there is no hedge to build")
    closure = tuple(sorted(reachable_closure(g, d)))
    sub_d = g.induced_subgraph(d)
    roots = tuple(v for v in d if not sub_d.children({v}))
    inner = CForest(vertices=d, roots=roots, witness_edges=_spanning_in_forest(g, d, roots))
    outer = CForest(
        vertices=closure, roots=roots, witness_edges=_spanning_in_forest(g, closure, roots)
    )
    return HedgeWitness(inner=inner, outer=outer, query=query)


def hedge_violation(g: MixedGraph, query: Query, witness: HedgeWitness) -> Optional[str]:
    """Reason code for a failed hedge check, or None if the witness is valid."""
    inner, outer = witness.inner, witness.outer
    f_in, f_out = set(inner.vertices), set(outer.vertices)
    roots = set(inner.roots)
    known = set(g.random)
    if set(outer.roots) != roots:
        return "roots-differ-between-forests"
    if not (f_in | f_out) <= known:
        return "vertices-outside-graph"
    if not roots or not roots <= f_in:
        return "roots-not-inside-inner-forest"
    for name, forest in (("inner", inner), ("outer", outer)):
        vs = set(forest.vertices)
        if len(g.induced_subgraph(vs).districts()) != 1:
            return f"{name}-not-bidirected-connected"
        edge_set = set(forest.witness_edges)
        if not edge_set <= {(t, h) for t, h in g.directed if t in vs and h in vs}:
            return f"{name}-witness-edges-not-in-graph"
        # every vertex must reach a root using only witness edges
        reach = set(roots)
        changed = True
        while changed:
            changed = False
            for t, h in edge_set:
                if h in reach and t not in reach:
                    reach.add(t)
                    changed = True
        if not vs <= reach:
            return f"{name}-not-rooted"
    if not f_in < f_out:
        return "inner-forest-not-strictly-inside-outer"
    treatments = set(query.treatments)
    if f_in & treatments:
        return "inner-forest-touches-treatments"
    if not treatments & (f_out - f_in):
        return "no-treatment-between-forests"
    ystar = g.ancestral_avoiding(query.outcomes, query.treatments)
    if not roots <= ystar:
        return "roots-lack-treatment-avoiding-path-to-outcome"
    return None


def is_hedge(g: MixedGraph, query: Query, witness: HedgeWitness) -> bool:
    return hedge_violation(g, query, witness) is None


# ------------------------------------------------------------------- assembly

@dataclass(frozen=True)
class Identified:
    graph: MixedGraph
    query: Query
    estimand: ex.Expr
    districts: Tuple[Tuple[Tuple[str, ...], ex.Expr, Tuple[Tuple[str, ex.Ref], ...]], ...]
    treatment_labels: Mapping[str, str] = field(default_factory=dict)

    @property
    def identified(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {
            "status": "identified",
            "estimand": ex._node_to_dict(self.estimand),
            "districts": [
                {
                    "district": list(d),
                    "kernel": ex._node_to_dict(kernel),
                    "context": [v for v, _ in ctx],
                }
                for d, kernel, ctx in self.districts
            ],
        }


@dataclass(frozen=True)
class NotIdentified:
    graph: MixedGraph
    query: Query
    witness: HedgeWitness
    failing_district: Tuple[str, ...]
    closure: Tuple[str, ...]
    failing_districts: Tuple[Tuple[str, ...], ...]

    @property
    def identified(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {
            "status": "not_identified",
            "witness": self.witness.to_dict(),
            "failing_district": list(self.failing_district),
            "closure": list(self.closure),
            "failing_districts": [list(d) for d in self.failing_districts],
        }


IdentificationResult = Union[Identified, NotIdentified]


def _treatment_labels(query: Query, taken) -> Dict[str, str]:
    taken = set(taken)
    labels = {}
    for a in query.treatments:
        label = query.treatment_values[a]
        while label in taken:
            label += "'"
        taken.add(label)
        labels[a] = label
    return labels


def identify(g: MixedGraph, query: Query) -> IdentificationResult:
    """Run the full identification pipeline for one query."""
    dec = decompose(g, query)
    kernels: Dict[Tuple[str, ...], ex.Expr] = {}
    failing: List[Tuple[str, ...]] = []
    for d in dec.districts:
        res = identify_district(g, d)
        if isinstance(res, NotReachable):
            failing.append(d)
        else:
            kernels[d] = res
    if failing:
        worst = failing[0]  # districts are sorted by least vertex name
        witness = find_hedge(g, query, worst)
        return NotIdentified(
            graph=g,
            query=query,
            witness=witness,
            failing_district=worst,
            closure=tuple(sorted(reachable_closure(g, worst))),
            failing_districts=tuple(failing),
        )

    ystar = set(dec.ystar)
    labels = _treatment_labels(query, taken=ystar)
    mapping: Dict[str, ex.Ref] = {}
    for v in g.random:
        if v in set(query.treatments):
            mapping[v] = ex.Var(labels[v])
        elif v not in ystar:
            # the kernel's value is constant in vertices outside the relevant
            # ancestral set and the treatments; pin them to an arbitrary level
            mapping[v] = ex.Const(0)
    terms = tuple(ex.substitute(kernels[d], mapping) for d in dec.districts)
    body: ex.Expr = terms[0] if len(terms) == 1 else ex.Product(terms=terms)
    sum_over = sorted(ystar - set(query.outcomes))
    expr: ex.Expr = body
    if sum_over:
        expr = ex.Sum(indices=tuple((v, v) for v in sum_over), body=body)
    return Identified(
        graph=g,
        query=query,
        estimand=expr,
        districts=tuple((d, kernels[d], dec.contexts[d]) for d in dec.districts),
        treatment_labels=labels,
    )


# -------------------------------------------------- failure characterizations

@dataclass(frozen=True)
class FailureReport:
    hedge_exists: bool
    some_district_not_intrinsic: bool
    some_district_proper_closure: bool

    def as_tuple(self) -> Tuple[bool, bool, bool]:
        return (
            self.hedge_exists,
            self.some_district_not_intrinsic,
            self.some_district_proper_closure,
        )


def failure_characterizations(g: MixedGraph, query: Query) -> FailureReport:
    """Three equivalent ways of detecting identification failure.

    The hedge condition is decided constructively: when some district is not
    intrinsic, the certificate built for the first such district is validated
    against the full hedge definition.
    """
    dec = decompose(g, query)
    not_intrinsic = [d for d in dec.districts if not is_intrinsic(g, d)]
    proper_closure = [
        d for d in dec.districts if set(d) < reachable_closure(g, d)
    ]
    hedge = False
    if not_intrinsic:
        hedge = is_hedge(g, query, find_hedge(g, query, not_intrinsic[0]))
    return FailureReport(
        hedge_exists=hedge,
        some_district_not_intrinsic=bool(not_intrinsic),
        some_district_proper_closure=bool(proper_closure),
    )
