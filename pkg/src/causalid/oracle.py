"""Ground truth: discrete SCMs, exact joints, and truncated-factorization
interventions for verifying symbolic estimands.

Everything here is dense and exact (up to float rounding); the intended scale
is desk-sized graphs (a handful of variables with small cardinalities).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from .errors import GraphError
from .estimand import Evaluator
from .graph import MixedGraph
from .identify import Identified, Query
from .tables import ProbTable

POSITIVITY_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class DiscreteScm:
    """A DAG (possibly with hidden vertices) plus one CPT per vertex.

    CPT axes are the vertex's parents in lexicographic order followed by the
    vertex itself; every row is a distribution with all entries at least
    ``POSITIVITY_FLOOR``.
    """

    graph: MixedGraph
    cards: Mapping[str, int]
    cpts: Mapping[str, np.ndarray]

    def __post_init__(self):
        g = self.graph
        if g.bidirected or g.fixed:
            raise GraphError("an SCM graph must be a DAG (hidden vertices allowed)")
        for v in g.random:
            if v not in self.cards:
                raise GraphError(f"missing cardinality for {v!r}")
            if int(self.cards[v]) < 2:
                raise GraphError(f"cardinality of {v!r} must be at least 2")
            if v not in self.cpts:
                raise GraphError(f"missing CPT for {v!r}")
            cpt = self.cpts[v]
            expected = tuple(self.cards[p] for p in sorted(g.parents({v}))) + (self.cards[v],)
            if tuple(cpt.shape) != expected:
                raise GraphError(
                    f"CPT for {v!r} has shape {cpt.shape}, expected {expected}"
                )
            rows = cpt.sum(axis=-1)
            if np.max(np.abs(rows - 1.0)) > 1e-12:
                raise GraphError(f"CPT rows for {v!r} do not sum to 1")
            if cpt.min() < POSITIVITY_FLOOR - 1e-12:
                raise GraphError(f"CPT for {v!r} violates the positivity floor")

    @property
    def observed(self) -> Tuple[str, ...]:
        return tuple(v for v in self.graph.random if v not in self.graph.hidden)


def random_scm(g: MixedGraph, cards: Mapping[str, int], seed: int) -> DiscreteScm:
    """Seeded SCM generator; part of the external contract.

    For each vertex in lexicographic order, draw one uniform(0,1) variate per
    CPT cell with ``numpy.random.default_rng(seed)`` (row-major), normalize
    each row, then mix with the uniform distribution at weight
    ``cardinality * POSITIVITY_FLOOR`` so every entry is at least the floor.
    """
    rng = np.random.default_rng(seed)
    cpts: Dict[str, np.ndarray] = {}
    for v in g.random:
        card = int(cards[v])
        if card < 2:
            raise GraphError(f"cardinality of {v!r} must be at least 2")
        shape = tuple(int(cards[p]) for p in sorted(g.parents({v}))) + (card,)
        raw = rng.random(size=shape)
        rows = raw / raw.sum(axis=-1, keepdims=True)
        lam = card * POSITIVITY_FLOOR
        cpts[v] = (1.0 - lam) * rows + lam / card
    return DiscreteScm(graph=g, cards=dict(cards), cpts=cpts)


def _full_joint(scm: DiscreteScm, override: Mapping[str, np.ndarray] = ()) -> np.ndarray:
    """Dense joint over all vertices (axes sorted), with optional per-vertex
    factor overrides (used for truncation)."""
    g = scm.graph
    order = {v: i for i, v in enumerate(g.random)}
    shape = tuple(scm.cards[v] for v in g.random)
    joint = np.ones(shape)
    override = dict(override)
    for v in g.random:
        if v in override:
            factor = override[v]
            axes = [v]
        else:
            factor = scm.cpts[v]
            axes = sorted(g.parents({v})) + [v]
        perm = np.argsort([order[x] for x in axes], kind="stable")
        arranged = np.transpose(factor, axes=tuple(perm))
        target = [1] * len(shape)
        for x in axes:
            target[order[x]] = scm.cards[x]
        joint = joint * arranged.reshape(target)
    return joint


def _table_over(scm: DiscreteScm, joint: np.ndarray, keep: Iterable[str]) -> ProbTable:
    g = scm.graph
    keep = set(keep)
    drop = tuple(i for i, v in enumerate(g.random) if v not in keep)
    vals = joint.sum(axis=drop) if drop else joint
    kept = tuple(v for v in g.random if v in keep)
    return ProbTable(variables=kept, cards=tuple(scm.cards[v] for v in kept), values=vals)


def observed_joint(scm: DiscreteScm) -> ProbTable:
    """Exact observed joint: product of all CPTs with hidden vertices summed out."""
    return _table_over(scm, _full_joint(scm), scm.observed)


def interventional(
    scm: DiscreteScm, treatments: Mapping[str, int], outcomes: Iterable[str]
) -> ProbTable:
    """Truncated factorization on the full hidden-variable DAG.

    Drops each treatment's CPT, clamps the treatment to its value in all
    remaining factors, and sums out everything but ``outcomes``.
    """
    outcomes = set(outcomes)
    obs = set(scm.observed)
    if set(treatments) & outcomes:
        raise GraphError("treatments and outcomes must be disjoint")
    if not (set(treatments) | outcomes) <= obs:
        raise GraphError("treatments and outcomes must be observed vertices")
    override = {}
    for v, value in treatments.items():
        card = scm.cards[v]
        if not 0 <= int(value) < card:
            raise GraphError(f"value {value!r} out of range for {v!r} (cardinality {card})")
        point = np.zeros(card)
        point[int(value)] = 1.0
        override[v] = point
    return _table_over(scm, _full_joint(scm, override), outcomes)


@dataclass(frozen=True)
class VerificationReport:
    max_deviation: float
    tolerance: float
    points: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "points": self.points,
            "passed": self.passed,
        }


def verify(
    scm: DiscreteScm, query: Query, result: Identified, tol: float = 1e-9
) -> VerificationReport:
    """Compare the identified estimand against ground truth, pointwise over
    every joint assignment of outcomes and treatment values."""
    if not isinstance(result, Identified) or not result.identified:
        raise GraphError("verification requires an identified result")
    projection = scm.graph.latent_project() if scm.graph.hidden else scm.graph
    if projection != result.graph:
        raise GraphError("the SCM's latent projection differs from the identified graph")
    joint = observed_joint(scm)
    evaluator = Evaluator(joint)
    labels = dict(result.treatment_labels)
    for a in query.treatments:
        labels.setdefault(a, query.treatment_values[a])
    y_list = list(query.outcomes)
    a_list = list(query.treatments)
    max_dev = 0.0
    points = 0
    for a_vals in itertools.product(*[range(scm.cards[a]) for a in a_list]):
        truth = interventional(scm, dict(zip(a_list, a_vals)), y_list)
        for y_vals in itertools.product(*[range(scm.cards[y]) for y in y_list]):
            binding = dict(zip(y_list, y_vals))
            binding.update({labels[a]: val for a, val in zip(a_list, a_vals)})
            got = evaluator.evaluate(result.estimand, binding)
            want = truth.prob(dict(zip(y_list, y_vals)))
            max_dev = max(max_dev, abs(got - want))
            points += 1
    return VerificationReport(max_deviation=max_dev, tolerance=tol, points=points)
