"""Symbolic expressions over an observed joint distribution.

An estimand is a tree (really a DAG: subtrees are shared freely) built from
five node kinds:

* :class:`Factor` -- a conditional probability of the observed joint, each
  variable slot bound to an index variable or a constant value,
* :class:`Product` -- n-ary product,
* :class:`Quotient` -- numerator over denominator,
* :class:`Sum` -- summation binding index variables, used for the outer
  marginalization of an assembled estimand,
* :class:`Marginal` -- same semantics as :class:`Sum`; used for the internal
  marginals of kernel synthesis and kept as a distinct kind in the JSON schema.

Evaluation is exact dense enumeration against a :class:`~causalid.tables.ProbTable`,
memoized per (node, free-variable assignment) so that shared subtrees are
computed once.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Tuple, Union

from .errors import EvaluationError, ExpressionParseError
from .tables import ProbTable

SCHEMA_VERSION = 1


# ----------------------------------------------------------------- node types

@dataclass(frozen=True)
class Var:
    """Reference to an index/outcome/treatment variable by name."""

    name: str


@dataclass(frozen=True)
class Const:
    """A concrete value plugged directly into a factor slot."""

    value: int


Ref = Union[Var, Const]


@dataclass(frozen=True)
class Slot:
    """One variable position in a factor: which vertex, bound to what."""

    vertex: str
    ref: Ref


@dataclass(frozen=True)
class Factor:
    outcomes: Tuple[Slot, ...]
    given: Tuple[Slot, ...] = ()


@dataclass(frozen=True)
class Product:
    terms: Tuple["Expr", ...]


@dataclass(frozen=True)
class Quotient:
    numerator: "Expr"
    denominator: "Expr"


@dataclass(frozen=True)
class Sum:
    indices: Tuple[Tuple[str, str], ...]  # (variable name, vertex) pairs
    body: "Expr"


@dataclass(frozen=True)
class Marginal:
    indices: Tuple[Tuple[str, str], ...]
    body: "Expr"


Expr = Union[Factor, Product, Quotient, Sum, Marginal]


# ------------------------------------------------------------ structure utils

def free_vars(e: Expr, _cache: Dict[int, FrozenSet[str]] = None) -> FrozenSet[str]:
    """Names of variables occurring free in the expression."""
    cache = _cache if _cache is not None else {}

    def go(node) -> FrozenSet[str]:
        key = id(node)
        if key in cache:
            return cache[key]
        if isinstance(node, Factor):
            out = frozenset(
                s.ref.name
                for s in node.outcomes + node.given
                if isinstance(s.ref, Var)
            )
        elif isinstance(node, Product):
            out = frozenset().union(*[go(t) for t in node.terms]) if node.terms else frozenset()
        elif isinstance(node, Quotient):
            out = go(node.numerator) | go(node.denominator)
        elif isinstance(node, (Sum, Marginal)):
            out = go(node.body) - {v for v, _ in node.indices}
        else:
            raise TypeError(f"not an expression node: {node!r}")
        cache[key] = out
        return out

    return go(e)


def well_formed(e: Expr, allowed_free=None):
    """Scope/binding check. Returns ``(ok, problems)``.

    Problems name the path to the first offending node, e.g.
    ``sum.body.product.terms[1]: dangling index 'm'``.
    """
    problems = []

    def go(node, bound, path):
        if problems:
            return
        if isinstance(node, Factor):
            seen_vertices = set()
            for s in node.outcomes + node.given:
                if s.vertex in seen_vertices:
                    problems.append(f"{path}: vertex {s.vertex!r} appears twice in one factor")
                    return
                seen_vertices.add(s.vertex)
            if not node.outcomes:
                problems.append(f"{path}: factor with no outcome slots")
        elif isinstance(node, Product):
            for i, t in enumerate(node.terms):
                go(t, bound, f"{path}.terms[{i}]")
        elif isinstance(node, Quotient):
            go(node.numerator, bound, f"{path}.numerator")
            go(node.denominator, bound, f"{path}.denominator")
        elif isinstance(node, (Sum, Marginal)):
            names = [v for v, _ in node.indices]
            if len(set(names)) != len(names):
                problems.append(f"{path}: repeated index variable in one binder")
                return
            body_free = free_vars(node.body)
            for name in names:
                if name not in body_free:
                    problems.append(f"{path}: dangling index {name!r}")
                    return
            go(node.body, bound | set(names), f"{path}.body")
        else:
            problems.append(f"{path}: not an expression node: {node!r}")

    go(e, set(), kind_name(e))
    if not problems and allowed_free is not None:
        extra = free_vars(e) - set(allowed_free)
        if extra:
            problems.append(f"free variables not allowed at root: {sorted(extra)}")
    return (not problems, problems)


def kind_name(e: Expr) -> str:
    return type(e).__name__.lower()


def substitute(e: Expr, mapping: Mapping[str, Ref]) -> Expr:
    """Replace free occurrences of variables; binders shadow as usual."""

    def go(node, mapping):
        if not mapping:
            return node
        if isinstance(node, Factor):
            def sub_slot(s):
                if isinstance(s.ref, Var) and s.ref.name in mapping:
                    return Slot(s.vertex, mapping[s.ref.name])
                return s
            return Factor(
                outcomes=tuple(sub_slot(s) for s in node.outcomes),
                given=tuple(sub_slot(s) for s in node.given),
            )
        if isinstance(node, Product):
            return Product(terms=tuple(go(t, mapping) for t in node.terms))
        if isinstance(node, Quotient):
            return Quotient(go(node.numerator, mapping), go(node.denominator, mapping))
        if isinstance(node, (Sum, Marginal)):
            inner = {k: v for k, v in mapping.items() if k not in {n for n, _ in node.indices}}
            return type(node)(indices=node.indices, body=go(node.body, inner))
        raise TypeError(f"not an expression node: {node!r}")

    return go(e, dict(mapping))


def simplify(e: Expr) -> Expr:
    """Conservative cleanup: cancel syntactically identical subtrees only.

    Rules (applied bottom-up): ``a / (a / c) -> c``, ``(a/b) / (a/c) -> c/b``,
    and single-term products unwrap. Anything cleverer is left to numeric
    verification; no value is ever changed on positive tables.
    """

    cache: Dict[int, Expr] = {}

    def go(node) -> Expr:
        key = id(node)
        if key in cache:
            return cache[key]
        out = node
        if isinstance(node, Product):
            terms = tuple(go(t) for t in node.terms)
            out = terms[0] if len(terms) == 1 else Product(terms=terms)
        elif isinstance(node, Quotient):
            num, den = go(node.numerator), go(node.denominator)
            if isinstance(den, Quotient) and den.numerator == num:
                out = den.denominator
            elif (
                isinstance(num, Quotient)
                and isinstance(den, Quotient)
                and num.numerator == den.numerator
            ):
                out = go(Quotient(den.denominator, num.denominator))
            else:
                out = Quotient(num, den)
        elif isinstance(node, (Sum, Marginal)):
            out = type(node)(indices=node.indices, body=go(node.body))
        cache[key] = out
        return out

    return go(e)


# ------------------------------------------------------------------ evaluator

class Evaluator:
    """Evaluates expressions against one observed joint, with shared caches.

    Reuse a single instance to evaluate one estimand under many bindings: the
    memo is keyed by each node's free-variable assignment, so work is shared
    across bindings and across structurally shared subtrees.
    """

    def __init__(self, joint: ProbTable):
        self.joint = joint
        self._cards = joint.card_map()
        self._marginals: Dict[Tuple[str, ...], ProbTable] = {}
        self._free: Dict[int, FrozenSet[str]] = {}
        self._memo: Dict[Tuple[int, Tuple[Tuple[str, int], ...]], float] = {}

    def _marginal(self, vs: Tuple[str, ...]) -> ProbTable:
        if vs not in self._marginals:
            self._marginals[vs] = self.joint.marginal(vs)
        return self._marginals[vs]

    def evaluate(self, e: Expr, binding: Mapping[str, int]) -> float:
        missing = free_vars(e, self._free) - set(binding)
        if missing:
            raise EvaluationError(f"missing binding for variables: {sorted(missing)}")
        return self._eval(e, dict(binding))

    def _eval(self, node, env) -> float:
        fv = free_vars(node, self._free)
        key = (id(node), tuple(sorted((v, env[v]) for v in fv)))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._eval_raw(node, env)
        self._memo[key] = val
        return val

    def _resolve(self, slot: Slot, env) -> int:
        if isinstance(slot.ref, Const):
            return slot.ref.value
        try:
            return env[slot.ref.name]
        except KeyError:
            raise EvaluationError(f"missing binding for variable {slot.ref.name!r}") from None

    def _eval_raw(self, node, env) -> float:
        if isinstance(node, Factor):
            out_assign = {s.vertex: self._resolve(s, env) for s in node.outcomes}
            giv_assign = {s.vertex: self._resolve(s, env) for s in node.given}
            all_vs = tuple(sorted(set(out_assign) | set(giv_assign)))
            num = self._marginal(all_vs).prob({**giv_assign, **out_assign})
            if not node.given:
                return num
            den = self._marginal(tuple(sorted(giv_assign))).prob(giv_assign)
            if den == 0.0:
                raise EvaluationError(
                    f"zero conditioning probability in {render_text(node)}"
                )
            return num / den
        if isinstance(node, Product):
            val = 1.0
            for t in node.terms:
                val *= self._eval(t, env)
            return val
        if isinstance(node, Quotient):
            den = self._eval(node.denominator, env)
            if den == 0.0:
                raise EvaluationError(
                    f"zero denominator in quotient: {render_text(node.denominator)}"
                )
            return self._eval(node.numerator, env) / den
        if isinstance(node, (Sum, Marginal)):
            names = [v for v, _ in node.indices]
            for _, vertex in node.indices:
                if vertex not in self._cards:
                    raise EvaluationError(f"unknown vertex in summation: {vertex!r}")
            ranges = [range(self._cards[vertex]) for _, vertex in node.indices]
            total = 0.0
            inner = dict(env)
            for combo in itertools.product(*ranges):
                for name, value in zip(names, combo):
                    inner[name] = value
                total += self._eval(node.body, inner)
            return total
        raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: Expr, joint: ProbTable, binding: Mapping[str, int]) -> float:
    """One-shot evaluation. For sweeps over bindings, hold an :class:`Evaluator`."""
    return Evaluator(joint).evaluate(e, binding)


# ------------------------------------------------------------------ rendering

def _display_ref(ref: Ref, env: Dict[str, str], vertex: str) -> str:
    if isinstance(ref, Const):
        return f"{vertex}={ref.value}"
    return env.get(ref.name, ref.name)


def _fresh(base: str, used) -> str:
    name = base
    while name in used:
        name += "'"
    return name


def render_text(e: Expr) -> str:
    """Plain-text form, e.g. ``sum_{c,m} (sum_{a'} p(Y|m,a',c) p(a'|c)) p(m|a,c) p(c)``."""

    def go(node, env, wrap: bool) -> str:
        if isinstance(node, Factor):
            outs = ", ".join(_display_ref(s.ref, env, s.vertex) for s in node.outcomes)
            if node.given:
                givs = ", ".join(_display_ref(s.ref, env, s.vertex) for s in node.given)
                return f"p({outs} | {givs})"
            return f"p({outs})"
        if isinstance(node, Product):
            parts = [go(t, env, not isinstance(t, Factor)) for t in node.terms]
            return " ".join(parts)
        if isinstance(node, Quotient):
            num = go(node.numerator, env, False)
            den = go(node.denominator, env, False)
            s = f"({num}) / ({den})"
            return f"({s})" if wrap else s
        if isinstance(node, (Sum, Marginal)):
            used = set(env.values())
            inner_env = dict(env)
            shown = []
            for name, _vertex in node.indices:
                disp = _fresh(name.lower(), used)
                used.add(disp)
                inner_env[name] = disp
                shown.append(disp)
            body = go(node.body, inner_env, False)
            s = f"sum_{{{','.join(shown)}}} {body}"
            return f"({s})" if wrap else s
        raise TypeError(f"not an expression node: {node!r}")

    env = {v: v for v in free_vars(e)}
    return go(e, env, False)


def render_latex(e: Expr) -> str:
    """LaTeX math-mode form of the expression."""

    def go(node, env, wrap: bool) -> str:
        if isinstance(node, Factor):
            outs = ", ".join(_display_ref(s.ref, env, s.vertex) for s in node.outcomes)
            if node.given:
                givs = ", ".join(_display_ref(s.ref, env, s.vertex) for s in node.given)
                return f"p({outs} \\mid {givs})"
            return f"p({outs})"
        if isinstance(node, Product):
            return " ".join(go(t, env, not isinstance(t, Factor)) for t in node.terms)
        if isinstance(node, Quotient):
            num = go(node.numerator, env, False)
            den = go(node.denominator, env, False)
            return f"\\frac{{{num}}}{{{den}}}"
        if isinstance(node, (Sum, Marginal)):
            used = set(env.values())
            inner_env = dict(env)
            shown = []
            for name, _vertex in node.indices:
                disp = _fresh(name.lower(), used)
                used.add(disp)
                inner_env[name] = disp
                shown.append(disp)
            body = go(node.body, inner_env, False)
            s = f"\\sum_{{{', '.join(shown)}}} {body}"
            return f"\\left( {s} \\right)" if wrap else s
        raise TypeError(f"not an expression node: {node!r}")

    env = {v: v for v in free_vars(e)}
    return go(e, env, False)


def render_dot(e: Expr) -> str:
    """The expression tree as a Graphviz digraph (one node per expression node)."""
    lines = ["digraph estimand {", '  node [shape=box];']
    counter = itertools.count()
    ids: Dict[int, str] = {}

    def label(node) -> str:
        if isinstance(node, Factor):
            return render_text(node).replace('"', r"\"")
        if isinstance(node, Product):
            return "product"
        if isinstance(node, Quotient):
            return "quotient"
        shown = ",".join(name for name, _ in node.indices)
        return f"{kind_name(node)} over {shown}"

    def go(node) -> str:
        key = id(node)
        if key in ids:
            return ids[key]
        nid = f"n{next(counter)}"
        ids[key] = nid
        lines.append(f'  {nid} [label="{label(node)}"];')
        children = []
        if isinstance(node, Product):
            children = list(node.terms)
        elif isinstance(node, Quotient):
            children = [node.numerator, node.denominator]
        elif isinstance(node, (Sum, Marginal)):
            children = [node.body]
        for c in children:
            lines.append(f"  {nid} -> {go(c)};")
        return nid

    go(e)
    lines.append("}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- serialization

def _ref_to_dict(ref: Ref) -> dict:
    if isinstance(ref, Var):
        return {"var": ref.name}
    return {"const": ref.value}


def _slot_to_dict(s: Slot) -> dict:
    return {"vertex": s.vertex, **_ref_to_dict(s.ref)}


def _node_to_dict(node) -> dict:
    if isinstance(node, Factor):
        return {
            "kind": "factor",
            "outcomes": [_slot_to_dict(s) for s in node.outcomes],
            "given": [_slot_to_dict(s) for s in node.given],
        }
    if isinstance(node, Product):
        return {"kind": "product", "terms": [_node_to_dict(t) for t in node.terms]}
    if isinstance(node, Quotient):
        return {
            "kind": "quotient",
            "numerator": _node_to_dict(node.numerator),
            "denominator": _node_to_dict(node.denominator),
        }
    if isinstance(node, (Sum, Marginal)):
        return {
            "kind": kind_name(node),
            "indices": [{"var": v, "vertex": x} for v, x in node.indices],
            "body": _node_to_dict(node.body),
        }
    raise TypeError(f"not an expression node: {node!r}")


def to_json(e: Expr) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "expr": _node_to_dict(e)}, indent=2)


def _ref_from_dict(d: dict, path: str) -> Ref:
    if "var" in d and "const" in d:
        raise ExpressionParseError(f"{path}: slot has both 'var' and 'const'")
    if "var" in d:
        if not isinstance(d["var"], str) or not d["var"]:
            raise ExpressionParseError(f"{path}: 'var' must be a non-empty string")
        return Var(d["var"])
    if "const" in d:
        if not isinstance(d["const"], int) or isinstance(d["const"], bool):
            raise ExpressionParseError(f"{path}: 'const' must be an integer")
        return Const(d["const"])
    raise ExpressionParseError(f"{path}: slot needs 'var' or 'const'")


def _slot_from_dict(d: dict, path: str) -> Slot:
    if not isinstance(d, dict) or "vertex" not in d:
        raise ExpressionParseError(f"{path}: slot must be an object with a 'vertex' key")
    return Slot(vertex=d["vertex"], ref=_ref_from_dict(d, path))


def _node_from_dict(d: dict, path: str):
    if not isinstance(d, dict) or "kind" not in d:
        raise ExpressionParseError(f"{path}: expected an object with a 'kind' key")
    kind = d["kind"]
    if kind == "factor":
        return Factor(
            outcomes=tuple(
                _slot_from_dict(s, f"{path}.outcomes[{i}]")
                for i, s in enumerate(d.get("outcomes", []))
            ),
            given=tuple(
                _slot_from_dict(s, f"{path}.given[{i}]")
                for i, s in enumerate(d.get("given", []))
            ),
        )
    if kind == "product":
        return Product(
            terms=tuple(
                _node_from_dict(t, f"{path}.terms[{i}]")
                for i, t in enumerate(d.get("terms", []))
            )
        )
    if kind == "quotient":
        for key in ("numerator", "denominator"):
            if key not in d:
                raise ExpressionParseError(f"{path}: quotient missing {key!r}")
        return Quotient(
            numerator=_node_from_dict(d["numerator"], f"{path}.numerator"),
            denominator=_node_from_dict(d["denominator"], f"{path}.denominator"),
        )
    if kind in ("sum", "marginal"):
        cls = Sum if kind == "sum" else Marginal
        indices = []
        for i, idx in enumerate(d.get("indices", [])):
            if not isinstance(idx, dict) or "var" not in idx or "vertex" not in idx:
                raise ExpressionParseError(
                    f"{path}.indices[{i}]: expected an object with 'var' and 'vertex'"
                )
            indices.append((idx["var"], idx["vertex"]))
        if "body" not in d:
            raise ExpressionParseError(f"{path}: {kind} missing 'body'")
        return cls(indices=tuple(indices), body=_node_from_dict(d["body"], f"{path}.body"))
    raise ExpressionParseError(f"{path}: unknown node kind {kind!r}")


def from_json(text: str) -> Expr:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExpressionParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict) or "expr" not in data:
        raise ExpressionParseError("top level must be an object with an 'expr' key")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ExpressionParseError(f"unsupported schema_version: {version!r}")
    return _node_from_dict(data["expr"], "expr")
