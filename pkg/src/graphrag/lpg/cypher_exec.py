"""Pattern-matching executor for the Cypher subset.

Read queries enumerate all bindings of the MATCH patterns (labels, types,
direction, property maps), filter with WHERE, optionally UNWIND labels()/
keys(), then project RETURN items with DISTINCT / ORDER BY / LIMIT. Row
order is always deterministic: ORDER BY when present, otherwise a canonical
sort over the projected values. Update scripts (MERGE/SET with $parameters)
mutate the graph through the same merge primitives the fund loader uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import TypeMismatchError
from .cypher_ast import (
    Condition,
    CountStar,
    CypherQuery,
    FuncCall,
    MergeNode,
    MergeRel,
    Parameter,
    PathPattern,
    PropertyRef,
    SetAssignments,
    UpdateScript,
    Variable,
)
from .graph import GraphEdge, GraphNode, PropertyGraph


@dataclass
class ResultTable:
    columns: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)

    def values(self, column: str) -> list:
        return [row[column] for row in self.rows]

    def render_rows(self) -> list[str]:
        return [
            ", ".join(f"{col}={render_value(row[col])}" for col in self.columns)
            for row in self.rows
        ]


def render_value(value: object) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, GraphNode):
        labels = ":".join(sorted(value.labels))
        props = ", ".join(f"{k}: {render_value(v)}" for k, v in sorted(value.properties.items()))
        return f"(:{labels} {{{props}}})"
    if isinstance(value, GraphEdge):
        return f"[:{value.rel_type}]"
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    return str(value)


def _sort_key(value: object):
    # total order across the mixed value types a projection can produce
    if value is None:
        return (0, "")
    if isinstance(value, bool):
        return (1, value)
    if isinstance(value, (int, float)):
        return (2, float(value))
    if isinstance(value, str):
        return (3, value)
    if isinstance(value, list):
        return (4, tuple(_sort_key(v) for v in value))
    if isinstance(value, GraphNode):
        return (5, value.node_id)
    if isinstance(value, GraphEdge):
        return (6, value.edge_id)
    return (7, str(value))


def _hash_key(value: object):
    if isinstance(value, list):
        return ("list", tuple(_hash_key(v) for v in value))
    if isinstance(value, GraphNode):
        return ("node", value.node_id)
    if isinstance(value, GraphEdge):
        return ("edge", value.edge_id)
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("num", float(value))
    return ("val", value)


def _node_matches(node: GraphNode, label: str | None, props: dict) -> bool:
    if label is not None and label not in node.labels:
        return False
    for key, expected in props.items():
        if isinstance(expected, Parameter):
            raise ValueError(f"unresolved parameter ${expected.name}")
        actual = node.properties.get(key)
        if actual is None or not _equal(actual, expected):
            return False
    return True


def _equal(a: object, b: object) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    return type(a) is type(b) and a == b


def _match_path(graph: PropertyGraph, path: PathPattern, binding: dict) -> list[dict]:
    results: list[dict] = []
    first = path.nodes[0]
    for node in _candidates(graph, first, binding):
        b = dict(binding)
        if first.var:
            b[first.var] = node
        _extend(graph, path, 0, node, b, set(), results)
    return results


def _candidates(graph: PropertyGraph, pattern, binding: dict) -> list[GraphNode]:
    if pattern.var and pattern.var in binding:
        node = binding[pattern.var]
        return [node] if _node_matches(node, pattern.label, pattern.props) else []
    return [
        n for n in graph.nodes.values() if _node_matches(n, pattern.label, pattern.props)
    ]


def _extend(graph: PropertyGraph, path: PathPattern, depth: int, current: GraphNode,
            binding: dict, used_edges: set[str], results: list[dict]) -> None:
    if depth == len(path.rels):
        results.append(binding)
        return
    rel = path.rels[depth]
    target_pattern = path.nodes[depth + 1]
    steps: list[tuple[str, GraphNode]] = []
    if rel.direction in ("out", "any"):
        for edge_id in graph.out_edges.get(current.node_id, ()):
            steps.append((edge_id, graph.nodes[graph.edges[edge_id].to_id]))
    if rel.direction in ("in", "any"):
        for edge_id in graph.in_edges.get(current.node_id, ()):
            steps.append((edge_id, graph.nodes[graph.edges[edge_id].from_id]))
    for edge_id, target in steps:
        if edge_id in used_edges:
            continue
        edge = graph.edges[edge_id]
        if rel.rel_type is not None and edge.rel_type != rel.rel_type:
            continue
        if not _node_matches(target, target_pattern.label, target_pattern.props):
            continue
        if target_pattern.var and target_pattern.var in binding:
            if binding[target_pattern.var].node_id != target.node_id:
                continue
        b = dict(binding)
        if rel.var:
            b[rel.var] = edge
        if target_pattern.var:
            b[target_pattern.var] = target
        _extend(graph, path, depth + 1, target, b, used_edges | {edge_id}, results)


def _eval_expr(expr, binding: dict):
    if isinstance(expr, Variable):
        return binding.get(expr.name)
    if isinstance(expr, PropertyRef):
        entity = binding.get(expr.var)
        if entity is None:
            return None
        return entity.properties.get(expr.key)
    if isinstance(expr, FuncCall):
        entity = binding.get(expr.var)
        if not isinstance(entity, GraphNode):
            return None
        if expr.func == "labels":
            return sorted(entity.labels)
        return sorted(entity.properties)
    raise TypeError(f"cannot evaluate {expr!r}")


_ORDERED_OPS = {"<", "<=", ">", ">="}


def _eval_condition(cond: Condition, binding: dict) -> bool:
    left = _eval_expr(cond.left, binding)
    right = (
        _eval_expr(cond.right, binding)
        if isinstance(cond.right, PropertyRef)
        else cond.right
    )
    if isinstance(right, Parameter):
        raise ValueError(f"unresolved parameter ${right.name}")
    if left is None or right is None:
        return False
    if cond.op == "=":
        return _equal(left, right)
    if cond.op == "<>":
        return not _equal(left, right)
    if cond.op == "CONTAINS":
        return isinstance(left, str) and isinstance(right, str) and right in left
    # ordered comparison: numbers with numbers, strings with strings
    left_num = isinstance(left, (int, float)) and not isinstance(left, bool)
    right_num = isinstance(right, (int, float)) and not isinstance(right, bool)
    if left_num and right_num:
        a, b = float(left), float(right)
    elif isinstance(left, str) and isinstance(right, str):
        a, b = left, right
    else:
        raise TypeMismatchError(f"{left!r} {cond.op} {right!r}")
    if cond.op == "<":
        return a < b
    if cond.op == "<=":
        return a <= b
    if cond.op == ">":
        return a > b
    return a >= b


def _column_name(item) -> str:
    if item.alias:
        return item.alias
    from .cypher_ast import print_expr

    return print_expr(item.expr)


def execute_cypher(graph: PropertyGraph, query: CypherQuery | UpdateScript,
                   params: dict | None = None) -> ResultTable:
    if isinstance(query, UpdateScript):
        _apply_update(graph, query, params or {})
        return ResultTable()

    bindings: list[dict] = [{}]
    for path in query.patterns:
        bindings = [b2 for b in bindings for b2 in _match_path(graph, path, b)]

    if query.where:
        bindings = [
            b for b in bindings if all(_eval_condition(c, b) for c in query.where)
        ]

    if query.unwind:
        expr, alias = query.unwind
        expanded = []
        for b in bindings:
            values = _eval_expr(expr, b) or []
            for value in values:
                b2 = dict(b)
                b2[alias] = value
                expanded.append(b2)
        bindings = expanded

    columns = [_column_name(item) for item in query.return_items]
    if query.return_items and isinstance(query.return_items[0].expr, CountStar):
        return ResultTable(columns, [{columns[0]: len(bindings)}])

    projected: list[tuple[dict, dict]] = []  # (row, binding) pairs
    for b in bindings:
        row = {
            col: _eval_expr(item.expr, b)
            for item, col in zip(query.return_items, columns)
        }
        projected.append((row, b))

    if query.distinct:
        seen = set()
        unique = []
        for row, b in projected:
            key = tuple(_hash_key(row[c]) for c in columns)
            if key not in seen:
                seen.add(key)
                unique.append((row, b))
        projected = unique

    if query.order_by:
        def order_value(pair, item):
            row, b = pair
            # an ORDER BY name may reference a RETURN alias
            if isinstance(item.expr, Variable) and item.expr.name in row:
                return row[item.expr.name]
            return _eval_expr(item.expr, b)

        # stable multi-pass sort, least-significant key first
        for item in reversed(query.order_by):
            projected.sort(
                key=lambda pair, it=item: _sort_key(order_value(pair, it)),
                reverse=item.descending,
            )
    else:
        projected.sort(
            key=lambda pair: tuple(_sort_key(pair[0][c]) for c in columns)
        )

    rows = [row for row, _ in projected]
    if query.limit is not None:
        rows = rows[: query.limit]
    return ResultTable(columns, rows)


def _resolve(value, params: dict):
    if isinstance(value, Parameter):
        if value.name not in params:
            raise ValueError(f"missing parameter ${value.name}")
        return params[value.name]
    return value


def _apply_update(graph: PropertyGraph, script: UpdateScript, params: dict) -> None:
    env: dict[str, GraphNode] = {}
    for stmt in script.statements:
        if isinstance(stmt, MergeNode):
            pattern = stmt.node
            if pattern.label is None:
                if pattern.var not in env:
                    raise ValueError(f"MERGE ({pattern.var}) before it is bound")
                continue
            props = {k: _resolve(v, params) for k, v in pattern.props.items()}
            node = graph.merge_node(pattern.label, props)
            if pattern.var:
                env[pattern.var] = node
        elif isinstance(stmt, MergeRel):
            graph.merge_edge(
                stmt.rel_type, env[stmt.from_var].node_id, env[stmt.to_var].node_id
            )
        elif isinstance(stmt, SetAssignments):
            for ref, value in stmt.assignments:
                resolved = _resolve(value, params)
                if isinstance(resolved, PropertyRef):
                    resolved = _eval_expr(resolved, env)
                graph.set_properties(env[ref.var], {ref.key: resolved})
        else:
            raise TypeError(f"not a statement: {stmt!r}")
