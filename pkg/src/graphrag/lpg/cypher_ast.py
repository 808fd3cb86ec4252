"""AST for the Cypher subset, plus the canonical printer.

The printer is a fixed point: parsing its output reproduces the same AST,
which keeps provenance strings and retry prompts stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class PropertyRef:
    var: str
    key: str


@dataclass(frozen=True)
class FuncCall:
    func: str  # "labels" | "keys"
    var: str


@dataclass(frozen=True)
class CountStar:
    pass


@dataclass(frozen=True)
class Parameter:
    name: str


Expr = Variable | PropertyRef | FuncCall | CountStar
Value = str | int | float | bool


@dataclass
class NodePattern:
    var: str | None = None
    label: str | None = None
    props: dict = field(default_factory=dict)


@dataclass
class RelPattern:
    var: str | None = None
    rel_type: str | None = None
    direction: str = "out"  # "out" | "in" | "any"


@dataclass
class PathPattern:
    nodes: list[NodePattern] = field(default_factory=list)
    rels: list[RelPattern] = field(default_factory=list)


@dataclass
class Condition:
    left: PropertyRef
    op: str  # = <> < <= > >= CONTAINS
    right: object  # Value | PropertyRef | Parameter


@dataclass
class ReturnItem:
    expr: Expr
    alias: str | None = None


@dataclass
class OrderItem:
    expr: Expr
    descending: bool = False


@dataclass
class CypherQuery:
    patterns: list[PathPattern] = field(default_factory=list)
    unwind: tuple[FuncCall, str] | None = None
    where: list[Condition] = field(default_factory=list)
    return_items: list[ReturnItem] = field(default_factory=list)
    distinct: bool = False
    order_by: list[OrderItem] = field(default_factory=list)
    limit: int | None = None


@dataclass
class MergeNode:
    node: NodePattern


@dataclass
class MergeRel:
    from_var: str
    rel_type: str
    to_var: str


@dataclass
class SetAssignments:
    assignments: list[tuple[PropertyRef, object]] = field(default_factory=list)


@dataclass
class UpdateScript:
    statements: list = field(default_factory=list)


def print_value(value: object) -> str:
    if isinstance(value, Parameter):
        return f"${value.name}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    escaped = str(value).replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def print_expr(expr: object) -> str:
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, PropertyRef):
        return f"{expr.var}.{expr.key}"
    if isinstance(expr, FuncCall):
        return f"{expr.func}({expr.var})"
    if isinstance(expr, CountStar):
        return "count(*)"
    raise TypeError(f"not an expression: {expr!r}")


def _print_props(props: dict) -> str:
    inner = ", ".join(f"{k}: {print_value(v)}" for k, v in props.items())
    return f" {{{inner}}}" if props else ""


def print_node(node: NodePattern) -> str:
    label = f":{node.label}" if node.label else ""
    return f"({node.var or ''}{label}{_print_props(node.props)})"


def print_rel(rel: RelPattern) -> str:
    inner = f"[{rel.var or ''}{':' + rel.rel_type if rel.rel_type else ''}]"
    if rel.direction == "out":
        return f"-{inner}->"
    if rel.direction == "in":
        return f"<-{inner}-"
    return f"-{inner}-"


def print_path(path: PathPattern) -> str:
    parts = [print_node(path.nodes[0])]
    for rel, node in zip(path.rels, path.nodes[1:]):
        parts.append(print_rel(rel))
        parts.append(print_node(node))
    return "".join(parts)


def print_query(q: CypherQuery | UpdateScript) -> str:
    if isinstance(q, UpdateScript):
        return print_update(q)
    parts = ["MATCH " + ", ".join(print_path(p) for p in q.patterns)]
    if q.unwind:
        expr, alias = q.unwind
        parts.append(f"UNWIND {print_expr(expr)} AS {alias}")
    if q.where:
        rendered = []
        for cond in q.where:
            right = (
                print_expr(cond.right)
                if isinstance(cond.right, PropertyRef)
                else print_value(cond.right)
            )
            rendered.append(f"{print_expr(cond.left)} {cond.op} {right}")
        parts.append("WHERE " + " AND ".join(rendered))
    items = ", ".join(
        print_expr(i.expr) + (f" AS {i.alias}" if i.alias else "") for i in q.return_items
    )
    parts.append(("RETURN DISTINCT " if q.distinct else "RETURN ") + items)
    if q.order_by:
        rendered = ", ".join(
            print_expr(o.expr) + (" DESC" if o.descending else "") for o in q.order_by
        )
        parts.append("ORDER BY " + rendered)
    if q.limit is not None:
        parts.append(f"LIMIT {q.limit}")
    return " ".join(parts)


def print_update(script: UpdateScript) -> str:
    parts = []
    for stmt in script.statements:
        if isinstance(stmt, MergeNode):
            parts.append(f"MERGE {print_node(stmt.node)}")
        elif isinstance(stmt, MergeRel):
            parts.append(f"MERGE ({stmt.from_var})-[:{stmt.rel_type}]->({stmt.to_var})")
        elif isinstance(stmt, SetAssignments):
            rendered = ", ".join(
                f"{print_expr(ref)} = "
                + (print_expr(val) if isinstance(val, PropertyRef) else print_value(val))
                for ref, val in stmt.assignments
            )
            parts.append("SET " + rendered)
        else:
            raise TypeError(f"not a statement: {stmt!r}")
    return " ".join(parts)
