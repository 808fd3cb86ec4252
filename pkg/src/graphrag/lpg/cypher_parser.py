"""Tokenizer and recursive-descent parser for the Cypher subset.

Supported: MATCH with linear paths up to 3 relationships, node labels and
property maps, relationship types with direction, UNWIND of labels()/keys(),
WHERE with AND-joined comparisons (= <> < <= > >= CONTAINS), RETURN with
DISTINCT / aliases / count(*), ORDER BY, LIMIT, and loader-side MERGE/SET
scripts with $parameters. Everything else that looks like Cypher raises
UnsupportedFeatureError; malformed text raises CypherSyntaxError with the
offending position; variables used before being bound raise
UnboundVariableError — all at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import CypherSyntaxError, UnboundVariableError, UnsupportedFeatureError
from .cypher_ast import (
    Condition,
    CountStar,
    CypherQuery,
    FuncCall,
    MergeNode,
    MergeRel,
    NodePattern,
    OrderItem,
    Parameter,
    PathPattern,
    PropertyRef,
    RelPattern,
    ReturnItem,
    SetAssignments,
    UpdateScript,
    Variable,
)

MAX_HOPS = 3

KEYWORDS = {
    "match", "where", "return", "distinct", "order", "by", "limit", "as",
    "and", "contains", "count", "unwind", "merge", "set", "asc", "desc",
    "true", "false", "null",
}

# Real Cypher keywords outside the subset: recognized so they fail loudly
# instead of being misread as identifiers.
UNSUPPORTED_KEYWORDS = {
    "optional", "with", "create", "delete", "detach", "remove", "foreach",
    "union", "call", "skip", "or", "not", "xor", "starts", "ends", "in",
    "is", "exists", "case", "when",
}

FUNCTIONS = {"labels", "keys"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(\.\d+)?([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<param>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:\\.|[^'\\])*'|"(?:\\.|[^"\\])*")
  | (?P<op><=|>=|<>|[=<>})\]({\[\-.,:*])
    """,
    re.VERBOSE,
)

_STRING_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass
class Token:
    kind: str  # ident | number | param | string | op | eof
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise CypherSyntaxError(pos, f"a token (found {text[pos]!r})")
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def _unquote(raw: str, pos: int) -> str:
    body = raw[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            if i + 1 >= len(body):
                raise CypherSyntaxError(pos, "a complete string escape")
            out.append(_STRING_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text.lower() in names

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            return self.next()
        raise CypherSyntaxError(tok.pos, f"{text!r}")

    def expect_keyword(self, name: str) -> Token:
        tok = self.peek()
        if tok.kind == "ident" and tok.text.lower() == name:
            return self.next()
        raise CypherSyntaxError(tok.pos, name.upper())

    def expect_name(self, what: str) -> str:
        tok = self.peek()
        if tok.kind == "ident":
            lowered = tok.text.lower()
            if lowered in UNSUPPORTED_KEYWORDS:
                raise UnsupportedFeatureError(tok.text)
            if lowered in KEYWORDS:
                raise CypherSyntaxError(tok.pos, what)
            return self.next().text
        raise CypherSyntaxError(tok.pos, what)

    def check_unsupported(self) -> None:
        tok = self.peek()
        if tok.kind == "ident" and tok.text.lower() in UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeatureError(tok.text)
        if tok.kind == "op" and tok.text == "*":
            raise UnsupportedFeatureError("*")

    # -- entry ------------------------------------------------------------

    def parse(self) -> CypherQuery | UpdateScript:
        tok = self.peek()
        if tok.kind == "eof":
            raise CypherSyntaxError(0, "MATCH or MERGE")
        if self.at_keyword("match"):
            return self.read_query()
        if self.at_keyword("merge", "set"):
            return self.update_script()
        self.check_unsupported()
        raise CypherSyntaxError(tok.pos, "MATCH or MERGE")

    # -- read queries -----------------------------------------------------

    def read_query(self) -> CypherQuery:
        q = CypherQuery()
        self.expect_keyword("match")
        q.patterns.append(self.path())
        while self.peek().kind == "op" and self.peek().text == ",":
            self.next()
            q.patterns.append(self.path())
        while self.at_keyword("match"):
            raise UnsupportedFeatureError("multiple MATCH clauses")

        bound = self._bound_vars(q)

        if self.at_keyword("unwind"):
            self.next()
            fn = self.func_call(bound)
            self.expect_keyword("as")
            alias = self.expect_name("an alias name")
            q.unwind = (fn, alias)
            bound.add(alias)

        if self.at_keyword("where"):
            self.next()
            q.where.append(self.condition(bound))
            while self.at_keyword("and"):
                self.next()
                q.where.append(self.condition(bound))

        self.check_unsupported()
        self.expect_keyword("return")
        if self.at_keyword("distinct"):
            self.next()
            q.distinct = True
        q.return_items.append(self.return_item(bound))
        while self.peek().kind == "op" and self.peek().text == ",":
            self.next()
            q.return_items.append(self.return_item(bound))

        counts = [i for i in q.return_items if isinstance(i.expr, CountStar)]
        if counts and len(q.return_items) > 1:
            raise UnsupportedFeatureError("count(*) combined with other return items")
        if counts and q.distinct:
            raise UnsupportedFeatureError("DISTINCT count(*)")

        aliases = {i.alias for i in q.return_items if i.alias}
        if self.at_keyword("order"):
            self.next()
            self.expect_keyword("by")
            q.order_by.append(self.order_item(bound | aliases))
            while self.peek().kind == "op" and self.peek().text == ",":
                self.next()
                q.order_by.append(self.order_item(bound | aliases))

        if self.at_keyword("limit"):
            self.next()
            tok = self.peek()
            if tok.kind != "number" or not tok.text.isdigit():
                raise CypherSyntaxError(tok.pos, "an integer")
            q.limit = int(self.next().text)

        self.check_unsupported()
        tok = self.peek()
        if tok.kind != "eof":
            raise CypherSyntaxError(tok.pos, "end of query")
        return q

    def _bound_vars(self, q: CypherQuery) -> set[str]:
        bound: set[str] = set()
        for path in q.patterns:
            for node in path.nodes:
                if node.var:
                    bound.add(node.var)
            for rel in path.rels:
                if rel.var:
                    bound.add(rel.var)
        return bound

    def path(self) -> PathPattern:
        path = PathPattern()
        path.nodes.append(self.node_pattern())
        while self.peek().kind == "op" and self.peek().text in ("-", "<"):
            if len(path.rels) >= MAX_HOPS:
                raise UnsupportedFeatureError(f"paths longer than {MAX_HOPS} relationships")
            path.rels.append(self.rel_pattern())
            path.nodes.append(self.node_pattern())
        return path

    def node_pattern(self) -> NodePattern:
        self.expect_op("(")
        node = NodePattern()
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text.lower() in UNSUPPORTED_KEYWORDS:
                raise UnsupportedFeatureError(tok.text)
            node.var = self.next().text
        if self.peek().kind == "op" and self.peek().text == ":":
            self.next()
            node.label = self.expect_name("a label")
        if self.peek().kind == "op" and self.peek().text == "{":
            node.props = self.property_map()
        self.expect_op(")")
        return node

    def rel_pattern(self) -> RelPattern:
        rel = RelPattern()
        tok = self.next()  # "-" or "<"
        incoming = tok.text == "<"
        if incoming:
            self.expect_op("-")
        self.expect_op("[")
        tok = self.peek()
        if tok.kind == "ident":
            rel.var = self.next().text
        if self.peek().kind == "op" and self.peek().text == ":":
            self.next()
            rel.rel_type = self.expect_name("a relationship type")
        if self.peek().kind == "op" and self.peek().text == "*":
            raise UnsupportedFeatureError("variable-length relationships [*]")
        self.expect_op("]")
        self.expect_op("-")
        outgoing = False
        if self.peek().kind == "op" and self.peek().text == ">":
            if incoming:
                raise CypherSyntaxError(self.peek().pos, "a node pattern")
            self.next()
            outgoing = True
        rel.direction = "in" if incoming else ("out" if outgoing else "any")
        return rel

    def property_map(self) -> dict:
        self.expect_op("{")
        props: dict = {}
        while True:
            key = self.expect_name("a property key")
            self.expect_op(":")
            props[key] = self.value()
            tok = self.peek()
            if tok.kind == "op" and tok.text == ",":
                self.next()
                continue
            break
        self.expect_op("}")
        return props

    def value(self):
        tok = self.peek()
        if tok.kind == "string":
            return _unquote(self.next().text, tok.pos)
        if tok.kind == "number":
            return self._number(self.next().text)
        if tok.kind == "param":
            return Parameter(self.next().text[1:])
        if tok.kind == "op" and tok.text == "-":
            self.next()
            num = self.peek()
            if num.kind != "number":
                raise CypherSyntaxError(num.pos, "a number")
            return -self._number(self.next().text)
        if tok.kind == "ident" and tok.text.lower() in ("true", "false"):
            return self.next().text.lower() == "true"
        if tok.kind == "ident" and tok.text.lower() == "null":
            raise UnsupportedFeatureError("null literals")
        raise CypherSyntaxError(tok.pos, "a literal value")

    @staticmethod
    def _number(text: str):
        return float(text) if ("." in text or "e" in text or "E" in text) else int(text)

    def func_call(self, bound: set[str]) -> FuncCall:
        tok = self.peek()
        if tok.kind != "ident":
            raise CypherSyntaxError(tok.pos, "a function name")
        name = tok.text.lower()
        if name not in FUNCTIONS:
            raise UnsupportedFeatureError(tok.text)
        self.next()
        self.expect_op("(")
        var = self.expect_name("a variable")
        if var not in bound:
            raise UnboundVariableError(var)
        self.expect_op(")")
        return FuncCall(name, var)

    def condition(self, bound: set[str]) -> Condition:
        left = self.property_ref(bound)
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("=", "<>", "<", "<=", ">", ">="):
            op = self.next().text
        elif self.at_keyword("contains"):
            self.next()
            op = "CONTAINS"
        else:
            self.check_unsupported()
            raise CypherSyntaxError(tok.pos, "a comparison operator")
        tok = self.peek()
        if tok.kind == "ident" and tok.text.lower() not in KEYWORDS | UNSUPPORTED_KEYWORDS:
            right: object = self.property_ref(bound)
        else:
            right = self.value()
        return Condition(left, op, right)

    def property_ref(self, bound: set[str]) -> PropertyRef:
        var = self.expect_name("a variable")
        if var not in bound:
            raise UnboundVariableError(var)
        self.expect_op(".")
        key = self.expect_name("a property key")
        return PropertyRef(var, key)

    def return_item(self, bound: set[str]) -> ReturnItem:
        expr = self.expr(bound)
        alias = None
        if self.at_keyword("as"):
            self.next()
            alias = self.expect_name("an alias name")
        return ReturnItem(expr, alias)

    def order_item(self, bound: set[str]) -> OrderItem:
        expr = self.expr(bound)
        descending = False
        if self.at_keyword("desc"):
            self.next()
            descending = True
        elif self.at_keyword("asc"):
            self.next()
        return OrderItem(expr, descending)

    def expr(self, bound: set[str]):
        tok = self.peek()
        if self.at_keyword("count"):
            self.next()
            self.expect_op("(")
            self.expect_op("*")
            self.expect_op(")")
            return CountStar()
        if tok.kind == "ident" and tok.text.lower() in FUNCTIONS:
            nxt = self.tokens[self.i + 1]
            if nxt.kind == "op" and nxt.text == "(":
                return self.func_call(bound)
        name = self.expect_name("an expression")
        if self.peek().kind == "op" and self.peek().text == ".":
            self.next()
            key = self.expect_name("a property key")
            if name not in bound:
                raise UnboundVariableError(name)
            return PropertyRef(name, key)
        if name not in bound:
            raise UnboundVariableError(name)
        return Variable(name)

    # -- update scripts ---------------------------------------------------

    def update_script(self) -> UpdateScript:
        script = UpdateScript()
        bound: set[str] = set()
        while True:
            if self.at_keyword("merge"):
                self.next()
                script.statements.append(self.merge_statement(bound))
            elif self.at_keyword("set"):
                self.next()
                script.statements.append(self.set_statement(bound))
            elif self.peek().kind == "eof":
                break
            else:
                self.check_unsupported()
                raise CypherSyntaxError(self.peek().pos, "MERGE or SET")
        if not script.statements:
            raise CypherSyntaxError(self.peek().pos, "MERGE or SET")
        return script

    def merge_statement(self, bound: set[str]):
        node = self.node_pattern()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("-", "<"):
            if node.label or node.props:
                raise UnsupportedFeatureError("labeled endpoints in relationship MERGE")
            rel = self.rel_pattern()
            target = self.node_pattern()
            if rel.direction == "any":
                raise UnsupportedFeatureError("undirected MERGE relationships")
            if rel.rel_type is None:
                raise CypherSyntaxError(tok.pos, "a relationship type")
            if node.var is None or target.var is None:
                raise CypherSyntaxError(tok.pos, "bound endpoint variables")
            for var in (node.var, target.var):
                if var not in bound:
                    raise UnboundVariableError(var)
            if rel.direction == "in":
                return MergeRel(target.var, rel.rel_type, node.var)
            return MergeRel(node.var, rel.rel_type, target.var)
        if node.label is None:
            if node.var is None or node.var not in bound:
                raise UnboundVariableError(node.var or "_")
        if node.var:
            bound.add(node.var)
        return MergeNode(node)

    def set_statement(self, bound: set[str]) -> SetAssignments:
        stmt = SetAssignments()
        while True:
            ref = self.property_ref(bound)
            self.expect_op("=")
            tok = self.peek()
            if tok.kind == "ident" and tok.text.lower() not in KEYWORDS | UNSUPPORTED_KEYWORDS:
                value: object = self.property_ref(bound)
            else:
                value = self.value()
            stmt.assignments.append((ref, value))
            if self.peek().kind == "op" and self.peek().text == ",":
                self.next()
                continue
            break
        return stmt


def parse_cypher(text: str) -> CypherQuery | UpdateScript:
    """Parse one query or loader script; see module docstring for the subset."""
    return _Parser(text).parse()
