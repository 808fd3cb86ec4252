"""Deterministic offline stand-ins for the chat provider.

``GroundTruthClient`` answers every registered prompt tag with rule-driven
responses computed from the corpus itself: mention extraction scans the
metadata, relationship selection matches candidate predicates against the
question, text-to-Cypher applies schema-aware translation rules, answers are
extractive (the evidence lines verbatim), and judging applies the rubric
containment rule. ``RecordingClient`` captures every (tag, digest, response)
triple so the run can be replayed byte-for-byte through the pure scripted
client, which is how the offline evaluation suite and the CLI demos work.
"""

from __future__ import annotations

import json
import re

from .corpus import FundDocument, FundMetadata
from .llm import ChatRequest, ScriptedResponses, prompt_digest
from .predicate_nlp import categorize_predicate, predicate_to_text

_STOPWORDS = {
    "the", "all", "for", "and", "are", "is", "of", "in", "with", "what",
    "who", "when", "where", "which", "how", "list", "show", "tell", "me",
    "about", "a", "an", "to", "by", "per", "does", "do",
}


def _tokens(text: str) -> list[str]:
    cleaned = "".join(c if c.isalnum() else " " for c in text.lower())
    return [t for t in cleaned.split() if t and t not in _STOPWORDS]


def _token_match(a: str, b: str) -> bool:
    if a == b:
        return True
    if len(a) < 4 or len(b) < 4:
        return False
    return a[:4] == b[:4]


def _any_match(q_tokens: list[str], p_tokens: list[str]) -> bool:
    return any(_token_match(q, p) for q in q_tokens for p in p_tokens)


_QUESTION_LINE = re.compile(r"^Question: (.*)$", re.MULTILINE)


def _question_from(user: str) -> str:
    m = _QUESTION_LINE.search(user)
    return m.group(1).strip() if m else user.strip()


class GroundTruthClient:
    """Scripted-quality responses computed from generator ground truth."""

    def __init__(self, docs: list[FundDocument], metadata: list[FundMetadata]):
        self.docs = {d.doc_id: d for d in docs}
        self.metadata = sorted(metadata, key=lambda m: m.abbreviated_name)
        self.fund_types = sorted({m.fund_type for m in self.metadata if m.fund_type},
                                 key=len, reverse=True)
        self.product_types = sorted({m.product_type for m in self.metadata if m.product_type})
        self.benchmarks = sorted({
            str(d.body.get("benchmarkName")) for d in docs if d.body.get("benchmarkName")
        })
        self.managers = sorted({
            name
            for d in docs
            for name in (d.body.get("portfolioManagers") or [])
            if isinstance(name, str)
        })
        self.share_classes = sorted({m.share_class for m in self.metadata if m.share_class})

    # -- gateway interface --------------------------------------------------

    def complete(self, request: ChatRequest) -> str:
        handler = getattr(self, f"_{request.tag}", None)
        if handler is None:
            raise ValueError(f"no offline handler for tag {request.tag!r}")
        return handler(request.user)

    # -- handlers -------------------------------------------------------------

    def _node_extraction(self, user: str) -> str:
        question = _question_from(user)
        lowered = question.lower()
        funds = [
            m.abbreviated_name
            for m in self.metadata
            if m.abbreviated_name.lower() in lowered
        ]
        funds += [
            m.abbreviated_name
            for m in self.metadata
            if m.original_name and m.original_name.lower() in lowered
            and m.abbreviated_name not in funds
        ]
        remaining = lowered
        fund_types = []
        for fund_type in self.fund_types:  # longest first: "growth and income"
            if fund_type.lower() in remaining:
                fund_types.append(fund_type)
                remaining = remaining.replace(fund_type.lower(), " ")
        q_tokens = set(_tokens(question))
        asset_classes = [pt for pt in self.product_types if pt.lower() in q_tokens]
        return json.dumps(
            {"funds": funds, "fund_types": fund_types, "asset_classes": asset_classes}
        )

    def _relationship_selection(self, user: str) -> str:
        question = _question_from(user)
        q_tokens = _tokens(question)
        cap_match = re.search(r"at most (\d+)", user)
        cap = int(cap_match.group(1)) if cap_match else 100
        candidates = [
            line[2:] for line in user.splitlines()
            if line.startswith("  ") and not line.startswith("   ")
        ]
        selected = []
        compare = question.lower().startswith("compare")
        core = ("type", "benchmark", "expense", "ratio", "nav", "objective",
                "strategy", "return", "name")
        for predicate in candidates:
            p_tokens = _tokens(predicate_to_text(predicate))
            if _any_match(q_tokens, p_tokens):
                selected.append(predicate)
            elif compare and _any_match(list(core), p_tokens):
                # compare questions implicitly target the core attributes
                selected.append(predicate)
        return json.dumps(sorted(set(selected))[:cap])

    def _text2cypher(self, user: str) -> str:
        question = _question_from(user)
        return f"```cypher\n{self.translate(question)}\n```"

    def translate(self, question: str) -> str:
        lowered = question.lower()
        q_tokens = set(_tokens(question))
        mentioned = [
            m.abbreviated_name
            for m in self.metadata
            if m.abbreviated_name.lower() in lowered
        ]

        if len(mentioned) >= 2 and lowered.startswith("compare"):
            prefix = _common_prefix(mentioned[0], mentioned[1])
            return (
                "MATCH (f:Fund)-[:HAS_FEES]->(fee:FeeStructure) "
                f"WHERE f.name CONTAINS '{prefix}' "
                "RETURN f.name, fee.expenseRatio ORDER BY f.name"
            )
        if mentioned:
            name = mentioned[0]
            if "manager" in lowered:
                return (
                    f"MATCH (f:Fund {{name: '{name}'}})-[:MANAGED_BY]->(m:PortfolioManager) "
                    "RETURN m.name ORDER BY m.name"
                )
            if "expense" in lowered or "fee" in lowered:
                return (
                    f"MATCH (f:Fund {{name: '{name}'}})-[:HAS_FEES]->(fee:FeeStructure) "
                    "RETURN fee.expenseRatio"
                )
            if "benchmark" in lowered:
                return (
                    f"MATCH (f:Fund {{name: '{name}'}})-[:HAS_BENCHMARK]->(b:Benchmark) "
                    "RETURN b.name"
                )
            if "inception" in lowered:
                return f"MATCH (f:Fund {{name: '{name}'}}) RETURN f.inceptionDate"
            if "objective" in lowered or "strategy" in lowered:
                return f"MATCH (f:Fund {{name: '{name}'}}) RETURN f.objective, f.strategy"
            if "success" in lowered or "metric" in lowered:
                return (
                    f"MATCH (f:Fund {{name: '{name}'}})-[:HAS_SUCCESS_METRIC]->(m:SuccessMetric) "
                    "RETURN m.year, m.successRate ORDER BY m.year"
                )
            if "return" in lowered:
                return (
                    f"MATCH (f:Fund {{name: '{name}'}})-[:HAS_RETURN]->(r:AnnualReturn) "
                    "RETURN r.year, r.fundReturn ORDER BY r.year"
                )
            return f"MATCH (f:Fund {{name: '{name}'}}) RETURN f.name, f.originalName"

        for manager in self.managers:
            if manager.lower() in lowered:
                return (
                    f"MATCH (f:Fund)-[:MANAGED_BY]->(m:PortfolioManager {{name: '{manager}'}}) "
                    "RETURN f.name ORDER BY f.name"
                )
        for benchmark in self.benchmarks:
            if set(_tokens(benchmark)) <= q_tokens:
                return (
                    f"MATCH (f:Fund)-[:HAS_BENCHMARK]->(b:Benchmark {{name: '{benchmark}'}}) "
                    "RETURN f.name ORDER BY f.name"
                )
        for fund_type in self.fund_types:
            if fund_type.lower() in lowered:
                return (
                    f"MATCH (f:Fund)-[:HAS_FUND_TYPE]->(t:FundType {{type: '{fund_type}'}}) "
                    "RETURN f.name ORDER BY f.name"
                )
        for product in self.product_types:
            if product.lower() in q_tokens:
                return (
                    f"MATCH (f:Fund)-[:HAS_PRODUCT_TYPE]->(p:ProductType {{type: '{product}'}}) "
                    "RETURN f.name ORDER BY f.name"
                )
        for share_class in self.share_classes:
            if f"class {share_class.lower()}" in lowered or f"share class {share_class.lower()}" in lowered:
                return (
                    f"MATCH (f:Fund)-[:HAS_SHARE_CLASS]->(s:ShareClass {{name: '{share_class}'}}) "
                    "RETURN f.name ORDER BY f.name"
                )
        if "how many" in lowered:
            return "MATCH (f:Fund) RETURN count(*)"
        return "MATCH (f:Fund) RETURN f.name ORDER BY f.name"

    def _answer(self, user: str) -> str:
        lines = []
        in_evidence = False
        for line in user.splitlines():
            if line.startswith("Evidence:"):
                in_evidence = True
                continue
            if line.startswith("Question:"):
                break
            if in_evidence and line.startswith("- "):
                lines.append(line[2:])
        return "\n".join(lines) if lines else "No supporting data found."

    def _judge(self, user: str) -> str:
        required = _facts_section(user, "Required facts:")
        forbidden = _facts_section(user, "Forbidden facts:")
        answer = _answer_section(user).lower()
        if any(fact.lower() in answer for fact in forbidden):
            return "incorrect"
        if not required:
            return "correct"
        present = sum(1 for fact in required if fact.lower() in answer)
        if present == len(required):
            return "correct"
        if present > 0:
            return "partial"
        return "incorrect"

    def _intent(self, user: str) -> str:
        from .evaluation import classify_intent

        return classify_intent(_question_from(user))

    def _predicate_text(self, user: str) -> str:
        m = re.search(r"^Path: (.*)$", user, re.MULTILINE)
        return predicate_to_text(m.group(1).strip()) if m else ""

    def _predicate_category(self, user: str) -> str:
        m = re.search(r"^Path: (.*)$", user, re.MULTILINE)
        predicate = m.group(1).strip() if m else user.strip()
        return ", ".join(sorted(categorize_predicate(predicate)))


def _common_prefix(a: str, b: str) -> str:
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    return a[:i]


def _facts_section(user: str, header: str) -> list[str]:
    facts = []
    in_section = False
    for line in user.splitlines():
        if line.startswith(header):
            in_section = True
            continue
        if in_section:
            if line.startswith("- "):
                fact = line[2:].strip()
                if fact and fact != "(none)":
                    facts.append(fact)
            elif line.strip():
                break
    return facts


def _answer_section(user: str) -> str:
    m = re.search(r"^Answer:\n(.*?)\n*Judgment:", user, re.DOTALL | re.MULTILINE)
    return m.group(1) if m else ""


class RecordingClient:
    """Wraps any client and captures (tag, digest) -> response for replay."""

    def __init__(self, inner):
        self.inner = inner
        self.script = ScriptedResponses()

    def complete(self, request: ChatRequest) -> str:
        response = self.inner.complete(request)
        self.script.put(request.tag, prompt_digest(request.system, request.user), response)
        return response
