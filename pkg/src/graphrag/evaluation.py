"""Intent classification, answer judging, and exact score aggregation.

Judgments map to points as correct=1, partial=0.5, incorrect=0; all
arithmetic uses rationals so half points never pick up float drift. Reports
render the two-table layout (overall score per pipeline, count breakdown per
pipeline and intent).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import UnknownIntentError, UnparseableJudgmentError
from .llm import ChatRequest, complete, parse_structured

INTENTS = ("compare", "detail", "search", "other")
JUDGMENTS = ("correct", "partial", "incorrect")

_SCORES = {"correct": Fraction(1), "partial": Fraction(1, 2), "incorrect": Fraction(0)}

# report rows follow the paper's intent order
_INTENT_ORDER = ("search", "compare", "detail", "other")

_FUND_TOKEN = re.compile(r"\b[A-Z][A-Z0-9]+-[A-Za-z0-9]+\b")
_WH_WORDS = ("what", "who", "when", "where", "which", "how")


def classify_intent(question: str, llm=None) -> str:
    """Rule fallback: leading "compare" -> compare; leading "list"/"show all"/
    "which funds" -> search; a wh-question naming a specific fund -> detail;
    anything else -> other. An LLM backend must emit a closed-set value."""
    if not question.strip():
        raise ValueError("question must be non-empty")
    if llm is not None:
        request = ChatRequest(
            system="Classify the question intent as one of: compare, detail, search, other.",
            user=question,
            tag="intent",
        )
        label = parse_structured(complete(request, llm), "intent")
        if label not in INTENTS:
            raise UnknownIntentError(label)
        return label
    lowered = question.strip().lower()
    if lowered.startswith("compare"):
        return "compare"
    if lowered.startswith("list") or lowered.startswith("show all") or lowered.startswith("which funds"):
        return "search"
    if lowered.split()[0] in _WH_WORDS and _FUND_TOKEN.search(question):
        return "detail"
    return "other"


def score_judgment(judgment: str) -> Fraction:
    if judgment not in _SCORES:
        raise ValueError(f"unknown judgment {judgment!r}")
    return _SCORES[judgment]


@dataclass
class EvalRecord:
    question_id: str
    question: str
    intent: str
    pipeline: str
    judgment: str

    def __post_init__(self):
        if self.intent not in INTENTS:
            raise UnknownIntentError(self.intent)
        if self.judgment not in JUDGMENTS:
            raise ValueError(f"unknown judgment {self.judgment!r}")

    @property
    def score(self) -> Fraction:
        return score_judgment(self.judgment)

    def to_json(self) -> str:
        return json.dumps(
            {
                "question_id": self.question_id,
                "question": self.question,
                "intent": self.intent,
                "pipeline": self.pipeline,
                "judgment": self.judgment,
                "score": float(self.score),
            },
            ensure_ascii=False,
        )


@dataclass
class CellCounts:
    correct: int = 0
    partial: int = 0
    incorrect: int = 0

    @property
    def score(self) -> Fraction:
        return Fraction(self.correct) + Fraction(self.partial, 2)

    @property
    def total(self) -> int:
        return self.correct + self.partial + self.incorrect


@dataclass
class ScoreBoard:
    pipelines: list[str] = field(default_factory=list)
    cells: dict[tuple[str, str], CellCounts] = field(default_factory=dict)

    def cell(self, pipeline: str, intent: str) -> CellCounts:
        return self.cells.get((pipeline, intent), CellCounts())

    def intent_score(self, pipeline: str, intent: str) -> Fraction:
        return self.cell(pipeline, intent).score

    def total_score(self, pipeline: str) -> Fraction:
        return sum(
            (self.cell(pipeline, intent).score for intent in INTENTS), Fraction(0)
        )

    def record_count(self, pipeline: str) -> int:
        return sum(self.cell(pipeline, intent).total for intent in INTENTS)


def aggregate(records: list[EvalRecord]) -> ScoreBoard:
    board = ScoreBoard()
    for record in records:
        if record.pipeline not in board.pipelines:
            board.pipelines.append(record.pipeline)
        cell = board.cells.setdefault((record.pipeline, record.intent), CellCounts())
        setattr(cell, record.judgment, getattr(cell, record.judgment) + 1)
    return board


def format_score(score: Fraction) -> str:
    if score.denominator == 1:
        return str(score.numerator)
    return str(float(score))  # halves are exact in binary


def report(board: ScoreBoard, fmt: str = "markdown") -> str:
    if fmt == "json":
        payload = {}
        for pipeline in board.pipelines:
            intents = {}
            for intent in _INTENT_ORDER:
                cell = board.cell(pipeline, intent)
                intents[intent] = {
                    "correct": cell.correct,
                    "partial": cell.partial,
                    "incorrect": cell.incorrect,
                    "score": float(cell.score),
                }
            payload[pipeline] = {
                "total": float(board.total_score(pipeline)),
                "intents": intents,
            }
        return json.dumps(payload, indent=2, sort_keys=True)
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = ["| Method | Score |", "|---|---|"]
    for pipeline in board.pipelines:
        lines.append(f"| {pipeline} | {format_score(board.total_score(pipeline))} |")
    lines.append("")
    lines.append("| Method | Intent | Correct | Partial | Incorrect |")
    lines.append("|---|---|---|---|---|")
    for pipeline in board.pipelines:
        for intent in _INTENT_ORDER:
            cell = board.cell(pipeline, intent)
            lines.append(
                f"| {pipeline} | {intent} | {cell.correct} | {cell.partial} | {cell.incorrect} |"
            )
    return "\n".join(lines)


# --- judging -----------------------------------------------------------------

JUDGE_SYSTEM = (
    "You grade an answer against ground-truth facts. Reply with exactly one "
    "word: correct (every required fact present, nothing forbidden), partial "
    "(some required facts present, nothing forbidden), or incorrect."
)


def build_judge_request(question: str, answer: str, rubric: dict) -> ChatRequest:
    required = "\n".join(f"- {fact}" for fact in rubric.get("required", []))
    forbidden = "\n".join(f"- {fact}" for fact in rubric.get("forbidden", []))
    user = (
        f"Question: {question}\n\nRequired facts:\n{required or '- (none)'}\n\n"
        f"Forbidden facts:\n{forbidden or '- (none)'}\n\nAnswer:\n{answer}\n\nJudgment:"
    )
    return ChatRequest(system=JUDGE_SYSTEM, user=user, tag="judge")


def judge(question: str, answer: str, rubric: dict, llm) -> str:
    """LLM-as-judge with the fixed rubric template; returns a closed-set token."""
    response = complete(build_judge_request(question, answer, rubric), llm)
    try:
        return parse_structured(response, "judgment")
    except Exception as exc:
        raise UnparseableJudgmentError(response) from exc


@dataclass
class Question:
    question_id: str
    question: str
    intent: str | None = None
    rubric: dict = field(default_factory=dict)


def load_questions(path: str | Path) -> list[Question]:
    """JSON lines: {question_id, question, intent?, rubric}."""
    questions = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        row = json.loads(line)
        questions.append(
            Question(
                question_id=row["question_id"],
                question=row["question"],
                intent=row.get("intent"),
                rubric=row.get("rubric", {}),
            )
        )
    return questions


def save_records(records: list[EvalRecord], path: str | Path) -> None:
    Path(path).write_text(
        "".join(r.to_json() + "\n" for r in records), encoding="utf-8"
    )


def run_suite(questions: list[Question], pipelines: dict, llm,
              overrides: dict[str, str] | None = None) -> tuple[list[EvalRecord], dict]:
    """Run every pipeline on every question, judge each answer, and collect
    records plus the raw pipeline outputs. A human-override map
    (question_id -> judgment) takes precedence over the LLM judge."""
    overrides = overrides or {}
    records: list[EvalRecord] = []
    outputs: dict[tuple[str, str], object] = {}
    for name, pipeline in pipelines.items():
        for q in questions:
            intent = q.intent or classify_intent(q.question)
            result = pipeline.run(q.question)
            outputs[(name, q.question_id)] = result
            verdict = overrides.get(q.question_id) or judge(
                q.question, result.answer, q.rubric, llm
            )
            records.append(EvalRecord(q.question_id, q.question, intent, name, verdict))
    return records, outputs
