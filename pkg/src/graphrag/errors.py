"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class GraphRagError(Exception):
    """Base class for all engine errors."""


# --- corpus ---------------------------------------------------------------

class MalformedJsonError(GraphRagError):
    def __init__(self, path: str, detail: str = ""):
        self.path = path
        super().__init__(f"malformed JSON in {path}: {detail}".rstrip(": "))


class MissingSubjectKeyError(GraphRagError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"document {path} lacks a string 'abbreviatedName'")


class DuplicateDocIdError(GraphRagError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate document id {doc_id!r}")


# --- rdf store ------------------------------------------------------------

class DiscriminatorMissingError(GraphRagError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"object array element at {path!r} has no discriminator key")


class CorruptStoreFileError(GraphRagError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"corrupt store file at line {line_no}: {detail}".rstrip(": "))


# --- cypher ---------------------------------------------------------------

class CypherSyntaxError(GraphRagError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"syntax error at position {position}: expected {expected}")


class UnboundVariableError(GraphRagError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not bound in MATCH")


class UnsupportedFeatureError(GraphRagError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unsupported Cypher feature: {token}")


class TypeMismatchError(GraphRagError):
    def __init__(self, comparison: str):
        self.comparison = comparison
        super().__init__(f"type mismatch in comparison: {comparison}")


# --- vector / providers ---------------------------------------------------

class ProviderUnavailableError(GraphRagError):
    pass


class DimensionMismatchError(GraphRagError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected}-d embedding, got {got}-d")


# --- predicate nlp --------------------------------------------------------

class UnknownCategoryError(GraphRagError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"classifier emitted out-of-set category {label!r}")


class KTooLargeError(GraphRagError):
    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n
        super().__init__(f"k={k} exceeds {n} distinct predicates")


# --- llm gateway ----------------------------------------------------------

class ScriptMissError(GraphRagError):
    def __init__(self, tag: str, digest: str):
        self.tag = tag
        self.digest = digest
        super().__init__(f"no scripted response for tag {tag!r} digest {digest}")


class ResponseTooLongError(GraphRagError):
    pass


class MalformedStructuredOutputError(GraphRagError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"malformed structured output: {reason}")


# --- pipelines ------------------------------------------------------------

class EmptyContextError(GraphRagError):
    def __init__(self, detail: str = "retrieval produced no evidence"):
        super().__init__(detail)


class TranslationFailedError(GraphRagError):
    def __init__(self, history):
        self.history = list(history)
        super().__init__(
            f"text-to-cypher failed after {len(self.history)} attempt(s)"
        )


# --- evaluation -----------------------------------------------------------

class UnknownIntentError(GraphRagError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"backend emitted unknown intent {label!r}")


class UnparseableJudgmentError(GraphRagError):
    def __init__(self, response: str):
        self.response = response
        super().__init__("judge response contains no judgment token")
