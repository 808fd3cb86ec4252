"""Graph RAG over nested fund JSON.

Three interchangeable retrieval pipelines over one corpus: RDF triples with
pattern selection/traversal, a labeled property graph queried through a
Cypher subset generated from natural language, and a fixed-K embedding
baseline; plus the accuracy/completeness evaluation harness that compares
them.
"""

__version__ = "0.1.0"
