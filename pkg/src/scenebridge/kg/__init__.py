"""Knowledge-graph compilation and querying for tagged scenes.

Labels attached by the semantics layer become instance assertions over a
class ontology; nesting becomes part/containment edges; the result answers
conjunctive queries and exports as N-Triples.
"""
from .cq import COMPETENCY_QUESTIONS, load_cq_pattern, run_cq
from .ontology import OntologyFixture, load_ontology, parse_ontology
from .query import (
    Atom,
    Const,
    PREDICATE_ARITY,
    QueryPattern,
    Var,
    evaluate,
    parse_query,
)
from .store import (
    KnowledgeGraph,
    Triple,
    build_kg,
    export_triples,
    kg_from_triples,
    mint_instance_iri,
    parse_ntriples,
)
from .vocab import PREFIXES, compact_iri, expand_iri

__all__ = [
    "COMPETENCY_QUESTIONS",
    "load_cq_pattern",
    "run_cq",
    "OntologyFixture",
    "load_ontology",
    "parse_ontology",
    "Atom",
    "Const",
    "PREDICATE_ARITY",
    "QueryPattern",
    "Var",
    "evaluate",
    "parse_query",
    "KnowledgeGraph",
    "Triple",
    "build_kg",
    "export_triples",
    "kg_from_triples",
    "mint_instance_iri",
    "parse_ntriples",
    "PREFIXES",
    "compact_iri",
    "expand_iri",
]
