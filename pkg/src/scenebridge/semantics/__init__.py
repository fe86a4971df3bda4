"""Semantic reporting: link scene objects to ontology concepts and manage labels."""
from .client import ClientUnavailable, FixtureClient, HttpClient, link_via_text_to_triples, query_slug
from .lexicon import Lexicon, link_via_lexicon, load_lexicon, parse_lexicon
from .naming import name_tokens, preprocess_name
from .reporting import (
    TAGGABLE,
    TAGGED,
    UNTAGGABLE,
    add_label,
    annotate_stage,
    attach_reports,
    body_prims,
    generate_reports,
    remove_label,
    tag_state,
)
from .reports import (
    Candidate,
    ChosenLabel,
    SemanticReport,
    iri_to_link,
    link_to_iri,
    report_from_json,
    report_to_json,
)

__all__ = [
    "Candidate",
    "ChosenLabel",
    "ClientUnavailable",
    "FixtureClient",
    "HttpClient",
    "Lexicon",
    "SemanticReport",
    "TAGGABLE",
    "TAGGED",
    "UNTAGGABLE",
    "add_label",
    "annotate_stage",
    "attach_reports",
    "body_prims",
    "generate_reports",
    "iri_to_link",
    "link_to_iri",
    "link_via_lexicon",
    "link_via_text_to_triples",
    "load_lexicon",
    "name_tokens",
    "parse_lexicon",
    "preprocess_name",
    "query_slug",
    "remove_label",
    "report_from_json",
    "report_to_json",
    "tag_state",
]
