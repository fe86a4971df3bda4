"""IRI vocabulary shared by the graph store, serializer, and query engine.

Graph members are kept in compact prefixed form ("scene:World_Table_1",
"dfl:fridge.n") and expanded to absolute IRIs only at the N-Triples boundary.
"""
from ..errors import SceneBridgeError

PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "kg": "urn:scenebridge:kg:",
    "scene": "urn:scenebridge:scene:",
    # Concept repositories. The dfl fixture namespace is ours; it mirrors the
    # naming style of lexical ontologies but makes no claim to be one.
    "dfl": "urn:scenebridge:dfl:",
    "cskg": "urn:scenebridge:cskg:",
    "dbpedia": "http://dbpedia.org/resource/",
    "wikidata": "http://www.wikidata.org/entity/",
    "conceptnet": "http://api.conceptnet.io",
}

RDF_TYPE = "rdf:type"
RDFS_CLASS = "rdfs:Class"
RDFS_SUBCLASS_OF = "rdfs:subClassOf"

# Longest base first so compaction is unambiguous.
_BASES = sorted(PREFIXES.items(), key=lambda kv: -len(kv[1]))


def expand_iri(compact: str) -> str:
    """Turn a prefixed name into an absolute IRI; absolute IRIs pass through."""
    label, sep, rest = compact.partition(":")
    if sep and label in PREFIXES:
        return PREFIXES[label] + rest
    if compact.startswith(("http://", "https://", "urn:")):
        return compact
    raise SceneBridgeError(f"cannot expand IRI {compact!r}: unknown prefix")


def compact_iri(absolute: str) -> str:
    """Inverse of expand_iri for known bases; unknown IRIs pass through."""
    for label, base in _BASES:
        if absolute.startswith(base):
            return label + ":" + absolute[len(base):]
    return absolute
