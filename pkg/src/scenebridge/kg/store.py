"""Scene knowledge graph: construction from a tagged stage, N-Triples export.

The graph keeps the ontology and the scene-level assertions (instance labels,
part edges, containment edges) as native relations. Triples are a derived,
deterministic view used for export and counting; ternary useMatch axioms are
reified through blank nodes only at that boundary.
"""
from dataclasses import dataclass

from ..errors import SceneBridgeError
from ..semantics.reporting import LABELS_ATTR, body_prims
from .ontology import OntologyFixture
from .vocab import RDF_TYPE, RDFS_CLASS, RDFS_SUBCLASS_OF, compact_iri, expand_iri

USE_MATCH_CLASS = "kg:UseMatch"


@dataclass(frozen=True, order=True)
class Triple:
    subject: str
    predicate: str
    obj: str
    literal: bool = False


def mint_instance_iri(prim_path: str) -> str:
    """Scene prims become instances named by their path, slashes flattened."""
    return "scene:" + prim_path.strip("/").replace("/", "_")


class KnowledgeGraph:
    """Immutable store pairing an ontology with scene assertions.

    asserted maps instance IRIs to the class IRIs tagged on the prim;
    part_edges and containment_edges are (outer, inner) instance pairs.
    """

    def __init__(self, ontology: OntologyFixture, asserted, part_edges=(), containment_edges=()):
        self.ontology = ontology
        self.asserted = {
            inst: tuple(classes) for inst, classes in sorted(asserted.items())
        }
        self.part_edges = frozenset(part_edges)
        self.containment_edges = frozenset(containment_edges)
        self._closure: dict[str, frozenset] = {}
        self._instance_ups: dict[str, frozenset] = {}

    def instances(self) -> tuple:
        return tuple(self.asserted)

    def all_classes(self) -> tuple:
        found = set(self.ontology.classes)
        for classes in self.asserted.values():
            found.update(classes)
        return tuple(sorted(found))

    def superclasses(self, iri: str) -> frozenset:
        """Reflexive-transitive superclass set; unknown classes map to themselves."""
        cached = self._closure.get(iri)
        if cached is not None:
            return cached
        seen = {iri}
        stack = [iri]
        while stack:
            for sup in self.ontology.subclass_of.get(stack.pop(), ()):
                if sup not in seen:
                    seen.add(sup)
                    stack.append(sup)
        result = frozenset(seen)
        self._closure[iri] = result
        return result

    def instance_superclasses(self, inst: str) -> frozenset:
        cached = self._instance_ups.get(inst)
        if cached is not None:
            return cached
        merged = set()
        for c in self.asserted.get(inst, ()):
            merged.update(self.superclasses(c))
        result = frozenset(merged)
        self._instance_ups[inst] = result
        return result

    def triples(self) -> tuple:
        """Deterministic triple view of everything the graph asserts."""
        ont = self.ontology
        out = []
        for c in sorted(ont.classes):
            out.append(Triple(c, RDF_TYPE, RDFS_CLASS))
        for sub in sorted(ont.subclass_of):
            for sup in sorted(ont.subclass_of[sub]):
                out.append(Triple(sub, RDFS_SUBCLASS_OF, sup))
        for whole in sorted(ont.has_part_type):
            for part in sorted(ont.has_part_type[whole]):
                out.append(Triple(whole, "kg:hasPartType", part))
        for c in sorted(ont.dispositions):
            for term in sorted(ont.dispositions[c]):
                out.append(Triple(c, "kg:hasDisposition", term, literal=True))
        for c in sorted(ont.designed_to_contain):
            for content in sorted(ont.designed_to_contain[c]):
                out.append(Triple(c, "kg:designedToContain", content))
        for c in sorted(ont.default_location):
            for loc in sorted(ont.default_location[c]):
                out.append(Triple(c, "kg:defaultLocation", loc))
        for index, (task, instrument, patient) in enumerate(ont.use_matches):
            node = f"_:um{index}"
            out.append(Triple(node, RDF_TYPE, USE_MATCH_CLASS))
            out.append(Triple(node, "kg:task", task, literal=True))
            out.append(Triple(node, "kg:instrument", instrument))
            out.append(Triple(node, "kg:patient", patient))
        for inst, classes in self.asserted.items():
            for c in classes:
                out.append(Triple(inst, RDF_TYPE, c))
        for outer, inner in sorted(self.part_edges):
            out.append(Triple(outer, "kg:hasPart", inner))
        for outer, inner in sorted(self.containment_edges):
            out.append(Triple(outer, "kg:contains", inner))
        return tuple(out)


def build_kg(stage, ontology: OntologyFixture, diagnostics=None) -> KnowledgeGraph:
    """Compile the semantic labels of a tagged stage into a knowledge graph.

    Every label becomes an instanceOf assertion (undeclared classes are kept
    but flagged). Nesting between tagged body prims becomes hasPart; it also
    becomes contains when some class of the outer prim is designed to contain
    a class of the inner one.
    """
    tagged = {}
    for prim in body_prims(stage):
        labels = prim.get(LABELS_ATTR)
        if labels:
            tagged[prim.path] = tuple(labels)

    asserted = {}
    for path, labels in tagged.items():
        iri = mint_instance_iri(path)
        if iri in asserted:
            raise SceneBridgeError(
                f"prim paths {path!r} and another tagged prim flatten to the "
                f"same instance IRI {iri!r}"
            )
        asserted[iri] = labels
        if diagnostics is not None:
            for label in labels:
                if label not in ontology.classes:
                    diagnostics.warning(
                        "kg-undeclared-class",
                        f"label {label!r} on {path} is not declared in the ontology",
                        prim=path,
                    )

    graph = KnowledgeGraph(ontology, asserted)
    part_edges = set()
    containment_edges = set()
    for prim in stage.walk():
        if prim.path not in tagged:
            continue
        outer = mint_instance_iri(prim.path)
        contents = set()
        for c in graph.instance_superclasses(outer):
            contents.update(ontology.designed_to_contain.get(c, ()))
        for child in prim.children:
            if child.path not in tagged:
                continue
            inner = mint_instance_iri(child.path)
            part_edges.add((outer, inner))
            inner_ups = set()
            for c in tagged[child.path]:
                inner_ups.update(graph.superclasses(c))
            if contents & inner_ups:
                containment_edges.add((outer, inner))
    return KnowledgeGraph(ontology, asserted, part_edges, containment_edges)


_EDGE_PREDICATES = {"kg:hasPart", "kg:contains"}
_AXIOM_PREDICATES = {
    "kg:hasPartType": "has_part_type",
    "kg:hasDisposition": "dispositions",
    "kg:designedToContain": "designed_to_contain",
    "kg:defaultLocation": "default_location",
}
_REIFICATION_PREDICATES = {"kg:task", "kg:instrument", "kg:patient"}


def kg_from_triples(triples) -> KnowledgeGraph:
    """Rebuild a graph from its exported triple view (inverse of triples()).

    The reconstruction is faithful up to label order on an instance: the
    triple view is sorted, so re-exporting the result is byte-identical and
    queries answer the same.
    """
    fixture = OntologyFixture(origin="<triples>")
    reified: dict[str, dict] = {}
    asserted: dict[str, list] = {}
    part_edges = set()
    containment_edges = set()

    for t in triples:
        if t.subject.startswith("_:"):
            slot = reified.setdefault(t.subject, {})
            if t.predicate == RDF_TYPE and t.obj == USE_MATCH_CLASS:
                slot["typed"] = True
            elif t.predicate in _REIFICATION_PREDICATES:
                slot[t.predicate[3:]] = t.obj
            else:
                raise SceneBridgeError(
                    f"unexpected predicate {t.predicate!r} on blank node {t.subject!r}"
                )
            continue
        if t.predicate == RDF_TYPE:
            if t.obj == RDFS_CLASS:
                fixture.classes.add(t.subject)
            else:
                asserted.setdefault(t.subject, []).append(t.obj)
        elif t.predicate == RDFS_SUBCLASS_OF:
            fixture.subclass_of.setdefault(t.subject, set()).add(t.obj)
        elif t.predicate in _AXIOM_PREDICATES:
            table = getattr(fixture, _AXIOM_PREDICATES[t.predicate])
            table.setdefault(t.subject, set()).add(t.obj)
        elif t.predicate in _EDGE_PREDICATES:
            edge = (t.subject, t.obj)
            (part_edges if t.predicate == "kg:hasPart" else containment_edges).add(edge)
        else:
            raise SceneBridgeError(f"unknown graph predicate {t.predicate!r}")

    def node_order(label):
        suffix = label[4:] if label.startswith("_:um") else ""
        return (0, int(suffix)) if suffix.isdigit() else (1, label)

    for label in sorted(reified, key=node_order):
        slot = reified[label]
        missing = {"typed", "task", "instrument", "patient"} - set(slot)
        if missing:
            raise SceneBridgeError(
                f"incomplete ternary axiom at {label!r}: missing {sorted(missing)}"
            )
        fixture.use_matches.append((slot["task"], slot["instrument"], slot["patient"]))

    return KnowledgeGraph(
        fixture,
        {inst: tuple(sorted(labels)) for inst, labels in asserted.items()},
        part_edges,
        containment_edges,
    )


def _escape_literal(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return "".join(out)


def _unescape_literal(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        code = value[i + 1]
        out.append({"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}[code])
        i += 2
    return "".join(out)


def _term(value: str, literal: bool) -> str:
    if literal:
        return '"' + _escape_literal(value) + '"'
    if value.startswith("_:"):
        return value
    return "<" + expand_iri(value) + ">"


def export_triples(kg: KnowledgeGraph) -> str:
    """Serialize to N-Triples, one sorted line per triple."""
    lines = sorted(
        f"{_term(t.subject, False)} {_term(t.predicate, False)} "
        f"{_term(t.obj, t.literal)} ."
        for t in kg.triples()
    )
    return "\n".join(lines) + "\n" if lines else ""


def parse_ntriples(text: str) -> list:
    """Read an N-Triples document back into compact Triple records."""
    triples = []
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.endswith("."):
            raise SceneBridgeError(f"line {number}: triple does not end with '.'")
        rest = line[:-1].strip()
        terms = []
        while rest:
            if rest.startswith("<"):
                end = rest.find(">")
                if end < 0:
                    raise SceneBridgeError(f"line {number}: unterminated IRI")
                terms.append((compact_iri(rest[1:end]), False))
                rest = rest[end + 1 :].lstrip()
            elif rest.startswith("_:"):
                split = rest.find(" ")
                split = len(rest) if split < 0 else split
                terms.append((rest[:split], False))
                rest = rest[split:].lstrip()
            elif rest.startswith('"'):
                i = 1
                while i < len(rest):
                    if rest[i] == "\\":
                        i += 2
                        continue
                    if rest[i] == '"':
                        break
                    i += 1
                if i >= len(rest):
                    raise SceneBridgeError(f"line {number}: unterminated literal")
                terms.append((_unescape_literal(rest[1:i]), True))
                rest = rest[i + 1 :].lstrip()
            else:
                raise SceneBridgeError(f"line {number}: unrecognized term at {rest!r}")
        if len(terms) != 3 or terms[0][1] or terms[1][1]:
            raise SceneBridgeError(f"line {number}: expected subject predicate object")
        if terms[1][0].startswith("_:"):
            raise SceneBridgeError(f"line {number}: predicate cannot be a blank node")
        triples.append(
            Triple(terms[0][0], terms[1][0], terms[2][0], literal=terms[2][1])
        )
    return triples
