"""Parser for the line-oriented ontology fixture format.

A fixture declares the class vocabulary and the class-level axioms that the
query engine interprets. One statement per line, terminated by " .":

    class dfl:food.n .
    dfl:breakfast_food subclassOf dfl:food.n .
    dfl:milk_box.n hasPartType dfl:milk.n .
    dfl:handle.n hasDisposition "grasp.Theme" .
    dfl:fridge.n designedToContain dfl:perishable_food .
    dfl:spoon.n defaultLocation dfl:drawer.n .
    useMatch "eat" dfl:bowl.n dfl:breakfast_food .

Comments run from "#" to end of line. Every class named by an axiom must be
declared, and subclassOf must stay acyclic.
"""
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import OntologyError
from .vocab import expand_iri


@dataclass
class OntologyFixture:
    """Class vocabulary plus axioms, exactly as asserted (no closure)."""

    origin: str = "<ontology>"
    classes: set = field(default_factory=set)
    subclass_of: dict = field(default_factory=dict)  # class -> set of direct supers
    has_part_type: dict = field(default_factory=dict)  # whole class -> part classes
    dispositions: dict = field(default_factory=dict)  # class -> disposition terms
    designed_to_contain: dict = field(default_factory=dict)  # class -> content classes
    default_location: dict = field(default_factory=dict)  # class -> location classes
    use_matches: list = field(default_factory=list)  # (task, instrument, patient)


def _tokenize(line: str, where: str):
    """Split one statement into tokens; quoted strings stay single tokens."""
    tokens = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == '"':
            end = line.find('"', i + 1)
            if end < 0:
                raise OntologyError(f"{where}: unterminated string")
            tokens.append(line[i : end + 1])
            i = end + 1
            continue
        j = i
        while j < len(line) and line[j] not in ' \t"':
            j += 1
        tokens.append(line[i:j])
        i = j
    return tokens


def _class_token(token: str, where: str) -> str:
    if token.startswith('"'):
        raise OntologyError(f"{where}: expected a class IRI, got string {token}")
    try:
        expand_iri(token)
    except Exception:
        raise OntologyError(f"{where}: {token!r} is not a prefixed IRI") from None
    return token


def _string_token(token: str, where: str) -> str:
    if not (token.startswith('"') and token.endswith('"') and len(token) >= 2):
        raise OntologyError(f"{where}: expected a quoted string, got {token!r}")
    return token[1:-1]


def parse_ontology(text: str, origin: str = "<ontology>") -> OntologyFixture:
    fixture = OntologyFixture(origin=origin)
    statements = []
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{origin}:{number}"
        if not line.endswith("."):
            raise OntologyError(f"{where}: statement does not end with '.'")
        tokens = _tokenize(line[:-1], where)
        if not tokens:
            raise OntologyError(f"{where}: empty statement")
        statements.append((where, tokens))

    # Declarations first so axiom order never matters.
    for where, tokens in statements:
        if tokens[0] == "class":
            if len(tokens) != 2:
                raise OntologyError(f"{where}: class declaration takes one IRI")
            fixture.classes.add(_class_token(tokens[1], where))

    def known(token, where):
        iri = _class_token(token, where)
        if iri not in fixture.classes:
            raise OntologyError(f"{where}: class {iri!r} is not declared")
        return iri

    for where, tokens in statements:
        head = tokens[0]
        if head == "class":
            continue
        if head == "useMatch":
            if len(tokens) != 4:
                raise OntologyError(f"{where}: useMatch takes a task and two classes")
            task = _string_token(tokens[1], where)
            fixture.use_matches.append(
                (task, known(tokens[2], where), known(tokens[3], where))
            )
            continue
        if len(tokens) != 3:
            raise OntologyError(f"{where}: expected 'subject predicate object .'")
        subject = known(head, where)
        predicate, obj = tokens[1], tokens[2]
        if predicate == "subclassOf":
            fixture.subclass_of.setdefault(subject, set()).add(known(obj, where))
        elif predicate == "hasPartType":
            fixture.has_part_type.setdefault(subject, set()).add(known(obj, where))
        elif predicate == "hasDisposition":
            fixture.dispositions.setdefault(subject, set()).add(
                _string_token(obj, where)
            )
        elif predicate == "designedToContain":
            fixture.designed_to_contain.setdefault(subject, set()).add(
                known(obj, where)
            )
        elif predicate == "defaultLocation":
            fixture.default_location.setdefault(subject, set()).add(known(obj, where))
        else:
            raise OntologyError(f"{where}: unknown predicate {predicate!r}")

    _check_acyclic(fixture)
    return fixture


def _check_acyclic(fixture: OntologyFixture):
    done = set()
    for start in sorted(fixture.subclass_of):
        stack = [(start, iter(fixture.subclass_of.get(start, ())))]
        on_path = {start}
        while stack:
            node, supers = stack[-1]
            advanced = False
            for sup in supers:
                if sup in on_path:
                    raise OntologyError(
                        f"{fixture.origin}: subclassOf cycle through {sup!r}"
                    )
                if sup in done:
                    continue
                stack.append((sup, iter(fixture.subclass_of.get(sup, ()))))
                on_path.add(sup)
                advanced = True
                break
            if not advanced:
                stack.pop()
                on_path.discard(node)
                done.add(node)


def load_ontology(path) -> OntologyFixture:
    path = Path(path)
    return parse_ontology(path.read_text("utf-8"), origin=str(path))
