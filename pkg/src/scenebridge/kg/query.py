"""Conjunctive query patterns over the scene knowledge graph.

A pattern names its answer variables, then one conjunction of atoms, then any
number of alternative conjunctions introduced by or(...):

    ?X : instanceOf(?X, 'dfl:breakfast_food'),
    or (hasPartType(?X, ?C),
        subclassOf(?C, 'dfl:breakfast_food'))

The result is the union over the blocks, projected onto the answer variables,
deduplicated, and sorted. Quoted constants with a known IRI prefix are concept
references; anything else quoted is a plain string (disposition terms, task
verbs). Evaluation works top-down atom by atom, so nothing is materialized
beyond the subclass closure cache on the graph.
"""
import re
from dataclasses import dataclass

from ..errors import QueryError


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: str


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple


@dataclass(frozen=True)
class QueryPattern:
    head: tuple  # variable names to project
    blocks: tuple  # alternatives; each a tuple of Atoms


PREDICATE_ARITY = {
    "instanceOf": 2,
    "subclassOf": 2,
    "hasPart": 2,
    "contains": 2,
    "hasPartType": 2,
    "hasDisposition": 2,
    "designedToContain": 2,
    "defaultLocation": 2,
    "useMatch": 3,
}

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r\n]+|\#[^\n]*)
      | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<const>'[^'\n]*')
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[(),:])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, origin: str):
    tokens = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise QueryError(
                f"{origin}:{line}:{col}: unexpected character {text[pos]!r}"
            )
        kind = match.lastgroup
        value = match.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens, origin):
        self.tokens = tokens
        self.origin = origin
        self.index = 0

    def error(self, message):
        if self.index < len(self.tokens):
            _, value, line, col = self.tokens[self.index]
            raise QueryError(f"{self.origin}:{line}:{col}: {message} (at {value!r})")
        raise QueryError(f"{self.origin}: {message} (at end of pattern)")

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return (None, None, 0, 0)

    def take(self, kind, value=None):
        actual = self.peek()
        if actual[0] != kind or (value is not None and actual[1] != value):
            self.error(f"expected {value or kind}")
        self.index += 1
        return actual

    def parse(self) -> QueryPattern:
        head = []
        while self.peek()[0] == "var":
            head.append(self.take("var")[1][1:])
        if not head:
            self.error("pattern must start with at least one answer variable")
        self.take("punct", ":")
        blocks = [self.conjunction()]
        while self.index < len(self.tokens):
            if self.peek() == (None, None, 0, 0):
                break
            if self.peek()[0] == "punct" and self.peek()[1] == ",":
                self.index += 1
            self.take("name", "or")
            self.take("punct", "(")
            blocks.append(self.conjunction())
            self.take("punct", ")")
        pattern = QueryPattern(tuple(head), tuple(blocks))
        self.validate(pattern)
        return pattern

    def conjunction(self):
        atoms = [self.atom()]
        while True:
            kind, value, _, _ = self.peek()
            if kind == "punct" and value == ",":
                nxt = self.tokens[self.index + 1] if self.index + 1 < len(self.tokens) else (None,) * 4
                if nxt[0] == "name" and nxt[1] == "or":
                    return tuple(atoms)  # comma belongs to the or-block list
                self.index += 1
                atoms.append(self.atom())
                continue
            return tuple(atoms)

    def atom(self) -> Atom:
        kind, name, line, col = self.peek()
        if kind != "name" or name == "or":
            self.error("expected a predicate name")
        arity = PREDICATE_ARITY.get(name)
        if arity is None:
            raise QueryError(
                f"{self.origin}:{line}:{col}: unknown predicate {name!r}"
            )
        self.index += 1
        self.take("punct", "(")
        args = [self.term()]
        while self.peek()[0] == "punct" and self.peek()[1] == ",":
            self.index += 1
            args.append(self.term())
        self.take("punct", ")")
        if len(args) != arity:
            raise QueryError(
                f"{self.origin}:{line}:{col}: {name} takes {arity} arguments, "
                f"got {len(args)}"
            )
        return Atom(name, tuple(args))

    def term(self):
        kind, value, _, _ = self.peek()
        if kind == "var":
            self.index += 1
            return Var(value[1:])
        if kind == "const":
            self.index += 1
            return Const(value[1:-1])
        self.error("expected a variable or quoted constant")

    def validate(self, pattern: QueryPattern):
        for number, block in enumerate(pattern.blocks, start=1):
            bound = set()
            for atom in block:
                for term in atom.args:
                    if isinstance(term, Var):
                        bound.add(term.name)
            for name in pattern.head:
                if name not in bound:
                    raise QueryError(
                        f"{self.origin}: answer variable ?{name} is unbound in "
                        f"alternative {number}"
                    )


def parse_query(text: str, origin: str = "<query>") -> QueryPattern:
    tokens = _tokenize(text, origin)
    if not tokens:
        raise QueryError(f"{origin}: empty pattern")
    return _Parser(tokens, origin).parse()


# Each generator yields full argument-value tuples for one atom given the
# already-resolved hints (None meaning free); unification happens outside.


def _gen_instance_of(kg, x, c):
    for inst in [x] if x is not None else kg.instances():
        ups = kg.instance_superclasses(inst)
        if not ups:
            continue
        if c is not None:
            if c in ups:
                yield (inst, c)
        else:
            for sup in sorted(ups):
                yield (inst, sup)


def _gen_subclass_of(kg, c, d):
    known = kg.all_classes()
    if c is not None and c not in known:
        return  # reflexive pairs exist only for classes the graph knows about
    for sub in [c] if c is not None else known:
        ups = kg.superclasses(sub)
        if d is not None:
            if d in ups:
                yield (sub, d)
        else:
            for sup in sorted(ups):
                yield (sub, sup)


def _gen_edges(edges):
    def gen(kg, x, y):
        for outer, inner in sorted(edges(kg)):
            if x is not None and outer != x:
                continue
            if y is not None and inner != y:
                continue
            yield (outer, inner)

    return gen


def _axiom_objects(kg, inst, table):
    merged = set()
    for c in kg.instance_superclasses(inst):
        merged.update(table.get(c, ()))
    return merged


def _gen_inherited(table_of):
    def gen(kg, x, value):
        table = table_of(kg.ontology)
        for inst in [x] if x is not None else kg.instances():
            found = _axiom_objects(kg, inst, table)
            if value is not None:
                if value in found:
                    yield (inst, value)
            else:
                for item in sorted(found):
                    yield (inst, item)

    return gen


def _gen_default_location(kg, c, loc):
    for sub in [c] if c is not None else kg.all_classes():
        found = set()
        for sup in kg.superclasses(sub):
            found.update(kg.ontology.default_location.get(sup, ()))
        if loc is not None:
            if loc in found:
                yield (sub, loc)
        else:
            for item in sorted(found):
                yield (sub, item)


def _gen_use_match(kg, task, x, z):
    for fact_task, instrument, patient in kg.ontology.use_matches:
        if task is not None and fact_task != task:
            continue
        xs = [x] if x is not None else kg.instances()
        for xi in xs:
            if instrument not in kg.instance_superclasses(xi):
                continue
            zs = [z] if z is not None else kg.instances()
            for zi in zs:
                if patient in kg.instance_superclasses(zi):
                    yield (fact_task, xi, zi)


_GENERATORS = {
    "instanceOf": _gen_instance_of,
    "subclassOf": _gen_subclass_of,
    "hasPart": _gen_edges(lambda kg: kg.part_edges),
    "contains": _gen_edges(lambda kg: kg.containment_edges),
    "hasPartType": _gen_inherited(lambda ont: ont.has_part_type),
    "hasDisposition": _gen_inherited(lambda ont: ont.dispositions),
    "designedToContain": _gen_inherited(lambda ont: ont.designed_to_contain),
    "defaultLocation": _gen_default_location,
    "useMatch": _gen_use_match,
}


def _match(kg, atom: Atom, binding: dict):
    hints = [
        binding.get(t.name) if isinstance(t, Var) else t.value for t in atom.args
    ]
    for values in _GENERATORS[atom.predicate](kg, *hints):
        extended = dict(binding)
        ok = True
        for term, value in zip(atom.args, values):
            if isinstance(term, Var):
                current = extended.get(term.name)
                if current is None:
                    extended[term.name] = value
                elif current != value:
                    ok = False
                    break
            elif term.value != value:
                ok = False
                break
        if ok:
            yield extended


def evaluate(pattern: QueryPattern, kg) -> list:
    """Answer a pattern; returns sorted, deduplicated head bindings."""
    rows = set()
    for block in pattern.blocks:
        bindings = [{}]
        for atom in block:
            bindings = [ext for b in bindings for ext in _match(kg, atom, b)]
            if not bindings:
                break
        for binding in bindings:
            rows.add(tuple(binding[name] for name in pattern.head))
    return [dict(zip(pattern.head, row)) for row in sorted(rows)]
