"""Word-list concept matching.

The lexicon is the offline fallback linker: a curated phrase table mapping
household words to ontology concepts.  Matching is longest-phrase-first over
the name tokens, so "milk box" beats "box" when both are known.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import SceneBridgeError
from .naming import phrase_core_tokens
from .reports import Candidate, iri_to_link


@dataclass
class Lexicon:
    """phrase -> [(concept IRI, weight)], plus optional concept definitions."""

    entries: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    definitions: dict[str, str] = field(default_factory=dict)

    def add(self, phrase: str, iri: str, weight: float, definition: str = ""):
        phrase = " ".join(phrase.lower().split())
        if not phrase:
            raise SceneBridgeError("empty lexicon phrase")
        if not 0.0 < weight <= 1.0:
            raise SceneBridgeError(
                f"lexicon weight for {phrase!r} must be in (0, 1], got {weight}"
            )
        iri_to_link(iri)  # validates the prefix
        self.entries.setdefault(phrase, []).append((iri, weight))
        if definition:
            self.definitions[iri] = definition

    def __len__(self):
        return len(self.entries)


def parse_lexicon(text: str, origin: str = "<lexicon>") -> Lexicon:
    """Parse TSV lines ``phrase<TAB>concept_iri<TAB>weight[<TAB>definition]``."""
    lexicon = Lexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise SceneBridgeError(f"{origin}:{lineno}: expected at least 3 columns")
        phrase, iri, weight_text = parts[0], parts[1], parts[2]
        definition = parts[3] if len(parts) > 3 else ""
        try:
            weight = float(weight_text)
        except ValueError as exc:
            raise SceneBridgeError(f"{origin}:{lineno}: bad weight {weight_text!r}") from exc
        try:
            lexicon.add(phrase, iri, weight, definition)
        except SceneBridgeError as exc:
            raise SceneBridgeError(f"{origin}:{lineno}: {exc}") from exc
    return lexicon


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Load a lexicon file; with no path, the one shipped in the package."""
    if path is None:
        text = (
            resources.files("scenebridge.semantics").joinpath("data").joinpath("lexicon.tsv").read_text("utf-8")
        )
        return parse_lexicon(text, "lexicon.tsv")
    path = Path(path)
    return parse_lexicon(path.read_text("utf-8"), str(path))


def link_via_lexicon(phrase: str, lexicon: Lexicon) -> list[Candidate]:
    """Match a query phrase against the lexicon.

    Every contiguous token span is looked up; each concept keeps its best
    match.  Candidates are ordered by match length then weight (descending),
    ties broken by IRI so the order is reproducible.
    """
    tokens = phrase_core_tokens(phrase)
    total = len(tokens)
    if total == 0:
        return []
    best: dict[str, tuple[int, float]] = {}
    for start in range(total):
        for stop in range(start + 1, total + 1):
            span = " ".join(tokens[start:stop])
            for iri, weight in lexicon.entries.get(span, ()):
                length = stop - start
                prev = best.get(iri)
                if prev is None or (length, weight) > prev:
                    best[iri] = (length, weight)
    ranked = sorted(best.items(), key=lambda kv: (-kv[1][0], -kv[1][1], kv[0]))
    out = []
    for iri, (length, weight) in ranked:
        definition = lexicon.definitions.get(iri)
        out.append(
            Candidate(
                links=(iri_to_link(iri),),
                score=weight * (length / total),
                evidence="lexicon",
                enrichment={"definition": definition} if definition else None,
            )
        )
    return out
