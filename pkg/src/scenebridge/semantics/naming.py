"""Prim-name preprocessing for concept lookup.

Scene names arrive as identifiers ("CoffeeTable_3", "milk_box", "Fridge_0_0")
and must become natural query phrases before any linker sees them.  The phrase
template wraps the cleaned name in minimal sentence context, which text-to-
triples tools need to produce a usable topic.
"""
from __future__ import annotations

import re

# Boundaries inside identifiers: explicit separators, lower-to-upper camel
# humps, letter/digit seams, and acronym-to-word seams ("TVStand" -> TV Stand).
_SEPARATORS = re.compile(r"[_\-|./\s]+")
_CAMEL = re.compile(
    r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Za-z])(?=[0-9])|(?<=[0-9])(?=[A-Za-z])|(?<=[A-Z])(?=[A-Z][a-z])"
)

_VOWELS = "aeiou"


def _singular(token: str) -> str:
    # conservative plural stripping: wrong singulars are worse than missed ones
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if token.endswith(("shes", "ches", "xes", "ses", "zes", "oes")):
        return token[:-2]
    if len(token) > 3 and token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


def name_tokens(raw: str) -> list[str]:
    """Lowercased singular word tokens of an identifier, numeric tokens dropped."""
    tokens: list[str] = []
    for chunk in _SEPARATORS.split(raw):
        if not chunk:
            continue
        for piece in _CAMEL.split(chunk):
            if piece and not piece.isdigit():
                tokens.append(_singular(piece.lower()))
    return tokens


def preprocess_name(raw: str) -> str:
    """Turn a prim name into a lookup phrase: "CoffeeTable_3" -> "a coffee table in a room"."""
    tokens = name_tokens(raw)
    if not tokens:
        return ""
    phrase = " ".join(tokens)
    article = "an" if phrase[0] in _VOWELS else "a"
    return f"{article} {phrase} in a room"


def phrase_core_tokens(phrase: str) -> list[str]:
    """The name tokens of a query phrase, with the template scaffolding removed."""
    tokens = phrase.split()
    if tokens[-3:] == ["in", "a", "room"]:
        tokens = tokens[:-3]
    if tokens and tokens[0] in ("a", "an"):
        tokens = tokens[1:]
    return tokens
