"""Brute-force lexicon matching oracle.

Iterates the lexicon instead of the name: for every lexicon entry, scan the
name tokens for that entry as a contiguous run.  The production matcher walks
the other way (all spans of the name), so agreement between the two is a real
cross-check of the longest-match/ordering rules.
"""
from __future__ import annotations


def _is_run_at(haystack: list[str], needle: list[str], start: int) -> bool:
    return haystack[start:start + len(needle)] == needle


def brute_force_candidates(core_tokens: list[str], lexicon) -> list[tuple[str, float]]:
    """[(concept IRI, score)] in the promised order, computed the slow way."""
    total = len(core_tokens)
    if total == 0:
        return []
    hits: dict[str, tuple[int, float]] = {}
    for phrase, concepts in lexicon.entries.items():
        needle = phrase.split()
        found = any(
            _is_run_at(core_tokens, needle, i)
            for i in range(total - len(needle) + 1)
        )
        if not found:
            continue
        for iri, weight in concepts:
            old = hits.get(iri)
            if old is None or (len(needle), weight) > old:
                hits[iri] = (len(needle), weight)
    order = sorted(hits, key=lambda iri: (-hits[iri][0], -hits[iri][1], iri))
    return [(iri, hits[iri][1] * hits[iri][0] / total) for iri in order]
