"""Text-to-triples client interface.

The linker that turns a phrase into knowledge-graph entities is an external
web service.  Tests and offline runs use :class:`FixtureClient`, which replays
recorded responses from a directory and never touches the network; the HTTP
client only activates when an endpoint is configured explicitly.

Recorded response shape (one JSON file per query)::

    {
      "query": "a cup in a room",
      "topic": {
        "iri": "dbpedia:Cup",
        "sameAs": ["wikidata:Q81727"],
        "definition": "...",          # optional enrichment
        "parts": [...], "materials": [...], "uses": [...]
      }
    }

``"topic": null`` records a lookup that found no entity link.
"""
from __future__ import annotations

import json
import re
import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path

from ..errors import SceneBridgeError
from .reports import Candidate, iri_to_link


class ClientUnavailable(SceneBridgeError):
    """Transient lookup failure (network, timeout); retrying may succeed.

    Distinct from an empty result: an empty result is an answer.
    """


_SLUG = re.compile(r"[^a-z0-9]+")


def query_slug(phrase: str) -> str:
    """Filesystem-safe name for a recorded query."""
    return _SLUG.sub("_", phrase.lower()).strip("_") or "empty"


class FixtureClient:
    """Replays recorded lookups from a directory; a miss is an empty answer."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise SceneBridgeError(f"fixture directory {str(self.directory)!r} not found")

    def lookup(self, phrase: str) -> dict | None:
        path = self.directory / (query_slug(phrase) + ".json")
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise SceneBridgeError(f"malformed fixture {path.name}: {exc}") from exc


class HttpClient:
    """Live lookup via HTTP GET; requires an explicit endpoint."""

    def __init__(self, endpoint: str, timeout: float = 10.0):
        if not endpoint:
            raise SceneBridgeError("text-to-triples endpoint not configured")
        self.endpoint = endpoint
        self.timeout = timeout

    def lookup(self, phrase: str) -> dict | None:
        url = f"{self.endpoint}?{urllib.parse.urlencode({'text': phrase})}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise ClientUnavailable(f"text-to-triples lookup failed: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ClientUnavailable(f"unparseable text-to-triples response: {exc}") from exc


_ENRICHMENT_KEYS = ("definition", "parts", "materials", "uses")


def link_via_text_to_triples(phrase: str, client) -> list[Candidate]:
    """Candidates from the topic node of a text-to-triples response.

    Only a topic carrying a DBPedia link counts as identified; cross-links
    recorded on the topic add ids from other repositories to the same
    candidate.
    """
    response = client.lookup(phrase)
    if not response:
        return []
    topic = response.get("topic")
    if not topic or not str(topic.get("iri", "")).startswith("dbpedia:"):
        return []
    links = {iri_to_link(topic["iri"])}
    for same in topic.get("sameAs", ()):
        repo, cid = iri_to_link(same)
        if repo not in {r for r, _ in links}:
            links.add((repo, cid))
    enrichment = {k: topic[k] for k in _ENRICHMENT_KEYS if topic.get(k)}
    return [
        Candidate(
            links=tuple(sorted(links)),
            score=0.9,
            evidence="text_to_triples",
            enrichment=enrichment or None,
        )
    ]
