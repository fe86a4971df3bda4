"""Semantic report structures and their JSON wire form.

A report ties one prim to candidate concepts from external repositories plus
the labels a human confirmed.  The JSON payload is what gets stored in the
``semanticTag:semanticReports`` attribute, so encoding is deterministic and
round-trip exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import SceneBridgeError

REPORT_VERSION = 1

#: Knowledge repositories a candidate link may point into, and the IRI prefix
#: used for each when a link is quoted as a single concept IRI.
REPOSITORY_PREFIXES = {
    "dbpedia": "dbpedia:",
    "wikidata": "wikidata:",
    "conceptnet": "conceptnet:",
    "soma_dfl": "dfl:",
    "cskg": "cskg:",
}
_PREFIX_REPOSITORIES = {v: k for k, v in REPOSITORY_PREFIXES.items()}

EVIDENCE_KINDS = ("text_to_triples", "lexicon", "manual")


def iri_to_link(iri: str) -> tuple[str, str]:
    """Split a prefixed concept IRI into a (repository, id) pair."""
    for prefix, repo in _PREFIX_REPOSITORIES.items():
        if iri.startswith(prefix):
            return repo, iri[len(prefix):]
    raise SceneBridgeError(f"concept IRI {iri!r} has no known repository prefix")


def link_to_iri(repository: str, concept_id: str) -> str:
    prefix = REPOSITORY_PREFIXES.get(repository)
    if prefix is None:
        raise SceneBridgeError(f"unknown repository {repository!r}")
    return prefix + concept_id


@dataclass(frozen=True)
class Candidate:
    """One linked concept: where it lives, how sure we are, how we found it."""

    links: tuple[tuple[str, str], ...]
    score: float
    evidence: str
    enrichment: dict | None = None

    def __post_init__(self):
        if not self.links:
            raise SceneBridgeError("candidate needs at least one link")
        repos = [repo for repo, _ in self.links]
        if len(set(repos)) != len(repos):
            raise SceneBridgeError("candidate carries two ids for one repository")
        for repo in repos:
            if repo not in REPOSITORY_PREFIXES:
                raise SceneBridgeError(f"unknown repository {repo!r}")
        if self.evidence not in EVIDENCE_KINDS:
            raise SceneBridgeError(f"unknown evidence kind {self.evidence!r}")
        if not 0.0 <= self.score <= 1.0:
            raise SceneBridgeError(f"candidate score {self.score} outside [0, 1]")

    def iris(self) -> set[str]:
        return {link_to_iri(repo, cid) for repo, cid in self.links}


@dataclass(frozen=True)
class ChosenLabel:
    iri: str
    manual: bool = False


@dataclass
class SemanticReport:
    subject: str
    candidates: list[Candidate] = field(default_factory=list)
    chosen_labels: list[ChosenLabel] = field(default_factory=list)

    def candidate_iris(self) -> set[str]:
        out: set[str] = set()
        for cand in self.candidates:
            out |= cand.iris()
        return out

    def validate(self):
        known = self.candidate_iris()
        for label in self.chosen_labels:
            if not label.manual and label.iri not in known:
                raise SceneBridgeError(
                    f"label {label.iri!r} on {self.subject!r} is not a candidate "
                    "and is not marked manual"
                )


def report_to_json(report: SemanticReport) -> str:
    doc = {
        "version": REPORT_VERSION,
        "subject": report.subject,
        "candidates": [
            {
                "links": [
                    {"repository": repo, "id": cid} for repo, cid in cand.links
                ],
                "score": cand.score,
                "evidence": cand.evidence,
                **({"enrichment": cand.enrichment} if cand.enrichment else {}),
            }
            for cand in report.candidates
        ],
        "chosen_labels": [
            {"iri": label.iri, "manual": label.manual}
            for label in report.chosen_labels
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(", ", ": "))


def report_from_json(text: str) -> SemanticReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneBridgeError(f"malformed semantic report JSON: {exc}") from exc
    version = doc.get("version")
    if version != REPORT_VERSION:
        raise SceneBridgeError(f"unsupported semantic report version {version!r}")
    candidates = [
        Candidate(
            links=tuple((ln["repository"], ln["id"]) for ln in entry["links"]),
            score=entry["score"],
            evidence=entry["evidence"],
            enrichment=entry.get("enrichment"),
        )
        for entry in doc.get("candidates", [])
    ]
    chosen = [
        ChosenLabel(entry["iri"], bool(entry.get("manual", False)))
        for entry in doc.get("chosen_labels", [])
    ]
    return SemanticReport(doc["subject"], candidates, chosen)
