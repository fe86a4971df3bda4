"""Report generation and label management on a USDA stage.

Bodies are the Xform prims that directly own geometry; each gets one report
stored as JSON in ``semanticTag:semanticReports``.  Labels live next to it in
``semanticTag:semanticLabels`` and the two are kept in step, so the label list
is what the knowledge-graph compiler and the tagging view both read.
"""
from __future__ import annotations

from ..errors import SceneBridgeError
from ..usda.model import UsdaPrim, UsdaStage
from ..usda.registry import PRIM_TO_GEOM_TYPE
from .client import link_via_text_to_triples
from .lexicon import Lexicon, link_via_lexicon
from .naming import preprocess_name
from .reports import ChosenLabel, SemanticReport, report_from_json, report_to_json

SEMANTIC_SCHEMA = "SemanticTagAPI"
LABELS_ATTR = "semanticTag:semanticLabels"
REPORTS_ATTR = "semanticTag:semanticReports"

UNTAGGABLE = "untaggable"
TAGGABLE = "taggable"
TAGGED = "tagged"


def is_body_prim(prim: UsdaPrim) -> bool:
    """A body owns at least one geometry prim directly."""
    return any(child.type_name in PRIM_TO_GEOM_TYPE for child in prim.children)


def body_prims(stage: UsdaStage) -> list[UsdaPrim]:
    return [prim for prim in stage.walk() if is_body_prim(prim)]


def _require_prim(stage: UsdaStage, path: str) -> UsdaPrim:
    prim = stage.find(path)
    if prim is None:
        raise SceneBridgeError(f"no prim at {path!r}")
    return prim


def _labels(prim: UsdaPrim) -> list[str]:
    return list(prim.get(LABELS_ATTR, []))


def _stored_report(prim: UsdaPrim) -> SemanticReport | None:
    payload = prim.get(REPORTS_ATTR)
    if payload is None:
        return None
    return report_from_json(payload)


def _store(prim: UsdaPrim, report: SemanticReport, labels: list[str]):
    report.validate()
    if SEMANTIC_SCHEMA not in prim.api_schemas:
        prim.api_schemas.append(SEMANTIC_SCHEMA)
    prim.set(REPORTS_ATTR, "string", report_to_json(report))
    prim.set(LABELS_ATTR, "string[]", labels)


def generate_reports(stage: UsdaStage, lexicon: Lexicon, client=None) -> list[SemanticReport]:
    """One report per body prim: text-to-triples first, lexicon as fallback.

    Labels already present on the stage are carried into the report unchanged,
    so regeneration never discards human decisions.
    """
    reports = []
    for prim in body_prims(stage):
        phrase = preprocess_name(prim.name)
        candidates = link_via_text_to_triples(phrase, client) if client is not None else []
        if not candidates:
            candidates = link_via_lexicon(phrase, lexicon)
        known = set()
        for cand in candidates:
            known |= cand.iris()
        chosen = [ChosenLabel(iri, manual=iri not in known) for iri in _labels(prim)]
        reports.append(SemanticReport(prim.path, candidates, chosen))
    return reports


def attach_reports(stage: UsdaStage, reports: list[SemanticReport]) -> UsdaStage:
    """Write reports onto their prims (semantic layer attributes)."""
    for report in reports:
        prim = _require_prim(stage, report.subject)
        _store(prim, report, [label.iri for label in report.chosen_labels])
    return stage


def annotate_stage(stage: UsdaStage, lexicon: Lexicon, client=None) -> list[SemanticReport]:
    """generate_reports + attach_reports in one step; returns the reports."""
    reports = generate_reports(stage, lexicon, client)
    attach_reports(stage, reports)
    return reports


def add_label(stage: UsdaStage, prim_path: str, iri: str) -> UsdaStage:
    """Confirm a concept for a prim; idempotent for repeated adds."""
    prim = _require_prim(stage, prim_path)
    labels = _labels(prim)
    if iri in labels:
        return stage
    labels.append(iri)
    report = _stored_report(prim) or SemanticReport(prim_path)
    report.chosen_labels = [c for c in report.chosen_labels if c.iri != iri]
    report.chosen_labels.append(ChosenLabel(iri, manual=iri not in report.candidate_iris()))
    _store(prim, report, labels)
    return stage


def remove_label(stage: UsdaStage, prim_path: str, iri: str) -> UsdaStage:
    """Withdraw a label; the applied schema and the report stay in place."""
    prim = _require_prim(stage, prim_path)
    labels = _labels(prim)
    if iri not in labels:
        return stage
    labels.remove(iri)
    report = _stored_report(prim) or SemanticReport(prim_path)
    report.chosen_labels = [c for c in report.chosen_labels if c.iri != iri]
    _store(prim, report, labels)
    return stage


def tag_state(stage: UsdaStage, prim_path: str) -> str:
    """tagged: has labels; taggable: has candidates to pick from; else untaggable."""
    prim = _require_prim(stage, prim_path)
    if _labels(prim):
        return TAGGED
    report = _stored_report(prim)
    if report is not None and report.candidates:
        return TAGGABLE
    return UNTAGGABLE
