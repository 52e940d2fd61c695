"""Questionnaire engine for workflow documentation.

A versioned template with four sections drives a documentation
session: answers are type-checked on entry, suggestions are pulled
from the knowledge graph and the metadata resolver, completed sessions
render to a deterministic wiki-style markdown page and export into the
knowledge graph as a Workflow entity with its full ontology
neighborhood.  Inline entities are staged inside the session and only
materialized at export, so drafts never touch the graph.
"""

from __future__ import annotations

import json
import secrets
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import metafetch
from .errors import DomainError
from .metafetch import Resolver
from .modelkg import EntityKind, KnowledgeGraph, RelationKind

TEMPLATE_VERSION = "1.0.0"
SESSION_SCHEMA = "mathdoc-session/1"


class UnknownQuestion(DomainError):
    code = "unknown_question"


class TypeMismatch(DomainError):
    code = "type_mismatch"


class UnknownEntityRef(DomainError):
    code = "unknown_entity_ref"


class IncompleteSession(DomainError):
    code = "incomplete_session"


class VersionMismatch(DomainError):
    code = "version_mismatch"


class SchemaViolation(DomainError):
    code = "schema_violation"


# ---------------------------------------------------------------------------
# template

@dataclass(frozen=True)
class FreeText:
    type_name = "free_text"


@dataclass(frozen=True)
class ControlledTerm:
    allowed: tuple[str, ...]
    type_name = "controlled_term"


@dataclass(frozen=True)
class EntityRef:
    kind: EntityKind
    type_name = "entity_ref"


@dataclass(frozen=True)
class EntityRefList:
    kind: EntityKind
    type_name = "entity_ref_list"


@dataclass(frozen=True)
class BooleanFlag:
    type_name = "boolean_flag"


@dataclass(frozen=True)
class DoiString:
    type_name = "doi_string"


AnswerType = object


@dataclass(frozen=True)
class Question:
    id: str
    prompt: str
    answer_type: AnswerType
    mandatory: bool = False

    def to_dict(self) -> dict:
        doc = {
            "id": self.id,
            "prompt": self.prompt,
            "type": self.answer_type.type_name,
            "mandatory": self.mandatory,
        }
        if isinstance(self.answer_type, ControlledTerm):
            doc["allowed"] = list(self.answer_type.allowed)
        if isinstance(self.answer_type, (EntityRef, EntityRefList)):
            doc["entity_kind"] = self.answer_type.kind.value
        return doc


@dataclass(frozen=True)
class Section:
    id: str
    title: str
    questions: tuple[Question, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "questions": [q.to_dict() for q in self.questions],
        }


@dataclass(frozen=True)
class QuestionnaireTemplate:
    version: str
    sections: tuple[Section, ...]

    def __post_init__(self):
        ids = [q.id for s in self.sections for q in s.questions]
        if len(set(ids)) != len(ids):
            raise SchemaViolation("question ids must be globally unique")

    def questions(self) -> dict[str, Question]:
        return {q.id: q for s in self.sections for q in s.questions}

    def question(self, qid: str) -> Question:
        q = self.questions().get(qid)
        if q is None:
            raise UnknownQuestion(f"no question with id {qid!r}")
        return q

    def mandatory_ids(self) -> list[str]:
        return [q.id for s in self.sections for q in s.questions if q.mandatory]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "sections": [s.to_dict() for s in self.sections],
        }


K = EntityKind


def default_template() -> QuestionnaireTemplate:
    """Built-in 4-section template; the minimal question set that can
    populate every export target (publication, fields, model with its
    neighborhood, methods, software, data, hardware)."""
    return QuestionnaireTemplate(
        version=TEMPLATE_VERSION,
        sections=(
            Section(
                "general",
                "General",
                (
                    Question("general.title", "Workflow title", FreeText(), mandatory=True),
                    Question("general.objective", "Research objective", FreeText(), mandatory=True),
                    Question("general.publication_doi", "DOI of the related publication", DoiString()),
                    Question("general.publication", "Related publication", EntityRef(K.PUBLICATION)),
                    Question(
                        "general.research_fields",
                        "Scientific research fields",
                        EntityRefList(K.RESEARCH_FIELD),
                        mandatory=True,
                    ),
                ),
            ),
            Section(
                "model",
                "Models, Variables and Parameters",
                (
                    Question("model.main", "Mathematical model", EntityRef(K.MATHEMATICAL_MODEL), mandatory=True),
                    Question("model.problem", "Research problem addressed", EntityRef(K.RESEARCH_PROBLEM)),
                    Question("model.problem_field", "Field of the research problem", EntityRef(K.RESEARCH_FIELD)),
                    Question("model.formulations", "Mathematical formulations", EntityRefList(K.MATHEMATICAL_FORMULATION)),
                    Question("model.quantities", "Quantities", EntityRefList(K.QUANTITY)),
                    Question("model.tasks", "Computational tasks", EntityRefList(K.COMPUTATIONAL_TASK)),
                    Question("model.generalizes", "Models this model generalizes", EntityRefList(K.MATHEMATICAL_MODEL)),
                    Question("model.combines", "Models this model combines", EntityRefList(K.MATHEMATICAL_MODEL)),
                ),
            ),
            Section(
                "process",
                "Process Information",
                (
                    Question("process.methods", "Methods applied", EntityRefList(K.METHOD), mandatory=True),
                    Question("process.software", "Software used", EntityRefList(K.SOFTWARE), mandatory=True),
                    Question("process.hardware", "Hardware used", EntityRefList(K.HARDWARE)),
                    Question("process.input_data", "Input datasets", EntityRefList(K.DATASET), mandatory=True),
                    Question("process.output_data", "Output datasets", EntityRefList(K.DATASET), mandatory=True),
                    Question("process.steps", "Process description", FreeText()),
                ),
            ),
            Section(
                "repro",
                "Reproducibility",
                (
                    Question("repro.data_available", "Input data publicly available", BooleanFlag(), mandatory=True),
                    Question("repro.code_available", "Analysis code publicly available", BooleanFlag(), mandatory=True),
                    Question("repro.deterministic", "Computation deterministic", BooleanFlag()),
                    Question(
                        "repro.reproducibility_level",
                        "Reproducibility level",
                        ControlledTerm(("full", "partial", "none")),
                    ),
                    Question("repro.environment", "Computational environment notes", FreeText()),
                ),
            ),
        ),
    )


# inline extras allowed per entity kind, beyond label/description/external_ids/attributes
_INLINE_EXTRAS: dict[EntityKind, tuple[str, ...]] = {
    K.MATHEMATICAL_FORMULATION: ("formula",),
    K.QUANTITY: ("kind", "formulation"),
    K.COMPUTATIONAL_TASK: ("formulation", "inputs", "outputs"),
}
_INLINE_BASE_KEYS = ("label", "description", "external_ids", "attributes")


# ---------------------------------------------------------------------------
# sessions

@dataclass
class DocumentationSession:
    session_id: str
    template_version: str
    answers: dict[str, object] = field(default_factory=dict)
    status: str = "draft"  # draft | complete | exported
    created_at: str = ""
    updated_at: str = ""
    rules_attachment: Optional[dict] = None
    export_record: Optional[dict] = None


def _iso(clock: Callable[[], float]) -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(clock()))


def new_session(
    template: QuestionnaireTemplate,
    id_factory: Optional[Callable[[], str]] = None,
    clock: Callable[[], float] = time.time,
) -> DocumentationSession:
    mint = id_factory or (lambda: "sess-" + secrets.token_hex(8))
    now = _iso(clock)
    return DocumentationSession(
        session_id=mint(),
        template_version=template.version,
        created_at=now,
        updated_at=now,
    )


def _validate_inline(spec: object, kind: EntityKind, qid: str) -> dict:
    if not isinstance(spec, dict):
        raise TypeMismatch(f"{qid}: inline entity must be an object")
    label = spec.get("label")
    if not isinstance(label, str) or not label:
        raise TypeMismatch(f"{qid}: inline entity needs a nonempty label")
    allowed = _INLINE_BASE_KEYS + _INLINE_EXTRAS.get(kind, ())
    for key in spec:
        if key not in allowed:
            raise TypeMismatch(f"{qid}: unknown inline field {key!r} for {kind.value}")
    for key in ("description", "formula", "kind"):
        if key in spec and not isinstance(spec[key], str):
            raise TypeMismatch(f"{qid}: inline field {key!r} must be a string")
    for key in ("external_ids", "attributes"):
        mapping = spec.get(key, {})
        if not isinstance(mapping, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
        ):
            raise TypeMismatch(f"{qid}: inline field {key!r} must map strings to strings")
    if "formulation" in spec and not isinstance(spec["formulation"], (str, dict)):
        raise TypeMismatch(f"{qid}: inline field 'formulation' must be a label or a reference")
    for key in ("inputs", "outputs"):
        if key in spec:
            items = spec[key]
            if not isinstance(items, list) or not all(isinstance(x, (str, dict)) for x in items):
                raise TypeMismatch(f"{qid}: inline field {key!r} must list labels or references")
    return dict(spec)


def _normalize_ref_value(value: object, kind: EntityKind, qid: str, kg: Optional[KnowledgeGraph]) -> dict:
    if not isinstance(value, dict) or not ({"ref", "inline"} & set(value)):
        raise TypeMismatch(f'{qid}: expected {{"ref": id}} or {{"inline": {{...}}}}')
    if "ref" in value:
        ref = value["ref"]
        if not isinstance(ref, str) or not ref:
            raise TypeMismatch(f"{qid}: ref must be a nonempty entity id")
        if kg is None:
            raise UnknownEntityRef(f"{qid}: cannot resolve {ref!r} without a knowledge graph")
        try:
            entity = kg.get(ref)
        except DomainError:
            raise UnknownEntityRef(f"{qid}: no entity with id {ref!r}") from None
        if entity.kind != kind:
            raise UnknownEntityRef(
                f"{qid}: entity {ref!r} is a {entity.kind.value}, expected {kind.value}"
            )
        return {"ref": ref, "label": entity.label}
    return {"inline": _validate_inline(value["inline"], kind, qid)}


def set_answer(
    session: DocumentationSession,
    template: QuestionnaireTemplate,
    qid: str,
    value: object,
    kg: Optional[KnowledgeGraph] = None,
    clock: Callable[[], float] = time.time,
) -> DocumentationSession:
    question = template.question(qid)
    at = question.answer_type
    if isinstance(at, FreeText):
        if not isinstance(value, str) or not value.strip():
            raise TypeMismatch(f"{qid}: expected nonempty text")
        stored: object = value
    elif isinstance(at, ControlledTerm):
        if value not in at.allowed:
            raise TypeMismatch(f"{qid}: {value!r} not one of {list(at.allowed)}")
        stored = value
    elif isinstance(at, BooleanFlag):
        if not isinstance(value, bool):
            raise TypeMismatch(f"{qid}: expected a boolean")
        stored = value
    elif isinstance(at, DoiString):
        if not isinstance(value, str):
            raise TypeMismatch(f"{qid}: expected a DOI string")
        try:
            stored = metafetch.normalize_doi(value)
        except metafetch.InvalidDoi as exc:
            raise TypeMismatch(f"{qid}: {exc}") from None
    elif isinstance(at, EntityRef):
        stored = _normalize_ref_value(value, at.kind, qid, kg)
    elif isinstance(at, EntityRefList):
        if not isinstance(value, list) or not value:
            raise TypeMismatch(f"{qid}: expected a nonempty list")
        stored = [_normalize_ref_value(item, at.kind, qid, kg) for item in value]
    else:  # pragma: no cover - template construction guards this
        raise TypeMismatch(f"{qid}: unsupported answer type")
    session.answers[qid] = stored
    session.updated_at = _iso(clock)
    if session.status == "complete":
        session.status = "draft"
    return session


def completeness(session: DocumentationSession, template: QuestionnaireTemplate) -> list[str]:
    return [qid for qid in template.mandatory_ids() if qid not in session.answers]


def mark_complete(session: DocumentationSession, template: QuestionnaireTemplate) -> DocumentationSession:
    missing = completeness(session, template)
    if missing:
        raise IncompleteSession(f"missing mandatory answers: {', '.join(missing)}", missing=missing)
    if session.status == "draft":
        session.status = "complete"
    return session


def pending_suggestion_qids(session: DocumentationSession, template: QuestionnaireTemplate) -> list[str]:
    """Publication questions with an answered DOI but no answer yet."""
    pending = []
    doi_answered = any(
        isinstance(template.questions()[qid].answer_type, DoiString)
        for qid in session.answers
    )
    if doi_answered:
        for qid, q in template.questions().items():
            if (
                isinstance(q.answer_type, EntityRef)
                and q.answer_type.kind is K.PUBLICATION
                and qid not in session.answers
            ):
                pending.append(qid)
    return pending


@dataclass(frozen=True)
class Candidate:
    provenance: str  # "kg" | "external"
    label: str
    description: str = ""
    ref: Optional[str] = None  # entity id for kg candidates
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "label": self.label,
            "description": self.description,
            "ref": self.ref,
            "payload": self.payload,
        }


def _answered_doi(session: DocumentationSession, template: QuestionnaireTemplate) -> Optional[str]:
    for qid, value in session.answers.items():
        if isinstance(template.questions()[qid].answer_type, DoiString):
            return value  # already normalized
    return None


def suggest(
    session: DocumentationSession,
    template: QuestionnaireTemplate,
    qid: str,
    kg: Optional[KnowledgeGraph] = None,
    resolver: Optional[Resolver] = None,
    text: Optional[str] = None,
) -> list[Candidate]:
    """Candidates for a question: knowledge-graph hits by kind and
    partial text, plus external catalog and DOI-citation lookups.
    Resolver failures degrade to an empty external portion."""
    question = template.question(qid)
    at = question.answer_type
    if not isinstance(at, (EntityRef, EntityRefList)):
        return []
    if text is None:
        current = session.answers.get(qid)
        if isinstance(current, dict) and "inline" in current:
            text = current["inline"].get("label", "")
        else:
            text = ""

    candidates: list[Candidate] = []
    if kg is not None:
        for entity in kg.find_entities(kind=at.kind, label_substring=text or None):
            candidates.append(
                Candidate("kg", entity.label, entity.description, ref=entity.id)
            )
    if resolver is not None:
        if at.kind is K.PUBLICATION:
            doi = _answered_doi(session, template)
            if doi:
                try:
                    meta = resolver.resolve_doi(doi)
                except DomainError:
                    meta = None
                if meta is not None:
                    candidates.append(
                        Candidate("external", meta.title, meta.venue, payload=meta.to_dict())
                    )
        elif text:
            try:
                external = resolver.search_external(text, kind=at.kind.value)
            except DomainError:
                external = []
            for hit in external:
                candidates.append(
                    Candidate(
                        "external",
                        hit.label,
                        hit.description,
                        payload=hit.to_dict(),
                    )
                )
    return candidates


# ---------------------------------------------------------------------------
# wiki rendering

@dataclass(frozen=True)
class WikiPage:
    title: str
    markdown: str


def _render_ref(value: dict) -> str:
    if "ref" in value:
        return f"{value.get('label', value['ref'])} ({value['ref']})"
    spec = value["inline"]
    extras = []
    if isinstance(spec.get("formulation"), str):
        extras.append(f"formulation: {spec['formulation']}")
    for key in ("inputs", "outputs"):
        labels = [x for x in spec.get(key, []) if isinstance(x, str)]
        if labels:
            extras.append(f"{key}: {', '.join(labels)}")
    if spec.get("kind"):
        extras.append(f"kind: {spec['kind']}")
    suffix = "inline" + ("; " + "; ".join(extras) if extras else "")
    return f"{spec['label']} ({suffix})"


def _render_answer(value: object) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return _render_ref(value)
    if isinstance(value, list):
        return "; ".join(_render_ref(v) for v in value)
    return str(value)


def render_wiki(
    session: DocumentationSession,
    template: QuestionnaireTemplate,
    force: bool = False,
) -> WikiPage:
    """Deterministic markdown summary of a session.

    Requires a completed session unless force is set (draft preview).
    """
    if session.status == "draft" and not force:
        raise IncompleteSession(
            "session is a draft; complete it or render with force",
            missing=completeness(session, template),
        )
    title = session.answers.get("general.title") or "Untitled workflow"
    lines = [f"# {title}", ""]
    for index, section in enumerate(template.sections, start=1):
        lines.append(f"## {index}. {section.title}")
        lines.append("")
        for question in section.questions:
            if question.id not in session.answers:
                continue
            rendered = _render_answer(session.answers[question.id])
            lines.append(f"**{question.prompt}:** {rendered}")
            lines.append("")
    if session.rules_attachment:
        lines.extend(_render_rules_attachment(session.rules_attachment))
    markdown = "\n".join(lines).rstrip("\n") + "\n"
    return WikiPage(title=str(title), markdown=markdown)


def _render_rules_attachment(doc: dict) -> list[str]:
    meta = doc.get("metadata", {})
    lines = ["## Rules Analysis", ""]
    lines.append(
        f"Term order: {meta.get('order', '?')}; rules: {meta.get('rule_count', '?')}; "
        f"distinct objects: {meta.get('distinct_point_count', '?')}; "
        f"duplicates: {meta.get('duplicate_count', '?')}"
    )
    lines.append("")
    rules = doc.get("rules", [])
    if rules:
        lines.append("| rule | form | support |")
        lines.append("| --- | --- | --- |")
        for rule in rules:
            lines.append(
                f"| {rule.get('text', '')} | {rule.get('form', '')} | {rule.get('support', '')} |"
            )
        lines.append("")
    return lines


def attach_rules_summary(session: DocumentationSession, rules_doc: dict) -> DocumentationSession:
    if not isinstance(rules_doc, dict) or "rules" not in rules_doc:
        raise SchemaViolation("rules attachment must be a parsed rules document")
    session.rules_attachment = rules_doc
    return session


# ---------------------------------------------------------------------------
# export to the knowledge graph

@dataclass(frozen=True)
class ExportReport:
    workflow_id: str
    created: tuple[str, ...]
    reused: tuple[str, ...]
    relations_added: tuple[tuple[str, str, str], ...]

    def to_dict(self) -> dict:
        return {
            "workflow_id": self.workflow_id,
            "created": list(self.created),
            "reused": list(self.reused),
            "relations_added": [list(t) for t in self.relations_added],
        }


class _Exporter:
    """Single export pass; tracks created/reused ids and new triples."""

    def __init__(self, kg: KnowledgeGraph, policy: str, resolver: Optional[Resolver]):
        self.kg = kg
        self.policy = policy
        self.resolver = resolver
        self.created: list[str] = []
        self.reused: list[str] = []
        self.relations: list[tuple[str, str, str]] = []

    def materialize(
        self,
        kind: EntityKind,
        label: str,
        description: str = "",
        external_ids: Optional[dict] = None,
        attributes: Optional[dict] = None,
    ) -> str:
        before = self.kg.version
        entity_id = self.kg.create_entity(
            kind,
            label,
            description=description,
            external_ids=external_ids,
            attributes=attributes,
            dedup_policy=self.policy,
        )
        if self.kg.version > before:
            self.created.append(entity_id)
        elif entity_id not in self.created and entity_id not in self.reused:
            self.reused.append(entity_id)
        return entity_id

    def inline_entity(self, kind: EntityKind, spec: dict) -> str:
        attributes = dict(spec.get("attributes", {}))
        if isinstance(spec.get("formula"), str):
            attributes["formula"] = spec["formula"]
        return self.materialize(
            kind,
            spec["label"],
            description=spec.get("description", ""),
            external_ids=spec.get("external_ids", {}),
            attributes=attributes,
        )

    def resolve(self, value: dict, kind: EntityKind) -> str:
        if "ref" in value:
            entity_id = value["ref"]
            if entity_id not in self.reused:
                self.reused.append(entity_id)
            return entity_id
        return self.inline_entity(kind, value["inline"])

    def relate(self, src: str, kind: RelationKind, dst: str) -> None:
        triple = (src, kind, dst)
        if triple in self.kg.relations:
            return
        self.kg.add_relation(src, kind, dst)
        self.relations.append((src, kind.value, dst))


def _precheck_refs(session, template, kg) -> None:
    """Fail before any mutation if a stored ref no longer resolves or
    an inline cross-label has no staged target."""
    questions = template.questions()

    def check_ref(qid: str, value: dict, kind: EntityKind) -> None:
        if "ref" not in value:
            return
        try:
            entity = kg.get(value["ref"])
        except DomainError:
            raise UnknownEntityRef(f"{qid}: no entity with id {value['ref']!r}") from None
        if entity.kind != kind:
            raise UnknownEntityRef(
                f"{qid}: entity {value['ref']!r} is a {entity.kind.value}, expected {kind.value}"
            )

    for qid, value in session.answers.items():
        at = questions[qid].answer_type
        if isinstance(at, EntityRef):
            check_ref(qid, value, at.kind)
        elif isinstance(at, EntityRefList):
            for item in value:
                check_ref(qid, item, at.kind)

    staged_formulations = {
        item["inline"]["label"]
        for item in session.answers.get("model.formulations", [])
        if "inline" in item
    }
    staged_quantities = {
        item["inline"]["label"]
        for item in session.answers.get("model.quantities", [])
        if "inline" in item
    }
    for item in session.answers.get("model.tasks", []):
        if "inline" not in item:
            continue
        spec = item["inline"]
        formulation = spec.get("formulation")
        if isinstance(formulation, str) and formulation not in staged_formulations:
            raise UnknownEntityRef(
                f"model.tasks: task {spec['label']!r} names unstaged formulation {formulation!r}"
            )
        if isinstance(formulation, dict):
            check_ref("model.tasks", formulation, K.MATHEMATICAL_FORMULATION)
        for key in ("inputs", "outputs"):
            for entry in spec.get(key, []):
                if isinstance(entry, str) and entry not in staged_quantities:
                    raise UnknownEntityRef(
                        f"model.tasks: task {spec['label']!r} names unstaged quantity {entry!r}"
                    )
                if isinstance(entry, dict):
                    check_ref("model.tasks", entry, K.QUANTITY)
    for item in session.answers.get("model.quantities", []):
        if "inline" not in item:
            continue
        spec = item["inline"]
        formulation = spec.get("formulation")
        if isinstance(formulation, str) and formulation not in staged_formulations:
            raise UnknownEntityRef(
                f"model.quantities: quantity {spec['label']!r} names unstaged formulation {formulation!r}"
            )


def export_to_kg(
    session: DocumentationSession,
    template: QuestionnaireTemplate,
    kg: KnowledgeGraph,
    dedup_policy: str = "reuse",
    resolver: Optional[Resolver] = None,
) -> ExportReport:
    """Materialize a completed session into the graph, all or nothing."""
    missing = completeness(session, template)
    if missing:
        raise IncompleteSession(
            f"missing mandatory answers: {', '.join(missing)}", missing=missing
        )
    _precheck_refs(session, template, kg)

    snapshot = kg.snapshot()
    ex = _Exporter(kg, dedup_policy, resolver)
    answers = session.answers
    try:
        workflow_id = ex.materialize(
            K.WORKFLOW,
            answers["general.title"],
            description=answers.get("general.objective", ""),
        )

        for value in answers.get("general.research_fields", []):
            ex.relate(workflow_id, RelationKind.WORKFLOW_IN_FIELD, ex.resolve(value, K.RESEARCH_FIELD))

        publication_id = _export_publication(ex, answers, resolver)
        if publication_id is not None:
            ex.relate(workflow_id, RelationKind.WORKFLOW_PUBLICATION, publication_id)

        model_id = ex.resolve(answers["model.main"], K.MATHEMATICAL_MODEL)
        ex.relate(workflow_id, RelationKind.WORKFLOW_USES_MODEL, model_id)
        _export_model_neighborhood(ex, answers, model_id, publication_id)

        for qid, relation, kind in (
            ("process.methods", RelationKind.WORKFLOW_USES_METHOD, K.METHOD),
            ("process.software", RelationKind.WORKFLOW_USES_SOFTWARE, K.SOFTWARE),
            ("process.hardware", RelationKind.WORKFLOW_ON_HARDWARE, K.HARDWARE),
            ("process.input_data", RelationKind.WORKFLOW_INPUT_DATA, K.DATASET),
            ("process.output_data", RelationKind.WORKFLOW_OUTPUT_DATA, K.DATASET),
        ):
            for value in answers.get(qid, []):
                ex.relate(workflow_id, relation, ex.resolve(value, kind))
    except Exception:
        kg.restore(snapshot)
        raise

    report = ExportReport(
        workflow_id=workflow_id,
        created=tuple(ex.created),
        reused=tuple(dict.fromkeys(ex.reused)),
        relations_added=tuple(ex.relations),
    )
    session.status = "exported"
    session.export_record = report.to_dict()
    return report


def _export_publication(ex: _Exporter, answers: dict, resolver: Optional[Resolver]) -> Optional[str]:
    value = answers.get("general.publication")
    doi = answers.get("general.publication_doi")
    if value is not None:
        if "inline" in value and doi and "doi" not in value["inline"].get("external_ids", {}):
            spec = dict(value["inline"])
            spec["external_ids"] = {**spec.get("external_ids", {}), "doi": doi}
            return ex.inline_entity(K.PUBLICATION, spec)
        return ex.resolve(value, K.PUBLICATION)
    if not doi:
        return None
    meta = None
    if resolver is not None:
        try:
            meta = resolver.resolve_doi(doi)
        except DomainError:
            meta = None
    if meta is None:
        return ex.materialize(K.PUBLICATION, doi, external_ids={"doi": doi})
    return ex.materialize(
        K.PUBLICATION,
        meta.title,
        external_ids={"doi": meta.doi},
        attributes={
            "authors": "; ".join(meta.authors),
            "year": str(meta.year),
            "venue": meta.venue,
        },
    )


def _export_model_neighborhood(
    ex: _Exporter, answers: dict, model_id: str, publication_id: Optional[str]
) -> None:
    problem_id = None
    if "model.problem" in answers:
        problem_id = ex.resolve(answers["model.problem"], K.RESEARCH_PROBLEM)
        ex.relate(model_id, RelationKind.ADDRESSES_PROBLEM, problem_id)
        if "model.problem_field" in answers:
            field_id = ex.resolve(answers["model.problem_field"], K.RESEARCH_FIELD)
            ex.relate(problem_id, RelationKind.PROBLEM_IN_FIELD, field_id)

    formulation_ids: dict[str, str] = {}
    for value in answers.get("model.formulations", []):
        fid = ex.resolve(value, K.MATHEMATICAL_FORMULATION)
        label = value["inline"]["label"] if "inline" in value else value.get("label", "")
        formulation_ids[label] = fid
        ex.relate(model_id, RelationKind.FORMALIZED_BY, fid)

    quantity_ids: dict[str, str] = {}
    first_formulation = next(iter(formulation_ids.values()), None)
    for value in answers.get("model.quantities", []):
        qid_ = ex.resolve(value, K.QUANTITY)
        spec = value.get("inline", {})
        label = spec.get("label", value.get("label", ""))
        quantity_ids[label] = qid_
        target = spec.get("formulation")
        container = formulation_ids.get(target) if isinstance(target, str) else first_formulation
        if container:
            ex.relate(container, RelationKind.CONTAINS_QUANTITY, qid_)
        if spec.get("kind"):
            kind_id = ex.materialize(K.QUANTITY_KIND, spec["kind"])
            ex.relate(qid_, RelationKind.HAS_QUANTITY_KIND, kind_id)

    for value in answers.get("model.tasks", []):
        task_id = ex.resolve(value, K.COMPUTATIONAL_TASK)
        ex.relate(task_id, RelationKind.APPLIES_MODEL, model_id)
        spec = value.get("inline")
        if not spec:
            continue
        formulation = spec.get("formulation")
        if isinstance(formulation, str):
            ex.relate(task_id, RelationKind.TASK_FORMULATION, formulation_ids[formulation])
        elif isinstance(formulation, dict):
            ex.relate(
                task_id,
                RelationKind.TASK_FORMULATION,
                ex.resolve(formulation, K.MATHEMATICAL_FORMULATION),
            )
        for key, relation in (
            ("inputs", RelationKind.INPUT_QUANTITY),
            ("outputs", RelationKind.OUTPUT_QUANTITY),
        ):
            for entry in spec.get(key, []):
                if isinstance(entry, str):
                    ex.relate(task_id, relation, quantity_ids[entry])
                else:
                    ex.relate(task_id, relation, ex.resolve(entry, K.QUANTITY))

    for qid_, relation in (
        ("model.generalizes", RelationKind.GENERALIZES),
        ("model.combines", RelationKind.COMBINES),
    ):
        for value in answers.get(qid_, []):
            ex.relate(model_id, relation, ex.resolve(value, K.MATHEMATICAL_MODEL))

    if publication_id is not None:
        ex.relate(publication_id, RelationKind.USES, model_id)


# ---------------------------------------------------------------------------
# persistence

def session_to_dict(session: DocumentationSession) -> dict:
    return {
        "schema": SESSION_SCHEMA,
        "session_id": session.session_id,
        "template_version": session.template_version,
        "status": session.status,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "answers": session.answers,
        "rules_attachment": session.rules_attachment,
        "export_record": session.export_record,
    }


def save_session(session: DocumentationSession) -> bytes:
    return (json.dumps(session_to_dict(session), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()


def load_session(data: bytes, template: QuestionnaireTemplate) -> DocumentationSession:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SESSION_SCHEMA:
        raise SchemaViolation(f"unknown session schema {doc.get('schema')!r}")
    if doc.get("template_version") != template.version:
        raise VersionMismatch(
            f"session uses template {doc.get('template_version')!r}, engine has {template.version!r}"
        )
    return session_from_dict(doc, template)


def session_from_dict(doc: dict, template: QuestionnaireTemplate) -> DocumentationSession:
    answers = doc.get("answers")
    if not isinstance(answers, dict):
        raise SchemaViolation("answers must be an object")
    questions = template.questions()
    for qid in answers:
        if qid not in questions:
            raise SchemaViolation(f"answer for unknown question {qid!r}")
    status = doc.get("status", "draft")
    if status not in ("draft", "complete", "exported"):
        raise SchemaViolation(f"unknown status {status!r}")
    if status == "exported" and not doc.get("export_record"):
        raise SchemaViolation("exported session lacks an export record")
    session_id = doc.get("session_id")
    if not isinstance(session_id, str) or not session_id:
        raise SchemaViolation("session_id must be a nonempty string")
    return DocumentationSession(
        session_id=session_id,
        template_version=doc["template_version"],
        answers=dict(answers),
        status=status,
        created_at=str(doc.get("created_at", "")),
        updated_at=str(doc.get("updated_at", "")),
        rules_attachment=doc.get("rules_attachment"),
        export_record=doc.get("export_record"),
    )
