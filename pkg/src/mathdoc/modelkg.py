"""Typed knowledge graph for mathematical models and workflows.

Thirteen entity kinds: the eight model-ontology classes (model,
research field, research problem, formulation, quantity, quantity
kind, computational task, publication) plus five workflow-level kinds.
Relations carry fixed domain/range constraints; one direction per
semantic pair is stored, inverses are computed at query time.
"""

from __future__ import annotations

import copy
import json
import re
import secrets
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional
from urllib.parse import urlsplit

from .errors import DomainError

KG_SCHEMA = "mathdoc-kg/1"


class DuplicateEntity(DomainError):
    code = "duplicate_entity"


class InvalidKind(DomainError):
    code = "invalid_kind"


class DomainRangeViolation(DomainError):
    code = "domain_range_violation"


class CycleIntroduced(DomainError):
    code = "cycle_introduced"


class MissingEntity(DomainError):
    code = "missing_entity"


class WrongKind(DomainError):
    code = "wrong_kind"


class SchemaViolation(DomainError):
    code = "schema_violation"

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}", path=path)
        self.path = path


class DanglingReference(DomainError):
    code = "dangling_reference"


class InvalidIri(DomainError):
    code = "invalid_iri"


class EntityKind(str, Enum):
    RESEARCH_FIELD = "ResearchField"
    RESEARCH_PROBLEM = "ResearchProblem"
    MATHEMATICAL_MODEL = "MathematicalModel"
    MATHEMATICAL_FORMULATION = "MathematicalFormulation"
    QUANTITY = "Quantity"
    QUANTITY_KIND = "QuantityKind"
    COMPUTATIONAL_TASK = "ComputationalTask"
    PUBLICATION = "Publication"
    WORKFLOW = "Workflow"
    METHOD = "Method"
    SOFTWARE = "Software"
    DATASET = "Dataset"
    HARDWARE = "Hardware"


class RelationKind(str, Enum):
    ADDRESSES_PROBLEM = "addressesProblem"
    PROBLEM_IN_FIELD = "problemInField"
    FORMALIZED_BY = "formalizedBy"
    CONTAINS_QUANTITY = "containsQuantity"
    HAS_QUANTITY_KIND = "hasQuantityKind"
    APPLIES_MODEL = "appliesModel"
    TASK_FORMULATION = "taskFormulation"
    INPUT_QUANTITY = "inputQuantity"
    OUTPUT_QUANTITY = "outputQuantity"
    INVENTS = "invents"
    STUDIES = "studies"
    SURVEYS = "surveys"
    USES = "uses"
    GENERALIZES = "generalizes"
    COMBINES = "combines"
    WORKFLOW_USES_MODEL = "workflowUsesModel"
    WORKFLOW_USES_METHOD = "workflowUsesMethod"
    WORKFLOW_USES_SOFTWARE = "workflowUsesSoftware"
    WORKFLOW_INPUT_DATA = "workflowInputData"
    WORKFLOW_OUTPUT_DATA = "workflowOutputData"
    WORKFLOW_ON_HARDWARE = "workflowOnHardware"
    WORKFLOW_IN_FIELD = "workflowInField"
    WORKFLOW_PUBLICATION = "workflowPublication"


K = EntityKind
R = RelationKind

# relation name -> (domain kind, range kind)
RELATION_TABLE: dict[RelationKind, tuple[EntityKind, EntityKind]] = {
    R.ADDRESSES_PROBLEM: (K.MATHEMATICAL_MODEL, K.RESEARCH_PROBLEM),
    R.PROBLEM_IN_FIELD: (K.RESEARCH_PROBLEM, K.RESEARCH_FIELD),
    R.FORMALIZED_BY: (K.MATHEMATICAL_MODEL, K.MATHEMATICAL_FORMULATION),
    R.CONTAINS_QUANTITY: (K.MATHEMATICAL_FORMULATION, K.QUANTITY),
    R.HAS_QUANTITY_KIND: (K.QUANTITY, K.QUANTITY_KIND),
    R.APPLIES_MODEL: (K.COMPUTATIONAL_TASK, K.MATHEMATICAL_MODEL),
    R.TASK_FORMULATION: (K.COMPUTATIONAL_TASK, K.MATHEMATICAL_FORMULATION),
    R.INPUT_QUANTITY: (K.COMPUTATIONAL_TASK, K.QUANTITY),
    R.OUTPUT_QUANTITY: (K.COMPUTATIONAL_TASK, K.QUANTITY),
    R.INVENTS: (K.PUBLICATION, K.MATHEMATICAL_MODEL),
    R.STUDIES: (K.PUBLICATION, K.MATHEMATICAL_MODEL),
    R.SURVEYS: (K.PUBLICATION, K.MATHEMATICAL_MODEL),
    R.USES: (K.PUBLICATION, K.MATHEMATICAL_MODEL),
    # generalizes(A -> B): A is the generalization of B
    R.GENERALIZES: (K.MATHEMATICAL_MODEL, K.MATHEMATICAL_MODEL),
    R.COMBINES: (K.MATHEMATICAL_MODEL, K.MATHEMATICAL_MODEL),
    R.WORKFLOW_USES_MODEL: (K.WORKFLOW, K.MATHEMATICAL_MODEL),
    R.WORKFLOW_USES_METHOD: (K.WORKFLOW, K.METHOD),
    R.WORKFLOW_USES_SOFTWARE: (K.WORKFLOW, K.SOFTWARE),
    R.WORKFLOW_INPUT_DATA: (K.WORKFLOW, K.DATASET),
    R.WORKFLOW_OUTPUT_DATA: (K.WORKFLOW, K.DATASET),
    R.WORKFLOW_ON_HARDWARE: (K.WORKFLOW, K.HARDWARE),
    R.WORKFLOW_IN_FIELD: (K.WORKFLOW, K.RESEARCH_FIELD),
    R.WORKFLOW_PUBLICATION: (K.WORKFLOW, K.PUBLICATION),
}

# query-time inverse readings for the "in" direction
INVERSE_READING: dict[RelationKind, str] = {
    R.GENERALIZES: "specializes",
    R.FORMALIZED_BY: "formalizes",
    R.CONTAINS_QUANTITY: "quantityIn",
    R.APPLIES_MODEL: "modelAppliedBy",
}

EXTERNAL_ID_SCHEMES = ("doi", "wikidata", "swmath", "zbmath", "mardi")

DedupPolicy = str  # "reuse" | "strict" | "force"
_POLICIES = ("reuse", "strict", "force")


@dataclass
class Entity:
    id: str
    kind: EntityKind
    label: str
    description: str = ""
    external_ids: dict[str, str] = field(default_factory=dict)
    attributes: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "label": self.label,
            "description": self.description,
            "external_ids": dict(sorted(self.external_ids.items())),
            "attributes": dict(sorted(self.attributes.items())),
        }


_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def _encode_base32(value: int, length: int) -> str:
    chars = []
    for _ in range(length):
        chars.append(_CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def ulid_factory(clock=time.time, randbits=None) -> Callable[[], str]:
    """ULID-style 26-char id minter; clock and randomness injectable
    so fixtures can be reproduced bit for bit."""
    if randbits is None:
        randbits = lambda n: secrets.randbits(n)

    def mint() -> str:
        ts = int(clock() * 1000) & ((1 << 48) - 1)
        return _encode_base32(ts, 10) + _encode_base32(randbits(80), 16)

    return mint


def sequential_id_factory(prefix: str = "00000000000000000000000000") -> Callable[[], str]:
    """Deterministic minter for tests and golden fixtures."""
    counter = 0

    def mint() -> str:
        nonlocal counter
        counter += 1
        suffix = _encode_base32(counter, 6)
        return (prefix + suffix)[-26:].rjust(26, "0")

    return mint


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: str


@dataclass(frozen=True)
class GraphReport:
    findings: tuple[Finding, ...]

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "warning")

    def empty(self) -> bool:
        return not self.findings


class KnowledgeGraph:
    """In-memory typed graph; single-writer, multiple-reader contract.

    Every mutating method leaves the graph valid (no dangling
    endpoints, domain/range table satisfied, generalizes acyclic) and
    bumps the version counter.
    """

    def __init__(self, id_factory: Optional[Callable[[], str]] = None):
        self.entities: dict[str, Entity] = {}
        self.relations: set[tuple[str, RelationKind, str]] = set()
        self.version = 0
        self._mint = id_factory or ulid_factory()

    # -- mutations ---------------------------------------------------------

    def create_entity(
        self,
        kind: EntityKind | str,
        label: str,
        description: str = "",
        external_ids: Optional[dict[str, str]] = None,
        attributes: Optional[dict[str, str]] = None,
        dedup_policy: DedupPolicy = "reuse",
    ) -> str:
        kind = self._coerce_kind(kind)
        if not label:
            raise InvalidKind("entity label must be nonempty")
        if dedup_policy not in _POLICIES:
            raise InvalidKind(f"unknown dedup policy {dedup_policy!r}")
        external_ids = dict(external_ids or {})
        for scheme, value in external_ids.items():
            if not value:
                raise InvalidKind(f"external id value for scheme {scheme!r} must be nonempty")
        match = self._find_duplicate(kind, label, external_ids)
        if match is not None:
            if dedup_policy == "reuse":
                return match.id
            if dedup_policy == "strict":
                raise DuplicateEntity(
                    f"{kind.value} matching label {label!r} or an external id already exists",
                    existing_id=match.id,
                )
        entity_id = self._mint()
        while entity_id in self.entities:  # ids are never reused
            entity_id = self._mint()
        self.entities[entity_id] = Entity(
            entity_id, kind, label, description, external_ids, dict(attributes or {})
        )
        self.version += 1
        return entity_id

    def _find_duplicate(
        self, kind: EntityKind, label: str, external_ids: dict[str, str]
    ) -> Optional[Entity]:
        candidates = sorted(
            (e for e in self.entities.values() if e.kind == kind), key=lambda e: e.id
        )
        for entity in candidates:
            for scheme, value in external_ids.items():
                if entity.external_ids.get(scheme) == value:
                    return entity
        for entity in candidates:
            if entity.label == label:
                return entity
        return None

    def add_relation(self, src: str, kind: RelationKind | str, dst: str) -> None:
        kind = self._coerce_relation(kind)
        source = self.entities.get(src)
        target = self.entities.get(dst)
        if source is None:
            raise MissingEntity(f"no entity with id {src!r}")
        if target is None:
            raise MissingEntity(f"no entity with id {dst!r}")
        domain, range_ = RELATION_TABLE[kind]
        if source.kind != domain or target.kind != range_:
            raise DomainRangeViolation(
                f"{kind.value} requires {domain.value} -> {range_.value}, "
                f"got {source.kind.value} -> {target.kind.value}"
            )
        triple = (src, kind, dst)
        if triple in self.relations:
            return  # duplicate insert is a no-op
        if kind is R.GENERALIZES and self._reaches(dst, src, R.GENERALIZES):
            raise CycleIntroduced(
                f"generalizes({src} -> {dst}) would close a cycle"
            )
        self.relations.add(triple)
        self.version += 1

    def _reaches(self, start: str, goal: str, kind: RelationKind) -> bool:
        if start == goal:
            return True
        stack = [start]
        visited = {start}
        while stack:
            node = stack.pop()
            for s, k, d in self.relations:
                if k is kind and s == node and d not in visited:
                    if d == goal:
                        return True
                    visited.add(d)
                    stack.append(d)
        return False

    # -- queries -----------------------------------------------------------

    def get(self, entity_id: str) -> Entity:
        entity = self.entities.get(entity_id)
        if entity is None:
            raise MissingEntity(f"no entity with id {entity_id!r}")
        return entity

    def find_entities(
        self,
        kind: Optional[EntityKind | str] = None,
        label_substring: Optional[str] = None,
        external_id: Optional[str] = None,
    ) -> list[Entity]:
        kind = self._coerce_kind(kind) if kind is not None else None
        needle = label_substring.lower() if label_substring else None
        scheme = value = None
        if external_id:
            if ":" in external_id:
                scheme, value = external_id.split(":", 1)
            else:
                value = external_id
        hits = []
        for entity in self.entities.values():
            if kind is not None and entity.kind != kind:
                continue
            if needle is not None and needle not in entity.label.lower():
                continue
            if value is not None:
                ids = entity.external_ids
                if scheme is not None:
                    if ids.get(scheme) != value:
                        continue
                elif value not in ids.values():
                    continue
            hits.append(entity)
        return sorted(hits, key=lambda e: (e.label, e.id))

    def neighbors(
        self,
        entity_id: str,
        direction: str = "out",
        relation: Optional[RelationKind | str] = None,
    ) -> list[tuple[RelationKind, Entity]]:
        self.get(entity_id)
        if direction not in ("out", "in", "both"):
            raise InvalidKind(f"direction must be out, in or both, got {direction!r}")
        relation = self._coerce_relation(relation) if relation is not None else None
        found = []
        for s, k, d in self.relations:
            if relation is not None and k is not relation:
                continue
            if direction in ("out", "both") and s == entity_id:
                found.append((k, self.entities[d]))
            if direction in ("in", "both") and d == entity_id:
                found.append((k, self.entities[s]))
        return sorted(found, key=lambda pair: (pair[0].value, pair[1].label, pair[1].id))

    def model_card(self, model_id: str) -> dict:
        """Aggregated traversal view of a model's ontology neighborhood."""
        entity = self.get(model_id)
        if entity.kind is not K.MATHEMATICAL_MODEL:
            raise WrongKind(f"{model_id} is a {entity.kind.value}, not a MathematicalModel")

        def brief(e: Entity) -> dict:
            return {"id": e.id, "kind": e.kind.value, "label": e.label}

        problems = []
        for _, problem in self.neighbors(model_id, "out", R.ADDRESSES_PROBLEM):
            fields = [brief(f) for _, f in self.neighbors(problem.id, "out", R.PROBLEM_IN_FIELD)]
            problems.append({**brief(problem), "fields": fields})

        formulations = []
        for _, formulation in self.neighbors(model_id, "out", R.FORMALIZED_BY):
            quantities = []
            for _, quantity in self.neighbors(formulation.id, "out", R.CONTAINS_QUANTITY):
                kinds = [brief(qk) for _, qk in self.neighbors(quantity.id, "out", R.HAS_QUANTITY_KIND)]
                quantities.append({**brief(quantity), "quantity_kinds": kinds})
            entry = {**brief(formulation), "quantities": quantities}
            if "formula" in formulation.attributes:
                entry["formula"] = formulation.attributes["formula"]
            formulations.append(entry)

        tasks = []
        for _, task in self.neighbors(model_id, "in", R.APPLIES_MODEL):
            tasks.append(
                {
                    **brief(task),
                    "formulations": [brief(f) for _, f in self.neighbors(task.id, "out", R.TASK_FORMULATION)],
                    "input_quantities": [brief(q) for _, q in self.neighbors(task.id, "out", R.INPUT_QUANTITY)],
                    "output_quantities": [brief(q) for _, q in self.neighbors(task.id, "out", R.OUTPUT_QUANTITY)],
                }
            )

        publications = {}
        for role in (R.INVENTS, R.STUDIES, R.SURVEYS, R.USES):
            pubs = [brief(p) for _, p in self.neighbors(model_id, "in", role)]
            if pubs:
                publications[role.value] = pubs

        related = {
            "generalizes": [brief(m) for _, m in self.neighbors(model_id, "out", R.GENERALIZES)],
            # inverse reading of stored generalizes edges
            INVERSE_READING[R.GENERALIZES]: [
                brief(m) for _, m in self.neighbors(model_id, "in", R.GENERALIZES)
            ],
            "combines": [brief(m) for _, m in self.neighbors(model_id, "out", R.COMBINES)],
            "combined_by": [brief(m) for _, m in self.neighbors(model_id, "in", R.COMBINES)],
        }

        return {
            "model": self.get(model_id).to_dict(),
            "problems": problems,
            "formulations": formulations,
            "tasks": tasks,
            "publications": publications,
            "related_models": related,
        }

    # -- validation ---------------------------------------------------------

    def validate(self) -> GraphReport:
        findings: list[Finding] = []
        for s, k, d in sorted(self.relations, key=lambda t: (t[0], t[1].value, t[2])):
            if s not in self.entities or d not in self.entities:
                findings.append(Finding("error", "dangling_reference", f"{k.value} references a missing entity", f"{s}->{d}"))
                continue
            domain, range_ = RELATION_TABLE[k]
            if self.entities[s].kind != domain or self.entities[d].kind != range_:
                findings.append(
                    Finding(
                        "error",
                        "domain_range_violation",
                        f"{k.value} requires {domain.value} -> {range_.value}",
                        f"{s}->{d}",
                    )
                )
        findings.extend(self._generalizes_cycles())
        for entity in sorted(self.entities.values(), key=lambda e: e.id):
            if entity.kind is K.QUANTITY:
                has_kind = any(
                    s == entity.id and k is R.HAS_QUANTITY_KIND for s, k, _ in self.relations
                )
                if not has_kind:
                    findings.append(
                        Finding("warning", "quantity_without_kind", f"quantity {entity.label!r} has no quantity kind", entity.id)
                    )
        return GraphReport(tuple(findings))

    def _generalizes_cycles(self) -> list[Finding]:
        edges: dict[str, list[str]] = {}
        for s, k, d in self.relations:
            if k is R.GENERALIZES:
                edges.setdefault(s, []).append(d)
        findings = []
        state: dict[str, int] = {}  # 1 = in progress, 2 = done

        def visit(node: str, trail: list[str]) -> None:
            state[node] = 1
            for nxt in sorted(edges.get(node, ())):
                if state.get(nxt) == 1:
                    cycle = trail[trail.index(nxt):] + [nxt] if nxt in trail else [node, nxt]
                    findings.append(
                        Finding("error", "generalizes_cycle", "generalizes cycle: " + " -> ".join(cycle), nxt)
                    )
                elif state.get(nxt) is None:
                    visit(nxt, trail + [nxt])
            state[node] = 2

        for node in sorted(edges):
            if state.get(node) is None:
                visit(node, [node])
        return findings

    # -- snapshots (all-or-nothing mutations) --------------------------------

    def snapshot(self) -> dict:
        return {
            "entities": copy.deepcopy(self.entities),
            "relations": set(self.relations),
            "version": self.version,
        }

    def restore(self, snap: dict) -> None:
        self.entities = snap["entities"]
        self.relations = snap["relations"]
        self.version = snap["version"]

    # -- helpers -------------------------------------------------------------

    @staticmethod
    def _coerce_kind(kind: EntityKind | str) -> EntityKind:
        if isinstance(kind, EntityKind):
            return kind
        try:
            return EntityKind(kind)
        except ValueError:
            raise InvalidKind(f"unknown entity kind {kind!r}") from None

    @staticmethod
    def _coerce_relation(kind: RelationKind | str) -> RelationKind:
        if isinstance(kind, RelationKind):
            return kind
        try:
            return RelationKind(kind)
        except ValueError:
            raise InvalidKind(f"unknown relation kind {kind!r}") from None


# ---------------------------------------------------------------------------
# serialization

def export_json(kg: KnowledgeGraph) -> bytes:
    """Canonical JSON: entities sorted by id, relations sorted as
    triples, stable key order.  Byte-identical across runs."""
    doc = {
        "schema": KG_SCHEMA,
        "entities": [kg.entities[i].to_dict() for i in sorted(kg.entities)],
        "relations": [
            [s, k.value, d]
            for s, k, d in sorted(kg.relations, key=lambda t: (t[0], t[1].value, t[2]))
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()


def import_json(data: bytes, id_factory: Optional[Callable[[], str]] = None) -> KnowledgeGraph:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("document must be an object")
    if doc.get("schema") != KG_SCHEMA:
        raise SchemaViolation(f"unknown schema {doc.get('schema')!r}", "$.schema")
    kg = KnowledgeGraph(id_factory=id_factory)
    entities = doc.get("entities")
    if not isinstance(entities, list):
        raise SchemaViolation("must be a list", "$.entities")
    for idx, raw in enumerate(entities):
        path = f"$.entities[{idx}]"
        if not isinstance(raw, dict):
            raise SchemaViolation("entity must be an object", path)
        try:
            kind = EntityKind(raw["kind"])
        except (KeyError, ValueError):
            raise SchemaViolation(f"unknown entity kind {raw.get('kind')!r}", f"{path}.kind") from None
        entity_id = raw.get("id")
        label = raw.get("label")
        if not isinstance(entity_id, str) or not entity_id:
            raise SchemaViolation("id must be a nonempty string", f"{path}.id")
        if entity_id in kg.entities:
            raise SchemaViolation(f"duplicate entity id {entity_id!r}", f"{path}.id")
        if not isinstance(label, str) or not label:
            raise SchemaViolation("label must be a nonempty string", f"{path}.label")
        description = raw.get("description", "")
        if not isinstance(description, str):
            raise SchemaViolation("description must be a string", f"{path}.description")
        external_ids = raw.get("external_ids", {})
        attributes = raw.get("attributes", {})
        for name, mapping in (("external_ids", external_ids), ("attributes", attributes)):
            if not isinstance(mapping, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
            ):
                raise SchemaViolation("must map strings to strings", f"{path}.{name}")
        for scheme, value in external_ids.items():
            if not value:
                raise SchemaViolation(f"external id {scheme!r} is empty", f"{path}.external_ids")
        kg.entities[entity_id] = Entity(entity_id, kind, label, description, dict(external_ids), dict(attributes))
    relations = doc.get("relations")
    if not isinstance(relations, list):
        raise SchemaViolation("must be a list", "$.relations")
    for idx, raw in enumerate(relations):
        path = f"$.relations[{idx}]"
        if not isinstance(raw, list) or len(raw) != 3:
            raise SchemaViolation("relation must be a [src, kind, dst] triple", path)
        src, kind_name, dst = raw
        try:
            kind = RelationKind(kind_name)
        except ValueError:
            raise SchemaViolation(f"unknown relation name {kind_name!r}", f"{path}[1]") from None
        if src not in kg.entities:
            raise DanglingReference(f"{path}: source {src!r} is not a declared entity")
        if dst not in kg.entities:
            raise DanglingReference(f"{path}: target {dst!r} is not a declared entity")
        kg.relations.add((src, kind, dst))
    report = kg.validate()
    if report.errors():
        first = report.errors()[0]
        raise SchemaViolation(f"{first.code}: {first.message}", "$.relations")
    return kg


_RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
_RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
_RDFS_COMMENT = "http://www.w3.org/2000/01/rdf-schema#comment"


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def export_triples(kg: KnowledgeGraph, base_iri: str) -> bytes:
    """Line-oriented triple export; three literal lines per entity
    (type, label, description) plus one line per relation."""
    parts = urlsplit(base_iri)
    if not parts.scheme or not (parts.netloc or parts.path):
        raise InvalidIri(f"{base_iri!r} is not an absolute IRI")
    if re.search(r'[\s<>"{}|\\^`]', base_iri):
        raise InvalidIri(f"{base_iri!r} contains characters not allowed in an IRI")
    base = base_iri if base_iri.endswith(("/", "#")) else base_iri + "/"

    def subject(entity: Entity) -> str:
        return f"{base}{entity.kind.value}/{entity.id}"

    lines = []
    for entity in kg.entities.values():
        s = subject(entity)
        lines.append(f"<{s}> <{_RDF_TYPE}> <{base}kind/{entity.kind.value}> .")
        lines.append(f'<{s}> <{_RDFS_LABEL}> "{_escape_literal(entity.label)}" .')
        lines.append(f'<{s}> <{_RDFS_COMMENT}> "{_escape_literal(entity.description)}" .')
    for src, kind, dst in kg.relations:
        s = subject(kg.entities[src])
        o = subject(kg.entities[dst])
        lines.append(f"<{s}> <{base}relation/{kind.value}> <{o}> .")
    lines.sort()
    return ("\n".join(lines) + "\n").encode() if lines else b""
