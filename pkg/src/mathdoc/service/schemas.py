"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: dict = Field(default_factory=dict)


class HealthOut(BaseModel):
    name: str
    version: str


class AnswerIn(BaseModel):
    value: Any


class ExportIn(BaseModel):
    dedup_policy: str = "reuse"


class ExportOut(BaseModel):
    wiki_markdown: str
    export_report: dict


class CompletenessOut(BaseModel):
    missing: list[str]
    complete: bool


class SuggestOut(BaseModel):
    candidates: list[dict]


class EntityIn(BaseModel):
    kind: str
    label: str
    description: str = ""
    external_ids: dict[str, str] = Field(default_factory=dict)
    attributes: dict[str, str] = Field(default_factory=dict)
    dedup_policy: str = "reuse"


class EntityCreated(BaseModel):
    id: str
    created: bool
    entity: dict


class RelationIn(BaseModel):
    src: str
    kind: str
    dst: str


class JobCreated(BaseModel):
    job_id: str


class JobOut(BaseModel):
    job_id: str
    state: str
    order: str
    dataset_digest: str
    error: str = ""


class AttachRulesIn(BaseModel):
    job_id: str


class ValidationOut(BaseModel):
    findings: list[dict]
    empty: bool


class EntityList(BaseModel):
    entities: list[dict]


class SessionCreated(BaseModel):
    session: dict
    session_id: str


__all__ = [name for name in dir() if not name.startswith("_")]
