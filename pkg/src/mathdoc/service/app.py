"""FastAPI application wrapping the core modules.

Every route delegates to a library call and returns its result
unchanged, so API responses and direct module calls agree bit for bit.
Knowledge-graph mutations run through the write-through store; rule
mining runs off the request path as polled background jobs.
"""

from __future__ import annotations

import email.parser
import email.policy
import json
import socket
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .. import __version__, metafetch, modelkg, workflowdoc
from ..boolpoly import TermOrder
from ..errors import DomainError
from ..metafetch import Resolver, ResolverConfig
from . import schemas
from .config import BindFailure, ServiceConfig
from .jobs import JobManager
from .storage import KgStore, SessionStore

_STATUS_BY_CODE = {
    "missing_entity": 404,
    "unknown_question": 404,
    "not_found": 404,
    "duplicate_entity": 409,
    "digest_mismatch": 409,
    "incomplete_session": 409,
    "version_mismatch": 409,
    "payload_too_large": 413,
}


class NotFound(DomainError):
    code = "not_found"


class PayloadTooLarge(DomainError):
    code = "payload_too_large"


def _parse_multipart(content_type: str, body: bytes) -> dict[str, tuple[str, bytes]]:
    """Minimal multipart/form-data parser on top of the email package;
    returns field name -> (filename, payload)."""
    header = f"Content-Type: {content_type}\r\nMIME-Version: 1.0\r\n\r\n"
    message = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(
        header.encode("latin-1") + body
    )
    if not message.is_multipart():
        raise DomainError("expected a multipart/form-data body")
    fields: dict[str, tuple[str, bytes]] = {}
    for part in message.iter_parts():
        name = part.get_param("name", header="content-disposition")
        if not name:
            continue
        fields[name] = (part.get_filename() or "", part.get_payload(decode=True) or b"")
    return fields


def create_app(config: ServiceConfig, id_factory=None) -> FastAPI:
    """Build the application; ``id_factory`` makes minted entity ids
    reproducible for equivalence testing and fixture generation."""
    config.ensure_dirs()
    template = workflowdoc.default_template()
    store = KgStore(config.data_dir / "kg.json", id_factory=id_factory)
    sessions = SessionStore(config.data_dir / "sessions.json", template)
    resolver = Resolver(
        ResolverConfig(
            mode=config.resolver_mode,
            fixtures_path=config.fixtures_path,
            endpoint_url=config.resolver_endpoint,
        )
    )
    jobs = JobManager(max_workers=config.max_concurrent_jobs, retention=config.job_retention)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        jobs.shutdown()

    app = FastAPI(title="mathdoc", version=__version__, lifespan=lifespan)
    app.state.config = config
    app.state.store = store
    app.state.sessions = sessions
    app.state.resolver = resolver
    app.state.jobs = jobs
    app.state.template = template

    @app.exception_handler(DomainError)
    async def domain_error_handler(_: Request, exc: DomainError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        body = schemas.ErrorBody(code=exc.code, message=exc.message, detail=exc.detail)
        return JSONResponse(status_code=status, content=body.model_dump())

    # -- meta ---------------------------------------------------------------

    @app.get("/api/health", response_model=schemas.HealthOut)
    def health():
        return schemas.HealthOut(name="mathdoc", version=__version__)

    @app.get("/api/template")
    def get_template():
        return template.to_dict()

    # -- sessions -------------------------------------------------------------

    def _session(session_id: str) -> workflowdoc.DocumentationSession:
        session = sessions.get(session_id)
        if session is None:
            raise NotFound(f"no session with id {session_id!r}")
        return session

    def _session_payload(session: workflowdoc.DocumentationSession) -> dict:
        doc = workflowdoc.session_to_dict(session)
        doc["pending_suggestions"] = workflowdoc.pending_suggestion_qids(session, template)
        return doc

    @app.post("/api/sessions", response_model=schemas.SessionCreated, status_code=201)
    def create_session():
        session = workflowdoc.new_session(template)
        sessions.add(session)
        return schemas.SessionCreated(
            session=_session_payload(session), session_id=session.session_id
        )

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_payload(_session(session_id))

    @app.put("/api/sessions/{session_id}/answers/{qid}")
    def put_answer(session_id: str, qid: str, body: schemas.AnswerIn):
        session = _session(session_id)
        store.read(
            lambda kg: workflowdoc.set_answer(session, template, qid, body.value, kg=kg)
        )
        sessions.save()
        return _session_payload(session)

    @app.get("/api/sessions/{session_id}/suggest/{qid}", response_model=schemas.SuggestOut)
    def get_suggestions(session_id: str, qid: str, q: str | None = None):
        session = _session(session_id)
        candidates = store.read(
            lambda kg: workflowdoc.suggest(
                session, template, qid, kg=kg, resolver=resolver, text=q
            )
        )
        return schemas.SuggestOut(candidates=[c.to_dict() for c in candidates])

    @app.get("/api/sessions/{session_id}/completeness", response_model=schemas.CompletenessOut)
    def get_completeness(session_id: str):
        missing = workflowdoc.completeness(_session(session_id), template)
        return schemas.CompletenessOut(missing=missing, complete=not missing)

    @app.post("/api/sessions/{session_id}/export", response_model=schemas.ExportOut)
    def export_session(session_id: str, body: schemas.ExportIn):
        session = _session(session_id)
        report = store.mutate(
            lambda kg: workflowdoc.export_to_kg(
                session, template, kg, dedup_policy=body.dedup_policy, resolver=resolver
            )
        )
        sessions.save()
        page = workflowdoc.render_wiki(session, template)
        return schemas.ExportOut(wiki_markdown=page.markdown, export_report=report.to_dict())

    @app.get("/api/sessions/{session_id}/wiki")
    def session_wiki(session_id: str, force: bool = False):
        page = workflowdoc.render_wiki(_session(session_id), template, force=force)
        return {"title": page.title, "markdown": page.markdown}

    @app.put("/api/sessions/{session_id}/artifacts/rules")
    def attach_rules(session_id: str, body: schemas.AttachRulesIn):
        session = _session(session_id)
        job = jobs.get(body.job_id)
        if job is None:
            raise NotFound(f"no job with id {body.job_id!r}")
        if job.state != "done":
            raise DomainError(f"job {body.job_id} is {job.state}, not done")
        workflowdoc.attach_rules_summary(session, json.loads(job.result.decode("utf-8")))
        sessions.save()
        return _session_payload(session)

    # -- knowledge graph -------------------------------------------------------

    @app.get("/api/kg/entities", response_model=schemas.EntityList)
    def find_entities(kind: str | None = None, q: str | None = None, external_id: str | None = None):
        hits = store.read(
            lambda kg: kg.find_entities(kind=kind, label_substring=q, external_id=external_id)
        )
        return schemas.EntityList(entities=[e.to_dict() for e in hits])

    @app.get("/api/kg/entities/{entity_id}")
    def get_entity(entity_id: str):
        return store.read(lambda kg: kg.get(entity_id).to_dict())

    @app.get("/api/kg/entities/{entity_id}/card")
    def get_model_card(entity_id: str):
        return store.read(lambda kg: kg.model_card(entity_id))

    @app.post("/api/kg/entities", response_model=schemas.EntityCreated, status_code=201)
    def create_entity(body: schemas.EntityIn):
        def run(kg: modelkg.KnowledgeGraph):
            before = kg.version
            entity_id = kg.create_entity(
                body.kind,
                body.label,
                description=body.description,
                external_ids=body.external_ids,
                attributes=body.attributes,
                dedup_policy=body.dedup_policy,
            )
            return entity_id, kg.version > before, kg.get(entity_id).to_dict()

        entity_id, created, entity = store.mutate(run)
        return schemas.EntityCreated(id=entity_id, created=created, entity=entity)

    @app.post("/api/kg/relations", status_code=201)
    def add_relation(body: schemas.RelationIn):
        store.mutate(lambda kg: kg.add_relation(body.src, body.kind, body.dst))
        return {"ok": True}

    @app.get("/api/kg/validate", response_model=schemas.ValidationOut)
    def validate_graph():
        report = store.read(lambda kg: kg.validate())
        return schemas.ValidationOut(
            findings=[vars(f) for f in report.findings], empty=report.empty()
        )

    @app.get("/api/kg/export")
    def export_graph(format: str = "json", base_iri: str = "https://example.org/mathdoc/"):
        if format == "json":
            data = store.read(modelkg.export_json)
            return Response(content=data, media_type="application/json")
        if format == "triples":
            data = store.read(lambda kg: modelkg.export_triples(kg, base_iri))
            return Response(content=data, media_type="application/n-triples")
        raise DomainError(f"unknown export format {format!r}")

    # -- analysis jobs ---------------------------------------------------------

    @app.post("/api/analysis/jobs", response_model=schemas.JobCreated, status_code=202)
    async def submit_job(request: Request):
        body = await request.body()
        if len(body) > config.max_upload_bytes:
            raise PayloadTooLarge(
                f"upload exceeds {config.max_upload_bytes} bytes", limit=config.max_upload_bytes
            )
        content_type = request.headers.get("content-type", "")
        if not content_type.startswith("multipart/form-data"):
            raise DomainError("expected a multipart/form-data upload with a 'file' field")
        fields = _parse_multipart(content_type, body)
        if "file" not in fields:
            raise DomainError("multipart upload is missing the 'file' field")
        order_name = fields.get("order", ("", b"degrevlex"))[1].decode("utf-8") or "degrevlex"
        try:
            order = TermOrder(order_name)
        except ValueError:
            raise DomainError(f"unknown term order {order_name!r}") from None
        job_id = jobs.submit(fields["file"][1], order)
        return schemas.JobCreated(job_id=job_id)

    def _job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise NotFound(f"no job with id {job_id!r}")
        return job

    @app.get("/api/analysis/jobs/{job_id}", response_model=schemas.JobOut)
    def job_status(job_id: str):
        return schemas.JobOut(**_job(job_id).to_dict())

    @app.get("/api/analysis/jobs/{job_id}/rules")
    def job_rules(job_id: str):
        job = _job(job_id)
        if job.state != "done":
            raise DomainError(f"job {job_id} is {job.state}, rules are only available when done")
        return Response(content=job.result, media_type="application/json")

    _mount_webui(app, config)
    return app


def _mount_webui(app: FastAPI, config: ServiceConfig) -> None:
    dist = config.webui_dist
    if dist is None or not dist.exists():
        return
    from fastapi.staticfiles import StaticFiles

    app.mount("/ui", StaticFiles(directory=dist, html=True), name="webui")


def serve(config: ServiceConfig) -> None:
    """Run the service under uvicorn; fails fast when the port is taken."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise BindFailure(f"cannot bind {config.host}:{config.port}: {exc}") from None
    finally:
        probe.close()

    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
