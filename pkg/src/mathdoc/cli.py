"""Command-line client for the mathdoc service.

Every subcommand except ``serve`` and ``kg import`` drives the HTTP
API: against a remote service when --url (or MATHDOC_URL) is given,
otherwise against an embedded in-process application sharing the same
data directory, so results are identical either way.  ``kg import``
replaces the local store and therefore only works embedded.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from pathlib import Path

from .errors import DomainError
from .service.config import ServiceConfig, load_config


class _ApiError(Exception):
    def __init__(self, payload: dict, status: int):
        super().__init__(payload.get("message", "request failed"))
        self.payload = payload
        self.status = status


class Client:
    """Uniform .request over a remote base URL or an embedded app."""

    def __init__(self, url: str | None, config: ServiceConfig):
        if url:
            import httpx

            self._client = httpx.Client(base_url=url.rstrip("/"), timeout=60.0)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service.app import create_app

            self._client = TestClient(create_app(config))

    def request(self, method: str, path: str, **kwargs):
        response = self._client.request(method, path, **kwargs)
        if response.status_code >= 400:
            try:
                payload = response.json()
            except ValueError:
                payload = {"code": "http_error", "message": response.text}
            raise _ApiError(payload, response.status_code)
        return response


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _order_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--order",
        choices=("degrevlex", "deglex", "lex"),
        default="degrevlex",
        help="term order for the Groebner basis",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mathdoc", description=__doc__)
    parser.add_argument("--url", default=os.environ.get("MATHDOC_URL"), help="remote service base URL")
    parser.add_argument("--config", type=Path, help="service config file (embedded mode)")
    parser.add_argument("--data-dir", type=Path, help="data directory override (embedded mode)")
    sub = parser.add_subparsers(dest="command", required=True)

    mine = sub.add_parser("rulemine", help="mine logical rules from a binary CSV")
    mine.add_argument("csv", type=Path)
    _order_flag(mine)
    mine.add_argument("--json", dest="json_out", type=Path, help="write canonical rules JSON here")

    kg = sub.add_parser("kg", help="knowledge graph operations")
    kg_sub = kg.add_subparsers(dest="kg_command", required=True)
    kg_import = kg_sub.add_parser("import", help="replace the local store from a KG JSON file")
    kg_import.add_argument("file", type=Path)
    kg_export = kg_sub.add_parser("export", help="print the graph as canonical JSON or triples")
    kg_export.add_argument("--format", choices=("json", "triples"), default="json")
    kg_export.add_argument("--base-iri", default="https://example.org/mathdoc/")
    kg_sub.add_parser("validate", help="run graph validation")
    kg_find = kg_sub.add_parser("find", help="search entities")
    kg_find.add_argument("--kind")
    kg_find.add_argument("--q", help="label substring")
    kg_find.add_argument("--external-id")

    doc = sub.add_parser("doc", help="documentation sessions")
    doc_sub = doc.add_subparsers(dest="doc_command", required=True)
    doc_sub.add_parser("new", help="create a session and print its id")
    doc_answer = doc_sub.add_parser("answer", help="answer one question")
    doc_answer.add_argument("session_id")
    doc_answer.add_argument("qid")
    doc_answer.add_argument("value", help="JSON value, or a bare string")
    doc_render = doc_sub.add_parser("render", help="print the wiki markdown")
    doc_render.add_argument("session_id")
    doc_render.add_argument("--force", action="store_true", help="render a draft")
    doc_export = doc_sub.add_parser("export", help="export into the knowledge graph")
    doc_export.add_argument("session_id")
    doc_export.add_argument("--policy", default="reuse", choices=("reuse", "strict", "force"))

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", dest="serve_config", type=Path)
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)

    return parser


def _build_config(args) -> ServiceConfig:
    config = load_config(args.config)
    if args.data_dir is not None:
        config.data_dir = args.data_dir
    return config


def _cmd_rulemine(client: Client, args) -> int:
    csv_bytes = args.csv.read_bytes()
    response = client.request(
        "POST",
        "/api/analysis/jobs",
        files={"file": (args.csv.name, csv_bytes, "text/csv")},
        data={"order": args.order},
    )
    job_id = response.json()["job_id"]
    while True:
        job = client.request("GET", f"/api/analysis/jobs/{job_id}").json()
        if job["state"] in ("done", "failed"):
            break
        time.sleep(0.05)
    if job["state"] == "failed":
        raise _ApiError({"code": "job_failed", "message": job["error"]}, 400)
    rules_bytes = client.request("GET", f"/api/analysis/jobs/{job_id}/rules").content
    doc = json.loads(rules_bytes.decode("utf-8"))
    meta = doc["metadata"]
    _emit(
        f"order={meta['order']} rules={meta['rule_count']} "
        f"distinct={meta['distinct_point_count']} duplicates={meta['duplicate_count']}"
    )
    for rule in doc["rules"]:
        _emit(f"{rule['form']:<15} support={rule['support']:<6} {rule['text']}")
    if args.json_out:
        args.json_out.write_bytes(rules_bytes)
        _emit(f"wrote {args.json_out}")
    return 0


def _cmd_kg(client: Client, args, config: ServiceConfig) -> int:
    if args.kg_command == "import":
        if getattr(args, "url", None):
            raise DomainError("kg import rewrites the local store; run it without --url")
        from . import modelkg
        from .service.storage import KgStore

        graph = modelkg.import_json(args.file.read_bytes())
        config.ensure_dirs()
        KgStore(config.data_dir / "kg.json").replace(graph)
        _emit(f"imported {len(graph.entities)} entities, {len(graph.relations)} relations")
        return 0
    if args.kg_command == "export":
        response = client.request(
            "GET", "/api/kg/export", params={"format": args.format, "base_iri": args.base_iri}
        )
        sys.stdout.write(response.text)
        return 0
    if args.kg_command == "validate":
        report = client.request("GET", "/api/kg/validate").json()
        for finding in report["findings"]:
            _emit(f"{finding['severity']}: {finding['code']}: {finding['message']}")
        if report["empty"]:
            _emit("graph is valid; no findings")
        errors = [f for f in report["findings"] if f["severity"] == "error"]
        return 1 if errors else 0
    if args.kg_command == "find":
        params = {}
        if args.kind:
            params["kind"] = args.kind
        if args.q:
            params["q"] = args.q
        if args.external_id:
            params["external_id"] = args.external_id
        entities = client.request("GET", "/api/kg/entities", params=params).json()["entities"]
        for entity in entities:
            _emit(f"{entity['id']}  {entity['kind']:<24} {entity['label']}")
        return 0
    raise AssertionError(args.kg_command)


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _cmd_doc(client: Client, args) -> int:
    if args.doc_command == "new":
        payload = client.request("POST", "/api/sessions").json()
        _emit(payload["session_id"])
        return 0
    if args.doc_command == "answer":
        client.request(
            "PUT",
            f"/api/sessions/{args.session_id}/answers/{args.qid}",
            json={"value": _parse_value(args.value)},
        )
        missing = client.request(
            "GET", f"/api/sessions/{args.session_id}/completeness"
        ).json()["missing"]
        _emit(f"answered {args.qid}; {len(missing)} mandatory questions remaining")
        return 0
    if args.doc_command == "render":
        page = client.request(
            "GET",
            f"/api/sessions/{args.session_id}/wiki",
            params={"force": "true"} if args.force else None,
        ).json()
        sys.stdout.write(page["markdown"])
        return 0
    if args.doc_command == "export":
        result = client.request(
            "POST",
            f"/api/sessions/{args.session_id}/export",
            json={"dedup_policy": args.policy},
        ).json()
        report = result["export_report"]
        _emit(f"workflow: {report['workflow_id']}")
        _emit(f"created:  {len(report['created'])} entities")
        _emit(f"reused:   {len(report['reused'])} entities")
        _emit(f"relations added: {len(report['relations_added'])}")
        return 0
    raise AssertionError(args.doc_command)


def _cmd_serve(args) -> int:
    from .service.app import serve

    config = load_config(args.serve_config or args.config)
    if args.data_dir is not None:
        config.data_dir = args.data_dir
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    serve(config)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        config = _build_config(args)
        client = Client(args.url, config)
        if args.command == "rulemine":
            return _cmd_rulemine(client, args)
        if args.command == "kg":
            return _cmd_kg(client, args, config)
        if args.command == "doc":
            return _cmd_doc(client, args)
        parser.error(f"unknown command {args.command!r}")
    except _ApiError as exc:
        payload = exc.payload
        sys.stderr.write(f"error [{payload.get('code', '?')}]: {payload.get('message', '')}\n")
        return 1
    except DomainError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(f"error [file_not_found]: {exc}\n")
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
