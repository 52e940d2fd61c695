"""External-metadata resolution: DOI citation lookup and catalog-style
entity search.

Offline mode reads JSON fixtures from a directory and never touches
the network; the optional online backend maps a generic citation-JSON
endpoint.  Lookups are cached with a capacity/TTL bound and unknown
DOIs resolve to None rather than an error, so questionnaire flows can
always continue.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import quote

from .errors import DomainError


class InvalidDoi(DomainError):
    code = "invalid_doi"


class FixtureCorrupt(DomainError):
    code = "fixture_corrupt"


class NetworkError(DomainError):
    code = "network_error"


_DOI_RE = re.compile(r"10\.\d{4,9}(\.\d+)*/\S+")
_PREFIX_RE = re.compile(r"^(https?://(dx\.)?doi\.org/|doi:)", re.IGNORECASE)

EXTERNAL_SOURCES = ("wikidata-like", "swmath-like", "zbmath-like")


def normalize_doi(text: str) -> str:
    """Strip URL and "doi:" prefixes, trim, lowercase; idempotent."""
    doi = _PREFIX_RE.sub("", text.strip()).strip().lower()
    if not _DOI_RE.fullmatch(doi):
        raise InvalidDoi(f"{text!r} is not a DOI")
    return doi


@dataclass(frozen=True)
class PublicationMeta:
    doi: str
    title: str
    authors: tuple[str, ...]
    year: int
    venue: str

    def to_dict(self) -> dict:
        return {
            "doi": self.doi,
            "title": self.title,
            "authors": list(self.authors),
            "year": self.year,
            "venue": self.venue,
        }


@dataclass(frozen=True)
class ExternalCandidate:
    source: str  # one of EXTERNAL_SOURCES
    external_id: str
    label: str
    description: str = ""
    kind: str = ""

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "external_id": self.external_id,
            "label": self.label,
            "description": self.description,
            "kind": self.kind,
        }


@dataclass
class ResolverConfig:
    mode: str = "offline"  # offline | online
    fixtures_path: Optional[Path] = None
    endpoint_url: str = ""
    timeout: float = 5.0
    cache_capacity: int = 256
    cache_ttl: float = 3600.0

    def __post_init__(self):
        if self.mode not in ("offline", "online"):
            raise InvalidDoi(f"unknown resolver mode {self.mode!r}")
        if self.fixtures_path is not None:
            self.fixtures_path = Path(self.fixtures_path)


class Resolver:
    """Shareable, internally synchronized metadata resolver.

    ``http_get`` is injectable so tests can prove offline mode issues
    zero network calls; the default implementation imports httpx only
    when the online path actually runs.
    """

    def __init__(self, config: ResolverConfig, http_get: Optional[Callable] = None):
        self.config = config
        self._http_get = http_get
        self._cache: dict[str, tuple[float, Optional[PublicationMeta]]] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}
        self.fixture_reads = 0
        self.network_calls = 0
        self.last_warning: Optional[str] = None

    # -- DOI resolution ------------------------------------------------------

    def resolve_doi(self, doi: str) -> Optional[PublicationMeta]:
        doi = normalize_doi(doi)
        now = time.monotonic()
        with self._lock:
            hit = self._cache.get(doi)
            if hit is not None and now - hit[0] <= self.config.cache_ttl:
                return hit[1]
            key_lock = self._key_locks.setdefault(doi, threading.Lock())
        with key_lock:  # at most one in-flight fetch per key
            with self._lock:
                hit = self._cache.get(doi)
                if hit is not None and now - hit[0] <= self.config.cache_ttl:
                    return hit[1]
            meta = self._fetch(doi)
            with self._lock:
                if len(self._cache) >= self.config.cache_capacity:
                    oldest = min(self._cache, key=lambda k: self._cache[k][0])
                    del self._cache[oldest]
                self._cache[doi] = (time.monotonic(), meta)
        return meta

    def _fetch(self, doi: str) -> Optional[PublicationMeta]:
        if self.config.mode == "offline":
            return self._fetch_fixture(doi)
        return self._fetch_online(doi)

    def _fetch_fixture(self, doi: str) -> Optional[PublicationMeta]:
        root = self.config.fixtures_path
        if root is None:
            return None
        path = root / "doi" / (quote(doi, safe="") + ".json")
        if not path.exists():
            return None
        self.fixture_reads += 1
        try:
            raw = json.loads(path.read_text("utf-8"))
            return self._meta_from_dict(raw)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FixtureCorrupt(f"fixture {path.name}: {exc}") from None

    def _fetch_online(self, doi: str) -> Optional[PublicationMeta]:
        get = self._http_get or _default_http_get
        url = self.config.endpoint_url.rstrip("/") + "/" + doi
        self.network_calls += 1
        try:
            status, payload = get(url, timeout=self.config.timeout)
        except TimeoutError:
            self.last_warning = f"timeout resolving {doi}"
            return None
        except OSError as exc:
            raise NetworkError(f"fetching {url}: {exc}") from None
        if status == 404:
            return None
        if status != 200:
            raise NetworkError(f"endpoint returned status {status} for {doi}")
        try:
            return self._meta_from_dict(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"malformed citation JSON for {doi}: {exc}") from None

    @staticmethod
    def _meta_from_dict(raw: dict) -> PublicationMeta:
        title = raw["title"]
        if not title:
            raise ValueError("title must be nonempty")
        return PublicationMeta(
            doi=normalize_doi(raw["doi"]),
            title=title,
            authors=tuple(raw.get("authors", ())),
            year=int(raw.get("year", 0)),
            venue=raw.get("venue", ""),
        )

    # -- external search -----------------------------------------------------

    def search_external(self, label: str, kind: str = "") -> list[ExternalCandidate]:
        """Case-insensitive label-prefix search over the per-source
        fixture catalogs; degrades to empty on any gap."""
        if not label:
            return []
        root = self.config.fixtures_path
        if root is None:
            return []
        prefix = label.lower()
        hits = []
        for source in EXTERNAL_SOURCES:
            path = root / "external" / f"{source}.json"
            if not path.exists():
                continue
            try:
                entries = json.loads(path.read_text("utf-8"))
            except json.JSONDecodeError:
                continue
            for entry in entries:
                entry_label = str(entry.get("label", ""))
                if not entry_label.lower().startswith(prefix):
                    continue
                entry_kind = str(entry.get("kind", ""))
                if kind and entry_kind and entry_kind != kind:
                    continue
                hits.append(
                    ExternalCandidate(
                        source=source,
                        external_id=str(entry.get("id", "")),
                        label=entry_label,
                        description=str(entry.get("description", "")),
                        kind=entry_kind,
                    )
                )
        return sorted(hits, key=lambda c: (c.source, c.external_id))


def _default_http_get(url: str, timeout: float):
    import httpx

    try:
        response = httpx.get(
            url, timeout=timeout, headers={"Accept": "application/vnd.citationstyles.csl+json, application/json"}
        )
    except httpx.TimeoutException:
        raise TimeoutError(url) from None
    except httpx.HTTPError as exc:
        raise OSError(str(exc)) from None
    payload = None
    if response.status_code == 200:
        payload = response.json()
    return response.status_code, payload
