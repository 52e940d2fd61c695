"""Service configuration: JSON file plus MATHDOC_* environment overrides."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError

from ..errors import DomainError


class BadConfig(DomainError):
    code = "bad_config"


class BindFailure(DomainError):
    code = "bind_failure"


class ServiceConfig(BaseModel):
    host: str = "127.0.0.1"
    port: int = Field(default=8080, ge=1, le=65535)
    data_dir: Path = Path("./mathdoc_data")
    fixtures_path: Optional[Path] = None
    resolver_mode: str = "offline"
    resolver_endpoint: str = ""
    max_upload_bytes: int = Field(default=1_048_576, gt=0)
    job_retention: int = Field(default=50, gt=0)
    max_concurrent_jobs: int = Field(default=2, gt=0)
    webui_dist: Optional[Path] = None

    def ensure_dirs(self) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)


_ENV_PREFIX = "MATHDOC_"


def load_config(path: Optional[Path] = None, env: Optional[dict] = None) -> ServiceConfig:
    """Config file values, overridden by MATHDOC_<FIELD> variables."""
    values: dict = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text("utf-8"))
        except FileNotFoundError:
            raise BadConfig(f"config file {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(values, dict):
            raise BadConfig(f"config file {path} must hold a JSON object")
    env = os.environ if env is None else env
    for field_name in ServiceConfig.model_fields:
        raw = env.get(_ENV_PREFIX + field_name.upper())
        if raw is not None:
            values[field_name] = raw
    try:
        return ServiceConfig(**values)
    except ValidationError as exc:
        raise BadConfig(f"invalid configuration: {exc}") from None
