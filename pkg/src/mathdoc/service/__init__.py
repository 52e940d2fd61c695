"""HTTP service binding the core modules: questionnaire sessions,
knowledge-graph access, rule-mining jobs, and exports."""

from .app import create_app
from .config import ServiceConfig, BadConfig, BindFailure, load_config

__all__ = ["create_app", "ServiceConfig", "BadConfig", "BindFailure", "load_config"]
