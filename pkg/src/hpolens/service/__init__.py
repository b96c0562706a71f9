"""HTTP service: run registry, job queue with caching, FastAPI app."""
from .app import create_app
from .jobs import JobManager
from .plugins import PLUGINS, build_payload, validate_params
from .registry import RunRegistry

__all__ = ["create_app", "JobManager", "PLUGINS", "build_payload",
           "validate_params", "RunRegistry"]
