"""Pipeline driver: config parsing, stages, command-line entry point."""

from .config import ExplainSettings, PipelineConfig, ProbeSettings, load_config
from .main import run
from .stages import STAGE_FUNCS, STAGES

__all__ = [
    "ExplainSettings",
    "PipelineConfig",
    "ProbeSettings",
    "load_config",
    "run",
    "STAGE_FUNCS",
    "STAGES",
]
