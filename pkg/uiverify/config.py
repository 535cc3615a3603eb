"""
Runtime settings read from the environment (and an optional .env file)
"""
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from uiverify.logging_config import logger

FORMATS = ('text', 'json', 'junit')


@dataclass(frozen=True)
class Settings:
    ontology_path: Optional[Path]
    output_format: str = 'text'
    workers: int = 1
    log_level: str = 'WARNING'


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return default


def load_settings(dotenv_path: Optional[str] = None) -> Settings:
    """Environment first, then .env values for anything unset."""
    load_dotenv(dotenv_path, override=False)
    ontology = os.environ.get('UIVERIFY_ONTOLOGY')
    output_format = os.environ.get('UIVERIFY_FORMAT', 'text')
    if output_format not in FORMATS:
        logger.warning(f"Unknown UIVERIFY_FORMAT {output_format!r}, using text")
        output_format = 'text'
    return Settings(
        ontology_path=Path(ontology) if ontology else None,
        output_format=output_format,
        workers=_int_env('UIVERIFY_WORKERS', 1),
        log_level=os.environ.get('LOG_LEVEL', 'WARNING'),
    )
