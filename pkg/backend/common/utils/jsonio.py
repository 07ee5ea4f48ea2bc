"""
Canonical JSON file I/O.

Every scenario, trace and report file goes through these helpers so that
identical inputs produce byte-identical files:
- keys sorted
- fixed indent (KSET_JSON_INDENT)
- trailing newline
"""
import json
import logging
from pathlib import Path
from typing import Any, Union

from django.conf import settings

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class JsonInputError(Exception):
    """Raised when an input file cannot be read or is not valid JSON"""

    def __init__(self, path: PathLike, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f'{self.path}: {reason}')


def dumps(data: Any) -> str:
    """Serialize to the canonical text form."""
    indent = getattr(settings, 'KSET_JSON_INDENT', 2)
    return json.dumps(data, indent=indent, sort_keys=True) + '\n'


def write_json(path: PathLike, data: Any) -> None:
    text = dumps(data)
    Path(path).write_text(text, encoding='utf-8')
    logger.debug(f'Wrote {len(text)} bytes to {path}')


def read_json(path: PathLike) -> Any:
    """
    Read and parse a JSON file.

    Raises:
        JsonInputError: missing/unreadable file or malformed JSON.
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise JsonInputError(path, f'cannot read file ({e})') from e

    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise JsonInputError(path, f'malformed JSON at line {e.lineno} column {e.colno}: {e.msg}') from e
