"""
Shared exception hierarchy and name helpers
"""
import re
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

_WHITESPACE = re.compile(r'\s+')


def normalize_space(text: str) -> str:
    """Collapse whitespace runs to one space and strip the ends"""
    return _WHITESPACE.sub(' ', text).strip()


def fold_name(name: str) -> str:
    """Comparison key for widget, state and scenario names (case-insensitive exact match)"""
    return name.casefold()


class UiVerifyError(Exception):
    """Root of every error raised by uiverify."""


class DocumentSyntaxError(UiVerifyError):
    """A story, ontology or prototype document could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        where = [str(part) for part in (self.path, self.line, self.column) if part is not None]
        if where:
            return f"{':'.join(where)}: {self.message}"
        return self.message


class UnknownClassError(UiVerifyError, KeyError):
    def __init__(self, class_id: str):
        self.class_id = class_id
        super().__init__(class_id)

    def __str__(self) -> str:
        return f"unknown element class '{self.class_id}'"


class UnknownBehaviorError(UiVerifyError, KeyError):
    def __init__(self, behavior_id: str):
        self.behavior_id = behavior_id
        super().__init__(behavior_id)

    def __str__(self) -> str:
        return f"unknown behavior '{self.behavior_id}'"


def schema_error(error: ValidationError, path: Optional[str] = None) -> DocumentSyntaxError:
    """Report the first schema violation of a decoded document, located by its key path."""
    first = error.errors()[0]
    where = ''.join(f"[{part}]" if isinstance(part, int) else f".{part}" for part in first['loc']).lstrip('.')
    message = f"{where}: {first['msg']}" if where else first['msg']
    if error.error_count() > 1:
        message += f" (and {error.error_count() - 1} more)"
    return DocumentSyntaxError(message, path)


def read_document(path: Union[str, Path]) -> str:
    """UTF-8 text of a story, ontology or prototype file."""
    raw = Path(path).read_bytes()
    try:
        return raw.decode('utf-8')
    except UnicodeDecodeError as e:
        line = raw.count(b'\n', 0, e.start) + 1
        column = e.start - raw.rfind(b'\n', 0, e.start)
        raise DocumentSyntaxError(f"not valid UTF-8 ({e.reason})", str(path), line, column) from None
