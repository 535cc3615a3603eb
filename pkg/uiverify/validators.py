import base64
import binascii
import re
from datetime import date
from typing import Annotated, Any

from pydantic import AfterValidator

from uiverify.logging_config import logger


class DatatypeValidator:
    """Identifier and data property value validation."""

    IDENTIFIER_PATTERN = re.compile(r'[A-Za-z][A-Za-z0-9_\-]*')
    BASE64_PATTERN = re.compile(r'[A-Za-z0-9+/]*={0,2}')
    HEX_PATTERN = re.compile(r'(?:[0-9A-Fa-f]{2})*')

    @staticmethod
    def validate_identifier(value: Any) -> bool:
        """Class, property and behavior ids: a letter followed by letters, digits, _ or -."""
        if not value or not isinstance(value, str):
            return False
        return bool(DatatypeValidator.IDENTIFIER_PATTERN.fullmatch(value))

    @staticmethod
    def validate_string(value: Any) -> bool:
        return isinstance(value, str)

    @staticmethod
    def validate_base64(value: Any) -> bool:
        """Base64 alphabet, padded to a multiple of four characters."""
        if not isinstance(value, str) or len(value) % 4:
            return False
        if not DatatypeValidator.BASE64_PATTERN.fullmatch(value):
            return False
        try:
            base64.b64decode(value, validate=True)
        except (binascii.Error, ValueError):
            return False
        return True

    @staticmethod
    def validate_hex(value: Any) -> bool:
        """Even-length hexadecimal string."""
        if not isinstance(value, str):
            return False
        return bool(DatatypeValidator.HEX_PATTERN.fullmatch(value))

    @staticmethod
    def validate_integer(value: Any) -> bool:
        return isinstance(value, int) and not isinstance(value, bool)

    @staticmethod
    def validate_boolean(value: Any) -> bool:
        return isinstance(value, bool)

    @staticmethod
    def validate_date(value: Any) -> bool:
        """ISO 8601 calendar date (YYYY-MM-DD)."""
        if not isinstance(value, str):
            return False
        try:
            date.fromisoformat(value)
        except ValueError:
            return False
        return True

    CHECKS = {
        'String': 'validate_string',
        'Base64Binary': 'validate_base64',
        'HexBinary': 'validate_hex',
        'Integer': 'validate_integer',
        'Boolean': 'validate_boolean',
        'Date': 'validate_date',
    }

    @classmethod
    def conforms(cls, datatype: str, value: Any) -> bool:
        """Check a property value against a datatype name."""
        check = cls.CHECKS.get(datatype)
        if check is None:
            logger.warning(f"No validator for datatype {datatype}")
            return False
        return getattr(cls, check)(value)


validator = DatatypeValidator()


def _checked_identifier(value: str) -> str:
    if not validator.validate_identifier(value):
        raise ValueError(f"invalid identifier {value!r}")
    return value


# Document field type for class, property and behavior ids
Identifier = Annotated[str, AfterValidator(_checked_identifier)]
