"""Python-version compatibility imports."""

import sys

if sys.version_info >= (3, 11):
    from enum import StrEnum
else:  # pragma: no cover - exercised only on Python 3.10
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of :class:`enum.StrEnum` (str()/format() yield the value)."""

        __str__ = str.__str__
        __format__ = str.__format__

__all__ = ["StrEnum"]
