# billiard_prop/utils/csv_writer.py

import csv
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

from billiard_prop.utils.constants import SUBSTEP_INDENT
from billiard_prop.utils.exceptions import OutputError
from billiard_prop.utils.helpers import format_float

logger = logging.getLogger(__name__)


class CsvTableWriter:
    """
    Write numeric tables as CSV with a header row and a trailing metadata line.

    Floats are written with 17 significant digits so that identical runs give
    byte-identical files. The metadata line is a ``#`` comment with
    ``key=value`` pairs in insertion order.

    Parameters
    ----------
    metadata : Mapping[str, object]
        Values recorded in the trailing comment of every table.
    """

    def __init__(self, metadata: Mapping[str, object] | None = None):
        self.metadata = dict(metadata or {})

    @staticmethod
    def _cell(value) -> str:
        if isinstance(value, bool):
            return str(value).lower()
        if isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            return format_float(value)
        if hasattr(value, "item"):
            # numpy scalar
            return CsvTableWriter._cell(value.item())
        return str(value)

    def metadata_line(self, extra: Mapping[str, object] | None = None) -> str:
        items = {**self.metadata, **(extra or {})}
        fields = " ".join(f"{key}={self._cell(val)}" for key, val in items.items())
        return f"# {fields}".rstrip()

    def save_table(
        self,
        output_file: str | Path,
        header: Sequence[str],
        rows: Iterable[Sequence],
        extra_metadata: Mapping[str, object] | None = None,
    ) -> Path:
        """
        Write ``rows`` under ``header`` to ``output_file``.

        Returns
        -------
        Path
            The path that was written.

        Raises
        ------
        OutputError
            If the file cannot be created.
        """
        path = Path(output_file)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([self._cell(value) for value in row])
                handle.write(self.metadata_line(extra_metadata) + "\n")
        except OSError as e:
            logger.error(f"Error saving CSV file '{path}': {e!s}")
            raise OutputError(f"Cannot write '{path}': {e}") from e

        logger.info(f"{SUBSTEP_INDENT}CSV file saved as '{path}'.")
        return path

    def save_text(self, output_file: str | Path, text: str) -> Path:
        """Write a rendered text artifact (report) to ``output_file``."""
        path = Path(output_file)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Error saving report '{path}': {e!s}")
            raise OutputError(f"Cannot write '{path}': {e}") from e
        logger.info(f"{SUBSTEP_INDENT}Report saved as '{path}'.")
        return path
