# billiard_prop/services/scenarios/base.py

import logging
from pathlib import Path

from billiard_prop.cli.config import RunConfig
from billiard_prop.models.errata import ErrataLedger
from billiard_prop.utils.csv_writer import CsvTableWriter

logger = logging.getLogger(__name__)


class ScenarioRunner:
    """
    Base class of the per-subcommand runners.

    Parameters
    ----------
    config : RunConfig
        Validated run configuration.
    writer : CsvTableWriter
        Table writer carrying the run metadata.
    ledger : ErrataLedger
        Collects deviations observed while running.
    """

    name = "scenario"

    def __init__(self, config: RunConfig, writer: CsvTableWriter, ledger: ErrataLedger):
        self.config = config
        self.writer = writer
        self.ledger = ledger
        self.outputs: list[Path] = []

    def path(self, file_name: str) -> Path:
        return self.config.output_dir / file_name

    def save_table(self, file_name: str, header, rows, extra_metadata=None) -> Path:
        path = self.writer.save_table(self.path(file_name), header, rows, extra_metadata)
        self.outputs.append(path)
        return path

    def run(self) -> list[Path]:
        raise NotImplementedError
