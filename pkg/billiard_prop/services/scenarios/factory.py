# billiard_prop/services/scenarios/factory.py

import logging

from billiard_prop.cli.config import RunConfig, Scenario
from billiard_prop.models.errata import ErrataLedger
from billiard_prop.utils.csv_writer import CsvTableWriter

from .base import ScenarioRunner
from .covariance_runner import CovarianceScenario
from .domain_runner import DomainScenario
from .eigen_runner import EigenScenario
from .evolve_runner import EvolveScenario
from .greens_runner import GreensCheckScenario

logger = logging.getLogger(__name__)

SCENARIO_MAPPING: dict[Scenario, type[ScenarioRunner]] = {
    Scenario.EIGEN: EigenScenario,
    Scenario.EVOLVE: EvolveScenario,
    Scenario.COVARIANCE: CovarianceScenario,
    Scenario.GREENS_CHECK: GreensCheckScenario,
    Scenario.DOMAIN: DomainScenario,
}


def create_scenario(
    config: RunConfig, writer: CsvTableWriter, ledger: ErrataLedger
) -> ScenarioRunner:
    """
    Create the runner for ``config.scenario``.

    Parameters
    ----------
    config : RunConfig
        Validated run configuration.
    writer : CsvTableWriter
        Table writer carrying the run metadata.
    ledger : ErrataLedger
        Errata collected during the run.

    Returns
    -------
    ScenarioRunner
        The runner instance.
    """
    cls = SCENARIO_MAPPING[config.scenario]
    logger.debug(f"Scenario '{config.scenario}' handled by {cls.__name__}")
    return cls(config, writer, ledger)
