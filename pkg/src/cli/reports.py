"""Run configurations and JSON reports of the batch commands.

Every run writes `report.json` into its output directory, whatever the
outcome. The exit code of a run follows its status:

======  ===========  ====================================
code    status       meaning
======  ===========  ====================================
0       pass         every check passed
1       fail         a check or a stage failed
2       invalid      the run configuration is not valid
3       degenerate   the input is degenerate
======  ===========  ====================================
"""

import dataclasses
import json
import logging
import os
import time
from collections.abc import Callable
from typing import Literal, Optional

import pydantic
from beartype import beartype

from ..exceptions import (
    ConfigInvalidError,
    DegenerateInputError,
    ParameterError,
    SelfadjointException,
)
from ..utils import config_hash, jsonable

__all__ = [
    "SCHEMA_VERSION",
    "EXIT_CODES",
    "COMMANDS",
    "RunConfig",
    "Report",
    "load_parameters",
    "run_suite",
]

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_CODES = {"pass": 0, "fail": 1, "invalid": 2, "degenerate": 3}

COMMANDS = ("construct-gap", "scan", "oracle", "hardy", "3d")

REPORT_FILENAME = "report.json"


class RunConfig(pydantic.BaseModel):
    """Options shared by the batch commands"""

    model_config = pydantic.ConfigDict(extra="forbid", frozen=True)

    command: Literal[COMMANDS]
    parameters: Optional[str] = None
    out: str = "."
    seed: Optional[int] = pydantic.Field(default=None, ge=0, lt=2**64)
    grid_scale: float = pydantic.Field(default=1.0, gt=0)
    tol_scale: float = pydantic.Field(default=1.0, gt=0)
    preset: Optional[str] = None
    manifest: Optional[str] = None

    def require_seed(self) -> int:
        """The seed of a randomized stage

        Raises:
            ConfigInvalidError: no seed was given
        """
        if self.seed is None:
            raise ConfigInvalidError(f"`{self.command}` draws random samples; pass --seed")
        return self.seed

    def scaled(self, count: int, minimum: int = 1) -> int:
        """A node count multiplied by the grid scale"""
        return max(minimum, int(round(count * self.grid_scale)))

    def tolerance(self, value: float) -> float:
        """A tolerance multiplied by the tolerance scale"""
        return float(value) * self.tol_scale


@dataclasses.dataclass
class Report:
    """Metrics, checks and artifacts of one run"""

    config: RunConfig
    argv: list = dataclasses.field(default_factory=list)
    parameters: Optional[dict] = None
    metrics: dict = dataclasses.field(default_factory=dict)
    checks: list = dataclasses.field(default_factory=list)
    artifacts: list = dataclasses.field(default_factory=list)
    status: str = "pass"
    error: Optional[str] = None
    wall_clock: float = 0.0

    def check(self, name: str, value, tol, relation: str = "<") -> bool:
        """Record a check of `value` against `tol`

        Args:
            name (:obj:`str`): name of the check
            value: measured value
            tol: tolerance or expected value
            relation (:obj:`str`): one of `<`, `>`, `>=`, `==`, or `in` for a
                closed interval `tol = (lo, hi)`

        Returns:
            :obj:`bool`: whether the check passed
        """
        value, tol = jsonable(value), jsonable(tol)
        passed = {
            "<": lambda: value < tol,
            ">": lambda: value > tol,
            ">=": lambda: value >= tol,
            "==": lambda: value == tol,
            "in": lambda: tol[0] <= value <= tol[1],
        }[relation]()
        self.checks.append(
            {"name": name, "value": value, "tol": tol, "relation": relation, "passed": bool(passed)}
        )
        if not passed:
            logger.warning("check %s failed: %r %s %r does not hold", name, value, relation, tol)
            if self.status == "pass":
                self.status = "fail"
        return bool(passed)

    def abort(self, status: str, exception: BaseException) -> None:
        self.status = status
        self.error = f"{type(exception).__name__}: {exception}"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    @property
    def config_hash(self) -> str:
        return config_hash(
            {
                "run": self.config.model_dump(exclude={"out"}),
                "parameters": self.parameters,
            }
        )

    def to_dict(self) -> dict:
        """JSON form; only `wall_clock_seconds` differs between repeated runs"""
        return jsonable(
            {
                "schema_version": SCHEMA_VERSION,
                "command": self.config.command,
                "argv": self.argv,
                "config_hash": self.config_hash,
                "run": self.config.model_dump(exclude={"out"}),
                "parameters": self.parameters,
                "metrics": self.metrics,
                "checks": self.checks,
                "passed": self.status == "pass",
                "status": self.status,
                "exit_code": self.exit_code,
                "error": self.error,
                "artifacts": sorted(self.artifacts),
                "wall_clock_seconds": self.wall_clock,
            }
        )

    def path(self, filename: str) -> str:
        """Path of an artifact in the output directory; the artifact is
        listed in the report"""
        self.artifacts.append(filename)
        return os.path.join(self.config.out, filename)

    def write_json(self, filename: str, data: dict) -> str:
        path = self.path(filename)
        with open(path, "w") as file:
            json.dump(jsonable(data), file, indent=2, sort_keys=True)
            file.write("\n")
        return path

    def write(self) -> str:
        """Write `report.json` to the output directory"""
        path = os.path.join(self.config.out, REPORT_FILENAME)
        with open(path, "w") as file:
            json.dump(self.to_dict(), file, indent=2, sort_keys=True)
            file.write("\n")
        return path


@beartype
def load_parameters(config: RunConfig, model: type) -> pydantic.BaseModel:
    """Validate the parameter file of a run, or the defaults without one

    Raises:
        ConfigInvalidError: the file cannot be read or is not JSON
        pydantic.ValidationError: unknown keys or invalid values
    """
    if config.parameters is None:
        return model()
    try:
        with open(config.parameters, "r") as file:
            data = json.load(file)
    except (OSError, json.JSONDecodeError) as exception:
        raise ConfigInvalidError(f"cannot read parameters {config.parameters}: {exception}")
    if not isinstance(data, dict):
        raise ConfigInvalidError(f"parameters {config.parameters} must hold a JSON object")
    return model.model_validate(data)


@beartype
def run_suite(config: RunConfig, model: type, suite: Callable, argv: list = []) -> Report:
    """Load the parameters, run `suite(config, params, report)` and write
    the report.

    Invalid configurations, degenerate input and failing stages are
    recorded in the report and its status instead of raised.
    """
    report = Report(config, list(argv))
    os.makedirs(config.out, exist_ok=True)
    start = time.perf_counter()
    try:
        params = load_parameters(config, model)
        report.parameters = params.model_dump(mode="json")
        suite(config, params, report)
    except (pydantic.ValidationError, ConfigInvalidError, ParameterError) as exception:
        report.abort("invalid", exception)
    except DegenerateInputError as exception:
        report.abort("degenerate", exception)
    except SelfadjointException as exception:
        report.abort("fail", exception)
    report.wall_clock = time.perf_counter() - start
    report.write()
    logger.info("%s finished with status %s", config.command, report.status)
    return report
