"""Batch commands: each runs one suite and writes its report"""

import sys

import cement
import termcolor

from ..utils import _print_dict
from .reports import RunConfig, run_suite
from .suites import SCAN_PRESETS, SUITES

__all__ = [
    "CONTROLLERS",
    "RunController",
]

RUN_ARGUMENTS = [
    (
        ["--config"],
        {
            "dest": "parameters",
            "metavar": "<path>",
            "help": "JSON file with the parameters of the command [default: built-in]",
        },
    ),
    (
        ["--out"],
        {
            "default": ".",
            "metavar": "<dir>",
            "help": "Directory for the report and artifacts [default: .]",
        },
    ),
    (
        ["--seed"],
        {
            "type": int,
            "metavar": "<u64>",
            "help": "Seed of randomized stages; required when the command draws samples",
        },
    ),
    (
        ["--grid-scale"],
        {
            "type": float,
            "default": 1.0,
            "metavar": "<f>",
            "help": "Multiply the node counts of the grids [default: 1]",
        },
    ),
    (
        ["--tol-scale"],
        {
            "type": float,
            "default": 1.0,
            "metavar": "<f>",
            "help": "Multiply the tolerances of the checks [default: 1]",
        },
    ),
    (
        ["--json"],
        {
            "action": "store_true",
            "help": "Print the report as JSON instead of a table [default: False]",
        },
    ),
]


class RunController(cement.Controller):
    """Controller of the batch commands"""

    class Meta:
        label = "run"
        stacked_on = "base"
        stacked_type = "embedded"

    def _run(self, command: str, **options) -> None:
        args = self.app.pargs
        argv = list(self.app.argv) if self.app.argv is not None else sys.argv[1:]
        try:
            config = RunConfig(
                command=command,
                parameters=args.parameters,
                out=args.out,
                seed=args.seed,
                grid_scale=args.grid_scale,
                tol_scale=args.tol_scale,
                **options,
            )
        except ValueError as exception:
            sys.stderr.write(termcolor.colored(str(exception), "red") + "\n")
            self.app.exit_code = 2
            return
        model, suite = SUITES[command]
        report = run_suite(config, model, suite, argv)
        if report.error:
            sys.stderr.write(termcolor.colored(report.error, "red") + "\n")
        if args.json:
            _print_dict(report.to_dict(), json=True)
        else:
            summary = {check["name"]: check["passed"] for check in report.checks}
            summary["status"] = report.status
            _print_dict(summary, json=False)
        self.app.exit_code = report.exit_code

    @cement.ex(
        label="construct-gap",
        help="Build the gap-lattice vector and verify it",
        arguments=RUN_ARGUMENTS,
    )
    def construct_gap(self):
        """gap-lattice construction and membership checks"""
        self._run("construct-gap")

    @cement.ex(
        help="Singular values of the constraint map",
        arguments=RUN_ARGUMENTS
        + [
            (
                ["--preset"],
                {
                    "choices": list(SCAN_PRESETS),
                    "help": "Coefficient preset; a kernel in --config replaces it [default: gap]",
                },
            ),
        ],
    )
    def scan(self):
        """constraint-map scan"""
        self._run("scan", preset=self.app.pargs.preset)

    @cement.ex(
        help="Compare a vector with the discrete selfadjoint subspace",
        arguments=RUN_ARGUMENTS
        + [
            (
                ["--bundle"],
                {
                    "metavar": "<manifest>",
                    "help": "Manifest written by construct-gap; replaces the lattice in --config",
                },
            ),
        ],
    )
    def oracle(self):
        """Krylov oracle"""
        self._run("oracle", manifest=self.app.pargs.bundle)

    @cement.ex(
        help="Sample f_α and audit its properties",
        arguments=RUN_ARGUMENTS,
    )
    def hardy(self):
        """Hardy-family checks"""
        self._run("hardy")

    @cement.ex(
        label="3d",
        help="Azimuthal-null vectors of the three-dimensional operator",
        arguments=RUN_ARGUMENTS,
    )
    def sphere(self):
        """three-dimensional construction"""
        self._run("3d")


CONTROLLERS = [RunController]
