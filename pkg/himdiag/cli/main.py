# himdiag/cli/main.py
import argparse
import sys
from typing import List, Optional

from himdiag import __version__
from himdiag.cli.commands import EXIT_CONFIG, build_config, run_command
from himdiag.utils.errors import ConfigError
from himdiag.utils.logger import logger


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", dest="output_path", help="Write the result here instead of stdout")
    parser.add_argument("--format", choices=["json", "csv"], help="Output format")


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", dest="input_path", help="CSV file with one observation per line")
    parser.add_argument("--response", dest="response_column", help="Response column name or zero-based index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="himdiag",
        description="High-dimensional influence diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    diagnose = commands.add_parser("diagnose", help="HIM scores, p-values and BH-flagged rows")
    _add_input(diagnose)
    diagnose.add_argument("--alpha", type=float)
    diagnose.add_argument("--estimator", choices=["moment", "robust"])
    _add_output(diagnose)

    cook = commands.add_parser("cook", help="Cook's distance for low-dimensional data (n > p + 1)")
    _add_input(cook)
    _add_output(cook)

    glm = commands.add_parser("glm-diagnose", help="GLM-HIM scores for a binary response")
    _add_input(glm)
    glm.add_argument("--m", type=int, help="Number of observations to flag")
    _add_output(glm)

    simulate = commands.add_parser("simulate", help="Monte Carlo replications of a perturbation model")
    simulate.add_argument("--model", choices=["m1", "m2", "m3", "logistic"])
    simulate.add_argument(
        "--pipeline",
        choices=["him", "sis", "sis+him", "lasso", "lasso+him", "glm-him"],
        help="Defaults to glm-him for the logistic model and him otherwise",
    )
    simulate.add_argument("--kappa", type=float, nargs="+", help="One or more perturbation strengths")
    simulate.add_argument("--s-set", dest="s_set", choices=["s1", "s2", "s3"])
    simulate.add_argument("--n", type=int)
    simulate.add_argument("--p", type=int)
    simulate.add_argument("--n-infl", dest="n_infl", type=int)
    simulate.add_argument("--alpha", type=float)
    simulate.add_argument("--estimator", choices=["moment", "robust"], help="HIM estimator for pipelines that flag rows")
    simulate.add_argument("--d", type=int, help="SIS model size (default floor(n / log n))")
    simulate.add_argument("--m", type=int, help="GLM-HIM flag count (default n-infl)")
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--reps", dest="replications", type=int)
    simulate.add_argument("--executor", choices=["serial", "threads", "celery"])
    simulate.add_argument("--workers", type=int)
    _add_output(simulate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    options = {key: value for key, value in vars(args).items() if value is not None}
    try:
        config = build_config(**options)
    except ConfigError as exc:
        logger.error(f"Configuration error: {exc}")
        return EXIT_CONFIG
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())
