"""``ghostgap`` command line.

Each subcommand reads a JSON config, prints its report as one JSON line on
stdout, and optionally writes a pretty report (``--out``) and a CSV table
(``--csv``). Exit codes: 0 ok, 2 parse, 3 validation, 4 cap/budget,
5 invariant violation.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .config import parse_config
from .errors import GhostGapError, InvariantViolation, ParseError
from .harness import COMMANDS, run_experiment, write_outputs


def _fail(exc: GhostGapError) -> None:
    click.echo(json.dumps({"error": exc.category, "exit_code": exc.exit_code, "message": str(exc)}), err=True)
    sys.exit(exc.exit_code)


def run_command(command: str, config: str, seed, trials, threads: int, out, csv_path) -> None:
    try:
        try:
            text = Path(config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc.strerror}", field="--config") from None
        cfg = parse_config(text, {"seed": seed, "trials": trials})
        manifest = run_experiment(cfg, command, threads=threads)
        write_outputs(manifest, out or cfg.output.get("report"), csv_path or cfg.output.get("csv"))
    except GhostGapError as exc:
        _fail(exc)
        return
    click.echo(manifest.report_json(indent=None))
    if manifest.violations:
        _fail(InvariantViolation("; ".join(manifest.violations)))


def _options(fn):
    @click.option("--config", "config", required=True, type=click.Path(dir_okay=False), help="Experiment config (JSON).")
    @click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Override the config seed.")
    @click.option("--trials", type=click.IntRange(1), default=None, help="Override the Monte Carlo trial count.")
    @click.option("--threads", type=click.IntRange(1), default=1, show_default=True, help="Worker threads.")
    @click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
    @click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Write the CSV table here.")
    @functools.wraps(fn)
    def wrapper(**kwargs):
        return fn(**kwargs)

    return wrapper


@click.group()
@click.version_option(__version__, prog_name="ghostgap")
def main():
    """Exact and Monte Carlo experiments on one-sided ghost-gap bad events."""


def _register(name: str, help_text: str) -> None:
    @main.command(name, help=help_text)
    @_options
    def command(config, seed, trials, threads, out, csv_path):
        run_command(name, config, seed, trials, threads, out, csv_path)


_HELP = {
    "vcdim": "VC dimension of the configured class by brute-force shattering.",
    "growth": "Growth function for m = 0..growth_m_max (CSV: m, growth, sauer_bound).",
    "sauer-check": "Check growth(m) <= Sauer-Shelah bound for every tabulated m.",
    "prob-exact": "Exact bad-event probability by full pair enumeration.",
    "prob-mc": "Monte Carlo bad-event probability with a Hoeffding radius.",
    "bound-check": "Compare the symmetrization bound with the bad-event probability.",
    "exchange-check": "Exact probability invariance under train/ghost swap masks.",
    "separation-check": "Witness-class bad event equals the witness pair set at m=1, eps=1.",
    "pac-m": "Realizable-case sufficient sample size.",
    "construct-dump": "Materialized parameter list and label table of the class.",
}

for _name in COMMANDS:
    _register(_name, _HELP[_name])
