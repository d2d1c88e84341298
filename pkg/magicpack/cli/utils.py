"""
CLI utility functions for MagicPack

Logging setup, output formatting, rational option parsing and the mapping from
library errors to process exit codes.
"""

import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Tuple

import click
import yaml

from ..exceptions import (
    CLIError,
    DimensionCapError,
    ExpCapError,
    GraphSizeError,
    MagicPackError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE_CAP = 3

RESOURCE_ERRORS = (GraphSizeError, DimensionCapError, ExpCapError)


# Color codes for terminal output
class Colors:
    """ANSI color codes for terminal output."""
    BOLD = '\033[1m'
    CYAN = '\033[96m'
    GREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Configure the ``magicpack`` logger.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path
    """
    logger = logging.getLogger('magicpack')
    logger.setLevel(getattr(logging, level.upper()))
    logger.handlers.clear()

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level.upper()))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setLevel(getattr(logging, level.upper()))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)


def format_output(output_format: str, data: Any, title: Optional[str] = None) -> None:
    """
    Display command results.

    Args:
        output_format: table, json, yaml or plain
        data: Result data (dicts, lists and scalars)
        title: Optional heading, shown for table output only
    """
    if output_format == 'json':
        click.echo(json.dumps(data, indent=2, sort_keys=True, default=str))
    elif output_format == 'yaml':
        click.echo(yaml.safe_dump(data, default_flow_style=False, sort_keys=True, allow_unicode=True))
    elif output_format == 'table':
        if title:
            click.echo(f"{Colors.BOLD}{title}{Colors.ENDC}")
            click.echo("=" * len(title))
        _format_as_table(data)
    else:
        _format_plain(data)


def _format_as_table(data: Any, indent: int = 0) -> None:
    pad = '  ' * indent
    if isinstance(data, dict):
        for key, value in data.items():
            if isinstance(value, (dict, list)) and value and not _is_flat_list(value):
                click.echo(f"{pad}{Colors.CYAN}{key}{Colors.ENDC}:")
                _format_as_table(value, indent + 1)
            else:
                click.echo(f"{pad}{Colors.CYAN}{key}{Colors.ENDC}: {_scalar(value)}")
    elif isinstance(data, list):
        for i, item in enumerate(data):
            if isinstance(item, (dict, list)):
                click.echo(f"{pad}{Colors.GREEN}[{i}]{Colors.ENDC}:")
                _format_as_table(item, indent + 1)
            else:
                click.echo(f"{pad}{Colors.GREEN}[{i}]{Colors.ENDC}: {item}")
    else:
        click.echo(f"{pad}{data}")


def _format_plain(data: Any) -> None:
    if isinstance(data, dict):
        for key, value in data.items():
            click.echo(f"{key}\t{_scalar(value)}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, dict):
                click.echo("\t".join(_scalar(v) for v in item.values()))
            else:
                click.echo(_scalar(item))
    else:
        click.echo(str(data))


def _is_flat_list(value: Any) -> bool:
    return isinstance(value, list) and not any(isinstance(v, (dict, list)) for v in value)


def _scalar(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(str(v) for v in value) + "]"
    if value is None:
        return "-"
    return str(value)


def parse_fraction(text: str, option: str) -> Fraction:
    """
    Parse an exact rational such as "1/100" or "3".

    Raises:
        click.BadParameter: If the text is not a rational number
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"'{text}' is not an exact rational", param_hint=option)


def parse_range(text: str, option: str = "--range") -> Tuple[Fraction, Fraction]:
    """Parse "lo:hi" into two rationals with lo < hi."""
    parts = text.split(":")
    if len(parts) != 2:
        raise click.BadParameter(f"'{text}' is not of the form lo:hi", param_hint=option)
    lo, hi = (parse_fraction(p, option) for p in parts)
    if not 0 <= lo < hi:
        raise click.BadParameter(f"need 0 <= lo < hi, got {text}", param_hint=option)
    return lo, hi


def parse_rung(text: str) -> Tuple[int, int, int]:
    """Parse "pi_digits,gamma_digits,split_exponent"."""
    try:
        values = tuple(int(p) for p in text.split(","))
    except ValueError:
        values = ()
    if len(values) != 3:
        raise click.BadParameter(f"'{text}' is not of the form PI,GAMMA,SPLIT", param_hint="--ladder")
    return values


def exit_code_for(error: BaseException) -> int:
    """Exit code for an error raised by a command."""
    if isinstance(error, RESOURCE_ERRORS):
        return EXIT_RESOURCE_CAP
    if isinstance(error, click.UsageError):
        return EXIT_USAGE
    return EXIT_CHECK_FAILED


def handle_error(error: BaseException, ctx: Optional[click.Context] = None) -> None:
    """
    Print an error to stderr, with a traceback in verbose mode.

    Args:
        error: Exception to report
        ctx: Click context (optional)
    """
    if isinstance(error, MagicPackError):
        click.echo(f"{Colors.FAIL}Error: {error.message}{Colors.ENDC}", err=True)
        for key, value in error.details.items():
            if value is not None and not (isinstance(error, CLIError) and key == "args"):
                click.echo(f"  {key}: {value}", err=True)
    elif isinstance(error, KeyboardInterrupt):
        click.echo(f"{Colors.WARNING}Operation cancelled by user{Colors.ENDC}", err=True)
    else:
        click.echo(f"{Colors.FAIL}Unexpected error: {error}{Colors.ENDC}", err=True)

    if ctx is not None and ctx.find_root().obj and ctx.find_root().obj.get('verbose'):
        import traceback
        click.echo(f"\n{Colors.FAIL}Traceback:{Colors.ENDC}", err=True)
        traceback.print_exception(type(error), error, error.__traceback__)
