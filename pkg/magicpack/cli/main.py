"""
Main CLI entry point for MagicPack

Exit codes: 0 success, 1 failed check or library error, 2 usage error,
3 resource cap (graph size, dimension cap, exponential cap).
"""

import functools
import sys

import click

from ..config.manager import ConfigManager, load_config, set_global_config
from ..exceptions import ConfigurationError, MagicPackError
from ..utils.performance import log_stage_summary
from .commands import (
    config_command,
    csign48_command,
    cvectors_command,
    density_command,
    fejer_command,
    pack1d_command,
    params_command,
    plot_command,
    poisson_command,
    reduce_command,
    shells_command,
    table_command,
    verify_command,
)
from .utils import EXIT_CHECK_FAILED, exit_code_for, format_output, handle_error, setup_logging


@click.group()
@click.option('--config', '-c',
              type=click.Path(exists=True),
              help='Configuration file path')
@click.option('--verbose', '-v',
              is_flag=True,
              help='Enable verbose output')
@click.option('--quiet', '-q',
              is_flag=True,
              help='Suppress output except errors')
@click.option('--format', 'output_format',
              type=click.Choice(['table', 'json', 'yaml', 'plain']),
              default=None,
              help='Output format (default: cli.default_output_format)')
@click.option('--log-file',
              type=click.Path(),
              help='Log file path')
@click.pass_context
def main(ctx, config, verbose, quiet, output_format, log_file):
    """
    MagicPack - magic functions and forbidden-distance sphere packings

    Certifies the modular-form magic functions dimension by dimension, reports
    the density bounds they give and solves one-dimensional packings with a
    finite set of allowed distances.
    """
    ctx.ensure_object(dict)
    ctx.obj['config_file'] = config
    ctx.obj['verbose'] = verbose
    ctx.obj['quiet'] = quiet
    ctx.obj['log_file'] = log_file

    try:
        manager = load_config(config_file=config) if config else ConfigManager()
    except ConfigurationError as e:
        click.echo(f"Configuration error: {e}", err=True)
        if not quiet:
            click.echo("Using default configuration.", err=True)
        manager = ConfigManager(validate=False)

    try:
        log_level = 'DEBUG' if verbose else ('ERROR' if quiet else manager.get("logging.level", "INFO"))
        if not log_file and manager.get("logging.file_logging", False):
            log_file = manager.get("logging.log_file")
        setup_logging(log_level, log_file)
    except Exception as e:
        click.echo(f"Warning: Failed to setup logging: {e}", err=True)

    ctx.obj['config'] = manager
    set_global_config(manager)
    ctx.obj['output_format'] = output_format or manager.get("cli.default_output_format", "table")
    if verbose:
        ctx.call_on_close(log_stage_summary)


@main.command()
@click.pass_context
def version(ctx):
    """Show version information."""
    from .. import __version__, __description__

    data = {
        "version": __version__,
        "description": __description__,
        "python_version": sys.version.split()[0],
        "platform": sys.platform,
    }
    format_output(ctx.obj.get('output_format', 'table'), data, "Version Information")


main.add_command(params_command, name='params')
main.add_command(verify_command, name='verify')
main.add_command(cvectors_command, name='cvectors')
main.add_command(csign48_command, name='csign48')
main.add_command(plot_command, name='plot')
main.add_command(density_command, name='density')
main.add_command(poisson_command, name='poisson')
main.add_command(pack1d_command, name='pack1d')
main.add_command(reduce_command, name='reduce')
main.add_command(fejer_command, name='fejer')
main.add_command(table_command, name='table')
main.add_command(shells_command, name='shells')
main.add_command(config_command, name='config')


def cli_error_handler(func):
    """Report library errors and exit with the matching code; click's own errors pass through."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except KeyboardInterrupt:
            click.echo("\nOperation cancelled by user.", err=True)
            sys.exit(EXIT_CHECK_FAILED)
        except MagicPackError as e:
            handle_error(e, click.get_current_context(silent=True))
            sys.exit(exit_code_for(e))
        except Exception as e:
            handle_error(e, click.get_current_context(silent=True))
            sys.exit(EXIT_CHECK_FAILED)
    return wrapper


for command in main.commands.values():
    command.callback = cli_error_handler(command.callback)


def run_cli():
    """Run the CLI application."""
    main()


if __name__ == '__main__':
    run_cli()
