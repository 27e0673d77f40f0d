#!/usr/bin/env python3

import functools

import click
import pandas as pd
from dotenv import load_dotenv

# Load environment variables before the modules read them
load_dotenv()

from app_business_logic import build_config, execute_experiment, execute_figure, execute_sweep
from modules.harness import FIGURE_PROTOCOLS, SWEEP_AXES
from modules.quantizer import stepsize_table
from modules.result_export import (OUTPUT_FORMATS, export_experiment, export_figure, export_sweep,
                                   write_table)
from modules.system_config import DEFAULT_OUT_DIR, DEFAULT_WORKERS, SystemConfig, load_config
from modules.training import build_training, export_training
from modules.utility_functions import SimulationError


def config_options(func):
    """Flags shared by every subcommand that runs trials"""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help='Flat .json or KEY=value config file'),
        click.option('--seed', type=int),
        click.option('--trials', type=int),
        click.option('--snr-db', type=float),
        click.option('--bits', type=str, help='1..8 or inf'),
        click.option('--tau', type=int),
        click.option('--zc-root', type=int, help='Zadoff-Chu root of the training sequence'),
        click.option('--estimators', type=str, help='Comma-separated subset of bigamp,ls,almmse'),
        click.option('--trace', is_flag=True, default=False,
                     help='Write per-iteration BiG-AMP traces'),
        click.option('--out', 'out_dir', default=DEFAULT_OUT_DIR, show_default=True,
                     type=click.Path(file_okay=False)),
        click.option('--format', 'fmt', type=click.Choice(OUTPUT_FORMATS), default='csv',
                     show_default=True),
        click.option('--workers', type=int, default=DEFAULT_WORKERS, show_default=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def simulation_errors(func):
    """Report simulator errors as a clean CLI failure"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SimulationError as e:
            raise click.ClickException(str(e))
    return wrapper


def resolve_config(config_path, **overrides):
    base = load_config(config_path) if config_path else SystemConfig()
    # An unset flag must not override a config file that enables tracing
    overrides['trace'] = overrides.get('trace') or None
    return build_config({key: value for key, value in overrides.items() if value is not None}, base)


@click.group()
def cli():
    """Few-bit ADC RIS channel estimation simulator"""


@cli.command()
@config_options
@simulation_errors
def run(config_path, seed, trials, snr_db, bits, tau, zc_root, estimators, trace, out_dir, fmt,
        workers):
    """Run one Monte-Carlo experiment"""
    cfg = resolve_config(config_path, seed=seed, trials=trials, snr_db=snr_db, bits=bits, tau=tau,
                         zc_root=zc_root, estimators=estimators, trace=trace)
    result = execute_experiment(cfg, workers=workers, label='cli run')
    export_experiment(result, out_dir, fmt)
    click.echo(result.summary_frame().to_string(index=False))


@cli.command()
@click.option('--axis', type=click.Choice(SWEEP_AXES), required=True)
@click.option('--values', 'values_text', required=True, help='Comma-separated axis values')
@config_options
@simulation_errors
def sweep(axis, values_text, config_path, seed, trials, snr_db, bits, tau, zc_root, estimators,
          trace, out_dir, fmt, workers):
    """Sweep one axis with common random numbers across its values"""
    values = [part.strip() for part in values_text.split(',') if part.strip()]
    cfg = resolve_config(config_path, seed=seed, trials=trials, snr_db=snr_db, bits=bits, tau=tau,
                         zc_root=zc_root, estimators=estimators, trace=trace)
    result = execute_sweep(cfg, axis, values, workers=workers)
    export_sweep(result, out_dir, fmt)
    click.echo(result.table.to_string(index=False))


@cli.command()
@click.option('--id', 'figure_id', type=click.Choice([str(k) for k in FIGURE_PROTOCOLS]),
              required=True)
@config_options
@simulation_errors
def figure(figure_id, config_path, seed, trials, snr_db, bits, tau, zc_root, estimators, trace,
           out_dir, fmt, workers):
    """Reproduce the data behind one NMSE figure"""
    cfg = resolve_config(config_path, seed=seed, trials=trials, snr_db=snr_db, bits=bits, tau=tau,
                         zc_root=zc_root, estimators=estimators, trace=trace)
    result = execute_figure(int(figure_id), cfg, workers=workers)
    export_figure(result, out_dir, fmt)
    click.echo(result.table.to_string(index=False))


@cli.command()
@click.option('--max-bits', type=click.IntRange(1, 8), default=8, show_default=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False),
              help='Also write stepsizes.csv here')
def stepsizes(max_bits, out_dir):
    """Optimal stepsize and quantization NMSE per resolution"""
    table = pd.DataFrame(stepsize_table(max_bits))
    if out_dir:
        path = write_table(table, out_dir, 'stepsizes', 'csv')
        click.echo(f"💾 Stepsize table written to {path}")
    click.echo(table.to_string(index=False))


@cli.command('export-training')
@click.option('--elements', type=int, default=SystemConfig.num_elements, show_default=True)
@click.option('--tau', type=int, default=SystemConfig.tau, show_default=True)
@click.option('--root', type=int, default=1, show_default=True)
@click.option('--out', 'path', type=click.Path(dir_okay=False), default='training.csv',
              show_default=True)
@simulation_errors
def export_training_command(elements, tau, root, path):
    """Write the Zadoff-Chu training matrix to CSV"""
    export_training(build_training(elements, tau, root), path)


if __name__ == '__main__':
    cli()
