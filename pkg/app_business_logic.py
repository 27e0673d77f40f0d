#!/usr/bin/env python3

import math

from modules.harness import run_experiment, run_figure, run_sweep
from modules.quantizer import stepsize_table
from modules.system_config import DEFAULT_WORKERS, config_from_mapping, validate_config
from modules.utility_functions import SimulationError, format_axis_value, log_run


def build_config(overrides, base=None):
    """SystemConfig from request/CLI overrides, validated"""
    return validate_config(config_from_mapping(overrides or {}, base))


def frame_records(frame):
    """DataFrame rows as JSON-safe dicts (NaN and inf become null)"""
    records = frame.to_dict(orient='records')
    for record in records:
        for key, value in record.items():
            if isinstance(value, float) and not math.isfinite(value):
                record[key] = None
            elif hasattr(value, 'item'):
                record[key] = value.item()
    return records


def _totals(summary_rows):
    return {
        'trials_ok': sum(int(row['trials_ok']) for row in summary_rows),
        'trials_diverged': sum(int(row['trials_diverged']) for row in summary_rows),
    }


def execute_experiment(cfg, workers=DEFAULT_WORKERS, log_execution=True, label='run'):
    """Run one experiment and record it in the run log"""
    try:
        result = run_experiment(cfg, workers=workers)
    except SimulationError as e:
        if log_execution:
            log_run(label, {'success': False, 'error': str(e)}, 'experiment')
        raise
    if log_execution:
        log_run(label, {'success': True, 'elapsed': result.elapsed, **_totals(result.summary)},
                'experiment')
    return result


def execute_sweep(base, axis, values, workers=DEFAULT_WORKERS, log_execution=True):
    label = f"sweep {axis}=[{','.join(format_axis_value(v) for v in values)}]"
    try:
        result = run_sweep(base, axis, values, workers=workers)
    except SimulationError as e:
        if log_execution:
            log_run(label, {'success': False, 'error': str(e)}, 'sweep')
        raise
    if log_execution:
        elapsed = sum(experiment.elapsed for experiment in result.experiments)
        log_run(label, {'success': True, 'elapsed': elapsed,
                        **_totals(frame_records(result.table))}, 'sweep')
    return result


def execute_figure(figure_id, base, workers=DEFAULT_WORKERS, log_execution=True):
    label = f"figure {figure_id}"
    try:
        result = run_figure(figure_id, base, workers=workers)
    except SimulationError as e:
        if log_execution:
            log_run(label, {'success': False, 'error': str(e)}, 'figure')
        raise
    if log_execution:
        log_run(label, {'success': True, **_totals(frame_records(result.table))}, 'figure')
    return result


def experiment_payload(result):
    return {
        'success': True,
        'config': result.config.to_dict(),
        'summary': frame_records(result.summary_frame()),
        'trials': frame_records(result.trials_frame()),
        'elapsed': result.elapsed,
    }


def sweep_payload(result):
    return {
        'success': True,
        'axis': result.axis,
        'values': [format_axis_value(v) for v in result.values],
        'summary': frame_records(result.table),
    }


def figure_payload(result):
    return {
        'success': True,
        'figure_id': result.figure_id,
        'name': result.name,
        'axis': result.axis,
        'summary': frame_records(result.table),
    }


def stepsize_payload():
    return {'success': True, 'stepsizes': stepsize_table()}
