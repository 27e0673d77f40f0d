#!/usr/bin/env python3

import os

import pandas as pd

from .utility_functions import ConfigurationError, format_axis_value, to_db

OUTPUT_FORMATS = ('csv', 'json')
FLOAT_FORMAT = '%.17g'
TRACE_COLUMNS = ['iteration', 'residual', 'nmse']


def _check_format(fmt):
    if fmt not in OUTPUT_FORMATS:
        raise ConfigurationError(f"Unknown output format '{fmt}'; choose from {list(OUTPUT_FORMATS)}")


def write_table(frame, out_dir, stem, fmt='csv'):
    """Write one result table as <stem>.csv or <stem>.json; returns the path"""
    _check_format(fmt)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{stem}.{fmt}")
    if fmt == 'csv':
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    else:
        frame.to_json(path, orient='records', indent=2, double_precision=15)
    return path


def plot_frame(table):
    """Summary table with the NMSE columns also in dB, ready for plotting"""
    frame = table.copy()
    frame['mean_nmse_db'] = to_db(frame['mean_nmse'].to_numpy(dtype=float))
    frame['median_nmse_db'] = to_db(frame['median_nmse'].to_numpy(dtype=float))
    return frame


def write_traces(trials, out_dir, subdir='trace'):
    """One iteration,residual,nmse CSV per traced trial under out_dir/subdir"""
    trace_dir = os.path.join(out_dir, subdir)
    paths = []
    for trial in trials:
        if not trial.trace:
            continue
        os.makedirs(trace_dir, exist_ok=True)
        path = os.path.join(trace_dir, f"trial_{trial.trial_index}.csv")
        pd.DataFrame(trial.trace, columns=TRACE_COLUMNS).to_csv(
            path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        paths.append(path)
    return paths


def export_experiment(result, out_dir, fmt='csv'):
    """Summary, per-trial table and traces of one run_experiment result"""
    written = [
        write_table(result.summary_frame(), out_dir, 'summary', fmt),
        write_table(result.trials_frame(), out_dir, 'trials', fmt),
    ]
    written.extend(write_traces(result.trials, out_dir))
    print(f"💾 Wrote {len(written)} result files to {out_dir}")
    return written


def export_sweep(sweep, out_dir, fmt='csv'):
    """Summary with one row per axis value and estimator, plus plot data"""
    written = [
        write_table(sweep.table, out_dir, 'summary', fmt),
        write_table(plot_frame(sweep.table), out_dir, f"plot_{sweep.axis}", 'csv'),
    ]
    for value, experiment in zip(sweep.values, sweep.experiments):
        subdir = os.path.join('trace', f"{sweep.axis}_{format_axis_value(value)}")
        written.extend(write_traces(experiment.trials, out_dir, subdir))
    print(f"💾 Wrote {len(written)} result files to {out_dir}")
    return written


def export_figure(figure, out_dir, fmt='csv'):
    written = [
        write_table(figure.table, out_dir, f"summary_{figure.name}", fmt),
        write_table(plot_frame(figure.table), out_dir, f"plot_{figure.name}", 'csv'),
    ]
    print(f"💾 Figure {figure.figure_id} data written to {out_dir}")
    return written
