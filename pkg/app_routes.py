#!/usr/bin/env python3

from flask import jsonify, request, send_from_directory

# Import all business logic functions
from app_business_logic import *
from modules.result_cache import (clear_result_cache, get_or_compute, get_result_cache_stats,
                                  make_cache_key)
from modules.system_config import DEFAULT_WORKERS
from modules.utility_functions import (ConfigurationError, clear_run_log, format_axis_value,
                                       get_run_log)


def register_routes(app):
    """Register all routes with the Flask app"""

    def request_body():
        data = request.get_json(silent=True)
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError("request body must be a JSON object")
        return data

    def error_response(e, context):
        print(f"❌ Error {context}: {e}")
        status = 400 if isinstance(e, ConfigurationError) else 500
        return jsonify({'success': False, 'error': str(e)}), status

    def workers_from(data):
        try:
            return int(data.get('workers', DEFAULT_WORKERS))
        except (TypeError, ValueError):
            raise ConfigurationError(f"workers must be an integer, got {data.get('workers')!r}")

    @app.route('/')
    def index():
        return jsonify({
            'service': 'ris-fewbit-channel-estimation',
            'endpoints': ['/api/openapi.json', '/api/stepsizes', '/api/experiment', '/api/sweep',
                          '/api/figure/<id>', '/api/run-log', '/api/clear-log',
                          '/api/cache-status', '/api/clear-cache'],
        })

    @app.route('/api/openapi.json')
    def openapi_spec():
        """OpenAPI specification"""
        return send_from_directory('static', 'openapi.json')

    @app.route('/api/stepsizes')
    def get_stepsizes():
        """Optimal stepsize and distortion factor for B = 1..8"""
        try:
            return jsonify(stepsize_payload())
        except Exception as e:
            return error_response(e, 'computing stepsize table')

    @app.route('/api/experiment', methods=['POST'])
    def post_experiment():
        """Run one Monte-Carlo experiment; identical configs are served from cache"""
        try:
            data = request_body()
            cfg = build_config(data.get('config', {}))
            workers = workers_from(data)
            print(f"\n🚀 EXPERIMENT REQUEST: {cfg.trials} trials, bits={format_axis_value(cfg.bits)}, "
                  f"SNR={cfg.snr_db} dB")
            payload, cached = get_or_compute(
                make_cache_key('experiment', cfg.to_dict()),
                lambda: experiment_payload(execute_experiment(cfg, workers, label='api experiment')))
            return jsonify({**payload, 'cached': cached})
        except Exception as e:
            return error_response(e, 'running experiment')

    @app.route('/api/sweep', methods=['POST'])
    def post_sweep():
        """Run a sweep over one axis"""
        try:
            data = request_body()
            axis = data.get('axis')
            values = data.get('values')
            if not axis or not isinstance(values, list) or not values:
                return jsonify({'success': False,
                                'error': 'Missing required parameters (axis and non-empty values list)'}), 400
            base = build_config(data.get('config', {}))
            workers = workers_from(data)
            key = make_cache_key('sweep', {'axis': axis, 'values': [str(v) for v in values],
                                           'config': base.to_dict()})
            payload, cached = get_or_compute(
                key, lambda: sweep_payload(execute_sweep(base, axis, values, workers)))
            return jsonify({**payload, 'cached': cached})
        except Exception as e:
            return error_response(e, 'running sweep')

    @app.route('/api/figure/<int:figure_id>', methods=['POST'])
    def post_figure(figure_id):
        """Reproduce one of the NMSE figures at the requested scale"""
        try:
            data = request_body()
            base = build_config(data.get('config', {}))
            workers = workers_from(data)
            key = make_cache_key('figure', {'figure_id': figure_id, 'config': base.to_dict()})
            payload, cached = get_or_compute(
                key, lambda: figure_payload(execute_figure(figure_id, base, workers)))
            return jsonify({**payload, 'cached': cached})
        except Exception as e:
            return error_response(e, f'running figure {figure_id}')

    @app.route('/api/run-log')
    def get_run_log_route():
        """Get the experiment execution log"""
        entries = get_run_log()
        return jsonify({
            'runs': entries,
            'count': len(entries)
        })

    @app.route('/api/clear-log', methods=['POST'])
    def clear_run_log_route():
        """Clear the experiment execution log"""
        cleared = clear_run_log()
        return jsonify({'success': True, 'message': 'Run log cleared', 'cleared': cleared})

    @app.route('/api/cache-status')
    def get_cache_status():
        """Get result cache statistics"""
        try:
            return jsonify({'success': True, 'result_cache': get_result_cache_stats()})
        except Exception as e:
            return error_response(e, 'getting cache status')

    @app.route('/api/clear-cache', methods=['POST'])
    def clear_cache():
        """Clear the result cache"""
        try:
            cleared = clear_result_cache()
            return jsonify({
                'success': True,
                'message': 'Result cache cleared successfully',
                'cleared': {'result_cache': cleared}
            })
        except Exception as e:
            return error_response(e, 'clearing caches')
