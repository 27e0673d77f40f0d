import pytest

from app import create_app
from modules.result_cache import clear_result_cache

SMALL = {'N': 16, 'M': 8, 'tau': 64, 'L': 2, 'J': 2, 'trials': 2, 'seed': 1}


@pytest.fixture
def client():
    clear_result_cache()
    app = create_app()
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client
    clear_result_cache()


def test_index_lists_endpoints(client):
    response = client.get('/')
    assert response.status_code == 200
    assert '/api/experiment' in response.get_json()['endpoints']


def test_openapi_document_served(client):
    response = client.get('/api/openapi.json')
    assert response.status_code == 200
    assert response.get_json()['openapi'].startswith('3.')


def test_stepsizes(client):
    data = client.get('/api/stepsizes').get_json()
    assert data['success'] is True
    assert [row['bits'] for row in data['stepsizes']] == list(range(1, 9))


def test_experiment_then_cache_hit(client):
    body = {'config': {**SMALL, 'estimators': 'ls,almmse'}, 'workers': 1}
    first = client.post('/api/experiment', json=body)
    assert first.status_code == 200
    data = first.get_json()
    assert data['success'] is True and data['cached'] is False
    assert [row['estimator'] for row in data['summary']] == ['ls', 'almmse']
    assert len(data['trials']) == 2

    second = client.post('/api/experiment', json=body).get_json()
    assert second['cached'] is True
    assert second['summary'] == data['summary']

    status = client.get('/api/cache-status').get_json()
    assert status['result_cache']['cached_results'] == 1


def test_experiment_configuration_error_is_400(client):
    response = client.post('/api/experiment', json={'config': {**SMALL, 'tau': 4}})
    assert response.status_code == 400
    assert response.get_json()['success'] is False


def test_unknown_key_is_400(client):
    response = client.post('/api/experiment', json={'config': {'antennas': 3}})
    assert response.status_code == 400
    assert 'antennas' in response.get_json()['error']


def test_sweep_requires_axis_and_values(client):
    response = client.post('/api/sweep', json={'axis': 'snr_db'})
    assert response.status_code == 400


def test_sweep(client):
    body = {'axis': 'snr_db', 'values': [0, 10],
            'config': {**SMALL, 'trials': 1, 'estimators': 'ls'}}
    data = client.post('/api/sweep', json=body).get_json()
    assert data['success'] is True
    assert [row['axis_value'] for row in data['summary']] == ['0', '10']


def test_unknown_figure_is_400(client):
    response = client.post('/api/figure/9', json={'config': SMALL})
    assert response.status_code == 400


def test_run_log_and_clear(client):
    client.post('/api/experiment', json={'config': {**SMALL, 'trials': 1, 'estimators': 'ls'}})
    log = client.get('/api/run-log').get_json()
    assert log['count'] == 1
    assert log['runs'][0]['success'] is True
    cleared = client.post('/api/clear-log').get_json()
    assert cleared['cleared'] == 1
    assert client.get('/api/run-log').get_json()['count'] == 0


def test_clear_cache(client):
    client.post('/api/experiment', json={'config': {**SMALL, 'trials': 1, 'estimators': 'ls'}})
    data = client.post('/api/clear-cache').get_json()
    assert data['cleared']['result_cache'] == 1
