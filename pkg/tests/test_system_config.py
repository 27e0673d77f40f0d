import json
import math

import pytest

from modules.system_config import SystemConfig, config_from_mapping, load_config, validate_config
from modules.utility_functions import ConfigurationError


def test_defaults_describe_the_published_scenario():
    cfg = SystemConfig()
    assert (cfg.num_antennas, cfg.num_elements, cfg.tau) == (64, 32, 500)
    assert (cfg.num_paths_g, cfg.num_paths_h) == (10, 10)
    assert cfg.estimators == ('bigamp', 'ls', 'almmse')
    assert validate_config(cfg) is cfg


def test_aliases_and_coercion():
    cfg = config_from_mapping({'N': '32', 'M': 16, 'I_max': '50', 'rho': '0.5', 'B': 'inf',
                               'estimators': 'LS, almmse', 'trace': 'yes'})
    assert cfg.num_antennas == 32 and cfg.num_elements == 16
    assert cfg.max_iter == 50 and cfg.damping == 0.5
    assert math.isinf(cfg.bits)
    assert cfg.estimators == ('ls', 'almmse')
    assert cfg.trace is True


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigurationError, match='antennas'):
        config_from_mapping({'antennas': 4})


def test_non_integer_count_is_rejected():
    with pytest.raises(ConfigurationError):
        config_from_mapping({'trials': 2.5})
    with pytest.raises(ConfigurationError):
        config_from_mapping({'bits': 'two'})


def test_mapping_applies_on_top_of_base():
    base = SystemConfig(seed=9)
    assert config_from_mapping({'snr_db': -10}, base).seed == 9


def test_load_json_config(tmp_path):
    path = tmp_path / 'cfg.json'
    path.write_text(json.dumps({'tau': 256, 'snr_db': 0}))
    cfg = load_config(str(path))
    assert cfg.tau == 256 and cfg.snr_db == 0.0


def test_load_key_value_config(tmp_path):
    path = tmp_path / 'cfg.env'
    path.write_text('# scenario\nBITS=1\nSNR_DB=-10\nPRIOR_RULE=harmonic\n')
    cfg = load_config(str(path))
    assert cfg.bits == 1 and cfg.snr_db == -10.0 and cfg.prior_rule == 'harmonic'


def test_nested_json_is_rejected(tmp_path):
    path = tmp_path / 'cfg.json'
    path.write_text(json.dumps({'amp': {'damping': 0.5}}))
    with pytest.raises(ConfigurationError):
        load_config(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / 'absent.json'))


@pytest.mark.parametrize('changes', [
    {'num_antennas': 32},               # N > M needed by BiG-AMP
    {'tau': 16},
    {'bits': 9},
    {'damping': 0.0},
    {'stop_tol': -1.0},
    {'estimators': ()},
    {'estimators': ('lasso',)},
    {'num_paths_g': 0},
    {'snr_db': math.inf},
    {'prior_rule': 'mean'},
    {'almmse_prior_rule': 'mean'},
    {'snr_mode': 'average'},
    {'seed': -1},
])
def test_invalid_configurations(changes):
    with pytest.raises(ConfigurationError):
        validate_config(SystemConfig().replace(**changes))


def test_square_channel_allowed_without_bigamp():
    cfg = SystemConfig(num_antennas=32, estimators=('ls',))
    assert validate_config(cfg) is cfg


def test_to_dict_serializes_infinite_bits():
    data = SystemConfig(bits=math.inf).to_dict()
    assert data['bits'] == 'inf'
    assert data['estimators'] == ['bigamp', 'ls', 'almmse']
