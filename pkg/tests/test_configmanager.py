import sys
import os
import pytest
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))

from pybrex.exceptions import ConfigError
from pybrex.harness.configmanager import ConfigManager


def test_config_manager_initialization(config_manager):
    assert config_manager is not None
    assert isinstance(config_manager, ConfigManager)


def test_config_managers_are_independent(temp_config_file, tmp_path):
    cm1 = ConfigManager(temp_config_file)
    cm2 = ConfigManager(str(tmp_path / 'other.ini'), sections={'instance': {'N': 3}})
    assert cm1 is not cm2
    assert cm1.get_int('instance', 'N') == 6
    assert cm2.get_int('instance', 'N') == 3


def test_config_manager_load_config(config_manager):
    assert config_manager.get('problem', 'fidelity') == 'ls'
    assert config_manager.get('problem', 'missing', 'fallback') == 'fallback'
    assert config_manager.get('nosection', 'key') is None


def test_typed_getters(config_manager):
    assert config_manager.get_int('instance', 'k_star') == 1
    assert config_manager.get_float('instance', 'sigma') == pytest.approx(1e-6)
    assert config_manager.get_float('instance', 'missing', 2.5) == 2.5
    config_manager.set('verify', 'lambda0_list', '0.5, 1.5,2')
    assert config_manager.get_list('verify', 'lambda0_list') == [0.5, 1.5, 2.0]
    config_manager.set('output', 'keep', 'yes')
    assert config_manager.get_bool('output', 'keep') is True


def test_typed_getter_rejects_bad_values(config_manager):
    config_manager.set('instance', 'N', 'six')
    with pytest.raises(ConfigError):
        config_manager.get_int('instance', 'N')
    config_manager.set('output', 'keep', 'perhaps')
    with pytest.raises(ConfigError):
        config_manager.get_bool('output', 'keep')


def test_require_and_choice(config_manager):
    assert config_manager.require('problem', 'fidelity') == 'ls'
    with pytest.raises(ConfigError):
        config_manager.require('relaxation', 'lambda0')
    with pytest.raises(ConfigError):
        config_manager.get_choice('problem', 'fidelity', ('kl',))


def test_missing_file_gives_empty_config(tmp_path):
    cm = ConfigManager(str(tmp_path / 'absent.ini'))
    assert cm.config.sections() == []


def test_unparseable_file(tmp_path):
    path = tmp_path / 'broken.ini'
    path.write_text("N = 3\n[instance]\n")
    with pytest.raises(ConfigError):
        ConfigManager(str(path))


def test_resolve_path(config_manager, temp_config_file):
    config_manager.set('output', 'store', 'results/trials.db')
    expected = os.path.join(os.path.dirname(os.path.abspath(temp_config_file)), 'results', 'trials.db')
    assert config_manager.resolve_path('output', 'store') == expected
    config_manager.set('output', 'store', '/tmp/abs.db')
    assert config_manager.resolve_path('output', 'store') == '/tmp/abs.db'
    assert config_manager.resolve_path('output', 'missing') is None


def test_save_and_delete(config_manager, temp_config_file):
    config_manager.set('relaxation', 'lambda0', 0.75)
    config_manager.delete('logging')
    config_manager.save_config()
    reloaded = ConfigManager(temp_config_file)
    assert reloaded.get_float('relaxation', 'lambda0') == 0.75
    assert not reloaded.config.has_section('logging')


if __name__ == "__main__":
    pytest.main()
