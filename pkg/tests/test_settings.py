import pytest

from harvestkit.exceptions import (
    ConfigError,
    ConvergenceError,
    DomainError,
    HarvestKitError,
    InfeasibleError,
    ValidationError,
)
from harvestkit.models import QuadratureSpec
from harvestkit.settings import (
    DEFAULT_SETTINGS,
    configure_settings,
    get_setting,
    get_settings,
)


class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings['THREADS'] == 1
        assert settings['LOG_LEVEL'] == 'INFO'
        assert settings['PERTURBATIVE_LIMIT'] == 0.1

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv('HARVESTKIT_THREADS', '6')
        monkeypatch.setenv('HARVESTKIT_DEBUG', 'true')
        monkeypatch.setenv('HARVESTKIT_FIXTURES', str(tmp_path))
        settings = configure_settings()
        assert settings['THREADS'] == 6
        assert settings['DEBUG'] is True
        assert settings['LOG_LEVEL'] == 'DEBUG'
        assert settings['FIXTURES_DIR'] == str(tmp_path)

    def test_env_file(self, tmp_path, monkeypatch):
        monkeypatch.delenv('HARVESTKIT_THREADS', raising=False)
        env_file = tmp_path / '.env'
        env_file.write_text('HARVESTKIT_THREADS=3\n', encoding='utf-8')
        assert configure_settings(env_file=str(env_file))['THREADS'] == 3

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv('HARVESTKIT_THREADS', '6')
        settings = configure_settings({'THREADS': 2, 'QUADRATURE': {'REL_TOL': 1e-6}})
        assert settings['THREADS'] == 2
        assert settings['QUADRATURE']['REL_TOL'] == 1e-6
        assert settings['QUADRATURE']['U_MAX_FACTOR'] == 10.0
        assert DEFAULT_SETTINGS['QUADRATURE']['REL_TOL'] == 1e-9

    def test_quadrature_environment(self, monkeypatch):
        monkeypatch.setenv('HARVESTKIT_QUAD_REL_TOL', '1e-7')
        settings = configure_settings({'QUADRATURE': {'U_MAX_FACTOR': 20.0}})
        assert settings['QUADRATURE']['REL_TOL'] == 1e-7
        assert settings['QUADRATURE']['U_MAX_FACTOR'] == 20.0
        assert DEFAULT_SETTINGS['QUADRATURE']['REL_TOL'] == 1e-9

    def test_bad_environment_value(self, monkeypatch):
        monkeypatch.setenv('HARVESTKIT_THREADS', 'many')
        with pytest.raises(ConfigError):
            configure_settings()

    def test_get_setting_default(self):
        assert get_setting('MISSING', 'fallback') == 'fallback'

    def test_quadrature_spec_from_settings(self):
        settings = configure_settings({'QUADRATURE': {'U_MAX_FACTOR': 20.0}})
        spec = QuadratureSpec.from_settings(settings)
        assert spec.u_max_factor == 20.0
        assert spec.rel_tol == 1e-9


class TestExceptions:
    def test_default_messages_and_codes(self):
        error = DomainError()
        assert isinstance(error, HarvestKitError)
        assert error.code == 'domain_error'
        assert error.message == 'Parameter outside the physical domain'
        assert ConfigError().code == 'config_error'
        assert ValidationError().code == 'validation_failed'

    def test_custom_message(self):
        error = ConfigError('both a and gap given', code='duplicate')
        assert str(error) == 'both a and gap given'
        assert error.code == 'duplicate'

    def test_payloads(self):
        assert ConvergenceError(result=42).result == 42
        assert InfeasibleError(best_inseparability=1.2).best_inseparability == 1.2
        assert ValidationError(failures=['g1']).failures == ['g1']

    def test_messages_follow_settings(self):
        configure_settings({'ERROR_RESPONSE': {
            'CONFIG': {'message': 'bad config', 'code': 'cfg'},
        }})
        error = ConfigError()
        assert (error.message, error.code) == ('bad config', 'cfg')
