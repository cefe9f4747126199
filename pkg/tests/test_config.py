import pytest

from config import get_settings, setup_logging
from errors import ConfigError

NAMES = [
    'RAAG_LOG_LEVEL', 'RAAG_SEED', 'RAAG_AUTOMORPHISM_LIMIT', 'RAAG_DEFAULT_RADIUS',
    'RAAG_DEFAULT_LENGTH_BOUND', 'RAAG_FIBER_BOUND', 'RAAG_SAMPLE_LIMIT',
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in NAMES:
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = get_settings()
    assert settings.log_level == 'WARNING'
    assert settings.seed is None
    assert settings.automorphism_limit == 12
    assert (settings.default_radius, settings.default_length_bound) == (2, 2)
    assert settings.fiber_bound == 4
    assert settings.sample_limit == 400


def test_overrides_are_read_on_every_call(monkeypatch):
    monkeypatch.setenv('RAAG_DEFAULT_RADIUS', '5')
    monkeypatch.setenv('RAAG_LOG_LEVEL', 'debug')
    monkeypatch.setenv('RAAG_SEED', '7')
    settings = get_settings()
    assert settings.default_radius == 5
    assert settings.log_level == 'DEBUG'
    assert settings.seed == 7
    monkeypatch.setenv('RAAG_DEFAULT_RADIUS', '')
    assert get_settings().default_radius == 2


@pytest.mark.parametrize('name, value', [
    ('RAAG_FIBER_BOUND', 'four'),
    ('RAAG_SAMPLE_LIMIT', '-1'),
    ('RAAG_LOG_LEVEL', 'LOUD'),
    ('RAAG_SEED', 'x'),
])
def test_bad_settings(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        get_settings()


def test_setup_logging_reads_the_configured_level(monkeypatch):
    setup_logging('INFO')
    monkeypatch.setenv('RAAG_LOG_LEVEL', 'LOUD')
    with pytest.raises(ConfigError):
        setup_logging()
