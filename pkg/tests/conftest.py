import json

import numpy as np
import pytest

from qft_locality.core.lattice import LatticeConfig, Region
from qft_locality.infrastructure.cache import db_proxy
from qft_locality.infrastructure.config import SETTINGS_ENV, ConfigManager


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """每个测试使用独立的设置文件，结果缓存默认关闭"""
    settings_path = tmp_path / "settings.json"
    settings_path.write_text(json.dumps({
        "CACHE_DIR": str(tmp_path / "cache"),
        "CACHE_ENABLED": False,
        "DEFAULT_THREAD_COUNT": 2,
    }), encoding="utf-8")
    monkeypatch.setenv(SETTINGS_ENV, str(settings_path))
    ConfigManager.reset_instance()
    yield ConfigManager.get_instance()
    ConfigManager.reset_instance()
    if db_proxy.obj is not None and not db_proxy.obj.is_closed():
        db_proxy.obj.close()
    db_proxy.initialize(None)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def lattice():
    return LatticeConfig(n_sites=128, spacing=0.1, mass=1.0)


@pytest.fixture
def small_lattice():
    return LatticeConfig(n_sites=16, spacing=0.5, mass=1.0)


@pytest.fixture
def regions(lattice):
    return Region.interval(lattice.n_sites, 0, 1), Region.interval(lattice.n_sites, 40, 41)
