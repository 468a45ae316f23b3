from pathlib import Path
from threading import RLock
from dataclasses import dataclass, field, asdict, replace
import json
import os
from typing import Any, Dict, List, Optional, Tuple
import copy

from ..utils.exceptions import ConfigurationError, FileReadError
from ..utils.logger import get_logger

logger = get_logger(__name__)

SETTINGS_ENV = "QFT_LOCALITY_SETTINGS"
RUN_CONFIG_SCHEMA = "qft-locality/run-config@1"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "CACHE_DIR": str(Path.home() / ".cache" / "qft_locality"),
    "DEFAULT_THREAD_COUNT": 4,
    "MAX_FOCK_DIM": 4096,
    "LOG_LEVEL": "INFO",
    "CACHE_ENABLED": True,
}


class ConfigManager:
    """
    应用设置管理器(单例模式实现)
    核心职责：
    1. 管理应用级设置（缓存目录、线程数、Fock 维度上限等）
    2. 确保设置一致性
    3. 提供线程安全的设置访问
    """
    _instance = None
    _lock = RLock()  # 使用RLock以支持同一线程多次获取

    @classmethod
    def get_instance(cls) -> "ConfigManager":
        """
        双重检查锁定(Double-Checked Locking)实现单例：
        1. 首次检查：避免不必要的锁获取
        2. 加锁：确保线程安全
        3. 二次检查：防止竞态条件
        """
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = cls()
        return cls._instance

    @classmethod
    def reset_instance(cls):
        """丢弃单例（测试中切换设置文件路径时使用）"""
        with cls._lock:
            cls._instance = None

    def __init__(self):
        if hasattr(self, "_initialized") and self._initialized:
            return
        self._initialized = True

        env_path = os.environ.get(SETTINGS_ENV)
        self._config_path = Path(env_path) if env_path else \
            Path.home() / ".config" / "QFTLocality" / "settings.json"
        self._config_data: Dict[str, Any] = {}
        self._ensure_config_exists()

    @property
    def path(self) -> Path:
        return self._config_path

    def _ensure_config_exists(self):
        """
        设置文件管理策略：
        1. 首次运行：写入默认设置
        2. 正常运行：加载已有设置，缺失的键用默认值补齐
        """
        if not self._config_path.exists():
            self._config_path.parent.mkdir(parents=True, exist_ok=True)
            self._config_data = copy.deepcopy(DEFAULT_SETTINGS)
            self._save_config()
        else:
            self._load_config()
            for key, value in DEFAULT_SETTINGS.items():
                self._config_data.setdefault(key, value)

    def get(self, key: str, default: Any = None) -> Any:
        """获取顶级设置项"""
        return self._config_data.get(key, default)

    def set(self, key: str, value: Any):
        """更新设置项并写回文件"""
        with self._lock:
            self._config_data[key] = value
            self._save_config()

    def _save_config(self):
        """保存设置到文件"""
        with self._lock:
            try:
                with open(self._config_path, 'w', encoding='utf-8') as f:
                    json.dump(self._config_data, f, indent=4, ensure_ascii=False)
            except Exception as e:
                logger.error(f"Failed to save settings: {str(e)}")
                raise

    def _load_config(self):
        """从文件加载设置"""
        try:
            with open(self._config_path, 'r', encoding='utf-8') as f:
                self._config_data = json.load(f)
        except Exception as e:
            logger.error(f"Failed to load settings: {str(e)}")
            raise


# =============== 运行配置 ===============

# 每个实验的默认参数，配置文件中同名键覆盖之
DEFAULT_EXPERIMENTS: Dict[str, Dict[str, Any]] = {
    "antilocality": {
        "masses": [0.5, 1.0, 2.0],
        "n_sites": 1024,
        "spacing": 0.05,
        "samples": 50,
        "support_width": 5,
        "power": 1.0,
    },
    "vacuum": {
        "profile_n_sites": 512,
        "separations": None,
        "probe_sites": 3,
    },
    "cyclicity": {
        "cutoffs": [3, 5, 8],
        "magnitudes": [0.25, 0.5, 1.0],
        "tolerance": 1e-8,
        "random_vectors": 100,
        "separating_samples": 500,
        "weyl_norm": 0.5,
        "time_grids": [[0.0], [0.0, 1.0], [0.0, 0.5, 1.0, 1.5]],
        "standard_separations_sites": [1, 3, 40],
    },
    "microcausality": {
        "n_sites": 512,
        "spacing": 0.05,
        "separations_sites": [20, 80],
        "times": [0.0, 0.125, 0.25, 0.375, 0.5],
    },
    "compare-schemes": {
        "shift": 3,
        "separating_samples": 500,
    },
    "correlation": {
        "masses": [0.5, 1.0, 2.0],
        "n_sites": 1024,
        "spacing": 0.05,
    },
}


@dataclass(frozen=True)
class LatticeSection:
    n_sites: int = 128
    spacing: float = 0.1
    mass: float = 1.0


@dataclass(frozen=True)
class FockSection:
    n_modes: int = 2
    cutoff: int = 3


@dataclass(frozen=True)
class GeometrySection:
    region1: Tuple[int, int] = (0, 1)
    region2: Tuple[int, int] = (40, 41)
    time_window: Tuple[float, float] = (-2.0, 2.0)
    time_steps: int = 9


@dataclass(frozen=True)
class RunConfig:
    """批处理实验的完整运行配置"""
    lattice: LatticeSection = field(default_factory=LatticeSection)
    fock: FockSection = field(default_factory=FockSection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    experiments: Dict[str, Dict[str, Any]] = field(default_factory=lambda: copy.deepcopy(DEFAULT_EXPERIMENTS))
    seed: int = 20240917
    output_dir: str = "results"

    def experiment(self, name: str) -> Dict[str, Any]:
        """返回某个实验的参数（默认值与配置合并后的副本）"""
        if name not in DEFAULT_EXPERIMENTS:
            raise ConfigurationError("experiments", f"unknown experiment '{name}'")
        merged = copy.deepcopy(DEFAULT_EXPERIMENTS[name])
        merged.update(copy.deepcopy(self.experiments.get(name, {})))
        return merged

    def times(self) -> List[float]:
        t_min, t_max = self.geometry.time_window
        steps = self.geometry.time_steps
        if steps == 1:
            return [float(t_min)]
        return [t_min + (t_max - t_min) * i / (steps - 1) for i in range(steps)]

    def standard_sweep_intervals(self) -> List[Tuple[int, int]]:
        """region2 intervals for the Standard cyclicity sweep.

        Each interval has the width of region2 and starts the given number of
        sites after the last site of region1.
        """
        last = self.geometry.region1[1] - 1
        width = self.geometry.region2[1] - self.geometry.region2[0]
        return [(last + int(s), last + int(s) + width)
                for s in self.experiment("cyclicity")["standard_separations_sites"]]

    def with_overrides(self, *, output_dir: Optional[str] = None, seed: Optional[int] = None,
                       experiments: Optional[Dict[str, Dict[str, Any]]] = None) -> "RunConfig":
        """应用命令行覆盖项，返回新的配置"""
        merged = copy.deepcopy(self.experiments)
        for name, params in (experiments or {}).items():
            merged.setdefault(name, {}).update(params)
        return replace(
            self,
            output_dir=self.output_dir if output_dir is None else output_dir,
            seed=self.seed if seed is None else seed,
            experiments=merged,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["geometry"]["region1"] = list(self.geometry.region1)
        data["geometry"]["region2"] = list(self.geometry.region2)
        data["geometry"]["time_window"] = list(self.geometry.time_window)
        return {"schema": RUN_CONFIG_SCHEMA, **data}

    def validate(self) -> "RunConfig":
        """
        校验策略：
        1. 构造格点配置（非法参数抛出 ConfigurationError）
        2. 检查 Fock 截断参数
        3. 检查几何：两个区域非空、不相交，时间窗为类空
        4. 检查各实验参数
        """
        from ..core.lattice import LatticeConfig, Region, separation
        from ..utils.exceptions import ValidationError

        config = LatticeConfig(self.lattice.n_sites, self.lattice.spacing, self.lattice.mass)

        if not 1 <= self.fock.n_modes <= 6:
            raise ConfigurationError("fock.n_modes", f"must lie in [1, 6], got {self.fock.n_modes}")
        if not 1 <= self.fock.cutoff <= 8:
            raise ConfigurationError("fock.cutoff", f"must lie in [1, 8], got {self.fock.cutoff}")

        try:
            g1 = Region.interval(config.n_sites, *self.geometry.region1)
            g2 = Region.interval(config.n_sites, *self.geometry.region2)
        except ValidationError as e:
            raise ConfigurationError("geometry", str(e)) from e
        if g1.is_empty() or g2.is_empty():
            raise ConfigurationError("geometry", "regions must be nonempty")
        if self.fock.n_modes != len(g1) + len(g2):
            raise ConfigurationError(
                "fock.n_modes",
                f"must equal the sites of region1 plus region2 ({len(g1) + len(g2)}), got {self.fock.n_modes}",
            )
        if not g1.is_disjoint(g2):
            raise ConfigurationError("geometry", "region1 and region2 must be disjoint")
        if self.geometry.time_steps < 1:
            raise ConfigurationError("geometry.time_steps", "must be >= 1")
        d = separation(g1, g2, config)
        if max(abs(t) for t in self.geometry.time_window) >= d:
            raise ConfigurationError(
                "geometry.time_window", f"max |t| must stay below the region separation {d:g}"
            )

        unknown = set(self.experiments) - set(DEFAULT_EXPERIMENTS)
        if unknown:
            raise ConfigurationError("experiments", f"unknown experiments {sorted(unknown)}")
        for name in ("antilocality", "correlation"):
            params = self.experiment(name)
            for mass in params["masses"]:
                if params["n_sites"] * params["spacing"] * mass < 20:
                    raise ConfigurationError(
                        f"experiments.{name}", f"n_sites*spacing*mass must be >= 20 (mass {mass})"
                    )
        cyclicity = self.experiment("cyclicity")
        if any(not 1 <= c <= 8 for c in cyclicity["cutoffs"]):
            raise ConfigurationError("experiments.cyclicity.cutoffs", "cutoffs must lie in [1, 8]")
        if cyclicity["tolerance"] <= 0:
            raise ConfigurationError("experiments.cyclicity.tolerance", "must be positive")
        if any(int(s) < 1 for s in cyclicity["standard_separations_sites"]):
            raise ConfigurationError("experiments.cyclicity.standard_separations_sites", "must be >= 1 site")
        for start, stop in self.standard_sweep_intervals():
            if not g1.is_disjoint(Region.interval(config.n_sites, start, stop)):
                raise ConfigurationError(
                    "experiments.cyclicity.standard_separations_sites",
                    f"region [{start}, {stop}) wraps onto region1",
                )
        micro = self.experiment("microcausality")
        if any(not 0 <= t < 1 for t in micro["times"]):
            raise ConfigurationError(
                "experiments.microcausality.times", "times are fractions of the separation in [0, 1)"
            )
        logger.debug(f"Run configuration validated: lattice {config}, fock {self.fock}")
        return self


def _section(cls, data: Optional[Dict[str, Any]], name: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigurationError(name, "section must be a JSON object")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(name, f"unknown keys {sorted(unknown)}")
    values = dict(data)
    for key in ("region1", "region2", "time_window"):
        if key in values:
            values[key] = tuple(values[key])
    return cls(**values)


def run_config_from_dict(data: Dict[str, Any]) -> RunConfig:
    schema = data.get("schema")
    if schema != RUN_CONFIG_SCHEMA:
        raise ConfigurationError("schema", f"expected '{RUN_CONFIG_SCHEMA}', got {schema!r}")
    unknown = set(data) - {"schema", "lattice", "fock", "geometry", "experiments", "seed", "output_dir"}
    if unknown:
        raise ConfigurationError("run-config", f"unknown keys {sorted(unknown)}")
    try:
        return RunConfig(
            lattice=_section(LatticeSection, data.get("lattice"), "lattice"),
            fock=_section(FockSection, data.get("fock"), "fock"),
            geometry=_section(GeometrySection, data.get("geometry"), "geometry"),
            experiments=copy.deepcopy(data.get("experiments", {})),
            seed=int(data.get("seed", RunConfig.seed)),
            output_dir=str(data.get("output_dir", RunConfig.output_dir)),
        )
    except TypeError as e:
        raise ConfigurationError("run-config", str(e)) from e


def load_run_config(path: Optional[str]) -> RunConfig:
    """读取 JSON 运行配置；path 为空时返回内置默认配置"""
    if path is None:
        return RunConfig()
    config_path = Path(path)
    if not config_path.is_file():
        raise FileReadError(str(config_path), "file does not exist")
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FileReadError(str(config_path), f"invalid JSON ({e})") from e
    except OSError as e:
        raise FileReadError(str(config_path), str(e)) from e
    if not isinstance(data, dict):
        raise FileReadError(str(config_path), "top level must be a JSON object")
    logger.debug(f"Loaded run configuration from {config_path}")
    return run_config_from_dict(data)
