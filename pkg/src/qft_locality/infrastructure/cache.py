import json
import tempfile
from pathlib import Path
from threading import RLock
from typing import Any, Callable, Dict, Hashable, NamedTuple, Optional

import numpy as np
from peewee import Model, SqliteDatabase, AutoField, CharField, IntegerField, TextField, SQL, Proxy

from ..utils.logger import get_logger

# 配置日志记录器
logger = get_logger(__name__)


# =============== 谱乘子内存缓存 ===============

class PropagatorCache:
    """色散表与谱乘子的进程内缓存

    键为 (n_sites, spacing, mass, 标签) 元组；缓存的数组只读。
    并发时可能重复计算，但同一键总是得到数值完全相同的结果。
    """

    def __init__(self):
        self._lock = RLock()
        self._tables: Dict[Hashable, np.ndarray] = {}
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key: Hashable, factory: Callable[[], np.ndarray]) -> np.ndarray:
        with self._lock:
            cached = self._tables.get(key)
            if cached is not None:
                self.hits += 1
                return cached

        # 在锁外计算，避免长时间持锁
        value = np.array(factory(), copy=True)
        value.setflags(write=False)
        with self._lock:
            self.misses += 1
            logger.debug(f"Propagator cache miss for {key}")
            return self._tables.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._tables.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._tables)


# 全局实例
propagator_cache = PropagatorCache()


# =============== 实验结果持久化缓存 ===============

# 全局数据库代理，首次使用时才初始化
db_proxy = Proxy()


class _ExperimentRecord(Model):
    """实验结果缓存数据模型"""
    id = AutoField()
    experiment = CharField(max_length=40)  # 实验名称
    params = TextField()                   # 实验参数（排序后的JSON）
    seed = IntegerField()                  # 随机种子
    tables = TextField()                   # {序列名: CSV文本}（JSON格式）
    report = TextField()                   # JSON报告文本

    class Meta:
        database = db_proxy
        constraints = [
            SQL(
                """
                UNIQUE (
                    experiment,
                    params,
                    seed
                )
                ON CONFLICT REPLACE
                """
            )
        ]


class CachedPayload(NamedTuple):
    tables: Dict[str, str]
    report: str


class ExperimentCache:
    """实验结果缓存管理器"""

    def __init__(
        self,
        experiment: str,
        params: Optional[Dict[str, Any]] = None,
        seed: int = 0,
        db_instance: Optional[SqliteDatabase] = None,
    ):
        assert len(experiment) <= 40, "实验名称不能超过40个字符"
        self.experiment = experiment
        self.seed = int(seed)
        self.db = db_instance
        self.params: Dict[str, Any] = {}
        self.replace_params(params)

    @staticmethod
    def _sort_dict_recursively(obj: Any) -> Any:
        """递归排序字典，确保相同内容的字典具有相同的字符串表示"""
        if isinstance(obj, dict):
            return {
                k: ExperimentCache._sort_dict_recursively(obj[k])
                for k in sorted(obj.keys())
            }
        elif isinstance(obj, (list, tuple)):
            return [ExperimentCache._sort_dict_recursively(item) for item in obj]
        return obj

    def replace_params(self, params: Optional[Dict[str, Any]] = None) -> None:
        """替换所有参数"""
        if params is None:
            params = {}
        self.params = params
        self.params_key = json.dumps(self._sort_dict_recursively(params))

    def _database(self) -> SqliteDatabase:
        if self.db is not None:
            return self.db
        if db_proxy.obj is None:
            init_db()
        return db_proxy.obj

    def get(self) -> Optional[CachedPayload]:
        """获取缓存的实验结果"""
        try:
            database = self._database()
            with database.bind_ctx([_ExperimentRecord]), database.connection_context():
                record = _ExperimentRecord.get_or_none(
                    (_ExperimentRecord.experiment == self.experiment) &
                    (_ExperimentRecord.params == self.params_key) &
                    (_ExperimentRecord.seed == self.seed)
                )
                if record is None:
                    return None
                return CachedPayload(json.loads(record.tables), record.report)
        except Exception as e:
            logger.debug(f"Reading experiment cache failed: {e}", exc_info=True)
            return None

    def set(self, tables: Dict[str, str], report: str) -> None:
        """写入实验结果缓存"""
        try:
            database = self._database()
            with database.bind_ctx([_ExperimentRecord]), database.connection_context():
                _ExperimentRecord.replace(
                    experiment=self.experiment,
                    params=self.params_key,
                    seed=self.seed,
                    tables=json.dumps(tables, sort_keys=True),
                    report=report,
                ).execute()
        except Exception as e:
            logger.debug(f"Writing experiment cache failed: {e}", exc_info=True)


def _open_database(path: Path) -> SqliteDatabase:
    return SqliteDatabase(
        str(path),
        pragmas={
            "journal_mode": "wal",
            "busy_timeout": 1000,
        },
    )


# --- 生产环境数据库初始化 ---
def init_db(cache_dir: Optional[str] = None, remove_exists: bool = False) -> None:
    """
    初始化实验缓存数据库，并将其设置到全局代理 db_proxy
    Args:
        cache_dir: 缓存目录，默认取应用设置 CACHE_DIR
        remove_exists: 是否删除现有数据库
    """
    if cache_dir is None:
        from .config import ConfigManager
        cache_dir = ConfigManager.get_instance().get("CACHE_DIR")
    cache_folder = Path(cache_dir)
    cache_folder.mkdir(parents=True, exist_ok=True)

    cache_db_path = cache_folder / "experiments.v1.db"

    if remove_exists and cache_db_path.exists():
        try:
            cache_db_path.unlink()
            logger.info(f"Removed existing cache database: {cache_db_path}")
        except OSError as e:
            logger.error(f"Failed to remove cache database {cache_db_path}: {e}")
            return

    database = _open_database(cache_db_path)
    db_proxy.initialize(database)
    try:
        with database.bind_ctx([_ExperimentRecord]), database.connection_context():
            database.create_tables([_ExperimentRecord], safe=True)
        logger.debug(f"Experiment cache initialized: {cache_db_path}")
    except Exception as e:
        logger.error(f"Failed to create cache tables: {e}", exc_info=True)


# --- 测试环境数据库辅助函数 ---
def init_test_db() -> SqliteDatabase:
    """初始化一个临时的、唯一的测试数据库，并返回该实例（不影响全局代理）"""
    temp_db_file = tempfile.NamedTemporaryFile(suffix=".db", delete=False)
    db_path_str = temp_db_file.name
    temp_db_file.close()

    test_db_instance = _open_database(Path(db_path_str))
    with test_db_instance.bind_ctx([_ExperimentRecord]), test_db_instance.connection_context():
        test_db_instance.create_tables([_ExperimentRecord], safe=True)
    return test_db_instance


def clean_test_db(test_db_instance: SqliteDatabase) -> None:
    """清理测试数据库及其 WAL/SHM 文件"""
    db_path_str = test_db_instance.database
    if not test_db_instance.is_closed():
        test_db_instance.close()
    for suffix in ("", "-wal", "-shm"):
        try:
            Path(db_path_str + suffix).unlink(missing_ok=True)
        except OSError as e:
            logger.warning(f"Failed to remove test database file {db_path_str + suffix}: {e}")
