"""日志管理模块

提供统一的日志配置和管理功能，包括:
1. 日志格式化
2. 日志级别控制（环境变量 QFT_LOCALITY_LOG_LEVEL）
3. 多目标输出(控制台、可选的文件)
"""
import logging
import os
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union

LOG_LEVEL_ENV = "QFT_LOCALITY_LOG_LEVEL"
LOG_DIR_ENV = "QFT_LOCALITY_LOG_DIR"


class LoggerManager:
    """日志管理器

    负责统一配置和管理项目中的所有日志记录器
    """

    # 默认日志格式
    DEFAULT_FORMAT = '%(asctime)s [%(levelname)s] %(name)s - %(message)s'
    # 详细日志格式（用于文件日志和调试模式）
    DETAILED_FORMAT = '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(message)s'

    def __init__(self, level: Optional[str] = None, log_dir: Optional[str] = None):
        self.root_logger = logging.getLogger("qft_locality")
        self.root_logger.setLevel(self._resolve_level(level or os.environ.get(LOG_LEVEL_ENV, "INFO")))

        # 避免日志重复
        self.root_logger.propagate = False
        self.root_logger.handlers.clear()

        self._setup_console_handler()

        log_dir = log_dir or os.environ.get(LOG_DIR_ENV)
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir is not None:
            self._setup_file_handler()

    @staticmethod
    def _resolve_level(level: Union[str, int]) -> int:
        if isinstance(level, int):
            return level
        resolved = logging.getLevelName(str(level).upper())
        # 未知级别名称时 getLevelName 返回字符串
        return resolved if isinstance(resolved, int) else logging.INFO

    def _setup_console_handler(self):
        """配置控制台日志处理器"""
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(self.root_logger.level)
        console_handler.setFormatter(logging.Formatter(self.DEFAULT_FORMAT))
        self.root_logger.addHandler(console_handler)

    def _setup_file_handler(self):
        """配置文件日志处理器"""
        self.log_dir.mkdir(parents=True, exist_ok=True)
        log_file = self.log_dir / f"qft_locality_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(self.DETAILED_FORMAT))
        self.root_logger.addHandler(file_handler)

    def get_logger(self, name: str) -> logging.Logger:
        """获取指定名称的日志记录器

        Args:
            name: 日志记录器名称，通常使用模块名称

        Returns:
            logging.Logger: 配置好的日志记录器
        """
        if name.startswith("qft_locality"):
            return logging.getLogger(name)
        return logging.getLogger(f"qft_locality.{name}")

    def set_level(self, level: Union[str, int]):
        """设置日志级别

        Args:
            level: 日志级别，可以是字符串('DEBUG', 'INFO'等)或对应的数字
        """
        level = self._resolve_level(level)
        self.root_logger.setLevel(level)
        for handler in self.root_logger.handlers:
            if not isinstance(handler, RotatingFileHandler):
                handler.setLevel(level)

    def enable_debug_mode(self):
        """启用调试模式，增加日志详细程度"""
        self.set_level(logging.DEBUG)
        for handler in self.root_logger.handlers:
            if isinstance(handler, logging.StreamHandler) and \
               getattr(handler, "stream", None) is sys.stdout:
                handler.setFormatter(logging.Formatter(self.DETAILED_FORMAT))


# 全局日志管理器实例
_logger_manager = LoggerManager()


def get_logger(name: str) -> logging.Logger:
    """获取日志记录器的便捷方法"""
    return _logger_manager.get_logger(name)


def set_log_level(level: Union[str, int]):
    """设置全局日志级别的便捷方法"""
    _logger_manager.set_level(level)


def enable_debug():
    """启用调试模式的便捷方法"""
    _logger_manager.enable_debug_mode()
