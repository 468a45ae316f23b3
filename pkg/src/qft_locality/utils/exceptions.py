"""QFTLocality异常定义模块

按照分层架构设计，定义了系统中所有自定义异常类，包括:
1. 业务逻辑异常（配置错误、输入/前置条件错误）
2. 资源异常（稠密矩阵规模限制）
3. 数值异常（拟合失败）
4. 通用异常（文件读取、实验调度）
"""
from typing import Any
from datetime import datetime


class QFTLocalityError(Exception):
    """所有自定义异常的基类"""
    def __init__(self, message: str, is_retryable: bool = False):
        super().__init__(message)
        self.is_retryable = is_retryable
        self.timestamp = datetime.now()


# =============== 业务逻辑异常 ===============
class BusinessError(QFTLocalityError):
    """业务逻辑相关异常的基类"""
    pass


class ConfigurationError(BusinessError):
    """配置错误（格点参数非法、配置不一致、窗口断言失败）"""
    def __init__(self, config_key: str, reason: str):
        super().__init__(f"Configuration error for {config_key}: {reason}")
        self.config_key = config_key


class ValidationError(BusinessError):
    """参数验证异常（前置条件不满足）"""
    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(f"Validation failed for {field}: {reason}")
        self.field = field
        self.value = value


# =============== 资源异常 ===============
class ResourceError(QFTLocalityError):
    """资源相关异常的基类"""
    pass


class SizeLimitError(ResourceError):
    """稠密计算规模超限"""
    def __init__(self, what: str, size: int, limit: int):
        super().__init__(
            f"{what} too large: size {size} exceeds limit {limit}",
            is_retryable=False,
        )
        self.what = what
        self.size = size
        self.limit = limit


# =============== 数值异常 ===============
class NumericalError(QFTLocalityError):
    """数值计算相关异常的基类"""
    pass


class FitError(NumericalError):
    """指数衰减拟合失败"""
    def __init__(self, quantity: str, reason: str):
        super().__init__(f"Decay fit for {quantity} failed: {reason}")
        self.quantity = quantity


# =============== 通用异常 ===============
class FileReadError(QFTLocalityError):
    """文件读取异常"""
    def __init__(self, file_path: str, reason: str):
        super().__init__(f"Failed to read file {file_path}: {reason}", is_retryable=False)
        self.file_path = file_path


class ExperimentError(QFTLocalityError):
    """实验调度异常"""
    def __init__(self, experiment: str, reason: str):
        super().__init__(f"Experiment {experiment} failed: {reason}")
        self.experiment = experiment
