# -*- coding: utf-8 -*-
from typing import Any, Optional

from wsclab.enum import ErrorCode


class BaseException(Exception):
    def __init__(self, msg: str = "", *args: Any) -> None:
        super().__init__(msg, *args)
        self.msg = msg
        self.exit_code = 1
        self.error_code = ErrorCode.UNKNOWN_ERROR

    def __str__(self) -> str:
        return self.msg


class ConfigurationError(BaseException):
    def __init__(
        self,
        msg: str = "Invalid configuration",
        field: Optional[str] = None,
        error_code: ErrorCode = ErrorCode.CONFIGURATION_ERROR,
        *args: Any,
    ) -> None:
        self.reason = msg
        if field is not None:
            msg = f"{field}: {msg}"
        super().__init__(msg, *args)
        self.field = field
        self.exit_code = 2
        self.error_code = error_code


class ShapeError(BaseException):
    def __init__(
        self,
        msg: str = "Shape mismatch",
        error_code: ErrorCode = ErrorCode.SHAPE_ERROR,
        *args: Any,
    ) -> None:
        super().__init__(msg, *args)
        self.error_code = error_code


class DomainError(BaseException):
    def __init__(
        self,
        msg: str = "Argument outside the operation's domain",
        error_code: ErrorCode = ErrorCode.DOMAIN_ERROR,
        *args: Any,
    ) -> None:
        super().__init__(msg, *args)
        self.error_code = error_code


class FormatError(BaseException):
    def __init__(
        self,
        msg: str = "Malformed file",
        offset: Optional[int] = None,
        error_code: ErrorCode = ErrorCode.FORMAT_ERROR,
        *args: Any,
    ) -> None:
        if offset is not None:
            msg = f"{msg} (at byte offset {offset})"
        super().__init__(msg, *args)
        self.offset = offset
        self.error_code = error_code


class ContractViolationError(BaseException):
    def __init__(
        self,
        msg: str = "Operation called outside its contract",
        error_code: ErrorCode = ErrorCode.CONTRACT_VIOLATION,
        *args: Any,
    ) -> None:
        super().__init__(msg, *args)
        self.error_code = error_code


class ReportError(BaseException):
    """Raised when result files cannot be turned into a report."""

    def __init__(
        self,
        msg: str = "Cannot build report",
        path: Optional[str] = None,
        error_code: ErrorCode = ErrorCode.REPORT_ERROR,
        *args: Any,
    ) -> None:
        if path is not None:
            msg = f"{path}: {msg}"
        super().__init__(msg, *args)
        self.path = path
        self.error_code = error_code
