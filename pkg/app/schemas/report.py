from pydantic import BaseModel
from typing import Any, Dict, Optional

from .config import RunConfigRead


class ReportHeader(BaseModel):
    config: RunConfigRead
    version: str


class ReportRead(ReportHeader):
    command: str
    passed: Optional[bool] = None
    result: Any = None


class ErrorRecord(BaseModel):
    error: str
    detail: str
    exit_code: int
    context: Dict[str, Any] = {}
