from pydantic import BaseModel, Field
from typing import List, Optional


class RunConfigBase(BaseModel):
    presets: List[str] = []
    index_cap: int = Field(default=28, ge=3)
    bits: int = Field(default=256, ge=32)
    tolerance: str = "1/1000000"
    seed: int = 20240601
    threads: int = Field(default=1, ge=1)
    out: Optional[str] = None
    csv: Optional[str] = None


class RunConfigCreate(RunConfigBase):
    log_level: Optional[str] = None


class RunConfigRead(RunConfigBase):
    class Config:
        from_attributes = True
