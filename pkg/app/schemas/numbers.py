from pydantic import BaseModel
from typing import List, Optional


class RealBallBase(BaseModel):
    center: str
    radius: str
    bits: int


class RealBallRead(RealBallBase):
    class Config:
        from_attributes = True


class PadicBase(BaseModel):
    p: int
    valuation: int
    unit: str
    precision: int


class PadicRead(PadicBase):
    class Config:
        from_attributes = True


class GoldenRead(BaseModel):
    a: str
    b: str


class PolyRead(BaseModel):
    # старшая степень первой
    coeffs: List[str]
    degree: int
    height: Optional[str] = None
