from pydantic import BaseModel
from typing import Dict, List, Literal, Optional


class SequenceTerm(BaseModel):
    i: int
    w: List[List[str]]
    y: List[str]
    det_w: str
    eps: Optional[int] = None


class SequenceFileBase(BaseModel):
    kind: Literal["ea", "fib"]
    params: Dict[str, int] = {}
    terms: List[SequenceTerm]


class SequenceFileCreate(SequenceFileBase):
    preset: str
    # симметризатор N для последовательностей Фибоначчи
    symmetrizer: Optional[List[List[str]]] = None
    prime: Optional[int] = None


class SequenceFileRead(SequenceFileCreate):
    config: Optional[dict] = None
    version: Optional[str] = None

    class Config:
        from_attributes = True
