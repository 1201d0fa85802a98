from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Union

from .numbers import PadicBase


class SystemSpecBase(BaseModel):
    n: int = Field(ge=1)
    S: List[int] = []
    # inf: ссылка на пресет или десятичная запись; p: пресет, дробь или p-адическое число
    xi: Dict[str, Union[str, PadicBase]]
    lam: Dict[str, str] = Field(alias="lambda")
    c: str
    bits: Optional[int] = None
    upto: int = 20

    class Config:
        populate_by_name = True


class SystemSpecRead(SystemSpecBase):
    class Config:
        from_attributes = True
