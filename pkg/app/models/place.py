from dataclasses import dataclass
from typing import Optional, Union

from sympy import isprime

from app.errors import DomainError


@dataclass(frozen=True)
class Place:
    """
    Место поля Q: бесконечное (p is None) или p-адическое
    """
    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not isprime(int(self.p)):
            raise DomainError(f"{self.p} не является простым числом", p=self.p)

    @classmethod
    def infinity(cls) -> "Place":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "Place":
        return cls(int(p))

    @classmethod
    def parse(cls, text: Union[str, int]) -> "Place":
        if isinstance(text, int):
            return cls.prime(text)
        text = text.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return cls.infinity()
        try:
            return cls.prime(int(text))
        except ValueError:
            raise DomainError(f"неизвестное место: {text}")

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


INF = Place.infinity()
