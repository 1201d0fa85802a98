from dataclasses import dataclass
from math import gcd
from typing import Iterator, Tuple


@dataclass(frozen=True)
class Point3:
    """
    Точка (x0, x1, x2) из Z^3 = симметричная матрица [[x0, x1], [x1, x2]]
    """
    x0: int
    x1: int
    x2: int

    @classmethod
    def of(cls, coords) -> "Point3":
        x0, x1, x2 = (int(c) for c in coords)
        return cls(x0, x1, x2)

    def __iter__(self) -> Iterator[int]:
        return iter((self.x0, self.x1, self.x2))

    def __getitem__(self, i: int) -> int:
        return (self.x0, self.x1, self.x2)[i]

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.x0, self.x1, self.x2)

    def det(self) -> int:
        return self.x0 * self.x2 - self.x1 * self.x1

    def matrix(self) -> "Mat2":
        return Mat2(self.x0, self.x1, self.x1, self.x2)

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x0 - other.x0, self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "Point3":
        return Point3(-self.x0, -self.x1, -self.x2)

    def scale(self, k: int) -> "Point3":
        return Point3(k * self.x0, k * self.x1, k * self.x2)

    def dot(self, other: "Point3") -> int:
        return self.x0 * other.x0 + self.x1 * other.x1 + self.x2 * other.x2

    def content(self) -> int:
        return gcd(gcd(self.x0, self.x1), self.x2)

    def norm(self) -> int:
        return max(abs(self.x0), abs(self.x1), abs(self.x2))

    def is_zero(self) -> bool:
        return self.x0 == 0 and self.x1 == 0 and self.x2 == 0


@dataclass(frozen=True)
class Mat2:
    """
    Целочисленная матрица 2x2, построчно [[a, b], [c, d]]
    """
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def of(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __mul__(self, other: "Mat2") -> "Mat2":
        if isinstance(other, int):
            return Mat2(self.a * other, self.b * other, self.c * other, self.d * other)
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    __rmul__ = lambda self, k: self * k

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def adjugate(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def is_symmetric(self) -> bool:
        return self.b == self.c

    def to_point(self) -> Point3:
        """
        Только для симметричных матриц
        """
        if not self.is_symmetric():
            raise ValueError("матрица не симметрична")
        return Point3(self.a, self.b, self.d)

    def norm(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def entries(self):
        return (self.a, self.b, self.c, self.d)


J = Mat2(0, 1, -1, 0)
