from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.models.lattice import Mat2, Point3
from app.models.place import Place


def ea_matrix(a: int) -> Mat2:
    return Mat2(a, 1, -1, 0)


def ea_step_matrix(a: int, k: int) -> Mat2:
    """
    S_k = M для чётного k и транспонированная M для нечётного
    """
    m = ea_matrix(a)
    return m if k % 2 == 0 else m.transpose()


@dataclass(frozen=True)
class FibSeq:
    """
    Допустимая последовательность Фибоначчи w_{i+2} = w_{i+1} w_i
    с симметризатором N и точками y_i = w_i N_i
    """
    w: Tuple[Mat2, ...]
    N: Mat2
    y: Tuple[Point3, ...] = ()
    name: str = "fib"
    params: Dict[str, int] = field(default_factory=dict)
    # для p-адических пресетов
    prime: Optional[int] = None

    def n_i(self, i: int) -> Mat2:
        return self.N if i % 2 == 0 else self.N.transpose()

    @property
    def upto(self) -> int:
        return len(self.w) - 1


@dataclass(frozen=True)
class EaSeq:
    """
    Последовательность x_1, x_2, ... симметричных унимодулярных матриц
    x_{k+1} = x_k S_k x_{k-1}. x[0] хранит x_1
    """
    a: int
    x: Tuple[Point3, ...]

    def term(self, k: int) -> Point3:
        if k < 1 or k > len(self.x):
            raise IndexError(f"x_{k} не вычислен (есть 1..{len(self.x)})")
        return self.x[k - 1]

    def eps(self, k: int) -> int:
        return self.term(k).det()

    def step(self, k: int) -> Mat2:
        return ea_step_matrix(self.a, k)

    @property
    def upto(self) -> int:
        return len(self.x)

    def norm(self, k: int) -> int:
        return self.term(k).norm()

    def indices(self) -> range:
        return range(1, len(self.x) + 1)


@dataclass(frozen=True)
class DeltaSeries:
    place: Place
    values: Tuple[Fraction, ...]
    # log delta_{i+1} / log delta_i, None где не определено
    exponent_ratios: Tuple[Optional[float], ...] = ()


@dataclass(frozen=True)
class AbcTriple:
    """
    Миноры 2x2 пары (x_k, x_{k+1})
    """
    k: int
    a: int
    b: int
    c: int

    @classmethod
    def of(cls, seq: EaSeq, k: int) -> "AbcTriple":
        x, y = seq.term(k), seq.term(k + 1)
        return cls(
            k,
            x.x0 * y.x1 - x.x1 * y.x0,
            -(x.x0 * y.x2 - x.x2 * y.x0),
            x.x1 * y.x2 - x.x2 * y.x1,
        )

    def as_list(self) -> List[int]:
        return [self.a, self.b, self.c]


@dataclass(frozen=True)
class LimitPoint:
    """
    Предельная точка (1, xi, xi^2) в месте place с оценкой погрешности
    """
    place: Place
    index: int
    coords: Tuple[object, ...]
    constant: Fraction

    @property
    def xi(self):
        return self.coords[1]

    def det(self):
        """
        det(y) = y_0 y_2 - y_1^2, должен содержать ноль
        """
        y0, y1, y2 = self.coords
        return y0 * y2 - y1 * y1
