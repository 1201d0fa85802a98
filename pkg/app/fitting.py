import math
from typing import Dict, Optional, Sequence

import numpy as np


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> Dict[str, Optional[float]]:
    """
    Наклон и сдвиг прямой log y = slope * log x + intercept методом наименьших квадратов.
    xs, ys передаются как натуральные логарифмы
    """
    if len(xs) < 2:
        return {"slope": None, "intercept": None, "points": len(xs)}
    slope, intercept = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return {"slope": float(slope), "intercept": float(intercept), "points": len(xs)}


def log_of_int(n: int) -> float:
    """
    Натуральный логарифм целого любого размера
    """
    n = abs(n)
    if n == 0:
        return -math.inf
    shift = max(n.bit_length() - 1000, 0)
    return math.log(n >> shift) + shift * math.log(2)


def log_of_fraction(q) -> float:
    return log_of_int(q.numerator) - log_of_int(q.denominator)


def linear_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    if len(xs) < 2:
        return None
    return float(np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)[0])
