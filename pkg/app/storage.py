import csv
import dataclasses
import json
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from app.config import ARTIFACT_VERSION, settings
from app.errors import DiophError, PreconditionViolated, VerificationFailed
from app.fibonacci import ea_sequence, extend_fib, limit_point, padic_example, real_example
from app.models import (
    ApproxSystem, EaSeq, FibSeq, Golden, IntPoly, Mat2, PadicNumber, Place, Point3, RealBall,
)
from app.presets import parse_preset
from app.schemas import (
    ErrorRecord, PadicBase, PadicRead, RealBallRead, ReportRead, RunConfigRead, SequenceFileCreate,
    SequenceFileRead, SequenceTerm, SystemSpecRead,
)

logger = logging.getLogger(__name__)

_GOLDEN_RE = re.compile(r"^(?P<a>[-+]?[\d/.]+(?=[-+]))?(?P<b>[-+]?[\d/.]*)\*?gamma$")

DEFAULT_PADIC_DIGITS = 64


# ПРЕОБРАЗОВАНИЕ В JSON
def _number(q: Union[int, Fraction]) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def ball_to_schema(ball: RealBall, digits: int = 40) -> RealBallRead:
    return RealBallRead(center=ball.decimal(digits), radius=ball.radius_decimal(), bits=ball.bits)


def padic_to_schema(x: PadicNumber) -> PadicRead:
    return PadicRead(p=x.p, valuation=x.valuation, unit=str(x.unit), precision=x.precision)


def to_jsonable(obj: Any) -> Any:
    """
    Рекурсивное преобразование результатов в JSON; целые и дроби как строки
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, Fraction, np.integer)):
        return _number(int(obj) if isinstance(obj, np.integer) else obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, RealBall):
        return ball_to_schema(obj).model_dump()
    if isinstance(obj, PadicNumber):
        return padic_to_schema(obj).model_dump()
    if isinstance(obj, Golden):
        return {"a": _number(obj.a), "b": _number(obj.b)}
    if isinstance(obj, Point3):
        return [str(c) for c in obj]
    if isinstance(obj, Mat2):
        return [[str(c) for c in row] for row in obj.rows()]
    if isinstance(obj, IntPoly):
        return [str(c) for c in obj.high_first()]
    if isinstance(obj, Place):
        return str(obj)
    if hasattr(obj, "model_dump"):
        return to_jsonable(obj.model_dump())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in ("name", "positive", "period"):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset, range, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def write_text(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info("записан файл %s", out)


# ОТЧЁТЫ
def make_report(command: str, result: Any, config: RunConfigRead, passed: Optional[bool] = None) -> ReportRead:
    return ReportRead(
        config=config,
        version=ARTIFACT_VERSION,
        command=command,
        passed=passed,
        result=to_jsonable(result),
    )


def report_json(report: ReportRead) -> str:
    return json.dumps(report.model_dump(), indent=2, ensure_ascii=False)


def error_record(exc: DiophError) -> ErrorRecord:
    data = exc.to_dict()
    return ErrorRecord(
        error=type(exc).__name__,
        detail=exc.detail,
        exit_code=exc.exit_code,
        context=to_jsonable(data.get("context", {})),
    )


def write_csv(rows: Iterable[Dict[str, Any]], path: str) -> None:
    """
    Плоская CSV-проекция строк отчёта; вложенные значения как JSON
    """
    rows = [to_jsonable(r) for r in rows]
    fields: List[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: v if isinstance(v, (str, float)) or v is None else json.dumps(v) for k, v in row.items()})


# ФАЙЛЫ ПОСЛЕДОВАТЕЛЬНОСТЕЙ
def _matrix_rows(m: Mat2) -> List[List[str]]:
    return [[str(c) for c in row] for row in m.rows()]


def _mat(rows: List[List[str]]) -> Mat2:
    (a, b), (c, d) = rows
    return Mat2(int(a), int(b), int(c), int(d))


def sequence_to_schema(seq: Union[EaSeq, FibSeq], config: Optional[RunConfigRead] = None) -> SequenceFileRead:
    if isinstance(seq, EaSeq):
        terms = [
            SequenceTerm(
                i=k,
                w=_matrix_rows(x.matrix()),
                y=[str(c) for c in x],
                det_w=str(x.det()),
                eps=x.det(),
            )
            for k, x in zip(seq.indices(), seq.x)
        ]
        body = SequenceFileCreate(kind="ea", params={"a": seq.a}, terms=terms, preset=f"ea({seq.a})")
    else:
        terms = [
            SequenceTerm(i=i, w=_matrix_rows(w), y=[str(c) for c in seq.y[i]] if i < len(seq.y) else [], det_w=str(w.det()))
            for i, w in enumerate(seq.w)
        ]
        body = SequenceFileCreate(
            kind="fib",
            params=dict(seq.params),
            terms=terms,
            preset=seq.name,
            symmetrizer=_matrix_rows(seq.N),
            prime=seq.prime,
        )
    return SequenceFileRead(
        **body.model_dump(),
        config=config.model_dump() if config else None,
        version=ARTIFACT_VERSION,
    )


def write_sequence(seq: Union[EaSeq, FibSeq], path: Optional[str], config: Optional[RunConfigRead] = None) -> str:
    text = json.dumps(sequence_to_schema(seq, config).model_dump(), indent=2, ensure_ascii=False)
    write_text(text, path)
    return text


def read_sequence(path: str) -> Union[EaSeq, FibSeq]:
    """
    Читает файл последовательности без пересчёта: проверки выполняет verify
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = SequenceFileRead(**json.load(fh))
    except (OSError, ValueError) as exc:
        raise PreconditionViolated(f"не удалось прочитать последовательность {path}: {exc}")
    if data.kind == "ea":
        points = []
        for expected, term in enumerate(sorted(data.terms, key=lambda t: t.i), start=1):
            if term.i != expected:
                raise VerificationFailed(f"пропущен член x_{expected}", index=expected)
            points.append(Point3.of(term.y))
        return EaSeq(data.params["a"], tuple(points))
    if data.symmetrizer is None:
        raise PreconditionViolated("в файле нет симметризатора N")
    terms = sorted(data.terms, key=lambda t: t.i)
    w = tuple(_mat(t.w) for t in terms)
    y = tuple(Point3.of(t.y) for t in terms if t.y)
    return FibSeq(w, _mat(data.symmetrizer), y, data.preset, dict(data.params), data.prime)


# СИСТЕМЫ ПРИБЛИЖЕНИЙ
def parse_exponent(text: str):
    """
    "3/2", "0.2", "gamma", "1/gamma", "-1+1*gamma" -> Fraction или Golden
    """
    text = str(text).strip().replace(" ", "")
    if text == "1/gamma":
        return Golden(Fraction(-1), Fraction(1))
    if "gamma" not in text:
        try:
            return Fraction(text)
        except ValueError:
            raise PreconditionViolated(f"не удалось разобрать показатель {text}")
    match = _GOLDEN_RE.match(text)
    if not match:
        raise PreconditionViolated(f"не удалось разобрать показатель {text}")
    a = Fraction(match.group("a") or 0)
    b = match.group("b")
    b = Fraction(-1) if b == "-" else Fraction(1) if b in ("", "+") else Fraction(b)
    value = Golden(a, b)
    return value.a if value.is_rational() else value


def _decimal_ball(text: str, bits: int) -> RealBall:
    """
    Десятичная запись с погрешностью в половину последнего разряда; дробь p/q точна
    """
    if "/" in text:
        return RealBall.exact(Fraction(text), bits)
    digits = len(text.split(".", 1)[1]) if "." in text else 0
    return RealBall.from_center_radius(Fraction(text), Fraction(1, 2 * 10 ** digits), bits)


def _real_target(ref: str, bits: int, upto: int) -> RealBall:
    if ref[0].isdigit() or ref[0] in "+-.":
        return _decimal_ball(ref, bits)
    kind, args = parse_preset(ref)
    if kind == "ea":
        seq = ea_sequence(args[0] if args else 2, upto)
    elif kind == "real_example":
        seq = extend_fib(real_example(*args), upto)
    else:
        raise PreconditionViolated(f"пресет {ref} не задаёт вещественную цель")
    return limit_point(seq, bits=bits, strict=False).xi.with_bits(bits)


def _padic_target(ref: Union[str, PadicBase], p: int, upto: int) -> PadicNumber:
    if isinstance(ref, PadicBase):
        if ref.p != p:
            raise PreconditionViolated(f"p-адическое число задано для p={ref.p}, ожидалось {p}")
        return PadicNumber(p, ref.valuation, int(ref.unit), ref.precision)
    if ref[0].isdigit() or ref[0] in "+-":
        return PadicNumber.from_rational(Fraction(ref), p, DEFAULT_PADIC_DIGITS)
    kind, args = parse_preset(ref)
    if kind != "padic_example":
        raise PreconditionViolated(f"пресет {ref} не задаёт p-адическую цель")
    params = args or [p, 2]
    if params[0] != p:
        raise PreconditionViolated(f"пресет {ref} задан для p={params[0]}", p=p)
    return limit_point(extend_fib(padic_example(*params), upto), Place.prime(p)).xi


def system_from_schema(spec: SystemSpecRead) -> ApproxSystem:
    bits = spec.bits or settings.default_bits
    if "inf" not in spec.xi or "inf" not in spec.lam:
        raise PreconditionViolated("нужны xi.inf и lambda.inf")
    xi_inf = _real_target(str(spec.xi["inf"]), bits, spec.upto)
    xi_p, lam_p = {}, {}
    for p in spec.S:
        key = str(p)
        if key not in spec.xi or key not in spec.lam:
            raise PreconditionViolated(f"для p={p} нужны xi и lambda", p=p)
        xi_p[p] = _padic_target(spec.xi[key], p, spec.upto)
        lam_p[p] = parse_exponent(spec.lam[key])
    return ApproxSystem(spec.n, xi_inf, parse_exponent(spec.lam["inf"]), Fraction(spec.c), xi_p, lam_p)


def load_system(path: str) -> ApproxSystem:
    """
    Файл системы: {n, S, xi: {inf, p}, lambda: {inf, p}, c}
    """
    try:
        with open(path, encoding="utf-8") as fh:
            spec = SystemSpecRead(**json.load(fh))
    except (OSError, ValueError) as exc:
        raise PreconditionViolated(f"не удалось прочитать систему {path}: {exc}")
    system = system_from_schema(spec)
    logger.info("система n=%d, S=%s загружена из %s", system.n, system.primes, path)
    return system
