import logging
import sys
from fractions import Fraction
from functools import wraps
from typing import Optional

import click
from dotenv import load_dotenv

from app import approx_lab, duality, fibonacci, thresholds
from app.config import load_run_config, settings
from app.errors import EXIT_FAIL, EXIT_OK, DiophError, PreconditionViolated
from app.models import EaSeq, FibSeq, IntPoly, Place
from app.presets import parse_preset
from app.storage import (
    error_record, load_system, make_report, read_sequence, report_json, write_csv, write_sequence, write_text,
)

load_dotenv()

logger = logging.getLogger("app")


def _banner(*lines: str):
    click.echo("\n" + "=" * 60, err=True)
    for line in lines:
        click.echo(line, err=True)
    click.echo("=" * 60, err=True)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except ValueError:
        raise PreconditionViolated(f"не число: {text}")


def _poly(text: str) -> IntPoly:
    try:
        return IntPoly.parse(text)
    except ValueError as exc:
        raise PreconditionViolated(f"не удалось разобрать многочлен {text}: {exc}")


def _ea(seq) -> EaSeq:
    if not isinstance(seq, EaSeq):
        raise PreconditionViolated("команда работает только с последовательностью E_a")
    return seq


def _fib(seq) -> FibSeq:
    if not isinstance(seq, FibSeq):
        raise PreconditionViolated("команда работает только с последовательностью Фибоначчи")
    return seq


def _range(text: str) -> range:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise PreconditionViolated(f"диапазон задаётся как A..B, получено {text}")
    return range(lo, hi + 1)


def emit(ctx: click.Context, command: str, result, passed: Optional[bool] = None, out: Optional[str] = None):
    """
    JSON-отчёт с заголовком конфигурации в stdout и в файл --out
    """
    config = ctx.obj
    report = make_report(command, result, config, passed)
    text = report_json(report)
    click.echo(text)
    write_text(text, out or config.out)
    if config.csv and isinstance(result, dict) and isinstance(result.get("rows"), list):
        write_csv(result["rows"], config.csv)
    ctx.exit(EXIT_FAIL if passed is False else EXIT_OK)


def command(fn):
    """
    Ошибки DiophError превращаются в JSON-запись и код завершения
    """
    @wraps(fn)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        try:
            return fn(ctx, *args, **kwargs)
        except DiophError as exc:
            logger.error("%s: %s", type(exc).__name__, exc.detail)
            click.echo(error_record(exc).model_dump_json(indent=2))
            ctx.exit(exc.exit_code)
    return wrapper


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON-файл RunConfig")
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--bits", type=click.IntRange(min=32), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--log-level", default=None,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--out", default=None, help="файл для JSON-отчёта")
@click.option("--csv", "csv_path", default=None, help="CSV-проекция строк отчёта")
@click.pass_context
def cli(ctx, config_path, threads, bits, seed, log_level, out, csv_path):
    """
    Точные эксперименты по совместным диофантовым приближениям
    """
    settings.reload()
    config = load_run_config(config_path, threads=threads, bits=bits, seed=seed, out=out, csv=csv_path)
    settings.apply(config)
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = config


# ПОСЛЕДОВАТЕЛЬНОСТИ
@cli.command()
@click.argument("kind", type=click.Choice(["ea", "fib"]))
@click.option("--preset", required=True, help="ea(2), real_example(2,1,2), padic_example(2,2)")
@click.option("--upto", type=int, required=True)
@click.option("--out", default=None)
@command
def gen(ctx, kind, preset, upto, out):
    """
    Строит последовательность и пишет файл с заголовком конфигурации
    """
    config = ctx.obj
    if upto > config.index_cap:
        raise PreconditionViolated(f"upto={upto} больше предела {config.index_cap}", cap=config.index_cap)
    name, args = parse_preset(preset)
    if kind == "ea":
        if name != "ea":
            raise PreconditionViolated(f"пресет {preset} не задаёт E_a")
        seq = fibonacci.ea_sequence(args[0] if args else 2, upto)
    else:
        if name == "real_example":
            base = fibonacci.real_example(*args)
        elif name == "padic_example":
            base = fibonacci.padic_example(*args)
        else:
            raise PreconditionViolated(f"пресет {preset} не задаёт последовательность Фибоначчи")
        seq = fibonacci.extend_fib(base, upto)
    config = config.model_copy(update={"presets": [preset]})
    text = write_sequence(seq, out or config.out, config)
    click.echo(text)
    _banner(f"ПОСЛЕДОВАТЕЛЬНОСТЬ {preset} ПОСТРОЕНА", f"Членов: {upto}")


@cli.command()
@click.argument("check", type=click.Choice(["identities", "growth", "mod-a", "w2"]))
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None)
@command
def verify(ctx, check, seq_path, out):
    seq = read_sequence(seq_path)
    if check == "identities":
        if isinstance(seq, EaSeq):
            result = fibonacci.verify_identities(seq, range(3, seq.upto + 1))
        else:
            checks = [fibonacci.det_power_check(seq), fibonacci.sandwich_check(seq), fibonacci.y_recurrence_check(seq)]
            if seq.prime:
                checks.append(fibonacci.padic_norm_check(seq))
            result = {"check": "identities", "checks": checks, "passed": all(c["passed"] for c in checks)}
    elif check == "growth":
        result = fibonacci.growth_check(_fib(seq))
    elif check == "mod-a":
        result = fibonacci.mod_a_check(_fib(seq))
    else:
        result = approx_lab.w2_candidate_check(_ea(seq), range(3, seq.upto + 1))
    # w2 рекомендательная, на код завершения не влияет
    emit(ctx, f"verify {check}", result, None if check == "w2" else result["passed"], out)


@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--place", default="inf")
@click.option("--bits", type=int, default=None)
@click.option("--index", type=int, default=None)
@click.option("--strict/--no-strict", default=False)
@click.option("--out", default=None)
@command
def limit(ctx, seq_path, place, bits, index, strict, out):
    seq = read_sequence(seq_path)
    point = fibonacci.limit_point(seq, Place.parse(place), bits=bits or ctx.obj.bits, index=index, strict=strict)
    result = {
        "place": point.place,
        "index": point.index,
        "xi": point.xi,
        "coords": point.coords,
        "constant": point.constant,
        "det": point.det(),
    }
    if isinstance(seq, EaSeq):
        result["det_triples_nonzero"] = all(d != 0 for d in fibonacci.det_triples(seq))
    emit(ctx, "limit", result, None, out)


# ДРОБНЫЕ ЧАСТИ И ЦЕПНЫЕ ДРОБИ
@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--poly", required=True, help="коэффициенты, старший первым: 1,0,0,0")
@click.option("--range", "k_range", default=None, help="A..B")
@click.option("--out", default=None)
@command
def frac(ctx, seq_path, poly, k_range, out):
    seq = _ea(read_sequence(seq_path))
    ks = _range(k_range) if k_range else range(3, seq.upto + 1)
    series = approx_lab.frac_series(seq, _poly(poly), ks)
    result = {
        "poly": poly,
        "rows": [{"k": k, "value": v, "conclusive": k not in series.inconclusive} for k, v in series.values],
        "differences": approx_lab.class_difference_bounds(series, seq),
    }
    emit(ctx, "frac", result, None, out)


@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--poly", required=True)
@click.option("--out", default=None)
@command
def accum(ctx, seq_path, poly, out):
    seq = _ea(read_sequence(seq_path))
    series = approx_lab.frac_series(seq, _poly(poly), range(3, seq.upto + 1))
    points = approx_lab.accumulation_points(series)
    result = {"poly": poly, "rows": points, "differences": approx_lab.class_difference_bounds(series, seq)}
    emit(ctx, "accum", result, all(p.positive and p.converged for p in points), out)


def _value_from(text: str):
    """
    Число "p/q" или десятичная запись; xi:FILE; accum:FILE:COEFFS:L
    """
    kind, _, rest = text.partition(":")
    if kind == "xi":
        return approx_lab.xi_ball(_ea(read_sequence(rest)))
    if kind == "accum":
        path, coeffs, l = rest.rsplit(":", 2)
        seq = _ea(read_sequence(path))
        series = approx_lab.frac_series(seq, _poly(coeffs), range(3, seq.upto + 1))
        for point in approx_lab.accumulation_points(series):
            if point.l == int(l):
                return point.limit
        raise PreconditionViolated(f"нет точки накопления с l={l}")
    return _fraction(text)


@cli.command()
@click.option("--value-from", "source", required=True)
@click.option("--count", type=int, default=12)
@click.option("--out", default=None)
@command
def cf(ctx, source, count, out):
    alpha = _value_from(source)
    expansion = approx_lab.cf_expand(alpha, count)
    bounds = approx_lab.cf_bounds_check(alpha, expansion)
    result = {"value": alpha, "expansion": expansion, "bounds": bounds}
    emit(ctx, "cf", result, not any(b is False for b in bounds), out)


@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--poly", required=True)
@click.option("--l", "l", type=int, default=0)
@click.option("--out", default=None)
@command
def deg3(ctx, seq_path, poly, l, out):
    seq = _ea(read_sequence(seq_path))
    result = approx_lab.verify_deg3_convergents(seq, _poly(poly), l, range(3, seq.upto + 1))
    emit(ctx, "deg3", result, result["passed"], out)


@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--poly", required=True)
@click.option("--l", "l", type=int, default=0)
@click.option("--out", default=None)
@command
def deg4(ctx, seq_path, poly, l, out):
    seq = _ea(read_sequence(seq_path))
    result = approx_lab.verify_deg4_accumulation(seq, _poly(poly), l, range(3, seq.upto + 1))
    emit(ctx, "deg4", result, result["passed"], out)


@cli.command()
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--poly", required=True)
@click.option("--max-height", type=int, default=50)
@click.option("--decades", type=int, default=4)
@click.option("--samples", type=int, default=1000)
@click.option("--algebraic/--no-algebraic", default=False, help="расстояния от xi до корней R + P для найденных P")
@click.option("--out", default=None)
@command
def alt0(ctx, seq_path, poly, max_height, decades, samples, algebraic, out):
    seq = _ea(read_sequence(seq_path))
    R = _poly(poly)
    result = approx_lab.alt0_scan(
        seq, R, max_height=max_height, decades_to=decades, samples=samples, seed=ctx.obj.seed,
    )
    if algebraic:
        result["algebraic"] = approx_lab.algebraic_distance_scan(seq, R, [r["poly"] for r in result["decades"]])
    emit(ctx, "alt0", result, result["positive"] and result["stable"], out)


# СИСТЕМЫ ПРИБЛИЖЕНИЙ
def _xs(values) -> list:
    if not values:
        raise PreconditionViolated("нужно хотя бы одно значение --X")
    return [_fraction(v) for v in values]


@cli.command()
@click.option("--system", "system_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--X", "X", multiple=True, required=True)
@click.option("--cap", type=int, default=None)
@click.option("--out", default=None)
@command
def search(ctx, system_path, X, cap, out):
    system = load_system(system_path)
    rows = []
    for x in _xs(X):
        found = duality.enumerate_solutions(system, x, norm_cap=cap)
        rows.append({
            "X": x,
            "count": len(found.solutions),
            "minimal": found.minimal(),
            "primitive": found.primitive,
            "truncated": found.truncated,
            "zs": duality.check_zs_factoring(found, system)["passed"],
        })
    emit(ctx, "search", {"rows": rows}, all(r["zs"] for r in rows), out)


@cli.command()
@click.option("--system", "system_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--X", "X", multiple=True, required=True)
@click.option("--out", default=None)
@command
def minkowski(ctx, system_path, X, out):
    system = load_system(system_path)
    rows = [duality.minkowski_construct(system, x) for x in _xs(X)]
    emit(ctx, "minkowski", {"rows": rows}, all(r["checks"]["ok"] for r in rows), out)


@cli.command()
@click.option("--system", "system_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--X", "X", multiple=True, required=True)
@click.option("--budget", type=int, default=None)
@click.option("--out", default=None)
@command
def dualize(ctx, system_path, X, budget, out):
    system = load_system(system_path)
    rows = []
    for x in _xs(X):
        dual = duality.dual_points(system, x, budget=budget)
        rows.append({"X": x, "points": dual.points, "relax": dual.relax, "det": dual.det, "lemma": dual.lemma})
    emit(ctx, "dualize", {"rows": rows}, True, out)


@cli.command("approx-poly")
@click.option("--system", "system_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--R", "R", required=True, help="коэффициенты R, старший первым")
@click.option("--X", "X", multiple=True, required=True)
@click.option("--c1", default=None)
@click.option("--out", default=None)
@command
def approx_poly(ctx, system_path, R, X, c1, out):
    """
    dual_points -> build_polynomial -> extract_roots
    """
    system = load_system(system_path)
    c1 = _fraction(c1) if c1 else None
    series = duality.approximation_series(system, _poly(R), _xs(X), c1=c1)
    rows = [
        {
            "X": run["X"],
            "F": run["F"],
            "height": run["polynomial"]["height"],
            "checks": run["polynomial"]["checks"],
            "roots": run["roots"],
        }
        for run in series["runs"]
    ]
    passed = all(r["checks"]["integral"] for r in rows)
    emit(ctx, "approx-poly", {"c1": series["c1"], "rows": rows, "fits": series["fits"]}, passed, out)


# ПОРОГОВЫЕ КОНСТАНТЫ
@cli.command("thresholds")
@click.option("--which", type=click.Choice([thresholds.REAL, thresholds.PADIC]), required=True)
@click.option("--tol", default="1e-6")
@click.option("--out", default=None)
@command
def thresholds_cmd(ctx, which, tol, out):
    rows = thresholds.threshold_table(which, _fraction(tol))
    grid = thresholds.grid_check(thresholds.ThresholdFunctions(which))
    _banner(*(f"{r['name']}: {r['value']}" for r in rows))
    emit(ctx, "thresholds", {"rows": rows, "grid": grid}, grid["passed"], out)


if __name__ == "__main__":
    cli()
