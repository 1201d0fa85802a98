import json
from fractions import Fraction

import pytest

from app.errors import PreconditionViolated, VerificationFailed
from app.models import FibSeq, Golden, IntPoly, Point3
from app.storage import (
    error_record, load_system, parse_exponent, read_sequence, to_jsonable, write_sequence,
)


@pytest.mark.parametrize("text, expected", [
    ("3/2", Fraction(3, 2)),
    ("0.2", Fraction(1, 5)),
    ("-1", Fraction(-1)),
    ("1/gamma", Golden(Fraction(-1), Fraction(1))),
    ("-1+1*gamma", Golden(Fraction(-1), Fraction(1))),
    ("gamma", Golden(Fraction(0), Fraction(1))),
    ("2-gamma", Golden(Fraction(2), Fraction(-1))),
])
def test_parse_exponent(text, expected):
    assert parse_exponent(text) == expected


@pytest.mark.parametrize("text", ["abc", "gamma^2", "1/0x"])
def test_parse_exponent_rejects_garbage(text):
    with pytest.raises(PreconditionViolated):
        parse_exponent(text)


def test_ea_sequence_file(ea2, tmp_path):
    path = tmp_path / "ea.json"
    write_sequence(ea2, str(path))
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["kind"] == "ea"
    assert data["terms"][6]["y"] == ["208", "129", "80"]
    assert data["terms"][6]["eps"] == -1
    assert read_sequence(str(path)) == ea2


def test_fib_sequence_file(real_fib, tmp_path):
    path = tmp_path / "fib.json"
    write_sequence(real_fib, str(path))
    seq = read_sequence(str(path))
    assert isinstance(seq, FibSeq)
    assert seq.w == real_fib.w
    assert seq.N == real_fib.N
    assert seq.y == real_fib.y


def test_integers_longer_than_str_digit_limit(real_fib, tmp_path):
    assert max(len(str(abs(c))) for w in real_fib.w for row in w.rows() for c in row) > 4300
    big = -(7 ** 6000)
    assert int(to_jsonable(big)) == big
    assert Point3.of((str(big), "1", "0")).x0 == big
    path = tmp_path / "fib.json"
    write_sequence(real_fib, str(path))
    assert read_sequence(str(path)).w[-1] == real_fib.w[-1]


def test_missing_term_is_reported(ea2, tmp_path):
    path = tmp_path / "ea.json"
    write_sequence(ea2, str(path))
    data = json.loads(path.read_text(encoding="utf-8"))
    del data["terms"][4]
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(VerificationFailed):
        read_sequence(str(path))


def test_unreadable_sequence(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(PreconditionViolated):
        read_sequence(str(path))
    with pytest.raises(PreconditionViolated):
        read_sequence(str(tmp_path / "missing.json"))


def test_to_jsonable_keeps_exact_numbers():
    data = {
        "n": 10 ** 30,
        "q": Fraction(-7, 3),
        "point": Point3.of((1, 2, 3)),
        "poly": IntPoly.parse("1,0,-2"),
        "golden": Golden(Fraction(-1), Fraction(1)),
        "flag": True,
        "nested": [(1, Fraction(1, 2))],
    }
    assert to_jsonable(data) == {
        "n": "1" + "0" * 30,
        "q": "-7/3",
        "point": ["1", "2", "3"],
        "poly": ["1", "0", "-2"],
        "golden": {"a": "-1", "b": "1"},
        "flag": True,
        "nested": [["1", "1/2"]],
    }


def test_error_record():
    record = error_record(VerificationFailed("сломано тождество", index=9))
    assert record.error == "VerificationFailed"
    assert record.exit_code == 1
    assert record.context == {"index": "9"}


def test_load_system(tmp_path):
    path = tmp_path / "system.json"
    path.write_text(json.dumps({
        "n": 2,
        "S": [2],
        "xi": {"inf": "1.41421356237309504880", "2": "1/3"},
        "lambda": {"inf": "1/5", "2": "3/10"},
        "c": "3",
    }), encoding="utf-8")
    system = load_system(str(path))
    assert system.n == 2
    assert system.primes == [2]
    assert system.lam_inf == Fraction(1, 5)
    assert system.lam_p[2] == Fraction(3, 10)
    assert system.c == 3
    assert system.xi_inf.contains(Fraction(141421356237309504880, 10 ** 20))
    assert (3 * system.xi_p[2] - 1).is_zero_marker()


def test_load_system_with_golden_exponent(tmp_path):
    path = tmp_path / "system.json"
    path.write_text(json.dumps({
        "n": 2, "xi": {"inf": "0.62018"}, "lambda": {"inf": "1/gamma"}, "c": "1/1000",
    }), encoding="utf-8")
    assert load_system(str(path)).lam_inf == Golden(Fraction(-1), Fraction(1))


def test_load_system_needs_all_places(tmp_path):
    path = tmp_path / "system.json"
    path.write_text(json.dumps({
        "n": 1, "S": [3], "xi": {"inf": "0.5"}, "lambda": {"inf": "1", "3": "1"}, "c": "1",
    }), encoding="utf-8")
    with pytest.raises(PreconditionViolated):
        load_system(str(path))
