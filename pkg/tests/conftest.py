import pytest

from app.approx_lab import xi_ball
from app.fibonacci import ea_sequence, extend_fib, padic_example, real_example


@pytest.fixture(scope="session")
def ea2():
    return ea_sequence(2, 20)


@pytest.fixture(scope="session")
def ea2_long():
    return ea_sequence(2, 24)


@pytest.fixture(scope="session")
def xi(ea2_long):
    # шар для xi последовательности E_2 с радиусом порядка X_24^-2
    return xi_ball(ea2_long).with_bits(256)


@pytest.fixture(scope="session")
def real_fib():
    return extend_fib(real_example(2, 1, 2), 20)


@pytest.fixture(scope="session")
def padic_fib():
    return extend_fib(padic_example(2, 2), 20)
