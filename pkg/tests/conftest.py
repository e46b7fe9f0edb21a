import pytest

from gelfand import ProblemConfig, make_ah, parse_weight, trace_curve


@pytest.fixture(scope="session")
def cfg3():
    return ProblemConfig(dim=3, weight=parse_weight("const"))


@pytest.fixture(scope="session")
def cfg10_h0():
    return ProblemConfig(dim=10, weight=make_ah(0.0, 10))


@pytest.fixture(scope="session")
def cfg10_h40():
    return ProblemConfig(dim=10, weight=make_ah(40.0, 10))


# the three reference curves are expensive; trace once per session
@pytest.fixture(scope="session")
def curve3(cfg3):
    return trace_curve(cfg3, -5.0, 40.0, 0.25)


@pytest.fixture(scope="session")
def curve10_h0(cfg10_h0):
    return trace_curve(cfg10_h0, -2.0, 40.0, 0.25)


@pytest.fixture(scope="session")
def curve10_h40(cfg10_h40):
    return trace_curve(cfg10_h40, -5.0, 40.0, 0.25)
