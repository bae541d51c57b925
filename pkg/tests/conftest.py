import pathlib

import pytest

from probud.harness import InstanceFile, parse_instance_file

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> InstanceFile:
    return parse_instance_file((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def ex1():
    f = load_fixture("ex1.pb")
    return (f, *f.to_model())


@pytest.fixture(scope="session")
def ex2():
    f = load_fixture("ex2.pb")
    return (f, *f.to_model())


@pytest.fixture(scope="session")
def ex3():
    f = load_fixture("ex3.pb")
    return (f, *f.to_model())
