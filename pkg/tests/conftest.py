import os

import pytest

import sskr_forge.sskr as sskr

FIXTURES = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, "fixtures"))


@pytest.fixture(scope="session")
def fixtures_dir() -> str:
    return FIXTURES


@pytest.fixture(scope="session")
def fx():
    def path(name: str) -> str:
        return os.path.join(FIXTURES, name)

    return path


@pytest.fixture()
def bucky(fx):
    return sskr.load(fx("bucky.sskr.json"))


@pytest.fixture()
def bucky_eqs(fx):
    return sskr.load(fx("bucky_eqs.sskr.json"))


@pytest.fixture()
def bucky_extended(fx):
    return sskr.load(fx("bucky_extended.sskr.json"))


@pytest.fixture()
def toy_sir(fx):
    return sskr.load(fx("toy_sir.sskr.json"))
