import pathlib

import pytest

from smadl.analyzer import resolve
from smadl.parser import parse

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(scope="session")
def samples_dir() -> pathlib.Path:
    return SAMPLES


@pytest.fixture(scope="session")
def futweet_source() -> str:
    return (SAMPLES / "futweet.smadl").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def futweet_network(futweet_source):
    result = parse(futweet_source)
    assert result.network is not None, [d.message for d in result.diagnostics]
    return result.network


@pytest.fixture(scope="session")
def futweet_resolved(futweet_network):
    resolved, diagnostics = resolve(futweet_network)
    assert resolved is not None, [d.message for d in diagnostics]
    return resolved
