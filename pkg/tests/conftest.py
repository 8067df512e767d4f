import pytest

from rgroups import analyze, build_cartan, build_root_system, generate_weyl

_SYSTEMS = {}
_CONTEXTS = {}


def get_system(family, rank):
    key = (family, rank)
    if key not in _SYSTEMS:
        rs = build_root_system(build_cartan(family, rank))
        _SYSTEMS[key] = (rs, generate_weyl(rs))
    return _SYSTEMS[key]


def get_context(family, rank, theta=()):
    key = (family, rank, tuple(sorted(theta)))
    if key not in _CONTEXTS:
        rs, weyl = get_system(family, rank)
        _CONTEXTS[key] = analyze(rs, weyl, theta)
    return _CONTEXTS[key]


@pytest.fixture(scope="session")
def system():
    return get_system


@pytest.fixture(scope="session")
def context():
    return get_context
