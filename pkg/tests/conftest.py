import pytest

from rdmkit.fixtures import data_path, load, query_path


LABELS = {
    "Oscar:1": "o1",
    "ActsIn:1": "a1",
    "ActsIn:2": "a2",
    "DirectedBy:1": "d1",
    "DirectedBy:2": "d2",
    "Spouse:1": "s1",
}


@pytest.fixture
def mcdormand():
    return load("qa_triangle", "mcdormand")


@pytest.fixture
def mcdormand_bag():
    return load("qa_triangle", "mcdormand_bag")


@pytest.fixture
def ecycle():
    return load("epath", "ecycle")


@pytest.fixture
def short_label():
    return LABELS.__getitem__


@pytest.fixture
def paths():
    return {
        "qa": str(query_path("qa_triangle")),
        "q": str(query_path("q_triangle")),
        "chain2": str(query_path("chain2")),
        "epath": str(query_path("epath")),
        "mcdormand": str(data_path("mcdormand")),
        "mcdormand_bag": str(data_path("mcdormand_bag")),
        "ecycle": str(data_path("ecycle")),
    }
