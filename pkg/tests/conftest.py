import pytest

from matroidx.core import GraphicMatroid
from matroidx.generate import small_example, two_graph_example


@pytest.fixture
def e1():
    return small_example()


@pytest.fixture
def figure():
    return two_graph_example()


@pytest.fixture
def triangle():
    return GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])
