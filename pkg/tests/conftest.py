import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from graph_core import SimplicialGraph, complete_graph, cycle_graph, path_graph  # noqa: E402

GRAPHS_DIR = os.path.join(ROOT, 'graphs')


@pytest.fixture
def graphs_dir():
    return GRAPHS_DIR


@pytest.fixture
def pentagon():
    return cycle_graph(5)


@pytest.fixture
def square():
    return cycle_graph(4)


@pytest.fixture
def edge():
    return complete_graph(['a', 'b'])


@pytest.fixture
def p3():
    return path_graph(['a', 'b', 'c'])


@pytest.fixture
def k1():
    return SimplicialGraph(['a'])


@pytest.fixture
def two_points():
    return SimplicialGraph(['a', 'b'])


@pytest.fixture
def triangle():
    return complete_graph(['a', 'b', 'c'])
