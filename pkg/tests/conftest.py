import pytest

from weakhyp.symbol import SymbolMatrix


def symbol(entries):
    """
    one spatial dimension, entries maps 0-based (row, col) to t-coefficients
    """
    return SymbolMatrix.from_table(2, 1, {(i, j, 0): c for (i, j), c in entries.items()})


@pytest.fixture
def jt():
    # xi [[0, 1], [t^2, 0]]
    return symbol({(0, 1): [1], (1, 0): [0, 0, 1]})


@pytest.fixture
def strict_const():
    return symbol({(0, 0): [1], (1, 1): [2]})


@pytest.fixture
def double_root():
    # char poly (tau - t xi)^2
    return symbol({(0, 1): [1], (1, 0): [0, 0, -1], (1, 1): [0, 2]})


@pytest.fixture
def rotation():
    # eigenvalues +-i xi
    return symbol({(0, 1): [1], (1, 0): [-1]})
