import pytest

from wafomnet import load_shipped
from wafomnet.data import SHIPPED, shipped_path
from wafomnet.wafom import build_tables, wafom_tabled


@pytest.mark.parametrize("S", sorted(SHIPPED))
def test_shipped_matrices_are_regular(S):
    G = load_shipped(S)
    assert (G.n, G.m, G.S) == (30, 25, S)
    assert G.is_projection_regular()
    assert shipped_path(S).read_text().startswith("# searched by wafomnet")


@pytest.mark.parametrize("S", sorted(SHIPPED))
def test_shipped_wafom_decreases(S):
    G = load_shipped(S)
    tables = build_tables(30, 3)
    values = [wafom_tabled(G, d, tables).value for d in (4, 8, 12, 16)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_unknown_dimension():
    with pytest.raises(ValueError):
        load_shipped(7)
