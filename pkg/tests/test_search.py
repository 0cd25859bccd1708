import pytest

from scalar_means import beta_m, lin_upper
from search import beats_lin, min_order_binary, min_order_scan, search_grid
from utils import parse_t_grid


def test_minimal_order_at_four():
    assert min_order_binary(4.0) == 18
    assert min_order_scan(4.0) == 18
    assert beta_m(4.0, 2) == pytest.approx(2.25)
    assert not beats_lin(4.0, 17)
    assert beats_lin(4.0, 18)


def test_equality_at_one():
    assert min_order_binary(1.0) == 1
    assert beta_m(1.0, 1) == lin_upper((1.0, 1.0))


def test_mirror_point():
    assert min_order_binary(0.25) == 18


def test_not_found():
    assert min_order_binary(4.0, m_max=10) is None
    assert min_order_scan(4.0, m_max=10) is None


def test_binary_matches_scan_on_grid():
    for t in parse_t_grid("1e-3:1e3:21:log"):
        assert min_order_binary(t, 10 ** 6) == min_order_scan(t, 10 ** 6), t


@pytest.mark.parametrize("t,m_max", [(0.0, 10), (-1.0, 10), (2.0, 1), (2.0, 2.5)])
def test_invalid_arguments(t, m_max):
    with pytest.raises(ValueError):
        min_order_binary(t, m_max)


def test_search_grid_summary():
    rows, summary = search_grid([0.25, 1.0, 4.0, 100.0], m_max=1000)
    assert [row["min_m"] for row in rows][:3] == [18, 1, 18]
    assert summary["grid_max"] == 18
    assert summary["grid_max_t"] == 0.25
    assert summary["not_found"] == 0
    assert rows[2]["beta_at_min"] <= rows[2]["lin_upper"]


def test_search_grid_reports_not_found():
    rows, summary = search_grid([4.0, 1.0], m_max=5)
    assert rows[0]["min_m"] is None and rows[0]["beta_at_min"] is None
    assert summary["grid_max"] is None
    assert summary["not_found"] == 1


def test_empty_grid():
    with pytest.raises(ValueError):
        search_grid([])
