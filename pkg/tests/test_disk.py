import pytest

from secfan.disk import (
    DiskTriangulation,
    convert_point,
    fan_chart_data,
    fan_point,
    fan_triangulation,
    gamma_complex,
    triangulation_with_flips,
)
from secfan.errors import ValidationError


@pytest.mark.parametrize("n", range(1, 10))
@pytest.mark.parametrize("m", range(0, 5))
def test_level_counts_fan(n, m):
    comp = gamma_complex(fan_triangulation(n))
    assert len(comp.points_at_level(m)) == (n * m * m + n * m + 2) // 2


def test_level_one_is_vertices():
    comp = gamma_complex(fan_triangulation(6))
    pts = comp.points_at_level(1)
    assert len(pts) == 7
    labels = set()
    for p in pts:
        cell_labels = comp.cell_labels[p.cell]
        slot = next(t for t in range(3) if p.coords[t] > 0)
        labels.add(cell_labels[slot])
    assert labels == set(range(0, 7))


@pytest.mark.parametrize(
    "n,flips",
    [(4, [1]), (4, [1, 3]), (5, [2, 4]), (6, [1]), (6, [1, 3, 5]), (6, [2, 5])],
)
def test_level_counts_flip_invariant(n, flips):
    comp = gamma_complex(triangulation_with_flips(n, flips))
    for m in range(0, 5):
        assert len(comp.points_at_level(m)) == (n * m * m + n * m + 2) // 2


def test_fan_triangulation_edges():
    t = fan_triangulation(6)
    em = t.edge_multiset()
    assert sum(em.values()) == 12  # 6 boundary + 6 spokes
    assert all(v == 1 for v in em.values())
    assert sum(t.triangle_multiset().values()) == 6


def test_flip_bookkeeping_hexagon():
    t = fan_triangulation(6).flip(1)
    em = t.edge_multiset()
    assert em[(2, 6)] == 1
    assert (0, 1) not in em
    assert sum(t.triangle_multiset().values()) == 6


def test_double_flip_bigon():
    t = triangulation_with_flips(4, [1, 3])
    assert t.edge_multiset()[(2, 4)] == 2
    assert sum(t.triangle_multiset().values()) == 4


def test_adjacent_flips_rejected():
    with pytest.raises(ValidationError):
        triangulation_with_flips(6, [1, 2])
    with pytest.raises(ValidationError):
        triangulation_with_flips(5, [1, 5])  # cyclically adjacent


def test_flips_need_three_vertices():
    with pytest.raises(ValidationError):
        triangulation_with_flips(2, [1])


def test_distinct_flip_sets_distinct_triangulations():
    seen = set()
    for flips in [frozenset(), frozenset([1]), frozenset([2]), frozenset([1, 3]),
                  frozenset([1, 4]), frozenset([2, 5])]:
        t = DiskTriangulation(6, flips)
        key = t.canonical_key()
        assert key not in seen
        seen.add(key)


def test_canonical_point_dedup():
    comp = gamma_complex(fan_triangulation(6))
    # the spoke point c+v2 seen from both incident cells
    p = comp.point(("T", 1), (1, 0, 1))
    q = comp.point(("T", 2), (1, 1, 0))
    assert p == q


def test_fan_chart_roundtrip():
    p = fan_point(6, 2, {3: 1, 4: 2})
    a, b = fan_chart_data(p)
    assert a == 2 and b == {3: 1, 4: 2}
    assert p.level == 5


def test_convert_point_square_relation():
    # c + v_1 equals v_6 + v_2 in the chart flipped at 1
    p = fan_point(6, 1, {1: 1})
    t = triangulation_with_flips(6, [1])
    comp = gamma_complex(t)
    q = convert_point(p, t)
    r = comp.point(("B", 1), (1, 0, 1))
    assert comp.same_point(q, r)


def test_convert_point_away_from_flip():
    p = fan_point(6, 1, {3: 2})
    t = triangulation_with_flips(6, [1])
    q = convert_point(p, t)
    assert q.level == 3


def test_boundary_detection():
    comp = gamma_complex(fan_triangulation(5))
    assert comp.is_boundary(fan_point(5, 0, {1: 1}))
    assert comp.is_boundary(fan_point(5, 0, {1: 1, 2: 1}))
    assert not comp.is_boundary(fan_point(5, 1, {1: 1}))
    assert comp.on_center_ray(fan_point(5, 2, {}))
    assert not comp.on_center_ray(fan_point(5, 1, {1: 1}))


def test_n1_self_glued_identification():
    comp = gamma_complex(fan_triangulation(1))
    a = comp.point(("T", 1), (2, 3, 0))
    b = comp.point(("T", 1), (2, 0, 3))
    assert a == b
    # interior points are not folded together
    c = comp.point(("T", 1), (1, 1, 2))
    d = comp.point(("T", 1), (1, 2, 1))
    assert c != d
