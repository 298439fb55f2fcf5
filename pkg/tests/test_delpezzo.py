import itertools

import pytest

from secfan.cones import cones_tile, dual_cone
from secfan.delpezzo import (
    BoundaryCycle,
    Contraction,
    PicLattice,
    TORIC_NAMES,
    contractions,
    effective_cone,
    hexagon_boundary,
    minus_one_classes,
    mori_chamber,
    ne_generators,
    nef_cone,
    normalized_cycle,
    quadric,
    reflection,
    roots,
    simple_roots,
    toric_boundary,
    validate_boundary,
    weyl_generators,
    weyl_group,
)
from secfan.errors import ValidationError

MINUS_ONE_COUNTS = (0, 1, 3, 6, 10, 16, 27, 56, 240)


@pytest.mark.parametrize("k", range(9))
def test_minus_one_counts(k):
    lat = PicLattice(k)
    cls = minus_one_classes(lat)
    assert len(cls) == MINUS_ONE_COUNTS[k]
    for c in cls:
        assert lat.dot(c, c) == -1
        assert lat.dot(c, lat.canonical) == -1


def test_minus_one_k1_and_k3():
    assert minus_one_classes(PicLattice(1)) == [(0, 1)]
    cls = set(minus_one_classes(PicLattice(3)))
    expected = {
        (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
        (1, -1, -1, 0), (1, -1, 0, -1), (1, 0, -1, -1),
    }
    assert cls == expected


def test_quadric_has_no_minus_one_classes():
    assert minus_one_classes(quadric()) == []


ROOT_COUNTS = {0: 0, 1: 0, 2: 2, 3: 8, 4: 20, 5: 40, 6: 72, 7: 126, 8: 240}


@pytest.mark.parametrize("k", range(9))
def test_root_counts(k):
    lat = PicLattice(k)
    rs = roots(lat)
    assert len(rs) == ROOT_COUNTS[k]
    for a in rs:
        assert lat.dot(a, a) == -2
        assert lat.dot(a, lat.canonical) == 0


def test_effective_cone_small():
    assert effective_cone(PicLattice(0)).rays == ((1,),)
    assert set(effective_cone(quadric()).rays) == {(1, 0), (0, 1)}
    eff1 = effective_cone(PicLattice(1))
    assert set(eff1.rays) == {(0, 1), (1, -1)}
    eff3 = effective_cone(PicLattice(3))
    assert len(eff3.rays) == 6  # every (-1)-class is extreme


def test_nef_cone_examples():
    assert nef_cone(PicLattice(0)).rays == ((1,),)
    nq = nef_cone(quadric())
    assert set(nq.rays) == {(1, 0), (0, 1)}  # self-dual under the hyperbolic pairing
    lat = PicLattice(3)
    n3 = nef_cone(lat)
    antic = tuple(-x for x in lat.canonical)
    for c in minus_one_classes(lat):
        assert lat.dot(antic, c) == 1
    # -K strictly inside: all facet inequalities strict
    from secfan.lattice import vec_dot
    assert all(vec_dot(f, antic) > 0 for f in n3.facets)


def test_nef_is_dual_of_effective_k3():
    lat = PicLattice(3)
    # duality through the intersection form: L nef iff L.C >= 0 for all curves
    nef = nef_cone(lat)
    for r in nef.rays:
        assert all(lat.dot(r, c) >= 0 for c in minus_one_classes(lat))


def test_contraction_counts():
    assert len(contractions(PicLattice(0))) == 1
    assert len(contractions(PicLattice(1))) == 2
    cs = contractions(PicLattice(3))
    assert len(cs) == 18
    sizes = sorted(len(c) for c in cs)
    assert sizes.count(0) == 1 and sizes.count(1) == 6
    assert sizes.count(2) == 9 and sizes.count(3) == 2


def test_contraction_brute_force_oracle_k3():
    lat = PicLattice(3)
    cls = minus_one_classes(lat)
    count = 0
    for r in range(len(cls) + 1):
        for sub in itertools.combinations(cls, r):
            if all(lat.dot(a, b) == 0 for a, b in itertools.combinations(sub, 2)):
                count += 1
    assert count == len(contractions(lat))


def test_exceptional_set_is_clique():
    lat = PicLattice(4)
    es = [tuple(1 if j == i else 0 for j in range(5)) for i in range(1, 5)]
    assert all(lat.dot(a, b) == 0 for a, b in itertools.combinations(es, 2))


def test_contraction_cap():
    with pytest.raises(ValidationError):
        contractions(PicLattice(7))


def test_mori_chamber_empty_is_nef():
    lat = PicLattice(3)
    assert mori_chamber(lat, Contraction(())) == nef_cone(lat)


def test_mori_chamber_k1():
    lat = PicLattice(1)
    ch = mori_chamber(lat, Contraction(((0, 1),)))
    assert set(ch.rays) == {(0, 1), (1, 0)}  # <E1, H>


def test_chambers_tile_effective_cone_k3():
    lat = PicLattice(3)
    chambers = [mori_chamber(lat, c) for c in contractions(lat)]
    assert cones_tile(chambers, effective_cone(lat))


@pytest.mark.parametrize("k", [1, 2, 4, 5])
def test_chambers_tile_effective_cone_other_k(k):
    lat = PicLattice(k)
    chambers = [mori_chamber(lat, c) for c in contractions(lat)]
    assert cones_tile(chambers, effective_cone(lat))


def test_weyl_reflection_swaps_exceptionals():
    lat = PicLattice(3)
    s = reflection(lat, (0, 1, -1, 0))
    assert s.act((0, 1, 0, 0)) == (0, 0, 1, 0)
    for a in roots(lat):
        w = reflection(lat, a)
        assert w.act(lat.canonical) == lat.canonical


def test_weyl_preserves_classes_and_form():
    lat = PicLattice(3)
    mo = set(minus_one_classes(lat))
    rt = set(roots(lat))
    for w in weyl_generators(lat):
        assert {w.act(c) for c in mo} == mo
        assert {w.act(a) for a in rt} == rt
        for x in mo:
            for y in list(mo)[:3]:
                assert lat.dot(w.act(x), w.act(y)) == lat.dot(x, y)


def test_weyl_orbit_of_e1_k3():
    lat = PicLattice(3)
    gens = weyl_generators(lat)
    orbit = {(0, 1, 0, 0)}
    frontier = list(orbit)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                u = g.act(v)
                if u not in orbit:
                    orbit.add(u)
                    nxt.append(u)
        frontier = nxt
    assert orbit == set(minus_one_classes(lat))


def test_weyl_group_orders():
    assert len(weyl_group(PicLattice(2))) == 2
    assert len(weyl_group(PicLattice(3))) == 12
    assert len(weyl_group(PicLattice(4))) == 120


def test_validate_boundary_hexagon():
    lat, cycle = hexagon_boundary()
    rep = validate_boundary(lat, cycle)
    assert rep.valid
    assert all(rep.minus_one_flags)


def test_validate_boundary_bad_sum():
    lat = PicLattice(0)
    rep = validate_boundary(lat, BoundaryCycle(((1,), (1,))))
    assert not rep.valid
    assert any("expected -K" in d for d in rep.diagnostics)


def test_boundary_self_int_identity():
    # sum D_i^2 = -2n + 9 - k follows from the adjunction checks
    for name in ("p2", "f1", "dp7", "dp6"):
        lat, cycle, _ = toric_boundary(name)
        total = sum(lat.dot(c, c) for c in cycle.classes)
        assert total == -2 * cycle.n + lat.dot(lat.canonical, lat.canonical)


def test_nodal_boundary_k8_validates():
    lat = PicLattice(8)
    anti = tuple(-x for x in lat.canonical)
    rep = validate_boundary(lat, BoundaryCycle((anti,)))
    assert rep.valid
    assert rep.minus_one_flags == [False]


def test_all_minus_one_cycle_capped_at_six():
    # synthetic 7-cycle of (-1)-classes must be rejected even if sums matched
    lat = PicLattice(2)
    fake = BoundaryCycle(tuple([(0, 1, 0)] * 7))
    rep = validate_boundary(lat, fake)
    assert not rep.valid


def test_toric_boundaries_valid():
    for name in TORIC_NAMES:
        lat, cycle, rays = toric_boundary(name)
        assert validate_boundary(lat, cycle).valid
        assert len(rays) == cycle.n
        # fan rays satisfy u_{i-1} + u_{i+1} = -(D_i^2) u_i
        n = cycle.n
        for i in range(n):
            d2 = lat.dot(cycle.classes[i], cycle.classes[i])
            prev, cur, nxt = rays[(i - 1) % n], rays[i], rays[(i + 1) % n]
            assert tuple(p + q for p, q in zip(prev, nxt)) == tuple(-d2 * u for u in cur)


def test_normalized_cycle_rotation_invariant():
    lat, cycle = hexagon_boundary()
    rot = BoundaryCycle(cycle.classes[2:] + cycle.classes[:2])
    assert normalized_cycle(cycle) == normalized_cycle(rot)


def test_ne_generators_k1():
    lat = PicLattice(1)
    assert set(ne_generators(lat)) == {(0, 1), (1, -1)}
