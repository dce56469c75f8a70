import itertools

import pytest

from krfoam import diagram as dg
from krfoam import moy
from krfoam.moy import (CubeVertex, MoyError, ResourceCapError, coloring_count,
                        cube_edges, enumerate_cube, resolve)

import conftest as cc


def test_free_loop_resolution():
    G = resolve(dg.free_loop(), ())
    assert len(G.arcs) == 1 and not G.rungs
    assert coloring_count(G, 2) == 2
    assert coloring_count(G, 7) == 7


def test_trefoil_oriented_resolution_is_two_circles():
    G = resolve(dg.trefoil(), (1, 1, 1))
    assert not G.rungs
    assert len(G.arcs) == 2
    assert all(a.is_circle for a in G.arcs.values())


def test_trefoil_wide_resolution_shape():
    G = resolve(dg.trefoil(), (0, 0, 0))
    assert len(G.rungs) == 3
    assert len(G.arcs) == 6  # six 1-edges between the three rungs


def test_theta_counts():
    th = resolve(dg.unknot(1), (0,))
    assert coloring_count(th, 2) == 2
    assert coloring_count(th, 3) == 6


def test_circle_counts_multiplicative():
    a = resolve(dg.unknot(1), (0,))
    b = resolve(dg.disjoint_union(dg.unknot(1), dg.free_loop()), (0,))
    for N in (2, 3):
        assert coloring_count(b, N) == coloring_count(a, N) * N


def test_enumerate_cube_degrees():
    # two positive crossings: degrees |v| - n_plus = -2,-1,-1,0
    verts = enumerate_cube(dg.hopf_link())
    assert [t.degree for t in verts] == [-2, -1, -1, 0]
    verts = enumerate_cube(dg.hopf_link(False))
    assert [t.degree for t in verts] == [0, 1, 1, 2]


def test_enumerate_cube_counts():
    assert len(enumerate_cube(dg.free_loop())) == 1
    assert len(enumerate_cube(dg.trefoil())) == 8
    assert len(cube_edges(dg.trefoil())) == 12


def test_cap_guard():
    with pytest.raises(ResourceCapError):
        enumerate_cube(dg.trefoil(), cap=2)


def test_resolution_invariants_fuzzed_corpus():
    for name, mk in cc.CORPUS_N2:
        D = mk()
        if D.n_crossings > 4:
            continue
        for bits in itertools.product((0, 1), repeat=D.n_crossings):
            G = resolve(D, bits)  # MoyGraph validates itself
            assert coloring_count(G, 2) >= 1


def test_euler_characteristic_kink_invariance():
    # alternating sum of coloring counts is a Reidemeister-1 invariant
    def chi(D, N):
        total = 0
        for t in enumerate_cube(D):
            total += (-1) ** t.degree * coloring_count(resolve(D, t), N)
        return total

    for N in (2, 3):
        base = chi(dg.free_loop(), N)
        assert chi(dg.unknot(1), N) == base
        assert chi(dg.unknot(2), N) == base
        assert chi(dg.unknot(1, negative=True), N) == base
    for N in (2, 3):
        t3 = chi(dg.trefoil(), N)
        t4 = chi(cc.trefoil_4x(), N)
        assert t3 == t4


def test_forced_wide():
    D = dg.unknot(1)
    G = resolve(D, (), forced_wide={0})
    assert 0 in G.rungs
    verts = enumerate_cube(D, forced_wide={0})
    assert len(verts) == 1 and verts[0].degree == 0


def test_basepoints_transported():
    D = dg.with_basepoints(dg.trefoil(), q=0, r=3)
    for bits in itertools.product((0, 1), repeat=3):
        G = resolve(D, bits)
        assert G.basepoint_arc("q") in G.arcs
        assert G.basepoint_arc("r") in G.arcs


def test_dump_golden():
    th = resolve(dg.unknot(1), (0,))
    assert th.dump() == (
        "arc 1 [1]\n"
        "arc 2 [0]\n"
        "rung 0 in 1 2 out 1 2\n"
    )


def test_bad_assignment():
    with pytest.raises(MoyError):
        resolve(dg.trefoil(), (0, 1))
    with pytest.raises(MoyError):
        resolve(dg.trefoil(), (0, 1, 2))


from hypothesis import given, settings, strategies as st


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=4),
       st.lists(st.sampled_from([0, 1]), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_resolve_valid_on_fuzzed_braids(word, bits):
    D = dg.braid_closure(word, 3)
    G = resolve(D, tuple(bits[: D.n_crossings]))  # validates on construction
    assert coloring_count(G, 2) >= 1
