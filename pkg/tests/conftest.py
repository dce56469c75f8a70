import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from krfoam import diagram as dg


def unlink2_marked():
    return dg.unlink(2, basepoints=[dg.Basepoint("q", 0), dg.Basepoint("r", 1)])


def trefoil_unknot(q_on_trefoil=True):
    D = dg.disjoint_union(dg.trefoil(), dg.free_loop())
    loop_edge = max(D.edges)
    if q_on_trefoil:
        return dg.with_basepoints(D, q=0, r=loop_edge)
    return dg.with_basepoints(D, q=loop_edge, r=0)


def trefoil_4x():
    # Markov-stabilized trefoil: 4 crossings, same knot
    return dg.braid_closure([1, 1, 1, 2], 3)


def cinquefoil():
    return dg.braid_closure([1, 1, 1, 1, 1], 2)


def granny():
    return dg.braid_closure([1, 1, 1, 2, 2, 2], 3)


# corpus used by the structural acceptance criteria
CORPUS_N2 = [
    ("unknot0", dg.free_loop),
    ("unknot1+", lambda: dg.unknot(1)),
    ("unknot1-", lambda: dg.unknot(1, negative=True)),
    ("unknot2", lambda: dg.unknot(2)),
    ("unlink2", unlink2_marked),
    ("hopf+", dg.hopf_link),
    ("hopf-", lambda: dg.hopf_link(False)),
    ("trefoil+", dg.trefoil),
    ("trefoil-", lambda: dg.trefoil(False)),
    ("trefoil4", trefoil_4x),
    ("fig8", dg.figure_eight),
    ("trefoil+unknot", trefoil_unknot),
    ("cinquefoil", cinquefoil),
    ("granny", granny),
]

CORPUS_N3 = [
    (name, mk) for name, mk in CORPUS_N2 if mk().n_crossings <= 4
]


def marked(D, q_edge=None, r_edge=None):
    """Place q, r on the first two components (or given edges)."""
    if q_edge is None:
        q_edge = D.components[0][0]
    if r_edge is None:
        comp = D.components[1] if len(D.components) > 1 else D.components[0]
        r_edge = next(e for e in comp if e != q_edge)
    return dg.with_basepoints(D, q=q_edge, r=r_edge)


def skein_marked(D, crossing):
    x = D.crossings[crossing]
    return dg.with_basepoints(D, q=x.ports[0], r=x.ports[x.over_in])


@pytest.fixture(scope="session")
def acceptance_log():
    lines = []
    yield lines
    print()
    for line in lines:
        print(line)
