"""Cube of resolutions: trivalent graphs with 1- and 2-labeled edges.

Resolving every crossing of a diagram yields a planar trivalent graph
whose 2-labeled edges ("rungs") each join a merge vertex to a split
vertex.  Our convention, following the resolution figure of the source
construction: a positive crossing resolves to the rung at 0 and to the
oriented smoothing at 1; a negative crossing the other way around.  The
homological degree of a cube vertex is |v| - n_plus, which places the
unknot in degree 0 and makes the N=2 theory agree per-degree with
Khovanov homology of the mirror diagram.

Rung ports are normalized to (in_l, in_r, out_l, out_r), left/right taken
from the planar picture of the crossing; the oriented smoothing joins
in_l->out_l and in_r->out_r.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .diagram import LinkDiagram


class MoyError(ValueError):
    pass


class ResourceCapError(MoyError):
    """Crossing count exceeds the configured cube cap."""


@dataclass(frozen=True)
class Arc:
    """Maximal 1-labeled strand of a resolution; a chain of diagram edges."""

    edges: tuple[int, ...]
    is_circle: bool
    basepoints: tuple[str, ...] = ()


@dataclass(frozen=True)
class Rung:
    """A 2-labeled edge with its merge (inputs) and split (outputs) vertices."""

    crossing: int
    in_l: int
    in_r: int
    out_l: int
    out_r: int

    @property
    def arcs(self):
        return (self.in_l, self.in_r, self.out_l, self.out_r)


@dataclass(frozen=True)
class CubeVertex:
    assignment: tuple[int, ...]
    degree: int

    @property
    def weight(self) -> int:
        return sum(self.assignment)


class MoyGraph:
    """Resolution graph: 1-labeled arcs plus rungs, with basepoint markers."""

    def __init__(self, arcs: dict[int, Arc], rungs: dict[int, Rung]):
        self.arcs = dict(arcs)
        self.rungs = dict(rungs)
        self._validate()

    def _validate(self):
        germ_in: dict[int, int] = {}
        germ_out: dict[int, int] = {}
        for cid, r in self.rungs.items():
            for a in r.arcs:
                if a not in self.arcs:
                    raise MoyError(f"rung {cid} references unknown arc {a}")
            for a in (r.in_l, r.in_r):
                germ_in[a] = germ_in.get(a, 0) + 1
            for a in (r.out_l, r.out_r):
                germ_out[a] = germ_out.get(a, 0) + 1
        for aid, arc in self.arcs.items():
            n_in = germ_in.get(aid, 0)
            n_out = germ_out.get(aid, 0)
            if arc.is_circle:
                if n_in or n_out:
                    raise MoyError(f"circle arc {aid} attached to a rung")
            else:
                if n_in != 1 or n_out != 1:
                    raise MoyError(f"arc {aid} must run split->merge exactly once")

    @property
    def n_rungs(self) -> int:
        return len(self.rungs)

    def basepoint_arc(self, label: str) -> int:
        for aid, arc in self.arcs.items():
            if label in arc.basepoints:
                return aid
        raise MoyError(f"no basepoint {label!r} on this graph")

    def dump(self) -> str:
        """Canonical text form (sorted ids) for golden tests."""
        lines = []
        for aid in sorted(self.arcs):
            a = self.arcs[aid]
            kind = "circle" if a.is_circle else "arc"
            bits = " ".join(str(e) for e in a.edges)
            marks = "".join(sorted(a.basepoints))
            lines.append(f"{kind} {aid} [{bits}]" + (f" @{marks}" if marks else ""))
        for cid in sorted(self.rungs):
            r = self.rungs[cid]
            lines.append(f"rung {cid} in {r.in_l} {r.in_r} out {r.out_l} {r.out_r}")
        return "\n".join(lines) + "\n"

    def signature(self, with_basepoints: bool = True):
        """Hashable structure key used for state-space caching.

        Basepoint markers can be excluded: they do not enter the basis
        construction, only operator lookups.
        """
        arcs = tuple(
            (aid, self.arcs[aid].edges, self.arcs[aid].is_circle,
             self.arcs[aid].basepoints if with_basepoints else ())
            for aid in sorted(self.arcs)
        )
        rungs = tuple((cid,) + self.rungs[cid].arcs for cid in sorted(self.rungs))
        return (arcs, rungs)

    def __repr__(self):
        return f"<MoyGraph {len(self.arcs)} arcs, {self.n_rungs} rungs>"


def _crossing_roles(x):
    """Port roles (in_l, in_r, out_l, out_r) for a crossing, by sign."""
    if x.sign > 0:
        return 3, 0, 2, 1
    return 0, 1, 3, 2


def is_wide(sign: int, value: int) -> bool:
    """Resolution value -> rung? Positive: 0 is wide; negative: 1 is wide."""
    return (value == 0) == (sign > 0)


def resolve(
    D: LinkDiagram,
    v,
    forced_wide: frozenset[int] | set[int] = frozenset(),
) -> MoyGraph:
    """MOY graph for cube vertex v (crossings in forced_wide stay rungs).

    ``v`` maps active crossing ids (those not in forced_wide) to {0,1};
    a tuple is read positionally over the active crossings in order.
    """
    active = [i for i in range(D.n_crossings) if i not in forced_wide]
    if isinstance(v, CubeVertex):
        v = v.assignment
    if not isinstance(v, dict):
        if len(v) != len(active):
            raise MoyError(f"assignment length {len(v)} != {len(active)} active crossings")
        v = dict(zip(active, v))
    wide = set(forced_wide)
    for ci in active:
        if v[ci] not in (0, 1):
            raise MoyError("resolution values must be 0 or 1")
        if is_wide(D.crossings[ci].sign, v[ci]):
            wide.add(ci)

    # splice map: edge -> next edge through oriented-smoothed crossings
    splice: dict[int, int] = {}
    for ci, x in enumerate(D.crossings):
        if ci in wide:
            continue
        il, ir, ol, or_ = _crossing_roles(x)
        splice[x.ports[il]] = x.ports[ol]
        splice[x.ports[ir]] = x.ports[or_]

    # trace maximal chains of edges
    arc_of_edge: dict[int, int] = {}
    arcs: dict[int, Arc] = {}
    starts = []
    for ci in sorted(wide):
        x = D.crossings[ci]
        il, ir, ol, or_ = _crossing_roles(x)
        starts.extend([x.ports[ol], x.ports[or_]])
    bp_edges = {}
    for bp in D.basepoints:
        bp_edges.setdefault(bp.edge, []).append(bp.label)

    def marks(chain):
        out = []
        for e in chain:
            out.extend(bp_edges.get(e, []))
        return tuple(sorted(out))

    # arc ids start above the crossing ids so the two never collide
    next_arc = D.n_crossings
    for e0 in starts:
        if e0 in arc_of_edge:
            continue
        chain = [e0]
        while chain[-1] in splice:
            chain.append(splice[chain[-1]])
        for e in chain:
            arc_of_edge[e] = next_arc
        arcs[next_arc] = Arc(tuple(chain), False, marks(chain))
        next_arc += 1
    # remaining edges lie on closed circles (free loops or fully spliced cycles)
    for e0 in sorted(D.edges):
        if e0 in arc_of_edge:
            continue
        if D.edges[e0].is_loop:
            arc_of_edge[e0] = next_arc
            arcs[next_arc] = Arc((e0,), True, marks([e0]))
            next_arc += 1
            continue
        chain = [e0]
        while splice[chain[-1]] != e0:
            chain.append(splice[chain[-1]])
        for e in chain:
            arc_of_edge[e] = next_arc
        arcs[next_arc] = Arc(tuple(chain), True, marks(chain))
        next_arc += 1

    rungs = {}
    for ci in sorted(wide):
        x = D.crossings[ci]
        il, ir, ol, or_ = _crossing_roles(x)
        rungs[ci] = Rung(
            ci,
            in_l=arc_of_edge[x.ports[il]],
            in_r=arc_of_edge[x.ports[ir]],
            out_l=arc_of_edge[x.ports[ol]],
            out_r=arc_of_edge[x.ports[or_]],
        )
    return MoyGraph(arcs, rungs)


def active_crossings(D: LinkDiagram, forced_wide=frozenset()):
    return [i for i in range(D.n_crossings) if i not in forced_wide]


def n_plus_active(D: LinkDiagram, forced_wide=frozenset()) -> int:
    return sum(1 for i in active_crossings(D, forced_wide) if D.crossings[i].sign > 0)


def enumerate_cube(D: LinkDiagram, cap: int | None = None, forced_wide=frozenset()):
    """All cube vertices, in homological degree order.

    Degree is |v| - n_plus over the active crossings.  Raises
    ResourceCapError when the active crossing count exceeds ``cap``.
    """
    active = active_crossings(D, forced_wide)
    if cap is not None and len(active) > cap:
        raise ResourceCapError(
            f"{len(active)} crossings exceed the configured cap {cap}"
        )
    npa = n_plus_active(D, forced_wide)
    verts = [
        CubeVertex(bits, sum(bits) - npa)
        for bits in itertools.product((0, 1), repeat=len(active))
    ]
    verts.sort(key=lambda t: (t.degree, t.assignment))
    return verts


def cube_edges(D: LinkDiagram, cap: int | None = None, forced_wide=frozenset()):
    """Pairs (v, w, position) differing at one active crossing, v=0 -> w=1."""
    verts = enumerate_cube(D, cap, forced_wide)
    index = {t.assignment: t for t in verts}
    out = []
    for t in verts:
        for k, bit in enumerate(t.assignment):
            if bit == 0:
                w = list(t.assignment)
                w[k] = 1
                out.append((t, index[tuple(w)], k))
    return out


def coloring_count(G: MoyGraph, N: int) -> int:
    """Number of edge colorings: 1-arcs get a color in 1..N, each rung's
    2-edge the (distinct) pair of its endpoint colors, matching at both
    vertices."""
    if N < 2:
        raise MoyError("N must be at least 2")
    arc_ids = sorted(G.arcs)
    if not arc_ids:
        return 1
    constraints = []
    for r in G.rungs.values():
        constraints.append((r.in_l, r.in_r, r.out_l, r.out_r))
    pos = {a: i for i, a in enumerate(arc_ids)}
    color = [0] * len(arc_ids)  # 0 = unset

    def ok(upto):
        for il, ir, ol, or_ in constraints:
            cs = [color[pos[a]] for a in (il, ir, ol, or_)]
            ci, co = cs[:2], cs[2:]
            if all(ci) and ci[0] == ci[1]:
                return False
            if all(co) and co[0] == co[1]:
                return False
            if all(cs) and set(ci) != set(co):
                return False
        return True

    count = 0
    k = 0
    while True:
        if k == len(arc_ids):
            count += 1
            k -= 1
        while k >= 0 and color[k] == N:
            color[k] = 0
            k -= 1
        if k < 0:
            return count
        color[k] += 1
        if ok(k):
            k += 1
