"""Oriented link diagrams: parsing, validation, mirroring, band surgery.

A diagram is stored as PD-style crossing 4-tuples plus explicit per-edge
orientations.  Ports of a crossing are numbered counterclockwise starting
from the incoming under-strand:

* positive crossing: ports (0, 1, 2, 3) = (under-in, over-out, under-out,
  over-in), i.e. the over-strand runs port 3 -> port 1;
* negative crossing: (under-in, over-in, under-out, over-out), over-strand
  runs port 1 -> port 3.

Crossing signs are recomputed from the orientations and validated against
the declared sign.  0-crossing unknot components are kept as free-loop
tokens (``U <id>``) rather than kinked diagrams.

File format (one link per file)::

    X <a> <b> <c> <d> <sign>
    edge <id> <tailcrossing>:<tailport> <headcrossing>:<headport>
    U <id>
    basepoint <q|r> <edge>
    band <edge_a> <side_a> <edge_b> <side_b> <twists>

Serialization is canonical (sorted ids), so golden files are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Basepoint:
    label: str  # "q" or "r"
    edge: int


@dataclass(frozen=True)
class BandSpec:
    edge_a: int
    side_a: str  # "left" or "right"
    edge_b: int
    side_b: str
    twists: int


@dataclass(frozen=True)
class Crossing:
    ports: tuple[int, int, int, int]
    sign: int  # +1 or -1

    @property
    def in_ports(self) -> tuple[int, int]:
        # under-in is always port 0; over-in is port 3 (+) or port 1 (-)
        return (0, 3) if self.sign > 0 else (0, 1)

    @property
    def out_ports(self) -> tuple[int, int]:
        return (2, 1) if self.sign > 0 else (2, 3)

    @property
    def over_in(self) -> int:
        return 3 if self.sign > 0 else 1

    @property
    def over_out(self) -> int:
        return 1 if self.sign > 0 else 3


@dataclass(frozen=True)
class Edge:
    """Oriented edge; tail/head are (crossing, port) or None for free loops."""

    tail: tuple[int, int] | None
    head: tuple[int, int] | None

    @property
    def is_loop(self) -> bool:
        return self.tail is None and self.head is None


class LinkDiagram:
    """Validated oriented link diagram.

    Immutable after construction; all operations return new diagrams, so
    instances can be shared freely across threads.
    """

    def __init__(self, crossings, edges, basepoints=(), bands=()):
        self.crossings: tuple[Crossing, ...] = tuple(crossings)
        self.edges: dict[int, Edge] = dict(edges)
        self.basepoints: tuple[Basepoint, ...] = tuple(basepoints)
        self.bands: tuple[BandSpec, ...] = tuple(bands)
        self._validate()
        self.components: tuple[tuple[int, ...], ...] = self._trace_components()

    # -- derived counts -------------------------------------------------

    @property
    def n_plus(self) -> int:
        return sum(1 for c in self.crossings if c.sign > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for c in self.crossings if c.sign < 0)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def basepoint(self, label: str) -> Basepoint:
        for bp in self.basepoints:
            if bp.label == label:
                return bp
        raise DiagramError(f"no basepoint {label!r}")

    def component_of_edge(self, edge: int) -> int:
        for i, comp in enumerate(self.components):
            if edge in comp:
                return i
        raise DiagramError(f"edge {edge} not on any component")

    # -- validation -----------------------------------------------------

    def _validate(self):
        seen_tail: dict[tuple[int, int], int] = {}
        seen_head: dict[tuple[int, int], int] = {}
        for eid, e in self.edges.items():
            if (e.tail is None) != (e.head is None):
                raise DiagramError(f"edge {eid} is half-attached")
            if e.is_loop:
                continue
            for attr, table in (("tail", seen_tail), ("head", seen_head)):
                c, p = getattr(e, attr)
                if not (0 <= c < len(self.crossings)) or not (0 <= p < 4):
                    raise DiagramError(f"edge {eid} {attr} {c}:{p} out of range")
                if (c, p) in table:
                    raise DiagramError(f"two edges claim port {c}:{p}")
                table[(c, p)] = eid
        for ci, x in enumerate(self.crossings):
            if x.sign not in (1, -1):
                raise DiagramError(f"crossing {ci} has sign {x.sign}")
            for p in range(4):
                eid = x.ports[p]
                if eid not in self.edges:
                    raise DiagramError(f"crossing {ci} references unknown edge {eid}")
                want_in = p in x.in_ports
                table = seen_head if want_in else seen_tail
                if table.get((ci, p)) != eid:
                    kind = "head" if want_in else "tail"
                    raise DiagramError(
                        f"crossing {ci} port {p}: edge {eid} must have its {kind} here "
                        f"(declared sign inconsistent with orientations?)"
                    )
        # every edge endpoint is matched by the crossing tuples
        for (c, p), eid in list(seen_tail.items()) + list(seen_head.items()):
            if self.crossings[c].ports[p] != eid:
                raise DiagramError(f"edge {eid} attached at {c}:{p} but tuple says {self.crossings[c].ports[p]}")
        labels = [bp.label for bp in self.basepoints]
        if len(set(labels)) != len(labels):
            raise DiagramError("duplicate basepoint label")
        for bp in self.basepoints:
            if bp.label not in ("q", "r"):
                raise DiagramError(f"basepoint label must be q or r, got {bp.label!r}")
            if bp.edge not in self.edges:
                raise DiagramError(f"basepoint {bp.label} on nonexistent edge {bp.edge}")
        if len(self.basepoints) == 2 and self.basepoints[0].edge == self.basepoints[1].edge:
            # a crossing-free loop has room for two distinct marked points;
            # band surgery on unlinks produces exactly this
            if not self.edges[self.basepoints[0].edge].is_loop:
                raise DiagramError("basepoints must lie on distinct edges")
        for b in self.bands:
            self._validate_band(b)

    def _validate_band(self, b: BandSpec):
        # Basepoints on band-endpoint edges are tolerated: the cut is made on
        # the far side of the basepoint (free loops always have room), so the
        # band never touches the segment adjacent to a basepoint.
        for side in (b.side_a, b.side_b):
            if side not in ("left", "right"):
                raise DiagramError(f"band side must be left/right, got {side!r}")
        for eid in (b.edge_a, b.edge_b):
            if eid not in self.edges:
                raise DiagramError(f"band endpoint on nonexistent edge {eid}")
        if b.edge_a == b.edge_b:
            raise DiagramError("band endpoints on the same edge")

    # -- strand tracing ---------------------------------------------------

    def next_edge(self, eid: int) -> int:
        """Edge following eid along its strand (through the head crossing)."""
        e = self.edges[eid]
        if e.is_loop:
            return eid
        c, p = e.head
        x = self.crossings[c]
        if p == 0:
            out = 2
        elif p == x.over_in:
            out = x.over_out
        else:
            raise DiagramError(f"edge {eid} enters {c} at out-port {p}")
        return x.ports[out]

    def _trace_components(self):
        comps = []
        unseen = set(self.edges)
        while unseen:
            start = min(unseen)
            cyc = [start]
            unseen.discard(start)
            cur = self.next_edge(start)
            while cur != start:
                if cur not in unseen:
                    raise DiagramError("component tracing does not close up")
                cyc.append(cur)
                unseen.discard(cur)
                cur = self.next_edge(cur)
            comps.append(tuple(cyc))
        return tuple(comps)

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for x in self.crossings:
            s = "+" if x.sign > 0 else "-"
            lines.append("X {} {} {} {} {}".format(*x.ports, s))
        for eid in sorted(self.edges):
            e = self.edges[eid]
            if e.is_loop:
                continue
            lines.append(f"edge {eid} {e.tail[0]}:{e.tail[1]} {e.head[0]}:{e.head[1]}")
        for eid in sorted(self.edges):
            if self.edges[eid].is_loop:
                lines.append(f"U {eid}")
        for bp in sorted(self.basepoints, key=lambda b: b.label):
            lines.append(f"basepoint {bp.label} {bp.edge}")
        for b in self.bands:
            lines.append(f"band {b.edge_a} {b.side_a} {b.edge_b} {b.side_b} {b.twists}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"<LinkDiagram {self.n_crossings} crossings, {len(self.components)} components>"


def next_eid(D: LinkDiagram, c: int, port: int) -> int:
    return D.crossings[c].ports[port]


def genus(D: LinkDiagram) -> int:
    """Genus of the surface the 4-valent diagram embeds in (0 = planar).

    Faces are traced from the rotation system implicit in the
    counterclockwise port order of the crossing tuples; free loops are
    planar and ignored.
    """
    if not D.crossings:
        return 0
    # darts: (edge, direction); direction +1 = tail->head
    def endpoint(eid, direction):
        e = D.edges[eid]
        return e.head if direction > 0 else e.tail

    def start(eid, direction):
        e = D.edges[eid]
        return e.tail if direction > 0 else e.head

    darts = [(eid, s) for eid, e in D.edges.items() if not e.is_loop for s in (1, -1)]
    dartset = set(darts)

    def next_dart(d):
        eid, s = d
        c, p = endpoint(eid, s)
        p2 = (p + 1) % 4
        e2 = D.crossings[c].ports[p2]
        # leave along e2 away from c through port p2
        if start(e2, 1) == (c, p2):
            return (e2, 1)
        if start(e2, -1) == (c, p2):
            return (e2, -1)
        raise DiagramError("rotation system is inconsistent")

    faces = 0
    seen = set()
    for d0 in darts:
        if d0 in seen:
            continue
        faces += 1
        d = d0
        while d not in seen:
            seen.add(d)
            d = next_dart(d)
    V = len(D.crossings)
    E = sum(1 for eid, e in D.edges.items() if not e.is_loop)
    # connected components of the crossing graph
    parent = list(range(V))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in D.edges.values():
        if not e.is_loop:
            parent[find(e.tail[0])] = find(e.head[0])
    comps = len({find(c) for c in range(V)})
    chi = V - E + faces
    return (2 * comps - chi) // 2


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_pd(text: str) -> LinkDiagram:
    """Parse the diagram file format into a validated LinkDiagram."""
    crossings_raw: list[tuple[tuple[int, int, int, int], int]] = []
    edge_lines: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {}
    loops: list[int] = []
    basepoints: list[Basepoint] = []
    bands: list[BandSpec] = []

    def parse_port(tok: str):
        try:
            c, p = tok.split(":")
            return int(c), int(p)
        except ValueError:
            raise DiagramError(f"malformed port {tok!r} (want crossing:port)") from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "X":
                if len(tok) != 6:
                    raise DiagramError("X line needs 4 edge ids and a sign")
                ports = tuple(int(t) for t in tok[1:5])
                sign = {"+": 1, "-": -1, "+1": 1, "-1": -1}.get(tok[5])
                if sign is None:
                    raise DiagramError(f"bad crossing sign {tok[5]!r}")
                crossings_raw.append((ports, sign))
            elif kind == "edge":
                if len(tok) != 4:
                    raise DiagramError("edge line needs id, tail, head")
                eid = int(tok[1])
                if eid in edge_lines:
                    raise DiagramError(f"duplicate edge id {eid}")
                edge_lines[eid] = (parse_port(tok[2]), parse_port(tok[3]))
            elif kind == "U":
                if len(tok) > 2:
                    raise DiagramError("U line takes at most one id")
                loops.append(int(tok[1]) if len(tok) == 2 else -1)
            elif kind == "basepoint":
                if len(tok) != 3:
                    raise DiagramError("basepoint line needs label and edge")
                basepoints.append(Basepoint(tok[1], int(tok[2])))
            elif kind == "band":
                if len(tok) != 6:
                    raise DiagramError("band line needs 5 fields")
                bands.append(BandSpec(int(tok[1]), tok[2], int(tok[3]), tok[4], int(tok[5])))
            else:
                raise DiagramError(f"unknown line kind {kind!r}")
        except DiagramError as err:
            raise DiagramError(f"line {lineno}: {err}") from None
        except ValueError:
            raise DiagramError(f"line {lineno}: malformed tuple {line!r}") from None

    edges: dict[int, Edge] = {}
    used = set(edge_lines)
    for lid in loops:
        eid = lid if lid >= 0 else (max(used, default=-1) + 1)
        if eid in used:
            raise DiagramError(f"duplicate edge id {eid}")
        used.add(eid)
        edges[eid] = Edge(None, None)
    for eid, (tail, head) in edge_lines.items():
        edges[eid] = Edge(tail, head)
    crossings = [Crossing(p, s) for p, s in crossings_raw]
    # edge ids referenced by crossings must have edge lines
    for ci, x in enumerate(crossings):
        for p in range(4):
            if x.ports[p] not in edges:
                raise DiagramError(f"crossing {ci} references dangling edge id {x.ports[p]}")
    return LinkDiagram(crossings, edges, basepoints, bands)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def mirror(D: LinkDiagram) -> LinkDiagram:
    """Swap over/under strands at every crossing (sign flips, n+ <-> n-)."""
    new_cross = []
    port_map: dict[tuple[int, int], tuple[int, int]] = {}
    for ci, x in enumerate(D.crossings):
        k = x.over_in  # old over-in becomes the new under-in
        rot = x.ports[k:] + x.ports[:k]
        new_cross.append(Crossing(tuple(rot), -x.sign))
        for p in range(4):
            port_map[(ci, p)] = (ci, (p - k) % 4)
    new_edges = {}
    for eid, e in D.edges.items():
        if e.is_loop:
            new_edges[eid] = e
        else:
            new_edges[eid] = Edge(port_map[e.tail], port_map[e.head])
    return LinkDiagram(new_cross, new_edges, D.basepoints, D.bands)


def component_of(D: LinkDiagram, p: Basepoint | str) -> int:
    """Component id carrying the basepoint."""
    bp = D.basepoint(p) if isinstance(p, str) else p
    if bp not in D.basepoints:
        raise DiagramError(f"basepoint {bp} absent from diagram")
    return D.component_of_edge(bp.edge)


def attach_band(D: LinkDiagram, band: BandSpec | None = None) -> LinkDiagram:
    """Band surgery merging two components, with |twists| full twists.

    Positive ``twists`` inserts ``2*twists`` positive crossings between the
    two band strands (our chirality convention); negative, negative ones.
    The returned diagram has one fewer component and no band records.
    """
    if band is None:
        if not D.bands:
            raise DiagramError("diagram carries no band to attach")
        band = D.bands[0]
    else:
        D._validate_band(band)
    ca = D.component_of_edge(band.edge_a)
    cb = D.component_of_edge(band.edge_b)
    if ca == cb:
        raise DiagramError("band endpoints on same component")

    n = band.twists
    k = 2 * abs(n)
    nx = len(D.crossings)
    fresh = max(D.edges, default=-1) + 1

    def new_id():
        nonlocal fresh
        fresh += 1
        return fresh - 1

    ea, eb = D.edges[band.edge_a], D.edges[band.edge_b]
    edges = {eid: e for eid, e in D.edges.items() if eid not in (band.edge_a, band.edge_b)}
    # (crossing, port) -> replacement edge id, for ports of the cut edges
    portmap: dict[tuple[int, int], int] = {}
    # basepoints on a cut edge move to its tail-side successor (or the merged
    # edge when the cut edge is a free loop)
    bp_moves: dict[int, int] = {}

    if k == 0:
        if ea.is_loop and eb.is_loop:
            uid = new_id()
            edges[uid] = Edge(None, None)
            bp_moves[band.edge_a] = bp_moves[band.edge_b] = uid
        elif ea.is_loop:
            # travelling around loop a connects Q's end straight into P's start
            pid = new_id()
            edges[pid] = Edge(eb.tail, eb.head)
            portmap[eb.tail] = portmap[eb.head] = pid
            bp_moves[band.edge_a] = bp_moves[band.edge_b] = pid
        elif eb.is_loop:
            pid = new_id()
            edges[pid] = Edge(ea.tail, ea.head)
            portmap[ea.tail] = portmap[ea.head] = pid
            bp_moves[band.edge_a] = bp_moves[band.edge_b] = pid
        else:
            pid, qid = new_id(), new_id()
            edges[pid] = Edge(ea.tail, eb.head)
            edges[qid] = Edge(eb.tail, ea.head)
            portmap[ea.tail] = portmap[eb.head] = pid
            portmap[eb.tail] = portmap[ea.head] = qid
            bp_moves[band.edge_a] = pid
            bp_moves[band.edge_b] = qid
        new_crossings = []
        crossings = [
            Crossing(tuple(portmap.get((ci, p), x.ports[p]) for p in range(4)), x.sign)
            for ci, x in enumerate(D.crossings)
        ] + new_crossings
        basepoints = tuple(
            Basepoint(bp.label, bp_moves.get(bp.edge, bp.edge)) for bp in D.basepoints
        )
        out = LinkDiagram(crossings, edges, basepoints, ())
        _check_band_post(D, out, band)
        return out

    # which strand passes over at each twist crossing is fixed by planarity:
    # full twists between antiparallel strands alternate the over-strand,
    # so try the two alternating phases (plus uniform fallbacks) and keep
    # a pattern that preserves the genus
    swap = (band.side_a == "left") != (band.side_b == "left")
    candidates = ["PQ", "QP", "P", "Q"]
    if swap:
        candidates = ["QP", "PQ", "Q", "P"]
    g0 = genus(D)
    for cyc in candidates:
        pattern = (cyc * k)[:k]
        out = _attach_twisted(D, band, edges, ea, eb, k, n, nx, fresh, pattern)
        if genus(out) == g0:
            return out
    raise DiagramError(
        "band cannot be attached between these edges without extra crossings"
    )


def _attach_twisted(D, band, base_edges, ea, eb, k, n, nx, fresh, pattern):
    """Twist-region construction; pattern[i] picks crossing i's under-strand."""
    edges = dict(base_edges)
    portmap: dict[tuple[int, int], int] = {}
    bp_moves: dict[int, int] = {}

    def new_id():
        nonlocal fresh
        fresh += 1
        return fresh - 1

    sign = 1 if n > 0 else -1
    # twist-region strands: P runs a -> b through crossings t_0..t_{k-1},
    # Q runs b -> a through the same crossings in reverse order
    p_seg = [new_id() for _ in range(k + 1)]
    q_seg = [new_id() for _ in range(k + 1)]
    if ea.is_loop:
        q_seg[k] = p_seg[0]  # around loop a, Q's end is P's start
    if eb.is_loop:
        p_seg[k] = q_seg[0]
    tails: dict[int, tuple[int, int] | None] = {}
    heads: dict[int, tuple[int, int] | None] = {}
    new_crossings = []
    for i in range(k):
        ci = nx + i
        p_in, p_out = p_seg[i], p_seg[i + 1]
        q_in, q_out = q_seg[k - 1 - i], q_seg[k - i]
        if pattern[i] == "P":  # P underneath, Q passes over
            under_in, under_out, over_in_e, over_out_e = p_in, p_out, q_in, q_out
        else:
            under_in, under_out, over_in_e, over_out_e = q_in, q_out, p_in, p_out
        if sign > 0:
            ports = (under_in, over_out_e, under_out, over_in_e)
            oi, oo = 3, 1
        else:
            ports = (under_in, over_in_e, under_out, over_out_e)
            oi, oo = 1, 3
        new_crossings.append(Crossing(ports, sign))
        heads[under_in] = (ci, 0)
        tails[under_out] = (ci, 2)
        heads[over_in_e] = (ci, oi)
        tails[over_out_e] = (ci, oo)
    if not ea.is_loop:
        tails[p_seg[0]] = ea.tail
        heads[q_seg[k]] = ea.head
        portmap[ea.tail] = p_seg[0]
        portmap[ea.head] = q_seg[k]
    if not eb.is_loop:
        heads[p_seg[k]] = eb.head
        tails[q_seg[0]] = eb.tail
        portmap[eb.head] = p_seg[k]
        portmap[eb.tail] = q_seg[0]
    for eid in set(tails) | set(heads):
        edges[eid] = Edge(tails[eid], heads[eid])
    bp_moves[band.edge_a] = p_seg[0]
    bp_moves[band.edge_b] = q_seg[0]

    crossings = [
        Crossing(tuple(portmap.get((ci, p), x.ports[p]) for p in range(4)), x.sign)
        for ci, x in enumerate(D.crossings)
    ] + new_crossings
    basepoints = tuple(
        Basepoint(bp.label, bp_moves.get(bp.edge, bp.edge)) for bp in D.basepoints
    )
    out = LinkDiagram(crossings, edges, basepoints, ())
    _check_band_post(D, out, band)
    return out


def _check_band_post(D, out, band):
    if len(out.components) != len(D.components) - 1:
        raise DiagramError("band surgery did not merge exactly one pair of components")
    if out.n_crossings != D.n_crossings + 2 * abs(band.twists):
        raise DiagramError("band surgery produced wrong crossing count")


def flip_crossing(D: LinkDiagram, c: int) -> LinkDiagram:
    """Swap over/under at a single crossing (its sign flips)."""
    if not (0 <= c < D.n_crossings):
        raise DiagramError(f"no crossing {c}")
    x = D.crossings[c]
    k = x.over_in
    new_cross = list(D.crossings)
    new_cross[c] = Crossing(x.ports[k:] + x.ports[:k], -x.sign)
    new_edges = {}
    for eid, e in D.edges.items():
        if e.is_loop:
            new_edges[eid] = e
            continue
        tail = (e.tail[0], (e.tail[1] - k) % 4) if e.tail[0] == c else e.tail
        head = (e.head[0], (e.head[1] - k) % 4) if e.head[0] == c else e.head
        new_edges[eid] = Edge(tail, head)
    return LinkDiagram(new_cross, new_edges, D.basepoints, D.bands)


def smooth_crossing(D: LinkDiagram, c: int) -> LinkDiagram:
    """Replace crossing ``c`` by its oriented smoothing.

    The in-strands splice straight through; basepoints survive on the
    merged edges.  Crossing ids above ``c`` shift down by one.
    """
    if not (0 <= c < D.n_crossings):
        raise DiagramError(f"no crossing {c}")
    x = D.crossings[c]
    if x.sign > 0:
        nxt = {x.ports[0]: x.ports[1], x.ports[3]: x.ports[2]}
    else:
        nxt = {x.ports[0]: x.ports[3], x.ports[1]: x.ports[2]}

    def cmap(ci):
        return ci - 1 if ci > c else ci

    def remap(e: Edge) -> Edge:
        if e.is_loop:
            return e
        return Edge((cmap(e.tail[0]), e.tail[1]), (cmap(e.head[0]), e.head[1]))

    vals = set(nxt.values())
    involved = set(nxt) | vals
    edges = {eid: remap(e) for eid, e in D.edges.items() if eid not in involved}
    rename: dict[int, int] = {}
    visited = set()
    for e0 in sorted(nxt):
        if e0 in visited or e0 in vals:
            continue  # chain starts are keys whose tail survives
        chain = [e0]
        visited.add(e0)
        cur = e0
        while cur in nxt:
            cur = nxt[cur]
            chain.append(cur)
            visited.add(cur)
        keep = chain[0]
        edges[keep] = Edge(remap(D.edges[chain[0]]).tail, remap(D.edges[chain[-1]]).head)
        for eid in chain:
            rename[eid] = keep
    for e0 in sorted(nxt):
        if e0 in visited:
            continue  # a closed cycle of splices: a new free loop
        chain = [e0]
        visited.add(e0)
        cur = nxt[e0]
        while cur != e0:
            chain.append(cur)
            visited.add(cur)
            cur = nxt[cur]
        keep = min(chain)
        edges[keep] = Edge(None, None)
        for eid in chain:
            rename[eid] = keep

    crossings = [
        Crossing(tuple(rename.get(p, p) for p in xx.ports), xx.sign)
        for ci, xx in enumerate(D.crossings)
        if ci != c
    ]
    basepoints = tuple(Basepoint(bp.label, rename.get(bp.edge, bp.edge)) for bp in D.basepoints)
    bands = tuple(
        BandSpec(rename.get(b.edge_a, b.edge_a), b.side_a,
                 rename.get(b.edge_b, b.edge_b), b.side_b, b.twists)
        for b in D.bands
    )
    return LinkDiagram(crossings, edges, basepoints, bands)


# ---------------------------------------------------------------------------
# builders (programmatic corpus construction)
# ---------------------------------------------------------------------------

def from_signed_pd(tuples, loops=(), basepoints=(), bands=()) -> LinkDiagram:
    """Build a diagram from signed PD tuples; edge orientations are derived.

    Each entry is ``(a, b, c, d, sign)`` with ports counterclockwise from
    the incoming under-strand.  Every edge id must occur exactly once as an
    in-port label and once as an out-port label.
    """
    crossings = [Crossing(tuple(t[:4]), t[4]) for t in tuples]
    tails: dict[int, tuple[int, int]] = {}
    heads: dict[int, tuple[int, int]] = {}
    for ci, x in enumerate(crossings):
        for p in x.in_ports:
            eid = x.ports[p]
            if eid in heads:
                raise DiagramError(f"edge {eid} has two heads")
            heads[eid] = (ci, p)
        for p in x.out_ports:
            eid = x.ports[p]
            if eid in tails:
                raise DiagramError(f"edge {eid} has two tails")
            tails[eid] = (ci, p)
    if set(tails) != set(heads):
        raise DiagramError(f"dangling edge ids {set(tails) ^ set(heads)}")
    edges = {eid: Edge(tails[eid], heads[eid]) for eid in tails}
    for lid in loops:
        if lid in edges:
            raise DiagramError(f"duplicate edge id {lid}")
        edges[lid] = Edge(None, None)
    return LinkDiagram(crossings, edges, basepoints, bands)


def free_loop(basepoints=()) -> LinkDiagram:
    return LinkDiagram((), {0: Edge(None, None)}, basepoints)


def unlink(n: int, basepoints=()) -> LinkDiagram:
    return LinkDiagram((), {i: Edge(None, None) for i in range(n)}, basepoints)


def braid_closure(word, strands: int, basepoints=(), bands=()) -> LinkDiagram:
    """Closure of a braid word; letter k means sigma_|k| with sign(k).

    Strand positions are 1-based; all strands are oriented upward, so a
    positive letter gives a positive crossing.
    """
    if any(abs(k) < 1 or abs(k) >= strands for k in word):
        raise DiagramError("braid letter out of range")
    fresh = 0

    def new_id():
        nonlocal fresh
        fresh += 1
        return fresh - 1

    start = [new_id() for _ in range(strands)]
    cur = start[:]
    tuples = []
    for k in word:
        i = abs(k) - 1
        nl, nr = new_id(), new_id()
        if k > 0:
            # over-strand from position i: ports (under-in, over-out, under-out, over-in)
            tuples.append((cur[i + 1], nr, nl, cur[i], 1))
        else:
            tuples.append((cur[i], cur[i + 1], nr, nl, -1))
        cur[i], cur[i + 1] = nl, nr
    # close up: identify top ids with the starting ids
    subst = {cur[j]: start[j] for j in range(strands)}
    loops = [start[j] for j in range(strands) if cur[j] == start[j]]

    def sub(e):
        return subst.get(e, e)

    tuples = [(sub(a), sub(b), sub(c), sub(d), s) for a, b, c, d, s in tuples]
    return from_signed_pd(tuples, loops=loops, basepoints=basepoints, bands=bands)


def disjoint_union(*diagrams: LinkDiagram) -> LinkDiagram:
    """Place diagrams side by side; edge/crossing ids are shifted."""
    crossings: list[Crossing] = []
    edges: dict[int, Edge] = {}
    basepoints: list[Basepoint] = []
    bands: list[BandSpec] = []
    eoff = 0
    for D in diagrams:
        coff = len(crossings)
        emap = {eid: eid + eoff for eid in D.edges}
        for x in D.crossings:
            crossings.append(Crossing(tuple(emap[e] for e in x.ports), x.sign))
        for eid, e in D.edges.items():
            if e.is_loop:
                edges[emap[eid]] = e
            else:
                edges[emap[eid]] = Edge((e.tail[0] + coff, e.tail[1]), (e.head[0] + coff, e.head[1]))
        for bp in D.basepoints:
            basepoints.append(Basepoint(bp.label, emap[bp.edge]))
        for b in D.bands:
            bands.append(BandSpec(emap[b.edge_a], b.side_a, emap[b.edge_b], b.side_b, b.twists))
        eoff += (max(D.edges, default=-1) + 1)
    return LinkDiagram(crossings, edges, basepoints, bands)


def with_basepoints(D: LinkDiagram, q: int | None = None, r: int | None = None) -> LinkDiagram:
    bps = []
    if q is not None:
        bps.append(Basepoint("q", q))
    if r is not None:
        bps.append(Basepoint("r", r))
    return LinkDiagram(D.crossings, D.edges, tuple(bps), D.bands)


def unknot(kinks: int = 0, negative: bool = False) -> LinkDiagram:
    """Unknot diagram with the given number of kinks (positive by default)."""
    if kinks == 0:
        return free_loop()
    tuples = []
    for i in range(kinks):
        big_in, big_out, loop = i % kinks, (i + 1) % kinks, kinks + i
        if negative:
            tuples.append((big_in, loop, loop, big_out, -1))
        else:
            tuples.append((big_in, big_out, loop, loop, 1))
    return from_signed_pd(tuples)


def trefoil(positive: bool = True) -> LinkDiagram:
    w = [1, 1, 1] if positive else [-1, -1, -1]
    return braid_closure(w, 2)


def hopf_link(positive: bool = True) -> LinkDiagram:
    w = [1, 1] if positive else [-1, -1]
    return braid_closure(w, 2)


def hopf_clasp(positive: bool = True) -> LinkDiagram:
    """Hopf link drawn as a clasp between antiparallel round circles.

    Same oriented link as :func:`hopf_link`, but the strands away from
    the crossings run antiparallel, so orientation-preserving bands
    attach with an even twist region (see :func:`attach_band`).
    """
    D = from_signed_pd([(2, 0, 3, 1, 1), (0, 2, 1, 3, 1)])
    return D if positive else mirror(D)


def figure_eight() -> LinkDiagram:
    return braid_closure([1, -2, 1, -2], 3)
