"""State-sum evaluation of closed decorated surfaces-with-membranes.

State spaces of resolution graphs are built by a universal construction:
cup generators are combinatorial surface systems bounding the graph, the
bilinear pairing of two generators is the evaluation of the closed
object obtained by gluing them top-to-top, and the state space is the
span of the generators modulo the kernel of the pairing.

A closed object consists of 1-labeled facets (with Euler characteristics
and dots), 2-labeled facets (membranes), and seam circles where two
1-facets and a membrane meet.  Its evaluation is a sum over colorings:
1-facets get a pigment in {1..N}, the two pages of every seam get
distinct pigments, membranes get the unordered page pair, and each
coloring contributes::

    (-1)^(s(c)) * (dot monomial) / prod_{i<j} (x_i - x_j)^(chi_ij(c)/2)

where chi_ij is the Euler characteristic of the bichrome surface (facets
whose pigment set contains exactly one of i, j) and::

    s(c) = sum_i i * chi(F_i(c))/2  +  #{positive seam circles}

over the monochrome surfaces F_i.  Everything is homogeneous, so the
non-equivariant value is zero unless the dot degree balances the facet
characteristics, in which case the sum is a constant evaluated exactly
at x_i = i.  Denominator factors are taken as positive differences
x_j - x_i for i < j; relative to the opposite choice this multiplies a
closed evaluation by a global sign fixed by its degree balance, a gauge
that does not affect the resulting theory (the sphere with N-1 dots
evaluates to (-1)^N).

Cup generators are parametrized per rung by either a *zip* (membrane
reaching down to a birth of parallel strands) or a *window* (the
membrane runs through the rung and the flanking 1-arcs are separate
pocket walls).  Composition with a single zip/unzip and dot decorations
are supported, which is all the cube of resolutions needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .moy import MoyGraph, MoyError


class FoamError(ArithmeticError):
    pass


# Convention bit for the seam-circle sign: a seam counts as positive when
# its left page carries the smaller pigment.  Pinned by the N=2 backend
# agreement and d^2 = 0 at N = 3.
THETA_POSITIVE_LEFT_MIN = True


# ---------------------------------------------------------------------------
# cups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Seg:
    """Seam segment of one cup, running node a -> node b.

    Nodes are (crossing id, 'm'|'s'); left/right are 1-piece ids, mem a
    2-piece id, all local to the cup.
    """

    a: tuple
    b: tuple
    left: int | tuple
    right: int | tuple
    mem: tuple


class Cup:
    """One side of a pairing: a surface system bounding ``graph``."""

    __slots__ = ("graph", "key", "piece_of_arc", "chi1", "chi2", "p2_of_rung", "segs", "dots", "edots")

    def __init__(self, graph, key, piece_of_arc, chi1, chi2, p2_of_rung, segs, dots=None, edots=()):
        self.graph = graph
        self.key = key  # hashable structure identity (dots excluded)
        self.piece_of_arc = piece_of_arc
        self.chi1 = chi1
        self.chi2 = chi2
        self.p2_of_rung = p2_of_rung
        self.segs = tuple(segs)
        self.dots = dict(dots or {})
        self.edots = tuple(edots)

    def with_dots(self, arc_dots=None, edots=()):
        """Add dots on arcs and e_k decorations on rungs' membranes."""
        dots = dict(self.dots)
        for arc, k in (arc_dots or {}).items():
            p = self.piece_of_arc[arc]
            dots[p] = dots.get(p, 0) + k
        new_edots = tuple((self.p2_of_rung[c], k) for c, k in edots)
        return Cup(self.graph, self.key, self.piece_of_arc, self.chi1, self.chi2,
                   self.p2_of_rung, self.segs, dots, self.edots + new_edots)

    @property
    def dot_degree(self):
        return sum(self.dots.values()) + sum(k for _, k in self.edots)

    @property
    def pieces(self):
        return sorted(self.chi1)


class SigmaInvalid(ValueError):
    pass


def side_structure(G: MoyGraph, sigma: dict[int, str]) -> Cup:
    """Cup layout for a zip/window rung-state vector.

    Raises SigmaInvalid when the window pattern does not close up into
    membrane circles (left walls must return on the left).
    """
    zipped = {c for c, s in sigma.items() if s == "z"}
    windowed = {c for c, s in sigma.items() if s == "w"}
    if zipped | windowed != set(G.rungs):
        raise MoyError("sigma must assign every rung")

    parent = {a: a for a in G.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in zipped:
        r = G.rungs[c]
        parent[find(r.in_l)] = find(r.out_l)
        parent[find(r.in_r)] = find(r.out_r)
    piece_of_arc = {a: find(a) for a in G.arcs}

    out_germs: dict = {}
    in_germs: dict = {}
    for c in windowed:
        r = G.rungs[c]
        out_germs.setdefault(piece_of_arc[r.out_l], []).append((c, "l"))
        out_germs.setdefault(piece_of_arc[r.out_r], []).append((c, "r"))
        in_germs.setdefault(piece_of_arc[r.in_l], []).append((c, "l"))
        in_germs.setdefault(piece_of_arc[r.in_r], []).append((c, "r"))
    for p in set(out_germs) | set(in_germs):
        if len(out_germs.get(p, [])) != 1 or len(in_germs.get(p, [])) != 1:
            raise SigmaInvalid("wall touches windows more than twice")

    window_next: dict[int, int] = {}
    walls: dict[int, tuple] = {}
    for c in windowed:
        r = G.rungs[c]
        pl, pr = piece_of_arc[r.out_l], piece_of_arc[r.out_r]
        if pl not in in_germs or pr not in in_germs:
            raise SigmaInvalid("window wall never returns to a windowed rung")
        cl, sl = in_germs[pl][0]
        cr, sr = in_germs[pr][0]
        if cl != cr or sl != "l" or sr != "r" or pl == pr:
            raise SigmaInvalid("window walls do not close a planar window")
        window_next[c] = cl
        walls[c] = (pl, pr)

    chi2 = {}
    p2_of_rung = {}
    for c in zipped:
        chi2[("z", c)] = 1
        p2_of_rung[c] = ("z", c)
    seen = set()
    for c in sorted(windowed):
        if c in seen:
            continue
        cyc = [c]
        seen.add(c)
        nxt = window_next[c]
        while nxt != c:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = window_next[nxt]
        p2 = ("w", cyc[0])
        chi2[p2] = 1
        for cc in cyc:
            p2_of_rung[cc] = p2

    chi1 = {p: 1 for p in set(piece_of_arc.values())}
    segs = []
    for c in sorted(zipped):
        r = G.rungs[c]
        segs.append(Seg((c, "m"), (c, "s"), piece_of_arc[r.in_l], piece_of_arc[r.in_r],
                        p2_of_rung[c]))
    for c in sorted(windowed):
        pl, pr = walls[c]
        segs.append(Seg((c, "s"), (window_next[c], "m"), pl, pr, p2_of_rung[c]))
    key = ("base", tuple(sorted(sigma.items())))
    return Cup(G, key, piece_of_arc, chi1, chi2, p2_of_rung, segs)


def valid_sigmas(G: MoyGraph):
    rungs = sorted(G.rungs)
    out = []
    for bits in itertools.product("zw", repeat=len(rungs)):
        sigma = dict(zip(rungs, bits))
        try:
            side_structure(G, sigma)
        except SigmaInvalid:
            continue
        out.append(sigma)
    return out


# ---------------------------------------------------------------------------
# composites with one elementary move
# ---------------------------------------------------------------------------

def compose_unzip(cup: Cup, target: MoyGraph, crossing: int) -> Cup:
    """Cup of ``target`` obtained by unzipping rung ``crossing`` of cup.graph.

    The unzip sheet joins the left-in and left-out pieces (ditto right)
    and caps the membrane at the rung into a closed fin.
    """
    G = cup.graph
    if crossing not in G.rungs or crossing in target.rungs:
        raise MoyError(f"unzip: crossing {crossing} must be a rung of the source only")
    r = G.rungs[crossing]

    parent = {p: p for p in cup.chi1}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chi1 = dict(cup.chi1)
    # one connecting sheet per side of the rung: chi +1, glued along 2 arcs
    for a, b in ((r.in_l, r.out_l), (r.in_r, r.out_r)):
        pa, pb = find(cup.piece_of_arc[a]), find(cup.piece_of_arc[b])
        if pa == pb:
            chi1[pa] = chi1[pa] - 1
        else:
            merged = chi1[pa] + chi1[pb] - 1
            parent[pa] = pb
            del chi1[pa]
            chi1[pb] = merged

    edge_piece = {}
    for aid, arc in G.arcs.items():
        p = find(cup.piece_of_arc[aid])
        for e in arc.edges:
            edge_piece[e] = p
    piece_of_arc = {aid: edge_piece[arc.edges[0]] for aid, arc in target.arcs.items()}

    p2_of_rung = {c: p for c, p in cup.p2_of_rung.items() if c != crossing}
    segs = [Seg(s.a, s.b, find(s.left), find(s.right), s.mem) for s in cup.segs]
    segs.append(Seg((crossing, "m"), (crossing, "s"),
                    find(cup.piece_of_arc[r.in_l]), find(cup.piece_of_arc[r.in_r]),
                    cup.p2_of_rung[crossing]))
    dots = {}
    for p, k in cup.dots.items():
        p2 = find(p)
        dots[p2] = dots.get(p2, 0) + k
    key = ("unzip", crossing, cup.key)
    return Cup(target, key, piece_of_arc, chi1, dict(cup.chi2), p2_of_rung, segs, dots, cup.edots)


def compose_zip(cup: Cup, target: MoyGraph, crossing: int) -> Cup:
    """Cup of ``target`` obtained by zipping in the rung at ``crossing``."""
    G = cup.graph
    if crossing in G.rungs or crossing not in target.rungs:
        raise MoyError(f"zip: crossing {crossing} must be a rung of the target only")
    r = target.rungs[crossing]
    edge_piece = {}
    for aid, arc in G.arcs.items():
        for e in arc.edges:
            edge_piece[e] = cup.piece_of_arc[aid]
    piece_of_arc = {aid: edge_piece[arc.edges[0]] for aid, arc in target.arcs.items()}
    zl, zr = piece_of_arc[r.in_l], piece_of_arc[r.in_r]
    if piece_of_arc[r.out_l] != zl or piece_of_arc[r.out_r] != zr:
        raise FoamError("zip strands are not parallel in the source cup")
    p2 = ("mz", crossing)
    chi2 = dict(cup.chi2)
    chi2[p2] = 1
    p2_of_rung = dict(cup.p2_of_rung)
    p2_of_rung[crossing] = p2
    segs = list(cup.segs)
    segs.append(Seg((crossing, "m"), (crossing, "s"), zl, zr, p2))
    key = ("zip", crossing, cup.key)
    return Cup(target, key, piece_of_arc, dict(cup.chi1), chi2, p2_of_rung, segs,
               dict(cup.dots), cup.edots)


# ---------------------------------------------------------------------------
# assembled pairing structure (dots stripped, colorings precomputed)
# ---------------------------------------------------------------------------

class _UF:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        self.add(x)
        self.add(y)
        self.parent[self.find(x)] = self.find(y)


class PairingStructure:
    """Colorings and dot-independent coefficients for a bra/ket cup pair.

    The expensive part of an evaluation (facet assembly, coloring
    enumeration, signs and denominators) only depends on the cup
    structures, so it is computed once and reused for every dot vector.
    """

    def __init__(self, bra: Cup, ket: Cup, N: int):
        if bra.graph.signature(with_basepoints=False) != ket.graph.signature(with_basepoints=False):
            raise FoamError("pairing requires cups over the same graph")
        self.N = N
        G = bra.graph
        uf1 = _UF()
        for side, cup in (("b", bra), ("k", ket)):
            for p in cup.chi1:
                uf1.add((side, p))
        for aid in G.arcs:
            uf1.union(("b", bra.piece_of_arc[aid]), ("k", ket.piece_of_arc[aid]))

        chi1: dict = {}
        for side, cup in (("b", bra), ("k", ket)):
            for p, c in cup.chi1.items():
                f = uf1.find((side, p))
                chi1[f] = chi1.get(f, 0) + c
        for aid, arc in G.arcs.items():
            if not arc.is_circle:
                f = uf1.find(("b", bra.piece_of_arc[aid]))
                chi1[f] -= 1

        uf2 = _UF()
        for side, cup in (("b", bra), ("k", ket)):
            for p in cup.chi2:
                uf2.add((side, p))
        for c in G.rungs:
            uf2.union(("b", bra.p2_of_rung[c]), ("k", ket.p2_of_rung[c]))
        chi2: dict = {}
        for side, cup in (("b", bra), ("k", ket)):
            for p, c in cup.chi2.items():
                f = uf2.find((side, p))
                chi2[f] = chi2.get(f, 0) + c
        for c in G.rungs:
            chi2[uf2.find(("b", bra.p2_of_rung[c]))] -= 1

        # seam circles
        ends: dict = {}
        cups = {"b": bra, "k": ket}
        for side, cup in cups.items():
            for si, s in enumerate(cup.segs):
                for node in (s.a, s.b):
                    ends.setdefault(node, []).append((side, si))
        for node, es in ends.items():
            if len(es) != 2:
                raise FoamError(f"seam node {node} has {len(es)} segment ends")
        seams = []  # (left facet, right facet, membrane facet)
        visited = set()
        for node0 in sorted(ends):
            for start in ends[node0]:
                if start in visited:
                    continue
                lefts, rights, mems = set(), set(), set()
                cur, node = start, node0
                while cur not in visited:
                    visited.add(cur)
                    side, si = cur
                    s = cups[side].segs[si]
                    lefts.add(uf1.find((side, s.left)))
                    rights.add(uf1.find((side, s.right)))
                    mems.add(uf2.find((side, s.mem)))
                    node = s.b if s.a == node else s.a
                    nxt = [e for e in ends[node] if e != cur]
                    if len(nxt) != 1:
                        raise FoamError("seam tracing failed")
                    cur = nxt[0]
                if len(lefts) != 1 or len(rights) != 1 or len(mems) != 1:
                    raise FoamError("inconsistent pages along a seam circle")
                seams.append((lefts.pop(), rights.pop(), mems.pop()))
        for m in chi2:
            if not any(s[2] == m for s in seams):
                raise FoamError("membrane facet without a seam")

        self.facet_of = {key: uf1.find(key) for key in uf1.parent}
        self.mem_of = {key: uf2.find(key) for key in uf2.parent}
        self.chi1 = chi1
        self.chi2 = chi2
        self.seams = seams
        self.balance2 = (N - 1) * sum(chi1.values()) + 2 * (N - 2) * sum(chi2.values())
        self._enumerate_colorings()

    def _enumerate_colorings(self):
        N = self.N
        order = []
        seen = set()
        for l, r, _m in self.seams:
            for f in (l, r):
                if f not in seen:
                    seen.add(f)
                    order.append(f)
        for f in sorted(self.chi1):
            if f not in seen:
                order.append(f)
        idx = {f: i for i, f in enumerate(order)}
        n_f = len(order)
        self.facet_index = idx
        self.facet_order = order

        seam_idx = [(idx[l], idx[r], m) for l, r, m in self.seams]
        seam_by_last = [[] for _ in range(n_f)]
        for l, r, m in seam_idx:
            seam_by_last[max(l, r)].append((l, r))
        mem_seams: dict = {}
        for l, r, m in seam_idx:
            mem_seams.setdefault(m, []).append((l, r))
        mem_by_last = [[] for _ in range(n_f)]
        for m, ss in mem_seams.items():
            if len(ss) > 1:
                mem_by_last[max(max(l, r) for l, r in ss)].append(ss)
        self.mem_rep = {m: ss[0] for m, ss in mem_seams.items()}
        mem_list = sorted(self.mem_rep)
        self.mem_pos = {m: i for i, m in enumerate(mem_list)}

        chi1l = [self.chi1[f] for f in order]
        npairs = N * (N - 1) // 2
        pair_pos = {}
        k = 0
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                pair_pos[(i, j)] = k
                k += 1
        raw = []  # (colors, sign, exponent vector over pairs, memcolors)
        color = [0] * n_f

        def visit():
            chi_i = [0] * (N + 1)
            for k in range(n_f):
                chi_i[color[k]] += chi1l[k]
            memcol = []
            for m in mem_list:
                l, r = self.mem_rep[m]
                pair = (color[l], color[r])
                memcol.append(pair)
                chi_i[pair[0]] += self.chi2[m]
                chi_i[pair[1]] += self.chi2[m]
            s = 0
            for i in range(1, N + 1):
                if chi_i[i] % 2:
                    raise FoamError("odd monochrome Euler characteristic")
                s += i * (chi_i[i] // 2)
            for l, r, _m in seam_idx:
                if (color[l] < color[r]) == THETA_POSITIVE_LEFT_MIN:
                    s += 1
            exps = [0] * npairs
            for i in range(1, N + 1):
                for j in range(i + 1, N + 1):
                    chi_ij = 0
                    for k in range(n_f):
                        if (color[k] == i) ^ (color[k] == j):
                            chi_ij += chi1l[k]
                    for mi, pair in enumerate(memcol):
                        if (i in pair) ^ (j in pair):
                            chi_ij += self.chi2[mem_list[mi]]
                    if chi_ij % 2:
                        raise FoamError("odd bichrome Euler characteristic")
                    exps[pair_pos[(i, j)]] = chi_ij // 2
            raw.append((tuple(color), (-1) ** s, exps, tuple(memcol)))

        def rec(k):
            if k == n_f:
                visit()
                return
            for c in range(1, N + 1):
                color[k] = c
                ok = all(color[l] != color[r] for l, r in seam_by_last[k])
                if ok:
                    for ss in mem_by_last[k]:
                        s0 = {color[ss[0][0]], color[ss[0][1]]}
                        if any({color[l], color[r]} != s0 for l, r in ss[1:]):
                            ok = False
                            break
                if ok:
                    rec(k + 1)
            color[k] = 0

        rec(0)

        # clear denominators: weight = sign * prod (x_i - x_j)^(max_e - e)
        deltas = [j - i for i in range(1, N + 1) for j in range(i + 1, N + 1)]
        if raw:
            maxexp = [max(r[2][t] for r in raw) for t in range(npairs)]
        else:
            maxexp = [0] * npairs
        self._den = 1
        for t in range(npairs):
            self._den *= deltas[t] ** maxexp[t]
        colorings = []
        for colors, sign, exps, memcol in raw:
            w = sign
            for t in range(npairs):
                w *= deltas[t] ** (maxexp[t] - exps[t])
            colorings.append((colors, w, memcol))
        self.colorings = colorings
        self._value_cache: dict = {}

    def value(self, facet_dots: dict, edot_list) -> int:
        """Evaluate with dots (facet -> exponent) and e-decorations
        ((membrane facet, k) pairs)."""
        dotdeg = sum(facet_dots.values()) + sum(k for _, k in edot_list)
        if self.balance2 % 2 or dotdeg != self.balance2 // 2:
            return 0
        idx = self.facet_index
        dot_items = tuple(sorted((idx[f], k) for f, k in facet_dots.items() if k))
        ekey = tuple(sorted((self.mem_pos[m], k) for m, k in edot_list))
        key = (dot_items, ekey)
        got = self._value_cache.get(key)
        if got is not None:
            return got
        total = 0
        for colors, w, memcol in self.colorings:
            num = w
            for fi, k in dot_items:
                num *= colors[fi] ** k
            for mi, k in ekey:
                i, j = memcol[mi]
                num *= (i + j) if k == 1 else i * j
            total += num
        if total % self._den:
            raise FoamError(f"evaluation is not integral: {total}/{self._den}")
        out = total // self._den
        self._value_cache[key] = out
        return out


class PairingCache:
    """Caches PairingStructure objects keyed by cup structure identity."""

    def __init__(self, N: int):
        self.N = N
        self._cache: dict = {}

    def structure(self, bra: Cup, ket: Cup) -> PairingStructure:
        key = (bra.key, ket.key)
        ps = self._cache.get(key)
        if ps is None:
            ps = PairingStructure(bra, ket, self.N)
            self._cache[key] = ps
        return ps

    def pair(self, bra: Cup, ket: Cup) -> int:
        ps = self.structure(bra, ket)
        facet_dots: dict = {}
        for side, cup in (("b", bra), ("k", ket)):
            for p, k in cup.dots.items():
                f = ps.facet_of[(side, p)]
                facet_dots[f] = facet_dots.get(f, 0) + k
        edots = []
        for side, cup in (("b", bra), ("k", ket)):
            for p2, k in cup.edots:
                edots.append((ps.mem_of[(side, p2)], k))
        return ps.value(facet_dots, edots)


def pairing(bra: Cup, ket: Cup, N: int) -> int:
    return PairingCache(N).pair(bra, ket)
