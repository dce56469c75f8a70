"""State spaces of resolution graphs, with dot operators and edge maps.

Two backends share one contract (dimension equals the coloring count,
X^N = 0 per 1-arc, E_2^(N-1) = 0 per rung, edge maps assemble into a
complex with d^2 = 0):

* ``frobenius`` (N = 2 only): each rung is traded for the alternate
  smoothing, every resulting circle carries the rank-2 algebra
  R[X]/X^2, and edge maps are the usual merge/split structure maps.
* ``foam`` (any N >= 2): generators are dotted cup systems, the Gram
  matrix comes from the closed evaluation in :mod:`krfoam.foam_eval`,
  and row/column bases are picked per grading block until the oracle
  dimension is hit (retrying with a deeper dot pool before giving up).

State spaces are immutable once built and are cached per (graph, N,
field); the integer pairing data is shared across fields.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .fields import Field
from .linalg import ExactMatrix, _rref_mod, _rref_frac
from .moy import MoyGraph, MoyError, coloring_count
from . import foam_eval as fe


class StateSpaceError(ArithmeticError):
    pass


class FoamMap:
    """Linear map between state spaces induced by a single zip/unzip."""

    __slots__ = ("source", "target", "matrix", "crossing", "qdegree")

    def __init__(self, source, target, matrix, crossing, qdegree=None):
        if matrix.shape != (target.dim, source.dim):
            raise StateSpaceError("foam map shape mismatch")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.crossing = crossing
        self.qdegree = qdegree


# ---------------------------------------------------------------------------
# N = 2 backend: circles with the rank-2 algebra
# ---------------------------------------------------------------------------

class FrobeniusStateSpace:
    """Circle model at N = 2: every rung is the alternate smoothing."""

    backend = "frobenius"

    def __init__(self, graph: MoyGraph, field: Field):
        self.graph = graph
        self.N = 2
        self.field = field
        parent = {a: a for a in graph.arcs}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for r in graph.rungs.values():
            parent[find(r.in_l)] = find(r.in_r)
            parent[find(r.out_l)] = find(r.out_r)
        self.circle_of_arc = {a: find(a) for a in graph.arcs}
        self.circles = sorted(set(self.circle_of_arc.values()))
        self.circle_index = {c: i for i, c in enumerate(self.circles)}
        self.circle_edges = {
            c: frozenset(
                e for a, arc in graph.arcs.items() if find(a) == c for e in arc.edges
            )
            for c in self.circles
        }
        self.dim = 1 << len(self.circles)
        # quantum degree of a basis mask: +1 per undotted circle, -1 per dotted
        k = len(self.circles)
        self.gradings = [k - 2 * bin(m).count("1") for m in range(self.dim)]
        self._dot_cache: dict = {}

    def basis_label(self, mask: int) -> str:
        return "".join("x" if (mask >> i) & 1 else "1" for i in range(len(self.circles)))

    def x_matrix(self, arc: int) -> ExactMatrix:
        ci = self.circle_index[self.circle_of_arc[arc]]
        key = ("x", ci)
        got = self._dot_cache.get(key)
        if got is None:
            A = np.zeros((self.dim, self.dim), dtype=np.int64)
            for m in range(self.dim):
                if not (m >> ci) & 1:
                    A[m | (1 << ci), m] = 1
            got = ExactMatrix.from_int_array(self.field, A)
            self._dot_cache[key] = got
        return got

    def dot_matrix(self, op) -> ExactMatrix:
        kind = op[0]
        if kind == "x":
            return self.x_matrix(op[1])
        if kind == "e":
            _, rung, k = op
            r = self.graph.rungs[rung]
            xl, xr = self.x_matrix(r.in_l), self.x_matrix(r.in_r)
            return (xl + xr) if k == 1 else (xl @ xr)
        raise StateSpaceError(f"unknown dot operator {op}")


def _frobenius_edge_map(SV: FrobeniusStateSpace, SW: FrobeniusStateSpace) -> ExactMatrix:
    """Saddle map: the two sides differ by one merge or one split."""
    ev = {c: SV.circle_edges[c] for c in SV.circles}
    ew = {c: SW.circle_edges[c] for c in SW.circles}
    match_vw = {}
    for cv, sv in ev.items():
        for cw, sw in ew.items():
            if sv == sw:
                match_vw[cv] = cw
    un_v = [c for c in SV.circles if c not in match_vw]
    un_w = [c for c in SW.circles if c not in set(match_vw.values())]
    A = np.zeros((SW.dim, SV.dim), dtype=np.int64)
    if len(un_v) == 2 and len(un_w) == 1:
        a, b = (SV.circle_index[c] for c in un_v)
        c = SW.circle_index[un_w[0]]
        for m in range(SV.dim):
            da, db = (m >> a) & 1, (m >> b) & 1
            if da and db:
                continue  # x.x -> 0
            rest = 0
            for ci, cv in enumerate(SV.circles):
                if ci in (a, b) or not (m >> ci) & 1:
                    continue
                rest |= 1 << SW.circle_index[match_vw[cv]]
            A[rest | ((da | db) << c), m] = 1
    elif len(un_v) == 1 and len(un_w) == 2:
        c = SV.circle_index[un_v[0]]
        a, b = (SW.circle_index[x] for x in un_w)
        for m in range(SV.dim):
            rest = 0
            for ci, cv in enumerate(SV.circles):
                if ci == c or not (m >> ci) & 1:
                    continue
                rest |= 1 << SW.circle_index[match_vw[cv]]
            if (m >> c) & 1:
                A[rest | (1 << a) | (1 << b), m] = 1  # x -> x.x
            else:
                A[rest | (1 << a), m] = 1  # 1 -> 1.x + x.1
                A[rest | (1 << b), m] = 1
    else:
        raise StateSpaceError("graphs are not related by a single saddle")
    return ExactMatrix.from_int_array(SV.field, A)


# ---------------------------------------------------------------------------
# general-N backend: cup generators and Gram solving
# ---------------------------------------------------------------------------

class _FieldOps:
    """Scalar arithmetic for the greedy basis selection."""

    def __init__(self, field: Field):
        self.p = field.char

    def conv(self, x):
        return x % self.p if self.p else Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def inv(self, a):
        return pow(a, -1, self.p) if self.p else 1 / a

    def is_zero(self, a):
        return (a % self.p == 0) if self.p else a == 0


def _cup_g2(cup: fe.Cup, N: int) -> int:
    """Twice the quantum grading of a cup generator (pairings need sum 0)."""
    A = sum(1 for a in cup.graph.arcs.values() if not a.is_circle)
    R = len(cup.graph.rungs)
    return (
        4 * cup.dot_degree
        - 2 * (N - 1) * sum(cup.chi1.values())
        - 4 * (N - 2) * sum(cup.chi2.values())
        + (N - 1) * A
        + 2 * (N - 2) * R
    )


def _generator_stream(G: MoyGraph, N: int, percap: int):
    """Dotted cup generators in increasing dot-total order."""
    bases = [fe.side_structure(G, s) for s in fe.valid_sigmas(G)]
    out = []
    for base in bases:
        pieces = base.pieces
        for dots in itertools.product(range(percap), repeat=len(pieces)):
            d = {p: k for p, k in zip(pieces, dots) if k}
            out.append(fe.Cup(base.graph, base.key, base.piece_of_arc, base.chi1,
                              base.chi2, base.p2_of_rung, base.segs, d))
    out.sort(key=lambda c: (c.dot_degree, c.key, tuple(sorted(c.dots.items()))))
    return out


_PAIR_CACHES: dict = {}


def _pair_cache(G: MoyGraph, N: int) -> fe.PairingCache:
    key = (G.signature(with_basepoints=False), N)
    pc = _PAIR_CACHES.get(key)
    if pc is None:
        pc = fe.PairingCache(N)
        _PAIR_CACHES[key] = pc
    return pc


def _pivot_pairs(block, field: Field):
    """Row and column index sets of a maximal invertible minor."""
    m, n = block.shape
    if m == 0 or n == 0:
        return [], []
    if field.char:
        B = np.array(block % field.char, dtype=np.int64)
        _, piv_cols = _rref_mod(B, field.char)
        if not piv_cols:
            return [], []
        _, piv_rows = _rref_mod(B[:, piv_cols].T.copy(), field.char)
        return piv_rows, piv_cols
    # rationals: probe with large primes, then verify the minor exactly
    from .linalg import _MM_PRIMES
    from fractions import Fraction

    for p in _MM_PRIMES[:2]:
        B = np.array(block % p, dtype=np.int64)
        _, piv_cols = _rref_mod(B, p)
        if not piv_cols:
            continue
        _, piv_rows = _rref_mod(B[:, piv_cols].T.copy(), p)
        minor = [[Fraction(int(block[i, j])) for j in piv_cols] for i in piv_rows]
        _, piv = _rref_frac(minor)
        if len(piv) == len(piv_cols):
            return piv_rows, piv_cols
    rows = [[Fraction(int(x)) for x in r] for r in block]
    _, piv_cols = _rref_frac(rows)
    if not piv_cols:
        return [], []
    t = [[rows[i][j] for i in range(m)] for j in piv_cols]
    _, piv_rows = _rref_frac(t)
    return piv_rows, piv_cols


class FoamStateSpace:
    """Universal-construction state space with a selected cup basis."""

    backend = "foam"

    def __init__(self, graph: MoyGraph, N: int, field: Field):
        self.graph = graph
        self.N = N
        self.field = field
        self.dim = coloring_count(graph, N)
        self.cache = _pair_cache(graph, N)
        self._select_basis()
        self.gradings = [-_cup_g2(c, N) // 2 for c in self.cols]
        self._dot_cache: dict = {}

    def _select_basis(self):
        N = self.N
        for percap in (N, 2 * N):
            cands = _generator_stream(self.graph, N, percap)
            if self._block_select(cands):
                return
        raise StateSpaceError(
            f"generating set failed to reach oracle dimension {self.dim} "
            f"for {self.graph!r} at N={self.N}"
        )

    def _block_select(self, cands) -> bool:
        """Pick row/column generators per grading block.

        The pairing only couples gradings d and -d, so the Gram matrix of
        the full family is block-anti-diagonal; each block is eliminated
        once and its pivots are kept.
        """
        pair = self.cache.pair
        by_grade: dict = {}
        for c in cands:
            by_grade.setdefault(_cup_g2(c, self.N), []).append(c)
        rows: list = []
        cols: list = []
        for d in sorted(by_grade):
            if -d not in by_grade:
                continue
            col_pool = by_grade[d]
            row_pool = by_grade[-d]
            block = np.array(
                [[pair(r, c) for c in col_pool] for r in row_pool], dtype=object
            )
            rsel, csel = _pivot_pairs(block, self.field)
            rows.extend(row_pool[i] for i in rsel)
            cols.extend(col_pool[j] for j in csel)
        if len(cols) != self.dim:
            return False
        self.rows = rows
        self.cols = cols
        M = ExactMatrix(self.field, [[self.field.coerce(pair(r, c)) for c in cols] for r in rows]) \
            if self.field.is_rational else ExactMatrix(
                self.field, np.array([[pair(r, c) for c in cols] for r in rows], dtype=np.int64))
        Minv = M.solve_right(ExactMatrix.identity(self.field, self.dim))
        ops = _FieldOps(self.field)
        self._minv = [[Minv[i, j] for j in range(self.dim)] for i in range(self.dim)]
        self._ops = ops
        return True

    # -- expressing vectors in the basis --------------------------------

    def express(self, ket: fe.Cup) -> list:
        """Coordinates of a cup's class in the selected basis."""
        ops = self._ops
        u = [ops.conv(self.cache.pair(r, ket)) for r in self.rows]
        return [
            sum((ops.mul(self._minv[i][j], u[j]) for j in range(self.dim)), ops.conv(0))
            for i in range(self.dim)
        ]

    def _matrix_from_kets(self, kets) -> ExactMatrix:
        colsdata = [self.express(k) for k in kets]
        data = [[colsdata[j][i] for j in range(len(kets))] for i in range(self.dim)]
        if self.field.is_rational:
            return ExactMatrix(self.field, data, shape=(self.dim, len(kets)))
        return ExactMatrix(self.field, np.array(data, dtype=np.int64))

    def dot_matrix(self, op) -> ExactMatrix:
        got = self._dot_cache.get(op)
        if got is not None:
            return got
        kind = op[0]
        if kind == "x":
            kets = [c.with_dots({op[1]: 1}) for c in self.cols]
        elif kind == "e":
            _, rung, k = op
            if rung not in self.graph.rungs:
                raise StateSpaceError(f"no rung at crossing {rung}")
            kets = [c.with_dots(None, [(rung, k)]) for c in self.cols]
        else:
            raise StateSpaceError(f"unknown dot operator {op}")
        got = self._matrix_from_kets(kets)
        self._dot_cache[op] = got
        return got

    def basis_label(self, i: int) -> str:
        c = self.cols[i]
        return f"{c.key}|{sorted(c.dots.items())}"

    def gram_dump(self) -> str:
        """Canonical text form of the selected Gram matrix (debugging)."""
        pair = self.cache.pair
        lines = [f"# gram {self.dim}x{self.dim} N={self.N}"]
        for i, r in enumerate(self.rows):
            vals = " ".join(str(pair(r, c)) for c in self.cols)
            lines.append(vals)
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------

_STATE_CACHE: dict = {}


def build_state_space(graph: MoyGraph, N: int, field: Field, backend: str = "auto"):
    """State space of a resolution graph over an exact field.

    ``backend='auto'`` picks the circle model at N=2 and cup generators
    otherwise; pass 'foam' to force the general construction at N=2
    (used by the cross-backend tests).
    """
    if N < 2:
        raise MoyError("N must be at least 2")
    if backend == "auto":
        backend = "frobenius" if N == 2 else "foam"
    if backend == "frobenius" and N != 2:
        raise StateSpaceError("the circle backend only exists at N=2")
    key = (graph.signature(with_basepoints=False), N, field, backend)
    got = _STATE_CACHE.get(key)
    if got is not None:
        return got if got.graph is graph else _with_graph(got, graph)
    if backend == "frobenius":
        S = FrobeniusStateSpace(graph, field)
    elif backend == "foam":
        S = FoamStateSpace(graph, N, field)
        if S.dim != coloring_count(graph, N):  # pragma: no cover
            raise StateSpaceError("dimension drifted from the coloring oracle")
    else:
        raise StateSpaceError(f"unknown backend {backend!r}")
    _STATE_CACHE[key] = S
    return S


def _with_graph(S, graph):
    """Shallow view of a cached state space under the caller's graph.

    The basis data is shared (it never depends on basepoint markers);
    only operator lookups see the new graph.
    """
    import copy

    view = copy.copy(S)
    view.graph = graph
    return view


def edge_map(SV, SW, crossing: int, N: int | None = None, field: Field | None = None,
             backend: str = "auto") -> FoamMap:
    """Map induced by flipping ``crossing`` from its 0- to its 1-resolution.

    The rung disappears (unzip) or appears (zip) at the crossing; the two
    graphs must agree elsewhere.  Accepts either built state spaces or
    bare graphs together with (N, field).
    """
    if isinstance(SV, MoyGraph):
        if N is None or field is None:
            raise StateSpaceError("edge_map on graphs needs N and field")
        SV = build_state_space(SV, N, field, backend)
        SW = build_state_space(SW, N, field, backend)
    GV, GW = SV.graph, SW.graph
    has_v = crossing in GV.rungs
    has_w = crossing in GW.rungs
    if has_v == has_w:
        raise StateSpaceError(f"graphs are not related at crossing {crossing}")
    if set(GV.rungs) - {crossing} != set(GW.rungs) - {crossing}:
        raise StateSpaceError("graphs differ away from the stated crossing")
    if SV.backend != SW.backend:
        raise StateSpaceError("backend mismatch")
    if SV.backend == "frobenius":
        mat = _frobenius_edge_map(SV, SW)
        return FoamMap(SV, SW, mat, crossing, qdegree=_map_qdegree(SV, SW, mat))
    if has_v:
        kets = [fe.compose_unzip(c, GW, crossing) for c in SV.cols]
    else:
        kets = [fe.compose_zip(c, GW, crossing) for c in SV.cols]
    mat = SW._matrix_from_kets(kets)
    return FoamMap(SV, SW, mat, crossing, qdegree=_map_qdegree(SV, SW, mat))


def _map_qdegree(SV, SW, mat) -> int | None:
    """Common grading offset of a homogeneous map (None for the zero map)."""
    degs = {
        SW.gradings[i] - SV.gradings[j]
        for i in range(mat.nrows)
        for j in range(mat.ncols)
        if mat[i, j] != 0
    }
    if not degs:
        return None
    if len(degs) > 1:
        raise StateSpaceError("edge map is not quantum-homogeneous")
    return degs.pop()


def dot_operator(S, edge, weight: int = 1) -> ExactMatrix:
    """Matrix of X (weight 1 on a 1-arc) or E_1/E_2 (on a rung)."""
    if weight not in (1, 2):
        raise StateSpaceError("weight must be 1 or 2")
    if edge in S.graph.rungs:
        return S.dot_matrix(("e", edge, weight))
    if edge not in S.graph.arcs:
        raise StateSpaceError(f"no edge {edge} in the graph")
    if weight == 2:
        raise StateSpaceError("weight-2 operator requested on a 1-labeled edge")
    return S.dot_matrix(("x", edge))


def basepoint_operator(S, label: str) -> ExactMatrix:
    return S.dot_matrix(("x", S.graph.basepoint_arc(label)))


def dot_migration_check(S) -> bool:
    """X_r X_q = E_2 for basepoints flanking a rung (merge or split side)."""
    G = S.graph
    qa = G.basepoint_arc("q")
    ra = G.basepoint_arc("r")
    if qa == ra:
        raise StateSpaceError("basepoints q and r sit on the same 1-edge")
    hit = None
    for cid, r in G.rungs.items():
        if {qa, ra} in ({r.in_l, r.in_r}, {r.out_l, r.out_r}):
            hit = cid
            break
    if hit is None:
        raise StateSpaceError("basepoints are not adjacent to a common wide edge")
    xq = S.dot_matrix(("x", qa))
    xr = S.dot_matrix(("x", ra))
    e2 = S.dot_matrix(("e", hit, 2))
    return (xr @ xq) == e2
