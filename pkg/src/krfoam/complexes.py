"""Cube assembly, reduced subcomplexes, homology, induced endomorphisms.

The chain complex of a diagram is the direct sum of the state spaces of
its resolutions, graded by |v| - n_plus, with differential the signed
sum of zip/unzip edge maps (sign: parity of earlier 1-entries).  The
basepoint operators act per cube vertex and commute with the
differential; the reduced complex is the image subcomplex of
X_q^(N-1).  All homology is computed with exact linear algebra and
stored with representative cycles so that induced endomorphisms on
homology are available downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .diagram import LinkDiagram
from .fields import Field
from .linalg import ExactMatrix, InconsistentSystem
from . import moy
from .statespace import build_state_space, edge_map


class ComplexError(ArithmeticError):
    pass


class ChainComplex:
    """Cochain complex over an exact field with registered endomorphisms.

    differentials[h]: C^h -> C^(h+1); endos[name][h]: C^h -> C^h.
    """

    def __init__(self, field: Field, N: int, dims: dict, differentials: dict,
                 endos: dict, gradings: dict | None = None, meta: dict | None = None):
        self.field = field
        self.N = N
        self.dims = dict(dims)
        self.differentials = dict(differentials)
        self.endos = {k: dict(v) for k, v in endos.items()}
        self.gradings = dict(gradings or {})
        self.meta = dict(meta or {})

    @property
    def degrees(self):
        return sorted(self.dims)

    @property
    def total_dim(self):
        return sum(self.dims.values())

    def differential(self, h: int) -> ExactMatrix:
        d = self.differentials.get(h)
        if d is None:
            d = ExactMatrix.zeros(self.field, self.dims.get(h + 1, 0), self.dims.get(h, 0))
        return d

    def endo(self, name: str, h: int) -> ExactMatrix:
        e = self.endos[name].get(h)
        if e is None:
            e = ExactMatrix.zeros(self.field, self.dims.get(h, 0), self.dims.get(h, 0))
        return e

    def verify(self):
        """d^2 = 0 and [endo, d] = 0, exactly; raises ComplexError."""
        for h in self.degrees:
            d0 = self.differential(h)
            d1 = self.differential(h + 1)
            if d0.ncols and d1.nrows and not (d1 @ d0).is_zero():
                raise ComplexError(f"d^2 != 0 between degrees {h} and {h + 2}")
            for name in self.endos:
                e0 = self.endo(name, h)
                e1 = self.endo(name, h + 1)
                if not (d0 @ e0 == e1 @ d0):
                    raise ComplexError(f"[{name}, d] != 0 at degree {h}")
        return True


@dataclass
class GradedVectorSpace:
    """Homology with stored representatives.

    reps[h]: matrix whose columns are representative cycles in C^h;
    to express a cycle in homology coordinates use ``coords``.
    """

    field: Field
    dims: dict
    reps: dict
    _solvers: dict

    @property
    def total(self):
        return sum(self.dims.values())

    def coords(self, h: int, cycles: ExactMatrix) -> ExactMatrix:
        """Homology coordinates of cycle columns at degree h."""
        reps, img = self._solvers[h]
        if reps.ncols == 0 and img.ncols == 0:
            return ExactMatrix.zeros(self.field, 0, cycles.ncols)
        big = reps.hstack(img) if img.ncols else reps
        try:
            sol = big.solve_right(cycles)
        except InconsistentSystem:
            raise ComplexError("vector is not a cycle modulo boundaries") from None
        return sol.take_rows(range(reps.ncols))


# ---------------------------------------------------------------------------
# cube assembly
# ---------------------------------------------------------------------------

def cube_sign(assignment, position) -> int:
    """Sign of a cube edge: parity of 1-entries before the flipped slot."""
    return -1 if sum(assignment[:position]) % 2 else 1


def assemble(D: LinkDiagram, N: int, field: Field, forced_wide=frozenset(),
             cap: int | None = None, backend: str = "auto") -> ChainComplex:
    """Chain complex of the resolution cube of ``D``.

    Basepoint operators X_q / X_r are registered when the diagram carries
    the basepoints.  ``forced_wide`` crossings stay rungs in every vertex
    (used for the skein module's wide-edge diagrams).
    """
    forced_wide = frozenset(forced_wide)
    verts = moy.enumerate_cube(D, cap=cap, forced_wide=forced_wide)
    graphs = {}
    spaces = {}
    for t in verts:
        g = moy.resolve(D, t, forced_wide=forced_wide)
        graphs[t.assignment] = g
        spaces[t.assignment] = build_state_space(g, N, field, backend)

    by_deg: dict = {}
    for t in verts:
        by_deg.setdefault(t.degree, []).append(t)
    offsets = {}
    dims = {}
    for h, ts in by_deg.items():
        off = 0
        for t in ts:
            offsets[t.assignment] = off
            off += spaces[t.assignment].dim
        dims[h] = off

    shifts = _q_shifts(D, N, forced_wide)
    gradings = {}
    for h, ts in by_deg.items():
        gr = []
        for t in ts:
            S = spaces[t.assignment]
            gr.extend(q + shifts[t.assignment] for q in S.gradings)
        gradings[h] = gr

    diffs: dict = {}
    for v, w, pos in moy.cube_edges(D, cap=cap, forced_wide=forced_wide):
        h = v.degree
        M = diffs.get(h)
        if M is None:
            M = ExactMatrix.zeros(field, dims.get(h + 1, 0), dims.get(h, 0))
            diffs[h] = M
        SV, SW = spaces[v.assignment], spaces[w.assignment]
        crossing = _flipped_crossing(D, forced_wide, pos)
        fm = edge_map(SV, SW, crossing)
        sgn = cube_sign(v.assignment, pos)
        block = fm.matrix if sgn > 0 else fm.matrix.scale(-1)
        _add_block(M, block, offsets[w.assignment], offsets[v.assignment])

    endos: dict = {}
    labels = [bp.label for bp in D.basepoints]
    for label in labels:
        per_h = {}
        for h, ts in by_deg.items():
            E = ExactMatrix.zeros(field, dims[h], dims[h])
            for t in ts:
                S = spaces[t.assignment]
                # look the arc up on this cube vertex's own graph: state
                # spaces are cached without basepoint markers
                arc = graphs[t.assignment].basepoint_arc(label)
                _add_block(E, S.dot_matrix(("x", arc)), offsets[t.assignment],
                           offsets[t.assignment])
            per_h[h] = E
        endos[f"X_{label}"] = per_h

    C = ChainComplex(field, N, dims, diffs, endos, gradings,
                     meta={"diagram": D.to_text(), "forced_wide": sorted(forced_wide)})
    C.verify()
    return C


def _flipped_crossing(D, forced_wide, position):
    return moy.active_crossings(D, forced_wide)[position]


def _q_shifts(D: LinkDiagram, N: int, forced_wide):
    """Per-vertex quantum shift making the unknot invariant symmetric."""
    active = moy.active_crossings(D, forced_wide)
    shifts = {}
    for t in moy.enumerate_cube(D, cap=None, forced_wide=forced_wide):
        s = 0
        for k, ci in enumerate(active):
            pos = D.crossings[ci].sign > 0
            if pos:
                s += -N if t.assignment[k] == 0 else -(N - 1)
            else:
                s += (N - 1) if t.assignment[k] == 0 else N
        shifts[t.assignment] = s
    return shifts


def _add_block(M: ExactMatrix, B: ExactMatrix, row_off: int, col_off: int):
    if M.field.is_rational:
        for i in range(B.nrows):
            ri = M._rows[row_off + i]
            bi = B._rows[i] if B.field.is_rational else B.rows()[i]
            for j in range(B.ncols):
                ri[col_off + j] += bi[j]
    else:
        M._mod[row_off:row_off + B.nrows, col_off:col_off + B.ncols] = (
            M._mod[row_off:row_off + B.nrows, col_off:col_off + B.ncols] + B._mod
        ) % M.field.char


# ---------------------------------------------------------------------------
# reduced subcomplex
# ---------------------------------------------------------------------------

def reduced_subcomplex(C: ChainComplex, label: str = "q") -> ChainComplex:
    """Image subcomplex of X_label^(N-1), with the other operators restricted."""
    name = f"X_{label}"
    if name not in C.endos:
        raise ComplexError(f"basepoint operator {name} is not registered")
    bases = {}
    dims = {}
    for h in C.degrees:
        P = C.endo(name, h).power(C.N - 1)
        B = P.image_basis()
        bases[h] = B
        dims[h] = B.ncols

    def restrict(M, h_src, h_dst):
        Bs, Bd = bases[h_src], bases[h_dst]
        if Bs.ncols == 0:
            return ExactMatrix.zeros(C.field, Bd.ncols, 0)
        try:
            return Bd.solve_right(M @ Bs)
        except InconsistentSystem:
            raise ComplexError("operator does not preserve the reduced subcomplex") from None

    diffs = {}
    for h in C.degrees:
        if C.dims.get(h + 1) is not None:
            diffs[h] = restrict(C.differential(h), h, h + 1)
    endos = {}
    for nm in C.endos:
        endos[nm] = {h: restrict(C.endo(nm, h), h, h) for h in C.degrees}
    gradings = {}
    # reduced generators inherit no canonical representatives; gradings are
    # recorded only for the unreduced complex
    R = ChainComplex(C.field, C.N, dims, diffs, endos, gradings,
                     meta=dict(C.meta, reduced=label))
    R.verify()
    return R


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

def homology(C: ChainComplex) -> GradedVectorSpace:
    """Per-degree homology with representative cycles."""
    dims = {}
    reps = {}
    solvers = {}
    for h in C.degrees:
        d = C.differential(h)
        d_prev = C.differential(h - 1)
        Z = d.kernel_basis() if d.nrows else ExactMatrix.identity(C.field, C.dims[h])
        ImgB = d_prev.image_basis() if d_prev.ncols else ExactMatrix.zeros(C.field, C.dims[h], 0)
        # homology basis: kernel columns independent modulo the image
        if Z.ncols == 0:
            H = Z
        else:
            aug = ImgB.hstack(Z)
            piv = aug.pivot_columns()
            keep = [p - ImgB.ncols for p in piv if p >= ImgB.ncols]
            H = Z.take_columns(keep)
        dims[h] = H.ncols
        reps[h] = H
        solvers[h] = (H, ImgB)
    return GradedVectorSpace(C.field, dims, reps, solvers)


def graded_homology_dims(C: ChainComplex) -> dict:
    """Per-(homological, quantum)-bidegree homology dimensions.

    Requires the recorded chain gradings (unreduced complexes only); the
    differential is quantum-degree preserving, which is asserted.
    """
    if not C.gradings:
        raise ComplexError("no quantum gradings recorded on this complex")
    out = {}
    for h in C.degrees:
        gs = C.gradings[h]
        qs = sorted(set(gs))
        for q in qs:
            cols = [j for j, g in enumerate(gs) if g == q]
            d = C.differential(h)
            gt = C.gradings.get(h + 1, [])
            rows = [i for i, g in enumerate(gt) if g == q]
            if d.ncols:
                sub = d.take_columns(cols)
                for i in range(sub.nrows):
                    if i not in rows and any(sub[i, j] != 0 for j in range(sub.ncols)):
                        raise ComplexError("differential is not quantum-homogeneous")
                rank_out = sub.take_rows(rows).rank() if rows else 0
            else:
                rank_out = 0
            d_prev = C.differential(h - 1)
            gp = C.gradings.get(h - 1, [])
            pcols = [j for j, g in enumerate(gp) if g == q]
            if d_prev.ncols and pcols:
                rank_in = d_prev.take_columns(pcols).take_rows(cols).rank()
            else:
                rank_in = 0
            dim = len(cols) - rank_out - rank_in
            if dim:
                out[(h, q)] = dim
    return out


def induced_endomorphism(C: ChainComplex, H: GradedVectorSpace, name: str) -> dict:
    """Matrices of a registered chain endomorphism on homology."""
    if name not in C.endos:
        raise ComplexError(f"endomorphism {name} is not registered")
    out = {}
    for h in sorted(H.dims):
        R = H.reps[h]
        if R.ncols == 0:
            out[h] = ExactMatrix.zeros(C.field, 0, 0)
            continue
        out[h] = H.coords(h, C.endo(name, h) @ R)
    return out


def flatten_endo(H: GradedVectorSpace, E: dict) -> ExactMatrix:
    """Block-diagonal matrix of a degree-preserving endomorphism of H."""
    degs = sorted(H.dims)
    n = sum(H.dims[h] for h in degs)
    field = H.field
    M = ExactMatrix.zeros(field, n, n)
    off = 0
    for h in degs:
        k = H.dims[h]
        if k:
            _add_block(M, E[h], off, off)
        off += k
    return M


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------

def homology_json(C: ChainComplex, H: GradedVectorSpace, extra: dict | None = None) -> dict:
    out = {
        "n": C.N,
        "field": C.field.name,
        "total_dim": H.total,
        "dims": {str(h): H.dims[h] for h in sorted(H.dims) if H.dims[h]},
    }
    if extra:
        out.update(extra)
    return out


def dumps_stable(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
