"""Split-link detection, band-surgery scans, and skein-triangle checks.

``detect_split`` runs the full pipeline: assemble the cube, reduce at q,
take homology, compute the induced basepoint operator of r, and read the
verdict off its Jordan profile.  At prime N over F_N freeness is
equivalent to the existence of a sphere separating q from r; otherwise
freeness only implies it, and a not-free profile is inconclusive.

``band_scan`` recomputes the reduced dimension across a twist family
K_{b+n}; ``skein_check`` verifies the exactness bookkeeping of the two
skein triangles at a marked crossing plus the nilpotency drops of the
basepoint operator on the wide-edge resolution.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass

from .diagram import (LinkDiagram, BandSpec, attach_band, component_of,
                      flip_crossing, smooth_crossing)
from .fields import Field
from .module_structure import NilpotentProfile, jordan_profile, is_free_truncated
from . import complexes as cx


class DetectorError(ValueError):
    pass


DEFAULT_CAPS = {2: 10, 3: 5}


def default_cap(N: int) -> int:
    return DEFAULT_CAPS.get(N, 4)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def diagram_hash(D: LinkDiagram) -> str:
    return hashlib.sha256(D.to_text().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class DetectionReport:
    link: str
    N: int
    field: str
    reduced_dims: dict
    profile: NilpotentProfile
    verdict: str
    timing_ms: int | None = None
    peak_kb: int | None = None

    def to_json_dict(self) -> dict:
        out = {
            "link": self.link,
            "n": self.N,
            "field": self.field,
            "reduced_dims": {str(h): d for h, d in sorted(self.reduced_dims.items()) if d},
            "profile": self.profile.to_json_dict(),
            "verdict": self.verdict,
            "timing_ms": self.timing_ms if self.timing_ms is not None else 0,
        }
        if self.peak_kb is not None:
            out["peak_kb"] = self.peak_kb
        return out


@dataclass(frozen=True)
class BandScanReport:
    link: str
    N: int
    field: str
    band: BandSpec
    n_values: tuple
    dims: tuple
    classification: str
    timing_ms: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "link": self.link,
            "n": self.N,
            "field": self.field,
            "band": [self.band.edge_a, self.band.side_a, self.band.edge_b,
                     self.band.side_b, self.band.twists],
            "twists": list(self.n_values),
            "reduced_dims": list(self.dims),
            "classification": self.classification,
            "timing_ms": self.timing_ms if self.timing_ms is not None else 0,
        }


def classify_scan(dims) -> str:
    """constant / growing-trend / non-constant, from the dimension table.

    The source statement is asymptotic, so a finite scan only ever
    reports a trend: growing-trend means the maximum sits at an endpoint
    of the scanned range and the table is not constant.
    """
    dims = list(dims)
    if not dims or min(dims) == max(dims):
        return "constant"
    if max(dims[0], dims[-1]) == max(dims):
        return "growing-trend"
    return "non-constant"


def reduced_homology(D: LinkDiagram, N: int, fld: Field, cap=None, backend="auto",
                     forced_wide=frozenset()):
    C = cx.assemble(D, N, fld, forced_wide=forced_wide,
                    cap=default_cap(N) if cap is None else cap, backend=backend)
    R = cx.reduced_subcomplex(C, "q")
    H = cx.homology(R)
    return C, R, H


def detect_split(D: LinkDiagram, N: int, fld: Field, cap=None, backend="auto",
                 with_timing=False) -> DetectionReport:
    """Freeness-criterion pipeline for the basepoints q, r of ``D``."""
    t0 = time.perf_counter()
    q = D.basepoint("q")
    r = D.basepoint("r")
    if component_of(D, q) == component_of(D, r):
        raise DetectorError("basepoints q and r lie on the same component")
    _, R, H = reduced_homology(D, N, fld, cap=cap, backend=backend)
    E = cx.induced_endomorphism(R, H, "X_r")
    X = cx.flatten_endo(H, E)
    profile = jordan_profile(X, N)
    free = is_free_truncated(profile)
    biconditional = _is_prime(N) and fld.char == N
    if free:
        verdict = "split-separating-sphere" if biconditional else "free-hence-split-direction-only"
    else:
        verdict = "no-separating-sphere" if biconditional else "no-conclusion"
    ms = peak = None
    if with_timing:
        ms = int((time.perf_counter() - t0) * 1000)
        import resource

        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    return DetectionReport(
        link=diagram_hash(D), N=N, field=fld.name,
        reduced_dims={h: d for h, d in H.dims.items()},
        profile=profile, verdict=verdict, timing_ms=ms, peak_kb=peak,
    )


def band_scan(D: LinkDiagram, band: BandSpec | None, n_range, N: int, fld: Field,
              cap=None, backend="auto", with_timing=False, pool=None) -> BandScanReport:
    """Reduced dimensions of K_{b+n} across the twist range."""
    t0 = time.perf_counter()
    if band is None:
        if not D.bands:
            raise DetectorError("no band specified")
        band = D.bands[0]
    q = D.basepoint("q")
    r = D.basepoint("r")
    marked = {component_of(D, q), component_of(D, r)}
    banded = {D.component_of_edge(band.edge_a), D.component_of_edge(band.edge_b)}
    if marked != banded:
        raise DetectorError("band does not merge the two marked components")

    ns = list(n_range)

    def one(n):
        b = BandSpec(band.edge_a, band.side_a, band.edge_b, band.side_b, band.twists + n)
        K = attach_band(D, b)
        _, _, H = reduced_homology(K, N, fld, cap=cap, backend=backend)
        return H.total

    if pool is not None and len(ns) > 1:
        dims = tuple(pool.map(one, ns))
    else:
        dims = tuple(one(n) for n in ns)
    ms = int((time.perf_counter() - t0) * 1000) if with_timing else None
    return BandScanReport(
        link=diagram_hash(D), N=N, field=fld.name, band=band,
        n_values=tuple(ns), dims=dims, classification=classify_scan(dims),
        timing_ms=ms,
    )


# ---------------------------------------------------------------------------
# skein triangles at a marked crossing
# ---------------------------------------------------------------------------

def _triangle_ranks(dimsA: dict, dimsB: dict, dimsC: dict):
    """Ranks of an exact sequence ... -> A^h -> B^h -> C^h -> A^(h+1) -> ...

    Returns (x, y, z) rank dicts or None when exactness is arithmetically
    impossible for these dimensions.
    """
    degrees = sorted(set(dimsA) | set(dimsB) | set(dimsC))
    if not degrees:
        return {}, {}, {}
    lo, hi = degrees[0], degrees[-1]
    x, y, z = {}, {}, {}
    z_prev = 0
    for h in range(lo, hi + 1):
        a, b, c = dimsA.get(h, 0), dimsB.get(h, 0), dimsC.get(h, 0)
        xh = a - z_prev          # rank(A^h -> B^h) = dim A - rank of incoming
        yh = b - xh              # exactness at B
        zh = c - yh              # exactness at C
        if xh < 0 or yh < 0 or zh < 0 or xh > min(a, b) or yh > min(b, c):
            return None
        x[h], y[h], z[h] = xh, yh, zh
        z_prev = zh
    if z_prev != 0:
        return None
    return x, y, z


@dataclass(frozen=True)
class SkeinReport:
    link: str
    crossing: int
    N: int
    field: str
    dims: dict          # name -> per-degree reduced homology dims
    totals: dict
    checks: dict        # name -> bool
    ranks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "link": self.link,
            "crossing": self.crossing,
            "n": self.N,
            "field": self.field,
            "totals": self.totals,
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "passed": self.passed,
        }


def skein_diagrams(D: LinkDiagram, crossing: int):
    """The four diagrams at a marked positive self-crossing.

    D must carry q, r on the two edges entering the crossing (the local
    layout of the skein triangles).  Returns dict with keys
    '+', 'l', 's', '-';  's' is (diagram, forced_wide) since the wide
    resolution is frozen there.
    """
    if not (0 <= crossing < D.n_crossings):
        raise DetectorError(f"no crossing {crossing}")
    x = D.crossings[crossing]
    if x.sign <= 0:
        raise DetectorError("the marked crossing must be positive")
    e_under = x.ports[0]
    e_over = x.ports[x.over_in]
    comp_u = D.component_of_edge(e_under)
    comp_o = D.component_of_edge(e_over)
    if comp_u != comp_o:
        raise DetectorError("the marked crossing must have both strands on one component")
    labels = {bp.edge: bp.label for bp in D.basepoints}
    if set(labels) != {e_under, e_over} or len(D.basepoints) != 2:
        raise DetectorError("basepoints q, r must sit on the two strands entering the crossing")
    return {
        "+": (D, frozenset()),
        "l": (smooth_crossing(D, crossing), frozenset()),
        "s": (D, frozenset({crossing})),
        "-": (flip_crossing(D, crossing), frozenset()),
    }


def skein_check(D: LinkDiagram, crossing: int, N: int, fld: Field, cap=None,
                backend="auto") -> SkeinReport:
    """Exact-triangle bookkeeping and basepoint nilpotency at a crossing."""
    diagrams = skein_diagrams(D, crossing)
    dims = {}
    totals = {}
    xr_ranks = {}
    for name, (dd, fw) in diagrams.items():
        _, R, H = reduced_homology(dd, N, fld, cap=cap, backend=backend, forced_wide=fw)
        dims[name] = {h: d for h, d in H.dims.items() if d}
        totals[name] = H.total
        E = cx.induced_endomorphism(R, H, "X_r")
        X = cx.flatten_endo(H, E)
        xr_ranks[name] = [X.power(k).rank() for k in range(N + 1)]

    checks = {}
    # rank identities of the two exact triangles
    checks["dim_plus_le"] = totals["+"] <= totals["s"] + totals["l"]
    checks["dim_minus_le"] = totals["-"] <= totals["s"] + totals["l"]
    # triangle 1: ... -> H_l^h -> H_+^h -> H_s^(h+1) -> H_l^(h+1) -> ...
    shift_s_up = {h - 1: d for h, d in dims["s"].items()}
    tri1 = _triangle_ranks(dims["l"], dims["+"], shift_s_up)
    checks["triangle_plus_exact"] = tri1 is not None
    # triangle 2: ... -> H_s^(h-1) -> H_-^h -> H_l^h -> H_s^h -> ...
    shift_s_down = {h + 1: d for h, d in dims["s"].items()}
    tri2 = _triangle_ranks(shift_s_down, dims["-"], dims["l"])
    checks["triangle_minus_exact"] = tri2 is not None
    # basepoint operator collapses
    checks["xr_zero_on_plus"] = xr_ranks["+"][1] == 0
    checks["xr_zero_on_minus"] = xr_ranks["-"][1] == 0
    checks["xr_pow_drop_on_s"] = xr_ranks["s"][N - 1] == 0
    ranks = {"triangle_plus": tri1, "triangle_minus": tri2, "xr_ranks": xr_ranks}
    return SkeinReport(diagram_hash(D), crossing, N, fld.name, dims, totals, checks, ranks)
