"""Command-line interface.

Subcommands::

    krfoam compute      --n 2 --field q  --input link.pd [--json]
    krfoam detect-split --n 2 --field f2 --input link.pd [--json]
    krfoam band-scan    --n 2 --field f2 --input link.pd --range -2:2
    krfoam skein-check  --n 2 --field f2 --input link.pd --crossing 0

Exit codes: 0 success, 2 precondition error (bad input, bad field,
unsatisfied hypothesis), 3 resource cap exceeded.  ``--report-dir DIR``
additionally renders matplotlib figures and delimited tables next to the
JSON payload.  ``KRFOAM_THREADS`` mirrors ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .diagram import DiagramError, parse_pd
from .fields import FieldError, parse_field
from .moy import ResourceCapError
from .detector import (DetectorError, band_scan, default_cap, detect_split,
                       diagram_hash, skein_check)
from . import complexes as cx

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3


def _parser():
    ap = argparse.ArgumentParser(prog="krfoam", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=2, help="sl(N) level (default 2)")
        p.add_argument("--field", default="q", help="coefficients: q or f<prime>")
        p.add_argument("--input", required=True, help="diagram file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--max-crossings", type=int, default=None, help="resource cap")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default KRFOAM_THREADS or 1)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed recorded for fuzz corpora (no effect on results)")
        p.add_argument("--report-dir", default=None,
                       help="write figures and CSV tables into this directory")
        p.add_argument("--with-timing", action="store_true",
                       help="include real wall-clock timings in the JSON output")

    for name in ("compute", "detect-split", "band-scan", "skein-check"):
        p = sub.add_parser(name)
        common(p)
        if name == "band-scan":
            p.add_argument("--range", default="-2:2", dest="nrange",
                           help="twist range lo:hi, inclusive (default -2:2)")
        if name == "skein-check":
            p.add_argument("--crossing", type=int, default=0, help="marked crossing id")
    return ap


def _load(args):
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as e:
        raise DetectorError(f"cannot read {args.input}: {e}") from None
    D = parse_pd(text)
    fld = parse_field(args.field)
    cap = args.max_crossings if args.max_crossings is not None else default_cap(args.n)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("KRFOAM_THREADS", "1"))
    return D, fld, cap, max(1, threads)


def _emit(args, payload: dict, table_lines):
    if args.json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for line in table_lines:
            print(line)
    if args.report_dir:
        os.makedirs(args.report_dir, exist_ok=True)
        with open(os.path.join(args.report_dir, "report.json"), "w") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _bar_figure(path, dims: dict, title: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    hs = sorted(int(h) for h in dims)
    vals = [dims[str(h)] if str(h) in dims else dims[h] for h in hs]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(hs, vals, color="#43679a")
    ax.set_xlabel("homological degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.set_xticks(hs)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _scan_figure(path, ns, dims, title):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(ns, dims, "o-", color="#a04040")
    ax.set_xlabel("full twists n")
    ax.set_ylabel("dim reduced homology")
    ax.set_title(title)
    ax.set_xticks(list(ns))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")


def cmd_compute(args):
    D, fld, cap, _ = _load(args)
    C = cx.assemble(D, args.n, fld, cap=cap)
    H = cx.homology(C)
    payload = cx.homology_json(C, H, extra={"link": diagram_hash(D)})
    payload["graded_dims"] = {
        f"{h},{q}": d for (h, q), d in sorted(cx.graded_homology_dims(C).items())
    }
    reduced = None
    if any(bp.label == "q" for bp in D.basepoints):
        R = cx.reduced_subcomplex(C, "q")
        HR = cx.homology(R)
        reduced = HR
        payload["reduced_dims"] = {str(h): d for h, d in sorted(HR.dims.items()) if d}
        payload["reduced_total"] = HR.total
        if any(bp.label == "r" for bp in D.basepoints):
            X = cx.flatten_endo(HR, cx.induced_endomorphism(R, HR, "X_r"))
            payload["xr_ranks"] = [X.power(k).rank() for k in range(args.n + 1)]
    lines = [f"link {payload['link']}  N={args.n}  field={fld.name}",
             f"total dim {H.total}"]
    for h in sorted(H.dims):
        if H.dims[h]:
            lines.append(f"  h={h:+d}  dim {H.dims[h]}")
    if reduced is not None:
        lines.append(f"reduced total {reduced.total}")
    _emit(args, payload, lines)
    if args.report_dir:
        _write_csv(os.path.join(args.report_dir, "dims.csv"), ["degree", "dim"],
                   [(h, H.dims[h]) for h in sorted(H.dims) if H.dims[h]])
        _bar_figure(os.path.join(args.report_dir, "dims.png"), payload["dims"],
                    f"sl({args.n}) homology over {fld.name}")
    return EXIT_OK


def cmd_detect(args):
    D, fld, cap, _ = _load(args)
    rep = detect_split(D, args.n, fld, cap=cap, with_timing=args.with_timing)
    payload = rep.to_json_dict()
    lines = [f"link {rep.link}  N={args.n}  field={fld.name}",
             f"reduced dims: " + " ".join(f"{h:+d}:{d}" for h, d in sorted(rep.reduced_dims.items()) if d),
             f"blocks {list(rep.profile.blocks)}  ranks {list(rep.profile.rank_sequence)}",
             f"verdict: {rep.verdict}"]
    _emit(args, payload, lines)
    if args.report_dir:
        _write_csv(os.path.join(args.report_dir, "dims.csv"), ["degree", "dim"],
                   [(h, d) for h, d in sorted(rep.reduced_dims.items()) if d])
        _bar_figure(os.path.join(args.report_dir, "dims.png"), payload["reduced_dims"],
                    f"reduced sl({args.n}) homology over {fld.name}")
    return EXIT_OK


def cmd_band_scan(args):
    D, fld, cap, threads = _load(args)
    try:
        lo, hi = args.nrange.split(":")
        ns = range(int(lo), int(hi) + 1)
    except ValueError:
        raise DetectorError(f"bad --range {args.nrange!r} (want lo:hi)") from None
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        rep = band_scan(D, None, ns, args.n, fld, cap=cap,
                        with_timing=args.with_timing, pool=pool)
    finally:
        if pool is not None:
            pool.shutdown()
    payload = rep.to_json_dict()
    lines = [f"link {rep.link}  N={args.n}  field={fld.name}"]
    lines += [f"  n={n:+d}  dim {d}" for n, d in zip(rep.n_values, rep.dims)]
    lines.append(f"classification: {rep.classification}")
    _emit(args, payload, lines)
    if args.report_dir:
        _write_csv(os.path.join(args.report_dir, "scan.csv"), ["twists", "dim"],
                   list(zip(rep.n_values, rep.dims)))
        _scan_figure(os.path.join(args.report_dir, "scan.png"), rep.n_values, rep.dims,
                     f"band scan, sl({args.n}) over {fld.name}: {rep.classification}")
    return EXIT_OK


def cmd_skein(args):
    D, fld, cap, _ = _load(args)
    rep = skein_check(D, args.crossing, args.n, fld, cap=cap)
    payload = rep.to_json_dict()
    lines = [f"link {rep.link}  crossing {rep.crossing}  N={args.n}  field={fld.name}"]
    for k, v in rep.checks.items():
        lines.append(f"  {k}: {'pass' if v else 'FAIL'}")
    lines.append("skein-check: " + ("pass" if rep.passed else "FAIL"))
    _emit(args, payload, lines)
    if args.report_dir:
        _write_csv(os.path.join(args.report_dir, "skein.csv"), ["check", "result"],
                   [(k, "pass" if v else "fail") for k, v in rep.checks.items()])
    return EXIT_OK if rep.passed else EXIT_PRECONDITION


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "compute":
            return cmd_compute(args)
        if args.command == "detect-split":
            return cmd_detect(args)
        if args.command == "band-scan":
            return cmd_band_scan(args)
        if args.command == "skein-check":
            return cmd_skein(args)
        raise DetectorError(f"unknown command {args.command}")
    except ResourceCapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DiagramError, DetectorError, FieldError, cx.ComplexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
