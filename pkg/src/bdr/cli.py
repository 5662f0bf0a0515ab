"""``bdr`` command-line front end.

Exit codes: 0 ok, 1 check failed (or too many degenerate cells), 2 usage
or I/O error.  ``BDR_THREADS`` caps the BLAS/OpenMP thread pools.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import classify
from .errors import BDRError, NotUnitSpeed
from .invariants import analyze
from .ptframe import StandingAssumptionWarning
from .linalg4 import inner, norm, ternary_cross
from .surface import grid_jet_entry, load_surface, validate_unit_speed

COLUMNS = (
    "s", "t", "k1", "k2", "k3", "Q", "P", "R", "S", "W", "A", "B", "C", "k", "h", "K",
    "Hx", "Hy", "Hz", "Hw", "H_norm", "K_N", "delta_p", "class", "subtype",
)
TEXT_COLUMNS = ("class", "subtype")
SUMMARY_FIELDS = ("K", "H_norm", "K_N", "delta_p")
DEGENERATE_LIMIT = 0.10
GAUGE_NOTE = "note: the frame is unique up to a constant rotation of (P1, P2, P3)"


class UsageError(Exception):
    pass


def fmt(x):
    """17 significant digits; NaN and infinities spelled out."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % (x + 0.0)  # + 0.0 turns -0 into 0


# --------------------------------------------------------------------------
# check
# --------------------------------------------------------------------------


def residuals(sd):
    """Grid maxima of the unit-speed, B-DR and g12 residuals."""
    d1, d2, d3, dt = (grid_jet_entry(sd, w) for w in ("psi_s", "psi_ss", "psi_sss", "psi_t"))
    return {
        "unit_speed": float(np.max(np.abs(inner(d1, d1) - 1.0))),
        "bdr": float(np.max(norm(dt - ternary_cross(d1, d2, d3)))),
        "g12": float(np.max(np.abs(inner(d1, dt)))),
    }


def cmd_check(args, out):
    sd = load_surface(args.file, validate=False)
    res = residuals(sd)
    for name, label in (("unit_speed", "max |<psi_s,psi_s>-1|"), ("bdr", "max B-DR residual"),
                        ("g12", "max |g12|")):
        print("%-24s %s" % (label, fmt(res[name])), file=out)
    ok = True
    if res["unit_speed"] >= args.tol:
        try:
            validate_unit_speed(sd, args.tol)
        except NotUnitSpeed as exc:
            print("NotUnitSpeed: %s" % exc, file=sys.stderr)
        ok = False
    if res["bdr"] >= args.tol:
        print("B-DR residual %s exceeds tol %s" % (fmt(res["bdr"]), fmt(args.tol)), file=sys.stderr)
        ok = False
    if res["g12"] >= args.tol:
        print("g12 %s exceeds tol %s" % (fmt(res["g12"]), fmt(args.tol)), file=sys.stderr)
        ok = False
    print("check %s" % ("passed" if ok else "FAILED"), file=out)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# scan
# --------------------------------------------------------------------------


@dataclass
class ScanResult:
    surface: str
    grid: dict
    rows: list
    predicates: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def cells(self):
        return [r for r in self.rows if r["class"] != "Degenerate"]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([fmt(r[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self):
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return None
            return x

        doc = {
            "surface": self.surface,
            "grid": self.grid,
            "columns": list(COLUMNS),
            "rows": [[clean(r[c]) for c in COLUMNS] for r in self.rows],
            "predicates": self.predicates,
            "summary": self.summary,
        }
        return json.dumps(doc, indent=1, sort_keys=False, allow_nan=False) + "\n"


def _num(x):
    # round to the printed precision so in-memory values equal parsed ones
    return float(fmt(x))


def read_csv(text):
    """Rows of an emitted CSV as dicts with numeric columns parsed."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({c: rec[c] if c in TEXT_COLUMNS else float(rec[c]) for c in COLUMNS})
    return rows


def read_json(text):
    doc = json.loads(text)
    rows = []
    for rec in doc["rows"]:
        rows.append({c: (math.nan if v is None else v) for c, v in zip(doc["columns"], rec)})
    doc["rows"] = rows
    return doc


def scan(sd, tol=classify.DEFAULT_TOL, kt_source="corollary"):
    an = analyze(sd, kt_source=kt_source)
    g = an.grid
    classes = classify.classify_grid(g, tol)
    rows = []
    ns, nt = g.shape
    for i in range(ns):
        for j in range(nt):
            deg = bool(g.degenerate[i, j])
            c = classes[i, j]
            vals = {
                "s": g.s_grid[i], "t": g.t_grid[j],
                "k1": g.k[i, j, 0], "k2": g.k[i, j, 1], "k3": g.k[i, j, 2], "Q": g.Q[i, j],
                "P": g.v[i, j, 0], "R": g.v[i, j, 1], "S": g.v[i, j, 2], "W": g.W[i, j],
                "A": g.A[i, j], "B": g.B[i, j], "C": g.C[i, j],
                "k": g.k_inv[i, j], "h": g.h_inv[i, j], "K": g.K[i, j],
                "Hx": g.H[i, j, 0], "Hy": g.H[i, j, 1], "Hz": g.H[i, j, 2], "Hw": g.H[i, j, 3],
                "H_norm": math.sqrt(g.H_norm2[i, j]) if not deg else math.nan,
                "K_N": g.K_N[i, j], "delta_p": g.delta_p[i, j],
            }
            row = {key: _num(x) for key, x in vals.items()}
            row["class"] = "Degenerate" if deg else c.tag
            row["subtype"] = "" if deg or c.subtype is None else c.subtype
            rows.append(row)
    good = [r for r in rows if r["class"] != "Degenerate"]
    summary = {}
    for name in SUMMARY_FIELDS:
        vals = np.array([r[name] for r in good]) if good else np.array([math.nan])
        summary[name] = {"min": _num(vals.min()), "max": _num(vals.max()), "mean": _num(vals.mean())}
    summary["h_max_abs"] = _num(max((abs(r["h"]) for r in good), default=math.nan))
    summary["K_N_max_abs"] = _num(max((abs(r["K_N"]) for r in good), default=math.nan))
    spread = [np.ptp(g.K[i][~g.degenerate[i]]) for i in range(ns) if not g.degenerate[i].all()]
    summary["K_t_spread"] = _num(max(spread, default=math.nan))
    hist = {}
    for r in good:
        label = r["class"] if not r["subtype"] else "%s/%s" % (r["class"], r["subtype"])
        hist[label] = hist.get(label, 0) + 1
    summary["classes"] = dict(sorted(hist.items()))
    summary["cells"] = len(rows)
    summary["degenerate"] = len(rows) - len(good)
    preds = {
        name: {"holds": p.holds, "worst": _num(p.worst),
               "witness": None if p.witness is None else list(p.witness)}
        for name, p in classify.surface_predicates(g, tol).items()
    }
    grid = {
        "ns": sd.ns, "nt": sd.nt,
        "s_range": [_num(x) for x in sd.s_range], "t_range": [_num(x) for x in sd.t_range],
        "params": {k: _num(v) for k, v in sd.params.items()},
        "kt_source": kt_source,
    }
    return ScanResult(sd.name, grid, rows, preds, summary)


def summary_lines(result):
    s = result.summary
    lines = ["surface %s: %d cells, %d degenerate" % (result.surface, s["cells"], s["degenerate"])]
    for name in SUMMARY_FIELDS:
        lines.append("%-8s min %s max %s mean %s" % (
            name, fmt(s[name]["min"]), fmt(s[name]["max"]), fmt(s[name]["mean"])))
    lines.append("max |h| %s  max |K_N| %s  K t-spread %s" % (
        fmt(s["h_max_abs"]), fmt(s["K_N_max_abs"]), fmt(s["K_t_spread"])))
    for label, n in s["classes"].items():
        lines.append("class %-32s %d" % (label, n))
    for name, p in result.predicates.items():
        extra = "" if p["holds"] else " (worst %s at cell %s)" % (fmt(p["worst"]), p["witness"])
        lines.append("%-14s %s%s" % (name, p["holds"], extra))
    return lines


def cmd_scan(args, out):
    sd = load_surface(args.file, validate=False)
    res = residuals(sd)
    if not args.force and max(res.values()) >= args.tol:
        print("surface fails the check (max residual %s); use --force to scan anyway"
              % fmt(max(res.values())), file=sys.stderr)
        return 1
    result = scan(sd, kt_source=args.kt_source)
    text = result.to_csv() if args.format == "csv" else result.to_json()
    if args.out:
        _write(args.out, text)
        info = out
    else:
        out.write(text)
        info = sys.stderr
    for line in summary_lines(result):
        print(line, file=info)
    if result.summary["degenerate"] > DEGENERATE_LIMIT * result.summary["cells"]:
        print("more than %d%% of cells are degenerate" % (100 * DEGENERATE_LIMIT), file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# frames
# --------------------------------------------------------------------------


def _parse_point(text):
    try:
        s, t = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError("--at expects S,T, got %r" % text) from None
    return s, t


def cmd_frames(args, out):
    s, t = _parse_point(args.at)
    sd = load_surface(args.file)
    (s_lo, s_hi), (t_lo, t_hi) = sd.s_range, sd.t_range
    if not (s_lo <= s <= s_hi and t_lo <= t <= t_hi):
        raise UsageError("point (%g, %g) lies outside the domain [%g, %g] x [%g, %g]"
                         % (s, t, s_lo, s_hi, t_lo, t_hi))
    i = int(np.argmin(np.abs(sd.s_grid - s)))
    j = int(np.argmin(np.abs(sd.t_grid - t)))
    an = analyze(sd)
    fr = an.frames[i, j]
    print("node (i, j) = (%d, %d) at (s, t) = (%s, %s)" % (i, j, fmt(sd.s_grid[i]), fmt(sd.t_grid[j])),
          file=out)
    for label, vec in zip(("T", "P1", "P2", "P3"), fr.matrix):
        print("%-3s %s" % (label, " ".join(fmt(x) for x in vec)), file=out)
    k = an.curvature.k[i, j]
    for n in range(3):
        print("k%d  %s" % (n + 1, fmt(k[n])), file=out)
    print("Q   %s" % fmt(an.curvature.Q[i, j]), file=out)
    print("max |<Pi,Pj> - delta_ij| %s" % fmt(fr.gram_deviation()), file=out)
    print(GAUGE_NOTE, file=out)
    return 0


# --------------------------------------------------------------------------
# project
# --------------------------------------------------------------------------

AXES = "xyzw"


def obj_mesh(sd, drop):
    """OBJ text of psi with coordinate ``drop`` removed; row-major vertices, quad faces."""
    S, T = np.meshgrid(sd.s_grid, sd.t_grid, indexing="ij")
    pts = sd.evaluate("psi", S, T)
    keep = [a for a in range(4) if AXES[a] != drop]
    ns, nt = sd.ns, sd.nt
    lines = ["# %s projected along %s; vertex i*nt+j+1 is grid node (i, j), ns=%d nt=%d"
             % (sd.name, drop, ns, nt)]
    for p in pts.reshape(-1, 4):
        lines.append("v %s" % " ".join(fmt(p[a]) for a in keep))
    for i in range(ns - 1):
        for j in range(nt - 1):
            a = i * nt + j + 1
            lines.append("f %d %d %d %d" % (a, a + nt, a + nt + 1, a + 1))
    return "\n".join(lines) + "\n"


def cmd_project(args, out):
    sd = load_surface(args.file)
    _write(args.out, obj_mesh(sd, args.drop))
    print("wrote %s (%d vertices, %d faces)" % (args.out, sd.ns * sd.nt, (sd.ns - 1) * (sd.nt - 1)),
          file=out)
    return 0


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError("cannot write %s: %s" % (path, exc.strerror or exc)) from None


# --------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="bdr", description="B-DR soliton surfaces in E^4")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="verify unit speed and the B-DR equation on the grid")
    c.add_argument("file")
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("scan", help="frames, curvatures, invariants and classes on every cell")
    s.add_argument("file")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.add_argument("--force", action="store_true", help="scan even if the check fails")
    s.add_argument("--tol", type=float, default=1e-8, help="check tolerance")
    s.add_argument("--kt-source", choices=("corollary", "tdiff"), default="corollary",
                   help="t-derivative of the curvatures used by the invariants")
    s.set_defaults(func=cmd_scan)

    f = sub.add_parser("frames", help="print the frame and curvatures at a grid node")
    f.add_argument("file")
    f.add_argument("--at", required=True, metavar="S,T")
    f.set_defaults(func=cmd_frames)

    j = sub.add_parser("project", help="write a 3D projection of the surface as an OBJ mesh")
    j.add_argument("file")
    j.add_argument("--drop", required=True, choices=tuple(AXES))
    j.add_argument("--out", required=True)
    j.set_defaults(func=cmd_project)
    return p


def _thread_limit():
    value = os.environ.get("BDR_THREADS")
    if not value:
        return None
    try:
        n = int(value)
    except ValueError:
        raise UsageError("BDR_THREADS must be a positive integer, got %r" % value) from None
    if n < 1:
        raise UsageError("BDR_THREADS must be a positive integer, got %r" % value)
    return n


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", StandingAssumptionWarning)
            with threadpool_limits(limits=_thread_limit()):
                code = args.func(args, out)
        for w in caught:
            print("bdr: warning: %s" % w.message, file=sys.stderr)
        return code
    except UsageError as exc:
        print("bdr: %s" % exc, file=sys.stderr)
        return 2
    except (OSError, BDRError) as exc:
        print("bdr: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
