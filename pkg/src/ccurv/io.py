"""CSV, JSON and SVG serialization of surfaces, curves, traces and sweepouts.

Floats are written with ``repr`` (shortest round-trip form), so CSV and JSON
outputs are deterministic and JSON curve coordinates survive a round trip
bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from . import geometry as geo
from .curve import DiscreteCurve, Region, geodesic_curvature
from .errors import ConfigError

__all__ = [
    "surface_descriptor", "surface_from_descriptor", "curve_to_dict", "curve_from_dict",
    "curve_to_json", "curve_from_json", "curve_to_csv", "curve_from_csv", "write_csv",
    "flow_trace_rows", "sweepout_bundle", "ac_profile_rows", "svg_plot", "svg_curves",
    "svg_filmstrip", "write_text",
]


# --------------------------------------------------------------------------
# Surfaces
# --------------------------------------------------------------------------

def surface_descriptor(surface):
    """Plain-data description of a surface, inverse of :func:`surface_from_descriptor`."""
    if isinstance(surface, geo.RevolutionPlane):
        return {"family": "revolution_plane", "surface": surface_descriptor(surface.surface)}
    if isinstance(surface, geo.FlatTorus):
        return {"family": "flat_torus", "lattice": surface.basis.tolist()}
    if isinstance(surface, geo.ConformalTorus):
        return {"family": "conformal_torus", "lattice": surface.basis.tolist(),
                "samples": surface.samples.tolist()}
    if isinstance(surface, geo.SurfaceOfRevolution):
        p = surface.profile
        if isinstance(p, geo.SphereProfile):
            return {"family": "revolution", "profile": "sphere", "radius": p.R}
        if isinstance(p, geo.CappedCylinderProfile):
            return {"family": "revolution", "profile": "capped_cylinder",
                    "cylinder_length": p.L}
        if isinstance(p, geo.SampledProfile):
            return {"family": "revolution", "profile": "samples",
                    "s": p.samples[0].tolist(), "f": p.samples[1].tolist()}
    raise ConfigError(f"cannot describe surface of type {type(surface).__name__}")


def surface_from_descriptor(d):
    """Rebuild a surface from :func:`surface_descriptor` output."""
    fam = d.get("family")
    if fam == "revolution_plane":
        return surface_from_descriptor(d["surface"]).plane_chart()
    if fam == "flat_torus":
        return geo.FlatTorus(np.array(d["lattice"], dtype=float))
    if fam == "conformal_torus":
        return geo.ConformalTorus(np.array(d["lattice"], dtype=float),
                                  np.array(d["samples"], dtype=float))
    if fam == "revolution":
        prof = d.get("profile")
        if prof == "sphere":
            return geo.round_sphere(d["radius"])
        if prof == "capped_cylinder":
            return geo.capped_cylinder(d["cylinder_length"])
        if prof == "samples":
            return geo.SurfaceOfRevolution(geo.SampledProfile(np.array(d["s"]), np.array(d["f"])))
    raise ConfigError(f"unknown surface descriptor {fam!r}")


# --------------------------------------------------------------------------
# Curves
# --------------------------------------------------------------------------

def curve_to_dict(curve, meta=None):
    return {
        "surface": surface_descriptor(curve.surface),
        "closed": bool(curve.closed),
        "shift": [float(v) for v in np.asarray(curve.shift, dtype=float)],
        "corners": [int(i) for i in curve.corners],
        "vertices": [[float(x), float(y)] for x, y in curve.vertices],
        "meta": {} if meta is None else meta,
    }


def curve_from_dict(d, surface=None):
    surface = surface_from_descriptor(d["surface"]) if surface is None else surface
    return DiscreteCurve(surface, np.array(d["vertices"], dtype=float), closed=d["closed"],
                         shift=np.array(d["shift"], dtype=float), corners=tuple(d["corners"]))


def curve_to_json(curve, meta=None, indent=None):
    """JSON text of a curve with its surface description and metadata."""
    return json.dumps(curve_to_dict(curve, meta), indent=indent, allow_nan=False)


def curve_from_json(text, surface=None):
    return curve_from_dict(json.loads(text), surface)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(rows, header, path=None):
    """CSV text of ``rows`` (floats in round-trip form); also written to ``path`` if given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if path is not None:
        write_text(path, text)
    return text


def curve_to_csv(curve, path=None):
    """Vertex rows ``index, x, y``."""
    return write_csv([(i, x, y) for i, (x, y) in enumerate(curve.vertices)], ["index", "x", "y"], path)


def curve_from_csv(text, surface, closed=True):
    rows = list(csv.DictReader(io.StringIO(text)))
    V = np.array([[float(r["x"]), float(r["y"])] for r in rows])
    return DiscreteCurve(surface, V, closed=closed)


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


# --------------------------------------------------------------------------
# Traces and sweepouts
# --------------------------------------------------------------------------

FLOW_TRACE_HEADER = ["step", "time", "length", "area", "ac", "residual"]


def flow_trace_rows(path, c=0.0):
    """Rows ``(step, time, length, area, A^c, max |kappa - c|)`` of a flow path."""
    rows = []
    for i, (cv, t, L, A) in enumerate(zip(path.curves, path.times, path.lengths, path.areas)):
        res = math.nan
        if L > 0 and cv.n >= 5:
            k = geodesic_curvature(cv, method="stencil")
            res = float(np.nanmax(np.abs(k - c)))
        rows.append((i, t, L, A, L - c * A, res))
    return rows


def sweepout_bundle(sweepout, c=None):
    """JSON-ready dict of a sweepout: slice curves and per-slice values."""
    slices = []
    for s in sweepout.slices:
        if isinstance(s, Region):
            slices.append({"boundary": [curve_to_dict(cv) for cv in s.boundary],
                           "complement": bool(s.complement)})
        else:
            slices.append({"curve": curve_to_dict(s)})
    vals = sweepout.values(c)
    key = "length" if sweepout.kind == "path" else "ac"
    return {"kind": sweepout.kind, "c": c, "params": [float(t) for t in sweepout.params],
            key: [float(v) for v in vals], "slices": slices,
            "meta": {k: v for k, v in sweepout.meta.items()
                     if isinstance(v, (str, int, float, bool, type(None)))}}


def ac_profile_rows(sweepout, c):
    """Rows ``(t, A^c)`` (``(t, length)`` for path sweepouts)."""
    return list(zip(sweepout.params.tolist(), sweepout.values(c).tolist()))


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------

_COLORS = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"]


def _num(v):
    return f"{v:.3f}".rstrip("0").rstrip(".")


def svg_plot(series, xlim, ylim, xlabel="", ylabel="", title="", size=(480, 360)):
    """Static line plot.  ``series`` is a list of ``(xs, ys, label)`` or ``(xs, ys, label, color)``."""
    W, H = size
    ml, mr, mt, mb = 56, 16, 28, 44
    pw, ph = W - ml - mr, H - mt - mb
    (x0, x1), (y0, y1) = xlim, ylim

    def X(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def Y(y):
        return mt + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    for k in range(6):
        xv = x0 + (x1 - x0) * k / 5
        yv = y0 + (y1 - y0) * k / 5
        out.append(f'<text x="{_num(X(xv))}" y="{H - mb + 16}" text-anchor="middle">{_num(xv)}</text>')
        out.append(f'<text x="{ml - 6}" y="{_num(Y(yv) + 4)}" text-anchor="end">{_num(yv)}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{H - 8}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{ml + pw / 2}" y="18" text-anchor="middle">{title}</text>')
    out.append(f'<clipPath id="plot"><rect x="{ml}" y="{mt}" width="{pw}" height="{ph}"/></clipPath>')
    for n, s in enumerate(series):
        xs, ys, label = s[:3]
        color = s[3] if len(s) > 3 else _COLORS[n % len(_COLORS)]
        pts = " ".join(f"{_num(X(x))},{_num(Y(y))}" for x, y in zip(xs, ys)
                       if np.isfinite(x) and np.isfinite(y))
        out.append(f'<polyline clip-path="url(#plot)" fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{ml + pw - 4}" y="{mt + 14 + 14 * n}" text-anchor="end" '
                   f'fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _polyline_svg(curves, X, Y, color):
    out = []
    for cv in curves:
        P = cv.polyline() if cv.closed else cv.vertices
        pts = " ".join(f"{_num(X(x))},{_num(Y(y))}" for x, y in P)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
    return out


def _bounds(curves, pad=0.05):
    P = np.vstack([cv.vertices for cv in curves])
    lo, hi = P.min(0), P.max(0)
    span = max(float(np.max(hi - lo)), 1e-9)
    return lo - pad * span, hi + pad * span, span * (1 + 2 * pad)


def svg_curves(curves, size=360, title=""):
    """Chart-coordinate drawing of one or more curves on a square canvas."""
    lo, hi, span = _bounds(curves)

    def X(x):
        return (x - lo[0]) / span * size

    def Y(y):
        return size - (y - lo[1]) / span * size

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="11">']
    if title:
        out.append(f'<text x="6" y="14">{title}</text>')
    for n, cv in enumerate(curves):
        out += _polyline_svg([cv], X, Y, _COLORS[n % len(_COLORS)])
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_filmstrip(sweepout, c=None, frames=8, cell=140):
    """Row of thumbnails of evenly spaced slices, labelled with their values."""
    idx = np.unique(np.linspace(0, len(sweepout.slices) - 1, min(frames, len(sweepout.slices))).round().astype(int))
    vals = sweepout.values(c)
    curves = []
    for s in sweepout.slices:
        curves += list(s.boundary) if isinstance(s, Region) else [s]
    curves = [cv for cv in curves if cv.n > 0]
    lo, hi, span = _bounds(curves) if curves else (np.zeros(2), np.ones(2), 1.0)
    W = cell * len(idx)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{cell + 18}" '
           f'viewBox="0 0 {W} {cell + 18}" font-family="sans-serif" font-size="10">']
    for n, i in enumerate(idx):
        ox = n * cell

        def X(x, ox=ox):
            return ox + 4 + (x - lo[0]) / span * (cell - 8)

        def Y(y):
            return cell - 4 - (y - lo[1]) / span * (cell - 8)

        s = sweepout.slices[i]
        out.append(f'<rect x="{ox}" y="0" width="{cell}" height="{cell}" fill="none" stroke="#bbb"/>')
        out += _polyline_svg(list(s.boundary) if isinstance(s, Region) else [s], X, Y, _COLORS[0])
        out.append(f'<text x="{ox + cell / 2}" y="{cell + 13}" text-anchor="middle">'
                   f't={_num(float(sweepout.params[i]))} v={_num(float(vals[i]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
