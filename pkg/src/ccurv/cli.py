"""Command-line interface: ``ccurv solve | region-plot | verify``.

Every command writes its artifacts and a ``manifest.json`` (inputs,
parameters, tolerances, versions, output hashes) to the output directory,
which defaults to ``$CCURV_OUT`` or ``./ccurv-out``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 regression or invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import criteria as cr
from . import fixtures as fx
from . import geometry as geo
from . import io as cio
from .curve import (Region, ac_functional, embedded_lift_check, gauss_bonnet_defect,
                    geodesic_curvature, is_embedded, length, second_variation, LiftVerdict)
from .errors import CCurvError, ConfigError, NotEmbeddable, NumericalFailure

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_REGRESSION = 0, 2, 3, 4
OUT_ENV = "CCURV_OUT"
FORMATS = ("csv", "json", "svg")

# Reference coordinates read off the published figures.
GOLDEN = {
    "figure2_blue": [(0.20273, 5.0), (1.0, 1.3130), (2.0, 1.0373), (5.0, 1.0001)],
    "figure2_red": [(0.88282, 2.0), (2.0, 1.2854), (5.0, 1.56416), (10.0, 2.65708)],
    "figure1_upper": [(0.025, 0.291689), (0.05, 0.264142), (0.075, 0.235599), (0.1, 0.205981)],
    "figure1_lower": [(0.1026, 0.0875), (0.0893, 0.05)],
    "figure1_corner": (0.1167, 0.1856),
    "figure1_intercept": 1.0 / 16,
}
GOLDEN_TOL = {"figure2_blue": 5e-4, "figure2_red": 5e-4, "figure1_upper": 1e-3,
              "figure1_lower": 3e-3, "figure1_corner": 2e-3, "figure1_intercept": 1e-4}


class RegressionFailure(CCurvError):
    """Emitted data disagrees with a reference table or an invariant check failed."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or []


# --------------------------------------------------------------------------
# Run bookkeeping
# --------------------------------------------------------------------------

def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _versions():
    import scipy
    return {"ccurv": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


class Run:
    """Collects artifacts of one command and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out or os.environ.get(OUT_ENV) or "ccurv-out")
        self.formats = _parse_formats(args.format)
        self.outputs = []

    def write(self, name, text):
        path = cio.write_text(self.out / name, text)
        self.outputs.append(path)
        return path

    def json(self, name, obj):
        return self.write(name, json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")

    def manifest(self, status, extra=None):
        params = {k: v for k, v in vars(self.args).items() if k not in ("func", "out")}
        inputs = []
        surf = getattr(self.args, "surface", None)
        if surf and Path(surf).is_file():
            inputs.append({"path": str(surf), "sha256": _sha256(surf)})
        man = {
            "command": self.args.command,
            "parameters": params,
            "inputs": inputs,
            "outputs": [{"path": p.name, "sha256": _sha256(p)} for p in self.outputs],
            "versions": _versions(),
            "exit_code": status,
        }
        if extra:
            man.update(extra)
        cio.write_text(self.out / "manifest.json",
                       json.dumps(_clean(man), indent=2, sort_keys=True) + "\n")


def _clean(obj):
    """Replace non-finite floats so that JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _parse_formats(fmt):
    if not fmt:
        return set(FORMATS)
    out = set()
    for item in fmt:
        for f in item.split(","):
            f = f.strip()
            if f not in FORMATS:
                raise ConfigError(f"unknown format {f!r}")
            out.add(f)
    return out


# --------------------------------------------------------------------------
# solve
# --------------------------------------------------------------------------

def _solve_surface(surface):
    """Chart used for solving; surfaces of revolution use their conformal plane chart."""
    return surface.plane_chart() if isinstance(surface, geo.SurfaceOfRevolution) else surface


def _seed_region(surface, c, n=128):
    """Chart circle around the origin whose metric radius is the model-space radius."""
    x0 = np.zeros(2)
    K = float(geo.gauss_curvature_at(surface, x0))
    r = cr.r0(c, K)
    scale = math.sqrt(float(geo.metric_at(surface, x0)[0, 0]))
    return Region(fx.circle(surface, x0, r / scale, n=n), witness=x0)


def cmd_solve(args, run):
    from .shortening import FlowConfig, solve_prescribed_curvature
    if args.c is None or args.c <= 0:
        raise ConfigError("--c must be positive")
    if not args.surface:
        raise ConfigError("--surface is required")
    surface = geo.load_surface(args.surface)
    stats = geo.surface_stats(surface)
    c = float(args.c)
    report = {"c": c, "surface": cio.surface_descriptor(surface),
              "stats": {"minK": stats.minK, "maxK": stats.maxK, "inj": stats.inj,
                        "area": stats.area}}
    if isinstance(surface, geo.FlatTorus):
        verdict = embedded_lift_check(surface, c)
        report["lift_check"] = verdict.value
        if verdict is LiftVerdict.NOT_EMBEDDABLE:
            raise NotEmbeddable(f"the circle of curvature {c} does not embed: c * inj <= 1")
    chart = _solve_surface(surface)
    seed = _seed_region(chart, c)
    tol = FlowConfig().residual if args.tol is None else args.tol
    trace = []
    region = solve_prescribed_curvature(chart, c, seed, FlowConfig(residual=tol), trace=trace)
    cv = region.boundary[0]
    kappa = geodesic_curvature(cv, region)
    residual = float(np.max(np.abs(kappa - c)))
    sv = float(second_variation(cv, None, np.ones(cv.n), c))
    report.update({
        "length": float(length(cv)), "area": float(region.area()),
        "ac": float(ac_functional(region, c)), "residual": residual,
        "embedded": bool(is_embedded(cv)), "iterations": len(trace),
        "second_variation_phi1": sv,
        "instability_certificate": bool(sv < 0),
        "criteria": [dict(zip(("name", "margin", "holds"), r)) for r in cr.evaluate_criteria(stats, c).rows()],
    })
    if "json" in run.formats:
        run.write("solution.json", cio.curve_to_json(cv, meta={"c": c}, indent=1) + "\n")
    if "csv" in run.formats:
        run.write("solution.csv", cio.curve_to_csv(cv))
        run.write("solve_trace.csv", cio.write_csv(trace, ["iteration", "length", "area", "residual"]))
    if "svg" in run.formats:
        run.write("solution.svg", cio.svg_curves([cv], title=f"c = {c}"))
    run.json("report.json", _clean(report))
    print(f"solve: length {report['length']:.10g}  residual {residual:.3g}  "
          f"second variation (phi=1) {sv:.6g}  embedded {report['embedded']}")
    return EXIT_OK


# --------------------------------------------------------------------------
# region-plot
# --------------------------------------------------------------------------

def figure_tables(grid):
    """Figure 1 and Figure 2 traces with the reference abscissae included."""
    if grid < 4:
        raise ConfigError("--grid must be at least 4")
    t1 = cr.figure1_region(grid)
    ms = np.array([m for m, _ in GOLDEN["figure1_upper"]])
    upper = np.vstack([t1.upper, np.stack([ms, cr.figure1_upper(ms)], -1)])
    upper = upper[np.argsort(upper[:, 0], kind="stable")]
    cs = np.array([c for _, c in GOLDEN["figure1_lower"]])
    lower = np.vstack([t1.lower, [[cr.figure1_lower_m(c), c] for c in cs]])
    lower = lower[np.argsort(lower[:, 1], kind="stable")]
    t1 = cr.RegionBoundaryTrace(upper, lower, t1.corner, t1.intercept)
    xs = np.array([x for x, _ in GOLDEN["figure2_blue"] + GOLDEN["figure2_red"]])
    inj = np.union1d(np.linspace(0.2, 10.0, grid), xs)
    return t1, cr.figure2_curves(inj)


def regression_check(t1, t2, tol=None):
    """Compare traces with :data:`GOLDEN`; returns a list of offending entries."""
    bad = []

    def tol_for(key):
        return GOLDEN_TOL[key] if tol is None else tol

    def check(key, where, got, want):
        if not abs(got - want) <= tol_for(key):
            bad.append({"table": key, "at": where, "got": got, "expected": want,
                        "tolerance": tol_for(key)})

    for key, ys in (("figure2_blue", t2.blue), ("figure2_red", t2.red)):
        for x, y in GOLDEN[key]:
            i = int(np.argmin(np.abs(t2.inj - x)))
            check(key, x, float(ys[i]), y)
    for m, c in GOLDEN["figure1_upper"]:
        i = int(np.argmin(np.abs(t1.upper[:, 0] - m)))
        check("figure1_upper", m, float(t1.upper[i, 1]), c)
    for m, c in GOLDEN["figure1_lower"]:
        i = int(np.argmin(np.abs(t1.lower[:, 1] - c)))
        check("figure1_lower", c, float(t1.lower[i, 0]), m)
    for axis, (got, want) in enumerate(zip(t1.corner, GOLDEN["figure1_corner"])):
        check("figure1_corner", ("minK", "c")[axis], float(got), want)
    check("figure1_intercept", "c=0", float(t1.intercept), GOLDEN["figure1_intercept"])
    return bad


def cmd_region_plot(args, run):
    grid = 200 if args.grid is None else args.grid
    if args.tol is not None and args.tol < 0:
        raise ConfigError("--tol must be nonnegative")
    t1, t2 = figure_tables(grid)
    if "csv" in run.formats:
        run.write("figure1.csv", cio.write_csv(t1.rows(), ["minK", "c_upper", "c_lower"]))
        run.write("figure2.csv", cio.write_csv(t2.rows(), ["inj", "c_blue", "c_red"]))
    if "json" in run.formats:
        run.json("figures.json", _clean({
            "figure1": {"upper": t1.upper.tolist(), "lower": t1.lower.tolist(),
                        "corner": list(t1.corner), "intercept": t1.intercept},
            "figure2": {"inj": t2.inj.tolist(), "blue": t2.blue.tolist(), "red": t2.red.tolist()}}))
    if "svg" in run.formats:
        run.write("figure1.svg", cio.svg_plot(
            [(t1.upper[:, 0], t1.upper[:, 1], "upper branch", "#1f4e9c"),
             (t1.lower[:, 0], t1.lower[:, 1], "lower branch", "#2e8b57")],
            (0.0, 0.5), (0.0, 0.65), "min K", "c", "0 < K <= 1"))
        run.write("figure2.svg", cio.svg_plot(
            [(t2.inj, t2.blue, "coth(inj)", "#1f4e9c"), (t2.inj, t2.red, "comparison", "#c0392b")],
            (0.0, 10.0), (0.0, 5.5), "inj", "c", "min K = -1"))
    bad = regression_check(t1, t2, args.tol)
    run.json("regression.json", _clean({"passed": not bad, "failures": bad}))
    if bad:
        for b in bad:
            print(f"FAIL {b['table']} at {b['at']}: got {b['got']:.6g}, expected "
                  f"{b['expected']:.6g} (tol {b['tolerance']:g})")
        raise RegressionFailure(f"{len(bad)} reference points out of tolerance", bad)
    print(f"region-plot: all {sum(len(v) if isinstance(v, list) else 1 for v in GOLDEN.values()) + 1} "
          "reference values within tolerance")
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def _check_curvature_sign(negative_control=False):
    """Counter-clockwise circle bounding its disk: curvature toward the region is +1/r."""
    P = fx.plane()
    cv = fx.circle(P, (0.0, 0.0), 0.5, n=128)
    region = Region(cv, witness=(0.0, 0.0))
    if negative_control:
        # deliberate orientation flip without updating the side convention
        cv = cv.reversed()
    k = geodesic_curvature(cv)
    ok = bool(np.all(np.abs(k - 2.0) < 1e-3))
    kr = geodesic_curvature(region.boundary[0], region)
    ok &= bool(np.all(np.abs(kr - 2.0) < 1e-3))
    return ok, f"mean curvature {float(np.mean(k)):.6g}, expected 2"


def _check_birkhoff(seed, count=50):
    from .shortening import BirkhoffConfig, birkhoff_map
    rng = np.random.default_rng(seed)
    worst = -np.inf
    cfg = BirkhoffConfig(L=8, r0=1.0)
    for k in range(count):
        surf = fx.plane() if k % 2 == 0 else geo.round_sphere(1.0).plane_chart()
        p = rng.uniform(-0.3, 0.0, 2)
        q = p + rng.uniform(0.3, 0.8) * np.array([math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a)])
        cv = fx.sawtooth(p, q, int(rng.integers(2, 7)), rng.uniform(0.01, 0.1), surface=surf)
        for _ in range(3):
            new = birkhoff_map(cv, cfg)
            worst = max(worst, length(new) - length(cv))
            cv = new
    return bool(worst <= 1e-12), f"largest length increase {worst:.3g} over {count} curves"


def _check_inverse_pair(seed):
    rng = np.random.default_rng(seed)
    err = 0.0
    for _ in range(100):
        c = rng.uniform(0.05, 3.0)
        k = rng.uniform(-c * c + 1e-3, 4.0)
        err = max(err, abs(cr.ct(k, cr.r0(c, k)) - c))
    return bool(err < 1e-10), f"max |ct(k, r0(c, k)) - c| = {err:.3g}"


def _check_gauss_bonnet():
    regions = [fx.disk(fx.plane(), (0.0, 0.0), 1.0), fx.sphere_cap(1.0),
               Region(fx.circle(geo.ConformalTorus.from_modes(np.eye(2) * 2 * math.pi,
                                                              [(0.2, 1, 0, 0.3)], grid=48),
                                (1.0, 2.0), 0.8), witness=(1.0, 2.0))]
    err = max(abs(gauss_bonnet_defect(r)) for r in regions)
    return bool(err < 1e-3), f"max |defect| {err:.3g} on {len(regions)} regions"


def _check_csf_monotone():
    from .shortening import csf_path_to_point
    path = csf_path_to_point(fx.circle(fx.plane(), (0.0, 0.0), 0.5, n=48))
    L = np.array(path.lengths)
    ok = bool(np.all(np.diff(L) <= 1e-12) and path.flags.get("collapsed"))
    return ok, f"{len(L)} stored slices, final length {L[-1]:.3g}"


def _check_figures():
    t1, t2 = figure_tables(200)
    bad = regression_check(t1, t2)
    return not bad, f"{len(bad)} reference points out of tolerance"


def _check_node_terms():
    errs = []
    for alpha in (math.pi / 3, math.pi / 2, 2 * math.pi / 3):
        cv, info = fx.lens_figure_eight(1.0, alpha, m=256)
        from .curve import detect_node
        node = detect_node(cv)
        q = second_variation(cv, node, np.ones(cv.n), 1.0)
        exact = -info["length"] - 4 * math.cos(alpha / 2) / math.sin(alpha / 2)
        errs.append(abs(q - exact) / abs(exact))
    return bool(max(errs) < 1e-3), f"max relative error {max(errs):.3g}"


def verification_checks(seed=0, negative_control=False):
    """Named invariant checks run by ``ccurv verify``."""
    return [
        ("geodesic_curvature sign", lambda: _check_curvature_sign(negative_control)),
        ("Birkhoff length monotonicity", lambda: _check_birkhoff(seed)),
        ("ct / r0 inverse pair", lambda: _check_inverse_pair(seed)),
        ("Gauss-Bonnet closure", _check_gauss_bonnet),
        ("curve shortening monotone collapse", _check_csf_monotone),
        ("node-term closed form", _check_node_terms),
        ("figure reference tables", _check_figures),
    ]


def cmd_verify(args, run):
    seed = 0 if args.seed is None else args.seed
    rows = []
    for name, fn in verification_checks(seed, args.negative_control):
        try:
            ok, detail = fn()
        except CCurvError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append((name, "pass" if ok else "FAIL", detail))
        print(f"{'pass' if ok else 'FAIL':4}  {name}: {detail}")
    if "csv" in run.formats:
        run.write("verify.csv", cio.write_csv(rows, ["check", "status", "detail"]))
    if "json" in run.formats:
        run.json("verify.json", [dict(zip(("check", "status", "detail"), r)) for r in rows])
    failed = [r for r in rows if r[1] != "pass"]
    if failed:
        raise RegressionFailure(f"{len(failed)} invariant checks failed",
                                [{"check": r[0], "detail": r[2]} for r in failed])
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="ccurv", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"ccurv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./ccurv-out)")
        p.add_argument("--format", action="append", metavar="{csv,json,svg}",
                       help="artifact formats, repeatable or comma separated (default all)")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--grid", type=int, default=None, help="sampling grid size")
        p.add_argument("--surface", help="surface configuration file")
        p.add_argument("--c", type=float, default=None, help="prescribed curvature")

    p = sub.add_parser("solve", help="solve for a curve of constant geodesic curvature c")
    common(p)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("region-plot", help="emit the condition-region figures and check them")
    common(p)
    p.set_defaults(func=cmd_region_plot)
    p = sub.add_parser("verify", help="run the invariant checks")
    common(p)
    p.add_argument("--negative-control", action="store_true",
                   help="inject an orientation-flip bug; the sign check must fail")
    p.set_defaults(func=cmd_verify)
    return parser


def _exit_code(exc):
    if isinstance(exc, RegressionFailure):
        return EXIT_REGRESSION
    if isinstance(exc, NumericalFailure):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
    except ConfigError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "exit_code": EXIT_CONFIG}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        status = args.func(args, run)
        run.manifest(status)
        return status
    except CCurvError as exc:
        status = _exit_code(exc)
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": status}
        if isinstance(exc, RegressionFailure):
            err["details"] = exc.details
        run.json("error.json", _clean(err))
        run.manifest(status, {"error": err["error"]})
        print(json.dumps(_clean(err)), file=sys.stderr)
        return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
