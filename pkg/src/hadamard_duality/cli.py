"""Command-line front end: ``hadamard-duality {conjugate,verify,separate}``.

Exit codes: 0 ok, 1 config error, 2 solver budget exhausted, 3 verification
failure, 4 the sets to separate intersect.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import io
import json
import os
import sys
import time

from . import __version__
from . import geometry as geo
from .config import SolverConfig
from .conjugation import EXHAUSTED, conjugate
from .errors import ConfigError, SeparationImpossibleError
from .extreal import to_json
from .functions import function_from_dict
from .manifolds import BundleElement, CotangentVector, Point, manifold_from_dict
from .verification import run_suite


EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_VERIFY, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


class RunConfig:
    """Parsed config document with name resolution for points and covectors."""

    def __init__(self, doc, seed=None):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        self.doc = doc
        try:
            self.manifold = manifold_from_dict(doc["manifold"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad manifold descriptor: {exc}") from None
        if seed is None:
            seed = doc.get("seed")
        if seed is None:
            raise ConfigError("a seed is required (config 'seed' or --seed)")
        self.seed = int(seed)
        self.solver = SolverConfig.from_dict({**doc.get("solver", {}), "seed": self.seed})
        self.points = {}
        for name, coords in doc.get("points", {}).items():
            self.points[name] = self._mk_point(coords, name)
        self.covectors = {}
        for name, desc in doc.get("covectors", {}).items():
            base = self.point(desc["base"])
            try:
                self.covectors[name] = CotangentVector(base, desc["coords"])
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"covector {name!r}: {exc}") from None
        self.function = None
        if "function" in doc:
            try:
                self.function = function_from_dict(doc["function"], self.manifold, self.points)
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"bad function descriptor: {exc}") from None

    def _mk_point(self, coords, name="point"):
        try:
            return Point(self.manifold, coords)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{name}: {exc}") from None

    def point(self, ref):
        if isinstance(ref, str):
            if ref not in self.points:
                raise ConfigError(f"unknown point {ref!r}")
            return self.points[ref]
        return self._mk_point(ref)

    def covector(self, ref, base):
        if isinstance(ref, str):
            if ref not in self.covectors:
                raise ConfigError(f"unknown covector {ref!r}")
            xi = self.covectors[ref]
            if xi.base != base:
                raise ConfigError(f"covector {ref!r} is attached to a different point")
            return xi
        try:
            return CotangentVector(base, ref)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"covector: {exc}") from None

    def section(self, name):
        sec = self.doc.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"section {name!r} must be an object")
        return sec

    def set(self, desc):
        kind = desc.get("set")
        if kind == "ball":
            return geo.Ball(self.point(desc["center"]), desc["radius"])
        if kind == "point":
            return geo.PointSet(self.point(desc["center"]))
        if kind == "intersection":
            return geo.Intersection([self.set(s) for s in desc["sets"]])
        if kind == "sublevel":
            F = function_from_dict(desc["function"], self.manifold, self.points)
            bound = desc.get("bound")
            if bound is not None:
                bound = (self.point(bound["center"]), bound["radius"])
            return geo.Sublevel(F, desc["level"], bound, desc.get("compact", False))
        raise ConfigError(f"unknown set kind {kind!r}")


def _threads():
    try:
        return max(1, int(os.environ.get("HF_THREADS", "1")))
    except ValueError:
        return 1


def _require_function(rc):
    if rc.function is None:
        raise ConfigError("this command needs a 'function' descriptor")
    return rc.function


def cmd_conjugate(rc):
    F = _require_function(rc)
    sec = rc.section("conjugate")
    elements, labels = [], []
    for item in sec.get("elements", []):
        p = rc.point(item["point"])
        elements.append(BundleElement(p, rc.covector(item["covector"], p)))
        labels.append({"point": item["point"] if isinstance(item["point"], str) else None})
    sweep = sec.get("sweep")
    norms = []
    if sweep is not None:
        p = rc.point(sweep["base"])
        m = rc.manifold
        d = m.as_array(sweep["direction"])
        u = m.project_tangent(p.coords, d)
        nu = m.norm(p.coords, u)
        if nu == 0:
            raise ConfigError("sweep direction must be nonzero")
        for s in sweep["norms"]:
            s = float(s)
            elements.append(BundleElement(p, CotangentVector(p, m.flat(p.coords, (s / nu) * u), check=False)))
            norms.append(s)
            labels.append({"norm": s})
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        ests = list(pool.map(lambda e: conjugate(F, e, rc.solver), elements))
    rows = [{**lab, **est.to_dict()} for lab, est in zip(labels, ests)]
    code = EXIT_BUDGET if any(e.status == EXHAUSTED for e in ests) else EXIT_OK
    csv_rows = [[r.get("norm", i), r["value"], r["status"]] for i, r in enumerate(rows)]
    return {"estimates": rows}, ["norm" if norms else "index", "value", "status"], csv_rows, code


def cmd_verify(rc):
    sec = rc.section("verify")
    if "suite" not in sec:
        raise ConfigError("verify needs a 'suite' name")
    kwargs = {}
    if sec["suite"] == "separation" and "A" in sec:
        kwargs["sets"] = (rc.set(sec["A"]), rc.set(sec["B"]))
    if "samples" in sec and sec["suite"] in ("projection", "separation"):
        kwargs["samples"] = int(sec["samples"])
    try:
        rep = run_suite(sec["suite"], rc.manifold, sec.get("trials", 10), rc.function, rc.solver, **kwargs)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    rows = [[r["trial"], r["passed"], to_json(r["violation"])] for r in rep.results]
    return rep.to_dict(), ["trial", "passed", "violation"], rows, EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_separate(rc):
    sec = rc.section("separate")
    try:
        A, B = rc.set(sec["A"]), rc.set(sec["B"])
    except KeyError as exc:
        raise ConfigError(f"separate needs sets A and B ({exc})") from None
    samples = int(sec.get("samples", 500))
    res = geo.separating_hypersurface(A, B, rc.solver, samples=samples)
    rng = rc.solver.rng("separate-dump")
    H = res.hypersurface
    rows = [["A", H.level(x)] for x in A.sample(rng, samples)]
    rows += [["B", H.level(x)] for x in B.sample(rng, samples)]
    return res.to_dict(), ["set", "pairing"], rows, EXIT_OK if res.strict else EXIT_VERIFY


COMMANDS = {"conjugate": cmd_conjugate, "verify": cmd_verify, "separate": cmd_separate}


def build_report(command, rc, payload, wall_time):
    return {"command": command, "version": __version__, "seed": rc.seed,
            "inputs": rc.doc, "results": payload, "wall_time": wall_time}


def render(report, fmt, header=None, rows=None):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def parser():
    ap = argparse.ArgumentParser(prog="hadamard-duality",
                                 description="Fenchel duality on Hadamard manifolds.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config document")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


def main(argv=None):
    args = parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
        rc = RunConfig(doc, args.seed)
        payload, header, rows, code = COMMANDS[args.command](rc)
    except SeparationImpossibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = build_report(args.command, rc, payload, time.perf_counter() - t0)
    text = render(report, args.format, header, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
