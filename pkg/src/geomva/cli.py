"""Command-line front end.

Exit codes: 0 pass, 1 check failed, 2 usage error, 3 undetermined, 4 domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field, fields
from fractions import Fraction

from . import extraction, geometric as geo, va_core
from .errors import ConfigError, DomainError, LocalityUndetermined, VertexAlgebraError
from .grading import DegreeWindow, GradedVector, WindowedCompletion
from .models import MODELS, build_model
from .scalars import GaussianRational

SCHEMA = 1
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNDETERMINED, EXIT_DOMAIN = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    model: str = "free_boson"
    window: str = "0:6"
    kmax: int = 7
    tol: float = 1e-9
    m_max: int = 3
    seed: int = 42
    params: dict = field(default_factory=dict)
    output: str | None = None
    timing: bool = False

    def validate(self) -> DegreeWindow:
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        try:
            window = DegreeWindow.parse(self.window) if isinstance(self.window, str) else DegreeWindow(*self.window)
        except (ValueError, TypeError, VertexAlgebraError) as exc:
            raise ConfigError(f"bad window {self.window!r}: expected lo:hi") from exc
        if self.kmax < 0:
            raise ConfigError("--kmax must be nonnegative")
        if not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if not 0 <= self.m_max <= 3:
            raise ConfigError("m_max must be between 0 and 3")
        return window

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "window": str(self.window) if not isinstance(self.window, (list, tuple)) else f"{self.window[0]}:{self.window[1]}",
            "kmax": self.kmax,
            "tol": self.tol,
            "m_max": self.m_max,
            "seed": self.seed,
        }


# -- serialization -----------------------------------------------------------------------


def jsonable(x):
    """Convert library values to JSON-ready data; complex numbers become ``[re, im]``."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (complex, GaussianRational)):
        c = complex(x)
        return [c.real, c.imag]
    if isinstance(x, GradedVector):
        return {x.basis.label(k): jsonable(c) for k, c in x.sorted_items()}
    if isinstance(x, WindowedCompletion):
        return {str(k): jsonable(x.component(k)) for k in x.window.degrees()}
    if isinstance(x, va_core.CheckReport):
        return {"status": x.status, "residual": jsonable(x.residual), "details": jsonable(x.details)}
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item"):
        return jsonable(x.item())
    return str(x)


def parse_scalar(text: str):
    """Exact when possible: integers and fractions stay rational, ``i`` suffixes become Gaussian."""
    text = text.strip().replace(" ", "")
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        c = complex(text.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc
    re, im = Fraction(c.real), Fraction(c.imag)
    if complex(float(re), float(im)) == c and all(f.denominator <= 1024 for f in (re, im)):
        return GaussianRational(re, im)
    return c


def parse_insertion(V, text: str):
    if "@" not in text:
        raise ConfigError(f"insertion {text!r} must look like LABEL@POINT")
    label, point = text.rsplit("@", 1)
    try:
        key = V.basis.parse(label, search_hi=max(V.window.hi, 12))
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    return V.basis.vector(key), parse_scalar(point)


# -- helpers -------------------------------------------------------------------------------


def _generator(V):
    keys = V.window_keys()
    return next((k for k in keys if V.degree(k) > 0), keys[0])


def _status(results: dict) -> str:
    statuses = [r.get("status") for r in results.values() if isinstance(r, dict)]
    if "fail" in statuses:
        return "fail"
    if "undetermined" in statuses:
        return "undetermined"
    return "pass"


def _timed(cfg: RunConfig, fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, (time.perf_counter() - t0 if cfg.timing else None)


# -- commands ------------------------------------------------------------------------------


def cmd_axioms(cfg: RunConfig, V, args) -> dict:
    results = {}
    reports, t = _timed(cfg, va_core.axiom_suite, V)
    for r in reports:
        entry = jsonable(r)
        entry["timing"] = t
        results[f"va.{r.name}"] = entry
    G = geo.GeometricStructure(V, cfg.m_max)
    g = V.basis.vector(_generator(V))
    keys = V.window_keys()
    second = V.basis.vector(keys[min(2, len(keys) - 1)])
    perm_worst, eq_worst, perm_ok, eq_ok = 0.0, 0.0, True, True
    t0 = time.perf_counter()
    cases = [([g, g], 2), ([g, second], 2), ([g, g, g], 3), ([g, second, g], 3)]
    for a, m in cases:
        if m > cfg.m_max:
            continue
        for z in geo.sample_points(m, 4, cfg.seed):
            sigmas = [(1, 0)] if m == 2 else [(1, 2, 0), (2, 1, 0)]
            for sigma in sigmas:
                r = geo.check_permutation(G, a, z, sigma, tol=1e-8)
                perm_worst, perm_ok = max(perm_worst, r.residual), perm_ok and r.passed
            for lam in (2, 1j, 1 + 1j):
                r = geo.check_equivariance(G, a, z, lam, tol=1e-8)
                eq_worst, eq_ok = max(eq_worst, r.residual), eq_ok and r.passed
    timing = time.perf_counter() - t0 if cfg.timing else None
    results["geo.permutation"] = {"status": "pass" if perm_ok else "fail", "residual": perm_worst, "timing": timing}
    results["geo.equivariance"] = {"status": "pass" if eq_ok else "fail", "residual": eq_worst, "timing": timing}
    ins = [geo.check_insertion_at_zero(G, V.basis.vector(k)) for k in keys]
    results["geo.insertion_at_zero"] = {
        "status": "pass" if all(r.passed for r in ins) else "fail",
        "residual": max(r.residual for r in ins),
        "count": len(ins),
    }
    try:
        orders = {
            f"{V.basis.label(a)},{V.basis.label(b)}": geo.check_meromorphicity(G, V.basis.vector(a), V.basis.vector(b))
            for a in keys
            for b in keys
            if V.degree(a) + V.degree(b) <= V.window.hi
        }
        results["geo.meromorphicity"] = {"status": "pass", "residual": 0.0, "orders": orders}
    except VertexAlgebraError as exc:
        results["geo.meromorphicity"] = {"status": "fail", "residual": None, "error": str(exc)}
    assoc, t = _timed(cfg, geo.check_associativity, G, [g], (4, 0), [g], (1,))
    entry = jsonable(assoc)
    entry["timing"] = t
    results["geo.associativity"] = entry
    return results


def cmd_eval(cfg: RunConfig, V, args) -> dict:
    G = geo.GeometricStructure(V, cfg.m_max)
    ins = [parse_insertion(V, s) for s in args.insertions]
    a = [x for x, _ in ins]
    z = [p for _, p in ins]
    if len(a) > cfg.m_max:
        raise ConfigError(f"at most {cfg.m_max} insertions are supported")
    exact = all(not isinstance(p, complex) for p in z)
    if len(z) >= 2 and geo.is_ordered(z) and not exact:
        val = G.mu_ordered(a, z)
        path = "ordered"
        certs = {str(l): c.to_json() for l, c in val.certificates.items()}
    else:
        val = G.mu_continued(a, z)
        path = "continued"
        certs = None
    return {"eval": {"status": "pass", "path": path, "value": jsonable(val), "certificates": jsonable(certs)}}


def cmd_ope(cfg: RunConfig, V, args) -> dict:
    G = geo.GeometricStructure(V, cfg.m_max)
    ins = [parse_insertion(V, s) for s in args.insertions]
    a = [x for x, _ in ins]
    z = [p for _, p in ins]
    terms = geo.ope_expand(G, a, args.i, args.j, args.order)
    out = {
        "status": "pass",
        "terms": [{"k": k, "coefficient": jsonable(c)} for k, c, _ in terms],
    }
    if geo.in_ope_region(z, args.i, args.j):
        orders = sorted({n for n in (1, 2, 4, 8, args.order) if n <= args.order})
        out["partial_residuals"] = {str(n): r for n, r in geo.ope_partial_residuals(G, a, z, args.i, args.j, orders).items()}
    else:
        out["partial_residuals"] = None
        out["note"] = "point outside the OPE region; no partial sums compared"
    return {"ope": out}


def cmd_roundtrip(cfg: RunConfig, V, args) -> dict:
    ecfg = extraction.ExtractionConfig(radius=args.radius, nodes=args.nodes, tol=cfg.tol)
    report, t = _timed(cfg, extraction.roundtrip, V, ecfg, cfg.seed)
    entry = jsonable(report)
    entry["timing"] = t
    return {"roundtrip": entry}


def _strictly_decreasing(values: list) -> bool:
    if all(v == 0 for v in values):
        return True
    return all(b < a for a, b in zip(values, values[1:]))


def ope_sample_point(seed: int) -> tuple:
    """Three points with insertions 1 and 2 close together, away from insertion 0."""
    rng = random.Random(seed)
    zj = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    off = 0.25 * complex(math.cos(rng.uniform(0, 2 * math.pi)), math.sin(rng.uniform(0, 2 * math.pi)))
    far = zj + 3 * complex(math.cos(rng.uniform(0, 2 * math.pi)), math.sin(rng.uniform(0, 2 * math.pi)))
    return (far, zj + off, zj)


def cmd_converge(cfg: RunConfig, V, args) -> dict:
    G = geo.GeometricStructure(V, cfg.m_max)
    g = V.basis.vector(_generator(V))
    sweep = [int(x) for x in args.sweep.split(",")]
    orders = [int(x) for x in args.orders.split(",")]
    assoc = [geo.check_associativity(G, [g], (4, 0), [g], (1,), kmax=K).residual for K in sweep]
    z = ope_sample_point(cfg.seed)
    ope = geo.ope_partial_residuals(G, [g, g, g], z, 1, 2, orders)
    ope_vals = [ope[n] for n in orders]
    a_ok, o_ok = _strictly_decreasing(assoc), _strictly_decreasing(ope_vals)
    return {
        "associativity": {
            "status": "pass" if a_ok else "fail",
            "table": [{"K": K, "residual": r} for K, r in zip(sweep, assoc)],
            "decreasing": a_ok,
        },
        "ope": {
            "status": "pass" if o_ok else "fail",
            "point": jsonable(list(z)),
            "table": [{"order": n, "residual": r} for n, r in zip(orders, ope_vals)],
            "decreasing": o_ok,
        },
    }


def cmd_locality(cfg: RunConfig, V, args) -> dict:
    if args.a or args.b:
        if not (args.a and args.b):
            raise ConfigError("give both --a and --b, or neither")
        try:
            pairs = [(V.basis.parse(args.a), V.basis.parse(args.b))]
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        pairs = va_core.locality_pairs(V)
    orders, undetermined = {}, []
    for x, y in pairs:
        name = f"{V.basis.label(x)},{V.basis.label(y)}"
        try:
            orders[name] = va_core.check_locality(V, V.basis.vector(x), V.basis.vector(y), N_cap=args.ncap)
        except LocalityUndetermined:
            undetermined.append(name)
    status = "undetermined" if undetermined else "pass"
    return {"locality": {"status": status, "orders": orders, "undetermined": undetermined}}


COMMANDS = {
    "axioms": cmd_axioms,
    "eval": cmd_eval,
    "ope": cmd_ope,
    "roundtrip": cmd_roundtrip,
    "converge": cmd_converge,
    "locality": cmd_locality,
}


# -- argument handling -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--window", help="degree window lo:hi (default 0:6)")
    common.add_argument("--kmax", type=int, help="mode cap K (default 7)")
    common.add_argument("--tol", type=float, help="tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, help="sampling seed (default 42)")
    common.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="model parameter, e.g. d=2 for the commutative model")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--output", help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    common.add_argument("--timing", action="store_true", help="record wall-clock timings")

    parser = argparse.ArgumentParser(prog="geomva", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("axioms", parents=[common], help="vertex-algebra and geometric axiom suites")
    p = sub.add_parser("eval", parents=[common], help="evaluate mu at points")
    p.add_argument("insertions", nargs="*", metavar="LABEL@POINT")
    p = sub.add_parser("ope", parents=[common], help="OPE terms and partial sums")
    p.add_argument("insertions", nargs="+", metavar="LABEL@POINT")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--order", type=int, default=4)
    p = sub.add_parser("roundtrip", parents=[common], help="extract modes back from mu")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=None)
    p = sub.add_parser("converge", parents=[common], help="residual tables under truncation")
    p.add_argument("--sweep", default="3,5,7", help="associativity truncations K")
    p.add_argument("--orders", default="2,4,8", help="OPE partial-sum orders")
    p = sub.add_parser("locality", parents=[common], help="locality orders")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--ncap", type=int, default=None)
    return parser


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        names = {f.name for f in fields(RunConfig)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            setattr(cfg, k, v)
    for name in ("model", "window", "kmax", "tol", "seed", "output"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.timing:
        cfg.timing = True
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"--param expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg.params[k] = int(v) if v.lstrip("-").isdigit() else v
    return cfg


def _print_human(doc: dict, out) -> None:
    print(f"{doc['command']} [{doc['config']['model']}]: {doc['status']}", file=out)
    for name, r in doc["results"].items():
        if not isinstance(r, dict):
            continue
        line = f"  {name}: {r.get('status')}"
        if r.get("residual") is not None:
            line += f" residual={r['residual']}"
        print(line, file=out)
        for extra in ("value", "table", "orders", "terms", "error"):
            if extra in r and r[extra] is not None:
                print(f"    {extra}: {json.dumps(r[extra])}", file=out)
    if doc.get("error"):
        print(f"  error: {doc['error']}", file=out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    doc = {"schema": SCHEMA, "command": args.command}
    try:
        cfg = load_config(args)
        window = cfg.validate()
        doc["config"] = cfg.to_json()
        V = build_model(cfg.model, window, cfg.kmax, **cfg.params)
        results = COMMANDS[args.command](cfg, V, args)
        doc["results"] = jsonable(results)
        doc["status"] = _status(doc["results"])
        code = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "undetermined": EXIT_UNDETERMINED}[doc["status"]]
    except ConfigError as exc:
        print(f"geomva: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        doc.setdefault("config", {"model": getattr(args, "model", None)})
        doc["results"] = {}
        doc["status"] = "domain-error"
        doc["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_DOMAIN
    except LocalityUndetermined as exc:
        doc["results"] = {}
        doc["status"] = "undetermined"
        doc["error"] = str(exc)
        code = EXIT_UNDETERMINED
    text = json.dumps(doc, indent=2)
    if cfg_output := getattr(args, "output", None):
        with open(cfg_output, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        _print_human(doc, sys.stdout if code != EXIT_DOMAIN else sys.stderr)
    return code



def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
