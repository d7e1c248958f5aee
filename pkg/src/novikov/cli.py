"""Command-line front end.

Subcommands: compute (twisted Betti numbers of a complex file), verify
(run a named verification suite), models (catalog listing and export),
relative (Betti numbers of a pair).  Reports are printed as text or,
with --json, as a fixed schema-1 JSON document with rationals rendered
as exact "p/q" strings.

Exit codes: 0 success / all checks pass, 1 check failure, 2 malformed
input or usage error.

JSON reports are deterministic for a fixed seed; wall-clock timing is
only included when --timings is given, since it would break
byte-for-byte reproducibility of saved reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import models
from .complexes import (CocycleViolation, Complex, LocalSystem,
                        NonpositiveGauge, PathNotInComplex, Subcomplex,
                        ValidationError)
from .cohomology import TwistedComplex
from .exactlin import rational_from_string, rational_to_string
from .pairs import RelativeComplex


class InputError(Exception):
    """Malformed file or bad usage; maps to exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror))
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc))


def load_complex(path: str, quiet: bool = False) -> tuple[Complex, str]:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise InputError("%s: expected a JSON object" % path)
    try:
        n = int(doc["vertex_count"])
        maximal = [tuple(int(v) for v in s) for s in doc["maximal_simplices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("%s: need vertex_count and maximal_simplices "
                         "(%s)" % (path, exc))
    try:
        c = Complex.from_simplices(n, maximal, close_faces=True)
        c.validate()
    except ValidationError as exc:
        raise InputError("%s: %s" % (path, exc))
    added = sum(c.f_vector()) - len(set(maximal))
    if added and not quiet:
        print("note: face closure added %d simplices" % added,
              file=sys.stderr)
    return c, doc.get("name", os.path.basename(path))


def load_system(path: str, c: Complex, quiet: bool = False) -> LocalSystem:
    doc = _load_json(path)
    edges = doc.get("edges") if isinstance(doc, dict) else None
    if edges is None:
        raise InputError("%s: expected {\"edges\": [[u, v, \"p/q\"], ...]}"
                         % path)
    weight = {}
    for item in edges:
        try:
            u, v, w = item
            u, v = int(u), int(v)
            q = rational_from_string(str(w))
        except (TypeError, ValueError) as exc:
            raise InputError("%s: bad edge entry %r (%s)" % (path, item, exc))
        if not u < v:
            raise InputError("%s: edge (%d, %d) must have u < v" % (path, u, v))
        if q <= 0:
            raise InputError("%s: weight on (%d, %d) must be positive"
                             % (path, u, v))
        weight[(u, v)] = q
    defaulted = 0
    for e in c.edges():
        if e not in weight:
            weight[e] = rational_from_string("1")
            defaulted += 1
    extra = [e for e in weight if not c.contains(e)]
    if extra:
        raise InputError("%s: edge %r not in the complex" % (path, extra[0]))
    if defaulted and not quiet:
        print("note: %d edges defaulted to weight 1" % defaulted,
              file=sys.stderr)
    try:
        s = LocalSystem(c, weight)
        s.validate()
    except (ValidationError, CocycleViolation) as exc:
        raise InputError("%s: %s" % (path, exc))
    return s


def load_subcomplex(path: str, c: Complex) -> Subcomplex:
    doc = _load_json(path)
    simplices = doc.get("simplices") if isinstance(doc, dict) else None
    if simplices is None:
        raise InputError("%s: expected {\"simplices\": [...]}" % path)
    from .complexes import subcomplex as make
    try:
        z = make(c, [tuple(int(v) for v in s) for s in simplices],
                 close_faces=bool(doc.get("close_faces", True)))
        z.validate()
    except (TypeError, ValueError) as exc:
        raise InputError("%s: bad simplex list (%s)" % (path, exc))
    except ValidationError as exc:
        raise InputError("%s: %s" % (path, exc))
    return z


def _reps_json(reps_by_degree):
    return [[{str(i): rational_to_string(v) for i, v in sorted(rep.items())}
             for rep in reps] for reps in reps_by_degree]


def _emit(doc: dict, args) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    if "betti" in doc:
        print("betti: %s" % doc["betti"])
    if "checks" in doc:
        for rep in doc["checks"]:
            print("%s  %-22s %s" % ("PASS" if rep["passed"] else "FAIL",
                                    rep["check"], rep["instance"]))
        n = len(doc["checks"])
        bad = sum(not rep["passed"] for rep in doc["checks"])
        print("%d checks, %d failed" % (n, bad))


def _report(command: str, instance: str, args, started: float,
            **fields) -> dict:
    doc = {"schema": 1, "command": command, "instance": instance,
           "seed": getattr(args, "seed", None), "wall_time_ms": None}
    if getattr(args, "timings", False):
        doc["wall_time_ms"] = int((time.monotonic() - started) * 1000)
    doc.update(fields)
    return doc


def cmd_compute(args) -> int:
    started = time.monotonic()
    c, name = load_complex(args.complex, args.quiet)
    s = (load_system(args.system, c, args.quiet) if args.system
         else LocalSystem.trivial(c))
    tc = TwistedComplex(c, s)
    fields = {"betti": tc.betti_dims(),
              "f_vector": list(c.f_vector()),
              "euler_characteristic": c.euler_characteristic()}
    if args.representatives:
        fields["representatives"] = _reps_json(
            [tc.representatives(p) for p in range(c.dim + 1)])
    _emit(_report("compute", name, args, started, **fields), args)
    return 0


def cmd_relative(args) -> int:
    started = time.monotonic()
    c, name = load_complex(args.complex, args.quiet)
    z = load_subcomplex(args.subcomplex, c)
    s = (load_system(args.system, c, args.quiet) if args.system
         else LocalSystem.trivial(c))
    rc = RelativeComplex(c, z, s)
    _emit(_report("relative", name, args, started, betti=rc.betti_dims()),
          args)
    return 0


def cmd_verify(args) -> int:
    from . import checks
    started = time.monotonic()
    try:
        reports = checks.run_suite(args.suite, seed=args.seed)
    except KeyError:
        raise InputError("unknown suite %r; choose from %s"
                         % (args.suite, sorted(checks.SUITES) + ["all"]))
    doc = _report("verify", args.suite, args, started,
                  checks=[r.to_json_dict() for r in reports])
    _emit(doc, args)
    return 0 if all(r.passed for r in reports) else 1


def _maximal_simplices(c: Complex) -> list[list[int]]:
    out = []
    for p in range(c.dim, -1, -1):
        for s in c.n_simplices(p):
            if not any(set(s) < set(t) for t in out):
                out.append(s)
    return [list(s) for s in sorted(out)]


def cmd_models(args) -> int:
    if args.action == "list":
        defaults = {"simplex": (2,), "sphere": (2,), "circle": (3,),
                    "surface": (2,)}
        for name in sorted(models.CATALOG):
            inst = models.build(name, defaults.get(name, ()))
            print("%-20s f=%s  %s" % (name, inst.complex.f_vector(),
                                      models.CATALOG[name][1]))
        return 0
    # export
    try:
        inst = models.build(args.name, tuple(args.params))
    except models.UnknownModel:
        raise InputError("unknown model %r" % args.name)
    except models.BadParams as exc:
        raise InputError(str(exc))
    doc = {"name": args.name + ("" if not args.params else
                                "(%s)" % ",".join(map(str, args.params))),
           "vertex_count": inst.complex.vertex_count,
           "maximal_simplices": _maximal_simplices(inst.complex)}
    with open(args.path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not args.quiet:
        print("wrote %s" % args.path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="novikov",
        description="Twisted (Morse-Novikov) cohomology of finite "
                    "simplicial complexes over exact rationals.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit a schema-1 JSON report")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized checks")
    common.add_argument("--quiet", action="store_true",
                        help="suppress informational notes")
    common.add_argument("--timings", action="store_true",
                        help="include wall time in reports (breaks "
                             "byte-for-byte reproducibility)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("compute", parents=[common],
                       help="twisted Betti numbers of a complex file")
    p.add_argument("complex", help="ComplexFile JSON path")
    p.add_argument("--system", help="SystemFile JSON path (default trivial)")
    p.add_argument("--representatives", action="store_true",
                   help="include representative cocycles")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("relative", parents=[common],
                       help="relative twisted Betti numbers of a pair")
    p.add_argument("complex", help="ComplexFile JSON path")
    p.add_argument("--subcomplex", required=True,
                   help="selector JSON path {\"simplices\": [...]}")
    p.add_argument("--system", help="SystemFile JSON path (default trivial)")
    p.set_defaults(func=cmd_relative)

    p = sub.add_parser("verify", parents=[common],
                       help="run a verification suite")
    p.add_argument("suite", help="main-theorem | proj-bundle | gauge | les "
                                 "| coker-ladder | all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("models", parents=[common],
                       help="catalog listing and export")
    msub = p.add_subparsers(dest="action", required=True)
    pl = msub.add_parser("list", parents=[common])
    pl.set_defaults(func=cmd_models, action="list")
    pe = msub.add_parser("export", parents=[common])
    pe.add_argument("name")
    pe.add_argument("params", nargs="*", type=int)
    pe.add_argument("path")
    pe.set_defaults(func=cmd_models, action="export")
    return ap


def main(argv=None) -> int:
    # computations are single-threaded; a thread cap is always honored
    threads = os.environ.get("NOVIKOV_THREADS")
    if threads is not None and not threads.isdigit():
        print("warning: ignoring non-integer NOVIKOV_THREADS", file=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ValidationError, CocycleViolation, PathNotInComplex,
            NonpositiveGauge) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
