"""Command-line entry point: ``l2h <command> <file> [options]``.

Every command prints one JSON document (to stdout or ``--out``); short human
summaries go to stderr.  Exit codes: 0 success, 2 parse error, 3 hypothesis
violated, 4 inconclusive under --require-certified, 5 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import rounding
from .complexes import presentation_complex
from .construction import construct
from .errors import (
    BallTooLarge,
    HypothesisNotSatisfied,
    L2HError,
    NoCandidateSubset,
    PresentationSyntaxError,
    SupportCapExceeded,
    UnknownGenerator,
    DuplicateGenerator,
)
from .groups import descriptor_to_json, infer_descriptor
from .hopf import hopf_check, resolution_for
from .presentation import format_presentation, load_presentation
from .quotients import betti, induce, quotient_library
from .spectral import CERTIFIED, Budget, homology_vanishing_report

EXIT_PARSE = 2
EXIT_VIOLATED = 3
EXIT_INCONCLUSIVE = 4
EXIT_RESOURCE = 5


def corpus_path(name):
    return resources.files("l2h") / "corpus" / name


def resolve_input(path):
    """Use the path if it exists, else the bundled corpus file of the same name."""
    p = Path(path)
    if p.exists():
        return p
    fallback = corpus_path(p.name)
    if fallback.is_file():
        return Path(str(fallback))
    raise FileNotFoundError(path)


def parse_degrees(text):
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return v

    return conv


def build_parser():
    p = argparse.ArgumentParser(prog="l2h", description="l2-homology workbench for presented groups")
    p.add_argument("command", choices=["parse", "complex", "certify", "betti", "hopf", "construct"])
    p.add_argument("file")
    p.add_argument("--degrees", default=None, help="a..b or a,b,c")
    p.add_argument("--max-power", type=_positive(int), default=256)
    p.add_argument("--max-radius", type=_positive(int), default=300)
    p.add_argument("--truncation-size", type=_positive(int), default=20000)
    p.add_argument("--quotients", type=_positive(int), default=4, help="quotient budget")
    p.add_argument("--quotient-index", type=int, default=0, help="which library quotient hopf uses")
    p.add_argument("--epsilon-zero", type=Fraction, default=Fraction(1, 100))
    p.add_argument("--method", choices=["auto", "l1", "rd", "subadditive"], default="auto")
    p.add_argument("--ds", default="auto", help="number of wedged 2-spheres for construct")
    p.add_argument("--radius", type=int, default=None, help="kernel search support radius")
    p.add_argument("--force", action="store_true", help="construct even if the hypothesis fails")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--require-certified", action="store_true")
    p.add_argument("--timing", action="store_true", help="record wall-clock times (breaks byte-identical output)")
    return p


def _budget(args):
    return Budget(
        max_power=args.max_power,
        max_radius=args.max_radius,
        truncation_size=args.truncation_size,
        epsilon_zero=args.epsilon_zero,
        timing=args.timing,
    )


def _header(args, P, g):
    return {
        "command": args.command,
        "input": Path(args.file).name,
        "presentation": format_presentation(P),
        "group": descriptor_to_json(g),
        "seed": args.seed,
    }


def cmd_parse(args, P, g):
    return {"generators": list(P.generators), "relators": [P.format_word(r) for r in P.relators]}, 0


def cmd_complex(args, P, g):
    C = presentation_complex(P, g)
    return {"complex": C.to_json(), "euler_characteristic": C.euler_characteristic()}, 0


def cmd_certify(args, P, g):
    C = presentation_complex(P, g)
    degrees = parse_degrees(args.degrees) if args.degrees else list(range(C.dimension + 1))
    certs = homology_vanishing_report(C, degrees, _budget(args), args.method)
    for c in certs:
        print(f"degree {c.degree}: {c.status}" + (f", gap >= {float(c.gap_lower):.6g}" if c.gap_lower is not None else ""),
              file=sys.stderr)
    code = 0
    if args.require_certified and any(c.status != CERTIFIED for c in certs):
        code = EXIT_INCONCLUSIVE
    return {"method": args.method, "budget": _budget(args).to_json(), "certificates": [c.to_json() for c in certs]}, code


def cmd_betti(args, P, g):
    C = presentation_complex(P, g)
    lib = quotient_library(g, args.quotients, args.seed)
    rows = []
    for q in lib:
        F = induce(C, q, "regular")
        b = [betti(F, k) for k in range(C.dimension + 1)]
        rows.append({
            "quotient": q.to_json(),
            "betti": b,
            "estimates": [rounding.to_json(Fraction(x, q.order)) for x in b],
        })
        print(f"{q.label:>12} |Q|={q.order:<6} " + " ".join(f"{x / q.order:.4f}" for x in b), file=sys.stderr)
    return {"module": "regular", "table": rows}, 0


def cmd_hopf(args, P, g):
    lib = quotient_library(g, args.quotients, args.seed)
    q = lib[min(args.quotient_index, len(lib) - 1)]
    res = resolution_for(g)
    report = hopf_check(P, g, q, res, kind="regular")
    print(f"dim H2(Z;V)={report['dim_H2_Z']} image={report['dim_image']} H2(G;V)={report['dim_H2_G']} "
          f"-> {report['status']}", file=sys.stderr)
    return {"quotient": q.to_json(), "module": "regular", "resolution": res.to_json(), "report": report}, 0


def cmd_construct(args, P, g):
    ds = args.ds if args.ds == "auto" else int(args.ds)
    try:
        rec = construct(P, g, _budget(args), args.method, ds, args.radius, args.force, args.quotients,
                        timing=args.timing, seed=args.seed)
    except HypothesisNotSatisfied as e:
        print(f"hypothesis not satisfied: {e}", file=sys.stderr)
        rep = e.report.to_json() if e.report is not None else None
        return {"error": "HypothesisNotSatisfied", "message": str(e), "hypothesis": rep}, EXIT_VIOLATED
    except NoCandidateSubset as e:
        print(f"no candidate subset: {e}", file=sys.stderr)
        return {"error": "NoCandidateSubset", "message": str(e), "diagnostics": _jsonable(e.diagnostics)}, EXIT_VIOLATED
    out = rec.to_json()
    code = 0
    grades = out["verification"]["grades"]
    for gr in grades:
        print(f"degree {gr['degree']}: {gr['grade']}", file=sys.stderr)
    if args.require_certified and any(gr["grade"] != "certified" for gr in grades):
        code = EXIT_INCONCLUSIVE
    return {"record": out}, code


def _jsonable(x):
    return json.loads(json.dumps(x, default=str))


COMMANDS = {
    "parse": cmd_parse,
    "complex": cmd_complex,
    "certify": cmd_certify,
    "betti": cmd_betti,
    "hopf": cmd_hopf,
    "construct": cmd_construct,
}


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".l2h-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        path = resolve_input(args.file)
        P = load_presentation(path)
        g = infer_descriptor(P)
    except FileNotFoundError as e:
        print(f"no such file: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (PresentationSyntaxError, UnknownGenerator, DuplicateGenerator) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except L2HError as e:
        print(f"unsupported input: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        body, code = COMMANDS[args.command](args, P, g)
    except (SupportCapExceeded, BallTooLarge) as e:
        print(f"resource cap: {e}", file=sys.stderr)
        body, code = {"error": type(e).__name__, "message": str(e)}, EXIT_RESOURCE
    doc = _header(args, P, g)
    doc.update(body)
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
