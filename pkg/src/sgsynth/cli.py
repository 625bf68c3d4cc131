"""Command-line front end: synth, eval, normalize, match.

A project directory holds signature.json, valuation.json and
schedule.json; synthesis artifacts are written to <project>/out/.
Exit codes: 0 success, 2 parse/validation error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import formats
from .errors import (
    DimensionOverflow,
    NormalizationError,
    ParseError,
    SgsynthError,
    ValidationError,
)
from .graph import normalize_wires
from .rewrite import RewriteSystem, find_matchings, normalize_traced
from .signature import Signature, Valuation, parse_signature, parse_valuation
from .synth import SynthesisParams, run_synthesis
from .tensor import evaluate


@dataclass
class ProjectBundle:
    root: Path
    sig: Signature
    val: Valuation
    schedule: Optional[list[SynthesisParams]]

    @property
    def out_dir(self) -> Path:
        return self.root / "out"


def load_project(root: str, schedule_path: Optional[str] = None) -> ProjectBundle:
    rootp = Path(root)
    sig_file = rootp / "signature.json"
    val_file = rootp / "valuation.json"
    if not sig_file.is_file():
        raise ParseError(f"missing {sig_file}")
    if not val_file.is_file():
        raise ParseError(f"missing {val_file}")
    sig = parse_signature(sig_file.read_text())
    val = parse_valuation(val_file.read_text(), sig)
    sched_file = Path(schedule_path) if schedule_path else rootp / "schedule.json"
    schedule = None
    if sched_file.is_file():
        schedule = formats.parse_schedule(sched_file.read_text())
    elif schedule_path:
        raise ParseError(f"missing schedule file {sched_file}")
    return ProjectBundle(rootp, sig, val, schedule)


def cmd_synth(args) -> int:
    bundle = load_project(args.project, args.schedule)
    if not bundle.schedule:
        raise ParseError("no schedule.json in the project and no --schedule given")
    result = run_synthesis(
        bundle.schedule, RewriteSystem(), bundle.sig, bundle.val,
        compare=args.compare, workers=args.workers, tol=args.tolerance)
    out = bundle.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "ruleset.json").write_text(
        formats.print_ruleset(result.system, result.provenance))
    (out / "runs.csv").write_text(formats.runs_csv(result.reports))
    provenance = {
        "tolerance": args.tolerance,
        "compare": bool(args.compare),
        "schedule": json.loads(formats.print_schedule(bundle.schedule)),
        "rules": {name: run for name, run in sorted(result.provenance.items())},
    }
    (out / "provenance.json").write_text(
        json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    total = len(result.system.rules)
    for i, rep in enumerate(result.reports):
        print(f"run {i} {rep.params.as_tuple()}: enumerated={rep.enumerated} "
              f"classes={rep.classes} rules={rep.reductions + rep.congruences}"
              + (f" naive={rep.naive_rules}" if rep.naive_rules is not None else ""),
              file=sys.stderr)
    naive_total = (len(result.naive_system.rules)
                   if result.naive_system is not None else None)
    print(f"total rules: {total}"
          + (f" (naive: {naive_total})" if naive_total is not None else ""))
    return 0


def cmd_eval(args) -> int:
    bundle = load_project(args.project)
    g = formats.parse_graph(Path(args.graph).read_text(), bundle.sig)
    t = evaluate(g, bundle.val)
    print(json.dumps(formats.tensor_to_doc(t), indent=2, sort_keys=True))
    return 0


def cmd_normalize(args) -> int:
    bundle = load_project(args.project)
    g = formats.parse_graph(Path(args.graph).read_text(), bundle.sig)
    if args.wires_only:
        result, trace = normalize_wires(g), []
    else:
        if not args.ruleset:
            raise ParseError("normalize needs a ruleset file unless --wires-only")
        system = formats.parse_ruleset(
            Path(args.ruleset).read_text(), bundle.sig)
        result, trace = normalize_traced(system, g)
    doc = {
        "graph": formats.graph_to_doc(result),
        "trace": [{"rule": s.rule_name, "site": s.site_digest,
                   "scalar": [s.scalar.real, s.scalar.imag]} for s in trace],
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_match(args) -> int:
    bundle = load_project(args.project)
    pattern = formats.parse_graph(Path(args.pattern).read_text(), bundle.sig)
    host = formats.parse_graph(Path(args.host).read_text(), bundle.sig)
    ms = find_matchings(pattern, host)
    doc = {
        "count": len(ms),
        "matchings": [
            {"vertex_map": {str(p): h for p, h in sorted(m.vertex_map.items())},
             "claims": [[p, h, kind] for p, h, kind in m.claims]}
            for m in ms],
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sgsynth",
        description="String-graph rewriting and rewrite-system synthesis")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--project", required=True,
                       help="project directory with signature/valuation files")

    p = sub.add_parser("synth", help="synthesize a rewrite system")
    add_common(p)
    p.add_argument("--schedule", help="override the project schedule file")
    p.add_argument("--compare", action="store_true",
                   help="also run the naive pipeline and record its counts")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("eval", help="evaluate a graph as a tensor")
    add_common(p)
    p.add_argument("graph")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("normalize", help="normalize a graph under a ruleset")
    add_common(p)
    p.add_argument("graph")
    p.add_argument("ruleset", nargs="?")
    p.add_argument("--wires-only", action="store_true",
                   help="only contract wires (no ruleset needed)")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("match", help="list matchings of a pattern on a host")
    add_common(p)
    p.add_argument("pattern")
    p.add_argument("host")
    p.set_defaults(fn=cmd_match)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DimensionOverflow, NormalizationError, SgsynthError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
