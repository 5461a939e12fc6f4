"""Command line interface: ``irrquiver analyze|readings|reflect|dot|verify``.

Exit codes: 0 ok, 2 parse error, 3 semantic error, 4 resource bound,
5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import warnings
from typing import Any, Sequence

from .exact import CQ, format_scalar
from .existence import ExistenceVerdict, exists_stable_connection, has_stable
from .graph_core import GraphError, to_dot
from .ij_calculus import IJData, IJError, enumerate_readings
from .quiver_rep import RepError
from .root_system import (
    ResourceLimitError,
    RootError,
    apply_weyl_word,
    classify_root,
    delta,
    pairing,
)
from .specfile import Spec, SpecError, SpecParseError, load_spec
from .verify import run_verification

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_RESOURCE, EXIT_VERIFY = 0, 2, 3, 4, 5

log = logging.getLogger("irrquiver")


def _s(x) -> str:
    return format_scalar(CQ.coerce(x))


def _vec(spec: Spec, v) -> dict[str, Any]:
    return {n: v[n] for n in spec.quiver.nodes}


def _params(spec: Spec, lam) -> dict[str, str]:
    return {n: _s(lam[n]) for n in spec.quiver.nodes}


def _graph_report(spec: Spec) -> dict:
    g = spec.graph
    return {
        "nodes": list(g.nodes),
        "edges": [[u, v, m] for u, v, m in g.edges()],
        "parts": spec.parts,
    }


def _verdict_report(v: ExistenceVerdict) -> dict:
    return {
        "nonempty": v.nonempty,
        "nonempty_witness": v.nonempty_witness,
        "stable": v.stable,
        "violation": v.violation,
        "reason": v.reason,
    }


def _readings(spec: Spec) -> list[dict]:
    if spec.parts is None:
        raise SpecError("readings need a centre partition ('parts' or the connection form)")
    return [r.as_dict() for r in enumerate_readings(IJData.from_parts(spec.parts), spec.centre_dims)]


def _analysis(spec: Spec, dims, lam) -> dict:
    g = spec.graph
    cls = classify_root(g, dims)
    out = {
        "dims": _vec(spec, dims),
        "params": _params(spec, lam),
        "lambda_dot_d": _s(pairing(dims, lam)),
        "root": {"kind": cls.kind.value, "witness": list(cls.witness)},
        "delta": delta(g, dims),
    }
    return out


def cmd_analyze(spec: Spec) -> dict:
    report: dict[str, Any] = {"name": spec.name, "kind": spec.kind, "graph": _graph_report(spec)}
    report.update(_analysis(spec, spec.dims, spec.params))
    report["readings"] = _readings(spec) if spec.parts is not None else []
    if spec.connection is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            verdict = exists_stable_connection(spec.connection)
        report["warnings"] = verdict.warnings
    else:
        verdict = has_stable(spec.graph, spec.dims, spec.params)
        report["warnings"] = []
    report["existence"] = _verdict_report(verdict)
    report["notes"] = spec.notes
    return report


def cmd_readings(spec: Spec) -> dict:
    return {"name": spec.name, "readings": _readings(spec)}


def parse_word(text: str) -> list[str]:
    return [w for w in re.split(r"[\s,]+", text.strip()) if w]


def cmd_reflect(spec: Spec, word: Sequence[str]) -> dict:
    for i in word:
        if i not in spec.quiver.nodes:
            raise SpecError(f"word mentions unknown node {i!r}")
    act = apply_weyl_word(spec.graph, word, spec.dims, spec.params)
    out: dict[str, Any] = {"name": spec.name, "word": list(word)}
    out.update(_analysis(spec, act.dims, act.params))
    out["negative_coordinates"] = any(v < 0 for v in act.dims.values())
    out["degenerate_steps"] = act.degenerate_steps
    return out


def cmd_dot(spec: Spec) -> str:
    attrs: dict[str, dict[str, str]] = {}
    centre = set()
    for k, part in enumerate(spec.parts or []):
        for n in part:
            attrs[n] = {"group": f"part{k + 1}"}
            centre.add(n)
    if spec.parts is not None:
        for n in spec.quiver.nodes:
            if n not in centre:
                attrs[n] = {"shape": "box"}
    name = re.sub(r"\W", "_", spec.name) or "G"
    if not re.match(r"[A-Za-z_]", name):
        name = "G_" + name
    return to_dot(spec.quiver, name, attrs)


def cmd_verify(spec: Spec, seed: int, trials: int) -> dict:
    checks = run_verification(spec, seed, trials)
    return {"name": spec.name, "seed": seed, "trials": trials,
            "passed": all(c.passed for c in checks),
            "checks": [c.as_dict() for c in checks]}


# text rendering ------------------------------------------------------------

def _fmt_vec(v: dict) -> str:
    return "(" + ", ".join(f"{k}: {x}" for k, x in v.items()) + ")"


def _render_readings(rows: list[dict]) -> list[str]:
    lines = [f"{'removed':>8}  {'rank':>5}  {'poles':<14} {'simple':>6}"]
    for r in rows:
        removed = "-" if r["removed_part"] is None else str(r["removed_part"])
        poles = "+".join(str(o) for o in r["pole_orders"])
        lines.append(f"{removed:>8}  {r['bundle_rank']:>5}  {poles:<14} {r['simple_poles']:>6}")
    return lines


def render_text(command: str, report: dict) -> str:
    lines: list[str] = []
    if command == "readings":
        lines += _render_readings(report["readings"])
    elif command == "verify":
        for c in report["checks"]:
            res = "" if c["residual"] is None else f"  residual={c['residual']:.3e}"
            lines.append(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}{res}")
        lines.append(f"{len(report['checks'])} checks, {'all passed' if report['passed'] else 'FAILURES'}")
    else:
        if command == "reflect":
            lines.append(f"word: {' '.join(report['word']) or '(empty)'}")
        else:
            g = report["graph"]
            lines.append(f"graph: {len(g['nodes'])} nodes, {sum(e[2] for e in g['edges'])} edges")
        lines.append(f"dims: {_fmt_vec(report['dims'])}")
        lines.append(f"params: {_fmt_vec(report['params'])}")
        lines.append(f"lambda.d: {report['lambda_dot_d']}")
        lines.append(f"root: {report['root']['kind']}")
        lines.append(f"Delta: {report['delta']}")
        if command == "reflect" and report["degenerate_steps"]:
            lines.append("lambda_i = 0 at reflected nodes: " + " ".join(report["degenerate_steps"]))
        if command == "analyze":
            if report["readings"]:
                lines.append("readings:")
                lines += ["  " + s for s in _render_readings(report["readings"])]
            ex = report["existence"]
            lines.append(f"nonempty: {ex['nonempty']}")
            lines.append(f"stable exists: {ex['stable']}")
            lines.append(f"reason: {ex['reason']}")
            if ex["violation"]:
                lines.append("violating decomposition: " + " + ".join(_fmt_vec(b) for b in ex["violation"]))
            for w in report["warnings"]:
                lines.append(f"warning: {w}")
            for n in report["notes"]:
                lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


# entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irrquiver", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", required=True, help="path to a JSON spec file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--out", help="write output to this file instead of stdout")

    common(sub.add_parser("analyze", help="quiver data, root type, Delta, readings and existence"))
    common(sub.add_parser("readings", help="table of the readings of the centre graph"))
    sp = sub.add_parser("reflect", help="apply a Weyl word to (d, lambda)")
    common(sp)
    sp.add_argument("--word", default="", help='node ids, rightmost applied first, e.g. "1 2 3"')
    common(sub.add_parser("dot", help="DOT text of the quiver"))
    sp = sub.add_parser("verify", help="run the randomized invariant suites")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=5)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        if args.command == "dot":
            _emit(cmd_dot(spec), args.out)
            return EXIT_OK
        if args.command == "analyze":
            report = cmd_analyze(spec)
        elif args.command == "readings":
            report = cmd_readings(spec)
        elif args.command == "reflect":
            report = cmd_reflect(spec, parse_word(args.word))
        else:
            report = cmd_verify(spec, args.seed, args.trials)
        text = json.dumps(report, indent=2) + "\n" if args.json else render_text(args.command, report)
        _emit(text, args.out)
        if args.command == "verify" and not report["passed"]:
            return EXIT_VERIFY
        return EXIT_OK
    except (SpecParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as err:
        print(f"error: resource bound exceeded: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SpecError, RootError, GraphError, IJError, RepError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
