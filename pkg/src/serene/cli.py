"""Command-line interface: ``serene <command> ...``.

Exit codes: 0 on success, 1 when the input is well formed but violates a
mathematical precondition, 2 for usage and file errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import complex as cx
from . import constructions, fixtures, freecomplete, geometry, latincomplete, ncgraph, qcore, topology
from .serialize import complex_from_json, complex_to_json, dump_json, load_json, table_from_json, table_to_json, write_atomic


class UsageError(Exception):
    pass


DOMAIN_ERRORS = (
    qcore.StructureError,
    qcore.PreconditionError,
    geometry.DomainError,
    topology.ClassificationError,
    freecomplete.CapExceeded,
    freecomplete.InvariantViolation,
    ncgraph.EmbeddingError,
)


def _read_json(path: str):
    try:
        return load_json(path)
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _example(name: str) -> qcore.OperationTable:
    try:
        return constructions.builtin(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _load_table(args) -> qcore.OperationTable:
    if getattr(args, "example", None):
        return _example(args.example)
    if not args.input:
        raise UsageError("give a table file or --example NAME")
    return table_from_json(_read_json(args.input))


def _load_complex(args):
    if getattr(args, "fixture", None):
        try:
            return fixtures.fixture(args.fixture)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if getattr(args, "example", None):
        return cx.simplicize(_example(args.example))
    if not args.input:
        raise UsageError("give a complex file, --fixture NAME or --example NAME")
    return complex_from_json(_read_json(args.input))


def _table_summary(t: qcore.OperationTable) -> dict:
    cert = t.cert
    doc = {
        "arity": t.arity,
        "order": t.order,
        "latin": cert.latin,
        "alternating": cert.alternating,
        "permutomorphism_group_size": cert.permutomorphism_group_size,
        "group_size_exact": cert.group_size_exact,
        "commutative": qcore.is_commutative(t),
    }
    if cert.latin and cert.alternating:
        doc["nct_count"] = len(qcore.nct(t))
        doc["inp"] = [t.label(x) for x in sorted(qcore.inp(t))]
        doc["out"] = [t.label(x) for x in sorted(qcore.out(t))]
    if t.order ** (2 * t.arity - 1) <= qcore.EXHAUSTIVE_ASSOC_LIMIT:
        doc["nary_associative"] = qcore.is_nary_associative(t).holds
    return doc


def _facet_rows(t: qcore.OperationTable) -> str:
    rows = cx.facet_table(t)
    lines = []
    head = "tuple"
    cells = []
    for rep, verts in rows:
        left = "(" + ",".join(t.label(x) for x in rep) + ")"
        right = "{" + ", ".join(v.display() for v in verts) + "}"
        cells.append((left, right))
    width = max([len(head)] + [len(a) for a, _ in cells])
    lines.append(f"{head:<{width}} | facet")
    lines.append("-" * width + "-+-" + "-" * max((len(b) for _, b in cells), default=5))
    lines.extend(f"{a:<{width}} | {b}" for a, b in cells)
    lines.append(f"{len(cells)} facets")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> tuple[object, str | None]:
    t = _load_table(args)
    doc = _table_summary(t)
    text = "\n".join(f"{k}: {v}" for k, v in doc.items()) + "\n"
    return doc, text


def cmd_example(args):
    if args.list or not args.name:
        names = constructions.builtin_names()
        return {"examples": names, "fixtures": fixtures.fixture_names()}, "\n".join(names) + "\n"
    t = _example(args.name)
    doc = table_to_json(t)
    return doc, dump_json(doc)


def cmd_simplicize(args):
    t = _load_table(args)
    c = cx.simplicize(t)
    oriented = cx.natural_orientation(t, c)
    doc = complex_to_json(oriented)
    doc["coherent"] = oriented.is_coherent()
    return doc, _facet_rows(t)


def cmd_ncgraph(args):
    t = _load_table(args)
    g = ncgraph.nc_graph(t)
    if args.dot:
        text = ncgraph.to_dot(g, t)
        return None, text
    report = ncgraph.graph_report(g)
    doc = {"graph": ncgraph.to_json(g, t), "report": report.to_json()}
    if args.johnson:
        emb = ncgraph.johnson_embedding(t)
        doc["johnson"] = {
            "ground_set": len(cx.simplicize(t).vertices) if emb else 0,
            "subsets": [sorted(emb[a]) for a in g.vertex_labels],
        }
    lines = [f"{len(g)} vertices, {len(g.edges)} edges"]
    lines += [f"{k}: {v}" for k, v in report.to_json().items() if k != "degrees"]
    return doc, "\n".join(lines) + "\n"


def cmd_invariants(args):
    c = _load_complex(args)
    base = c.base if isinstance(c, cx.OrientedComplex) else c
    report = topology.serenation_report(base)
    doc = report.to_json(base)
    if base.dim == 2:
        genera = []
        for s in report.components:
            try:
                genera.append(topology.surface_genus(s))
            except topology.ClassificationError:
                genera.append(None)
        doc["genus"] = genera
    lines = [f"{len(report.components)} component(s)"]
    for k, s in enumerate(report.components):
        non = [base.vertices[v].display() for v, flag in s.link_flags.items() if flag != topology.SPHERE_LIKE]
        lines.append(
            f"[{k}] facets={len(s.facets)} chi={s.euler_characteristic} betti={list(s.z2_betti)} "
            f"orientable={s.orientable} non_sphere_like={non}"
        )
    return doc, "\n".join(lines) + "\n"


def _parse_tuple(t: qcore.OperationTable, text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if t.labels and part in t.labels:
            out.append(t.element(part))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise UsageError(f"unknown element {part!r}") from None
    return tuple(out)


def _parse_point(text: str, exact: bool):
    try:
        return [Fraction(s.strip()) if exact else float(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse coordinates {text!r}") from None


def cmd_chart(args):
    t = _load_table(args)
    a = _parse_tuple(t, args.tuple)
    u = _parse_point(args.u, args.exact)
    chart = geometry.chart_input if args.type == "in" else geometry.chart_output
    point = chart(t, a, u)
    doc = {"tuple": [t.label(x) for x in a], "type": args.type, "u": [str(x) for x in u], "coefficients": point.to_json()}
    text = "\n".join(f"{k}: {v}" for k, v in point.to_json().items()) + "\n"
    return doc, text


def cmd_complete_free(args):
    c = _load_complex(args)
    state = freecomplete.seed(c)
    gamma = state.gamma
    levels = [dict(state.counts(), check=freecomplete.check_state(state))]
    truncated = None
    for _ in range(args.levels):
        try:
            nxt = freecomplete.step(state, cap=args.cap)
        except freecomplete.CapExceeded as exc:
            truncated = {"level": exc.level, "estimate": exc.estimate, "cap": exc.cap}
            break
        eqs = freecomplete.check_equations(nxt, state.level)
        state = nxt
        levels.append(dict(state.counts(), check={"equations_solved_once": eqs}))
    spot = freecomplete.sample_later_levels(state, samples=args.samples, seed_value=args.seed or 0)
    report = freecomplete.verify_serene(gamma, state)
    doc = {
        "arity": state.arity,
        "level0": {"elements": len(state.levels[0]), "defined_tuples": len(state.level0)},
        "levels": levels,
        "truncated": truncated,
        "spot_checks": spot,
        "next_level_estimate": freecomplete.level_size_estimate(state),
        "serene": report.to_json(),
    }
    lines = [f"level {lv['level']}: {lv['elements']} elements, {lv['defined_orbits']} defined orbits" for lv in levels]
    if truncated:
        lines.append(f"stopped before level {truncated['level']}: {truncated['estimate']} elements exceed cap {truncated['cap']}")
    lines.append(f"subdivision: {report.facets} facets on {report.vertices} vertices, ok={report.ok}")
    return doc, "\n".join(lines) + "\n"


def cmd_complete_latin(args):
    p = latincomplete.partial_from_json(_read_json(args.input))
    result = latincomplete.complete(p, max_order=args.max_order, budget=args.budget, seed=args.seed)
    if result:
        doc = {"found": True, "order": result.order, "nodes": {str(k): v for k, v in result.nodes.items()}, "table": table_to_json(result.table)}
        text = f"completed at order {result.order}\n"
    else:
        doc = {
            "found": False,
            "nodes": {str(k): v for k, v in result.nodes.items()},
            "exhausted": {str(k): v for k, v in result.exhausted.items()},
            "reason": result.reason,
        }
        text = f"no completion found ({result.reason})\n"
    return doc, text


def cmd_probe(args):
    c = _load_complex(args)
    result = latincomplete.quasifinite_probe(c, max_order=args.max_order, budget=args.budget, seed=args.seed)
    doc = result.to_json()
    if result.found:
        text = f"found order {doc['order']}; matching component {doc['matched_component']}\n"
    else:
        text = f"not found ({doc['reason']})\n"
    return doc, text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="serene", description="Alternating quasigroups, their simplicial complexes and completions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def table_cmd(name, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", nargs="?", help="table JSON file")
        p.add_argument("--example", help="bundled table name")
        return p

    def complex_cmd(name, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", nargs="?", help="complex JSON file")
        p.add_argument("--fixture", help="bundled complex name")
        p.add_argument("--example", help="use the simplicization of a bundled table")
        return p

    p = table_cmd("validate", "certify the Latin and alternating properties")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("example", parents=[common], help="emit a bundled table")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_example)

    p = table_cmd("simplicize", "facets of the simplicization")
    p.set_defaults(func=cmd_simplicize)

    p = table_cmd("ncgraph", "noncommuting graph and its structure")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    p.add_argument("--johnson", action="store_true", help="include the Johnson-graph embedding")
    p.set_defaults(func=cmd_ncgraph)

    p = complex_cmd("invariants", "components, homology and link flags")
    p.set_defaults(func=cmd_invariants)

    p = table_cmd("chart", "evaluate a bipyramid chart")
    p.add_argument("--table", dest="input_flag", help="table JSON file")
    p.add_argument("--tuple", required=True, help="comma separated elements")
    p.add_argument("--type", choices=("in", "out"), default="in")
    p.add_argument("--u", required=True, help="comma separated coordinates")
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.set_defaults(func=cmd_chart)

    p = complex_cmd("complete-free", "free completion of an oriented triangulation")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--cap", type=int, default=freecomplete.DEFAULT_CAP)
    p.add_argument("--samples", type=int, default=500, help="spot checks beyond the last level")
    p.set_defaults(func=cmd_complete_free)

    p = sub.add_parser("complete-latin", parents=[common], help="complete a partial alternating Latin cube")
    p.add_argument("input", help="partial cube JSON file")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--budget", type=int, default=latincomplete.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_complete_latin)

    p = complex_cmd("probe", "look for a finite quasigroup realizing a triangulation")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--budget", type=int, default=latincomplete.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "input_flag", None):
        args.input = args.input_flag
    try:
        doc, text = args.func(args)
    except UsageError as exc:
        print(f"serene {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"serene {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if doc is None or args.format == "text":
        output = text
    else:
        output = dump_json(doc)
    if args.out:
        try:
            write_atomic(args.out, output)
        except OSError as exc:
            print(f"serene: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
