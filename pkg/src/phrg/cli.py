"""Command line front end: ``phrg <verb> ...``.

Exit codes: 0 success (or "yes"), 1 a definite "no" (empty language,
non-member), 2 usage or validation errors, 3 unsupported input shapes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import io, strings, transform
from .automata import DFA
from .decide import EMPTY_LABEL, emptiness, intersect_regular, membership
from .errors import PhrgError, UnsupportedShape
from .grammar import PHRGrammar, derive, enumerate_language, validate
from .hypergraph import Hypergraph, str_of

log = logging.getLogger("phrg")

EXIT_OK, EXIT_NO, EXIT_ERROR, EXIT_SHAPE = 0, 1, 2, 3

TRANSFORMS = ["properize", "unreachable", "tables2", "nocontrol", "sync", "embed-hr", "import-hr", "subst", "iter-subst"]
STRINGOPS = ["union", "concat", "plus", "hom", "weak", "inverse", "free-product"]


class UsageError(PhrgError):
    pass


def _out(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


def _grammar(path: str) -> PHRGrammar:
    obj = io.read(path)
    if isinstance(obj, transform.HRGrammar):
        return transform.import_hr(obj)
    if isinstance(obj, strings.ET0LGrammar):
        return strings.import_et0l(obj)
    if not isinstance(obj, PHRGrammar):
        raise UsageError(f"{path} does not hold a grammar")
    return obj


def _word(g: PHRGrammar, text: str, sep: str | None) -> tuple[str, ...]:
    if sep:
        return tuple(x for x in text.split(sep) if x)
    letters = [a for a in g.terminals if g.signature.type_of(a) == 2]
    return io.split_word(text, letters)


def _graphs_out(graphs: Sequence[Hypergraph], fmt: str, extra: dict | None = None) -> str:
    if fmt == "dot":
        return "".join(io.hypergraph_to_dot(h, f"H{i}") for i, h in enumerate(graphs))
    if fmt == "text":
        return "".join(f"{h!r}\n" for h in graphs)
    doc = {"schema": io.SCHEMA, "kind": "graphs", "graphs": [io.hypergraph_to_json(h) for h in graphs]}
    doc.update(extra or {})
    return _dump(doc)


def _warn_truncated(r) -> None:
    if r.truncated:
        why = []
        if not r.saturated:
            why.append("step bound reached")
        if r.edge_pruned:
            why.append("edge bound pruned derivations")
        if r.result_limited:
            why.append("result limit reached")
        print(f"warning: enumeration truncated ({', '.join(why)})", file=sys.stderr)


# verbs -----------------------------------------------------------------------


def cmd_validate(a) -> int:
    g = io.read(a.grammar)
    if not isinstance(g, PHRGrammar):
        raise UsageError("validate expects a PHR grammar")
    rep = validate(g, "repair" if a.repair else "strict")
    doc = rep.to_json()
    _out(_dump(doc), a.output)
    return EXIT_OK if rep.ok else EXIT_ERROR


def cmd_derive(a) -> int:
    g = _grammar(a.grammar)
    h = io.read(a.start) if a.start else g.start_graph()
    trace = [int(x) for x in a.trace.split(",") if x.strip()] if a.trace else []
    res = derive(h, trace, g, a.max_edges)
    _out(_graphs_out(res, a.format, {"trace": trace}), a.output)
    return EXIT_OK


def cmd_enumerate(a) -> int:
    g = _grammar(a.grammar)
    r = enumerate_language(g, a.max_steps, a.max_edges, a.max_results)
    _warn_truncated(r)
    if a.strings:
        words = sorted({w for h in r.graphs if (w := str_of(h, EMPTY_LABEL))}, key=lambda w: (len(w), w))
        words = [w for w in words if len(w) <= a.max_len]
        if a.format == "json":
            _out(_dump({"schema": io.SCHEMA, "kind": "words", "words": [list(w) for w in words],
                        "truncated": r.truncated}), a.output)
        else:
            _out("".join(" ".join(w) + "\n" for w in words), a.output)
        return EXIT_OK
    _out(_graphs_out(r.graphs, a.format, {"truncated": r.truncated, "steps": r.steps}), a.output)
    return EXIT_OK


def cmd_empty(a) -> int:
    g = _grammar(a.grammar)
    e = emptiness(g)
    print("empty" if e.empty else "nonempty")
    if a.explain:
        for line in e.explain():
            print("  " + line)
    return EXIT_NO if e.empty else EXIT_OK


def cmd_member(a) -> int:
    g = _grammar(a.grammar)
    w = _word(g, a.word, a.sep)
    ok, note, e = membership(g, w)
    print("member" if ok else "not a member")
    if a.explain:
        print("  " + note)
        if e is not None:
            for line in e.explain():
                print("  " + line)
    return EXIT_OK if ok else EXIT_NO


def _image(path: str):
    doc = io.load(path)
    if isinstance(doc, list):
        return [io.hypergraph_from_json(d, f"{path}[{i}]") for i, d in enumerate(doc)]
    obj = io.from_json(doc)
    if isinstance(obj, Hypergraph):
        return [obj]
    if isinstance(obj, transform.HRGrammar):
        return transform.import_hr(obj)
    if isinstance(obj, strings.ET0LGrammar):
        return strings.import_et0l(obj)
    return obj


def _mapping(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        for part in item.split(","):
            if "=" not in part:
                raise UsageError(f"expected LABEL=FILE, got {part!r}")
            k, v = part.split("=", 1)
            out[k] = _image(v)
    return out


def cmd_transform(a) -> int:
    if a.name == "import-hr":
        hr = io.read(a.grammar)
        if not isinstance(hr, transform.HRGrammar):
            raise UsageError("import-hr expects an HR grammar")
        res = transform.import_hr(hr)
    else:
        g = _grammar(a.grammar)
        if a.name == "properize":
            res = transform.properize(g)
        elif a.name == "unreachable":
            res = transform.eliminate_unreachable(g)
        elif a.name == "tables2":
            res = transform.reduce_tables_to_two(g)
        elif a.name == "nocontrol":
            res = transform.remove_control(g)
        elif a.name == "sync":
            res = transform.synchronise(g)
        elif a.name == "embed-hr":
            res = transform.embed_hr(g)
        elif a.name == "subst":
            s = _mapping(a.map)
            if all(isinstance(v, list) for v in s.values()):
                res = transform.substitute_finite(g, s)
            else:
                res = transform.substitute_grammars(g, s)
        else:
            rounds = [_mapping([r]) for r in a.round] or [_mapping(a.map)]
            res = transform.iterate_substitutions(g, rounds)
    _out(io.dumps(res), a.output)
    return EXIT_OK


def cmd_intersect(a) -> int:
    g = _grammar(a.grammar)
    m = io.read(a.dfa)
    if not isinstance(m, DFA):
        raise UsageError(f"{a.dfa} does not hold an automaton")
    res = intersect_regular(g, m)
    for note in res.meta.get("notes", []):
        print(f"notice: {note}", file=sys.stderr)
    _out(io.dumps(res), a.output)
    return EXIT_OK


def cmd_import(a) -> int:
    obj = io.read(a.input)
    if a.source == "et0l":
        if not isinstance(obj, strings.ET0LGrammar):
            raise UsageError("expected an ET0L grammar")
        res = strings.import_et0l(obj)
    else:
        if not isinstance(obj, transform.HRGrammar):
            raise UsageError("expected an HR grammar")
        res = transform.import_hr(obj)
    _out(io.dumps(res), a.output)
    return EXIT_OK


def cmd_export(a) -> int:
    g = _grammar(a.grammar)
    res = strings.export_et0l(g) if a.target == "et0l" else transform.embed_hr(g)
    _out(io.dumps(res), a.output)
    return EXIT_OK


def _letter_map(items: Sequence[str], g: PHRGrammar, targets: Sequence[str] | None = None) -> dict:
    out = {}
    for item in items:
        for part in item.split(","):
            if "=" not in part:
                raise UsageError(f"expected LETTER=WORD, got {part!r}")
            k, v = part.split("=", 1)
            letters = targets if targets is not None else sorted(
                {x for x in g.terminals if g.signature.type_of(x) == 2} | set(v)
            )
            out[k] = io.split_word(v, letters) if v else ()
    return out


def cmd_stringop(a) -> int:
    g = _grammar(a.grammars[0])
    others = [_grammar(p) for p in a.grammars[1:]]
    need = {"union": 2, "concat": 2, "free-product": 2}.get(a.op, 1)
    if len(a.grammars) != need:
        raise UsageError(f"{a.op} takes {need} grammar file(s)")
    if a.op == "union":
        res = strings.union_l(g, others[0])
    elif a.op == "concat":
        res = strings.concat_l(g, others[0])
    elif a.op == "plus":
        res = strings.plus_l(g)
    elif a.op == "free-product":
        res = strings.free_product_wp(g, others[0])
    elif a.op == "hom":
        res = strings.apply_homomorphism(g, _letter_map(a.map, g))
    elif a.op == "weak":
        res = strings.apply_weak_coding(g, {k: "".join(v) or None for k, v in _letter_map(a.map, g).items()})
    else:
        targets = sorted(x for x in g.terminals if g.signature.type_of(x) == 2)
        res = strings.inverse_homomorphism(g, _letter_map(a.map, g, targets))
    _out(io.dumps(res), a.output)
    return EXIT_OK


def cmd_render(a) -> int:
    obj = io.read(a.input)
    if isinstance(obj, Hypergraph):
        text = io.hypergraph_to_dot(obj)
    elif isinstance(obj, PHRGrammar):
        text = io.grammar_to_dot(obj)
    elif isinstance(obj, transform.HRGrammar):
        text = io.grammar_to_dot(transform.import_hr(obj))
    else:
        raise UsageError("render handles hypergraphs and grammars")
    _out(text, a.output)
    return EXIT_OK


# parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phrg", description="Parallel hyperedge replacement grammar engine.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, bounds=False, fmt=False):
        sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.add_argument("--seed", type=int, help="accepted for compatibility; the engine is deterministic")
        if bounds:
            sp.add_argument("--max-steps", type=int, default=8)
            sp.add_argument("--max-edges", type=int, default=32)
            sp.add_argument("--max-len", type=int, default=12)
            sp.add_argument("--max-results", type=int, default=10000)
        if fmt:
            sp.add_argument("--format", choices=["json", "dot", "text"], default="json")

    sp = sub.add_parser("validate", help="check totality and typing; report grammar properties")
    sp.add_argument("grammar")
    sp.add_argument("--repair", action="store_true", help="add identity rules where a table is not total")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("derive", help="apply tables along a trace")
    sp.add_argument("grammar")
    sp.add_argument("--trace", default="", help="comma separated 1-based table indices")
    sp.add_argument("--start", help="hypergraph file to start from (default: the start handle)")
    common(sp, bounds=True, fmt=True)
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("enumerate", help="bounded enumeration of the language")
    sp.add_argument("grammar")
    sp.add_argument("--strings", action="store_true", help="print the words of string graphs instead")
    common(sp, bounds=True, fmt=True)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("empty", help="decide emptiness (exit 0 nonempty, 1 empty)")
    sp.add_argument("grammar")
    sp.add_argument("--explain", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_empty)

    sp = sub.add_parser("member", help="decide string membership (exit 0 member, 1 not)")
    sp.add_argument("grammar")
    sp.add_argument("--word", required=True)
    sp.add_argument("--sep", help="letter separator inside --word (default: longest letter match)")
    sp.add_argument("--explain", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("transform", help="grammar-to-grammar constructions")
    sp.add_argument("name", choices=TRANSFORMS)
    sp.add_argument("grammar")
    sp.add_argument("--map", action="append", default=[], help="LABEL=FILE image for subst (repeatable)")
    sp.add_argument("--round", action="append", default=[], help="LABEL=FILE,... one substitution of iter-subst")
    common(sp)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("intersect", help="intersect a string grammar with a regular language")
    sp.add_argument("grammar")
    sp.add_argument("dfa")
    common(sp)
    sp.set_defaults(func=cmd_intersect)

    sp = sub.add_parser("import", help="convert ET0L or HR grammars into PHR grammars")
    sp.add_argument("source", choices=["et0l", "hr"])
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_import)

    sp = sub.add_parser("export", help="convert a PHR grammar to ET0L or HR")
    sp.add_argument("target", choices=["et0l", "hr"])
    sp.add_argument("grammar")
    common(sp)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("stringop", help="closure operators on string languages")
    sp.add_argument("op", choices=STRINGOPS)
    sp.add_argument("grammars", nargs="+")
    sp.add_argument("--map", action="append", default=[], help="LETTER=WORD pairs for hom/weak/inverse")
    common(sp)
    sp.set_defaults(func=cmd_stringop)

    sp = sub.add_parser("render", help="DOT drawing of a hypergraph or grammar")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_render)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(message)s")
    try:
        return a.func(a)
    except UnsupportedShape as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except PhrgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for p in getattr(exc, "problems", []):
            print(f"  {p}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
