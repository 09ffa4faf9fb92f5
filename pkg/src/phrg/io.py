"""JSON documents (schema "phrg/1") and DOT rendering."""

from __future__ import annotations

import json
from typing import Any, Mapping

from .automata import DFA
from .errors import ParseError, PhrgError, ValidationError
from .grammar import PHRGrammar, Rule
from .hypergraph import Hypergraph, Signature
from .strings import ET0LGrammar
from .transform import HRGrammar

SCHEMA = "phrg/1"


# hypergraphs -----------------------------------------------------------------


def hypergraph_to_json(h: Hypergraph) -> dict:
    # edge ids follow the node ids so the two id spaces stay disjoint
    n = h.num_nodes
    return {
        "nodes": list(range(n)),
        "edges": [{"id": n + i, "label": lab, "att": list(att)} for i, (lab, att) in enumerate(h.edges)],
        "ext": list(h.ext),
    }


def hypergraph_from_json(d: Any, where: str = "hypergraph") -> Hypergraph:
    obj = _obj(d, where)
    nodes = _list(obj.get("nodes"), f"{where}.nodes")
    ids: dict[Any, int] = {}
    for v in nodes:
        if not isinstance(v, int) or isinstance(v, bool):
            raise ValidationError(f"{where}: node ids must be integers, got {v!r}")
        if v in ids:
            raise ValidationError(f"{where}: duplicate node id {v}")
        ids[v] = len(ids)
    edges = []
    seen_edges = set()
    for i, e in enumerate(_list(obj.get("edges", []), f"{where}.edges")):
        e = _obj(e, f"{where}.edges[{i}]")
        eid = e.get("id", None)
        if eid is not None:
            if eid in ids or eid in seen_edges:
                raise ValidationError(f"{where}: edge id {eid} clashes with another id")
            seen_edges.add(eid)
        lab = e.get("label")
        if not isinstance(lab, str):
            raise ValidationError(f"{where}.edges[{i}]: label must be a string")
        att = []
        for v in _list(e.get("att", []), f"{where}.edges[{i}].att"):
            if v not in ids:
                raise ValidationError(f"{where}.edges[{i}]: attachment {v!r} is not a node")
            att.append(ids[v])
        edges.append((lab, tuple(att)))
    ext = []
    for v in _list(obj.get("ext", []), f"{where}.ext"):
        if v not in ids:
            raise ValidationError(f"{where}: external node {v!r} is not a node")
        ext.append(ids[v])
    return Hypergraph(len(ids), tuple(edges), tuple(ext))


# automata --------------------------------------------------------------------


def dfa_to_json(m: DFA) -> dict:
    delta: dict[str, dict[str, str]] = {}
    for (q, a), r in sorted(m.delta.items(), key=lambda x: (x[0][0], str(x[0][1]))):
        delta.setdefault(q, {})[str(a)] = r
    return {
        "states": list(m.states),
        "alphabet": [str(a) for a in m.alphabet],
        "delta": delta,
        "start": m.start,
        "finals": sorted(m.finals),
    }


def dfa_from_json(d: Any, where: str = "dfa", letters_are_tables: bool = False) -> DFA:
    obj = _obj(d, where)
    states = tuple(str(q) for q in _list(obj.get("states"), f"{where}.states"))

    def letter(a: Any):
        if letters_are_tables:
            try:
                return int(a)
            except (TypeError, ValueError):
                raise ValidationError(f"{where}: control letters must be table numbers, got {a!r}") from None
        return str(a)

    alphabet = tuple(letter(a) for a in _list(obj.get("alphabet"), f"{where}.alphabet"))
    delta = {}
    for q, row in _obj(obj.get("delta", {}), f"{where}.delta").items():
        for a, r in _obj(row, f"{where}.delta.{q}").items():
            delta[(str(q), letter(a))] = str(r)
    try:
        return DFA(states, alphabet, delta, str(obj.get("start")), frozenset(str(q) for q in obj.get("finals", [])))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


# grammars --------------------------------------------------------------------


def _labels_json(sig: Signature) -> list[dict]:
    return [{"name": x, "type": k} for x, k in sig.items()]


def _labels_from(obj: Mapping, where: str) -> dict[str, int]:
    types: dict[str, int] = {}
    for i, item in enumerate(_list(obj.get("labels"), f"{where}.labels")):
        item = _obj(item, f"{where}.labels[{i}]")
        name, t = item.get("name"), item.get("type")
        if not isinstance(name, str) or not isinstance(t, int) or isinstance(t, bool):
            raise ValidationError(f"{where}.labels[{i}]: need a string name and an integer type")
        if name in types:
            raise ValidationError(f"{where}: label {name!r} declared twice")
        types[name] = t
    return types


def grammar_to_json(g: PHRGrammar) -> dict:
    d: dict[str, Any] = {
        "schema": SCHEMA,
        "kind": "phr",
        "labels": _labels_json(g.signature),
        "terminals": sorted(g.terminals),
        "start": g.start,
        "tables": [[{"lhs": r.lhs, "rhs": hypergraph_to_json(r.rhs)} for r in t] for t in g.tables],
    }
    if g.control is not None:
        d["control"] = dfa_to_json(g.control)
    meta = _jsonable(g.meta)
    if meta:
        d["meta"] = meta
    return d


def grammar_from_json(d: Any, where: str = "grammar") -> PHRGrammar:
    obj = _obj(d, where)
    types = _labels_from(obj, where)
    tables = []
    for i, t in enumerate(_list(obj.get("tables"), f"{where}.tables"), 1):
        rules = []
        for j, r in enumerate(_list(t, f"{where}.tables[{i}]")):
            r = _obj(r, f"{where}.tables[{i}][{j}]")
            lhs = r.get("lhs")
            if not isinstance(lhs, str):
                raise ValidationError(f"{where}.tables[{i}][{j}]: lhs must be a string")
            rules.append(Rule(lhs, hypergraph_from_json(r.get("rhs"), f"{where}.tables[{i}][{j}].rhs")))
        tables.append(tuple(rules))
    control = None
    if obj.get("control") is not None:
        control = dfa_from_json(obj["control"], f"{where}.control", letters_are_tables=True)
    terminals = _list(obj.get("terminals", []), f"{where}.terminals")
    start = obj.get("start")
    if not isinstance(start, str):
        raise ValidationError(f"{where}: start must be a string")
    return PHRGrammar(Signature(types), frozenset(terminals), start, tuple(tables), control, dict(obj.get("meta", {})))


def hr_to_json(hr: HRGrammar) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "hr",
        "labels": _labels_json(hr.signature),
        "nonterminals": sorted(hr.nonterminals),
        "start": hr.start,
        "rules": [{"lhs": r.lhs, "rhs": hypergraph_to_json(r.rhs)} for r in hr.rules],
    }


def hr_from_json(d: Any, where: str = "hr") -> HRGrammar:
    obj = _obj(d, where)
    types = _labels_from(obj, where)
    rules = []
    for j, r in enumerate(_list(obj.get("rules"), f"{where}.rules")):
        r = _obj(r, f"{where}.rules[{j}]")
        rules.append((r.get("lhs"), hypergraph_from_json(r.get("rhs"), f"{where}.rules[{j}].rhs")))
    return HRGrammar.build(types, _list(obj.get("nonterminals"), f"{where}.nonterminals"), obj.get("start"), rules)


def et0l_to_json(e: ET0LGrammar) -> dict:
    single = all(len(a) == 1 for a in e.alphabet)

    def rhs(w):
        return "".join(w) if single else list(w)

    return {
        "schema": SCHEMA,
        "kind": "et0l",
        "alphabet": list(e.alphabet),
        "terminals": sorted(e.terminals),
        "start": e.start,
        "tables": [[{"lhs": l, "rhs": rhs(r)} for l, r in t] for t in e.tables],
    }


def et0l_from_json(d: Any, where: str = "et0l") -> ET0LGrammar:
    obj = _obj(d, where)
    alphabet = [str(a) for a in _list(obj.get("alphabet"), f"{where}.alphabet")]
    tables = []
    for i, t in enumerate(_list(obj.get("tables"), f"{where}.tables"), 1):
        rows = []
        for j, r in enumerate(_list(t, f"{where}.tables[{i}]")):
            r = _obj(r, f"{where}.tables[{i}][{j}]")
            rows.append((r.get("lhs"), split_word(r.get("rhs", ""), alphabet)))
        tables.append(rows)
    return ET0LGrammar.build(alphabet, obj.get("terminals", []), obj.get("start"), tables)


def split_word(w: Any, alphabet) -> tuple[str, ...]:
    """Tokenise a word: lists are taken as is, strings by longest letter match."""
    if isinstance(w, list):
        return tuple(str(a) for a in w)
    if not isinstance(w, str):
        raise ValidationError(f"a word must be a string or a list of letters, got {w!r}")
    letters = sorted(set(alphabet), key=len, reverse=True)
    out = []
    i = 0
    while i < len(w):
        for a in letters:
            if a and w.startswith(a, i):
                out.append(a)
                i += len(a)
                break
        else:
            raise ValidationError(f"cannot split {w!r} into letters at position {i}")
    return tuple(out)


# documents -------------------------------------------------------------------


def loads(text: str) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if isinstance(doc, dict) and "schema" in doc and doc["schema"] != SCHEMA:
        raise ValidationError(f"unsupported schema {doc['schema']!r} (expected {SCHEMA!r})")
    return doc


def load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PhrgError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def kind_of(doc: Any) -> str:
    if not isinstance(doc, dict):
        raise ValidationError("a document must be a JSON object")
    if "kind" in doc:
        return str(doc["kind"])
    if "rules" in doc:
        return "hr"
    if "alphabet" in doc and "tables" in doc:
        return "et0l"
    if "tables" in doc:
        return "phr"
    if "delta" in doc:
        return "dfa"
    if "nodes" in doc:
        return "hypergraph"
    raise ValidationError("cannot tell what kind of document this is")


def to_json(obj: Any) -> dict:
    if isinstance(obj, PHRGrammar):
        return grammar_to_json(obj)
    if isinstance(obj, HRGrammar):
        return hr_to_json(obj)
    if isinstance(obj, ET0LGrammar):
        return et0l_to_json(obj)
    if isinstance(obj, DFA):
        return {"schema": SCHEMA, "kind": "dfa", **dfa_to_json(obj)}
    if isinstance(obj, Hypergraph):
        return {"schema": SCHEMA, "kind": "hypergraph", **hypergraph_to_json(obj)}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def from_json(doc: Any):
    k = kind_of(doc)
    readers = {
        "phr": grammar_from_json,
        "hr": hr_from_json,
        "et0l": et0l_from_json,
        "dfa": dfa_from_json,
        "hypergraph": hypergraph_from_json,
    }
    if k not in readers:
        raise ValidationError(f"unknown document kind {k!r}")
    return readers[k](doc)


def dumps(obj: Any) -> str:
    return json.dumps(to_json(obj), ensure_ascii=False, indent=1, sort_keys=False) + "\n"


def read(path: str):
    return from_json(load(path))


def write(obj: Any, path: str | None) -> str:
    text = dumps(obj)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# DOT -------------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_body(h: Hypergraph, prefix: str) -> list[str]:
    ext_pos: dict[int, list[int]] = {}
    for i, v in enumerate(h.ext, 1):
        ext_pos.setdefault(v, []).append(i)
    lines = []
    for v in range(h.num_nodes):
        if v in ext_pos:
            pos = ",".join(map(str, ext_pos[v]))
            lines.append(f'  {prefix}n{v} [shape=circle, style=filled, fillcolor=black, width=0.15, label="", xlabel={_q(pos)}];')
        else:
            lines.append(f'  {prefix}n{v} [shape=circle, width=0.15, label=""];')
    for i, (lab, att) in enumerate(h.edges):
        lines.append(f"  {prefix}e{i} [shape=box, label={_q(lab)}];")
        for k, v in enumerate(att, 1):
            lines.append(f'  {prefix}e{i} -> {prefix}n{v} [arrowhead=none, label="{k}"];')
    return lines


def hypergraph_to_dot(h: Hypergraph, name: str = "H") -> str:
    return "\n".join([f"digraph {_q(name)} {{", *_dot_body(h, ""), "}"]) + "\n"


def grammar_to_dot(g: PHRGrammar) -> str:
    lines = ["digraph grammar {", "  compound=true;"]
    for ti, t in enumerate(g.tables, 1):
        for ri, r in enumerate(t):
            p = f"t{ti}r{ri}_"
            lines.append(f"  subgraph cluster_{p} {{")
            lines.append(f"    label={_q(f'T{ti}: {r.lhs} →')};")
            lines.extend("  " + x for x in _dot_body(r.rhs, p))
            if not r.rhs.num_nodes and not r.rhs.edges:
                lines.append(f'    {p}empty [shape=plaintext, label="∅"];')
            lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# helpers ---------------------------------------------------------------------


def _obj(d: Any, where: str) -> Mapping:
    if not isinstance(d, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    return d


def _list(d: Any, where: str) -> list:
    if not isinstance(d, list):
        raise ValidationError(f"{where}: expected a JSON array")
    return d


def _jsonable(m: Mapping) -> dict:
    out = {}
    for k, v in m.items():
        try:
            json.dumps(v)
        except TypeError:
            continue
        out[str(k)] = v
    return out
