"""Grammar-to-grammar constructions: imports, normal forms and closures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .automata import DFA
from .errors import TypingError, ValidationError
from .grammar import PHRGrammar, Rule
from .hypergraph import Hypergraph, Signature, handle, quotient, replace
from .names import Namer

BAR = "̄"  # combining macron: X -> X̄
HAT = "̂"  # combining circumflex, for renamed-apart copies


@dataclass(frozen=True)
class HRGrammar:
    """Sequential hyperedge replacement grammar (signature, N, S, R)."""

    signature: Signature
    nonterminals: frozenset[str]
    start: str
    rules: tuple[Rule, ...]
    meta: Mapping[str, object] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.start not in self.signature:
            raise ValidationError(f"start {self.start!r} is not a label")
        for r in self.rules:
            if r.lhs not in self.nonterminals:
                raise ValidationError(f"HR rule lhs {r.lhs!r} is not a nonterminal")
            if self.signature.type_of(r.lhs) != len(r.rhs.ext):
                raise TypingError(f"HR rule for {r.lhs!r} has rhs of type {len(r.rhs.ext)}")
            r.rhs.check_typing(self.signature)

    @staticmethod
    def build(types: Mapping[str, int], nonterminals: Iterable[str], start: str, rules: Iterable[tuple[str, Hypergraph]]):
        return HRGrammar(Signature(types), frozenset(nonterminals), start, tuple(Rule(l, r) for l, r in rules))

    @property
    def terminals(self) -> frozenset[str]:
        return frozenset(self.signature.labels) - self.nonterminals

    @property
    def order(self) -> int:
        return max((len(r.rhs.ext) for r in self.rules), default=0)


# helpers ---------------------------------------------------------------------

Table = dict[str, list[Hypergraph]]


def _handle(x: str, t: int) -> Hypergraph:
    nodes = tuple(range(t))
    return Hypergraph(t, ((x, nodes),), nodes)


def _tables_of(g: PHRGrammar) -> list[Table]:
    return [{x: list(rs) for x, rs in idx.items()} for idx in g.rule_index]


def _override(base: Table, over: Table) -> Table:
    out = dict(base)
    out.update({k: v for k, v in over.items() if v})
    return out


def _make(types, terminals, start, tables: Sequence[Table], meta=None, control=None) -> PHRGrammar:
    rules = [[(x, r) for x in sorted(t) for r in t[x]] for t in tables]
    return PHRGrammar.build(types, terminals, start, rules, control=control, meta=meta)


def _total(types: Mapping[str, int], tables: Sequence[Table], fallback: Mapping[int, str]) -> None:
    """Give labels without rules the failure rule for their type."""
    for t in tables:
        for x, k in types.items():
            if not t.get(x):
                t[x] = [_handle(fallback[k], k)]


def rename_labels(g: PHRGrammar, mapping: Mapping[str, str]) -> PHRGrammar:
    sig = Signature({mapping.get(x, x): k for x, k in g.signature.items()})
    if len(sig) != len(g.signature):
        raise ValidationError("label renaming is not injective")
    tables = [[Rule(mapping.get(r.lhs, r.lhs), r.rhs.relabel(mapping)) for r in t] for t in g.tables]
    return PHRGrammar(
        sig,
        frozenset(mapping.get(a, a) for a in g.terminals),
        mapping.get(g.start, g.start),
        tuple(tuple(t) for t in tables),
        g.control,
        dict(g.meta),
    )


def _meta(construction: str, mult: int = 1, add: int = 0, **extra) -> dict:
    m = {"construction": construction, "step_overhead": [mult, add]}
    m.update(extra)
    return m


def step_bound(g: PHRGrammar, steps: int) -> int:
    """Translate a step bound for the source grammar into one for ``g``."""
    mult, add = g.meta.get("step_overhead", [1, 0])  # type: ignore[misc]
    return mult * steps + add


# HR grammars as one-table PHR grammars ---------------------------------------


def import_hr(hr: HRGrammar) -> PHRGrammar:
    sig = hr.signature
    table: Table = {x: [_handle(x, sig.type_of(x))] for x in sig}
    for r in hr.rules:
        table[r.lhs].append(r.rhs)
    return _make(dict(sig.items()), hr.terminals, hr.start, [table], _meta("import-hr"))


def embed_hr(g: PHRGrammar) -> HRGrammar:
    s = synchronise(g)
    rules = []
    seen = set()
    for t in s.tables:
        for r in t:
            if r.lhs not in s.terminals and (r.lhs, r.rhs.key) not in seen:
                seen.add((r.lhs, r.rhs.key))
                rules.append(r)
    return HRGrammar(s.signature, frozenset(s.signature.labels) - s.terminals, s.start, tuple(rules), {"construction": "embed-hr"})


def hr_derives_sequentially(hr: HRGrammar, h: Hypergraph, max_edges: int) -> list[Hypergraph]:
    """Single-edge HR steps from ``h`` (used to replay parallel steps)."""
    out = {}
    for e, (lab, _) in enumerate(h.edges):
        for r in hr.rules:
            if r.lhs == lab:
                s = replace(h, {e: r.rhs})
                if len(s.edges) <= max_edges:
                    out.setdefault(s.key, s)
    return [out[k] for k in sorted(out)]


# proper grammars -------------------------------------------------------------


def _partition_of(att: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    blocks: dict[int, list[int]] = {}
    for i, v in enumerate(att):
        blocks.setdefault(v, []).append(i)
    return tuple(tuple(b) for b in blocks.values())


def properize(g: PHRGrammar) -> PHRGrammar:
    """Annotate labels with the equality pattern of their attachments.

    A label (X, π) stands for an X-edge whose tentacles are identified
    according to the partition π; it is attached once per block.  The
    discrete partition keeps the plain name X.  Exact when no rule glues
    distinct host nodes together (the caller asserts the language is proper).
    """
    if g.control is not None:
        g = remove_control(g)
    sig = g.signature
    namer = Namer(sig.labels)
    names: dict[tuple[str, tuple], str] = {}
    types: dict[str, int] = {}

    def name(x: str, part) -> str:
        k = (x, part)
        if k not in names:
            if all(len(b) == 1 for b in part):
                names[k] = x
            else:
                pattern = "|".join(",".join(str(i + 1) for i in b) for b in part)
                names[k] = namer.fresh(f"{x}<{pattern}>")
            types[names[k]] = len(part)
        return names[k]

    def encode(h: Hypergraph) -> Hypergraph:
        edges = []
        for lab, att in h.edges:
            part = _partition_of(att)
            edges.append((name(lab, part), tuple(att[b[0]] for b in part)))
        return Hypergraph(h.num_nodes, tuple(edges), h.ext)

    start = name(g.start, tuple((i,) for i in range(sig.type_of(g.start))))
    todo = [(g.start, tuple((i,) for i in range(sig.type_of(g.start))))]
    done = set()
    tables: list[Table] = [dict() for _ in g.tables]
    while todo:
        x, part = todo.pop()
        if (x, part) in done:
            continue
        done.add((x, part))
        lhs = names[(x, part)]
        for ti, idx in enumerate(g.rule_index):
            rhss = []
            for r in idx[x]:
                # glue the external nodes that the partition identifies
                pairs = [(r.ext[b[0]], r.ext[i]) for b in part for i in b[1:]]
                q = quotient(r, pairs)
                q = q.with_ext(tuple(q.ext[b[0]] for b in part))
                enc = encode(q)
                rhss.append(enc)
                for lab, att in q.edges:
                    k = (lab, _partition_of(att))
                    if k not in done:
                        todo.append(k)
            tables[ti][lhs] = rhss
    for (x, part), n in names.items():
        types[n] = len(part)
    terminals = {names[(x, p)] for (x, p) in names if x in g.terminals and all(len(b) == 1 for b in p)}
    return _make(types, terminals, start, tables, _meta("properize"))


# unreachable labels ----------------------------------------------------------


def eliminate_unreachable(g: PHRGrammar) -> PHRGrammar:
    from .decide import reachable_label_sets

    reach = {g.start}
    for x in reachable_label_sets(g):
        reach |= x
    drop = set(g.labels) - reach
    if not drop:
        return g
    types = {x: k for x, k in g.signature.items() if x not in drop}
    tables = []
    for idx in g.rule_index:
        t: Table = {}
        for x, rs in idx.items():
            if x in drop:
                continue
            t[x] = [r for r in rs if not (r.labels & drop)]
        tables.append(t)
    return _make(
        types, g.terminals - drop, g.start, tables, _meta("unreachable", removed=sorted(drop)), g.control
    )


# two tables suffice ----------------------------------------------------------


def reduce_tables_to_two(g: PHRGrammar) -> PHRGrammar:
    if g.control is not None:
        raise ValidationError("reduce_tables_to_two expects an uncontrolled grammar; remove control first")
    l = g.table_count
    if l < 2:
        raise ValidationError("reduce_tables_to_two needs at least two tables")
    sig = g.signature
    namer = Namer(sig.labels)
    phase = {(x, i): namer.fresh(f"[{x},{i}]") for x in sig for i in range(1, l + 1)}
    types = dict(sig.items())
    types.update({n: sig.type_of(x) for (x, _), n in phase.items()})
    t1: Table = {}
    t2: Table = {}
    for x in sig:
        k = sig.type_of(x)
        t1[x] = [_handle(phase[(x, 1)], k)]
        for i in range(1, l + 1):
            t1[phase[(x, i)]] = [_handle(phase[(x, i % l + 1)], k)]
        t2[x] = [_handle(x, k)]
        for i in range(1, l + 1):
            t2[phase[(x, i)]] = list(g.rule_index[i - 1][x])
    return _make(types, g.terminals, g.start, [t1, t2], _meta("tables2", l + 1, 0, source_tables=l))


# removing rational control ---------------------------------------------------


def remove_control(g: PHRGrammar) -> PHRGrammar:
    """Fold the control automaton into the grammar.

    Output table 1 is the start/stop table; table j+1 simulates input table j.
    """
    if g.control is None:
        raise ValidationError("grammar has no control automaton")
    l = g.table_count
    m = g.control.with_alphabet(range(1, l + 1)).complete()
    sig = g.signature
    namer = Namer(sig.labels)
    s2 = namer.fresh("S'")
    qname = {q: namer.fresh(f"q:{q}") for q in m.states}
    bar = {a: namer.fresh(a + BAR) for a in sorted(g.terminals)}
    k = max([sig.type_of(x) for x in sig] + [0])
    fin = {i: namer.fresh(f"F{i}") for i in range(k + 1)}
    types = dict(sig.items())
    types[s2] = sig.type_of(g.start)
    types.update({q: 0 for q in qname.values()})
    types.update({bar[a]: sig.type_of(a) for a in bar})
    types.update({f: i for i, f in fin.items()})

    def b(h: Hypergraph) -> Hypergraph:
        return h.relabel(bar)

    def fail(x):
        return _handle(fin[types[x]], types[x])

    t0: Table = {}
    start_rhs = b(g.start_graph())
    t0[s2] = [Hypergraph(start_rhs.num_nodes, start_rhs.edges + ((qname[m.start], ()),), start_rhs.ext)]
    for q, n in qname.items():
        t0[n] = [Hypergraph(0, (), ())] if q in m.finals else [fail(n)]
    for a, n in bar.items():
        t0[n] = [_handle(a, types[a])]
    for x in list(sig) + list(fin.values()):
        t0[x] = [fail(x)]
    tables = [t0]
    for j in range(1, l + 1):
        t: Table = {}
        for x in sig:
            rs = g.rule_index[j - 1][x]
            if x in g.terminals:
                t[bar[x]] = [b(r) for r in rs]
                t[x] = [_handle(x, types[x])]
            else:
                t[x] = [b(r) for r in rs]
        for q, n in qname.items():
            t[n] = [_handle(qname[m.delta[(q, j)]], 0)]
        for x in [s2] + list(fin.values()):
            t[x] = [_handle(x, types[x])]
        tables.append(t)
    return _make(types, g.terminals, s2, tables, _meta("nocontrol", 1, 2, states=len(m.states)))


# synchronisation -------------------------------------------------------------


def _fresh_start(g: PHRGrammar, namer: Namer) -> tuple[str, dict[str, int], list[Table]]:
    s2 = namer.fresh("S'")
    types = dict(g.signature.items())
    types[s2] = types[g.start]
    tables = _tables_of(g)
    for t in tables:
        t[s2] = [g.start_graph()]
    return s2, types, tables


def synchronise(g: PHRGrammar) -> PHRGrammar:
    pre_mult, pre_add = 1, 0
    if g.control is not None:
        g = remove_control(g)
        pre_mult, pre_add = g.meta["step_overhead"]  # type: ignore[misc]
    sig = g.signature
    namer = Namer(sig.labels)
    s2, types, tables = _fresh_start(g, namer)
    k = max(types.values())
    fin = {i: namer.fresh(f"F{i}") for i in range(k + 1)}
    types.update({f: i for i, f in fin.items()})
    for t in tables:
        for f in fin.values():
            t[f] = [_handle(f, types[f])]
    bar = {a: namer.fresh(a + BAR) for a in sorted(g.terminals)}
    types.update({bar[a]: types[a] for a in bar})
    out = []
    for t in tables:
        n: Table = {}
        for x, rs in t.items():
            target = bar[x] if x in g.terminals else x
            n[target] = [r.relabel(bar) for r in rs]
        for a in g.terminals:
            n[a] = [_handle(fin[types[a]], types[a])]
            n[bar[a]] = n[bar[a]] + [_handle(a, types[a])]
        out.append(n)
    # overheads compose: n source steps -> pre_mult*n + pre_add -> +2
    return _make(
        types, g.terminals, s2, out,
        _meta("sync", pre_mult, pre_add + 2, finals=[fin[i] for i in sorted(fin)]),
    )


# substitutions ---------------------------------------------------------------


def _check_image_type(x: str, k: int, t: int) -> None:
    if k != t:
        raise TypingError(f"image of {x!r} has type {t}, but {x!r} has type {k}")


def substitute_finite(g: PHRGrammar, s: Mapping[str, Iterable[Hypergraph]]) -> PHRGrammar:
    """Image of L(g) under a finite substitution of its terminals.

    Terminals outside the domain of ``s`` are kept as they are.
    """
    if g.control is not None:
        g = remove_control(g)
    sig = g.signature
    images: dict[str, list[Hypergraph]] = {}
    for a in g.terminals:
        imgs = list(s[a]) if a in s else [_handle(a, sig.type_of(a))]
        for h in imgs:
            _check_image_type(a, sig.type_of(a), len(h.ext))
        images[a] = imgs
    for x in s:
        if x not in g.terminals:
            raise ValidationError(f"substitution domain letter {x!r} is not a terminal")
    b_types: dict[str, int] = {}
    for imgs in images.values():
        for h in imgs:
            for lab, att in h.edges:
                if b_types.setdefault(lab, len(att)) != len(att):
                    raise TypingError(f"label {lab!r} used with two arities in the images")
    # rename g's labels apart from the image alphabet
    namer = Namer(set(sig.labels) | set(b_types))
    ren = {x: namer.fresh(x + HAT) for x in sig if x in b_types}
    g2 = rename_labels(g, ren)
    images = {ren.get(a, a): v for a, v in images.items()}
    sg = synchronise(g2)
    terms = sg.terminals
    types = {x: k for x, k in sg.signature.items() if x not in terms}
    types.update(b_types)
    kmax = max(types.values())
    fin = {i: f for f in sg.meta["finals"] for i in [sg.signature.type_of(f)]}  # type: ignore[union-attr]
    namer.reserve(types)
    for i in range(kmax + 1):
        if i not in fin:
            fin[i] = namer.fresh(f"F{i}")
            types[fin[i]] = i
    tables: list[Table] = []
    for idx in sg.rule_index:
        t: Table = {}
        for x, rs in idx.items():
            if x in terms:
                continue
            out = []
            for r in rs:
                out.extend(_substitute_edges(r, images))
            t[x] = out
        for f in fin.values():
            t[f] = [_handle(f, types[f])]
        for y in b_types:
            t[y] = [_handle(fin[b_types[y]], b_types[y])]
        tables.append(t)
    _total(types, tables, fin)
    return _make(types, set(b_types), sg.start, tables, _meta("subst-finite", 1, 2))


def _substitute_edges(h: Hypergraph, images: Mapping[str, Sequence[Hypergraph]]) -> list[Hypergraph]:
    slots = [e for e, (lab, _) in enumerate(h.edges) if lab in images]
    if not slots:
        return [h]
    out = []
    for combo in itertools.product(*(images[h.edges[e][0]] for e in slots)):
        out.append(replace(h, dict(zip(slots, combo))))
    return out


def finite_grammar(graphs: Iterable[Hypergraph], signature: Signature | Mapping[str, int] | None = None) -> PHRGrammar:
    """A one-table grammar generating exactly the given (terminal) graphs."""
    graphs = list(graphs)
    if not graphs:
        raise ValidationError("finite_grammar needs at least one graph")
    t = len(graphs[0].ext)
    types: dict[str, int] = {}
    for h in graphs:
        if len(h.ext) != t:
            raise TypingError("all graphs of a finite language must have the same type")
        for lab, att in h.edges:
            if types.setdefault(lab, len(att)) != len(att):
                raise TypingError(f"label {lab!r} used with two arities")
    if signature is not None:
        for x, k in (signature.items()):
            types.setdefault(x, k)
    namer = Namer(types)
    z = namer.fresh("Z")
    terms = set(types)
    types[z] = t
    table: Table = {x: [_handle(x, k)] for x, k in types.items() if x != z}
    table[z] = graphs
    return _make(types, terms, z, [table], _meta("finite"))


def _prepare_image(h: PHRGrammar | Iterable[Hypergraph]) -> PHRGrammar:
    if isinstance(h, PHRGrammar):
        return remove_control(h) if h.control is not None else h
    return finite_grammar(h)


def substitute_grammars(g: PHRGrammar | HRGrammar, s: Mapping[str, PHRGrammar | Iterable[Hypergraph]]) -> PHRGrammar:
    """Image of L(g) under a substitution whose images are grammar languages.

    For an HR grammar with one-table images the result has a single table;
    otherwise the multi-table construction is used.  Letters outside the
    domain of ``s`` are kept.
    """
    imgs = {x: _prepare_image(v) for x, v in s.items()}
    if isinstance(g, HRGrammar) and all(v.table_count == 1 for v in imgs.values()):
        return _substitute_hr_single(g, imgs)
    if isinstance(g, HRGrammar):
        g = import_hr(g)
    if all(v.table_count == 1 for v in imgs.values()):
        return _lockstep_machine(g, [imgs], iterate=False)
    return _substitution_machine(g, [imgs], iterate=False)


def iterate_substitutions(g: PHRGrammar | HRGrammar, subs: Sequence[Mapping[str, PHRGrammar | Iterable[Hypergraph]]]) -> PHRGrammar:
    """Grammar for ITER_S(L(g)): any number of rounds, each applying one of
    the substitutions to the whole graph."""
    if isinstance(g, HRGrammar):
        g = import_hr(g)
    rounds = [{x: _prepare_image(v) for x, v in s.items()} for s in subs]
    if all(v.table_count == 1 for r in rounds for v in r.values()):
        return _lockstep_machine(g, rounds, iterate=True)
    return _substitution_machine(g, rounds, iterate=True)


def _substitute_hr_single(g: HRGrammar, imgs: Mapping[str, PHRGrammar]) -> PHRGrammar:
    sig = g.signature
    for x, img in imgs.items():
        if x not in g.terminals:
            raise ValidationError(f"substitution domain letter {x!r} is not a terminal")
        _check_image_type(x, sig.type_of(x), img.signature.type_of(img.start))
    b_types: dict[str, int] = {}
    for img in imgs.values():
        for a in img.terminals:
            b_types[a] = img.signature.type_of(a)
    for a in g.terminals - set(imgs):
        b_types[a] = sig.type_of(a)
    taken = set(sig.labels) | set(b_types)
    for img in imgs.values():
        taken |= set(img.labels)
    namer = Namer(taken)
    hat = {x: namer.fresh(x + HAT) for x in sig}
    types = {hat[x]: sig.type_of(x) for x in sig}
    types.update(b_types)
    kmax = max(list(types.values()) + [img.order for img in imgs.values()] + [0])
    fin = {i: namer.fresh(f"F{i}") for i in range(kmax + 1)}
    types.update({f: i for i, f in fin.items()})
    t: Table = {hat[x]: [_handle(hat[x], sig.type_of(x))] for x in sig}
    for r in g.rules:
        t[hat[r.lhs]].append(r.rhs.relabel(hat))
    for f in fin.values():
        t[f] = [_handle(f, types[f])]
    for y, k in b_types.items():
        t[y] = [_handle(fin[k], k)]
    for a in sorted(g.terminals):
        if a not in imgs:
            t[hat[a]].append(_handle(a, sig.type_of(a)))
    for x in sorted(imgs):
        sg = synchronise(imgs[x])
        ifin = set(sg.meta["finals"])  # type: ignore[arg-type]
        ren: dict[str, str] = {}
        for y in sg.labels:
            if y in sg.terminals:
                ren[y] = y
            elif y in ifin:
                ren[y] = fin[sg.signature.type_of(y)]
            else:
                ren[y] = namer.fresh(f"{y}{HAT}{x}")
                types[ren[y]] = sg.signature.type_of(y)
        t[hat[x]].append(_handle(ren[sg.start], sig.type_of(x)))
        for y, rs in sg.rule_index[0].items():
            if y in sg.terminals or y in ifin:
                continue
            t[ren[y]] = [r.relabel(ren) for r in rs]
    return _make(types, set(b_types), hat[g.start], [t], _meta("subst-hr", 1, 2, part=1))


def _real_letters(g: PHRGrammar, rounds: Sequence[Mapping[str, PHRGrammar]], iterate: bool) -> dict[str, int]:
    sig = g.signature
    for s in rounds:
        for x, img in s.items():
            if x not in g.terminals and not iterate:
                raise ValidationError(f"substitution domain letter {x!r} is not a terminal")
            k = sig.type_of(x) if x in sig else img.signature.type_of(img.start)
            _check_image_type(x, k, img.signature.type_of(img.start))
    real: dict[str, int] = {a: sig.type_of(a) for a in g.terminals}
    for s in rounds:
        for img in s.values():
            for a in img.terminals:
                if real.setdefault(a, img.signature.type_of(a)) != img.signature.type_of(a):
                    raise TypingError(f"terminal {a!r} used with two arities")
    return real


def _lockstep_machine(g: PHRGrammar, rounds: Sequence[Mapping[str, PHRGrammar]], iterate: bool) -> PHRGrammar:
    """Substitution by one-table images, all running in a shared table.

    Images are synchronised, so every image instance has to emit its
    terminals in the same step; late starters idle on their start symbol.
    Letters without an image get the identity image, which keeps real
    letters unambiguous (they always come out of some image).
    """
    if g.control is not None:
        g = remove_control(g)
    sig = g.signature
    real = _real_letters(g, rounds, iterate)
    full = []
    for s in rounds:
        r = dict(s)
        for a in sorted(set(g.terminals) | (set(real) if iterate else set())):
            if a not in r:
                r[a] = finite_grammar([_handle(a, real[a])])
        full.append(r)
    if not iterate:
        real = {a: k for a, k in real.items() if any(a in img.terminals for img in full[0].values())}
    taken = set(sig.labels) | set(real)
    for s in full:
        for img in s.values():
            taken |= set(img.labels)
    namer = Namer(taken)
    hat = {x: namer.fresh(x + HAT) for x in sig}
    types: dict[str, int] = {hat[x]: sig.type_of(x) for x in sig}
    types.update(real)
    synced = []
    kmax = max(types.values())
    for j, s in enumerate(full):
        for a in sorted(s):
            sg = synchronise(s[a])
            synced.append((j, a, sg))
            kmax = max(kmax, max(sg.signature.type_of(x) for x in sg.labels))
    fin = {i: namer.fresh(f"F{i}") for i in range(kmax + 1)}
    types.update({f: i for i, f in fin.items()})
    image_rules: list[Table] = [dict() for _ in full]
    start_of: dict[tuple[int, str], str] = {}
    for j, a, sg in synced:
        ifin = set(sg.meta["finals"])  # type: ignore[arg-type]
        ren: dict[str, str] = {}
        tag = f"{j}:{a}" if len(full) > 1 else a
        for y in sg.labels:
            if y in sg.terminals:
                ren[y] = y
            elif y in ifin:
                ren[y] = fin[sg.signature.type_of(y)]
            else:
                ren[y] = namer.fresh(f"{y}{BAR}{tag}")
                types[ren[y]] = sg.signature.type_of(y)
        start_of[(j, a)] = ren[sg.start]
        for y, rs in sg.rule_index[0].items():
            if y in sg.terminals or y in ifin:
                continue
            image_rules[j][ren[y]] = [r.relabel(ren) for r in rs]
        st = ren[sg.start]
        image_rules[j][st] = image_rules[j][st] + [_handle(st, types[st])]

    ident: Table = {x: [_handle(x, k)] for x, k in types.items()}
    failure: Table = {x: [_handle(fin[k], k)] for x, k in types.items()}
    tables: list[Table] = []
    for idx in g.rule_index:
        tables.append(_override(ident, {hat[x]: [r.relabel(hat) for r in rs] for x, rs in idx.items()}))
    for j, s in enumerate(full):
        over = {hat[a]: [_handle(start_of[(j, a)], sig.type_of(a))] for a in g.terminals}
        if iterate:
            over.update({a: [_handle(start_of[(j, a)], k)] for a, k in real.items()})
        tables.append(_override(failure, over))
        img = dict(image_rules[j])
        img.update({b: [_handle(fin[k], k)] for b, k in real.items()})
        tables.append(_override(ident, img))
    if iterate:
        tables.append(_override(failure, {hat[a]: [_handle(a, real[a])] for a in g.terminals}))
    name = "iter-subst" if iterate else "subst"
    return _make(types, set(real), hat[g.start], tables, _meta(name, 1, 0, variant="lockstep"))


def _substitution_machine(g: PHRGrammar, rounds: Sequence[Mapping[str, PHRGrammar]], iterate: bool) -> PHRGrammar:
    if g.control is not None:
        g = remove_control(g)
    sig = g.signature
    for s in rounds:
        for x, img in s.items():
            if x not in g.terminals and not iterate:
                raise ValidationError(f"substitution domain letter {x!r} is not a terminal")
            k = sig.type_of(x) if x in sig else img.signature.type_of(img.start)
            _check_image_type(x, k, img.signature.type_of(img.start))
    real: dict[str, int] = {a: sig.type_of(a) for a in g.terminals}
    for s in rounds:
        for img in s.values():
            for a in img.terminals:
                if real.setdefault(a, img.signature.type_of(a)) != img.signature.type_of(a):
                    raise TypingError(f"terminal {a!r} used with two arities")
    taken = set(sig.labels) | set(real)
    for s in rounds:
        for img in s.values():
            taken |= set(img.labels)
    namer = Namer(taken)
    hat = {x: namer.fresh(x + HAT) for x in sig}
    types: dict[str, int] = {hat[x]: sig.type_of(x) for x in sig}
    types.update(real)

    # image copies: every label barred apart per (round, letter)
    copies = []  # (round, letter, grammar, bar map, barred fresh start)
    for j, s in enumerate(rounds):
        for x in sorted(s):
            img = s[x]
            inner = Namer(img.labels)
            s0, itypes, itables = _fresh_start(img, inner)
            b = {y: namer.fresh(f"{y}{BAR}{j}:{x}" if len(rounds) > 1 else f"{y}{BAR}{x}") for y in itypes}
            types.update({b[y]: k for y, k in itypes.items()})
            copies.append((j, x, img, itypes, itables, b, s0))
    kmax = max(types.values())
    fin = {i: namer.fresh(f"F{i}") for i in range(kmax + 1)}
    types.update({f: i for i, f in fin.items()})

    ident: Table = {x: [_handle(x, k)] for x, k in types.items()}
    failure: Table = {x: [_handle(fin[k], k)] for x, k in types.items()}
    tables: list[Table] = []
    for idx in g.rule_index:
        over = {hat[x]: [r.relabel(hat) for r in rs] for x, rs in idx.items()}
        tables.append(_override(ident, over))
    start_of = {(j, x): c[5][c[6]] for c in copies for j, x in [(c[0], c[1])]}
    for j, s in enumerate(rounds):
        over = {}
        for a in sorted(g.terminals):
            target = [_handle(start_of[(j, a)], real[a])] if a in s else [_handle(a, real[a])]
            over[hat[a]] = target
        if iterate:
            for a in sorted(real):
                over[a] = [_handle(start_of[(j, a)], real[a])] if a in s else [_handle(a, real[a])]
        tables.append(_override(failure, over))
    if iterate:
        tables.append(_override(failure, {hat[a]: [_handle(a, real[a])] for a in g.terminals}))
    for j, x, img, itypes, itables, b, s0 in copies:
        bs = b[s0]
        for it in itables:
            over = {b[y]: [r.relabel(b) for r in rs] for y, rs in it.items()}
            over[bs] = over[bs] + [_handle(bs, itypes[s0])]
            tables.append(_override(ident, over))
        end: Table = {}
        for y, k in itypes.items():
            if y in img.terminals:
                end[b[y]] = [_handle(y, k)]
            elif y != s0:
                end[b[y]] = [_handle(fin[k], k)]
        tables.append(_override(ident, end))
    name = "iter-subst" if iterate else "subst"
    return _make(types, set(real) if iterate else _output_terminals(g, rounds[0], real), hat[g.start], tables,
                 _meta(name, 1, 0, part=3))


def _output_terminals(g: PHRGrammar, s: Mapping[str, PHRGrammar], real: Mapping[str, int]) -> set[str]:
    out = {a for a in g.terminals if a not in s}
    for img in s.values():
        out |= set(img.terminals)
    return out
