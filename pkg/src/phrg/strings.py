"""String languages: ET0L interop, regular carriers and closure operators.

A grammar is read as a string language through the string graphs it
generates; the empty word is never part of such a language.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .automata import DFA
from .decide import EMPTY_LABEL, emptiness, intersect_regular
from .errors import UnsupportedShape, ValidationError
from .grammar import PHRGrammar, enumerate_language
from .hypergraph import Hypergraph, Signature, str_of, string_graph
from .names import Namer
from .transform import (
    BAR,
    HRGrammar,
    eliminate_unreachable,
    iterate_substitutions,
    properize,
    substitute_finite,
    substitute_grammars,
)

Word = tuple[str, ...]


def word(w: str | Sequence[str]) -> Word:
    """Single-character letters may be given as a plain string."""
    return tuple(w)


# ET0L ------------------------------------------------------------------------


@dataclass(frozen=True)
class ET0LGrammar:
    alphabet: tuple[str, ...]
    terminals: frozenset[str]
    start: str
    tables: tuple[tuple[tuple[str, Word], ...], ...]
    meta: Mapping[str, object] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        tables = tuple(tuple(sorted({(l, tuple(r)) for l, r in t})) for t in self.tables)
        object.__setattr__(self, "tables", tables)
        if not tables:
            raise ValidationError("an ET0L grammar needs at least one table")
        sigma = set(self.alphabet)
        if self.start not in sigma or not self.terminals <= sigma:
            raise ValidationError("start and terminals must belong to the alphabet")
        problems = []
        for i, t in enumerate(tables, 1):
            lhs = {l for l, _ in t}
            for l, r in t:
                if l not in sigma or not set(r) <= sigma:
                    problems.append(f"table {i}: rule {l}->{''.join(r)} uses a letter outside the alphabet")
            for a in self.alphabet:
                if a not in lhs:
                    problems.append(f"table {i} has no rule for {a!r}")
        if problems:
            raise ValidationError("ET0L grammar is not left-total", problems)

    @staticmethod
    def build(alphabet, terminals, start, tables) -> "ET0LGrammar":
        return ET0LGrammar(tuple(alphabet), frozenset(terminals), start,
                           tuple(tuple((l, word(r)) for l, r in t) for t in tables))

    def index(self) -> list[dict[str, list[Word]]]:
        out = []
        for t in self.tables:
            d: dict[str, list[Word]] = {}
            for l, r in t:
                d.setdefault(l, []).append(r)
            out.append(d)
        return out

    def is_propagating(self) -> bool:
        return all(r for t in self.tables for _, r in t)


def et0l_interpret(e: ET0LGrammar, max_len: int, max_form: int | None = None) -> set[Word]:
    """Terminal words of length ≤ ``max_len`` derivable in ``e``.

    Sentential forms longer than ``max_form`` are not explored.  For
    propagating grammars forms never shrink, so the default bound
    (``max_len``) is exact; otherwise pass a larger one.
    """
    if max_form is None:
        max_form = max_len if e.is_propagating() else 2 * max_len + 2
    idx = e.index()
    start = (e.start,)
    seen = {start}
    queue = deque([start])
    out: set[Word] = set()
    if e.start in e.terminals and max_len >= 1:
        out.add(start)
    while queue:
        f = queue.popleft()
        for t in idx:
            for g in _et0l_step(f, t, max_form):
                if g in seen:
                    continue
                seen.add(g)
                queue.append(g)
                if len(g) <= max_len and all(a in e.terminals for a in g):
                    out.add(g)
    out.discard(())
    return out


def _et0l_step(f: Word, table: Mapping[str, list[Word]], bound: int) -> set[Word]:
    opts = [table[a] for a in f]
    mins = [min(len(r) for r in o) for o in opts]
    suffix = [0] * (len(f) + 1)
    for i in range(len(f) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + mins[i]
    out: set[Word] = set()
    if suffix[0] > bound:
        return out

    def rec(i: int, acc: Word):
        if i == len(f):
            out.add(acc)
            return
        for r in opts[i]:
            if len(acc) + len(r) + suffix[i + 1] <= bound:
                rec(i + 1, acc + r)

    rec(0, ())
    return out


def make_propagating(e: ET0LGrammar) -> ET0LGrammar:
    """Equivalent grammar (up to the empty word) without erasing rules.

    A symbol [a, P] is an occurrence of ``a`` whose remaining trace erases
    exactly the letters in P; plain letters stand for P = ∅.  Instead of
    erasing, a rule drops letters of its right-hand side that belong to the
    prediction of its children.  The prediction is checked step by step:
    [a, P] may only use table t towards children [b, P'] with P = f_t(P'),
    where f_t(P') is the set of letters that table t sends into P'*.
    """
    if e.is_propagating():
        return e
    idx = e.index()
    sigma = e.alphabet

    def f(t: int, p: frozenset[str]) -> frozenset[str]:
        return frozenset(a for a in sigma if any(set(r) <= p for r in idx[t][a]))

    preds = {frozenset()}
    todo = [frozenset()]
    while todo:
        p = todo.pop()
        for t in range(len(idx)):
            q = f(t, p)
            if q not in preds:
                preds.add(q)
                todo.append(q)
    preds_sorted = sorted(preds, key=lambda p: (len(p), sorted(p)))
    namer = Namer(sigma)
    names: dict[tuple[str, frozenset[str]], str] = {}

    def name(a: str, p: frozenset[str]) -> str:
        if not p:
            return a
        k = (a, p)
        if k not in names:
            names[k] = namer.fresh(f"[{a},{''.join(sorted(p))}]")
        return names[k]

    tables: list[list[tuple[str, Word]]] = [[] for _ in idx]
    done: set[tuple[str, frozenset[str]]] = set()
    queue = deque([(e.start, frozenset())])
    done.add((e.start, frozenset()))
    dead = None
    while queue:
        a, p = queue.popleft()
        lhs = name(a, p)
        for t in range(len(idx)):
            rules: set[Word] = set()
            for p2 in preds_sorted:
                if p and f(t, p2) != p:
                    continue
                for r in idx[t][a]:
                    for kept in _keepings(r, p2):
                        rhs = tuple(name(b, p2) for b in kept)
                        rules.add(rhs)
                        for b in kept:
                            if (b, p2) not in done:
                                done.add((b, p2))
                                queue.append((b, p2))
            if not rules:
                if dead is None:
                    dead = namer.fresh("#")
                rules = {(dead,)}
            tables[t].extend((lhs, r) for r in sorted(rules))
    alphabet = [name(a, p) for a, p in sorted(done, key=lambda x: (x[0], sorted(x[1])))]
    if dead is not None:
        alphabet.append(dead)
        for t in tables:
            t.append((dead, (dead,)))
    # plain letters that were never reached still need rules for totality
    listed = set(alphabet)
    return ET0LGrammar(
        tuple(alphabet),
        frozenset(a for a in e.terminals if a in listed),
        e.start,
        tuple(tuple(t) for t in tables),
        {"construction": "propagating"},
    )


def _keepings(r: Word, droppable: frozenset[str]) -> Iterable[Word]:
    """Non-empty subsequences of ``r`` obtained by dropping droppable letters."""
    opt = [i for i, b in enumerate(r) if b in droppable]
    for k in range(len(opt) + 1):
        for drop in itertools.combinations(opt, k):
            kept = tuple(b for i, b in enumerate(r) if i not in drop)
            if kept:
                yield kept


def import_et0l(e: ET0LGrammar) -> PHRGrammar:
    p = make_propagating(e)
    types = {a: 2 for a in p.alphabet}
    sig = Signature(types)
    tables = [[(l, string_graph(r, sig)) for l, r in t] for t in p.tables]
    return PHRGrammar.build(types, p.terminals, p.start, tables, meta={"construction": "import-et0l"})


def export_et0l(g: PHRGrammar) -> ET0LGrammar:
    """Read an order-2 string grammar back as ET0L.

    Raises UnsupportedShape when some label is not of type 2 or some
    right-hand side is not a string graph.
    """
    h = eliminate_unreachable(properize(g))
    bad = [x for x in h.labels if h.signature.type_of(x) != 2]
    if bad:
        raise UnsupportedShape(f"labels {bad} are not of type 2")
    tables = []
    for i, t in enumerate(h.tables, 1):
        rows = []
        for r in t:
            w = str_of(r.rhs)
            if w is None:
                raise UnsupportedShape(f"table {i}: right-hand side for {r.lhs!r} is not a string graph")
            rows.append((r.lhs, w))
        tables.append(tuple(rows))
    return ET0LGrammar(h.labels, h.terminals, h.start, tuple(tables), {"construction": "export-et0l"})


# string views ----------------------------------------------------------------


def string_language(
    g: PHRGrammar, max_len: int, max_steps: int = 12, slack: int = 2, empty_label: str = EMPTY_LABEL
) -> set[Word]:
    """Words of length ≤ ``max_len`` read off the enumerated string graphs.

    Intermediate graphs may carry ``slack`` more edges than the target
    length (control symbols, erasing markers).
    """
    r = enumerate_language(g, max_steps=max_steps, max_edges=max_len + slack)
    out = set()
    for h in r.graphs:
        w = str_of(h, empty_label)
        if w and len(w) <= max_len:
            out.add(w)
    return out


def generates_edgeless(g: PHRGrammar) -> bool:
    """Can ``g`` derive a graph without edges (for string grammars: ε)?"""
    bare = PHRGrammar(g.signature, frozenset(), g.start, g.tables, g.control)
    return not emptiness(bare).empty


# regular languages -----------------------------------------------------------


def regular_to_hr(dfa: DFA) -> HRGrammar:
    """Right-linear HR grammar for L(dfa) without the empty word."""
    m = dfa
    live = m.useful_states()
    namer = Namer(str(a) for a in m.alphabet)
    nt = {q: namer.fresh(f"<{q}>") for q in m.states if q in live or q == m.start}
    letters = sorted(str(a) for a in m.alphabet)
    types = {n: 2 for n in nt.values()}
    types.update({a: 2 for a in letters})
    sig = Signature(types)
    rules = []
    for (q, a), r in sorted(m.delta.items(), key=lambda x: (x[0][0], str(x[0][1]))):
        if q not in nt or r not in live:
            continue
        if r in m.finals:
            rules.append((nt[q], string_graph([a], sig)))
        if r in nt:
            rules.append((nt[q], Hypergraph(3, ((a, (0, 1)), (nt[r], (1, 2))), (0, 2))))
    return HRGrammar.build(types, set(nt.values()), nt[m.start], rules)


def _words_dfa(words: Iterable[Sequence[str]], alphabet: Iterable[str]) -> DFA:
    """Trie automaton for a finite set of words."""
    states = {(): "t0"}
    delta = {}
    for w in words:
        cur = ()
        for a in w:
            nxt = cur + (a,)
            if nxt not in states:
                states[nxt] = f"t{len(states)}"
            delta[(states[cur], a)] = states[nxt]
            cur = nxt
    finals = frozenset(states[tuple(w)] for w in words)
    return DFA(tuple(states.values()), tuple(alphabet), delta, "t0", finals)


def _plus_dfa(a: str) -> DFA:
    return DFA(("0", "1"), (a,), {("0", a): "1", ("1", a): "1"}, "0", frozenset({"1"}))


# closure operators -----------------------------------------------------------


def _strip_empty(g: PHRGrammar) -> PHRGrammar:
    """Remove the ε string graph from L(g) when g can derive it."""
    if not generates_edgeless(g):
        return g
    letters = sorted(a for a in g.terminals if g.signature.type_of(a) == 2)
    m = DFA(("0", "1"), tuple(letters), {**{("0", a): "1" for a in letters}, **{("1", a): "1" for a in letters}},
            "0", frozenset({"1"}))
    return intersect_regular(g, m)


def _carrier(dfa: DFA, images: Mapping[str, PHRGrammar], construction: str, **meta) -> PHRGrammar:
    out = substitute_grammars(regular_to_hr(dfa), {x: _strip_empty(g) for x, g in images.items()})
    return out.with_meta(operator=construction, **meta)


def union_l(g1: PHRGrammar, g2: PHRGrammar) -> PHRGrammar:
    d = _words_dfa([("X",), ("Y",)], ("X", "Y"))
    return _carrier(d, {"X": g1, "Y": g2}, "union")


def concat_l(g1: PHRGrammar, g2: PHRGrammar) -> PHRGrammar:
    d = _words_dfa([("X", "Y")], ("X", "Y"))
    return _carrier(d, {"X": g1, "Y": g2}, "concat")


def plus_l(g: PHRGrammar) -> PHRGrammar:
    return _carrier(_plus_dfa("X"), {"X": g}, "plus")


def finite_string_grammar(words: Iterable[Sequence[str]], empty_label: str = EMPTY_LABEL) -> PHRGrammar:
    """One-table grammar for a finite set of words (ε becomes an ``empty`` edge)."""
    from .transform import finite_grammar

    graphs = [_word_graph(w, empty_label) for w in words]
    return finite_grammar(graphs)


def _word_graph(w: Sequence[str], empty_label: str = EMPTY_LABEL) -> Hypergraph:
    return string_graph(tuple(w) if len(w) else (empty_label,))


def apply_string_substitution(
    g: PHRGrammar,
    h: Mapping[str, Iterable[Sequence[str]] | PHRGrammar],
    empty_label: str = EMPTY_LABEL,
) -> PHRGrammar:
    """Image of STR(L(g)) under a substitution of its letters.

    Finite images may contain ε; such occurrences become ``empty`` edges that
    the string reading ignores.  Letters of g without an image are kept.
    """
    for a in h:
        if a not in g.terminals:
            raise ValidationError(f"letter {a!r} is not a terminal of the grammar")
    if all(not isinstance(v, PHRGrammar) for v in h.values()):
        fin = {a: [_word_graph(tuple(w), empty_label) for w in ws] for a, ws in h.items()}  # type: ignore[union-attr]
        out = substitute_finite(g, fin)
    else:
        imgs = {}
        for a, v in h.items():
            imgs[a] = v if isinstance(v, PHRGrammar) else finite_string_grammar(v, empty_label)  # type: ignore[arg-type]
        out = substitute_grammars(g, imgs)
    return out.with_meta(operator="substitution", empty_label=empty_label)


def apply_homomorphism(g: PHRGrammar, phi: Mapping[str, Sequence[str]], empty_label: str = EMPTY_LABEL) -> PHRGrammar:
    return apply_string_substitution(g, {a: [tuple(w)] for a, w in phi.items()}, empty_label)


def apply_weak_coding(g: PHRGrammar, phi: Mapping[str, str | None], empty_label: str = EMPTY_LABEL) -> PHRGrammar:
    """Letter-to-letter-or-ε homomorphism (``None`` or ``""`` erases)."""
    for a, b in phi.items():
        if b and len(word(b)) != 1:
            raise ValidationError(f"weak coding image of {a!r} must be a single letter or empty")
    return apply_homomorphism(g, {a: (word(b) if b else ()) for a, b in phi.items()}, empty_label)


def inverse_homomorphism(
    g: PHRGrammar, phi: Mapping[str, Sequence[str]], empty_label: str = EMPTY_LABEL
) -> PHRGrammar:
    """Grammar for {w : φ(w) ∈ STR(L(g))} (w non-empty).

    Pipeline: insert barred copies of the source letters anywhere
    (a ↦ B̄* a B̄*), keep the words of the form φ(x1) x̄1 ⋯ φ(xn) x̄n, then
    erase the target letters and unbar.
    """
    targets = sorted(a for a in g.terminals if g.signature.type_of(a) == 2 and a != empty_label)
    src = sorted(phi)
    namer = Namer(set(targets) | set(src) | set(g.labels))
    bar = {b: namer.fresh(b + BAR) for b in src}
    barred = [bar[b] for b in src]
    # a ↦ B̄* a B̄*
    sigma = {}
    for a in targets:
        states = ("0", "1")
        alpha = tuple(barred) + (a,)
        delta = {("0", x): "0" for x in barred}
        delta.update({("0", a): "1"})
        delta.update({("1", x): "1" for x in barred})
        from .transform import import_hr

        sigma[a] = import_hr(regular_to_hr(DFA(states, alpha, delta, "0", frozenset({"1"}))))
    step1 = substitute_grammars(g, sigma)
    k = _interleave_dfa(phi, bar, targets)
    step2 = intersect_regular(step1, k, empty_label)
    psi: dict[str, Sequence[str]] = {a: () for a in targets if a in step2.terminals}
    psi.update({bar[b]: (b,) for b in src if bar[b] in step2.terminals})
    out = apply_homomorphism(step2, psi, empty_label)
    return out.with_meta(operator="inverse-homomorphism")


def _interleave_dfa(phi: Mapping[str, Sequence[str]], bar: Mapping[str, str], targets: Sequence[str]) -> DFA:
    """Automaton for (φ(b) b̄)^+ over target letters plus barred sources."""
    alphabet = tuple(targets) + tuple(bar[b] for b in sorted(phi))
    # states: prefixes of some φ(b); "0" doubles as the accepting hub after b̄
    prefixes: dict[tuple[str, ...], str] = {(): "h"}
    delta: dict[tuple[str, str], str] = {}
    for b in sorted(phi):
        w = tuple(phi[b])
        for i in range(len(w)):
            p, p2 = w[:i], w[: i + 1]
            if p2 not in prefixes:
                prefixes[p2] = f"p{len(prefixes)}"
            delta[(prefixes[p], w[i])] = prefixes[p2]
    states = list(prefixes.values()) + ["acc"]
    for b in sorted(phi):
        end = prefixes[tuple(phi[b])]
        delta[(end, bar[b])] = "acc"
    # after an accepting b̄ we are back at the hub
    for (q, x), r in list(delta.items()):
        if q == "h":
            delta[("acc", x)] = r
    return DFA(tuple(states), alphabet, delta, "h", frozenset({"acc"})).complete()


def free_product_wp(g1: PHRGrammar, g2: PHRGrammar) -> PHRGrammar:
    """Smallest language containing L1 ∪ L2 and closed under inserting a
    word of L1 ∪ L2 before or after any letter of one of its words.

    Realised as iterated application of x ↦ {x} ∪ xM ∪ Mx (M = L1 ∪ L2).
    """
    a1 = {a for a in g1.terminals if g1.signature.type_of(a) == 2}
    a2 = {a for a in g2.terminals if g2.signature.type_of(a) == 2}
    if a1 & a2:
        raise ValidationError(f"alphabets overlap on {sorted(a1 & a2)}")
    m = union_l(g1, g2)
    h = {}
    for x in sorted(a1 | a2):
        sx = finite_string_grammar([(x,)])
        h[x] = union_l(sx, union_l(concat_l(sx, m), concat_l(m, sx)))
    return iterate_substitutions(m, [h]).with_meta(operator="free-product")
