"""Parallel hyperedge replacement grammars and their derivations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .automata import DFA
from .errors import BadTrace, TypingError, UnknownLabel, ValidationError
from .hypergraph import Hypergraph, Signature, handle, replace


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: Hypergraph


def _normalise_table(rules: Iterable[Rule | tuple[str, Hypergraph]]) -> tuple[Rule, ...]:
    """Drop rules that repeat an earlier one up to isomorphism.

    Canonical keys are expensive, so rules are first bucketed by a cheap
    invariant and only compared within crowded buckets.
    """
    buckets: dict[tuple, list[Rule]] = {}
    order: list[Rule] = []
    for r in rules:
        if not isinstance(r, Rule):
            r = Rule(*r)
        h = r.rhs
        inv = (r.lhs, h.num_nodes, len(h.ext), tuple(sorted(lab for lab, _ in h.edges)))
        peers = buckets.setdefault(inv, [])
        if any(p.rhs == h or p.rhs.key == h.key for p in peers):
            continue
        peers.append(r)
        order.append(r)
    return tuple(order)


@dataclass(frozen=True)
class PHRGrammar:
    """A PHR grammar (signature, terminals, start, tables, optional control).

    Tables are stored 0-based but addressed 1-based everywhere in the public
    API (``table(1)`` is the first table, traces use 1..l).
    """

    signature: Signature
    terminals: frozenset[str]
    start: str
    tables: tuple[tuple[Rule, ...], ...]
    control: DFA | None = None
    meta: Mapping[str, object] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "tables", tuple(_normalise_table(t) for t in self.tables))
        if self.start not in self.signature:
            raise UnknownLabel(self.start)
        for a in self.terminals:
            if a not in self.signature:
                raise UnknownLabel(a)
        if not self.tables:
            raise ValidationError("a grammar needs at least one table")

    @staticmethod
    def build(
        types: Mapping[str, int],
        terminals: Iterable[str],
        start: str,
        tables: Sequence[Iterable[tuple[str, Hypergraph]]],
        control: DFA | None = None,
        meta: Mapping[str, object] | None = None,
    ) -> "PHRGrammar":
        return PHRGrammar(
            Signature(types),
            frozenset(terminals),
            start,
            tuple(tuple(Rule(l, r) for l, r in t) for t in tables),
            control,
            dict(meta or {}),
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return self.signature.labels

    @property
    def nonterminals(self) -> frozenset[str]:
        return frozenset(self.signature.labels) - self.terminals

    @property
    def table_count(self) -> int:
        return len(self.tables)

    @property
    def order(self) -> int:
        return max((len(r.rhs.ext) for t in self.tables for r in t), default=0)

    def table(self, i: int) -> tuple[Rule, ...]:
        if not 1 <= i <= len(self.tables):
            raise BadTrace(f"no table {i} (grammar has {len(self.tables)})")
        return self.tables[i - 1]

    @cached_property
    def rule_index(self) -> tuple[dict[str, tuple[Hypergraph, ...]], ...]:
        """Per table: label -> right-hand sides."""
        out = []
        for t in self.tables:
            idx: dict[str, list[Hypergraph]] = {}
            for r in t:
                idx.setdefault(r.lhs, []).append(r.rhs)
            out.append({k: tuple(v) for k, v in idx.items()})
        return tuple(out)

    def start_graph(self) -> Hypergraph:
        return handle(self.start, self.signature)

    def is_repetition_free(self) -> bool:
        return all(r.rhs.is_repetition_free() for t in self.tables for r in t)

    def is_proper(self) -> bool:
        return all(r.rhs.is_proper() for t in self.tables for r in t)

    def with_meta(self, **kw) -> "PHRGrammar":
        m = dict(self.meta)
        m.update(kw)
        return PHRGrammar(self.signature, self.terminals, self.start, self.tables, self.control, m)

    def without_control(self) -> "PHRGrammar":
        return PHRGrammar(self.signature, self.terminals, self.start, self.tables, None, dict(self.meta))


# validation ------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    totality_violations: list[tuple[int, str]]
    typing_violations: list[str]
    order: int
    table_count: int
    table_flags: list[dict[str, bool]]
    synchronised: bool
    notes: list[str]
    grammar: PHRGrammar | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "totality_violations": [{"table": t, "label": l} for t, l in self.totality_violations],
            "typing_violations": list(self.typing_violations),
            "order": self.order,
            "table_count": self.table_count,
            "tables": self.table_flags,
            "synchronised": self.synchronised,
            "notes": list(self.notes),
        }


def validate(g: PHRGrammar, mode: str = "strict") -> ValidationReport:
    """Check totality and typing.

    In ``"repair"`` mode, labels missing from a table get the identity rule
    (X, X^•) and the repaired grammar is returned in the report.
    """
    if mode not in ("strict", "repair"):
        raise ValueError(f"unknown validation mode {mode!r}")
    sig = g.signature
    typing: list[str] = []
    for i, t in enumerate(g.tables, 1):
        for r in t:
            if r.lhs not in sig:
                typing.append(f"table {i}: rule lhs {r.lhs!r} is not a label")
                continue
            if sig.type_of(r.lhs) != len(r.rhs.ext):
                typing.append(
                    f"table {i}: rule for {r.lhs!r} has rhs of type {len(r.rhs.ext)}, expected {sig.type_of(r.lhs)}"
                )
            for lab, att in r.rhs.edges:
                if lab not in sig:
                    typing.append(f"table {i}: rhs of {r.lhs!r} uses unknown label {lab!r}")
                elif sig.type_of(lab) != len(att):
                    typing.append(f"table {i}: rhs of {r.lhs!r} has {lab!r} edge with {len(att)} tentacles")
    if g.control is not None:
        bad = [a for a in g.control.alphabet if not (isinstance(a, int) and 1 <= a <= len(g.tables))]
        if bad:
            typing.append(f"control automaton uses letters that are not table indices: {bad}")
    missing = [(i, x) for i, idx in enumerate(g.rule_index, 1) for x in sig if x not in idx]
    notes: list[str] = []
    repaired = None
    if mode == "repair" and missing and not typing:
        tables = []
        for i, t in enumerate(g.tables, 1):
            extra = [Rule(x, handle(x, sig)) for (j, x) in missing if j == i]
            tables.append(t + tuple(extra))
        repaired = PHRGrammar(sig, g.terminals, g.start, tuple(tables), g.control, dict(g.meta))
        notes.append(f"added {len(missing)} identity rule(s)")
        g = repaired
        missing_report: list[tuple[int, str]] = []
    else:
        missing_report = missing
    flags = [
        {
            "repetition_free": all(r.rhs.is_repetition_free() for r in t),
            "proper": all(r.rhs.is_proper() for r in t),
            "well_formed": all(r.rhs.is_repetition_free() and r.rhs.is_proper() for r in t),
        }
        for t in g.tables
    ]
    ok = not typing and not missing_report
    return ValidationReport(
        ok=ok,
        totality_violations=missing_report,
        typing_violations=typing,
        order=g.order,
        table_count=g.table_count,
        table_flags=flags,
        synchronised=is_synchronised_syntactically(g) if not typing else False,
        notes=notes,
        grammar=repaired if repaired is not None else (g if ok else None),
    )


def require_valid(g: PHRGrammar) -> PHRGrammar:
    rep = validate(g)
    if not rep.ok:
        problems = rep.typing_violations + [f"table {t} has no rule for {l!r}" for t, l in rep.totality_violations]
        raise ValidationError("invalid grammar: " + "; ".join(problems), problems)
    return g


# derivations -----------------------------------------------------------------


def _successors(
    h: Hypergraph,
    idx: Mapping[str, Sequence[Hypergraph]],
    max_edges: int | None = None,
    live: Callable[[frozenset[str]], bool] | None = None,
) -> Iterator[Hypergraph]:
    # ``live`` must be downward closed; partial choices are cut as soon as
    # the labels collected so far can no longer become terminal
    options = []
    for lab, _ in h.edges:
        try:
            options.append(idx[lab])
        except KeyError:
            raise ValidationError(f"table has no rule for label {lab!r}") from None
    n = len(options)
    if max_edges is not None:
        mins = [min(len(r.edges) for r in opts) for opts in options]
        suffix = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            suffix[i] = suffix[i + 1] + mins[i]
        if suffix[0] > max_edges:
            return
    choice: list[Hypergraph] = [None] * n  # type: ignore[list-item]

    def rec(i: int, used: int, labs: frozenset[str]):
        if i == n:
            yield replace(h, dict(enumerate(choice)))
            return
        for r in options[i]:
            u = used + len(r.edges)
            if max_edges is not None and u + suffix[i + 1] > max_edges:
                continue
            l2 = labs
            if live is not None:
                l2 = labs | r.labels
                if l2 != labs and not live(l2):
                    continue
            choice[i] = r
            yield from rec(i + 1, u, l2)

    yield from rec(0, 0, frozenset())


def direct_successors(
    h: Hypergraph, table: Sequence[Rule] | Mapping[str, Sequence[Hypergraph]], max_edges: int | None = None
) -> list[Hypergraph]:
    """All parallel direct successors of ``h``, deduplicated up to isomorphism."""
    if isinstance(table, Mapping):
        idx = table
    else:
        d: dict[str, list[Hypergraph]] = {}
        for r in table:
            d.setdefault(r.lhs, []).append(r.rhs)
        idx = d
    out: dict[bytes, Hypergraph] = {}
    for s in _successors(h, idx, max_edges):
        out.setdefault(s.key, s)
    return [out[k] for k in sorted(out)]


def derive(h: Hypergraph, trace: Sequence[int], g: PHRGrammar, max_edges: int | None = None) -> list[Hypergraph]:
    """All graphs reachable from ``h`` along ``trace`` (1-based table indices)."""
    for i in trace:
        g.table(i)
    cur = {h.key: h}
    for i in trace:
        nxt: dict[bytes, Hypergraph] = {}
        idx = g.rule_index[i - 1]
        for x in cur.values():
            for s in _successors(x, idx, max_edges):
                nxt.setdefault(s.key, s)
        cur = nxt
    return [cur[k] for k in sorted(cur)]


@dataclass
class Enumeration:
    graphs: list[Hypergraph]
    traces: dict[bytes, tuple[int, ...]]
    steps: int
    saturated: bool
    edge_pruned: bool
    result_limited: bool
    explored: int

    @property
    def truncated(self) -> bool:
        return (not self.saturated) or self.edge_pruned or self.result_limited

    def edge_counts(self) -> list[int]:
        return sorted(len(h.edges) for h in self.graphs)

    def keys(self) -> set[bytes]:
        return {h.key for h in self.graphs}


def enumerate_language(
    g: PHRGrammar,
    max_steps: int = 8,
    max_edges: int = 32,
    max_results: int = 10000,
    prune_dead: bool = True,
) -> Enumeration:
    """Breadth-first bounded enumeration of L(g).

    States are (graph up to isomorphism, control state).  Graphs with more
    than ``max_edges`` edges are dropped, and so are graphs whose label set
    can provably never become terminal (``prune_dead``).
    """
    if max_steps < 0 or max_edges < 0 or max_results < 1:
        raise ValueError("bounds must be positive")
    live: Callable[[frozenset[str]], bool] | None = None
    if prune_dead:
        from .decide import productive_checker

        live = productive_checker(g)
    ctrl = g.control
    if ctrl is not None:
        ctrl = ctrl.complete()
        useful = _coreachable(ctrl)
    terms = g.terminals
    results: dict[bytes, Hypergraph] = {}
    traces: dict[bytes, tuple[int, ...]] = {}
    edge_pruned = False
    result_limited = False

    def emit(h: Hypergraph, q, trace) -> bool:
        if h.is_terminal(terms) and (ctrl is None or q in ctrl.finals):
            if h.key not in results:
                if len(results) >= max_results:
                    return False
                results[h.key] = h
                traces[h.key] = trace
        return True

    start = g.start_graph()
    q0 = ctrl.start if ctrl is not None else None
    frontier: list[tuple[Hypergraph, object, tuple[int, ...]]] = []
    visited: set[tuple[bytes, object]] = set()
    if len(start.edges) <= max_edges and (live is None or live(start.labels)):
        visited.add((start.key, q0))
        frontier.append((start, q0, ()))
        emit(start, q0, ())
    steps = 0
    explored = 1
    while frontier and steps < max_steps and not result_limited:
        steps += 1
        nxt: list[tuple[Hypergraph, object, tuple[int, ...]]] = []
        for h, q, trace in frontier:
            for i, idx in enumerate(g.rule_index, 1):
                if ctrl is not None:
                    q2 = ctrl.delta[(q, i)]
                    if q2 not in useful:
                        continue
                else:
                    q2 = None
                for s in _successors(h, idx, max_edges, live):
                    k = (s.key, q2)
                    if k in visited:
                        continue
                    if live is not None and not live(s.labels):
                        continue
                    visited.add(k)
                    explored += 1
                    t2 = trace + (i,)
                    if not emit(s, q2, t2):
                        result_limited = True
                        break
                    nxt.append((s, q2, t2))
                if result_limited:
                    break
                if not edge_pruned and _would_exceed(h, idx, max_edges):
                    edge_pruned = True
            if result_limited:
                break
        nxt.sort(key=lambda x: (x[0].key, str(x[1])))
        frontier = nxt
    order = sorted(results)
    return Enumeration(
        graphs=[results[k] for k in order],
        traces={k: traces[k] for k in order},
        steps=steps,
        saturated=not frontier,
        edge_pruned=edge_pruned,
        result_limited=result_limited,
        explored=explored,
    )


def _would_exceed(h: Hypergraph, idx, max_edges: int) -> bool:
    return sum(max(len(r.edges) for r in idx[lab]) for lab, _ in h.edges) > max_edges


def _coreachable(d: DFA) -> set:
    back: dict = {}
    for (q, a), r in d.delta.items():
        back.setdefault(r, set()).add(q)
    seen = set(d.finals)
    todo = list(seen)
    while todo:
        r = todo.pop()
        for q in back.get(r, ()):
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def language_keys(g: PHRGrammar, **bounds) -> set[bytes]:
    return enumerate_language(g, **bounds).keys()


# synchronisation certificate -------------------------------------------------


def final_target(g: PHRGrammar, x: str) -> str | None:
    """The label Y such that x is Y-final, if any."""
    target = None
    for t in g.rule_index:
        for r in t.get(x, ()):
            if len(r.edges) != 1:
                return None
            y = r.edges[0][0]
            if r.key != handle(y, g.signature).key:
                return None
            if target is None:
                target = y
            elif target != y:
                return None
    return target


def is_synchronised_syntactically(g: PHRGrammar) -> bool:
    """Certificate shape: final symbols of every type up to the order, every
    terminal sent to the final symbol of its type, and a start symbol that no
    right-hand side mentions."""
    sig = g.signature
    finals_by_type: dict[int, str] = {}
    for x in sig:
        if x in g.terminals:
            continue
        if final_target(g, x) == x:
            finals_by_type.setdefault(sig.type_of(x), x)
    k = max([g.order] + [sig.type_of(x) for x in sig])
    if any(i not in finals_by_type for i in range(k + 1)):
        return False
    for a in g.terminals:
        y = final_target(g, a)
        if y is None or y in g.terminals or final_target(g, y) != y:
            return False
    for t in g.tables:
        for r in t:
            if any(lab == g.start for lab, _ in r.rhs.edges):
                return False
    return True


def is_synchronised_semantically(g: PHRGrammar, graphs: Iterable[Hypergraph]) -> list[Hypergraph]:
    """Return the terminal graphs (with at least one edge) that have a
    terminally labelled direct successor; empty list means the check passed.

    Edgeless graphs are skipped: they derive themselves under any table."""
    bad = []
    for h in graphs:
        if not h.edges or not h.is_terminal(g.terminals):
            continue
        for idx in g.rule_index:
            if any(s.is_terminal(g.terminals) for s in _successors(h, idx)):
                bad.append(h)
                break
    return bad


def check_rule_types(signature: Signature, lhs: str, rhs: Hypergraph) -> None:
    if signature.type_of(lhs) != len(rhs.ext):
        raise TypingError(f"rule for {lhs!r} has rhs of type {len(rhs.ext)}")
    rhs.check_typing(signature)
