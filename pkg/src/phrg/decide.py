"""Label-set abstraction, emptiness, rational intersection and membership."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .automata import DFA, dfa_for_word
from .errors import UnsupportedShape
from .grammar import PHRGrammar, Rule, _coreachable
from .hypergraph import Hypergraph, handle
from .names import Namer

EMPTY_LABEL = "empty"

LabelSet = frozenset[str]


def labels_of(h: Hypergraph) -> LabelSet:
    return frozenset(lab for lab, _ in h.edges)


class _Bits:
    """Bitset encoding of label sets for one grammar."""

    def __init__(self, g: PHRGrammar):
        self.labels = g.labels
        self.bit = {x: 1 << i for i, x in enumerate(self.labels)}
        self.index = {x: i for i, x in enumerate(self.labels)}
        self.terminal_mask = self.mask(g.terminals)
        self._g = g
        self._options: list[dict[str, tuple[int, ...]]] | None = None
        self._horn: _Horn | None = None

    @property
    def options(self) -> list[dict[str, tuple[int, ...]]]:
        # rhs masks are big ints; only the forward search needs them
        if self._options is None:
            self._options = []
            for idx in self._g.rule_index:
                opts = {}
                for x, rhss in idx.items():
                    opts[x] = tuple(sorted({self.mask(labels_of(r)) for r in rhss}))
                self._options.append(opts)
        return self._options

    @property
    def horn(self) -> "_Horn":
        if self._horn is None:
            self._horn = _Horn(self._g, self.index)
        return self._horn

    def mask(self, xs: Iterable[str]) -> int:
        m = 0
        for x in xs:
            m |= self.bit[x]
        return m

    def unmask(self, m: int) -> LabelSet:
        return frozenset(self.members(m))

    def members(self, m: int) -> list[str]:
        out = []
        while m:
            low = m & -m
            out.append(self.labels[low.bit_length() - 1])
            m ^= low
        return out


_bits_cache: dict[int, tuple[PHRGrammar, _Bits]] = {}


def _bits(g: PHRGrammar) -> _Bits:
    hit = _bits_cache.get(id(g))
    if hit is not None and hit[0] is g:
        return hit[1]
    b = _Bits(g)
    if len(_bits_cache) >= 4:
        _bits_cache.clear()
    _bits_cache[id(g)] = (g, b)
    return b


def _succ_masks(bits: _Bits, t: int, m: int, memo: dict) -> frozenset[int]:
    key = (t, m)
    hit = memo.get(key)
    if hit is not None:
        return hit
    opts = bits.options[t]
    partial = {0}
    for x in bits.members(m):
        partial = {p | o for p in partial for o in opts[x]}
    res = frozenset(partial)
    memo[key] = res
    return res


def label_set_successors(x: Iterable[str], table: Sequence[Rule] | int, g: PHRGrammar | None = None) -> set[LabelSet]:
    """One label-set step: pick one rule per label and union the rhs labels.

    ``table`` is either a 1-based index into ``g`` or an explicit rule list.
    """
    x = frozenset(x)
    if isinstance(table, int):
        assert g is not None
        rules = g.table(table)
    else:
        rules = table
    opts: dict[str, set[LabelSet]] = {}
    for r in rules:
        opts.setdefault(r.lhs, set()).add(labels_of(r.rhs))
    partial: set[LabelSet] = {frozenset()}
    for lab in sorted(x):
        if lab not in opts:
            raise KeyError(f"table has no rule for {lab!r}")
        partial = {p | o for p in partial for o in opts[lab]}
    return partial


def reachable_label_sets(g: PHRGrammar) -> set[LabelSet]:
    """Label sets reachable from {S} in one or more steps (control ignored)."""
    bits = _bits(g)
    memo: dict = {}
    start = bits.mask([g.start])
    seen: set[int] = set()
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for t in range(len(g.tables)):
            for m2 in _succ_masks(bits, t, m, memo):
                if m2 not in seen:
                    seen.add(m2)
                    queue.append(m2)
    return {bits.unmask(m) for m in seen}


# productivity ----------------------------------------------------------------
#
# For a trace w let V(w) be the set of labels whose handle derives a
# terminally labelled graph along w.  V(empty) = A and V(t w) is the set of
# labels having a rule in table t whose rhs labels all lie in V(w).  A label
# set X can still become terminal iff X is contained in some V(w).

MAX_VECTORS = 20000
EXACT_PRUNE_WORK = 4000


class _Horn:
    """Rules of every table as flat index arrays, so that one trace-vector
    step ("which labels have a rule whose rhs labels all lie in v") is a
    handful of vectorised operations instead of a loop over all rules."""

    def __init__(self, g: PHRGrammar, index: dict[str, int]):
        n = len(index)
        self.n = n
        self.nbytes = (n + 7) // 8
        self.tables = []
        for idx in g.rule_index:
            always = np.zeros(n, dtype=bool)
            lhs: list[int] = []
            flat: list[int] = []
            starts: list[int] = []
            for x, rhss in idx.items():
                i = index[x]
                for need in {frozenset(index[y] for y in labels_of(r)) for r in rhss}:
                    if not need:
                        always[i] = True
                        continue
                    starts.append(len(flat))
                    lhs.append(i)
                    flat.extend(need)
            self.tables.append(
                (always, np.array(lhs, dtype=np.intp), np.array(flat, dtype=np.intp), np.array(starts, dtype=np.intp))
            )

    def step(self, t: int, v: np.ndarray) -> np.ndarray:
        always, lhs, flat, starts = self.tables[t]
        out = always.copy()
        if len(lhs):
            missing = np.logical_or.reduceat(~v[flat], starts)
            out[lhs[~missing]] = True
        return out

    def to_array(self, m: int) -> np.ndarray:
        raw = np.frombuffer(m.to_bytes(self.nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)

    def to_int(self, v: np.ndarray) -> int:
        return int.from_bytes(np.packbits(v, bitorder="little").tobytes(), "little")


def productive_vectors(g: PHRGrammar, limit: int = MAX_VECTORS) -> tuple[list[int], bool]:
    """Reachable trace vectors as bitmasks; the flag is False when the
    exploration hit ``limit`` (the list is then incomplete)."""
    bits = _bits(g)
    horn = bits.horn
    start = horn.to_array(bits.terminal_mask)
    seen = {start.tobytes(): start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for t in range(len(horn.tables)):
            w = horn.step(t, v)
            k = w.tobytes()
            if k not in seen:
                if len(seen) >= limit:
                    return sorted(horn.to_int(x) for x in seen.values()), False
                seen[k] = w
                queue.append(w)
    return sorted(horn.to_int(x) for x in seen.values()), True


def _maximal(vs: Iterable[int]) -> list[int]:
    vs = sorted(set(vs), key=lambda v: -bin(v).count("1"))
    keep: list[int] = []
    for v in vs:
        if not any(v & ~k == 0 for k in keep):
            keep.append(v)
    return keep


def _productive_union(bits: _Bits) -> int:
    """Labels that derive a terminal graph along some trace (linear-time
    Horn-style fixpoint: a rule fires once all its rhs labels are known)."""
    known = bits.terminal_mask
    waiting: dict[int, list[list]] = {}
    ready: list[int] = []
    for opts in bits.options:
        for x, rhs in opts.items():
            bx = bits.bit[x]
            for r in rhs:
                missing = r & ~known
                if missing == 0:
                    ready.append(bx)
                    continue
                entry = [bin(missing).count("1"), bx]
                while missing:
                    low = missing & -missing
                    waiting.setdefault(low, []).append(entry)
                    missing ^= low
    while ready:
        bx = ready.pop()
        if known & bx:
            continue
        known |= bx
        for entry in waiting.pop(bx, ()):
            entry[0] -= 1
            if entry[0] == 0:
                ready.append(entry[1])
    return known


def _live_vectors(g: PHRGrammar, limit: int = MAX_VECTORS) -> list[int]:
    """Maximal trace vectors (or their union when there are too many)."""
    bits = _bits(g)
    vectors, complete = productive_vectors(g, limit) if limit > 1 else ([], False)
    if not complete:
        # the union over all traces is a sound over-approximation
        vectors = [_productive_union(bits)]
    return _maximal(vectors)


def productive_checker(g: PHRGrammar) -> Callable[[Iterable[str]], bool]:
    """Predicate on label sets: can a graph with these labels still derive a
    terminally labelled graph?  Exact without control; with control it
    over-approximates (never rejects a productive set)."""
    bits = _bits(g)
    maximal = _live_vectors(g)
    memo: dict[int, bool] = {}

    def check(labels: Iterable[str]) -> bool:
        m = bits.mask(labels)
        hit = memo.get(m)
        if hit is None:
            hit = any(m & ~v == 0 for v in maximal)
            memo[m] = hit
        return hit

    return check


def _minimal(ms: Iterable[int]) -> list[int]:
    out: list[int] = []
    for m in sorted(set(ms), key=lambda v: bin(v).count("1")):
        if not any(k & ~m == 0 for k in out):
            out.append(m)
    return out


def _min_succ_masks(bits: _Bits, t: int, m: int, memo: dict, maximal: list[int] | None) -> list[int]:
    """The inclusion-minimal live successors of ``m`` under table ``t``.

    Enough for emptiness: if X ⊆ Y then every step of Y is matched by a
    step of X into a subset, so supersets never reach terminal sets first.
    """
    key = (t, m)
    hit = memo.get(key)
    if hit is not None:
        return hit
    opts = bits.options[t]
    partial = [0]
    for x in sorted(bits.members(m), key=lambda x: len(opts[x])):
        nxt = {p | o for p in partial for o in opts[x]}
        if maximal is not None:
            nxt = {p for p in nxt if any(p & ~v == 0 for v in maximal)}
        partial = _minimal(nxt)
        if not partial:
            break
    memo[key] = partial
    return partial


# emptiness -------------------------------------------------------------------


@dataclass
class Emptiness:
    empty: bool
    witness: list[tuple[int | None, LabelSet]]
    explored: int
    control_states: list[Hashable] = field(default_factory=list)

    def explain(self) -> list[str]:
        if self.empty:
            return [f"no terminal label set is reachable ({self.explored} label sets explored)"]
        lines = []
        for t, x in self.witness:
            step = "start" if t is None else f"table {t}"
            lines.append(f"{step}: {{{', '.join(sorted(x))}}}")
        return lines


class _SubsetIndex:
    """Set-trie over bitmasks (elements in increasing bit order), answering
    "is some stored set a subset of m" by only walking edges inside m."""

    def __init__(self):
        self.root: dict = {}

    def add(self, m: int) -> None:
        node = self.root
        while m:
            low = m & -m
            node = node.setdefault(low, {})
            m ^= low
        node[0] = True

    def has_subset_of(self, m: int) -> bool:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if 0 in node:
                return True
            if len(node) <= m.bit_count():
                for k, child in node.items():
                    if k and k & m:
                        stack.append(child)
            else:
                rest = m
                while rest:
                    low = rest & -rest
                    rest ^= low
                    child = node.get(low)
                    if child is not None:
                        stack.append(child)
        return False


EMPTINESS_VECTORS = 5000


def emptiness(g: PHRGrammar, prune: bool = True) -> Emptiness:
    """Decide L(g) = ∅.

    First a backward search over trace vectors (deterministic per table, so
    usually small); if that space grows past ``EMPTINESS_VECTORS`` the
    forward label-set search takes over.
    """
    found = _emptiness_by_vectors(g, EMPTINESS_VECTORS)
    if found is not None:
        return found
    return _emptiness_forward(g, prune)


def _emptiness_by_vectors(g: PHRGrammar, limit: int) -> Emptiness | None:
    """Search pairs (V(w), Q(w)) where V(w) holds the labels whose handle
    derives a terminal graph along trace w and Q(w) the control states from
    which w leads to acceptance.  L(g) is non-empty iff some pair has the
    start label in V and the initial control state in Q.  Returns None when
    more than ``limit`` pairs show up."""
    bits = _bits(g)
    horn = bits.horn
    ctrl = g.control.complete() if g.control is not None else None
    s_idx = bits.index[g.start]

    def qstep(qs, t):
        if ctrl is None:
            return None
        return frozenset(q for q in ctrl.states if ctrl.delta[(q, t + 1)] in qs)

    def hit(v, qs) -> bool:
        return bool(v[s_idx]) and (ctrl is None or ctrl.start in qs)

    v0 = horn.to_array(bits.terminal_mask)
    q0 = frozenset(ctrl.finals) if ctrl is not None else None
    start = (v0.tobytes(), q0)
    vec = {start: v0}
    parent: dict = {start: None}
    if hit(v0, q0):
        return Emptiness(False, [(None, frozenset([g.start]))], 1, [ctrl.start] if ctrl else [])
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        v, qs = vec[cur], cur[1]
        for t in range(len(g.tables)):
            w = horn.step(t, v)
            qs2 = qstep(qs, t)
            key = (w.tobytes(), qs2)
            if key in vec:
                continue
            if len(vec) >= limit:
                return None
            vec[key] = w
            parent[key] = (cur, t)
            if hit(w, qs2):
                return _vector_witness(g, bits, key, vec, parent, ctrl)
            queue.append(key)
    return Emptiness(True, [], len(vec))


def _vector_witness(g, bits, key, vec, parent, ctrl) -> Emptiness:
    # the trace read forwards is the reverse of the order the vectors were built
    trace: list[int] = []
    vs = [vec[key]]
    node = key
    while parent[node] is not None:
        node, t = parent[node]
        trace.append(t)
        vs.append(vec[node])
    # vs[i] = V(trace[i:]) ; replay label sets forwards choosing rules inside
    x = frozenset([g.start])
    chain: list[tuple[int | None, LabelSet]] = [(None, x)]
    states = [ctrl.start] if ctrl else []
    for i, t in enumerate(trace):
        allowed = {bits.labels[j] for j in np.flatnonzero(vs[i + 1])}
        nxt: set[str] = set()
        for lab in x:
            nxt |= next(ls for ls in map(labels_of, g.rule_index[t][lab]) if ls <= allowed)
        x = frozenset(nxt)
        chain.append((t + 1, x))
        if ctrl:
            states.append(ctrl.delta[(states[-1], t + 1)])
    return Emptiness(False, chain, len(vec), states)


def _emptiness_forward(g: PHRGrammar, prune: bool = True) -> Emptiness:
    """Breadth-first search over label sets (paired with control states when
    the grammar is controlled).

    Only inclusion-minimal successors are followed and sets containing an
    already visited set are skipped; with ``prune`` partial unions that can
    no longer become terminal are cut as well.  None of this changes the
    verdict.
    """
    bits = _bits(g)
    memo: dict = {}
    ctrl = g.control.complete() if g.control is not None else None
    useful = _coreachable(ctrl) if ctrl is not None else None
    # exact trace vectors cost one pass over all rules per vector; on big
    # grammars the cheap union is the better trade for a one-off search
    work = len(bits.labels) * len(g.tables)
    maximal = _live_vectors(g, MAX_VECTORS if work <= EXACT_PRUNE_WORK else 1) if prune else None
    tmask = bits.terminal_mask
    start = (bits.mask([g.start]), ctrl.start if ctrl else None)

    def accepting(state) -> bool:
        m, q = state
        return m & ~tmask == 0 and (ctrl is None or q in ctrl.finals)

    parent: dict = {start: None}
    seen_by_state: dict = {start[1]: _SubsetIndex()}
    seen_by_state[start[1]].add(start[0])
    if accepting(start):
        return Emptiness(False, [(None, frozenset([g.start]))], 1)
    if ctrl is not None and start[1] not in useful:
        return Emptiness(True, [], 1)
    if maximal is not None and not any(start[0] & ~v == 0 for v in maximal):
        return Emptiness(True, [], 1)
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        m, q = cur
        for t in range(len(g.tables)):
            if ctrl is not None:
                q2 = ctrl.delta[(q, t + 1)]
                if q2 not in useful:
                    continue
            else:
                q2 = None
            for m2 in _min_succ_masks(bits, t, m, memo, maximal):
                nxt = (m2, q2)
                seen = seen_by_state.get(q2)
                if seen is None:
                    seen = seen_by_state[q2] = _SubsetIndex()
                if seen.has_subset_of(m2):
                    continue
                seen.add(m2)
                parent[nxt] = (cur, t + 1)
                if accepting(nxt):
                    chain = []
                    node = nxt
                    states = []
                    while node is not None:
                        p = parent[node]
                        chain.append((p[1] if p else None, bits.unmask(node[0])))
                        states.append(node[1])
                        node = p[0] if p else None
                    chain.reverse()
                    states.reverse()
                    return Emptiness(False, chain, len(parent), states if ctrl else [])
                queue.append(nxt)
    return Emptiness(True, [], len(parent))


def is_empty(g: PHRGrammar, prune: bool = True) -> bool:
    return emptiness(g, prune).empty


# rational intersection -------------------------------------------------------


def _labelings(h: Hypergraph, sigma: Sequence[str], states: Sequence[str]):
    fixed: dict[int, str] = {}
    for v, q in zip(h.ext, sigma):
        if fixed.setdefault(v, q) != q:
            return
    internal = [v for v in range(h.num_nodes) if v not in fixed]
    for combo in itertools.product(states, repeat=len(internal)):
        lab = dict(fixed)
        lab.update(zip(internal, combo))
        yield lab


def choices_q(
    h: Hypergraph, sigma: Sequence[str], states: Sequence[str], name: Callable[[str, tuple[str, ...]], str] | None = None
) -> list[Hypergraph]:
    """Encodings of ``h`` under every node labelling by states that agrees
    with ``sigma`` on the external nodes."""
    if len(sigma) != len(h.ext):
        raise ValueError("sigma must have one state per external node")
    name = name or _default_name
    out = []
    for lab in _labelings(h, sigma, states):
        out.append(
            Hypergraph(
                h.num_nodes,
                tuple((name(x, tuple(lab[v] for v in att)), att) for x, att in h.edges),
                h.ext,
            )
        )
    return out


def augment_q(rule: Rule, states: Sequence[str], name: Callable[[str, tuple[str, ...]], str] | None = None) -> list[Rule]:
    name = name or _default_name
    t = len(rule.rhs.ext)
    out = []
    for sigma in itertools.product(states, repeat=t):
        lhs = name(rule.lhs, sigma)
        for h in choices_q(rule.rhs, sigma, states, name):
            out.append(Rule(lhs, h))
    return out


def _default_name(x: str, qs: tuple[str, ...]) -> str:
    return f"({x},{','.join(qs)})"


def intersect_regular(g: PHRGrammar, dfa: DFA, empty_label: str = EMPTY_LABEL) -> PHRGrammar:
    """A grammar whose string language is STR(L(g)) ∩ L(dfa).

    Edges labelled ``empty_label`` (if that label is a terminal of ``g``) are
    read as the empty word, so they must not change the automaton state.
    """
    from .transform import remove_control

    notes = []
    if g.control is not None:
        g = remove_control(g)
        notes.append("control removed first")
    if g.signature.type_of(g.start) != 2:
        raise UnsupportedShape("intersection needs a string graph grammar (start of type 2)")
    # the decode-table construction below works for any number of tables,
    # so there is no need to cycle through two-table phases first
    if not dfa.is_total():
        notes.append("automaton completed with a sink state")
    m = dfa.complete()
    # every node of a generated string graph sits on the accepting path, so
    # only states that are reachable and co-reachable can annotate nodes
    useful = m.useful_states()
    states = tuple(q for q in m.states if q in useful)
    letters = set(m.alphabet)
    decodable = sorted(a for a in g.terminals if a in letters and g.signature.type_of(a) == 2)
    has_empty = empty_label in g.terminals and empty_label not in letters

    namer = Namer(g.labels)
    ann_names: dict[tuple[str, tuple[str, ...]], str] = {}
    label_of: dict[str, tuple[str, tuple[str, ...]]] = {}

    def ann(x: str, qs: tuple[str, ...]) -> str:
        k = (x, qs)
        if k not in ann_names:
            name = namer.fresh(_default_name(x, qs))
            ann_names[k] = name
            label_of[name] = k
        return ann_names[k]

    new_start = namer.fresh("S*")
    k = max(g.order, 2)
    finals = {i: namer.fresh(f"F{i}") for i in range(k + 1)}
    types: dict[str, int] = {new_start: 2}
    types.update({f: i for i, f in finals.items()})
    out_terms = set(decodable)
    if has_empty:
        out_terms.add(empty_label)
    for a in out_terms:
        types[a] = 2

    sig = g.signature
    # annotated labels reachable from the seeds, with their augmented rules
    seeds = [ann(g.start, (m.start, q)) for q in sorted(m.finals) if q in useful and m.start in useful]
    todo = deque(seeds)
    seen = set(seeds)
    augmented: list[dict[str, list[Hypergraph]]] = [dict() for _ in g.tables]
    while todo:
        a = todo.popleft()
        x, sigma = label_of[a]
        types[a] = sig.type_of(x)
        for ti, idx in enumerate(g.rule_index):
            rhss = []
            for r in idx[x]:
                for h in choices_q(r, sigma, states, ann):
                    rhss.append(h)
                    for lab, _ in h.edges:
                        if lab not in seen:
                            seen.add(lab)
                            todo.append(lab)
            augmented[ti][a] = rhss

    def decode_rules() -> dict[str, list[Hypergraph]]:
        rules: dict[str, list[Hypergraph]] = {}
        for a in seen:
            x, qs = label_of[a]
            if len(qs) != 2:
                continue
            q1, q2 = qs
            if x in decodable and m.delta[(q1, x)] == q2:
                rules.setdefault(a, []).append(handle(x, _sig2(x)))
            elif has_empty and x == empty_label and q1 == q2:
                rules.setdefault(a, []).append(handle(x, _sig2(x)))
        return rules

    def fail(x: str) -> Hypergraph:
        f = finals[types[x]]
        return Hypergraph(types[x], ((f, tuple(range(types[x]))),), tuple(range(types[x])))

    def ident(x: str) -> Hypergraph:
        return Hypergraph(types[x], ((x, tuple(range(types[x]))),), tuple(range(types[x])))

    seed_rhs = [handle(s, _sig2(s)) for s in seeds]
    all_labels = sorted(types)
    decode = decode_rules()
    tables: list[list[tuple[str, Hypergraph]]] = []
    if g.table_count == 1:
        t: list[tuple[str, Hypergraph]] = []
        for x in all_labels:
            rhss: list[Hypergraph] = []
            rhss += decode.get(x, [])
            rhss += augmented[0].get(x, [])
            if x == new_start:
                rhss += seed_rhs
            if not rhss:
                rhss = [fail(x)]
            t.extend((x, r) for r in rhss)
        tables.append(t)
    else:
        t0 = []
        for x in all_labels:
            for r in decode.get(x, []) or [fail(x)]:
                t0.append((x, r))
        tables.append(t0)
        for ti in range(g.table_count):
            t = []
            for x in all_labels:
                if x == new_start:
                    rhss = list(seed_rhs) or [fail(x)]
                elif x in label_of:
                    # annotated labels with no consistent rule cannot be simulated
                    rhss = augmented[ti].get(x) or [fail(x)]
                else:
                    rhss = [ident(x)]
                t.extend((x, r) for r in rhss)
            tables.append(t)
    return PHRGrammar.build(
        types,
        out_terms,
        new_start,
        tables,
        meta={
            "construction": "intersect",
            "states": len(states),
            "notes": notes,
            "step_overhead": [1, 2],
        },
    )


def _sig2(x: str):
    from .hypergraph import Signature

    return Signature({x: 2})


def is_member(g: PHRGrammar, word: Sequence[str], empty_label: str = EMPTY_LABEL) -> bool:
    return membership(g, word, empty_label)[0]


def membership(g: PHRGrammar, word: Sequence[str], empty_label: str = EMPTY_LABEL) -> tuple[bool, str, Emptiness | None]:
    """Decide ``word`` ∈ STR(L(g)); returns (verdict, note, emptiness detail)."""
    w = tuple(word)
    if not w:
        return False, "the empty word is never in a string graph language (it is stripped by definition)", None
    letters = {a for a in g.terminals if g.signature.type_of(a) == 2 and a != empty_label}
    outside = sorted(set(w) - letters)
    if outside:
        return False, f"letters {outside} are not terminals of the grammar", None
    d = dfa_for_word(w, sorted(letters))
    h = intersect_regular(g, d, empty_label)
    e = emptiness(h)
    return (not e.empty), ("member" if not e.empty else "not a member"), e
