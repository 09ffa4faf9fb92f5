"""Finite automata over arbitrary hashable letters (table indices or words)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping

Letter = Hashable
State = str


@dataclass(frozen=True)
class DFA:
    states: tuple[State, ...]
    alphabet: tuple[Letter, ...]
    delta: Mapping[tuple[State, Letter], State]
    start: State
    finals: frozenset[State]

    def __post_init__(self):
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} is not a state")
        if not self.finals <= set(self.states):
            raise ValueError("final states must be states")
        for (q, a), r in self.delta.items():
            if q not in self.states or r not in self.states or a not in self.alphabet:
                raise ValueError(f"bad transition {q!r} --{a!r}--> {r!r}")

    def useful_states(self) -> set:
        """States that are reachable and from which a final state is reachable."""
        back: dict = {}
        for (q, _), r in self.delta.items():
            back.setdefault(r, set()).add(q)
        co = set(self.finals)
        todo = list(co)
        while todo:
            r = todo.pop()
            for q in back.get(r, ()):
                if q not in co:
                    co.add(q)
                    todo.append(q)
        return self.reachable_states() & co

    def is_total(self) -> bool:
        return all((q, a) in self.delta for q in self.states for a in self.alphabet)

    def step(self, q: State, a: Letter) -> State | None:
        return self.delta.get((q, a))

    def run(self, word: Iterable[Letter]) -> State | None:
        q: State | None = self.start
        for a in word:
            if q is None:
                return None
            q = self.delta.get((q, a))
        return q

    def accepts(self, word: Iterable[Letter]) -> bool:
        q = self.run(word)
        return q is not None and q in self.finals

    def complete(self, sink: State = "sink") -> "DFA":
        """Total version of this automaton (adds a sink only when needed)."""
        if self.is_total():
            return self
        while sink in self.states:
            sink += "'"
        delta = dict(self.delta)
        for q in self.states + (sink,):
            for a in self.alphabet:
                delta.setdefault((q, a), sink)
        return DFA(self.states + (sink,), self.alphabet, delta, self.start, self.finals)

    def with_alphabet(self, alphabet: Iterable[Letter]) -> "DFA":
        """Extend the alphabet; new letters go nowhere until completed."""
        extra = tuple(a for a in alphabet if a not in self.alphabet)
        return DFA(self.states, self.alphabet + extra, self.delta, self.start, self.finals)

    def reachable_states(self) -> set[State]:
        seen = {self.start}
        todo = [self.start]
        while todo:
            q = todo.pop()
            for a in self.alphabet:
                r = self.delta.get((q, a))
                if r is not None and r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    def words(self, max_len: int) -> set[tuple[Letter, ...]]:
        """All accepted words up to ``max_len`` (brute force)."""
        out = set()
        for n in range(max_len + 1):
            for w in product(self.alphabet, repeat=n):
                if self.accepts(w):
                    out.add(w)
        return out


@dataclass(frozen=True)
class NFA:
    states: tuple[State, ...]
    alphabet: tuple[Letter, ...]
    delta: Mapping[tuple[State, Letter], frozenset[State]]
    starts: frozenset[State]
    finals: frozenset[State]
    eps: Mapping[State, frozenset[State]] = field(default_factory=dict)

    def closure(self, qs: Iterable[State]) -> frozenset[State]:
        seen = set(qs)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for r in self.eps.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return frozenset(seen)

    def accepts(self, word: Iterable[Letter]) -> bool:
        cur = self.closure(self.starts)
        for a in word:
            nxt: set[State] = set()
            for q in cur:
                nxt |= self.delta.get((q, a), frozenset())
            cur = self.closure(nxt)
        return bool(cur & self.finals)


def determinize_complete(m: DFA | NFA) -> DFA:
    """Subset construction (for NFAs) followed by completion with a sink."""
    if isinstance(m, DFA):
        return m.complete()
    start = m.closure(m.starts)
    names: dict[frozenset[State], State] = {}

    def name(s: frozenset[State]) -> State:
        if s not in names:
            names[s] = "{" + ",".join(sorted(s)) + "}"
        return names[s]

    delta: dict[tuple[State, Letter], State] = {}
    queue = deque([start])
    name(start)
    while queue:
        s = queue.popleft()
        for a in m.alphabet:
            t: set[State] = set()
            for q in s:
                t |= m.delta.get((q, a), frozenset())
            tt = m.closure(t)
            if tt not in names:
                name(tt)
                queue.append(tt)
            delta[(names[s], a)] = names[tt]
    finals = frozenset(n for s, n in names.items() if s & m.finals)
    return DFA(tuple(names.values()), m.alphabet, delta, names[start], finals)


def dfa_for_word(word: Iterable[Letter], alphabet: Iterable[Letter] = ()) -> DFA:
    """Chain automaton accepting exactly ``word``, completed with a sink."""
    w = tuple(word)
    letters: list[Letter] = []
    for a in tuple(alphabet) + w:
        if a not in letters:
            letters.append(a)
    states = tuple(str(i) for i in range(len(w) + 1)) + ("sink",)
    delta = {}
    for q in states:
        for a in letters:
            delta[(q, a)] = "sink"
    for i, a in enumerate(w):
        delta[(str(i), a)] = str(i + 1)
    return DFA(states, tuple(letters), delta, "0", frozenset({str(len(w))}))


def universal_dfa(alphabet: Iterable[Letter]) -> DFA:
    alphabet = tuple(alphabet)
    return DFA(("q",), alphabet, {("q", a): "q" for a in alphabet}, "q", frozenset({"q"}))


def empty_dfa(alphabet: Iterable[Letter]) -> DFA:
    alphabet = tuple(alphabet)
    return DFA(("q",), alphabet, {("q", a): "q" for a in alphabet}, "q", frozenset())


def length_dfa(alphabet: Iterable[Letter], max_len: int) -> DFA:
    """Words of length at most ``max_len``."""
    alphabet = tuple(alphabet)
    states = tuple(str(i) for i in range(max_len + 2))
    delta = {}
    for i in range(max_len + 2):
        for a in alphabet:
            delta[(str(i), a)] = str(min(i + 1, max_len + 1))
    return DFA(states, alphabet, delta, "0", frozenset(states[:-1]))


def avoiding_dfa(alphabet: Iterable[Letter], max_len: int, words: Iterable[Iterable[Letter]]) -> DFA:
    """Nonempty words of length at most ``max_len`` that are not in ``words``.

    States are the prefixes of ``words`` plus one "left the trie" counter per
    length, so the automaton stays small when ``words`` is.
    """
    alphabet = tuple(alphabet)
    banned = {tuple(w) for w in words}
    prefixes = {w[:i] for w in banned for i in range(len(w) + 1)} | {()}
    name = {p: "p" + ".".join(map(str, (alphabet.index(a) for a in p))) for p in prefixes}
    states = list(name.values()) + [f"o{i}" for i in range(1, max_len + 1)] + ["dead"]
    delta = {}
    finals = set()
    for p, q in name.items():
        if p and p not in banned and len(p) <= max_len:
            finals.add(q)
        for a in alphabet:
            p2 = p + (a,)
            if len(p2) > max_len:
                delta[(q, a)] = "dead"
            else:
                delta[(q, a)] = name.get(p2, f"o{len(p2)}")
    for i in range(1, max_len + 1):
        finals.add(f"o{i}")
        for a in alphabet:
            delta[(f"o{i}", a)] = f"o{i + 1}" if i < max_len else "dead"
    for a in alphabet:
        delta[("dead", a)] = "dead"
    return DFA(tuple(states), alphabet, delta, name[()], frozenset(finals))
