"""Hypergraphs with ordered attachments and external nodes.

Node and edge identities are dense integers local to each value.  Node ids
run over ``range(num_nodes)``; edge ids are positions in ``edges``.  Every
operation returns a fresh value, so hypergraphs can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import TypingError, UnknownLabel


class Signature:
    """A finite map from label names to their types (arities)."""

    __slots__ = ("_types",)

    def __init__(self, types: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = types.items() if isinstance(types, Mapping) else types
        tmap: dict[str, int] = {}
        for name, t in items:
            if not isinstance(name, str) or not name:
                raise TypingError(f"label name must be a non-empty string: {name!r}")
            if not isinstance(t, int) or t < 0:
                raise TypingError(f"label {name!r} has invalid type {t!r}")
            if name in tmap and tmap[name] != t:
                raise TypingError(f"label {name!r} declared with types {tmap[name]} and {t}")
            tmap[name] = t
        self._types = dict(sorted(tmap.items()))

    def type_of(self, label: str) -> int:
        try:
            return self._types[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def __contains__(self, label: object) -> bool:
        return label in self._types

    def __iter__(self):
        return iter(self._types)

    def __len__(self) -> int:
        return len(self._types)

    def items(self):
        return self._types.items()

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._types)

    def extend(self, more: Mapping[str, int] | Iterable[tuple[str, int]]) -> "Signature":
        items = more.items() if isinstance(more, Mapping) else more
        return Signature(list(self._types.items()) + list(items))

    def restrict(self, keep: Iterable[str]) -> "Signature":
        keep = set(keep)
        return Signature({k: v for k, v in self._types.items() if k in keep})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and self._types == other._types

    def __hash__(self) -> int:
        return hash(tuple(self._types.items()))

    def __repr__(self) -> str:
        return f"Signature({self._types!r})"


Edge = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class Hypergraph:
    num_nodes: int
    edges: tuple[Edge, ...]
    ext: tuple[int, ...]

    def __post_init__(self):
        n = self.num_nodes
        if n < 0:
            raise TypingError("negative node count")
        for label, att in self.edges:
            for v in att:
                if not 0 <= v < n:
                    raise TypingError(f"edge {label!r} attached to unknown node {v}")
        for v in self.ext:
            if not 0 <= v < n:
                raise TypingError(f"external node {v} is not a node")

    @staticmethod
    def build(num_nodes: int, edges: Iterable[tuple[str, Iterable[int]]], ext: Iterable[int]) -> "Hypergraph":
        return Hypergraph(num_nodes, tuple((lab, tuple(att)) for lab, att in edges), tuple(ext))

    @property
    def type(self) -> int:
        return len(self.ext)

    @cached_property
    def labels(self) -> frozenset[str]:
        return frozenset(lab for lab, _ in self.edges)

    def check_typing(self, signature: Signature) -> None:
        for i, (lab, att) in enumerate(self.edges):
            if signature.type_of(lab) != len(att):
                raise TypingError(
                    f"edge {i} labelled {lab!r} has {len(att)} tentacles, type is {signature.type_of(lab)}"
                )

    def is_repetition_free(self) -> bool:
        return len(set(self.ext)) == len(self.ext)

    def is_proper(self) -> bool:
        return all(len(set(att)) == len(att) for _, att in self.edges)

    def is_well_formed(self) -> bool:
        """Every node is external or attached to some edge."""
        used = set(self.ext)
        for _, att in self.edges:
            used.update(att)
        return len(used) == self.num_nodes

    def is_terminal(self, terminals: Iterable[str] | frozenset[str]) -> bool:
        terms = terminals if isinstance(terminals, (set, frozenset)) else frozenset(terminals)
        return all(lab in terms for lab, _ in self.edges)

    @cached_property
    def key(self) -> bytes:
        """Canonical byte string; equal exactly for isomorphic hypergraphs."""
        return _certificate_bytes(_canonical(self)[0])

    def canonical(self) -> "Hypergraph":
        """The isomorphic copy whose node ids follow the canonical labelling."""
        cert = _canonical(self)[0]
        n, edges, ext = cert
        return Hypergraph(n, edges, ext)

    def renumber(self, node_map: Sequence[int], num_nodes: int) -> "Hypergraph":
        return Hypergraph(
            num_nodes,
            tuple((lab, tuple(node_map[v] for v in att)) for lab, att in self.edges),
            tuple(node_map[v] for v in self.ext),
        )

    def with_ext(self, ext: Iterable[int]) -> "Hypergraph":
        return Hypergraph(self.num_nodes, self.edges, tuple(ext))

    def relabel(self, mapping: Mapping[str, str]) -> "Hypergraph":
        return Hypergraph(
            self.num_nodes, tuple((mapping.get(lab, lab), att) for lab, att in self.edges), self.ext
        )

    def __repr__(self) -> str:
        es = ", ".join(f"{lab}{list(att)}" for lab, att in self.edges)
        return f"Hypergraph(n={self.num_nodes}, edges=[{es}], ext={list(self.ext)})"


EMPTY = Hypergraph(0, (), ())


# constructors ----------------------------------------------------------------


def handle(label: str, signature: Signature) -> Hypergraph:
    t = signature.type_of(label)
    nodes = tuple(range(t))
    return Hypergraph(t, ((label, nodes),), nodes)


def string_graph(word: Sequence[str], signature: Signature | None = None) -> Hypergraph:
    """The chain of type-2 edges spelling ``word``; ext is (first, last)."""
    if signature is not None:
        for a in word:
            if signature.type_of(a) != 2:
                raise TypingError(f"letter {a!r} is not of type 2")
    n = len(word)
    return Hypergraph(n + 1, tuple((a, (i, i + 1)) for i, a in enumerate(word)), (0, n))


def str_of(h: Hypergraph, empty_label: str | None = None) -> tuple[str, ...] | None:
    """Read a string graph back into its word, or None if ``h`` is not one.

    If ``empty_label`` is given, edges carrying it are read as the empty
    string (they still have to sit on the chain).
    """
    n = h.num_nodes
    if len(h.ext) != 2 or n != len(h.edges) + 1:
        return None
    out: dict[int, tuple[str, int]] = {}
    indeg = [0] * n
    for lab, att in h.edges:
        if len(att) != 2:
            return None
        s, t = att
        if s in out:
            return None
        out[s] = (lab, t)
        indeg[t] += 1
    if n == 1:
        return () if h.ext == (0, 0) else None
    start, end = h.ext
    if start == end or indeg[start] != 0 or start not in out:
        return None
    word: list[str] = []
    v = start
    seen = {v}
    while v in out:
        lab, v = out[v]
        if v in seen:
            return None
        seen.add(v)
        if lab != empty_label:
            word.append(lab)
    if v != end or len(seen) != n:
        return None
    return tuple(word)


def disjoint_union(g: Hypergraph, h: Hypergraph, ext: str = "concat") -> Hypergraph:
    """Renamed-apart union.  ``ext`` is ``"concat"`` (g's then h's) or ``"drop"``."""
    if ext not in ("concat", "drop"):
        raise ValueError(f"unknown ext policy {ext!r}")
    off = g.num_nodes
    edges = g.edges + tuple((lab, tuple(v + off for v in att)) for lab, att in h.edges)
    new_ext = g.ext + tuple(v + off for v in h.ext) if ext == "concat" else ()
    return Hypergraph(off + h.num_nodes, edges, new_ext)


def union_all(parts: Iterable[Hypergraph], ext: str = "concat") -> Hypergraph:
    acc = EMPTY
    for p in parts:
        acc = disjoint_union(acc, p, ext)
    return acc


# replacement -----------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def replace(h: Hypergraph, sigma: Mapping[int, Hypergraph]) -> Hypergraph:
    """Replace each edge id in ``sigma`` by its hypergraph.

    The i-th external node of a replacement is glued to the i-th attachment
    node of the edge it replaces; the external nodes of ``h`` are kept.
    """
    for e, r in sigma.items():
        if not 0 <= e < len(h.edges):
            raise KeyError(f"unknown edge id {e}")
        if len(r.ext) != len(h.edges[e][1]):
            raise TypingError(
                f"replacement of type {len(r.ext)} for edge {e} of type {len(h.edges[e][1])}"
            )
    total = h.num_nodes + sum(r.num_nodes for r in sigma.values())
    uf = _UnionFind(total)
    raw_edges: list[tuple[str, tuple[int, ...]]] = []
    off = h.num_nodes
    for e, (lab, att) in enumerate(h.edges):
        r = sigma.get(e)
        if r is None:
            raw_edges.append((lab, att))
            continue
        for rlab, ratt in r.edges:
            raw_edges.append((rlab, tuple(v + off for v in ratt)))
        for i, x in enumerate(r.ext):
            uf.union(x + off, att[i])
        off += r.num_nodes
    return _quotient(total, raw_edges, h.ext, uf)


def _quotient(total: int, raw_edges, ext, uf: _UnionFind) -> Hypergraph:
    reps: dict[int, int] = {}
    node_map = [0] * total
    for v in range(total):
        r = uf.find(v)
        if r not in reps:
            reps[r] = len(reps)
        node_map[v] = reps[r]
    return Hypergraph(
        len(reps),
        tuple((lab, tuple(node_map[v] for v in att)) for lab, att in raw_edges),
        tuple(node_map[v] for v in ext),
    )


def quotient(h: Hypergraph, pairs: Iterable[tuple[int, int]]) -> Hypergraph:
    """Identify the given node pairs."""
    uf = _UnionFind(h.num_nodes)
    for a, b in pairs:
        uf.union(a, b)
    return _quotient(h.num_nodes, h.edges, h.ext, uf)


# morphisms -------------------------------------------------------------------

MODES = ("general", "injective", "hyperedgeInjective", "isomorphism")
EXTERNAL_MODES = ("subsequence", "reflecting")


@dataclass(frozen=True)
class Morphism:
    node_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    mode: str
    external_mode: str

    def is_valid(self, g: Hypergraph, h: Hypergraph) -> bool:
        return check_morphism(g, h, self.node_map, self.edge_map, self.mode, self.external_mode)


def _is_subsequence(xs: Sequence[int], ys: Sequence[int]) -> bool:
    it = iter(ys)
    return all(any(x == y for y in it) for x in xs)


def check_morphism(g, h, node_map, edge_map, mode="general", external_mode="subsequence") -> bool:
    if len(node_map) != g.num_nodes or len(edge_map) != len(g.edges):
        return False
    for e, (lab, att) in enumerate(g.edges):
        f = edge_map[e]
        if not 0 <= f < len(h.edges):
            return False
        hlab, hatt = h.edges[f]
        if hlab != lab or tuple(node_map[v] for v in att) != hatt:
            return False
    img_ext = [node_map[v] for v in g.ext]
    if external_mode == "reflecting":
        if tuple(img_ext) != h.ext:
            return False
    elif not _is_subsequence(img_ext, h.ext):
        return False
    if mode in ("injective", "isomorphism") and len(set(node_map)) != len(node_map):
        return False
    if mode in ("injective", "hyperedgeInjective", "isomorphism") and len(set(edge_map)) != len(edge_map):
        return False
    if mode == "isomorphism":
        return g.num_nodes == h.num_nodes and len(g.edges) == len(h.edges)
    return True


def find_morphism(
    g: Hypergraph, h: Hypergraph, mode: str = "general", external_mode: str = "subsequence"
) -> Morphism | None:
    """Backtracking search for a morphism g -> h of the requested kind."""
    if mode not in MODES or external_mode not in EXTERNAL_MODES:
        raise ValueError(f"unknown mode {mode!r}/{external_mode!r}")
    if mode == "isomorphism":
        if (
            g.num_nodes != h.num_nodes
            or len(g.edges) != len(h.edges)
            or len(g.ext) != len(h.ext)
            or sorted(l for l, _ in g.edges) != sorted(l for l, _ in h.edges)
        ):
            return None
    node_inj = mode in ("injective", "isomorphism")
    edge_inj = mode != "general"

    by_label: dict[str, list[int]] = {}
    for f, (lab, _) in enumerate(h.edges):
        by_label.setdefault(lab, []).append(f)
    # most constrained first: fewest candidates, then most tentacles
    order = sorted(range(len(g.edges)), key=lambda e: (len(by_label.get(g.edges[e][0], ())), -len(g.edges[e][1]), e))

    node_map: list[int | None] = [None] * g.num_nodes
    used_nodes: dict[int, int] = {}
    if external_mode == "reflecting":
        if len(g.ext) != len(h.ext):
            return None
        for x, y in zip(g.ext, h.ext):
            if node_map[x] is None:
                if node_inj and y in used_nodes:
                    return None
                node_map[x] = y
                used_nodes[y] = used_nodes.get(y, 0) + 1
            elif node_map[x] != y:
                return None
    edge_map: list[int] = [-1] * len(g.edges)
    used_edges: set[int] = set()

    def assign_nodes(att, hatt, bound):
        for v, w in zip(att, hatt):
            cur = node_map[v]
            if cur is None:
                if node_inj and w in used_nodes:
                    return False
                node_map[v] = w
                used_nodes[w] = used_nodes.get(w, 0) + 1
                bound.append(v)
            elif cur != w:
                return False
        return True

    def unbind(bound):
        for v in bound:
            w = node_map[v]
            node_map[v] = None
            used_nodes[w] -= 1
            if not used_nodes[w]:
                del used_nodes[w]

    free_nodes = [v for v in range(g.num_nodes)]

    def finish_nodes(i: int):
        # map nodes not touched by edges, then check the ext condition
        while i < len(free_nodes) and node_map[free_nodes[i]] is not None:
            i += 1
        if i == len(free_nodes):
            img = [node_map[v] for v in g.ext]
            if external_mode == "reflecting":
                return tuple(img) == h.ext
            return _is_subsequence(img, h.ext)
        v = free_nodes[i]
        cands = list(h.ext) + list(range(h.num_nodes)) if v in g.ext else range(h.num_nodes)
        tried = set()
        for w in cands:
            if w in tried:
                continue
            tried.add(w)
            if node_inj and w in used_nodes:
                continue
            node_map[v] = w
            used_nodes[w] = used_nodes.get(w, 0) + 1
            if finish_nodes(i + 1):
                return True
            node_map[v] = None
            used_nodes[w] -= 1
            if not used_nodes[w]:
                del used_nodes[w]
        return False

    def search(k: int) -> bool:
        if k == len(order):
            return finish_nodes(0)
        e = order[k]
        lab, att = g.edges[e]
        for f in by_label.get(lab, ()):
            if edge_inj and f in used_edges:
                continue
            hatt = h.edges[f][1]
            bound: list[int] = []
            if assign_nodes(att, hatt, bound):
                edge_map[e] = f
                used_edges.add(f)
                if search(k + 1):
                    return True
                used_edges.discard(f)
            unbind(bound)
        return False

    if not search(0):
        return None
    m = Morphism(tuple(node_map), tuple(edge_map), mode, external_mode)  # type: ignore[arg-type]
    if not m.is_valid(g, h):
        return None
    return m


def is_isomorphic(g: Hypergraph, h: Hypergraph) -> bool:
    return g.key == h.key


def canonical_form(h: Hypergraph) -> bytes:
    return h.key


# canonical labelling ---------------------------------------------------------
#
# Each connected component is labelled separately by colour refinement on the
# node/edge incidence structure followed by individualisation of nodes, with
# automorphisms found along the way used to skip equivalent branches.  The
# component certificates are then sorted and concatenated.

Certificate = tuple[int, tuple[Edge, ...], tuple[int, ...]]


def _certificate_bytes(cert: Certificate) -> bytes:
    n, edges, ext = cert
    parts = [str(n), ";"]
    for lab, att in edges:
        parts.append(f"{len(lab)}:{lab}({','.join(map(str, att))})")
    parts.append(";")
    parts.append(",".join(map(str, ext)))
    return "".join(parts).encode()


def _components(h: Hypergraph) -> list[tuple[list[int], list[int]]]:
    uf = _UnionFind(h.num_nodes)
    for _, att in h.edges:
        for v in att[1:]:
            uf.union(att[0], v)
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for v in range(h.num_nodes):
        groups.setdefault(uf.find(v), ([], []))[0].append(v)
    comps = list(groups.values())
    nodeless = []
    for e, (_, att) in enumerate(h.edges):
        if att:
            groups[uf.find(att[0])][1].append(e)
        else:
            nodeless.append(([], [e]))
    return comps + nodeless


def _canonical(h: Hypergraph) -> tuple[Certificate, list[int]]:
    """Return the certificate and the node relabelling old -> new."""
    ext_pos: dict[int, list[int]] = {}
    for i, v in enumerate(h.ext):
        ext_pos.setdefault(v, []).append(i)
    pieces = []
    for nodes, edges in _components(h):
        cert, order = _canonical_component(h, nodes, edges, ext_pos)
        pieces.append((cert, order))
    pieces.sort(key=lambda p: _sort_key(p[0]))
    relabel = [0] * h.num_nodes
    all_edges: list[Edge] = []
    off = 0
    for (n, edges, _), order in pieces:
        for i, v in enumerate(order):
            relabel[v] = off + i
        all_edges.extend((lab, tuple(a + off for a in att)) for lab, att in edges)
        off += n
    all_edges.sort()
    ext = tuple(relabel[v] for v in h.ext)
    return (h.num_nodes, tuple(all_edges), ext), relabel


def _sort_key(cert):
    n, edges, ext = cert
    return (n, edges, ext)


def _canonical_component(h: Hypergraph, nodes: list[int], edge_ids: list[int], ext_pos):
    """Canonically order the nodes of one component.

    The component certificate records ext positions per node (global
    positions), so components containing external nodes sort apart.
    """
    nn = len(nodes)
    local = {v: i for i, v in enumerate(nodes)}
    edges = [(h.edges[e][0], tuple(local[v] for v in h.edges[e][1])) for e in edge_ids]
    if nn == 0:
        return (0, tuple(sorted(edges)), ()), []
    incid: list[list[tuple[int, int]]] = [[] for _ in range(nn)]
    for ei, (_, att) in enumerate(edges):
        for pos, v in enumerate(att):
            incid[v].append((ei, pos))
    node_ext = [tuple(ext_pos.get(v, ())) for v in nodes]

    # initial colours: nodes by ext positions and degree profile
    keys0 = [(0, node_ext[i], len(incid[i])) for i in range(nn)]
    edge_labels = [lab for lab, _ in edges]
    colors = _rank(keys0)
    colors = _refine(colors, edges, incid, edge_labels)

    best: list = [None, None]  # certificate, order
    autos: list[list[int]] = []

    def leaf(col):
        order = sorted(range(nn), key=lambda i: col[i])
        perm = [0] * nn
        for i, v in enumerate(order):
            perm[v] = i
        cert_edges = tuple(sorted((lab, tuple(perm[v] for v in att)) for lab, att in edges))
        cert_ext = tuple(tuple(node_ext[v]) for v in order)
        cert = (cert_edges, cert_ext)
        if best[0] is None or cert < best[0]:
            best[0], best[1] = cert, perm
        elif cert == best[0]:
            inv = [0] * nn
            for v, i in enumerate(best[1]):
                inv[i] = v
            autos.append([inv[perm[v]] for v in range(nn)])

    def search(col, path):
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(col):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1 and (target is None or len(cells[c]) < len(target)):
                target = cells[c]
        if target is None:
            leaf(col)
            return
        explored: list[int] = []
        for v in target:
            if explored and _same_orbit(v, explored, autos, path, nn):
                continue
            explored.append(v)
            keys = [(col[u], 0 if u == v else 1) for u in range(nn)]
            newcol = _refine(_rank(keys), edges, incid, edge_labels)
            search(newcol, path + [v])

    search(colors, [])
    cert_edges, cert_ext = best[0]
    perm = best[1]
    order = [0] * nn
    for v, i in enumerate(perm):
        order[i] = nodes[v]
    return (nn, cert_edges, cert_ext), order


def _same_orbit(v, explored, autos, path, nn) -> bool:
    gens = [a for a in autos if all(a[p] == p for p in path)]
    if not gens:
        return False
    uf = _UnionFind(nn)
    for a in gens:
        for x in range(nn):
            uf.union(x, a[x])
    rv = uf.find(v)
    return any(uf.find(u) == rv for u in explored)


def _rank(keys: list) -> list[int]:
    index = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [index[k] for k in keys]


def _refine(colors: list[int], edges, incid, edge_labels) -> list[int]:
    ncol = len(set(colors))
    while True:
        ecol = [(edge_labels[e], tuple(colors[v] for v in att)) for e, (_, att) in enumerate(edges)]
        keys = [(colors[v], tuple(sorted((ecol[e], pos) for e, pos in incid[v]))) for v in range(len(colors))]
        new = _rank(keys)
        k = len(set(new))
        if k == ncol:
            return new
        colors, ncol = new, k
