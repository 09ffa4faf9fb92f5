"""Small reference grammars used by tests, docs and the bundled JSON files."""

from __future__ import annotations

from .grammar import PHRGrammar
from .hypergraph import Hypergraph, Signature, handle, string_graph

BOX = "□"


def _g(n: int, edges, ext) -> Hypergraph:
    return Hypergraph(n, tuple((lab, tuple(att)) for lab, att in edges), tuple(ext))


def doubling() -> PHRGrammar:
    """One type-0 label that doubles every step: 2^n edges after n steps."""
    two = _g(0, [(BOX, ()), (BOX, ())], ())
    return PHRGrammar.build({BOX: 0}, {BOX}, BOX, [[(BOX, two)]], meta={"name": "doubling"})


def pow2() -> PHRGrammar:
    """String graphs of a^(2^n): every a becomes aa in each step."""
    return string_grammar({"a": 2}, {"a"}, "a", [[("a", "aa")]], "pow2")


def fbt() -> PHRGrammar:
    """Full binary trees with □-labelled edges (root has ext position 1)."""
    types = {"S": 1, "X": 2, "Y": 2, "F": 2, BOX: 2}
    rules = [
        ("S", _g(1, [], [0])),
        ("S", _g(3, [("X", (0, 1)), ("X", (0, 2))], [0])),
        ("X", _g(4, [("Y", (0, 1)), ("X", (1, 2)), ("X", (1, 3))], [0, 1])),
        ("X", _g(2, [(BOX, (0, 1))], [0, 1])),
        ("Y", _g(2, [("Y", (0, 1))], [0, 1])),
        ("Y", _g(2, [(BOX, (0, 1))], [0, 1])),
        (BOX, _g(2, [("F", (0, 1))], [0, 1])),
        ("F", _g(2, [("F", (0, 1))], [0, 1])),
    ]
    return PHRGrammar.build(types, {BOX}, "S", [rules], meta={"name": "fbt"})


def fbt_core() -> PHRGrammar:
    """Tree skeleton: leaves hang off X edges, inner edges are Y.  Every
    sentential form past the start is terminal."""
    types = {"S": 1, "X": 2, "Y": 2}
    rules = [
        ("S", _g(1, [], [0])),
        ("S", _g(3, [("X", (0, 1)), ("X", (0, 2))], [0])),
        ("X", _g(4, [("Y", (0, 1)), ("X", (1, 2)), ("X", (1, 3))], [0, 1])),
        ("Y", _g(2, [("Y", (0, 1))], [0, 1])),
    ]
    return PHRGrammar.build(types, {"X", "Y"}, "S", [rules], meta={"name": "fbt-core"})


def sierpinski() -> PHRGrammar:
    """Directed □-labelled Sierpinski triangles; ext = (top, right, left)."""
    types = {"S": 3, "X": 3, "F": 2, BOX: 2}
    tri = [(BOX, (0, 1)), (BOX, (1, 2)), (BOX, (2, 0))]
    rules = [
        ("S", _g(3, tri, [0, 1, 2])),
        ("S", _g(3, [("X", (0, 1, 2))], [0, 1, 2])),
        # nodes: 0 top, 1 right, 2 left, 3 mid(top,right), 4 mid(top,left), 5 mid(right,left)
        ("X", _g(6, [("X", (0, 3, 4)), ("X", (3, 1, 5)), ("X", (4, 5, 2))], [0, 1, 2])),
        ("X", _g(3, tri, [0, 1, 2])),
        (BOX, _g(2, [("F", (0, 1))], [0, 1])),
        ("F", _g(2, [("F", (0, 1))], [0, 1])),
    ]
    return PHRGrammar.build(types, {BOX}, "S", [rules], meta={"name": "sierpinski"})


def dead() -> PHRGrammar:
    """Every derivation keeps a self-perpetuating F edge: the language is empty."""
    types = {"S": 0, "F": 0, "a": 0}
    rules = [
        ("S", _g(0, [("F", ()), ("a", ())], [])),
        ("F", _g(0, [("F", ())], [])),
        ("a", _g(0, [("a", ())], [])),
    ]
    return PHRGrammar.build(types, {"a"}, "S", [rules], meta={"name": "dead"})


def string_grammar(types, terminals, start, tables, name: str) -> PHRGrammar:
    """Order-2 grammar whose rules are (letter, word) pairs."""
    sig = Signature(types)
    ts = [[(l, string_graph(w, sig)) for l, w in t] for t in tables]
    return PHRGrammar.build(types, terminals, start, ts, meta={"name": name})


def fig9_tree() -> Hypergraph:
    """The 6-edge full binary tree (depth two below the root)."""
    e = [(BOX, (0, 1)), (BOX, (0, 2)), (BOX, (1, 3)), (BOX, (1, 4)), (BOX, (2, 5)), (BOX, (2, 6))]
    return _g(7, e, [0])


def box_handle(label: str = BOX, arity: int = 2) -> Hypergraph:
    return handle(label, Signature({label: arity}))


def anbn_hr():
    """Context-free {a^n b^n : n ≥ 1} as an HR grammar over string graphs."""
    from .transform import HRGrammar

    types = {"S": 2, "a": 2, "b": 2}
    sig = Signature(types)
    return HRGrammar.build(
        types, {"S"}, "S",
        [("S", string_graph("ab", sig)), ("S", string_graph(["a", "S", "b"], sig))],
    )


def abc_et0l():
    """Two-table ET0L grammar for {a^n b^n c^n : n ≥ 1}."""
    from .strings import ET0LGrammar

    keep = [("a", "a"), ("b", "b"), ("c", "c")]
    return ET0LGrammar.build(
        "SABCabc", "abc", "S",
        [
            [("S", "ABC"), ("A", "aA"), ("B", "bB"), ("C", "cC")] + keep,
            [("S", "ABC"), ("A", "a"), ("B", "b"), ("C", "c")] + keep,
        ],
    )


def pow2_et0l():
    from .strings import ET0LGrammar

    return ET0LGrammar.build("a", "a", "a", [[("a", "aa")]])


def zwp_hr(a: str = "a", inv: str = "ā", prefix: str = ""):
    """Word problem of Z on {a, ā} without ε: words with as many a as ā.

    S → aB | āA,  A → a | aS | āAA,  B → ā | āS | aBB.
    """
    from .transform import HRGrammar

    s, x, y = prefix + "S", prefix + "A", prefix + "B"
    types = {s: 2, x: 2, y: 2, a: 2, inv: 2}
    sig = Signature(types)

    def w(*xs):
        return string_graph(xs, sig)

    rules = [
        (s, w(a, y)), (s, w(inv, x)),
        (x, w(a)), (x, w(a, s)), (x, w(inv, x, x)),
        (y, w(inv)), (y, w(inv, s)), (y, w(a, y, y)),
    ]
    return HRGrammar.build(types, {s, x, y}, s, rules)


def all_documents() -> dict:
    """The bundled fixture files, by file stem."""
    from .transform import import_hr

    return {
        "doubling": doubling(),
        "pow2": pow2(),
        "fbt": fbt(),
        "fbt_core": fbt_core(),
        "sierpinski": sierpinski(),
        "dead": dead(),
        "anbn_hr": anbn_hr(),
        "anbn": import_hr(anbn_hr()),
        "abc_et0l": abc_et0l(),
        "pow2_et0l": pow2_et0l(),
        "zwp_a": zwp_hr("a", "ā", "1"),
        "zwp_b": zwp_hr("b", "b̄", "2"),
        "fig9_tree": fig9_tree(),
    }


def write_all(directory: str) -> list[str]:
    import os

    from . import io

    paths = []
    for stem, obj in all_documents().items():
        path = os.path.join(directory, f"{stem}.json")
        io.write(obj, path)
        paths.append(path)
    return paths
