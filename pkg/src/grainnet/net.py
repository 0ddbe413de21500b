"""Petri nets as diagrams S <- I -> T <- O -> S, graphs, etale maps,
markings, boundaries, level functions, cuts and gluing."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError
from .finset import FinMap, FinSet, coproduct, pullback, pushout_inj
from .groupoid import Verdict


@dataclass(frozen=True, eq=False)
class SitosNet:
    """A net: places S, in-arcs I, transitions T, out-arcs O.

    src_in: I -> S, tgt_in: I -> T, src_out: O -> T, tgt_out: O -> S.
    Each arc is its own element, so parallel arcs are distinct.
    """

    S: FinSet
    I: FinSet
    T: FinSet
    O: FinSet
    src_in: FinMap
    tgt_in: FinMap
    src_out: FinMap
    tgt_out: FinMap

    def __post_init__(self):
        for name, m, d, c in (("src_in", self.src_in, self.I, self.S), ("tgt_in", self.tgt_in, self.I, self.T),
                              ("src_out", self.src_out, self.O, self.T), ("tgt_out", self.tgt_out, self.O, self.S)):
            if m.dom.size != d.size or m.cod.size != c.size:
                raise StructuralError(f"{name} has the wrong shape")

    @staticmethod
    def build(places: Sequence[str], transitions: Sequence[str],
              in_arcs: Sequence[tuple[str, str, str]], out_arcs: Sequence[tuple[str, str, str]]) -> "SitosNet":
        """Build from names. in_arcs are (id, place, transition), out_arcs (id, transition, place)."""
        S, T = FinSet.named(places), FinSet.named(transitions)
        I, O = FinSet.named(a[0] for a in in_arcs), FinSet.named(a[0] for a in out_arcs)
        try:
            return SitosNet(S, I, T, O,
                            FinMap(I, S, tuple(S.index(a[1]) for a in in_arcs)),
                            FinMap(I, T, tuple(T.index(a[2]) for a in in_arcs)),
                            FinMap(O, T, tuple(T.index(a[1]) for a in out_arcs)),
                            FinMap(O, S, tuple(S.index(a[2]) for a in out_arcs)))
        except ValueError as exc:
            raise StructuralError(f"unknown name in arc list: {exc}") from None

    @staticmethod
    def from_tables(n_places: int, n_trans: int, in_arcs: Sequence[tuple[int, int]],
                    out_arcs: Sequence[tuple[int, int]], labels: dict | None = None) -> "SitosNet":
        """in_arcs are (place, transition) pairs, out_arcs (transition, place)."""
        labels = labels or {}
        S = FinSet(n_places, labels.get("S"))
        T = FinSet(n_trans, labels.get("T"))
        I = FinSet(len(in_arcs), labels.get("I"))
        O = FinSet(len(out_arcs), labels.get("O"))
        return SitosNet(S, I, T, O,
                        FinMap(I, S, tuple(a[0] for a in in_arcs)), FinMap(I, T, tuple(a[1] for a in in_arcs)),
                        FinMap(O, T, tuple(a[0] for a in out_arcs)), FinMap(O, S, tuple(a[1] for a in out_arcs)))

    @staticmethod
    def empty() -> "SitosNet":
        return SitosNet.from_tables(0, 0, [], [])

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return (self.S.size, self.I.size, self.T.size, self.O.size)

    @cached_property
    def presets(self) -> tuple[tuple[int, ...], ...]:
        """presets[t] = in-arcs of t in increasing order."""
        return tuple(tuple(f) for f in self.tgt_in.fibers())

    @cached_property
    def postsets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(f) for f in self.src_out.fibers())

    def preset(self, t: int) -> tuple[int, ...]:
        return self.presets[t]

    def postset(self, t: int) -> tuple[int, ...]:
        return self.postsets[t]

    def arity(self, t: int) -> tuple[int, int]:
        return (len(self.presets[t]), len(self.postsets[t]))

    @property
    def grounded(self) -> bool:
        return self.tgt_in.is_surjective()

    def is_graph(self) -> bool:
        return self.src_in.is_injective() and self.tgt_out.is_injective()

    def place_name(self, s: int) -> str:
        return self.S.label(s)

    def trans_name(self, t: int) -> str:
        return self.T.label(t)

    def structure(self) -> tuple:
        return (self.sizes, self.src_in.table, self.tgt_in.table, self.src_out.table, self.tgt_out.table)

    def same_as(self, other: "SitosNet") -> bool:
        return self.structure() == other.structure()

    def __repr__(self) -> str:
        return f"SitosNet(sizes={self.sizes})"


class AinoaGraph(SitosNet):
    """A net whose outer maps I -> A and O -> A are injective.

    Graph vocabulary: A = S (edges), N = T (nodes).
    """

    def __post_init__(self):
        super().__post_init__()
        if not self.src_in.is_injective():
            raise StructuralError("I -> A is not injective: an edge enters two nodes")
        if not self.tgt_out.is_injective():
            raise StructuralError("O -> A is not injective: an edge leaves two nodes")

    @staticmethod
    def of(net: SitosNet) -> "AinoaGraph":
        return AinoaGraph(net.S, net.I, net.T, net.O, net.src_in, net.tgt_in, net.src_out, net.tgt_out)

    @property
    def A(self) -> FinSet:
        return self.S

    @property
    def N(self) -> FinSet:
        return self.T

    def __repr__(self) -> str:
        return f"AinoaGraph(|A|={self.S.size}, |N|={self.T.size})"


@dataclass(frozen=True, eq=False)
class EtaleMap:
    """A map of diagrams dom -> cod given by its four components."""

    dom: SitosNet
    cod: SitosNet
    on_S: FinMap
    on_I: FinMap
    on_T: FinMap
    on_O: FinMap

    def __post_init__(self):
        for name, m, a, b in (("S", self.on_S, self.dom.S, self.cod.S), ("I", self.on_I, self.dom.I, self.cod.I),
                              ("T", self.on_T, self.dom.T, self.cod.T), ("O", self.on_O, self.dom.O, self.cod.O)):
            if m.dom.size != a.size or m.cod.size != b.size:
                raise StructuralError(f"component on {name} has the wrong shape")

    def then(self, other: "EtaleMap") -> "EtaleMap":
        return EtaleMap(self.dom, other.cod, self.on_S.then(other.on_S), self.on_I.then(other.on_I),
                        self.on_T.then(other.on_T), self.on_O.then(other.on_O))

    @staticmethod
    def identity(net: SitosNet) -> "EtaleMap":
        return EtaleMap(net, net, FinMap.identity(net.S), FinMap.identity(net.I),
                        FinMap.identity(net.T), FinMap.identity(net.O))

    def is_injective(self) -> bool:
        return all(m.is_injective() for m in (self.on_S, self.on_I, self.on_T, self.on_O))


def _is_pullback_square(top: FinMap, left: FinMap, right: FinMap, bottom: FinMap) -> bool:
    """Square X -top-> Y, X -left-> Z, Y -right-> W, Z -bottom-> W (commuting)
    is a pullback iff X -> Z ×_W Y is bijective."""
    p, p1, p2 = pullback(bottom, right)
    if p.size != left.dom.size:
        return False
    index = {(a, b): k for k, (a, b) in enumerate(zip(p1.table, p2.table))}
    seen = set()
    for x in range(left.dom.size):
        k = index.get((left(x), top(x)))
        if k is None or k in seen:
            return False
        seen.add(k)
    return True


def check_morphism(e: EtaleMap) -> Verdict:
    """Commutation of the four squares."""
    d, c = e.dom, e.cod
    checks = (
        ("I->S", e.on_I.then(c.src_in), d.src_in.then(e.on_S)),
        ("I->T", e.on_I.then(c.tgt_in), d.tgt_in.then(e.on_T)),
        ("O->T", e.on_O.then(c.src_out), d.src_out.then(e.on_T)),
        ("O->S", e.on_O.then(c.tgt_out), d.tgt_out.then(e.on_S)),
    )
    for name, u, v in checks:
        if u.table != v.table:
            return Verdict(False, f"square {name} does not commute", name)
    return Verdict(True)


def is_etale(e: EtaleMap) -> Verdict:
    """All squares commute and the two middle squares are pullbacks."""
    v = check_morphism(e)
    if not v:
        return v
    d, c = e.dom, e.cod
    if not _is_pullback_square(e.on_I, d.tgt_in, c.tgt_in, e.on_T):
        return Verdict(False, "middle square I over T is not a pullback", "I->T")
    if not _is_pullback_square(e.on_O, d.src_out, c.src_out, e.on_T):
        return Verdict(False, "middle square O over T is not a pullback", "O->T")
    return Verdict(True)


@dataclass(frozen=True, eq=False)
class Marking:
    """A finite set of tokens placed on a net."""

    net: SitosNet
    place: FinMap  # tokens -> S

    def __post_init__(self):
        if self.place.cod.size != self.net.S.size:
            raise StructuralError("marking does not land in the net's places")

    @property
    def tokens(self) -> FinSet:
        return self.place.dom

    @property
    def size(self) -> int:
        return self.place.dom.size

    @staticmethod
    def of(net: SitosNet, places: Sequence[int | str], names: Sequence[str] | None = None) -> "Marking":
        idx = [p if isinstance(p, int) else net.S.index(p) for p in places]
        dom = FinSet(len(idx), tuple(names) if names is not None else None)
        return Marking(net, FinMap(dom, net.S, tuple(idx)))

    def token_name(self, k: int) -> str:
        return self.tokens.label(k)

    def __repr__(self) -> str:
        return "Marking(" + ", ".join(f"{self.token_name(k)}:{self.net.place_name(s)}"
                                      for k, s in enumerate(self.place.table)) + ")"


def marking_multiset(m: Marking) -> tuple[int, ...]:
    """Per-place token counts: the isomorphism class of a marking."""
    counts = [0] * m.net.S.size
    for s in m.place.table:
        counts[s] += 1
    return tuple(counts)


@dataclass(frozen=True, eq=False)
class LevelFunction:
    """Monotone assignment of levels 1..k to the nodes of a graph.

    ``level`` is a map N -> FinSet(k); value j stands for level j+1.
    """

    graph: AinoaGraph
    level: FinMap
    strict: bool = False

    def __post_init__(self):
        if self.level.dom.size != self.graph.T.size:
            raise StructuralError("level function has the wrong domain")
        for x, y in covering_pairs(self.graph):
            lx, ly = self.level(x), self.level(y)
            if lx > ly:
                raise StructuralError(f"level function is not monotone at nodes {x} -> {y}")
            if self.strict and lx == ly:
                raise StructuralError(f"level function is not strict at nodes {x} -> {y}")

    @property
    def k(self) -> int:
        return self.level.cod.size

    def of(self, x: int) -> int:
        return self.level(x) + 1

    @staticmethod
    def from_levels(graph: AinoaGraph, levels: Sequence[int], k: int | None = None, strict: bool = False) -> "LevelFunction":
        """levels are 1-based."""
        if k is None:
            k = max(levels, default=0)
        return LevelFunction(graph, FinMap(FinSet(len(levels)), FinSet(k), tuple(l - 1 for l in levels)), strict)


def covering_pairs(g: SitosNet) -> list[tuple[int, int]]:
    """Pairs (x, y) with an edge produced by x and consumed by y."""
    producer = {g.tgt_out(o): g.src_out(o) for o in range(g.O.size)}
    out = []
    for i in range(g.I.size):
        a = g.src_in(i)
        if a in producer:
            out.append((producer[a], g.tgt_in(i)))
    return out


def earliest_levels(g: SitosNet) -> list[int] | None:
    """Longest-path layering (1-based) by Kahn's algorithm; None on a cycle."""
    n = g.T.size
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for x, y in covering_pairs(g):
        succ[x].append(y)
        indeg[y] += 1
    level = [1] * n
    queue = deque(x for x in range(n) if indeg[x] == 0)
    done = 0
    while queue:
        x = queue.popleft()
        done += 1
        for y in succ[x]:
            level[y] = max(level[y], level[x] + 1)
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return level if done == n else None


def is_acyclic(g: SitosNet) -> bool:
    return earliest_levels(g) is not None


def strict_level_function(g: AinoaGraph) -> LevelFunction:
    levels = earliest_levels(g)
    if levels is None:
        raise StructuralError("graph has a directed cycle")
    return LevelFunction.from_levels(g, levels, strict=True)


@dataclass(frozen=True)
class Boundaries:
    inner: tuple[int, ...]
    in_boundary: tuple[int, ...]
    out_boundary: tuple[int, ...]
    isolated: tuple[int, ...]


def boundaries(g: SitosNet) -> Boundaries:
    produced = set(g.tgt_out.table)
    consumed = set(g.src_in.table)
    A = range(g.S.size)
    return Boundaries(
        inner=tuple(a for a in A if a in produced and a in consumed),
        in_boundary=tuple(a for a in A if a not in produced),
        out_boundary=tuple(a for a in A if a not in consumed),
        isolated=tuple(a for a in A if a not in produced and a not in consumed),
    )


def residue(g: SitosNet) -> tuple[int, int]:
    b = boundaries(g)
    return (len(b.in_boundary), len(b.out_boundary))


def disjoint_union(x: SitosNet, y: SitosNet) -> SitosNet:
    """Componentwise sum, x-elements first. Returns an AinoaGraph when both are graphs."""
    S, _, _ = coproduct(x.S, y.S)
    I, _, _ = coproduct(x.I, y.I)
    T, _, _ = coproduct(x.T, y.T)
    O, _, _ = coproduct(x.O, y.O)

    def shift(m1: FinMap, m2: FinMap, dom: FinSet, cod: FinSet, off: int) -> FinMap:
        return FinMap(dom, cod, m1.table + tuple(v + off for v in m2.table))

    kind = AinoaGraph if isinstance(x, AinoaGraph) and isinstance(y, AinoaGraph) else SitosNet
    return kind(S, I, T, O,
                shift(x.src_in, y.src_in, I, S, x.S.size), shift(x.tgt_in, y.tgt_in, I, T, x.T.size),
                shift(x.src_out, y.src_out, O, T, x.T.size), shift(x.tgt_out, y.tgt_out, O, S, x.S.size))


def node_less(n: int, labels: Sequence[str] | None = None) -> AinoaGraph:
    A = FinSet(n, tuple(labels) if labels is not None else None)
    E = FinSet(0)
    return AinoaGraph(A, E, E, E, FinMap(E, A, ()), FinMap(E, E, ()), FinMap(E, E, ()), FinMap(E, A, ()))


@dataclass(frozen=True, eq=False)
class SubgraphInclusion:
    """An open subgraph together with its inclusion (an injective etale map).

    ``graph`` is an AinoaGraph whenever the subdiagram is a graph; inside a
    hypergraph it may be a plain net.
    """

    graph: SitosNet
    inclusion: EtaleMap
    edges: tuple[int, ...]
    nodes: tuple[int, ...]


def open_subgraph(g: SitosNet, nodes: Iterable[int], edges: Iterable[int]) -> SubgraphInclusion:
    """Open subdiagram on the given nodes, all their arcs, and the given edges.

    The edge set must contain every edge incident to a chosen node.
    """
    nodes = tuple(sorted(set(nodes)))
    node_set = set(nodes)
    ins = [i for i in range(g.I.size) if g.tgt_in(i) in node_set]
    outs = [o for o in range(g.O.size) if g.src_out(o) in node_set]
    incident = {g.src_in(i) for i in ins} | {g.tgt_out(o) for o in outs}
    edges = tuple(sorted(set(edges) | incident))
    e_idx = {a: k for k, a in enumerate(edges)}
    n_idx = {x: k for k, x in enumerate(nodes)}
    A = FinSet(len(edges), tuple(g.S.label(a) for a in edges) if g.S.labels else None)
    N = FinSet(len(nodes), tuple(g.T.label(x) for x in nodes) if g.T.labels else None)
    I = FinSet(len(ins), tuple(g.I.label(i) for i in ins) if g.I.labels else None)
    O = FinSet(len(outs), tuple(g.O.label(o) for o in outs) if g.O.labels else None)
    sub = SitosNet(A, I, N, O,
                   FinMap(I, A, tuple(e_idx[g.src_in(i)] for i in ins)),
                   FinMap(I, N, tuple(n_idx[g.tgt_in(i)] for i in ins)),
                   FinMap(O, N, tuple(n_idx[g.src_out(o)] for o in outs)),
                   FinMap(O, A, tuple(e_idx[g.tgt_out(o)] for o in outs)))
    if sub.is_graph():
        sub = AinoaGraph.of(sub)
    inc = EtaleMap(sub, g, FinMap(A, g.S, edges), FinMap(I, g.I, tuple(ins)),
                   FinMap(N, g.T, nodes), FinMap(O, g.O, tuple(outs)))
    return SubgraphInclusion(sub, inc, edges, nodes)


def _as_pairs(sigma, source: Sequence[int]) -> dict[int, int]:
    if isinstance(sigma, FinMap):
        return {a: sigma(k) for k, a in enumerate(source)}
    return dict(sigma)


@dataclass(frozen=True, eq=False)
class Glued:
    graph: AinoaGraph
    levels: LevelFunction
    left: EtaleMap   # g1 -> result
    right: EtaleMap  # g2 -> result


def glue(g1: SitosNet, g2: SitosNet, sigma: Mapping[int, int] | FinMap) -> Glued:
    """Glue the whole out-boundary of g1 onto the whole in-boundary of g2.

    sigma maps out-edges of g1 to in-edges of g2 (a dict, or a FinMap
    between the boundaries listed in increasing order). The result is the
    pointwise pushout over the node-less graph on out(g1).
    """
    out1 = boundaries(g1).out_boundary
    in2 = boundaries(g2).in_boundary
    pairs = _as_pairs(sigma, out1)
    if sorted(pairs) != list(out1) or sorted(pairs.values()) != list(in2):
        raise StructuralError("gluing map must be a bijection from out(g1) onto in(g2)")
    M = FinSet(len(out1))
    f = FinMap(M, g1.S, out1)
    g = FinMap(M, g2.S, tuple(pairs[a] for a in out1))
    A, ia, ib = pushout_inj(f, g)

    def empty(n):
        return FinMap(FinSet(0), FinSet(n), ())

    N, ja, jb = coproduct(FinSet(g1.T.size), FinSet(g2.T.size))
    I, ka, kb = coproduct(FinSet(g1.I.size), FinSet(g2.I.size))
    O, la, lb = coproduct(FinSet(g1.O.size), FinSet(g2.O.size))
    graph = AinoaGraph(
        A, I, N, O,
        FinMap(I, A, tuple(ia(a) for a in g1.src_in.table) + tuple(ib(a) for a in g2.src_in.table)),
        FinMap(I, N, g1.tgt_in.table + tuple(x + g1.T.size for x in g2.tgt_in.table)),
        FinMap(O, N, g1.src_out.table + tuple(x + g1.T.size for x in g2.src_out.table)),
        FinMap(O, A, tuple(ia(a) for a in g1.tgt_out.table) + tuple(ib(a) for a in g2.tgt_out.table)),
    )
    levels = LevelFunction.from_levels(graph, [1] * g1.T.size + [2] * g2.T.size, k=2)
    left = EtaleMap(g1, graph, ia, ka, ja, la)
    right = EtaleMap(g2, graph, ib, kb, jb, lb)
    return Glued(graph, levels, left, right)


@dataclass(frozen=True, eq=False)
class Cut:
    first: SubgraphInclusion
    second: SubgraphInclusion
    cut: SubgraphInclusion  # node-less graph on the cut edges


def layer_window(g: SitosNet, level: Sequence[int], lo: int, hi: int) -> SubgraphInclusion:
    """Subgraph of layers lo..hi (1-based, inclusive) for a monotone level list.

    Edges are kept when their producer level is ≤ hi and their consumer
    level is ≥ lo (missing producer counts as 0, missing consumer as k+1).
    """
    k = max(level, default=0)
    birth = [0] * g.S.size
    death = [k + 1] * g.S.size
    for o in range(g.O.size):
        birth[g.tgt_out(o)] = level[g.src_out(o)]
    for i in range(g.I.size):
        death[g.src_in(i)] = level[g.tgt_in(i)]
    nodes = [x for x in range(g.T.size) if lo <= level[x] <= hi]
    edges = [a for a in range(g.S.size) if birth[a] <= hi and death[a] >= lo]
    return open_subgraph(g, nodes, edges)


def cut_edges(g: SitosNet, level: Sequence[int], j: int, k: int | None = None) -> tuple[int, ...]:
    """Edges crossing from layers ≤ j to layers > j (j = 0..k)."""
    if k is None:
        k = max(level, default=0)
    birth = [0] * g.S.size
    death = [k + 1] * g.S.size
    for o in range(g.O.size):
        birth[g.tgt_out(o)] = level[g.src_out(o)]
    for i in range(g.I.size):
        death[g.src_in(i)] = level[g.tgt_in(i)]
    return tuple(a for a in range(g.S.size) if birth[a] <= j < death[a])


def cut_decompose(g: AinoaGraph, f: LevelFunction) -> Cut:
    """Split along a 2-level function into layer 1, layer 2 and the cut.

    Verifies that the square over the cut is both a pullback and a pushout.
    """
    if f.k != 2:
        raise StructuralError("cut_decompose needs a 2-level function")
    level = [f.of(x) for x in range(g.T.size)]
    first = layer_window(g, level, 1, 1)
    second = layer_window(g, level, 2, 2)
    m = cut_edges(g, level, 1, 2)
    cut = open_subgraph(g, [], m)
    b1, b2 = boundaries(first.graph), boundaries(second.graph)
    if tuple(first.edges[a] for a in b1.out_boundary) != m or tuple(second.edges[a] for a in b2.in_boundary) != m:
        raise StructuralError("cut is not the out-boundary of layer 1 and the in-boundary of layer 2")
    # pullback: the images intersect exactly in the cut
    if set(first.edges) & set(second.edges) != set(m):
        raise StructuralError("cut square is not a pullback")
    if set(first.nodes) & set(second.nodes):
        raise StructuralError("layers share nodes")
    # pushout: gluing the layers along the cut gives back g
    sigma = {b1.out_boundary[k]: b2.in_boundary[k] for k in range(len(m))}
    glued = glue(first.graph, second.graph, sigma)
    if glued.graph.sizes != g.sizes:
        raise StructuralError("cut square is not a pushout")
    to_g_edges = [0] * glued.graph.S.size
    for a in range(first.graph.S.size):
        to_g_edges[glued.left.on_S(a)] = first.edges[a]
    for a in range(second.graph.S.size):
        to_g_edges[glued.right.on_S(a)] = second.edges[a]
    if len(set(to_g_edges)) != g.S.size:
        raise StructuralError("cut square is not a pushout")
    return Cut(first, second, cut)


def layers(g: AinoaGraph, f: LevelFunction) -> list[SubgraphInclusion]:
    """The k layer subgraphs of a k-level function (iterated cuts)."""
    level = [f.of(x) for x in range(g.T.size)]
    return [layer_window(g, level, j, j) for j in range(1, f.k + 1)]


