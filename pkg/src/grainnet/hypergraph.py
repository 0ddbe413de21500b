"""Hypergraphs (nets whose two spans are relations), their forward,
well-founded and occurrence flags, lowersets, and colimits of connected
diagrams of injective etale maps."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import PreconditionError, StructuralError
from .finset import FinMap, FinSet
from .groupoid import Verdict
from .net import EtaleMap, SitosNet, SubgraphInclusion, is_etale, open_subgraph


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """A net certified to have relation spans: no two in-arcs join the same
    (hyperedge, node) pair, and likewise for out-arcs.

    Graph vocabulary: hyperedges A = net.S, nodes N = net.T.
    """

    net: SitosNet

    def __post_init__(self):
        g = self.net
        ins = [(g.src_in(i), g.tgt_in(i)) for i in range(g.I.size)]
        outs = [(g.src_out(o), g.tgt_out(o)) for o in range(g.O.size)]
        if len(set(ins)) != len(ins):
            raise StructuralError("I -> A x N is not injective")
        if len(set(outs)) != len(outs):
            raise StructuralError("O -> N x A is not injective")

    @property
    def n_edges(self) -> int:
        return self.net.S.size

    @property
    def n_nodes(self) -> int:
        return self.net.T.size

    def is_forward(self) -> bool:
        return self.net.tgt_out.is_injective()

    def predecessors(self) -> list[set[int]]:
        """pred[y] = nodes x with x ⋖ y (some out-edge of x is an in-edge of y)."""
        g = self.net
        producers: list[list[int]] = [[] for _ in range(g.S.size)]
        for o in range(g.O.size):
            producers[g.tgt_out(o)].append(g.src_out(o))
        pred: list[set[int]] = [set() for _ in range(g.T.size)]
        for i in range(g.I.size):
            pred[g.tgt_in(i)].update(producers[g.src_in(i)])
        return pred

    def est(self) -> list[int] | None:
        """Earliest-start-time of every node, or None if some node lies on a cycle."""
        pred = self.predecessors()
        n = len(pred)
        succ: list[list[int]] = [[] for _ in range(n)]
        indeg = [len(p) for p in pred]
        for y, ps in enumerate(pred):
            for x in ps:
                succ[x].append(y)
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

    def below(self, y: int) -> set[int]:
        """Nodes x ≤ y."""
        if not 0 <= y < self.n_nodes:
            raise StructuralError(f"unknown node {y}")
        pred = self.predecessors()
        seen = {y}
        stack = [y]
        while stack:
            for x in pred[stack.pop()]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return seen


@dataclass(frozen=True)
class Classification:
    forward: bool
    well_founded: bool
    occurrence: bool
    est: tuple[int, ...] | None
    witness: int | None = None   # a node whose principal lowerset is not a graph


def principal_lowerset(h: Hypergraph, y: int, b_edges: Sequence[int] = ()) -> SubgraphInclusion:
    """Open sub-hypergraph spanned by the nodes below y, with all their
    incident hyperedges (and the given B hyperedges, for the B-flavour)."""
    if h.est() is None:
        raise PreconditionError("principal lowersets need a well-founded hypergraph")
    return open_subgraph(h.net, h.below(y), b_edges)


def classify(h: Hypergraph) -> Classification:
    est = h.est()
    forward = h.is_forward()
    if est is None:
        return Classification(forward, False, False, None)
    for y in range(h.n_nodes):
        if not open_subgraph(h.net, h.below(y), ()).graph.is_graph():
            return Classification(forward, True, False, tuple(est), y)
    return Classification(forward, True, forward, tuple(est))


@dataclass(frozen=True, eq=False)
class BHypergraph:
    """A forward hypergraph with in-boundary B: ``b[k]`` is the hyperedge of
    token k, and the b's are exactly the hyperedges no node produces."""

    hyper: Hypergraph
    b: tuple[int, ...]

    def __post_init__(self):
        if not self.hyper.is_forward():
            raise StructuralError("a B-hypergraph must be forward")
        if len(set(self.b)) != len(self.b):
            raise StructuralError("B -> A must be injective")
        produced = set(self.hyper.net.tgt_out.table)
        rest = [a for a in range(self.hyper.n_edges) if a not in produced]
        if sorted(self.b) != rest:
            raise StructuralError("B must be exactly the hyperedges with no producer")

    @property
    def net(self) -> SitosNet:
        return self.hyper.net

    @staticmethod
    def of(net: SitosNet, b: Sequence[int]) -> "BHypergraph":
        return BHypergraph(Hypergraph(net), tuple(b))


def _lowerset_nodes(h: Hypergraph, bound: int) -> list[frozenset]:
    pred = h.predecessors()
    found = {frozenset()}
    frontier = [frozenset()]
    for _ in range(bound):
        nxt = []
        for s in frontier:
            for y in range(h.n_nodes):
                if y not in s and pred[y] <= s:
                    t = s | {y}
                    if t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def lowersets_of(h: BHypergraph, bound: int) -> list[SubgraphInclusion]:
    """Every lowerset of nodes with ≤ bound nodes, expanded to its B-lowerset.

    The expansion is certified to be inverse to taking node sets: each
    expansion contains B, its nodes are exactly the lowerset, and distinct
    lowersets give distinct expansions.
    """
    if h.hyper.est() is None:
        raise PreconditionError("lowersets need a well-founded hypergraph")
    pred = h.hyper.predecessors()
    out = []
    seen = set()
    for nodes in _lowerset_nodes(h.hyper, bound):
        sub = open_subgraph(h.net, nodes, h.b)
        if set(sub.nodes) != set(nodes) or not set(h.b) <= set(sub.edges):
            raise StructuralError("lowerset expansion lost nodes or B")
        if any(not pred[y] <= set(sub.nodes) for y in sub.nodes):
            raise StructuralError("expansion is not downward closed")
        key = (sub.nodes, sub.edges)
        if key in seen:
            raise StructuralError("two lowersets expanded to the same sub-hypergraph")
        seen.add(key)
        out.append(sub)
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True, eq=False)
class Colimit:
    result: BHypergraph
    cocone: list[EtaleMap]
    classification: Classification


def colimit_injective(objects: Sequence[BHypergraph],
                      arrows: Sequence[tuple[int, int, EtaleMap]]) -> Colimit:
    """Pointwise colimit of a connected diagram of injective etale B-maps.

    ``arrows`` are (i, j, map objects[i] -> objects[j]). Elements are
    numbered by first appearance (object index, then element index).
    """
    if not objects:
        raise PreconditionError("colimit of an empty diagram")
    n = len(objects)
    link = _UnionFind(n)
    for i, j, e in arrows:
        if e.dom is not objects[i].net or e.cod is not objects[j].net:
            raise StructuralError(f"arrow {i}->{j} does not match its objects")
        if not e.is_injective():
            raise PreconditionError(f"arrow {i}->{j} is not injective")
        v = is_etale(e)
        if not v:
            raise PreconditionError(f"arrow {i}->{j} is not etale: {v.reason}")
        if tuple(e.on_S(a) for a in objects[i].b) != objects[j].b:
            raise PreconditionError(f"arrow {i}->{j} does not preserve B")
        link.union(i, j)
    if len({link.find(i) for i in range(n)}) != 1:
        raise PreconditionError("diagram is not connected")

    comps = {}
    for key, size_of, on in (("S", lambda g: g.S.size, lambda e: e.on_S), ("I", lambda g: g.I.size, lambda e: e.on_I),
                             ("T", lambda g: g.T.size, lambda e: e.on_T), ("O", lambda g: g.O.size, lambda e: e.on_O)):
        offsets, total = [], 0
        for ob in objects:
            offsets.append(total)
            total += size_of(ob.net)
        uf = _UnionFind(total)
        for i, j, e in arrows:
            m = on(e)
            for x in range(m.dom.size):
                uf.union(offsets[i] + x, offsets[j] + m(x))
        classes: dict[int, int] = {}
        legs = []
        for k, ob in enumerate(objects):
            leg = []
            for x in range(size_of(ob.net)):
                r = uf.find(offsets[k] + x)
                if r not in classes:
                    classes[r] = len(classes)
                leg.append(classes[r])
            legs.append(leg)
        comps[key] = (len(classes), legs)

    def structure(name: str, src_key: str, dst_key: str) -> tuple[int, ...]:
        size = comps[src_key][0]
        table: list = [None] * size
        for k, ob in enumerate(objects):
            m = getattr(ob.net, name)
            for x in range(m.dom.size):
                a, b = comps[src_key][1][k][x], comps[dst_key][1][k][m(x)]
                if table[a] is None:
                    table[a] = b
                elif table[a] != b:
                    raise StructuralError("colimit structure map is not well defined")
        return tuple(table)

    S, I, T, O = (FinSet(comps[k][0]) for k in "SITO")
    net = SitosNet(S, I, T, O,
                   FinMap(I, S, structure("src_in", "I", "S")), FinMap(I, T, structure("tgt_in", "I", "T")),
                   FinMap(O, T, structure("src_out", "O", "T")), FinMap(O, S, structure("tgt_out", "O", "S")))
    b = tuple(comps["S"][1][0][a] for a in objects[0].b)
    result = BHypergraph.of(net, b)
    cocone = []
    for k, ob in enumerate(objects):
        cocone.append(EtaleMap(ob.net, net, *(FinMap(getattr(ob.net, key), getattr(net, key), tuple(comps[key][1][k]))
                                                for key in "SITO")))
    return Colimit(result, cocone, classify(result.hyper))


def check_lowersets_preserved(sub: BHypergraph, h: BHypergraph, e: EtaleMap) -> Verdict:
    """For an injective etale B-map sub -> h, the principal B-lowerset of
    every node of sub maps onto the principal B-lowerset of its image."""
    for y in range(sub.hyper.n_nodes):
        low = principal_lowerset(sub.hyper, y, sub.b)
        high = principal_lowerset(h.hyper, e.on_T(y), h.b)
        if sorted(e.on_T(x) for x in low.nodes) != list(high.nodes):
            return Verdict(False, "node sets differ", y)
        if sorted(e.on_S(a) for a in low.edges) != list(high.edges):
            return Verdict(False, "hyperedge sets differ", y)
    est_sub, est_h = sub.hyper.est(), h.hyper.est()
    for y in range(sub.hyper.n_nodes):
        if est_sub[y] != est_h[e.on_T(y)]:
            return Verdict(False, "EST not preserved", y)
    return Verdict(True)

