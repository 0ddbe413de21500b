"""Compact process shapes and propagation-based canonical labeling.

A P-graph over a net is stored as four tuples: the place of each edge,
the transition of each node, and per node the edge sitting on each arc
of its transition's pre-set and post-set (in net arc order). Because an
etale map fixes the arc of every incidence, an isomorphism is determined
on a connected component as soon as one node's image is known: walk
along the arcs and everything else is forced. That gives both iso search
and canonical codes without any backtracking inside a component.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import StructuralError


@dataclass(frozen=True)
class Shape:
    edge_place: tuple[int, ...]
    node_trans: tuple[int, ...]
    node_in: tuple[tuple[int, ...], ...]
    node_out: tuple[tuple[int, ...], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edge_place)

    @property
    def n_nodes(self) -> int:
        return len(self.node_trans)

    @cached_property
    def producer(self) -> tuple:
        """producer[e] = (node, position in post-set) or None."""
        out: list = [None] * self.n_edges
        for x, es in enumerate(self.node_out):
            for k, e in enumerate(es):
                if out[e] is not None:
                    raise StructuralError(f"edge {e} is produced twice")
                out[e] = (x, k)
        return tuple(out)

    @cached_property
    def consumer(self) -> tuple:
        out: list = [None] * self.n_edges
        for x, es in enumerate(self.node_in):
            for k, e in enumerate(es):
                if out[e] is not None:
                    raise StructuralError(f"edge {e} is consumed twice")
                out[e] = (x, k)
        return tuple(out)

    @cached_property
    def in_boundary(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.n_edges) if self.producer[e] is None)

    @cached_property
    def out_boundary(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.n_edges) if self.consumer[e] is None)

    @cached_property
    def components(self) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
        """Connected components as (nodes, edges), node-bearing first in
        order of least node, then isolated edges."""
        seen_n = [False] * self.n_nodes
        comps = []
        for r in range(self.n_nodes):
            if seen_n[r]:
                continue
            nodes, edges = [], set()
            queue = deque([r])
            seen_n[r] = True
            while queue:
                x = queue.popleft()
                nodes.append(x)
                for e in self.node_in[x] + self.node_out[x]:
                    edges.add(e)
                    for nb in (self.producer[e], self.consumer[e]):
                        if nb is not None and not seen_n[nb[0]]:
                            seen_n[nb[0]] = True
                            queue.append(nb[0])
            comps.append((tuple(sorted(nodes)), tuple(sorted(edges))))
        for e in range(self.n_edges):
            if self.producer[e] is None and self.consumer[e] is None:
                comps.append(((), (e,)))
        return tuple(comps)

    def relabel(self, node_order: Sequence[int], edge_order: Sequence[int]) -> "Shape":
        """New node k is old node node_order[k]; likewise for edges."""
        e_new = {old: k for k, old in enumerate(edge_order)}
        return Shape(tuple(self.edge_place[e] for e in edge_order),
                     tuple(self.node_trans[x] for x in node_order),
                     tuple(tuple(e_new[e] for e in self.node_in[x]) for x in node_order),
                     tuple(tuple(e_new[e] for e in self.node_out[x]) for x in node_order))

    def validate(self, net) -> None:
        """Check that this is a graph with an etale map to net."""
        if len(self.node_in) != self.n_nodes or len(self.node_out) != self.n_nodes:
            raise StructuralError("per-node arc lists have the wrong length")
        for x, t in enumerate(self.node_trans):
            if not 0 <= t < net.T.size:
                raise StructuralError(f"node {x} sits over unknown transition {t}")
            pre, post = net.preset(t), net.postset(t)
            if len(self.node_in[x]) != len(pre) or len(self.node_out[x]) != len(post):
                raise StructuralError(f"node {x} does not match the arity of transition {t}")
            for e, i in zip(self.node_in[x], pre):
                if self.edge_place[e] != net.src_in(i):
                    raise StructuralError(f"edge {e} sits over the wrong place for arc {i}")
            for e, o in zip(self.node_out[x], post):
                if self.edge_place[e] != net.tgt_out(o):
                    raise StructuralError(f"edge {e} sits over the wrong place for arc {o}")
        for s in self.edge_place:
            if not 0 <= s < net.S.size:
                raise StructuralError(f"edge over unknown place {s}")
        self.producer, self.consumer  # raises on double use


def _tag(tags, i):
    return () if tags is None else tags[i]


def walk(shape: Shape, root: int, etag=None, ntag=None) -> tuple[tuple, list[int], list[int]]:
    """Breadth-first walk of root's component along arcs in net order.

    Returns the local code and the visiting orders of nodes and edges.
    """
    node_idx = {root: 0}
    edge_idx: dict[int, int] = {}
    order_n, order_e = [root], []
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for e in shape.node_in[x] + shape.node_out[x]:
            if e in edge_idx:
                continue
            edge_idx[e] = len(order_e)
            order_e.append(e)
            for nb in (shape.producer[e], shape.consumer[e]):
                if nb is not None and nb[0] not in node_idx:
                    node_idx[nb[0]] = len(order_n)
                    order_n.append(nb[0])
                    queue.append(nb[0])
    nodes = tuple((shape.node_trans[x], _tag(ntag, x),
                   tuple(edge_idx[e] for e in shape.node_in[x]),
                   tuple(edge_idx[e] for e in shape.node_out[x])) for x in order_n)
    edges = tuple((shape.edge_place[e], _tag(etag, e)) for e in order_e)
    return (nodes, edges), order_n, order_e


def _component_roots(shape: Shape, nodes: Sequence[int], edges: Sequence[int], etag) -> list[int]:
    """Candidate roots: forced by the least tagged edge when there is one."""
    if etag is not None:
        tagged = [e for e in edges if etag[e] != ()]
        if tagged:
            e = min(tagged, key=lambda a: etag[a])
            nb = shape.consumer[e] or shape.producer[e]
            return [nb[0]]
    return list(nodes)


@dataclass
class _Comp:
    code: tuple
    roots: list  # all roots achieving the minimal code
    order_n: list
    order_e: list


def _analyse(shape: Shape, etag=None, ntag=None) -> tuple[list[_Comp], list[tuple]]:
    comps, isolated = [], []
    for nodes, edges in shape.components:
        if not nodes:
            e = edges[0]
            isolated.append(((shape.edge_place[e], _tag(etag, e)), e))
            continue
        best = None
        for r in _component_roots(shape, nodes, edges, etag):
            code, on, oe = walk(shape, r, etag, ntag)
            if best is None or code < best.code:
                best = _Comp(code, [r], on, oe)
            elif code == best.code:
                best.roots.append(r)
        comps.append(best)
    return comps, isolated


def canonical_form(shape: Shape, etag=None, ntag=None) -> tuple[tuple, list[int], list[int]]:
    """Canonical code plus the node and edge orders realizing it.

    Relabeling ``shape`` by the returned orders gives the same structure
    for any two isomorphic (tag-preserving) shapes.
    """
    comps, isolated = _analyse(shape, etag, ntag)
    comps.sort(key=lambda c: c.code)
    isolated.sort(key=lambda p: p[0])
    node_order = [x for c in comps for x in c.order_n]
    edge_order = [e for c in comps for e in c.order_e] + [e for _, e in isolated]
    code = (tuple(c.code for c in comps), tuple(p[0] for p in isolated))
    return code, node_order, edge_order


def isomorphisms(a: Shape, b: Shape, etag_a=None, etag_b=None, ntag_a=None, ntag_b=None,
                 ) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All tag-preserving isomorphisms a -> b as (node map, edge map)."""
    if a.n_nodes != b.n_nodes or a.n_edges != b.n_edges:
        return
    ca, ia = _analyse(a, etag_a, ntag_a)
    cb, ib = _analyse(b, etag_b, ntag_b)
    groups_a: dict = {}
    groups_b: dict = {}
    for c in ca:
        groups_a.setdefault(c.code, []).append(c)
    for c in cb:
        groups_b.setdefault(c.code, []).append(c)
    if {k: len(v) for k, v in groups_a.items()} != {k: len(v) for k, v in groups_b.items()}:
        return
    iso_a: dict = {}
    iso_b: dict = {}
    for key, e in ia:
        iso_a.setdefault(key, []).append(e)
    for key, e in ib:
        iso_b.setdefault(key, []).append(e)
    if {k: len(v) for k, v in iso_a.items()} != {k: len(v) for k, v in iso_b.items()}:
        return

    # each factor is a list of alternative partial maps (node pairs, edge pairs)
    factors = []
    for code, comps_a in groups_a.items():
        comps_b = groups_b[code]
        options = []
        for perm in itertools.permutations(range(len(comps_b))):
            per_comp = []
            for j, c in enumerate(comps_a):
                cbj = comps_b[perm[j]]
                choices = []
                for rb in cbj.roots:
                    _, on_b, oe_b = walk(b, rb, etag_b, ntag_b)
                    choices.append((list(zip(c.order_n, on_b)), list(zip(c.order_e, oe_b))))
                per_comp.append(choices)
            for combo in itertools.product(*per_comp):
                options.append(([p for n, _ in combo for p in n], [p for _, e in combo for p in e]))
        factors.append(options)
    for key, edges_a in iso_a.items():
        edges_b = iso_b[key]
        factors.append([([], list(zip(edges_a, perm))) for perm in itertools.permutations(edges_b)])

    for combo in itertools.product(*factors):
        nmap = [0] * a.n_nodes
        emap = [0] * a.n_edges
        for npairs, epairs in combo:
            for x, y in npairs:
                nmap[x] = y
            for e, f in epairs:
                emap[e] = f
        yield tuple(nmap), tuple(emap)


def first_isomorphism(a: Shape, b: Shape, etag_a=None, etag_b=None, ntag_a=None, ntag_b=None):
    for iso in isomorphisms(a, b, etag_a, etag_b, ntag_a, ntag_b):
        return iso
    return None


def is_isomorphism(a: Shape, b: Shape, nmap: Sequence[int], emap: Sequence[int]) -> bool:
    """Independent check that (nmap, emap) is an isomorphism of P-graphs."""
    if sorted(nmap) != list(range(b.n_nodes)) or sorted(emap) != list(range(b.n_edges)):
        return False
    if any(a.edge_place[e] != b.edge_place[emap[e]] for e in range(a.n_edges)):
        return False
    for x in range(a.n_nodes):
        y = nmap[x]
        if a.node_trans[x] != b.node_trans[y]:
            return False
        if tuple(emap[e] for e in a.node_in[x]) != b.node_in[y]:
            return False
        if tuple(emap[e] for e in a.node_out[x]) != b.node_out[y]:
            return False
    return True


def disjoint(a: Shape, b: Shape) -> Shape:
    off_e, off_n = a.n_edges, a.n_nodes
    return Shape(a.edge_place + b.edge_place, a.node_trans + b.node_trans,
                 a.node_in + tuple(tuple(e + off_e for e in es) for es in b.node_in),
                 a.node_out + tuple(tuple(e + off_e for e in es) for es in b.node_out))
