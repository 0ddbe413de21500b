"""Processes: etale maps from acyclic graphs into a net.

Firings, firing sequences, composition by gluing, isomorphism search,
canonical codes and enumeration of the processes starting at a marking.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import canon
from .canon import Shape
from .errors import PreconditionError, StructuralError
from .finset import FinMap, FinSet
from .limits import check_cap
from .net import (AinoaGraph, EtaleMap, LevelFunction, Marking, SitosNet, boundaries,
                  earliest_levels, glue, is_etale)


class Process:
    """An etale map from an acyclic graph into ``net``.

    Internally the process is its compact ``Shape``; ``graph`` and
    ``etale`` rebuild the diagram form on demand. ``b_edges`` optionally
    records which edge carries each token of a chosen initial marking B
    (default: the in-boundary in increasing order).
    """

    def __init__(self, net: SitosNet, shape: Shape, edge_names: Sequence[str] | None = None,
                 node_names: Sequence[str] | None = None, b_edges: Sequence[int] | None = None,
                 check: bool = True):
        self.net = net
        self.shape = shape
        self.edge_names = tuple(edge_names) if edge_names is not None else None
        self.node_names = tuple(node_names) if node_names is not None else None
        self.b_edges = tuple(b_edges) if b_edges is not None else None
        if check:
            shape.validate(net)
            if earliest_levels(self.graph) is None:
                raise StructuralError("process graph has a directed cycle")
            if self.b_edges is not None and sorted(self.b_edges) != list(self.in_boundary):
                raise StructuralError("B must be identified with the whole in-boundary")

    def __repr__(self) -> str:
        return f"Process(nodes={self.n_nodes}, edges={self.n_edges})"

    @property
    def n_nodes(self) -> int:
        return self.shape.n_nodes

    @property
    def n_edges(self) -> int:
        return self.shape.n_edges

    @property
    def in_boundary(self) -> tuple[int, ...]:
        return self.shape.in_boundary

    @property
    def out_boundary(self) -> tuple[int, ...]:
        return self.shape.out_boundary

    @property
    def b_order(self) -> tuple[int, ...]:
        return self.b_edges if self.b_edges is not None else self.in_boundary

    def edge_name(self, e: int) -> str:
        return self.edge_names[e] if self.edge_names else f"e{e}"

    def node_name(self, x: int) -> str:
        return self.node_names[x] if self.node_names else f"x{x}"

    @cached_property
    def graph(self) -> AinoaGraph:
        sh, net = self.shape, self.net
        ins = [(x, k) for x in range(sh.n_nodes) for k in range(len(sh.node_in[x]))]
        outs = [(x, k) for x in range(sh.n_nodes) for k in range(len(sh.node_out[x]))]
        A = FinSet(sh.n_edges, self.edge_names)
        N = FinSet(sh.n_nodes, self.node_names)
        I, O = FinSet(len(ins)), FinSet(len(outs))
        return AinoaGraph(A, I, N, O,
                          FinMap(I, A, tuple(sh.node_in[x][k] for x, k in ins)),
                          FinMap(I, N, tuple(x for x, _ in ins)),
                          FinMap(O, N, tuple(x for x, _ in outs)),
                          FinMap(O, A, tuple(sh.node_out[x][k] for x, k in outs)))

    @cached_property
    def etale(self) -> EtaleMap:
        sh, net, g = self.shape, self.net, self.graph
        on_I = [net.preset(sh.node_trans[x])[k] for x in range(sh.n_nodes) for k in range(len(sh.node_in[x]))]
        on_O = [net.postset(sh.node_trans[x])[k] for x in range(sh.n_nodes) for k in range(len(sh.node_out[x]))]
        return EtaleMap(g, net, FinMap(g.S, net.S, sh.edge_place), FinMap(g.I, net.I, on_I),
                        FinMap(g.T, net.T, sh.node_trans), FinMap(g.O, net.O, on_O))

    @staticmethod
    def from_etale(e: EtaleMap, edge_names=None, node_names=None, b_edges=None) -> "Process":
        """Read off the compact shape from an etale map of a graph into a net."""
        g, net = e.dom, e.cod
        v = is_etale(e)
        if not v:
            raise StructuralError(f"not etale: {v.reason}")
        node_in: list[list] = [[] for _ in range(g.T.size)]
        node_out: list[list] = [[] for _ in range(g.T.size)]
        for i in range(g.I.size):
            node_in[g.tgt_in(i)].append((e.on_I(i), g.src_in(i)))
        for o in range(g.O.size):
            node_out[g.src_out(o)].append((e.on_O(o), g.tgt_out(o)))
        shape = Shape(e.on_S.table, e.on_T.table,
                      tuple(tuple(a for _, a in sorted(l)) for l in node_in),
                      tuple(tuple(a for _, a in sorted(l)) for l in node_out))
        if edge_names is None and g.S.labels is not None:
            edge_names = g.S.labels
        if node_names is None and g.T.labels is not None:
            node_names = g.T.labels
        return Process(net, shape, edge_names, node_names, b_edges)

    def initial_marking(self) -> Marking:
        es = self.b_order
        return Marking.of(self.net, [self.shape.edge_place[e] for e in es],
                          [self.edge_name(e) for e in es] if self.edge_names else None)

    def final_marking(self) -> Marking:
        es = self.out_boundary
        return Marking.of(self.net, [self.shape.edge_place[e] for e in es],
                          [self.edge_name(e) for e in es] if self.edge_names else None)

    def est_levels(self) -> list[int]:
        return earliest_levels(self.graph)

    def est_depth(self) -> int:
        return max(self.est_levels(), default=0)

    def b_tags(self) -> list:
        tags: list = [()] * self.n_edges
        for k, e in enumerate(self.b_order):
            tags[e] = ((0, k),)
        return tags


def identity_process(m: Marking) -> Process:
    """Node-less process on the tokens of m."""
    shape = Shape(m.place.table, (), (), ())
    names = m.tokens.labels
    return Process(m.net, shape, names, (), tuple(range(m.size)))


@dataclass(frozen=True)
class FiringBinding:
    """Transition t fed by tokens: tokens[k] sits on the k-th arc of pre(t)."""

    transition: int
    tokens: tuple[int, ...]

    def token_of_arc(self, net: SitosNet, m: Marking) -> FinMap:
        pre = net.preset(self.transition)
        return FinMap(FinSet(len(pre), tuple(net.I.label(i) for i in pre) if net.I.labels else None),
                      m.tokens, self.tokens)

    def describe(self, net: SitosNet, m: Marking) -> str:
        pre = net.preset(self.transition)
        parts = [f"{net.I.label(i)}={m.token_name(tok)}" for i, tok in zip(pre, self.tokens)]
        return f"{net.trans_name(self.transition)}:" + ",".join(parts)


def minimal_firing(net: SitosNet, t: int) -> Process:
    """The corolla of t with identity components on its arcs."""
    if not 0 <= t < net.T.size:
        raise StructuralError(f"no transition {t}")
    pre, post = net.preset(t), net.postset(t)
    m, n = len(pre), len(post)
    shape = Shape(tuple(net.src_in(i) for i in pre) + tuple(net.tgt_out(o) for o in post), (t,),
                  (tuple(range(m)),), (tuple(range(m, m + n)),))
    names = None
    if net.I.labels and net.O.labels:
        names = tuple(f"in.{net.I.label(i)}" for i in pre) + tuple(f"out.{net.O.label(o)}" for o in post)
    return Process(net, shape, names, (net.trans_name(t),))


def _bindings_on(net: SitosNet, places: Sequence[int], available: Sequence[int]) -> list[FiringBinding]:
    """Injective place-compatible assignments into the positions ``available``."""
    by_place: dict[int, list[int]] = {}
    for pos in available:
        by_place.setdefault(places[pos], []).append(pos)
    out = []
    for t in range(net.T.size):
        cands = [by_place.get(net.src_in(i), []) for i in net.preset(t)]
        for combo in itertools.product(*cands):
            if len(set(combo)) == len(combo):
                out.append(FiringBinding(t, tuple(combo)))
    return out


def enabled_firings(net: SitosNet, m: Marking) -> list[FiringBinding]:
    """All bindings, ordered by transition and then lexicographically."""
    return _bindings_on(net, m.place.table, range(m.size))


def check_binding(net: SitosNet, m: Marking, b: FiringBinding) -> None:
    if not 0 <= b.transition < net.T.size:
        raise PreconditionError(f"binding names unknown transition {b.transition}")
    pre = net.preset(b.transition)
    if len(b.tokens) != len(pre):
        raise PreconditionError("binding does not feed every input arc exactly once")
    if len(set(b.tokens)) != len(b.tokens):
        raise PreconditionError("binding uses a token twice")
    for i, tok in zip(pre, b.tokens):
        if not 0 <= tok < m.size:
            raise PreconditionError(f"stale binding: token {tok} is not in the marking")
        if m.place(tok) != net.src_in(i):
            raise PreconditionError(f"token {m.token_name(tok)} is not on the place of arc {net.I.label(i)}")


def _unique_names(existing: Iterable[str], wanted: Sequence[str]) -> list[str]:
    used = set(existing)
    out = []
    for w in wanted:
        name, k = w, 1
        while name in used:
            k += 1
            name = f"{w}~{k}"
        used.add(name)
        out.append(name)
    return out


def fire(net: SitosNet, m: Marking, b: FiringBinding, step: int = 1) -> tuple[Process, Marking]:
    """Fire b in m. The process is the corolla plus isolated edges for the
    untouched tokens; edge k < |M| is token k, fresh edges follow."""
    check_binding(net, m, b)
    t = b.transition
    post = net.postset(t)
    nm = m.size
    shape = Shape(m.place.table + tuple(net.tgt_out(o) for o in post), (t,),
                  (tuple(b.tokens),), (tuple(range(nm, nm + len(post))),))
    old_names = [m.token_name(k) for k in range(nm)]
    fresh = _unique_names(old_names, [f"{net.O.label(o)}@{step}" for o in post])
    proc = Process(net, shape, old_names + fresh, (f"{net.trans_name(t)}@{step}",), tuple(range(nm)))
    consumed = set(b.tokens)
    remaining = [k for k in range(nm) if k not in consumed]
    new_places = [m.place(k) for k in remaining] + [net.tgt_out(o) for o in post]
    new_names = [old_names[k] for k in remaining] + fresh
    return proc, Marking.of(net, new_places, new_names)


@dataclass
class Composite:
    process: Process
    levels: LevelFunction
    left_edges: tuple[int, ...]   # edge of p1 -> edge of result
    right_edges: tuple[int, ...]  # edge of p2 -> edge of result


def compose_processes(p1: Process, p2: Process, sigma: Mapping[int, int]) -> Composite:
    """Glue p2 after p1 along sigma: out-edge of p1 -> in-edge of p2."""
    if p1.net is not p2.net and not p1.net.same_as(p2.net):
        raise StructuralError("processes live over different nets")
    for a, b in dict(sigma).items():
        if p1.shape.edge_place[a] != p2.shape.edge_place[b]:
            raise StructuralError(f"state isomorphism is not over S at edge {a}")
    g = glue(p1.graph, p2.graph, sigma)
    net = p1.net
    res = g.graph
    on_S = [0] * res.S.size
    for a in range(p1.n_edges):
        on_S[g.left.on_S(a)] = p1.shape.edge_place[a]
    for a in range(p2.n_edges):
        on_S[g.right.on_S(a)] = p2.shape.edge_place[a]
    e1, e2 = p1.etale, p2.etale
    etale = EtaleMap(res, net, FinMap(res.S, net.S, on_S), FinMap(res.I, net.I, e1.on_I.table + e2.on_I.table),
                     FinMap(res.T, net.T, e1.on_T.table + e2.on_T.table),
                     FinMap(res.O, net.O, e1.on_O.table + e2.on_O.table))
    names = None
    if p1.edge_names and p2.edge_names:
        names = [""] * res.S.size
        for a in range(p2.n_edges):
            names[g.right.on_S(a)] = p2.edge_name(a)
        for a in range(p1.n_edges):
            names[g.left.on_S(a)] = p1.edge_name(a)
        if len(set(names)) != len(names):
            names = None
    nodes = None
    if p1.node_names and p2.node_names and not set(p1.node_names) & set(p2.node_names):
        nodes = p1.node_names + p2.node_names
    b_edges = tuple(g.left.on_S(e) for e in p1.b_order)
    proc = Process.from_etale(etale, names, nodes, b_edges)
    levels = LevelFunction.from_levels(proc.graph, [1] * p1.n_nodes + [2] * p2.n_nodes, k=2)
    return Composite(proc, levels, g.left.on_S.table, g.right.on_S.table)


@dataclass
class Scheduled:
    process: Process
    levels: LevelFunction
    markings: list[Marking]   # marking before each step, and the final one
    frames: list[tuple[int, ...]]


def process_of_sequence(net: SitosNet, m0: Marking, seq: Sequence[FiringBinding]) -> Scheduled:
    """Left fold of single firings glued one after another.

    Each binding refers to token positions of the marking current at its
    step (the marking returned by ``fire``).
    """
    from .net import marking_multiset
    acc = identity_process(m0)
    cur = m0
    cur_edges = list(range(m0.size))  # token k of cur sits on edge cur_edges[k] of acc
    levels: list[int] = []
    markings = [m0]
    for j, b in enumerate(seq, start=1):
        try:
            step, nxt = fire(net, cur, b, step=j)
        except PreconditionError as exc:
            raise PreconditionError(f"step {j} is not enabled: {exc}") from None
        sigma = {cur_edges[k]: k for k in range(cur.size)}
        comp = compose_processes(acc, step, sigma)
        consumed = set(b.tokens)
        remaining = [k for k in range(cur.size) if k not in consumed]
        fresh = list(range(cur.size, step.n_edges))
        cur_edges = [comp.right_edges[k] for k in remaining + fresh]
        acc = comp.process
        levels.append(j)
        cur = nxt
        markings.append(cur)
    level = LevelFunction.from_levels(acc.graph, levels, k=len(seq), strict=True)
    return Scheduled(acc, level, markings, [marking_multiset(m) for m in markings])


@dataclass(frozen=True)
class ProcessIso:
    nodes: tuple[int, ...]
    edges: tuple[int, ...]


def _boundary_tags(p: Process, q: Process, fix_boundary) -> tuple[list, list]:
    in_map, out_map = fix_boundary
    tp: list = [[] for _ in range(p.n_edges)]
    tq: list = [[] for _ in range(q.n_edges)]
    for kind, mapping in ((0, in_map), (1, out_map)):
        if mapping is None:
            continue
        for k, (a, b) in enumerate(sorted(dict(mapping).items())):
            tp[a].append((kind, k))
            tq[b].append((kind, k))
    return [tuple(t) for t in tp], [tuple(t) for t in tq]


def iso_processes(p: Process, q: Process, fix_boundary=None) -> ProcessIso | None:
    """An isomorphism of P-graphs p -> q, or None.

    fix_boundary = (in-bijection, out-bijection) as dicts from edges of p
    to edges of q; either may be None. The returned iso then agrees with
    them.
    """
    if not p.net.same_as(q.net):
        raise StructuralError("processes live over different nets")
    ta = tb = None
    if fix_boundary is not None:
        ta, tb = _boundary_tags(p, q, fix_boundary)
    iso = canon.first_isomorphism(p.shape, q.shape, ta, tb)
    if iso is None:
        return None
    return ProcessIso(*iso)


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Totally ordered key identifying a process up to isomorphism."""

    key: bytes
    flavor: str = field(default="plain", compare=False)

    @staticmethod
    def of(code: tuple, flavor: str) -> "CanonicalCode":
        return CanonicalCode(repr(code).encode("ascii"), flavor)

    def short(self) -> str:
        import hashlib
        return hashlib.sha256(self.key).hexdigest()[:12]

    def __repr__(self) -> str:
        return f"CanonicalCode({self.flavor}:{self.short()})"


def canonical_code(p: Process, flavor: str = "plain") -> CanonicalCode:
    """Plain codes identify p up to isomorphism, B-rooted ones up to
    isomorphisms fixing the chosen identification of B."""
    if flavor in ("plain",):
        code, _, _ = canon.canonical_form(p.shape)
    elif flavor in ("B", "B-rooted", "b"):
        code, _, _ = canon.canonical_form(p.shape, p.b_tags())
        flavor = "B"
    else:
        raise StructuralError(f"unknown code flavor {flavor!r}")
    return CanonicalCode.of(code, flavor)


def numbered_code(p: Process, in_order: Sequence[int], out_order: Sequence[int]) -> CanonicalCode:
    """Code of p with numbered boundaries: in_order[k] is the k-th in-edge."""
    tags: list = [[] for _ in range(p.n_edges)]
    for k, e in enumerate(in_order):
        tags[e].append((0, k))
    for k, e in enumerate(out_order):
        tags[e].append((1, k))
    code, _, _ = canon.canonical_form(p.shape, [tuple(t) for t in tags])
    return CanonicalCode.of(code, "numbered")


# enumeration of B-processes

def grow(shape: Shape, net: SitosNet, b: FiringBinding) -> Shape:
    """Append one node firing b on edges of the out-boundary (b.tokens are edges)."""
    t = b.transition
    post = net.postset(t)
    n0 = shape.n_edges
    return Shape(shape.edge_place + tuple(net.tgt_out(o) for o in post), shape.node_trans + (t,),
                 shape.node_in + (tuple(b.tokens),), shape.node_out + (tuple(range(n0, n0 + len(post))),))


def extensions(shape: Shape, net: SitosNet) -> list[FiringBinding]:
    return _bindings_on(net, shape.edge_place, shape.out_boundary)


def b_rooted_tags(shape: Shape, nb: int) -> list:
    return [((0, e),) if e < nb else () for e in range(shape.n_edges)]


def grow_b_processes(net: SitosNet, b_places: Sequence[int], max_nodes: int,
                     keep=None) -> tuple[list[list[Shape]], bool]:
    """All B-processes by node count, one shape per B-iso class.

    B edges are 0..|B|-1 in every shape. ``keep`` optionally filters which
    shapes are kept and grown further. Returns (levels, saturated) where
    saturated means no process with max_nodes nodes can be extended.
    """
    nb = len(b_places)
    levels = [[Shape(tuple(b_places), (), (), ())]]
    total = 1
    for n in range(max_nodes):
        nxt: dict = {}
        for sh in levels[n]:
            for bnd in extensions(sh, net):
                new = grow(sh, net, bnd)
                if keep is not None and not keep(new):
                    continue
                code, _, _ = canon.canonical_form(new, b_rooted_tags(new, nb))
                if code not in nxt:
                    nxt[code] = new
        if not nxt:
            return levels, True
        total += len(nxt)
        check_cap(total, "process enumeration")
        levels.append([nxt[c] for c in sorted(nxt)])
    saturated = True
    for sh in levels[-1]:
        for bnd in extensions(sh, net):
            if keep is None or keep(grow(sh, net, bnd)):
                saturated = False
                break
        if not saturated:
            break
    return levels, saturated


def b_map(g: Shape, h: Shape, nb: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """The B-preserving etale map g -> h, found by propagation from B, or None."""
    nmap: dict[int, int] = {}
    emap: dict[int, int] = {e: e for e in range(nb)}
    todo_e = list(range(nb))
    todo_n: list[int] = []

    def set_node(x, y):
        if x in nmap:
            return nmap[x] == y
        if g.node_trans[x] != h.node_trans[y]:
            return False
        nmap[x] = y
        todo_n.append(x)
        return True

    def set_edge(e, f):
        if e in emap:
            return emap[e] == f
        if g.edge_place[e] != h.edge_place[f]:
            return False
        emap[e] = f
        todo_e.append(e)
        return True

    while todo_e or todo_n:
        while todo_e:
            e = todo_e.pop()
            f = emap[e]
            for side_g, side_h in ((g.consumer, h.consumer), (g.producer, h.producer)):
                if side_g[e] is None:
                    continue
                x, k = side_g[e]
                if side_h[f] is None or side_h[f][1] != k:
                    return None
                if not set_node(x, side_h[f][0]):
                    return None
        while todo_n:
            x = todo_n.pop()
            y = nmap[x]
            for e, f in zip(g.node_in[x] + g.node_out[x], h.node_in[y] + h.node_out[y]):
                if not set_edge(e, f):
                    return None
    if len(nmap) != g.n_nodes or len(emap) != g.n_edges:
        return None
    nt = tuple(nmap[x] for x in range(g.n_nodes))
    et = tuple(emap[e] for e in range(g.n_edges))
    return nt, et


@dataclass
class BProcessEnumeration:
    net: SitosNet
    B: Marking
    processes: list[Process]
    codes: list[CanonicalCode]
    order: list[tuple[int, int]]   # (i, j): a B-map p_i -> p_j exists, i != j
    maps: dict                     # (i, j) -> (node map, edge map)
    saturated: bool

    def covers(self) -> list[tuple[int, int]]:
        n_nodes = [p.n_nodes for p in self.processes]
        return [(i, j) for i, j in self.order if n_nodes[j] == n_nodes[i] + 1]

    def leq(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.maps


def enumerate_B_processes(net: SitosNet, B: Marking, max_nodes: int, check: bool = True) -> BProcessEnumeration:
    """All B-processes with at most max_nodes nodes, one per B-iso class,
    sorted by B-rooted code, with the poset of B-maps between them."""
    if not net.grounded:
        raise PreconditionError("enumerate_B_processes needs a grounded net (every transition has an input)")
    nb = B.size
    levels, saturated = grow_b_processes(net, B.place.table, max_nodes)
    shapes = [sh for lvl in levels for sh in lvl]
    names = list(B.tokens.labels) if B.tokens.labels else [f"b{k}" for k in range(nb)]
    procs, codes = [], []
    for sh in shapes:
        en = names + [f"c{e}" for e in range(nb, sh.n_edges)]
        p = Process(net, sh, en, None, tuple(range(nb)))
        procs.append(p)
        codes.append(canonical_code(p, "B"))
    idx = sorted(range(len(procs)), key=lambda i: codes[i])
    procs = [procs[i] for i in idx]
    codes = [codes[i] for i in idx]
    order, maps = [], {}
    for i, p in enumerate(procs):
        for j, q in enumerate(procs):
            if i == j or p.n_nodes >= q.n_nodes:
                continue
            m = b_map(p.shape, q.shape, nb)
            if m is not None:
                if check and (len(set(m[0])) != len(m[0]) or len(set(m[1])) != len(m[1])):
                    raise AssertionError("a morphism of B-processes is not injective")
                order.append((i, j))
                maps[(i, j)] = m
    if check:
        for p in procs:
            auts = list(canon.isomorphisms(p.shape, p.shape, p.b_tags(), p.b_tags()))
            if len(auts) != 1:
                raise AssertionError("a B-process has a non-trivial B-automorphism")
    return BProcessEnumeration(net, B, procs, codes, order, maps, saturated)
