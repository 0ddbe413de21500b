"""The universal unfolding of a marked net, built two independent ways.

``unfold`` constructs events directly, level by earliest-start-time: an
event is a transition together with an injective assignment of its input
arcs to pairwise concurrent conditions. ``colimit_unfold`` instead takes
the colimit of all B-processes up to the same depth. The two must agree
up to isomorphism over the net and B.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .canon import Shape
from .errors import DiagnosticError, PreconditionError, StructuralError
from .finset import FinMap, FinSet
from .groupoid import Verdict
from .hypergraph import BHypergraph, Classification, classify, colimit_injective
from .limits import check_cap
from .net import EtaleMap, Marking, SitosNet, is_etale, open_subgraph
from .process import (BProcessEnumeration, Process, b_map, canonical_code, enumerate_B_processes, extensions,
                      grow, grow_b_processes)

_NO_LIMIT = 10 ** 9


@dataclass(eq=False)
class Unfolding:
    """A finite truncation of the universal unfolding.

    Conditions are hyperedges, events are nodes. ``condition_keys[c]`` is
    ('b', k) for the k-th token of B, or ('post', event, position in the
    postset). ``event_keys[x]`` is (transition, input conditions in preset
    order). ``level[x]`` is the event's earliest-start-time.
    """

    net: SitosNet
    B: Marking
    carrier: BHypergraph
    to_net: EtaleMap
    depth: int
    saturated: bool
    condition_keys: list = field(default_factory=list)
    event_keys: list = field(default_factory=list)
    level: list = field(default_factory=list)

    @property
    def n_events(self) -> int:
        return self.carrier.net.T.size

    @property
    def n_conditions(self) -> int:
        return self.carrier.net.S.size

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return self.carrier.net.sizes

    def classification(self) -> Classification:
        return classify(self.carrier.hyper)

    def event_name(self, x: int) -> str:
        t, _ = self.event_keys[x]
        return f"e{x}:{self.net.trans_name(t)}"

    def condition_name(self, c: int) -> str:
        key = self.condition_keys[c]
        if key[0] == "b":
            return self.B.token_name(key[1])
        return f"c{c}:{self.net.place_name(self.to_net.on_S(c))}"


def _require_grounded(net: SitosNet) -> None:
    if not net.grounded:
        raise PreconditionError("unfolding needs a grounded net (every transition has an input arc)")


def _assemble(net: SitosNet, B: Marking, cond_place: list[int], events: list[tuple[int, tuple[int, ...]]],
              posts: list[tuple[int, ...]]):
    """Carrier hypergraph and its map to the net from event data."""
    S, T = FinSet(len(cond_place)), FinSet(len(events))
    ins = [(c, x, arc) for x, (t, mu) in enumerate(events) for c, arc in zip(mu, net.preset(t))]
    outs = [(x, c, arc) for x, (t, _) in enumerate(events) for c, arc in zip(posts[x], net.postset(t))]
    I, O = FinSet(len(ins)), FinSet(len(outs))
    carrier = SitosNet(S, I, T, O,
                       FinMap(I, S, tuple(c for c, _, _ in ins)), FinMap(I, T, tuple(x for _, x, _ in ins)),
                       FinMap(O, T, tuple(x for x, _, _ in outs)), FinMap(O, S, tuple(c for _, c, _ in outs)))
    to_net = EtaleMap(carrier, net, FinMap(S, net.S, tuple(cond_place)), FinMap(I, net.I, tuple(a for _, _, a in ins)),
                      FinMap(T, net.T, tuple(t for t, _ in events)), FinMap(O, net.O, tuple(a for _, _, a in outs)))
    return BHypergraph.of(carrier, range(B.size)), to_net


def unfold(net: SitosNet, B: Marking, depth: int) -> Unfolding:
    """Events of earliest-start-time ≤ depth, built level by level."""
    _require_grounded(net)
    if depth < 0:
        raise StructuralError("depth must be non-negative")
    cond_keys: list = [("b", k) for k in range(B.size)]
    cond_place: list[int] = list(B.place.table)
    cond_gen: list[int | None] = [None] * B.size      # producing event
    events: list[tuple[int, tuple[int, ...]]] = []
    posts: list[tuple[int, ...]] = []
    ev_level: list[int] = []
    history: list[frozenset] = []                       # events ≤ x, including x

    def cond_history(c: int) -> frozenset:
        g = cond_gen[c]
        return history[g] if g is not None else frozenset()

    def cond_level(c: int) -> int:
        g = cond_gen[c]
        return ev_level[g] if g is not None else 0

    def is_coset(mu: Sequence[int]) -> frozenset | None:
        """Union of the causes of mu when mu is pairwise concurrent, else None."""
        hist = frozenset().union(*(cond_history(c) for c in mu))
        used: set[int] = set()
        for x in hist:
            for c in events[x][1]:
                if c in used:
                    return None          # two causes share an input: conflict
                used.add(c)
        if used & set(mu):
            return None                  # an input is already consumed below another
        return hist

    def candidates(lvl: int) -> list[tuple[int, tuple[int, ...], frozenset]]:
        by_place: dict[int, list[int]] = {}
        for c, s in enumerate(cond_place):
            by_place.setdefault(s, []).append(c)
        found = []
        for t in range(net.T.size):
            pools = [by_place.get(net.src_in(i), []) for i in net.preset(t)]
            for mu in itertools.product(*pools):
                if len(set(mu)) != len(mu):
                    continue
                if max(cond_level(c) for c in mu) != lvl - 1:
                    continue
                hist = is_coset(mu)
                if hist is not None:
                    found.append((t, tuple(mu), hist))
        return found

    for lvl in range(1, depth + 1):
        new = candidates(lvl)
        if not new:
            break
        for t, mu, hist in new:
            x = len(events)
            events.append((t, mu))
            ev_level.append(lvl)
            history.append(hist | {x})
            out = []
            for k, o in enumerate(net.postset(t)):
                out.append(len(cond_place))
                cond_keys.append(("post", x, k))
                cond_place.append(net.tgt_out(o))
                cond_gen.append(x)
            posts.append(tuple(out))
        check_cap(len(events) + len(cond_place), "unfolding size")
    saturated = not candidates(depth + 1)
    carrier, to_net = _assemble(net, B, cond_place, events, posts)
    return Unfolding(net, B, carrier, to_net, depth, saturated, cond_keys, events, ev_level)


def shape_est(shape: Shape) -> list[int]:
    """Earliest-start-time of every node of a process shape (nodes are
    always appended after their producers)."""
    level = [0] * shape.n_nodes
    for x in range(shape.n_nodes):
        lv = 0
        for e in shape.node_in[x]:
            p = shape.producer[e]
            if p is not None:
                lv = max(lv, level[p[0]])
        level[x] = lv + 1
    return level


def b_processes_to_depth(net: SitosNet, B: Marking, depth: int) -> tuple[list[Shape], bool]:
    """One shape per B-iso class of B-processes with EST-depth ≤ depth, and
    whether no B-process of EST-depth depth+1 exists."""
    keep = lambda sh: max(shape_est(sh), default=0) <= depth
    levels, _ = grow_b_processes(net, B.place.table, _NO_LIMIT, keep)
    shapes = [sh for lv in levels for sh in lv]
    saturated = True
    for sh in shapes:
        for bnd in extensions(sh, net):
            if max(shape_est(grow(sh, net, bnd))) == depth + 1:
                saturated = False
                break
        if not saturated:
            break
    return shapes, saturated


def colimit_unfold(net: SitosNet, B: Marking, depth: int) -> Unfolding:
    """The colimit of all B-processes of EST-depth ≤ depth along their
    covering B-maps."""
    _require_grounded(net)
    if depth < 0:
        raise StructuralError("depth must be non-negative")
    shapes, saturated = b_processes_to_depth(net, B, depth)
    nb = B.size
    procs = [Process(net, sh, None, None, tuple(range(nb)), check=False) for sh in shapes]
    objects = [BHypergraph.of(p.graph, range(nb)) for p in procs]
    arrows = []
    for i, p in enumerate(procs):
        for j, q in enumerate(procs):
            if q.n_nodes != p.n_nodes + 1:
                continue
            m = b_map(p.shape, q.shape, nb)
            if m is None:
                continue
            arrows.append((i, j, _graph_map(p, q, m)))
    col = colimit_injective(objects, arrows)
    carrier = col.result
    # the map to the net is induced leg by leg; every leg must agree
    tables = {k: [None] * getattr(carrier.net, k).size for k in "SITO"}
    for p, leg in zip(procs, col.cocone):
        e = p.etale
        for k in "SITO":
            inner, outer = getattr(leg, "on_" + k), getattr(e, "on_" + k)
            for x in range(inner.dom.size):
                y = inner(x)
                if tables[k][y] is None:
                    tables[k][y] = outer(x)
                elif tables[k][y] != outer(x):
                    raise DiagnosticError("colimit legs disagree over the net")
    to_net = EtaleMap(carrier.net, net, *(FinMap(getattr(carrier.net, k), getattr(net, k), tuple(tables[k]))
                                          for k in "SITO"))
    events, cond_keys, levels = _read_keys(carrier, to_net, B.size)
    return Unfolding(net, B, carrier, to_net, depth, saturated, cond_keys, events, levels)


def _graph_map(p: Process, q: Process, m) -> EtaleMap:
    """The etale map p.graph -> q.graph given by node and edge maps."""
    nmap, emap = m
    gp, gq = p.graph, q.graph
    in_index = {(gq.tgt_in(i), gq.src_in(i)): i for i in range(gq.I.size)}
    out_index = {(gq.src_out(o), gq.tgt_out(o)): o for o in range(gq.O.size)}
    on_I = tuple(in_index[(nmap[gp.tgt_in(i)], emap[gp.src_in(i)])] for i in range(gp.I.size))
    on_O = tuple(out_index[(nmap[gp.src_out(o)], emap[gp.tgt_out(o)])] for o in range(gp.O.size))
    return EtaleMap(gp, gq, FinMap(gp.S, gq.S, emap), FinMap(gp.I, gq.I, on_I),
                    FinMap(gp.T, gq.T, nmap), FinMap(gp.O, gq.O, on_O))


def _read_keys(carrier: BHypergraph, to_net: EtaleMap, nb: int):
    """Event keys (t, inputs in preset order), condition keys and EST levels
    read off an occurrence B-hypergraph over the net."""
    h, net = carrier.net, to_net.cod
    ins: list[dict] = [{} for _ in range(h.T.size)]
    for i in range(h.I.size):
        ins[h.tgt_in(i)][to_net.on_I(i)] = h.src_in(i)
    events = []
    for x in range(h.T.size):
        t = to_net.on_T(x)
        events.append((t, tuple(ins[x][a] for a in net.preset(t))))
    cond_keys: list = [None] * h.S.size
    for k, c in enumerate(carrier.b):
        cond_keys[c] = ("b", k)
    for o in range(h.O.size):
        x = h.src_out(o)
        cond_keys[h.tgt_out(o)] = ("post", x, net.postset(to_net.on_T(x)).index(to_net.on_O(o)))
    est = carrier.hyper.est()
    return events, cond_keys, list(est) if est is not None else []


# comparison of unfoldings

def _signatures(u: Unfolding) -> tuple[list, list]:
    """Structural names of events and conditions relative to B: a condition
    is named by its B index or by (producing event's name, out-arc)."""
    ev_sig: list = [None] * u.n_events
    cond_sig: list = [None] * u.n_conditions
    order = sorted(range(u.n_events), key=lambda x: u.carrier.hyper.est()[x])
    for c, key in enumerate(u.condition_keys):
        if key[0] == "b":
            cond_sig[c] = ("b", key[1])
    net = u.net
    for x in order:
        t, mu = u.event_keys[x]
        ev_sig[x] = (t, tuple(cond_sig[c] for c in mu))
        for c, key in enumerate(u.condition_keys):
            if key[0] == "post" and key[1] == x:
                cond_sig[c] = (ev_sig[x], net.postset(t)[key[2]])
    return ev_sig, cond_sig


@dataclass
class UnfoldingIso:
    events: tuple[int, ...]
    conditions: tuple[int, ...]


def iso_over_net_and_B(u: Unfolding, v: Unfolding) -> UnfoldingIso | None:
    """The isomorphism u -> v over the net fixing B, or None.

    Because nothing in an occurrence B-hypergraph can move while B is held
    fixed, the iso (if any) matches elements with equal signatures.
    """
    if u.net is not v.net and not u.net.same_as(v.net):
        return None
    if u.B.place.table != v.B.place.table or u.sizes != v.sizes:
        return None
    eu, cu = _signatures(u)
    ev, cv = _signatures(v)
    if len(set(eu)) != len(eu) or len(set(cu)) != len(cu):
        raise DiagnosticError("unfolding has two elements with the same history")
    ie = {s: x for x, s in enumerate(ev)}
    ic = {s: c for c, s in enumerate(cv)}
    if set(ie) != set(eu) or set(ic) != set(cu):
        return None
    emap = tuple(ie[s] for s in eu)
    cmap = tuple(ic[s] for s in cu)
    # independent check: the maps preserve every arc and the map to the net
    hu, hv = u.carrier.net, v.carrier.net
    arcs_u = {(cmap[hu.src_in(i)], emap[hu.tgt_in(i)], u.to_net.on_I(i)) for i in range(hu.I.size)}
    arcs_v = {(hv.src_in(i), hv.tgt_in(i), v.to_net.on_I(i)) for i in range(hv.I.size)}
    outs_u = {(emap[hu.src_out(o)], cmap[hu.tgt_out(o)], u.to_net.on_O(o)) for o in range(hu.O.size)}
    outs_v = {(hv.src_out(o), hv.tgt_out(o), v.to_net.on_O(o)) for o in range(hv.O.size)}
    if arcs_u != arcs_v or outs_u != outs_v:
        return None
    if any(cmap[c] != d for c, d in zip(u.carrier.b, v.carrier.b)):
        return None
    return UnfoldingIso(emap, cmap)


def check_unfolding(u: Unfolding) -> Verdict:
    """Occurrence, B-structure and etale map to the net."""
    cl = u.classification()
    if not cl.occurrence:
        return Verdict(False, "carrier is not an occurrence hypergraph", cl.witness)
    v = is_etale(u.to_net)
    if not v:
        return Verdict(False, f"map to the net is not etale: {v.reason}")
    if tuple(u.to_net.on_S(c) for c in u.carrier.b) != u.B.place.table:
        return Verdict(False, "B is not sent to the initial marking")
    if any(l > u.depth for l in cl.est):
        return Verdict(False, "event beyond the depth bound")
    return Verdict(True)


# universal property

@dataclass
class Mediating:
    events: tuple[int, ...]
    conditions: tuple[int, ...]
    count: int   # number of B-maps found by the exhaustive search


def _source_data(h):
    """(carrier net, B hyperedges, map to net) from a Process, an Unfolding
    or a (BHypergraph, EtaleMap) pair."""
    if isinstance(h, Process):
        return h.graph, tuple(h.b_order), h.etale
    if isinstance(h, Unfolding):
        return h.carrier.net, h.carrier.b, h.to_net
    bh, e = h
    return bh.net, bh.b, e


def check_universal(net: SitosNet, B: Marking, h, depth: int, u: Unfolding | None = None) -> Mediating:
    """The unique B-map h -> U over the net, certified unique.

    The map is built by propagation from B; uniqueness is then certified by
    an exhaustive search over every assignment of h's events to events of U
    with the same transition.
    """
    u = u or unfold(net, B, depth)
    g, b, e = _source_data(h)
    hb = BHypergraph.of(g, b)
    est = hb.hyper.est()
    if est is None:
        raise PreconditionError("source is not well founded")
    if est and max(est) > u.depth:
        raise PreconditionError("source is deeper than the unfolding")
    index = {key: x for x, key in enumerate(u.event_keys)}
    post_index = {(key[1], key[2]): c for c, key in enumerate(u.condition_keys) if key[0] == "post"}
    cmap: dict[int, int] = {a: u.carrier.b[k] for k, a in enumerate(b)}
    emap: dict[int, int] = {}
    ins: list[dict] = [{} for _ in range(g.T.size)]
    outs: list[dict] = [{} for _ in range(g.T.size)]
    for i in range(g.I.size):
        ins[g.tgt_in(i)][e.on_I(i)] = g.src_in(i)
    for o in range(g.O.size):
        outs[g.src_out(o)][e.on_O(o)] = g.tgt_out(o)
    for x in sorted(range(g.T.size), key=lambda x: est[x]):
        t = e.on_T(x)
        key = (t, tuple(cmap[ins[x][a]] for a in net.preset(t)))
        if key not in index:
            raise DiagnosticError(f"no event of the unfolding matches node {x} (transition {net.trans_name(t)})")
        y = index[key]
        emap[x] = y
        for k, o in enumerate(net.postset(t)):
            cmap[outs[x][o]] = post_index[(y, k)]
    count = _count_b_maps(g, b, e, u)
    if count != 1:
        raise DiagnosticError(f"expected exactly one mediating map, found {count}")
    return Mediating(tuple(emap[x] for x in range(g.T.size)), tuple(cmap[a] for a in range(g.S.size)), count)


def _count_b_maps(g: SitosNet, b: Sequence[int], e: EtaleMap, u: Unfolding) -> int:
    """Brute force: try every transition-respecting assignment of nodes to
    events, derive hyperedges from the arcs, and count the consistent ones."""
    U = u.carrier.net
    pools = [[y for y in range(U.T.size) if u.to_net.on_T(y) == e.on_T(x)] for x in range(g.T.size)]
    u_in = {(U.tgt_in(i), u.to_net.on_I(i)): U.src_in(i) for i in range(U.I.size)}
    u_out = {(U.src_out(o), u.to_net.on_O(o)): U.tgt_out(o) for o in range(U.O.size)}
    count = 0
    for assign in itertools.product(*pools):
        cmap: dict[int, int] = {a: u.carrier.b[k] for k, a in enumerate(b)}
        ok = True
        for i in range(g.I.size):
            c = u_in[(assign[g.tgt_in(i)], e.on_I(i))]
            if cmap.setdefault(g.src_in(i), c) != c:
                ok = False
                break
        if ok:
            for o in range(g.O.size):
                c = u_out[(assign[g.src_out(o)], e.on_O(o))]
                if cmap.setdefault(g.tgt_out(o), c) != c:
                    ok = False
                    break
        if ok and len(cmap) == g.S.size:
            count += 1
    return count


# event structures and their domains

@dataclass
class EventStructure:
    n: int
    leq: list[list[bool]]        # leq[x][y]: x ⊑ y
    conflict: list[list[bool]]

    def check(self) -> Verdict:
        n = self.n
        for x in range(n):
            if not self.leq[x][x] or self.conflict[x][x]:
                return Verdict(False, "reflexivity or irreflexivity fails", x)
            for y in range(n):
                if x != y and self.leq[x][y] and self.leq[y][x]:
                    return Verdict(False, "causality is not antisymmetric", (x, y))
                if self.conflict[x][y] != self.conflict[y][x]:
                    return Verdict(False, "conflict is not symmetric", (x, y))
                for z in range(n):
                    if self.leq[x][y] and self.leq[y][z] and not self.leq[x][z]:
                        return Verdict(False, "causality is not transitive", (x, y, z))
                    if self.conflict[x][y] and self.leq[y][z] and not self.conflict[x][z]:
                        return Verdict(False, "conflict is not inherited", (x, y, z))
        return Verdict(True)

    def is_lowerset(self, s) -> bool:
        return all(self.leq[x][y] <= (x in s) for y in s for x in range(self.n))

    def is_conflict_free(self, s) -> bool:
        return not any(self.conflict[x][y] for x in s for y in s)


def event_structure(u: Unfolding) -> EventStructure:
    n = u.n_events
    pred = u.carrier.hyper.predecessors()
    leq = [[x == y for y in range(n)] for x in range(n)]
    for y in sorted(range(n), key=lambda y: u.carrier.hyper.est()[y]):
        for x in pred[y]:
            for w in range(n):
                if leq[w][x]:
                    leq[w][y] = True
    immediate = [[False] * n for _ in range(n)]
    for x, (_, mu) in enumerate(u.event_keys):
        for y, (_, nu) in enumerate(u.event_keys):
            if x != y and set(mu) & set(nu):
                immediate[x][y] = True
    conflict = [[any(immediate[a][b] for a in range(n) if leq[a][x] for b in range(n) if leq[b][y])
                 for y in range(n)] for x in range(n)]
    return EventStructure(n, leq, conflict)


@dataclass
class DomainPoset:
    elements: list[frozenset]
    order: list[tuple[int, int]]        # strict inclusions
    codes: list                         # B-rooted code of the process of each element

    def __len__(self) -> int:
        return len(self.elements)


def domain_elements(net: SitosNet, B: Marking, bound: int, certify: bool = True) -> DomainPoset:
    """Conflict-free lowersets of at most ``bound`` events, ordered by
    inclusion, certified order-isomorphic to the B-process poset."""
    _require_grounded(net)
    u = unfold(net, B, bound)
    es = event_structure(u)
    found = {frozenset()}
    frontier = [frozenset()]
    for _ in range(bound):
        nxt = []
        for s in frontier:
            for y in range(es.n):
                if y in s:
                    continue
                t = s | {y}
                if t not in found and es.is_lowerset(t) and es.is_conflict_free(t):
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    elements = sorted(found, key=lambda s: (len(s), sorted(s)))
    order = [(i, j) for i, a in enumerate(elements) for j, c in enumerate(elements) if a < c]
    codes = []
    for s in elements:
        sub = open_subgraph(u.carrier.net, s, u.carrier.b)
        inc = sub.inclusion
        e = inc.then(u.to_net)
        b_edges = tuple(sub.edges.index(c) for c in u.carrier.b)
        codes.append(canonical_code(Process.from_etale(e, b_edges=b_edges), "B"))
    poset = DomainPoset(elements, order, codes)
    if certify:
        v = certify_domain(poset, enumerate_B_processes(net, B, bound))
        if not v:
            raise DiagnosticError(f"domain does not match the B-process poset: {v.reason}")
    return poset


def certify_domain(poset: DomainPoset, en: BProcessEnumeration) -> Verdict:
    if sorted(poset.codes) != sorted(en.codes):
        return Verdict(False, "element sets differ", (len(poset.codes), len(en.codes)))
    where = {c: i for i, c in enumerate(en.codes)}
    mine = {(where[poset.codes[i]], where[poset.codes[j]]) for i, j in poset.order}
    if mine != set(en.order):
        return Verdict(False, "orders differ")
    return Verdict(True)
