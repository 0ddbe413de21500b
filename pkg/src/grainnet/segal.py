"""The truncated simplicial groupoid of processes and its Segal/Rezk checks.

An object of X_k is a process with a monotone k-level function whose
k+1 cuts are numbered: cut j comes with a bijection {0..n_j-1} -> cut j
that lists the edges in non-decreasing place order. Morphisms are all
level-preserving isomorphisms of P-graphs; they may permute numberings.
Numbered cuts make face and degeneracy maps strict functors, and with
place-sorted numberings X_0 is skeletal (one object per multiset), which
keeps the window small.

Objects are stored in canonical form, so equality of objects is equality
of values. A morphism is the tuple (source, target, node map, edge map).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from . import canon
from .canon import Shape
from .errors import PreconditionError, StructuralError
from .groupoid import (Groupoid, GroupoidFunctor, HomotopyPullback, Verdict, homotopy_pullback,
                       is_equivalence, is_fibration)
from .limits import check_cap
from .net import Marking, SitosNet, EtaleMap
from .process import (CanonicalCode, Process, compose_processes, grow_b_processes, numbered_code)


@dataclass(frozen=True)
class Levelled:
    """A process shape with a monotone level function and numbered cuts."""

    k: int
    shape: Shape
    level: tuple[int, ...]
    cuts: tuple[tuple[int, ...], ...]

    @property
    def n_nodes(self) -> int:
        return self.shape.n_nodes

    def cut_places(self, j: int) -> tuple[int, ...]:
        return tuple(self.shape.edge_place[e] for e in self.cuts[j])

    def __repr__(self) -> str:
        return f"Levelled(k={self.k}, nodes={self.n_nodes}, edges={self.shape.n_edges}, cuts={[len(c) for c in self.cuts]})"


def birth_death(shape: Shape, level: Sequence[int], k: int) -> tuple[list[int], list[int]]:
    birth = [0] * shape.n_edges
    death = [k + 1] * shape.n_edges
    for x, es in enumerate(shape.node_out):
        for e in es:
            birth[e] = level[x]
    for x, es in enumerate(shape.node_in):
        for e in es:
            death[e] = level[x]
    return birth, death


def cut_sets(shape: Shape, level: Sequence[int], k: int) -> list[list[int]]:
    birth, death = birth_death(shape, level, k)
    return [[e for e in range(shape.n_edges) if birth[e] <= j < death[e]] for j in range(k + 1)]


def _numbering_tags(x: Levelled) -> list:
    tags: list = [[] for _ in range(x.shape.n_edges)]
    for j, cut in enumerate(x.cuts):
        for pos, e in enumerate(cut):
            tags[e].append((j, pos))
    return [tuple(t) for t in tags]


def _apply(x: Levelled, node_order: Sequence[int], edge_order: Sequence[int]) -> Levelled:
    e_new = {old: i for i, old in enumerate(edge_order)}
    return Levelled(x.k, x.shape.relabel(node_order, edge_order), tuple(x.level[v] for v in node_order),
                    tuple(tuple(e_new[e] for e in cut) for cut in x.cuts))


def _inverse_order(order: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(order)
    for new, old in enumerate(order):
        out[old] = new
    return tuple(out)


def normalize(x: Levelled) -> tuple[Levelled, tuple[int, ...], tuple[int, ...]]:
    """Canonical representative of x and the iso x -> rep as (node map, edge map)."""
    _, no, eo = canon.canonical_form(x.shape, _numbering_tags(x), x.level)
    return _apply(x, no, eo), _inverse_order(no), _inverse_order(eo)


def check_levelled(x: Levelled) -> None:
    if len(x.level) != x.shape.n_nodes or len(x.cuts) != x.k + 1:
        raise StructuralError("levelled process has the wrong shape")
    for l in x.level:
        if not 1 <= l <= x.k:
            raise StructuralError("level out of range")
    expected = cut_sets(x.shape, x.level, x.k)
    for j, cut in enumerate(x.cuts):
        if sorted(cut) != expected[j]:
            raise StructuralError(f"cut {j} does not number the right edges")
        places = [x.shape.edge_place[e] for e in cut]
        if places != sorted(places):
            raise StructuralError(f"cut {j} is not numbered in place order")
    for y, es in enumerate(x.shape.node_out):
        for e in es:
            c = x.shape.consumer[e]
            if c is not None and x.level[c[0]] < x.level[y]:
                raise StructuralError("level function is not monotone")


class LevelGroupoid(Groupoid):
    """X_k restricted to a finite set of canonical objects."""

    def __init__(self, k: int, objects: Sequence[Levelled]):
        self.k = k
        self.objects = list(objects)
        self._object_set = set(self.objects)
        self._plain: dict = {}
        self._auts: dict = {}

    def __contains__(self, x) -> bool:
        return x in self._object_set

    def plain(self, x: Levelled):
        """Component representative of x (numbering read off the canonical
        unnumbered form) and the iso x -> rep."""
        hit = self._plain.get(x)
        if hit is None:
            _, no, eo = canon.canonical_form(x.shape, None, x.level)
            moved = _apply(x, no, eo)
            cuts = tuple(tuple(sorted(cut, key=lambda e: (moved.shape.edge_place[e], e))) for cut in moved.cuts)
            # normalize so the representative is itself an object of X_k
            rep, nm, em = normalize(Levelled(x.k, moved.shape, moved.level, cuts))
            n_first, e_first = _inverse_order(no), _inverse_order(eo)
            hit = (rep, tuple(nm[v] for v in n_first), tuple(em[e] for e in e_first))
            self._plain[x] = hit
        return hit

    def canonical(self, x):
        rep, nm, em = self.plain(x)
        return rep, (x, rep, nm, em)

    def component_reps(self):
        seen = {}
        for x in self.objects:
            rep = self.plain(x)[0]
            seen.setdefault(rep, None)
        return list(seen)

    def components(self):
        groups: dict = {}
        for x in self.objects:
            groups.setdefault(self.plain(x)[0], []).append(x)
        return list(groups.values())

    def _rep_auts(self, rep: Levelled) -> list:
        hit = self._auts.get(rep)
        if hit is None:
            hit = list(canon.isomorphisms(rep.shape, rep.shape, None, None, rep.level, rep.level))
            self._auts[rep] = hit
        return hit

    def hom(self, x, y):
        rx, nx, ex = self.plain(x)
        ry, ny, ey = self.plain(y)
        if rx != ry:
            return []
        ny_inv, ey_inv = _inverse_order(ny), _inverse_order(ey)
        out = []
        for an, ae in self._rep_auts(rx):
            out.append((x, y, tuple(ny_inv[an[nx[v]]] for v in range(len(nx))),
                        tuple(ey_inv[ae[ex[e]]] for e in range(len(ex)))))
        return out

    def find_iso(self, x, y):
        rx, nx, ex = self.plain(x)
        ry, ny, ey = self.plain(y)
        if rx != ry:
            return None
        ny_inv, ey_inv = _inverse_order(ny), _inverse_order(ey)
        return (x, y, tuple(ny_inv[v] for v in nx), tuple(ey_inv[e] for e in ex))

    def compose(self, g, f):
        if f[1] != g[0]:
            raise StructuralError("morphisms not composable")
        return (f[0], g[1], tuple(g[2][v] for v in f[2]), tuple(g[3][e] for e in f[3]))

    def inverse(self, f):
        return (f[1], f[0], _inverse_order(f[2]), _inverse_order(f[3]))

    def identity(self, x):
        return (x, x, tuple(range(x.n_nodes)), tuple(range(x.shape.n_edges)))

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]


class SimplicialMap(GroupoidFunctor):
    """A face or degeneracy map. ``restrictor`` turns an object into a
    levelled sub-object plus partial node/edge maps old -> sub."""

    def __init__(self, dom: LevelGroupoid, cod: LevelGroupoid, restrictor: Callable, name: str):
        self._cache: dict = {}
        self._restrictor = restrictor
        super().__init__(dom, cod, self._ob, self._mor, name)

    def image(self, x: Levelled):
        hit = self._cache.get(x)
        if hit is None:
            sub, npos, epos = self._restrictor(x)
            rep, nm, em = normalize(sub)
            nmap = {old: nm[i] for old, i in npos.items()}
            emap = {old: em[i] for old, i in epos.items()}
            hit = (rep, nmap, emap)
            self._cache[x] = hit
        return hit

    def _ob(self, x):
        return self.image(x)[0]

    def _mor(self, f):
        x, y, fn, fe = f
        rx, nx, ex = self.image(x)
        ry, ny, ey = self.image(y)
        n_back = {v: old for old, v in nx.items()}
        e_back = {v: old for old, v in ex.items()}
        return (rx, ry, tuple(ny[fn[n_back[v]]] for v in range(rx.n_nodes)),
                tuple(ey[fe[e_back[e]]] for e in range(rx.shape.n_edges)))


def _restrict(x: Levelled, nodes: Sequence[int], edges: Sequence[int], level_of: Callable[[int], int],
              new_k: int, cuts_old: Sequence[Sequence[int]]):
    npos = {v: i for i, v in enumerate(nodes)}
    epos = {e: i for i, e in enumerate(edges)}
    sh = x.shape
    shape = Shape(tuple(sh.edge_place[e] for e in edges), tuple(sh.node_trans[v] for v in nodes),
                  tuple(tuple(epos[e] for e in sh.node_in[v]) for v in nodes),
                  tuple(tuple(epos[e] for e in sh.node_out[v]) for v in nodes))
    sub = Levelled(new_k, shape, tuple(level_of(x.level[v]) for v in nodes),
                   tuple(tuple(epos[e] for e in cut) for cut in cuts_old))
    return sub, npos, epos


def face_restrictor(k: int, i: int) -> Callable:
    def run(x: Levelled):
        if i in (0, k):
            lo, hi = (2, k) if i == 0 else (1, k - 1)
            birth, death = birth_death(x.shape, x.level, k)
            nodes = [v for v in range(x.n_nodes) if lo <= x.level[v] <= hi]
            edges = [e for e in range(x.shape.n_edges) if birth[e] <= hi and death[e] >= lo]
            shift = 1 if i == 0 else 0
            cuts = x.cuts[1:] if i == 0 else x.cuts[:-1]
            return _restrict(x, nodes, edges, lambda l: l - shift, k - 1, cuts)
        nodes = list(range(x.n_nodes))
        edges = list(range(x.shape.n_edges))
        cuts = x.cuts[:i] + x.cuts[i + 1:]
        return _restrict(x, nodes, edges, lambda l: l if l <= i else l - 1, k - 1, cuts)
    return run


def degeneracy_restrictor(k: int, i: int) -> Callable:
    def run(x: Levelled):
        nodes = list(range(x.n_nodes))
        edges = list(range(x.shape.n_edges))
        cuts = x.cuts[:i + 1] + (x.cuts[i],) + x.cuts[i + 1:]
        return _restrict(x, nodes, edges, lambda l: l if l <= i else l + 1, k + 1, cuts)
    return run


def _place_sorted_numberings(shape: Shape, edges: Sequence[int]) -> list[tuple[int, ...]]:
    """All numberings of ``edges`` listing them in non-decreasing place order."""
    by_place: dict[int, list[int]] = {}
    for e in edges:
        by_place.setdefault(shape.edge_place[e], []).append(e)
    blocks = [list(itertools.permutations(by_place[s])) for s in sorted(by_place)]
    return [tuple(e for block in combo for e in block) for combo in itertools.product(*blocks)]


def _monotone_levels(shape: Shape, k: int) -> list[tuple[int, ...]]:
    n = shape.n_nodes
    preds: list[list[int]] = [[] for _ in range(n)]
    for y, es in enumerate(shape.node_in):
        for e in es:
            p = shape.producer[e]
            if p is not None:
                preds[y].append(p[0])
    out = []
    for combo in itertools.product(range(1, k + 1), repeat=n):
        if all(combo[p] <= combo[y] for y in range(n) for p in preds[y]):
            out.append(combo)
    return out


def markings_up_to(n_places: int, max_tokens: int) -> list[tuple[int, ...]]:
    """Canonical place lists (non-decreasing) of all markings with ≤ max_tokens tokens."""
    out = []
    for size in range(max_tokens + 1):
        out.extend(itertools.combinations_with_replacement(range(n_places), size))
    return out


@dataclass
class TruncatedSimplicialGroupoid:
    net: SitosNet
    K: int
    max_nodes: int
    max_tokens: int
    levels: list[LevelGroupoid]
    faces: dict = field(default_factory=dict)        # (k, i) -> d_i: X_k -> X_{k-1}
    degeneracies: dict = field(default_factory=dict)  # (k, i) -> s_i: X_k -> X_{k+1}

    def d(self, k: int, i: int) -> SimplicialMap:
        return self.faces[(k, i)]

    def s(self, k: int, i: int) -> SimplicialMap:
        return self.degeneracies[(k, i)]

    def in_window(self, x: Levelled) -> bool:
        return x.n_nodes <= self.max_nodes and all(len(c) <= self.max_tokens for c in x.cuts)


def build_truncation(net: SitosNet, K: int, max_nodes: int, max_tokens: int) -> TruncatedSimplicialGroupoid:
    """X_0..X_K for processes with ≤ max_nodes nodes whose cuts all carry
    ≤ max_tokens tokens."""
    if K < 2:
        raise PreconditionError("build_truncation needs K ≥ 2")
    if max_tokens < 0 or max_nodes < 0:
        raise StructuralError("window bounds must be non-negative")
    starts = markings_up_to(net.S.size, max_tokens)
    shapes: list[Shape] = []
    for places in starts:
        lv, _ = grow_b_processes(net, places, max_nodes)
        shapes.extend(sh for level in lv for sh in level)
    levels = []
    for k in range(K + 1):
        objs = {}
        for sh in shapes:
            if k == 0:
                if sh.n_nodes:
                    continue
                x = Levelled(0, sh, (), (tuple(range(sh.n_edges)),))
                objs[normalize(x)[0]] = None
                continue
            for lev in _monotone_levels(sh, k):
                cuts = cut_sets(sh, lev, k)
                if any(len(c) > max_tokens for c in cuts):
                    continue
                # cut 0 is the in-boundary, already numbered by B order (place sorted)
                choices = [[tuple(cuts[0])]] + [_place_sorted_numberings(sh, c) for c in cuts[1:]]
                for numbering in itertools.product(*choices):
                    x = Levelled(k, sh, lev, tuple(numbering))
                    objs[normalize(x)[0]] = None
                check_cap(len(objs), f"objects of X_{k}")
        levels.append(LevelGroupoid(k, list(objs)))
    trunc = TruncatedSimplicialGroupoid(net, K, max_nodes, max_tokens, levels)
    for k in range(1, K + 1):
        for i in range(k + 1):
            trunc.faces[(k, i)] = SimplicialMap(levels[k], levels[k - 1], face_restrictor(k, i), f"d{i}")
    for k in range(K):
        for i in range(k + 1):
            trunc.degeneracies[(k, i)] = SimplicialMap(levels[k], levels[k + 1], degeneracy_restrictor(k, i), f"s{i}")
    return trunc


def levelled_from_process(p: Process, level: Sequence[int], k: int,
                          cut_numbering: Sequence[Sequence[int]] | None = None) -> Levelled:
    """Wrap a process with a level list (1-based) as a canonical X_k object.

    Without an explicit numbering, each cut is numbered in (place, edge) order,
    the in-boundary following p.b_order within each place.
    """
    sh = p.shape
    cuts = cut_sets(sh, level, k)
    if cut_numbering is None:
        rank = {e: r for r, e in enumerate(p.b_order)}
        cut_numbering = [sorted(c, key=lambda e: (sh.edge_place[e], rank.get(e, -1), e)) for c in cuts]
    x = Levelled(k, sh, tuple(level), tuple(tuple(c) for c in cut_numbering))
    check_levelled(x)
    return normalize(x)[0]


def levelled_to_process(net: SitosNet, x: Levelled) -> Process:
    return Process(net, x.shape, None, None, x.cuts[0])


def check_simplicial_identities(trunc: TruncatedSimplicialGroupoid, morphisms: bool = True) -> Verdict:
    """All simplicial identities whose both sides stay within X_0..X_K,
    on every object and (optionally) every automorphism and connecting iso."""
    K = trunc.K

    def samples(k):
        X = trunc.levels[k]
        for x in X.objects:
            yield ("ob", x)
            if morphisms:
                rep, iso = X.canonical(x)
                yield ("mor", iso)
                for a in X.automorphisms(x):
                    yield ("mor", a)

    def apply(F, item):
        kind, v = item
        return (kind, F.ob(v) if kind == "ob" else F.mor(v))

    def chain(item, maps):
        for F in maps:
            item = apply(F, item)
        return item

    d, s = trunc.d, trunc.s
    for k in range(K + 1):
        for item in samples(k):
            # d_i d_j = d_{j-1} d_i for i < j
            for j in range(1, k + 1):
                for i in range(j):
                    if k >= 2 and chain(item, [d(k, j), d(k - 1, i)]) != chain(item, [d(k, i), d(k - 1, j - 1)]):
                        return Verdict(False, f"d{i} d{j} != d{j - 1} d{i} on X_{k}", item)
            if k + 1 > K:
                continue
            for i in range(k + 1):
                up = s(k, i)
                # d_i s_i = d_{i+1} s_i = id
                if chain(item, [up, d(k + 1, i)]) != item or chain(item, [up, d(k + 1, i + 1)]) != item:
                    return Verdict(False, f"d s{i} != id on X_{k}", item)
                for j in range(k + 2):
                    if j in (i, i + 1):
                        continue
                    lhs = chain(item, [up, d(k + 1, j)])
                    if j < i:
                        rhs = chain(item, [d(k, j), s(k - 1, i - 1)])
                    else:
                        rhs = chain(item, [d(k, j - 1), s(k - 1, i)])
                    if lhs != rhs:
                        return Verdict(False, f"d{j} s{i} identity fails on X_{k}", item)
                if k + 2 <= K:
                    for j in range(i + 1, k + 2):
                        # s_j s_i = s_i s_{j-1} for i < j
                        if chain(item, [s(k, i), s(k + 1, j)]) != chain(item, [s(k, j - 1), s(k + 1, i)]):
                            return Verdict(False, f"s{j} s{i} identity fails on X_{k}", item)
    return Verdict(True)


@dataclass
class SegalReport:
    ok: bool
    verdict: Verdict
    n_x2_components: int
    n_target_components: int
    comparison: GroupoidFunctor | None = None

    def __bool__(self) -> bool:
        return self.ok


def segal_target(trunc: TruncatedSimplicialGroupoid, d_first: SimplicialMap | None = None,
                 d_second: SimplicialMap | None = None) -> HomotopyPullback:
    """X_1 ×^h_{X_0} X_1 over (d_0, d_1), cut down to pairs whose composite
    stays in the node window."""
    F = d_first or trunc.d(1, 0)
    G = d_second or trunc.d(1, 1)
    limit = trunc.max_nodes
    return homotopy_pullback(F, G, restrict=lambda a: a[0].n_nodes + a[1].n_nodes <= limit)


def check_segal(trunc: TruncatedSimplicialGroupoid, outer_first=None, outer_second=None) -> SegalReport:
    """(d_2, d_0): X_2 -> X_1 ×^h_{X_0} X_1 is an equivalence on the window.

    ``outer_first``/``outer_second`` replace d_2/d_0 in the comparison
    functor; they exist for negative controls.
    """
    X2 = trunc.levels[2]
    X0 = trunc.levels[0]
    first = outer_first or trunc.d(2, 2)
    second = outer_second or trunc.d(2, 0)
    H = segal_target(trunc)
    d10 = trunc.d(1, 0)

    def ob(P):
        a, b = first.ob(P), second.ob(P)
        mid = d10.ob(a)
        return (a, b, X0.identity(mid))

    def mor(m):
        return (ob(m[0]), ob(m[1]), first.mor(m), second.mor(m))

    for P in X2.objects:
        if d10.ob(first.ob(P)) != trunc.d(1, 1).ob(second.ob(P)):
            v = Verdict(False, "outer faces do not agree on the middle cut", P)
            return SegalReport(False, v, 0, 0)
    comp = GroupoidFunctor(X2, H, ob, mor, "segal")
    v = is_equivalence(comp)
    return SegalReport(bool(v), v, len(X2.component_reps()), len(H.component_reps()), comp)


@dataclass
class RezkReport:
    ok: bool
    reason: str = ""
    degenerate: list = field(default_factory=list)      # X_1 objects iso to some s_0(c)
    non_invertible: list = field(default_factory=list)  # X_1 objects with a node

    def __bool__(self) -> bool:
        return self.ok


def check_rezk(trunc: TruncatedSimplicialGroupoid) -> RezkReport:
    """Node-less = degenerate = invertible, on the window."""
    X0, X1, X2 = trunc.levels[0], trunc.levels[1], trunc.levels[2]
    s0 = trunc.s(0, 0)
    image_reps = set()
    for c in X0.objects:
        x = s0.ob(c)
        if x.n_nodes:
            return RezkReport(False, "s_0 produced a process with nodes")
        image_reps.add(X1.plain(x)[0])
        # s_0 is fully faithful: Aut(c) -> Aut(s_0 c) bijective
        auts = X0.automorphisms(c)
        imgs = {s0.mor(a) for a in auts}
        if len(imgs) != len(auts) or imgs != set(X1.automorphisms(x)):
            return RezkReport(False, "s_0 is not fully faithful")
    report = RezkReport(True)
    for x in X1.objects:
        degenerate = X1.plain(x)[0] in image_reps
        if degenerate != (x.n_nodes == 0):
            return RezkReport(False, "degenerate and node-less disagree", [x])
        (report.degenerate if degenerate else report.non_invertible).append(x)
    # invertibility: composing never removes nodes
    d0, d1, d2 = trunc.d(2, 0), trunc.d(2, 1), trunc.d(2, 2)
    for P in X2.objects:
        if d1.ob(P).n_nodes != d2.ob(P).n_nodes + d0.ob(P).n_nodes:
            return RezkReport(False, "composition changed the node count", [P])
    return report


def lift_d0(trunc: TruncatedSimplicialGroupoid, x: Levelled, beta):
    """Lift beta: d_0 x -> c (an automorphism in the skeletal X_0) to a
    morphism out of x, by renumbering the out-boundary along beta."""
    d0 = trunc.d(1, 0)
    X1 = trunc.levels[1]
    rx, nmap, emap = d0.image(x)
    # beta's edge map acts on rx's edges; rx edge at position pos of its cut
    back = {v: old for old, v in emap.items()}
    out_cut = x.cuts[1]
    pos_of = {e: p for p, e in enumerate(rx.cuts[0])}
    new_out = [None] * len(out_cut)
    for e_old in out_cut:
        e_rx = emap[e_old]
        new_out[pos_of[beta[3][e_rx]]] = e_old
    y = Levelled(x.k, x.shape, x.level, (x.cuts[0], tuple(new_out)))
    rep, nm, em = normalize(y)
    phi = (x, rep, nm, em)
    return rep, phi


# mapping groupoids and hom-sets of the free symmetric monoidal category

class MappingGroupoid(Groupoid):
    """Triples (p, σ_in, σ_out) between fixed markings M and N.

    p ranges over one representative per isomorphism class of processes;
    σ_in[k] is the edge of p carrying token k of M, σ_out likewise for N.
    A morphism is an automorphism f of p with f σ = σ′ on both sides,
    stored as (source, target, index of f in Aut(p)).
    """

    def __init__(self, net: SitosNet, M: Marking, N: Marking, reps: list[Process]):
        self.net, self.M, self.N = net, M, N
        self.reps = reps
        self.auts = [list(canon.isomorphisms(p.shape, p.shape)) for p in reps]
        objs = []
        for r, p in enumerate(reps):
            for s_in in _bijections_over(p.shape, p.in_boundary, M.place.table):
                for s_out in _bijections_over(p.shape, p.out_boundary, N.place.table):
                    objs.append((r, s_in, s_out))
        self.objects = objs

    def _act(self, r, a, sigma):
        return tuple(self.auts[r][a][1][e] for e in sigma)

    def hom(self, x, y):
        if x[0] != y[0]:
            return []
        r = x[0]
        return [(x, y, a) for a in range(len(self.auts[r]))
                if self._act(r, a, x[1]) == y[1] and self._act(r, a, x[2]) == y[2]]

    def compose(self, g, f):
        r = f[0][0]
        an, ae = self.auts[r][g[2]]
        bn, be = self.auts[r][f[2]]
        prod = (tuple(an[v] for v in bn), tuple(ae[e] for e in be))
        return (f[0], g[1], self.auts[r].index(prod))

    def inverse(self, f):
        r = f[0][0]
        an, ae = self.auts[r][f[2]]
        inv = (_inverse_order(an), _inverse_order(ae))
        return (f[1], f[0], self.auts[r].index(inv))

    def identity(self, x):
        r = x[0]
        p = self.reps[r]
        ident = (tuple(range(p.n_nodes)), tuple(range(p.n_edges)))
        return (x, x, self.auts[r].index(ident))

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]

    def canonical(self, x):
        r, s_in, s_out = x
        best = None
        for a in range(len(self.auts[r])):
            cand = (r, self._act(r, a, s_in), self._act(r, a, s_out))
            if best is None or cand < best[0]:
                best = (cand, a)
        return best[0], (x, best[0], best[1])

    def class_code(self, x) -> CanonicalCode:
        r, s_in, s_out = x
        return numbered_code(self.reps[r], s_in, s_out)


def _bijections_over(shape: Shape, edges: Sequence[int], places: Sequence[int]) -> list[tuple[int, ...]]:
    """All sequences listing ``edges`` so that the k-th edge sits on places[k]."""
    if sorted(shape.edge_place[e] for e in edges) != sorted(places):
        return []
    out = []

    def rec(k, used, acc):
        if k == len(places):
            out.append(tuple(acc))
            return
        for e in edges:
            if e not in used and shape.edge_place[e] == places[k]:
                used.add(e)
                acc.append(e)
                rec(k + 1, used, acc)
                acc.pop()
                used.discard(e)

    rec(0, set(), [])
    return out


def map_groupoid(net: SitosNet, M: Marking, N: Marking, max_nodes: int) -> MappingGroupoid:
    target = sorted(N.place.table)
    levels, _ = grow_b_processes(net, M.place.table, max_nodes)
    reps: dict = {}
    for level in levels:
        for sh in level:
            if sorted(sh.edge_place[e] for e in sh.out_boundary) != target:
                continue
            code, _, _ = canon.canonical_form(sh)
            reps.setdefault(code, sh)
    procs = [Process(net, reps[c]) for c in sorted(reps)]
    return MappingGroupoid(net, M, N, procs)


def hom_C(net: SitosNet, M: Marking, N: Marking, max_nodes: int) -> list[CanonicalCode]:
    """π0 of the mapping groupoid as boundary-numbered codes, sorted."""
    G = map_groupoid(net, M, N, max_nodes)
    codes = {G.class_code(G.canonical(x)[0]) for x in G.objects}
    return sorted(codes)


@dataclass
class HomClass:
    """A process with numbered boundaries; represents an element of hom_C."""

    process: Process
    s_in: tuple[int, ...]
    s_out: tuple[int, ...]

    def code(self) -> CanonicalCode:
        return numbered_code(self.process, self.s_in, self.s_out)


def hom_classes(net: SitosNet, M: Marking, N: Marking, max_nodes: int) -> list[HomClass]:
    """One object per component of the mapping groupoid, sorted by code."""
    G = map_groupoid(net, M, N, max_nodes)
    seen = {}
    for x in G.objects:
        rep = G.canonical(x)[0]
        h = HomClass(G.reps[rep[0]], rep[1], rep[2])
        seen.setdefault(h.code(), h)
    return [seen[c] for c in sorted(seen)]


def compose_classes(f: HomClass, g: HomClass) -> HomClass:
    """g after f, glued along the numbering of the shared marking."""
    if len(f.s_out) != len(g.s_in):
        raise StructuralError("hom classes are not composable")
    sigma = {a: b for a, b in zip(f.s_out, g.s_in)}
    comp = compose_processes(f.process, g.process, sigma)
    s_in = tuple(comp.left_edges[e] for e in f.s_in)
    s_out = tuple(comp.right_edges[e] for e in g.s_out)
    return HomClass(comp.process, s_in, s_out)


def identity_class(M: Marking) -> HomClass:
    p = Process(M.net, Shape(M.place.table, (), (), ()))
    return HomClass(p, tuple(range(M.size)), tuple(range(M.size)))


# monoidal structure and functoriality

def levelled_disjoint(x: Levelled, y: Levelled) -> Levelled:
    """x ⊔ y with cuts merged in place order, x's edges first within a place."""
    if x.k != y.k:
        raise StructuralError("disjoint union needs the same k")
    shape = canon.disjoint(x.shape, y.shape)
    off = x.shape.n_edges
    cuts = []
    for cx, cy in zip(x.cuts, y.cuts):
        merged = [(shape.edge_place[e], 0, p, e) for p, e in enumerate(cx)]
        merged += [(shape.edge_place[e + off], 1, p, e + off) for p, e in enumerate(cy)]
        cuts.append(tuple(t[3] for t in sorted(merged)))
    return normalize(Levelled(x.k, shape, x.level + y.level, tuple(cuts)))[0]


def levelled_push(x: Levelled, e: EtaleMap) -> Levelled:
    """Postcompose with an etale net map; cuts re-sorted stably by new place."""
    sh = x.shape
    src, tgt = e.dom, e.cod
    node_in, node_out = [], []
    for v, t in enumerate(sh.node_trans):
        t2 = e.on_T(t)
        pre2, post2 = tgt.preset(t2), tgt.postset(t2)
        ins = [None] * len(pre2)
        for k, i in enumerate(src.preset(t)):
            ins[pre2.index(e.on_I(i))] = sh.node_in[v][k]
        outs = [None] * len(post2)
        for k, o in enumerate(src.postset(t)):
            outs[post2.index(e.on_O(o))] = sh.node_out[v][k]
        node_in.append(tuple(ins))
        node_out.append(tuple(outs))
    places = tuple(e.on_S(s) for s in sh.edge_place)
    shape = Shape(places, tuple(e.on_T(t) for t in sh.node_trans), tuple(node_in), tuple(node_out))
    cuts = tuple(tuple(sorted(cut, key=lambda a: places[a])) for cut in x.cuts)
    return normalize(Levelled(x.k, shape, x.level, cuts))[0]
