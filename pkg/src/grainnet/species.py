"""Digraphical species: presheaves on corollas and single edges.

A species has a set of colours (its value on the single edge) and, for
each arity (m, n), a set of operations carrying boundary colours and a
right action of S_m x S_n. The species of a net has as operations every
corolla map into it; flat species are exactly those that come from nets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import canon
from .errors import PreconditionError, StructuralError
from .finset import FinMap, FinSet
from .groupoid import Verdict
from .hypergraph import _UnionFind
from .net import EtaleMap, SitosNet, is_etale
from .process import CanonicalCode, Process, grow_b_processes, numbered_code

Perm = tuple[int, ...]


def _compose(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[i] for i in q)


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


@dataclass
class SpeciesValue:
    """Operations of one arity (m, n).

    ``act[(x, sigma, tau)]`` is x·(sigma, tau). Colours transform by
    in_colour[x·(σ,τ)][k] = in_colour[x][σ[k]], and likewise on outputs.
    """

    m: int
    n: int
    in_colour: list[tuple[int, ...]]
    out_colour: list[tuple[int, ...]]
    act: dict
    labels: list | None = None

    @property
    def size(self) -> int:
        return len(self.in_colour)

    def group(self):
        return itertools.product(itertools.permutations(range(self.m)), itertools.permutations(range(self.n)))

    def orbits(self) -> list[list[int]]:
        seen: dict[int, int] = {}
        out: list[list[int]] = []
        for x in range(self.size):
            if x in seen:
                continue
            orbit = sorted({self.act[(x, s, t)] for s, t in self.group()})
            for y in orbit:
                seen[y] = len(out)
            out.append(orbit)
        return out


@dataclass
class DigraphicalSpecies:
    colours: FinSet
    values: dict = field(default_factory=dict)   # (m, n) -> SpeciesValue

    def operations(self, m: int, n: int) -> int:
        v = self.values.get((m, n))
        return v.size if v else 0

    def check(self) -> Verdict:
        """Action laws and equivariance of boundary colours."""
        for (m, n), v in self.values.items():
            ident = (tuple(range(m)), tuple(range(n)))
            for x in range(v.size):
                if v.act[(x,) + ident] != x:
                    return Verdict(False, "identity does not act trivially", (m, n, x))
                for c in v.in_colour[x] + v.out_colour[x]:
                    if not 0 <= c < self.colours.size:
                        return Verdict(False, "boundary colour out of range", (m, n, x))
                for s, t in v.group():
                    y = v.act[(x, s, t)]
                    if v.in_colour[y] != tuple(v.in_colour[x][k] for k in s) or \
                            v.out_colour[y] != tuple(v.out_colour[x][k] for k in t):
                        return Verdict(False, "boundary colours are not equivariant", (m, n, x, s, t))
                    for s2, t2 in v.group():
                        lhs = v.act[(y, s2, t2)]
                        rhs = v.act[(x, _compose(s, s2), _compose(t, t2))]
                        if lhs != rhs:
                            return Verdict(False, "action is not associative", (m, n, x))
        return Verdict(True)


def species_of_net(net: SitosNet) -> DigraphicalSpecies:
    """Operations of arity (m, n) are (t, β_in, β_out) with β_in listing the
    in-arcs of t in some order; the group acts by precomposition."""
    by_arity: dict[tuple[int, int], list] = {}
    for t in range(net.T.size):
        pre, post = net.preset(t), net.postset(t)
        for b_in in itertools.permutations(pre):
            for b_out in itertools.permutations(post):
                by_arity.setdefault((len(pre), len(post)), []).append((t, b_in, b_out))
    values = {}
    for (m, n), ops in sorted(by_arity.items()):
        index = {op: k for k, op in enumerate(ops)}
        act = {}
        for k, (t, b_in, b_out) in enumerate(ops):
            for s in itertools.permutations(range(m)):
                for u in itertools.permutations(range(n)):
                    act[(k, s, u)] = index[(t, tuple(b_in[i] for i in s), tuple(b_out[j] for j in u))]
        values[(m, n)] = SpeciesValue(
            m, n,
            [tuple(net.src_in(i) for i in op[1]) for op in ops],
            [tuple(net.tgt_out(o) for o in op[2]) for op in ops],
            act, ops)
    return DigraphicalSpecies(FinSet(net.S.size, net.S.labels), values)


@dataclass
class FlatVerdict:
    ok: bool
    witness: tuple | None = None   # (m, n, operation, sigma, tau) with x·(σ,τ) = x

    def __bool__(self) -> bool:
        return self.ok


def is_flat(sp: DigraphicalSpecies) -> FlatVerdict:
    """Every symmetric-group action is free."""
    for (m, n), v in sorted(sp.values.items()):
        ident = (tuple(range(m)), tuple(range(n)))
        for x in range(v.size):
            for s, t in v.group():
                if (s, t) != ident and v.act[(x, s, t)] == x:
                    return FlatVerdict(False, (m, n, x, s, t))
    return FlatVerdict(True)


def net_of_species(sp: DigraphicalSpecies) -> SitosNet:
    """Transitions are orbits of operations; in-arcs are orbits of pointed
    operations (x, k) under (x, k) ~ (x·(σ,τ), σ⁻¹(k)), and out-arcs alike."""
    flat = is_flat(sp)
    if not flat:
        raise PreconditionError(f"species is not flat: {flat.witness}")
    in_arcs, out_arcs = [], []
    n_trans = 0
    for (m, n), v in sorted(sp.values.items()):
        orbit_of = {}
        for orbit in v.orbits():
            for x in orbit:
                orbit_of[x] = n_trans
            n_trans += 1
        for side, arity, colour in (("in", m, v.in_colour), ("out", n, v.out_colour)):
            uf = _UnionFind(v.size * arity)
            for x in range(v.size):
                for s, t in v.group():
                    perm = s if side == "in" else t
                    inv = _inverse(perm)
                    y = v.act[(x, s, t)]
                    for k in range(arity):
                        uf.union(x * arity + k, y * arity + inv[k])
            classes: dict[int, int] = {}
            for x in range(v.size):
                for k in range(arity):
                    r = uf.find(x * arity + k)
                    if r in classes:
                        continue
                    classes[r] = len(classes)
                    if side == "in":
                        in_arcs.append((colour[x][k], orbit_of[x]))
                    else:
                        out_arcs.append((orbit_of[x], colour[x][k]))
    return SitosNet.from_tables(sp.colours.size, n_trans, in_arcs, out_arcs, {"S": sp.colours.labels})


def net_isomorphism(a: SitosNet, b: SitosNet) -> EtaleMap | None:
    """An isomorphism a -> b of nets, found by trying place bijections and
    matching transitions by their boundary signature."""
    if a.sizes != b.sizes:
        return None

    def sig(net, t, pl):
        return (tuple(sorted(pl[net.src_in(i)] for i in net.preset(t))),
                tuple(sorted(pl[net.tgt_out(o)] for o in net.postset(t))))

    ident = list(range(b.S.size))
    sig_b: dict = {}
    for t in range(b.T.size):
        sig_b.setdefault(sig(b, t, ident), []).append(t)
    for pi in itertools.permutations(range(a.S.size)):
        pools = {k: list(v) for k, v in sig_b.items()}
        on_T = []
        for t in range(a.T.size):
            pool = pools.get(sig(a, t, pi))
            if not pool:
                break
            on_T.append(pool.pop(0))
        else:
            on_I, on_O = [None] * a.I.size, [None] * a.O.size
            for t, t2 in enumerate(on_T):
                for arcs, arcs2, plc, plc2, tab in (
                        (a.preset(t), b.preset(t2), a.src_in, b.src_in, on_I),
                        (a.postset(t), b.postset(t2), a.tgt_out, b.tgt_out, on_O)):
                    left = sorted(arcs, key=lambda i: (pi[plc(i)], i))
                    right = sorted(arcs2, key=lambda i: (plc2(i), i))
                    for i, j in zip(left, right):
                        tab[i] = j
            e = EtaleMap(a, b, FinMap(a.S, b.S, tuple(pi)), FinMap(a.I, b.I, tuple(on_I)),
                         FinMap(a.T, b.T, tuple(on_T)), FinMap(a.O, b.O, tuple(on_O)))
            if is_etale(e) and all(m.is_bijective() for m in (e.on_S, e.on_I, e.on_T, e.on_O)):
                return e
    return None


def free_prop_ops(net: SitosNet, m: int, n: int, max_nodes: int) -> list[CanonicalCode]:
    """Boundary-numbered processes with m inputs and n outputs, ≤ max_nodes
    nodes, one code per numbering-preserving isomorphism class, sorted.

    The list is a truncation of an infinite set whenever some class at
    max_nodes nodes still extends.
    """
    codes = set()
    for colouring in itertools.product(range(net.S.size), repeat=m):
        levels, _ = grow_b_processes(net, colouring, max_nodes)
        for level in levels:
            for sh in level:
                out = sh.out_boundary
                if len(out) != n:
                    continue
                p = Process(net, sh, None, None, tuple(range(m)), check=False)
                for order in itertools.permutations(out):
                    codes.add(numbered_code(p, tuple(range(m)), order))
    return sorted(codes)


def check_equivariance(sp: DigraphicalSpecies) -> Verdict:
    return sp.check()


def single_operation_species(m: int, n: int, in_colour: Sequence[int], out_colour: Sequence[int],
                             n_colours: int, fixed_by: Sequence[tuple[Perm, Perm]] = ()) -> DigraphicalSpecies:
    """A species with one orbit at (m, n) whose stabiliser is generated by
    ``fixed_by`` (the orbit is the coset space). Used to build non-flat
    examples."""
    group = list(itertools.product(itertools.permutations(range(m)), itertools.permutations(range(n))))
    ident = (tuple(range(m)), tuple(range(n)))
    stab = {ident}
    frontier = [ident]
    gens = list(fixed_by)
    while frontier:
        g = frontier.pop()
        for h in gens:
            k = (_compose(g[0], h[0]), _compose(g[1], h[1]))
            if k not in stab:
                stab.add(k)
                frontier.append(k)
    # cosets g·Stab, represented by their sorted element lists
    cosets: dict = {}
    coset_of = {}
    for g in group:
        key = tuple(sorted((_compose(g[0], s[0]), _compose(g[1], s[1])) for s in stab))
        coset_of[g] = cosets.setdefault(key, len(cosets))
    # operation x = coset gStab acts as x·h = (h⁻¹ g) Stab; colours follow from x_0
    reps = {}
    for g in group:
        reps.setdefault(coset_of[g], g)
    act = {}
    for x, g in reps.items():
        for h in group:
            hi = (_inverse(h[0]), _inverse(h[1]))
            act[(x, h[0], h[1])] = coset_of[(_compose(hi[0], g[0]), _compose(hi[1], g[1]))]
    in_c, out_c = [], []
    for x in range(len(cosets)):
        g = reps[x]
        gi = (_inverse(g[0]), _inverse(g[1]))
        in_c.append(tuple(in_colour[gi[0][k]] for k in range(m)))
        out_c.append(tuple(out_colour[gi[1][k]] for k in range(n)))
    value = SpeciesValue(m, n, in_c, out_c, act)
    return DigraphicalSpecies(FinSet(n_colours), {(m, n): value})
