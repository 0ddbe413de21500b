"""Cabling maps, rational maps (cabling backwards then etale forwards),
their composition, and transport of processes along them.

All maps between nets are stored as EtaleMap records (four components);
the class name only promises the shape, the checks below certify which
kind of map a record is.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DiagnosticError, StructuralError
from .finset import FinMap, FinSet, pullback
from .groupoid import Verdict
from .net import EtaleMap, SitosNet, is_etale
from .process import Process


def _pullback_square_ok(arcs: FinMap, beta: FinMap, on_arcs: FinMap, leg: FinMap) -> bool:
    """Is X' -> X ×_S S' (x' ↦ (on_arcs x', leg x')) a bijection, where
    ``arcs``: X -> S and ``leg``: X' -> S'?"""
    P, _, _ = pullback(arcs, beta)
    seen = set()
    for x in range(on_arcs.dom.size):
        pair = (on_arcs(x), leg(x))
        if arcs(pair[0]) != beta(pair[1]) or pair in seen:
            return False
        seen.add(pair)
    return len(seen) == P.size


@dataclass(frozen=True, eq=False)
class CablingMap:
    """A map dom -> cod that is the identity on transitions and whose arc
    components are pullbacks along the place map beta: S_dom -> S_cod."""

    diagram: EtaleMap

    @property
    def dom(self) -> SitosNet:
        return self.diagram.dom

    @property
    def cod(self) -> SitosNet:
        return self.diagram.cod

    @property
    def beta(self) -> FinMap:
        return self.diagram.on_S


def is_cabling(e: EtaleMap) -> Verdict:
    a, b = e.dom, e.cod
    if a.T.size != b.T.size or e.on_T.table != tuple(range(a.T.size)):
        return Verdict(False, "transition component is not the identity")
    for i in range(a.I.size):
        if b.src_in(e.on_I(i)) != e.on_S(a.src_in(i)) or b.tgt_in(e.on_I(i)) != a.tgt_in(i):
            return Verdict(False, "in-arc squares do not commute", i)
    for o in range(a.O.size):
        if b.tgt_out(e.on_O(o)) != e.on_S(a.tgt_out(o)) or b.src_out(e.on_O(o)) != a.src_out(o):
            return Verdict(False, "out-arc squares do not commute", o)
    if not _pullback_square_ok(b.src_in, e.on_S, e.on_I, a.src_in):
        return Verdict(False, "in-arcs are not the pullback along the place map")
    if not _pullback_square_ok(b.tgt_out, e.on_S, e.on_O, a.tgt_out):
        return Verdict(False, "out-arcs are not the pullback along the place map")
    return Verdict(True)


def cabling_from_place_map(net: SitosNet, places: FinSet | int, beta) -> CablingMap:
    """Pull ``net`` back along beta: places -> net.S. Arcs of the new net are
    pairs (arc, new place) ordered lexicographically."""
    S2 = places if isinstance(places, FinSet) else FinSet(places)
    beta = beta if isinstance(beta, FinMap) else FinMap(S2, net.S, tuple(beta))
    I2, to_I, in_place = pullback(net.src_in, beta)
    O2, to_O, out_place = pullback(net.tgt_out, beta)
    labels_I = tuple(f"{net.I.label(to_I(i))}.{S2.label(in_place(i))}" for i in range(I2.size))
    labels_O = tuple(f"{net.O.label(to_O(o))}.{S2.label(out_place(o))}" for o in range(O2.size))
    I2, O2 = FinSet(I2.size, labels_I), FinSet(O2.size, labels_O)
    new = SitosNet(S2, I2, net.T, O2,
                   FinMap(I2, S2, in_place.table), FinMap(I2, net.T, tuple(net.tgt_in(to_I(i)) for i in range(I2.size))),
                   FinMap(O2, net.T, tuple(net.src_out(to_O(o)) for o in range(O2.size))), FinMap(O2, S2, out_place.table))
    diagram = EtaleMap(new, net, FinMap(S2, net.S, beta.table), FinMap(I2, net.I, to_I.table),
                       FinMap.identity(net.T), FinMap(O2, net.O, to_O.table))
    return CablingMap(diagram)


@dataclass(frozen=True, eq=False)
class RationalMap:
    """source <-back- middle -forward-> target."""

    back: CablingMap
    forward: EtaleMap

    def __post_init__(self):
        if self.back.dom is not self.forward.dom:
            raise StructuralError("legs of a rational map must share the middle net")

    @property
    def source(self) -> SitosNet:
        return self.back.cod

    @property
    def target(self) -> SitosNet:
        return self.forward.cod

    @property
    def middle(self) -> SitosNet:
        return self.back.dom

    def certify(self) -> Verdict:
        v = is_cabling(self.back.diagram)
        if not v:
            return Verdict(False, f"back leg: {v.reason}", v.witness)
        v = is_etale(self.forward)
        if not v:
            return Verdict(False, f"forward leg: {v.reason}", v.witness)
        return Verdict(True)

    @staticmethod
    def identity(net: SitosNet) -> "RationalMap":
        return RationalMap(CablingMap(EtaleMap.identity(net)), EtaleMap.identity(net))

    @staticmethod
    def of_etale(e: EtaleMap) -> "RationalMap":
        return RationalMap(CablingMap(EtaleMap.identity(e.dom)), e)

    @staticmethod
    def of_cabling(c: CablingMap) -> "RationalMap":
        """The cabling c: P' -> P read as a rational map P -> P'."""
        return RationalMap(c, EtaleMap.identity(c.dom))


def pointwise_pullback(f: EtaleMap, g: EtaleMap) -> tuple[SitosNet, EtaleMap, EtaleMap]:
    """X ×_Z Y for diagram maps f: X -> Z, g: Y -> Z, computed componentwise
    (lexicographic order) with the two projections."""
    if f.cod is not g.cod and not f.cod.same_as(g.cod):
        raise StructuralError("pullback legs have different codomains")
    X, Y = f.dom, g.dom
    comps = {k: pullback(getattr(f, "on_" + k), getattr(g, "on_" + k)) for k in "SITO"}
    S, I, T, O = (comps[k][0] for k in "SITO")

    def induced(name: str, src: str, dst: str) -> FinMap:
        P, px, py = comps[src]
        Q, qx, qy = comps[dst]
        index = {(qx(k), qy(k)): k for k in range(Q.size)}
        mx, my = getattr(X, name), getattr(Y, name)
        return FinMap(P, Q, tuple(index[(mx(px(k)), my(py(k)))] for k in range(P.size)))

    net = SitosNet(S, I, T, O, induced("src_in", "I", "S"), induced("tgt_in", "I", "T"),
                   induced("src_out", "O", "T"), induced("tgt_out", "O", "S"))
    to_x = EtaleMap(net, X, *(comps[k][1] for k in "SITO"))
    to_y = EtaleMap(net, Y, *(comps[k][2] for k in "SITO"))
    return net, to_x, to_y


def compose_rational(r1: RationalMap, r2: RationalMap) -> RationalMap:
    """r2 after r1: the middle is the pullback of r1.forward against r2.back."""
    if r1.target is not r2.source and not r1.target.same_as(r2.source):
        raise StructuralError("rational maps are not composable")
    mid, to_m1, to_m2 = pointwise_pullback(r1.forward, r2.back.diagram)
    # transitions of the pullback are pairs (t, t) listed in order, so the
    # projection to the first middle is the identity on T
    if to_m1.on_T.table != tuple(range(mid.T.size)):
        raise DiagnosticError("pulled-back cabling is not the identity on transitions")
    back = CablingMap(to_m1.then(r1.back.diagram))
    forward = to_m2.then(r2.forward)
    return RationalMap(back, forward)


def transport_process(r: RationalMap, p: Process) -> Process:
    """Pull p's graph back along r.back, then push forward along r.forward.

    The nodes are those of p. The result is checked to be etale; a failure
    names the offending node.
    """
    if p.net is not r.source and not p.net.same_as(r.source):
        raise StructuralError("process does not live over the source of the rational map")
    q, _, to_mid = pointwise_pullback(p.etale, r.back.diagram)
    if q.T.size != p.n_nodes:
        raise DiagnosticError("transport changed the node set")
    e = to_mid.then(r.forward)
    v = is_etale(e)
    if not v:
        node = _offending_node(e)
        raise DiagnosticError(f"transported graph is not etale at node x{node}: {v.reason}")
    if not q.is_graph():
        raise DiagnosticError("transported diagram is not a graph")
    return Process.from_etale(e)


def _offending_node(e: EtaleMap) -> int | None:
    g, net = e.dom, e.cod
    for x in range(g.T.size):
        t = e.on_T(x)
        ins = sorted(e.on_I(i) for i in range(g.I.size) if g.tgt_in(i) == x)
        outs = sorted(e.on_O(o) for o in range(g.O.size) if g.src_out(o) == x)
        if ins != list(net.preset(t)) or outs != list(net.postset(t)):
            return x
    return None


def spans_isomorphic(r1: RationalMap, r2: RationalMap) -> bool:
    """Is there an iso of middles commuting with both legs? Middles of
    canonical composites differ only by element order, so match elements by
    their images under the two legs."""
    if r1.middle.sizes != r2.middle.sizes:
        return False
    comps = {}
    for k in "SITO":
        def key(r, x, k=k):
            return (getattr(r.back.diagram, "on_" + k)(x), getattr(r.forward, "on_" + k)(x))
        a = [key(r1, x) for x in range(getattr(r1.middle, k).size)]
        b = [key(r2, x) for x in range(getattr(r2.middle, k).size)]
        if sorted(a) != sorted(b) or len(set(a)) != len(a):
            return False
        where = {v: i for i, v in enumerate(b)}
        comps[k] = [where[v] for v in a]
    m1, m2 = r1.middle, r2.middle
    for name, src, dst in (("src_in", "I", "S"), ("tgt_in", "I", "T"), ("src_out", "O", "T"), ("tgt_out", "O", "S")):
        f1, f2 = getattr(m1, name), getattr(m2, name)
        if any(comps[dst][f1(x)] != f2(comps[src][x]) for x in range(f1.dom.size)):
            return False
    return True
