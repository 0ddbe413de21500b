"""Graphviz export: places, edges and conditions are circles; transitions,
nodes and events are squares."""
from __future__ import annotations

from .net import Marking, SitosNet
from .process import Process


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render(circles: list[tuple[str, str]], squares: list[tuple[str, str]], arcs: list[tuple[str, str, str]]) -> str:
    lines = ["digraph G {"]
    for key, label in circles:
        lines.append(f"  {_q(key)} [shape=circle, label={_q(label)}];")
    for key, label in squares:
        lines.append(f"  {_q(key)} [shape=square, label={_q(label)}];")
    for a, b, label in arcs:
        lines.append(f"  {_q(a)} -> {_q(b)} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def net_dot(net: SitosNet) -> str:
    circles = [(f"s:{net.S.label(s)}", net.S.label(s)) for s in range(net.S.size)]
    squares = [(f"t:{net.T.label(t)}", net.T.label(t)) for t in range(net.T.size)]
    arcs = [(f"s:{net.S.label(net.src_in(i))}", f"t:{net.T.label(net.tgt_in(i))}", net.I.label(i))
            for i in range(net.I.size)]
    arcs += [(f"t:{net.T.label(net.src_out(o))}", f"s:{net.S.label(net.tgt_out(o))}", net.O.label(o))
             for o in range(net.O.size)]
    return _render(circles, squares, arcs)


def process_dot(p: Process) -> str:
    net, sh = p.net, p.shape
    circles = [(f"e:{p.edge_name(e)}", f"{p.edge_name(e)}:{net.place_name(sh.edge_place[e])}")
               for e in range(sh.n_edges)]
    squares = [(f"x:{p.node_name(x)}", f"{p.node_name(x)}:{net.trans_name(sh.node_trans[x])}")
               for x in range(sh.n_nodes)]
    arcs = []
    for x in range(sh.n_nodes):
        t = sh.node_trans[x]
        for e, i in zip(sh.node_in[x], net.preset(t)):
            arcs.append((f"e:{p.edge_name(e)}", f"x:{p.node_name(x)}", net.I.label(i)))
        for e, o in zip(sh.node_out[x], net.postset(t)):
            arcs.append((f"x:{p.node_name(x)}", f"e:{p.edge_name(e)}", net.O.label(o)))
    return _render(circles, squares, arcs)


def unfolding_dot(u) -> str:
    h, net, f = u.carrier.net, u.net, u.to_net
    circles = [(f"c{c}", u.condition_name(c)) for c in range(h.S.size)]
    squares = [(f"e{x}", u.event_name(x)) for x in range(h.T.size)]
    arcs = [(f"c{h.src_in(i)}", f"e{h.tgt_in(i)}", net.I.label(f.on_I(i))) for i in range(h.I.size)]
    arcs += [(f"e{h.src_out(o)}", f"c{h.tgt_out(o)}", net.O.label(f.on_O(o))) for o in range(h.O.size)]
    return _render(circles, squares, arcs)


def marking_dot(m: Marking) -> str:
    net = m.net
    circles = [(f"s:{net.S.label(s)}", f"{net.S.label(s)} ({m.place.table.count(s)})") for s in range(net.S.size)]
    squares = [(f"t:{net.T.label(t)}", net.T.label(t)) for t in range(net.T.size)]
    arcs = [(f"s:{net.S.label(net.src_in(i))}", f"t:{net.T.label(net.tgt_in(i))}", net.I.label(i))
            for i in range(net.I.size)]
    arcs += [(f"t:{net.T.label(net.src_out(o))}", f"s:{net.S.label(net.tgt_out(o))}", net.O.label(o))
             for o in range(net.O.size)]
    return _render(circles, squares, arcs)


def export_dot(obj) -> str:
    from .unfolding import Unfolding
    if isinstance(obj, Process):
        return process_dot(obj)
    if isinstance(obj, Unfolding):
        return unfolding_dot(obj)
    if isinstance(obj, Marking):
        return marking_dot(obj)
    if isinstance(obj, SitosNet):
        return net_dot(obj)
    raise TypeError(f"cannot export {type(obj).__name__} to DOT")
