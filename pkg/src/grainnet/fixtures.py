"""Small reference nets, markings and processes used by tests, docs and the CLI."""
from __future__ import annotations

from .canon import Shape
from .net import Marking, SitosNet
from .process import FiringBinding, Process


def net_ex() -> SitosNet:
    """Two transitions on three places; t1 feeds t2 and t2 feeds t1 back."""
    return SitosNet.build(
        ["s1", "s2", "s3"], ["t1", "t2"],
        [("i1", "s1", "t1"), ("i2", "s2", "t1"), ("i3", "s3", "t2"), ("i4", "s3", "t2")],
        [("o1", "t1", "s2"), ("o2", "t1", "s3"), ("o3", "t2", "s1"), ("o4", "t2", "s1")])


def marking_ex(net: SitosNet | None = None) -> Marking:
    net = net or net_ex()
    return Marking.of(net, ["s1", "s2", "s3", "s3"], ["m1", "m2", "m3", "m3'"])


def net_fork() -> SitosNet:
    """t1 splits an s3 token into s1 and s2; t2 consumes one s1 and one s2."""
    return SitosNet.build(
        ["s1", "s2", "s3"], ["t1", "t2"],
        [("a", "s3", "t1"), ("p", "s1", "t2"), ("q", "s2", "t2")],
        [("c", "t1", "s1"), ("d", "t1", "s2")])


def marking_fork(net: SitosNet | None = None) -> Marking:
    net = net or net_fork()
    return Marking.of(net, ["s1", "s2", "s3"], ["b1", "b2", "b3"])


def net_hw() -> SitosNet:
    """One place, one transition with a single input arc u and no outputs."""
    return SitosNet.build(["s"], ["t"], [("u", "s", "t")], [])


def net_uv() -> SitosNet:
    """One place, one transition with two parallel input arcs u and v."""
    return SitosNet.build(["s"], ["t"], [("u", "s", "t"), ("v", "s", "t")], [])


def marking_two(net: SitosNet) -> Marking:
    return Marking.of(net, [0, 0], ["b1", "b2"])


def net_q() -> SitosNet:
    """Like net_fork with s1 and s2 joined into one place."""
    return SitosNet.build(
        ["s1", "s3"], ["t1", "t2"],
        [("a", "s3", "t1"), ("u", "s1", "t2"), ("v", "s1", "t2")],
        [("c", "t1", "s1"), ("d", "t1", "s1")])


def marking_q(net: SitosNet | None = None) -> Marking:
    net = net or net_q()
    return Marking.of(net, ["s1", "s1", "s3"], ["b1", "b2", "b3"])


def all_fixtures() -> dict[str, tuple[SitosNet, Marking]]:
    ex, fork, hw, uv, q = net_ex(), net_fork(), net_hw(), net_uv(), net_q()
    return {
        "NET_EX": (ex, marking_ex(ex)),
        "NET_FORK": (fork, marking_fork(fork)),
        "NET_HW": (hw, marking_two(hw)),
        "NET_UV": (uv, marking_two(uv)),
        "NET_Q": (q, marking_q(q)),
    }


# The three-step processes p and q on net_ex: t1, then t2, then t1 again.
# In p the second t2 input is the s3 token produced by the first step; in q
# both t2 inputs are initial tokens. Token positions refer to the marking
# current at each step (see process.fire).

def sequence_p() -> list[FiringBinding]:
    return [FiringBinding(0, (0, 1)), FiringBinding(1, (3, 0)), FiringBinding(0, (2, 1))]


def sequence_p_swapped() -> list[FiringBinding]:
    return [FiringBinding(0, (0, 1)), FiringBinding(1, (0, 3)), FiringBinding(0, (2, 1))]


def sequence_q() -> list[FiringBinding]:
    return [FiringBinding(0, (0, 1)), FiringBinding(1, (0, 1)), FiringBinding(0, (2, 0))]


def process_p(net: SitosNet | None = None) -> Process:
    """p written out by hand, edge by edge, as an independent reference."""
    net = net or net_ex()
    names = ["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3", "d3"]
    places = [0, 1, 2, 0, 1, 2, 0, 1, 2, 2]
    e = {n: k for k, n in enumerate(names)}
    shape = Shape(tuple(places), (0, 1, 0),
                  ((e["a1"], e["a2"]), (e["b3"], e["a3"]), (e["b1"], e["b2"])),
                  ((e["b2"], e["b3"]), (e["b1"], e["c1"]), (e["c2"], e["c3"])))
    return Process(net, shape, names, ["x1", "x2", "y1"], (e["a1"], e["a2"], e["a3"], e["d3"]))


def process_q(net: SitosNet | None = None) -> Process:
    net = net or net_ex()
    names = ["a1", "a2", "a3", "d3", "b2", "b3", "b1", "c1", "c2", "c3"]
    places = [0, 1, 2, 2, 1, 2, 0, 0, 1, 2]
    e = {n: k for k, n in enumerate(names)}
    shape = Shape(tuple(places), (0, 1, 0),
                  ((e["a1"], e["a2"]), (e["a3"], e["d3"]), (e["b1"], e["b2"])),
                  ((e["b2"], e["b3"]), (e["b1"], e["c1"]), (e["c2"], e["c3"])))
    return Process(net, shape, names, ["x1", "x2", "y1"], (e["a1"], e["a2"], e["a3"], e["d3"]))


def example_graph_shape():
    """Edges a..e, node x without edges, node y consuming b and emitting c, d, e;
    z consumes c and d. Returned as an AinoaGraph."""
    from .net import SitosNet as _N, AinoaGraph
    g = _N.build(["a", "b", "c", "d", "e"], ["x", "y", "z"],
                 [("ib", "b", "y"), ("ic", "c", "z"), ("id", "d", "z")],
                 [("oc", "y", "c"), ("od", "y", "d"), ("oe", "y", "e")])
    return AinoaGraph.of(g)
