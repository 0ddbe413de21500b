import pytest

from grainnet.errors import PreconditionError, StructuralError
from grainnet.finset import FinMap
from grainnet.fixtures import marking_fork, net_fork
from grainnet.hypergraph import (BHypergraph, Hypergraph, check_lowersets_preserved, classify,
                                 colimit_injective, lowersets_of, principal_lowerset)
from grainnet.net import EtaleMap, SitosNet, is_etale
from grainnet.species import net_isomorphism
from grainnet.unfolding import unfold


def not_forward():
    # the hyperedge s2 is produced by two nodes
    return SitosNet.build(
        ["s1", "s2", "s2'", "s3", "s4"], ["t1", "t2", "t3", "t4"],
        [("i1", "s3", "t1"), ("i2", "s4", "t1"), ("i3", "s1", "t3"), ("i4", "s2", "t3"), ("i5", "s2", "t4")],
        [("o1", "t1", "s1"), ("o2", "t1", "s2"), ("o3", "t2", "s2"), ("o4", "t2", "s2'")])


def lowerset_pair():
    """The small hypergraph (a graph) and the larger one it is the principal lowerset of."""
    small = SitosNet.build(
        ["s1", "a", "s3", "b"], ["t1", "y"],
        [("i1", "s1", "t1"), ("i2", "s3", "y")],
        [("o1", "t1", "a"), ("o2", "t1", "s3"), ("o3", "y", "b")])
    big = SitosNet.build(
        ["s1", "a", "s3", "b"], ["t1", "y", "t3", "t4", "t5"],
        [("i1", "s1", "t1"), ("i2", "s3", "y"), ("i3", "s3", "t3"), ("i4", "b", "t4"), ("i5", "b", "t5")],
        [("o1", "t1", "a"), ("o2", "t1", "s3"), ("o3", "y", "b")])
    return small, big


def diamond():
    # b feeds two nodes whose outputs meet again at y
    return SitosNet.build(
        ["b", "s1", "s2"], ["t1", "t2", "y"],
        [("i1", "b", "t1"), ("i2", "b", "t2"), ("i3", "s1", "y"), ("i4", "s2", "y")],
        [("o1", "t1", "s1"), ("o2", "t2", "s2")])


def test_not_forward():
    h = Hypergraph(not_forward())
    assert not h.is_forward()
    c = classify(h)
    assert not c.forward and c.well_founded and not c.occurrence


def test_principal_lowerset_includes_outgoing_hyperedges():
    small, big = lowerset_pair()
    h = Hypergraph(big)
    y = big.T.index("y")
    low = principal_lowerset(h, y)
    assert [big.T.label(x) for x in low.nodes] == ["t1", "y"]
    assert sorted(big.S.label(a) for a in low.edges) == ["a", "b", "s1", "s3"]
    assert is_etale(low.inclusion)
    assert low.graph.is_graph()
    assert net_isomorphism(low.graph, small) is not None


def test_lowerset_pair_is_occurrence():
    for net in lowerset_pair():
        c = classify(Hypergraph(net))
        assert c.forward and c.well_founded and c.occurrence


def test_forward_but_not_occurrence():
    h = Hypergraph(diamond())
    c = classify(h)
    assert c.forward and c.well_founded
    assert not c.occurrence
    assert c.witness == 2
    assert not principal_lowerset(h, 2).graph.is_graph()


def test_cycle_is_not_well_founded():
    net = SitosNet.build(["s"], ["t"], [("i", "s", "t")], [("o", "t", "s")])
    c = classify(Hypergraph(net))
    assert not c.well_founded and c.est is None
    with pytest.raises(PreconditionError):
        principal_lowerset(Hypergraph(net), 0)


def test_relation_check():
    net = SitosNet.build(["s"], ["t"], [("i", "s", "t"), ("j", "s", "t")], [])
    with pytest.raises(StructuralError):
        Hypergraph(net)


def test_b_must_be_unproduced_edges():
    _, big = lowerset_pair()
    with pytest.raises(StructuralError):
        BHypergraph.of(big, [1])
    BHypergraph.of(big, [0])


def _between(si, sj):
    """Inclusion map of one sub-hypergraph of H into another."""
    def comp(key, a_items, b_items):
        return FinMap(getattr(si.graph, key), getattr(sj.graph, key), tuple(b_items.index(x) for x in a_items))
    inc_i, inc_j = si.inclusion, sj.inclusion
    return EtaleMap(si.graph, sj.graph,
                    comp("S", si.edges, sj.edges),
                    comp("I", inc_i.on_I.table, inc_j.on_I.table),
                    comp("T", si.nodes, sj.nodes),
                    comp("O", inc_i.on_O.table, inc_j.on_O.table))


def test_occurrence_hypergraph_is_colimit_of_its_lowersets():
    _, big = lowerset_pair()
    h = BHypergraph.of(big, [0])
    subs = lowersets_of(h, big.T.size)
    objects = [BHypergraph.of(s.graph, [s.edges.index(a) for a in h.b]) for s in subs]
    arrows = []
    for i, si in enumerate(subs):
        for j, sj in enumerate(subs):
            if i != j and set(si.nodes) <= set(sj.nodes):
                arrows.append((i, j, _between(si, sj)))
    for i, j, e in arrows:
        assert check_lowersets_preserved(objects[i], objects[j], e)
    col = colimit_injective(objects, arrows)
    assert col.classification.occurrence
    assert net_isomorphism(col.result.net, big) is not None
    assert all(is_etale(c) for c in col.cocone)


def test_colimit_rejects_disconnected_diagram():
    _, big = lowerset_pair()
    h = BHypergraph.of(big, [0])
    subs = lowersets_of(h, 1)
    objects = [BHypergraph.of(s.graph, [s.edges.index(a) for a in h.b]) for s in subs]
    with pytest.raises(PreconditionError):
        colimit_injective(objects, [])


def test_fork_unfolding_sizes():
    net = net_fork()
    u = unfold(net, marking_fork(net), 3)
    S, I, T, O = u.sizes
    assert (S, I, T, O) == (5, 9, 5, 2)
    c = u.classification()
    assert c.occurrence
