import itertools

import pytest
from hypothesis import given, strategies as st

from grainnet.errors import PreconditionError
from grainnet.fixtures import all_fixtures
from grainnet.net import Marking, SitosNet
from grainnet.species import (free_prop_ops, is_flat, net_isomorphism, net_of_species, single_operation_species,
                              species_of_net)

import oracles

FIXTURES = all_fixtures()
NAMES = sorted(FIXTURES)


def random_net(draw):
    n_s = draw(st.integers(1, 3))
    n_t = draw(st.integers(1, 3))
    ins = draw(st.lists(st.tuples(st.integers(0, n_s - 1), st.integers(0, n_t - 1)), max_size=4))
    outs = draw(st.lists(st.tuples(st.integers(0, n_t - 1), st.integers(0, n_s - 1)), max_size=4))
    return SitosNet.from_tables(n_s, n_t, ins, outs)


nets = st.composite(random_net)


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    net, _ = FIXTURES[name]
    sp = species_of_net(net)
    assert sp.check()
    assert is_flat(sp)
    assert net_isomorphism(net_of_species(sp), net) is not None


@given(nets())
def test_round_trip_random(net):
    sp = species_of_net(net)
    assert is_flat(sp)
    back = net_of_species(sp)
    assert net_isomorphism(back, net) is not None


def test_operation_counts():
    net, _ = FIXTURES["NET_EX"]
    sp = species_of_net(net)
    assert sp.operations(2, 2) == 8
    assert sp.operations(1, 1) == 0
    uv, _ = FIXTURES["NET_UV"]
    assert species_of_net(uv).operations(2, 0) == 2


@given(nets())
def test_operation_count_is_product_of_factorials(net):
    sp = species_of_net(net)
    expected = {}
    for t in range(net.T.size):
        m, n = net.arity(t)
        expected[(m, n)] = expected.get((m, n), 0) + len(list(itertools.permutations(range(m)))) * \
            len(list(itertools.permutations(range(n))))
    assert {k: sp.operations(*k) for k in expected} == expected


def test_non_flat_detected():
    # one operation (2, 0) on a single colour, fixed by swapping its inputs
    sp = single_operation_species(2, 0, [0, 0], [], 1, [((1, 0), ())])
    assert sp.check()
    v = is_flat(sp)
    assert not v
    m, n, x, s, t = v.witness
    assert (m, n) == (2, 0) and s == (1, 0)
    with pytest.raises(PreconditionError):
        net_of_species(sp)


def test_free_single_operation_species_is_flat():
    sp = single_operation_species(2, 1, [0, 1], [0], 2)
    assert is_flat(sp)
    net = net_of_species(sp)
    assert net.sizes == (2, 2, 1, 1)


def test_isomorphism_detects_difference():
    fork, _ = FIXTURES["NET_FORK"]
    q, _ = FIXTURES["NET_Q"]
    assert net_isomorphism(fork, q) is None
    hw, _ = FIXTURES["NET_HW"]
    uv, _ = FIXTURES["NET_UV"]
    assert net_isomorphism(hw, uv) is None


def brute_free_prop(net, m, n, max_nodes):
    reps = []
    for colouring in itertools.product(range(net.S.size), repeat=m):
        B = Marking.of(net, list(colouring))
        for p in oracles.b_process_reps(net, B, max_nodes):
            outs = p.out_boundary
            if len(outs) != n:
                continue
            for order in itertools.permutations(outs):
                tags = [()] * p.n_edges
                for k, e in enumerate(p.b_order):
                    tags[e] = tags[e] + (("in", k),)
                for k, e in enumerate(order):
                    tags[e] = tags[e] + (("out", k),)
                if not any(oracles.count_isos(p.shape, q.shape, tags, qt) for q, qt in reps):
                    reps.append((p, tags))
    return len(reps)


@pytest.mark.parametrize("name,m,n,k", [("NET_HW", 1, 0, 1), ("NET_UV", 2, 0, 1), ("NET_FORK", 1, 2, 1),
                                        ("NET_FORK", 2, 2, 1), ("NET_EX", 2, 2, 1), ("NET_Q", 1, 1, 1)])
def test_free_prop_matches_brute_force(name, m, n, k):
    net, _ = FIXTURES[name]
    assert len(free_prop_ops(net, m, n, k)) == brute_free_prop(net, m, n, k)


def test_free_prop_one_place():
    net = SitosNet.build(["s"], [], [], [])
    assert len(free_prop_ops(net, 1, 1, 0)) == 1
    assert len(free_prop_ops(net, 2, 2, 0)) == 2
