import itertools

import pytest
from hypothesis import given, strategies as st

from grainnet.errors import PreconditionError
from grainnet.fixtures import all_fixtures
from grainnet.process import enumerate_B_processes
from grainnet.unfolding import (check_universal, check_unfolding, colimit_unfold, domain_elements,
                                event_structure, iso_over_net_and_B, unfold)

import oracles

FIXTURES = all_fixtures()
NAMES = sorted(FIXTURES)


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("depth", [0, 1, 2])
def test_event_count_matches_oracle(name, depth):
    net, B = FIXTURES[name]
    assert unfold(net, B, depth).n_events == oracles.event_count(net, B, depth, 4)


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("depth", [0, 1, 2, 3])
def test_unfolding_is_occurrence_and_matches_colimit(name, depth):
    net, B = FIXTURES[name]
    u = unfold(net, B, depth)
    assert check_unfolding(u)
    v = colimit_unfold(net, B, depth)
    assert check_unfolding(v)
    assert iso_over_net_and_B(u, v) is not None
    assert u.saturated == v.saturated


def test_depth_zero_is_just_b():
    net, B = FIXTURES["NET_EX"]
    u = unfold(net, B, 0)
    assert u.n_events == 0 and u.n_conditions == B.size


def test_fork_unfolding():
    net, B = FIXTURES["NET_FORK"]
    u = unfold(net, B, 3)
    assert u.n_events == 5 and u.n_conditions == 5
    assert u.sizes[1] == 9 and u.sizes[3] == 2
    assert u.saturated
    assert not unfold(net, B, 1).saturated


def test_two_tokens_one_arc():
    net, B = FIXTURES["NET_HW"]
    u = unfold(net, B, 1)
    assert u.sizes == (2, 2, 2, 0)
    assert u.saturated
    es = event_structure(u)
    assert not es.conflict[0][1]
    for p in enumerate_B_processes(net, B, 2).processes:
        assert check_universal(net, B, p, 1, u).count == 1
    assert check_universal(net, B, u, 1, u).count == 1


def test_parallel_arcs_conflict():
    net, B = FIXTURES["NET_UV"]
    u = unfold(net, B, 1)
    assert (u.n_events, u.n_conditions, u.sizes[1]) == (2, 2, 4)
    es = event_structure(u)
    assert es.conflict[0][1] and es.conflict[1][0]
    dom = domain_elements(net, B, 1)
    assert len(dom) == 3
    assert len(dom.order) == 2


def test_joined_places_pairs():
    net, B = FIXTURES["NET_Q"]
    u = unfold(net, B, 2)
    t1, t2 = net.T.index("t1"), net.T.index("t2")
    t2_events = [k for k in u.event_keys if k[0] == t2]
    assert len(t2_events) == 12
    # after t1 the place s1 holds four tokens; t2 binds an ordered pair
    after = [net.S.index("s1")] * 4
    assert len([b for b in oracles.bindings(net, after) if b[0] == t2]) == 12
    pairs = {frozenset(mu) for _, mu in t2_events}
    assert len(pairs) == 6
    assert all(sum(1 for _, mu in t2_events if frozenset(mu) == p) == 2 for p in pairs)


@pytest.mark.parametrize("name", NAMES)
def test_event_structure_axioms(name):
    net, B = FIXTURES[name]
    es = event_structure(unfold(net, B, 2))
    assert es.check()


@pytest.mark.parametrize("name", NAMES)
def test_domain_matches_process_poset(name):
    net, B = FIXTURES[name]
    dom = domain_elements(net, B, 2)
    assert len(dom) == len(enumerate_B_processes(net, B, 2).processes)


@pytest.mark.parametrize("name", NAMES)
def test_every_b_process_maps_uniquely(name):
    net, B = FIXTURES[name]
    u = unfold(net, B, 2)
    for p in enumerate_B_processes(net, B, 2).processes:
        if p.n_nodes and p.est_depth() > 2:
            continue
        m = check_universal(net, B, p, 2, u)
        assert m.count == 1
        assert len(set(m.events)) == len(m.events)


def test_universal_rejects_deeper_source():
    net, B = FIXTURES["NET_FORK"]
    deep = [p for p in enumerate_B_processes(net, B, 2).processes if p.est_depth() == 2][0]
    with pytest.raises(PreconditionError):
        check_universal(net, B, deep, 1)


@given(st.sampled_from(NAMES), st.integers(0, 2), st.data())
def test_conflict_free_lowersets_are_reachable(name, depth, data):
    net, B = FIXTURES[name]
    u = unfold(net, B, depth)
    es = event_structure(u)
    if es.n == 0:
        return
    s = frozenset(data.draw(st.sets(st.integers(0, es.n - 1), max_size=3)))
    ok = es.is_lowerset(s) and es.is_conflict_free(s)
    # a conflict-free lowerset is exactly a set whose events can fire in some order
    reachable = False
    for order in itertools.permutations(sorted(s)):
        used = set()
        avail = set(u.carrier.b)
        good = True
        for x in order:
            _, mu = u.event_keys[x]
            if not set(mu) <= avail:
                good = False
                break
            avail -= set(mu)
            used |= set(mu)
            avail |= {c for c, key in enumerate(u.condition_keys) if key[0] == "post" and key[1] == x}
        if good:
            reachable = True
            break
    assert ok == reachable


def test_unfold_needs_grounded_net():
    from grainnet.net import Marking, SitosNet
    net = SitosNet.build(["s"], ["t"], [], [("o", "t", "s")])
    with pytest.raises(PreconditionError):
        unfold(net, Marking.of(net, []), 1)
