import pytest
from hypothesis import given, settings, strategies as st

from grainnet import canon
from grainnet.errors import PreconditionError
from grainnet.fixtures import all_fixtures, marking_ex, net_ex, net_fork, net_hw, net_q, net_uv
from grainnet.groupoid import is_fibration
from grainnet.net import EtaleMap, Marking
from grainnet.process import FiringBinding, enumerate_B_processes, minimal_firing, process_of_sequence
from grainnet.segal import (build_truncation, check_rezk, check_segal, check_simplicial_identities,
                            compose_classes, face_restrictor, hom_C, hom_classes, identity_class, levelled_disjoint,
                            levelled_from_process, levelled_push, levelled_to_process, lift_d0,
                            map_groupoid, normalize)

import oracles

WINDOWS = {
    "NET_UV": (net_uv, 2, 2),
    "NET_HW": (net_hw, 2, 2),
    "NET_EX": (net_ex, 1, 3),
    "NET_FORK": (net_fork, 2, 3),
    "NET_Q": (net_q, 2, 3),
}
TRUNCS = {name: build_truncation(make(), 2, n, t) for name, (make, n, t) in WINDOWS.items()}


def test_needs_k_at_least_two():
    with pytest.raises(PreconditionError):
        build_truncation(net_uv(), 1, 1, 1)


def test_window_sizes():
    assert [len(x.objects) for x in TRUNCS["NET_UV"].levels] == [3, 6, 12]
    assert [len(x.objects) for x in TRUNCS["NET_EX"].levels] == [20, 85, 406]


@pytest.mark.parametrize("name", sorted(WINDOWS))
def test_simplicial_identities(name):
    assert check_simplicial_identities(TRUNCS[name])


@pytest.mark.parametrize("name", sorted(WINDOWS))
def test_segal_condition(name):
    r = check_segal(TRUNCS[name])
    assert r, r.verdict
    assert r.n_x2_components == r.n_target_components


@pytest.mark.parametrize("name", sorted(WINDOWS))
def test_d0_is_fibration_and_rezk(name):
    t = TRUNCS[name]
    assert is_fibration(t.d(1, 0))
    assert is_fibration(t.d(1, 1))
    assert check_rezk(t)


@pytest.mark.parametrize("name", sorted(WINDOWS))
def test_faces_and_degeneracies_are_functors(name):
    t = TRUNCS[name]
    small = name in ("NET_UV", "NET_HW")
    maps = {**t.faces, **{("s",) + k: v for k, v in t.degeneracies.items()}}
    for key, F in maps.items():
        if small or key[-2] <= 1:
            assert F.check(exhaustive=False)


def test_negative_control_wrong_face():
    t = TRUNCS["NET_UV"]
    assert not check_segal(t, outer_first=t.d(2, 1))


@pytest.mark.parametrize("name", sorted(WINDOWS))
def test_components_match_brute_force_isomorphism(name):
    X1 = TRUNCS[name].levels[1]
    comps = X1.components()
    reps = [c[0] for c in comps]
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            if a.shape.n_nodes == b.shape.n_nodes and a.shape.n_edges == b.shape.n_edges:
                # different components: no level-preserving iso
                for nm, em in canon.isomorphisms(a.shape, b.shape, None, None, a.level, b.level):
                    pytest.fail("two components are isomorphic")
    for c in comps:
        x = c[0]
        n_aut = sum(1 for nm, em in canon.isomorphisms(x.shape, x.shape, None, None, x.level, x.level))
        assert len(X1.automorphisms(x)) == n_aut


@settings(max_examples=40)
@given(st.data())
def test_segal_decomposition_round_trip(data):
    t = TRUNCS[data.draw(st.sampled_from(sorted(WINDOWS)))]
    X2 = t.levels[2]
    P = data.draw(st.sampled_from(X2.objects))
    a, b = t.d(2, 2).ob(P), t.d(2, 0).ob(P)
    assert t.d(1, 0).ob(a) == t.d(1, 1).ob(b)
    assert a.n_nodes + b.n_nodes == P.n_nodes
    assert t.d(2, 1).ob(P).n_nodes == P.n_nodes


@settings(max_examples=40)
@given(st.data())
def test_lift_along_d0(data):
    t = TRUNCS[data.draw(st.sampled_from(sorted(WINDOWS)))]
    X0, X1 = t.levels[0], t.levels[1]
    x = data.draw(st.sampled_from(X1.objects))
    c = t.d(1, 0).ob(x)
    beta = data.draw(st.sampled_from(X0.automorphisms(c)))
    target, phi = lift_d0(t, x, beta)
    assert target in X1
    assert t.d(1, 0).mor(phi) == beta


def test_levelled_conversions():
    p = process_of_sequence(net_ex(), all_fixtures()["NET_EX"][1],
                            [FiringBinding(0, (0, 1)), FiringBinding(1, (0, 1))]).process
    x = levelled_from_process(p, [1, 2], 2)
    assert normalize(x)[0] == x
    q = levelled_to_process(net_ex(), x)
    assert oracles.count_isos(p.shape, q.shape) > 0


def test_faces_of_a_single_firing():
    net = net_ex()
    corolla = minimal_firing(net, 0)
    full = process_of_sequence(net, marking_ex(), [FiringBinding(0, (0, 1))]).process
    for p, n_in in ((corolla, 2), (full, 4)):
        x = levelled_from_process(p, [1] * p.n_nodes, 1)
        src, _, src_edges = face_restrictor(1, 1)(x)
        tgt, _, tgt_edges = face_restrictor(1, 0)(x)
        assert src.n_nodes == tgt.n_nodes == 0
        places = x.shape.edge_place
        assert len(src_edges) == n_in
        assert sorted(places[e] for e in src_edges) == sorted(p.shape.edge_place[e] for e in p.in_boundary)
        assert sorted(places[e] for e in tgt_edges) == sorted(p.shape.edge_place[e] for e in p.out_boundary)


def test_monoidal_and_push():
    t = TRUNCS["NET_UV"]
    X1 = t.levels[1]
    a, b = X1.objects[0], X1.objects[-1]
    ab, ba = levelled_disjoint(a, b), levelled_disjoint(b, a)
    assert X1.plain(ab)[0] == X1.plain(ba)[0]
    ident = EtaleMap.identity(net_uv())
    assert levelled_push(a, ident) == a


def test_mapping_groupoid_two_tokens_one_place():
    net = net_hw()
    M = Marking.of(net, [0, 0])
    G = map_groupoid(net, M, M, 0)
    assert len(G.objects) == 4
    assert len(G.components()) == 2
    assert all(len(G.automorphisms(x)) == 1 for x in G.objects)


@pytest.mark.parametrize("name,n_max", [("NET_FORK", 2), ("NET_UV", 1), ("NET_HW", 2), ("NET_EX", 1)])
def test_hom_sets_match_brute_force(name, n_max):
    net, B = all_fixtures()[name]
    for N in {tuple(sorted(p.final_marking().place.table)) for p in enumerate_B_processes(net, B, n_max).processes}:
        Nm = Marking.of(net, list(N))
        assert len(hom_C(net, B, Nm, n_max)) == oracles.hom_class_count(net, B, Nm, n_max)


def test_fork_hom_set_after_both_transitions():
    net, B = all_fixtures()["NET_FORK"]
    N = Marking.of(net, ["s1", "s2"])
    assert len(hom_C(net, B, N, 2)) == 4
    assert oracles.hom_class_count(net, B, N, 2) == 4


def test_identity_class_is_unit():
    net, B = all_fixtures()["NET_FORK"]
    N = Marking.of(net, ["s1", "s2"])
    for f in hom_classes(net, B, N, 2):
        left = compose_classes(identity_class(B), f)
        right = compose_classes(f, identity_class(N))
        assert left.code() == f.code() and right.code() == f.code()
