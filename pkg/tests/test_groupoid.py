import pytest
from hypothesis import given, settings, strategies as st

from grainnet.errors import StructuralError
from grainnet.groupoid import (FinGroupoid, Groupoid, GroupoidFunctor, HomotopyPullback, StrictPullback,
                               identity_functor, is_equivalence, is_fibration, perm_inv, perm_mult,
                               permutation_group, product_groupoid, strict_to_homotopy)

import oracles


class CyclicGroupoid(Groupoid):
    """Disjoint union of connected groupoids; component c has n_c objects
    and vertex group Z/k_c. Morphism ((c, i), (c, j), g)."""

    def __init__(self, comps):
        self.comps = list(comps)
        self.objects = [(c, i) for c, (n, _) in enumerate(self.comps) for i in range(n)]

    def hom(self, x, y):
        if x[0] != y[0]:
            return []
        return [(x, y, g) for g in range(self.comps[x[0]][1])]

    def compose(self, g, f):
        assert f[1] == g[0]
        return (f[0], g[1], (f[2] + g[2]) % self.comps[f[0][0]][1])

    def inverse(self, f):
        return (f[1], f[0], (-f[2]) % self.comps[f[0][0]][1])

    def identity(self, x):
        return (x, x, 0)

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]


@st.composite
def cyclic_groupoids(draw, max_comps=2):
    comps = draw(st.lists(st.tuples(st.integers(1, 2), st.sampled_from([1, 2, 3])), min_size=1, max_size=max_comps))
    return CyclicGroupoid(comps)


@st.composite
def functors(draw, dom=None, cod=None):
    """Functors between cyclic groupoids: a component map, an object map and
    a multiplier a with k_cod | a * k_dom."""
    dom = dom or draw(cyclic_groupoids())
    cod = cod or draw(cyclic_groupoids())
    cmap, omap, mult = {}, {}, {}
    for c, (n, k) in enumerate(dom.comps):
        c2 = draw(st.integers(0, len(cod.comps) - 1))
        n2, k2 = cod.comps[c2]
        cmap[c] = c2
        mult[c] = draw(st.sampled_from([a for a in range(k2) if (a * k) % k2 == 0]))
        for i in range(n):
            omap[(c, i)] = (c2, draw(st.integers(0, n2 - 1)))

    def mor(f):
        c = f[0][0]
        return (omap[f[0]], omap[f[1]], (mult[c] * f[2]) % cod.comps[cmap[c]][1])

    return GroupoidFunctor(dom, cod, omap, mor)


def brute_fibration(F):
    D, C = F.dom, F.cod
    for x in D.objects:
        lifts = {F.mor(phi) for x2 in D.objects for phi in D.hom(x, x2)}
        for b in C.objects:
            if any(beta not in lifts for beta in C.hom(F.ob(x), b)):
                return False
    return True


def test_group_axioms_checked():
    S3 = permutation_group(3)
    g = FinGroupoid.from_group(S3, perm_mult, perm_inv, (0, 1, 2))
    assert g.morphism_count() == 6
    assert len(g.automorphisms(0)) == 6
    bad = dict(g.comp)
    k = next(iter(bad))
    bad[k] = (bad[k] + 1) % 6
    with pytest.raises(StructuralError):
        FinGroupoid(1, g.msrc, g.mtgt, bad, g.inv, g.ident)


def test_connected_and_disjoint():
    g = FinGroupoid.connected(3, [0, 1], lambda a, b: (a + b) % 2, lambda a: a, 0)
    assert g.morphism_count() == 18
    assert len(g.components()) == 1
    d = FinGroupoid.disjoint([g, FinGroupoid.discrete(2)])
    assert len(d.components()) == 3
    assert d.morphism_count() == 20


def test_product_groupoid():
    z2 = FinGroupoid.from_group([0, 1], lambda a, b: (a + b) % 2, lambda a: a, 0)
    p = product_groupoid(z2, FinGroupoid.connected(2, [0], lambda a, b: 0, lambda a: 0, 0))
    assert p.n == 2 and p.morphism_count() == 8


@given(functors())
def test_functor_laws(F):
    assert F.check(exhaustive=True)


@given(functors())
def test_equivalence_matches_brute_force(F):
    assert bool(is_equivalence(F)) == oracles.brute_is_equivalence(F)


@given(functors())
def test_fibration_matches_brute_force(F):
    assert bool(is_fibration(F)) == brute_fibration(F)


@given(st.data())
def test_homotopy_pullback_matches_definition(data):
    S = data.draw(cyclic_groupoids())
    F = data.draw(functors(cod=S))
    G = data.draw(functors(cod=S))
    H = HomotopyPullback(F, G)
    objs, homs = oracles.brute_homotopy_pullback(F.dom, G.dom, S, F, G)
    assert sorted(H.objects) == sorted(objs)
    for (a, b), n in homs.items():
        assert len(H.hom(a, b)) == n
    # the canonical representative is constant on components
    for comp in H.components():
        assert len({H.canonical(a)[0] for a in comp}) == 1
    reps = H.component_reps()
    assert len(reps) == len(H.components())


@given(st.data())
def test_strict_pullback_along_fibration_is_homotopy_pullback(data):
    S = data.draw(cyclic_groupoids())
    F = data.draw(functors(cod=S))
    G = data.draw(functors(cod=S))
    P, H = StrictPullback(F, G), HomotopyPullback(F, G)
    comparison = strict_to_homotopy(P, H)
    if brute_fibration(G):
        assert is_equivalence(comparison)
    assert bool(is_equivalence(comparison)) == oracles.brute_is_equivalence(comparison)


def _prism(F, G, K):
    """X -F-> Y -G-> Z <-K- W. Compare X x^h_Y (Y x^h_Z W) with X x^h_Z W."""
    inner = HomotopyPullback(G, K)
    outer = HomotopyPullback(F, inner.proj_x)
    FG = F.then(G)
    FG.cod = G.cod
    total = HomotopyPullback(FG, K)
    Z = G.cod

    def ob(a):
        x, (y, w, tau), sigma = a
        return (x, w, Z.compose(tau, G.mor(sigma)))

    def mor(m):
        return (ob(m[0]), ob(m[1]), m[2], m[3][3])

    return GroupoidFunctor(outer, total, ob, mor)


@settings(max_examples=25)
@given(st.data())
def test_prism_lemma_spot_checks(data):
    Z = data.draw(cyclic_groupoids())
    G = data.draw(functors(cod=Z))
    F = data.draw(functors(cod=G.dom))
    K = data.draw(functors(cod=Z))
    C = _prism(F, G, K)
    assert C.check(exhaustive=True)
    assert is_equivalence(C)
    assert oracles.brute_is_equivalence(C)


def test_identity_is_equivalence_and_fibration():
    g = FinGroupoid.connected(2, [0, 1, 2], lambda a, b: (a + b) % 3, lambda a: (-a) % 3, 0)
    assert is_equivalence(identity_functor(g))
    assert is_fibration(identity_functor(g))


def test_non_full_functor_reported():
    z2 = CyclicGroupoid([(1, 2)])
    F = GroupoidFunctor(z2, z2, lambda x: x, lambda f: (f[0], f[1], 0))
    v = is_equivalence(F)
    assert not v and "not" in v.reason
