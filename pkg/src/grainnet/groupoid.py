"""Finite groupoids and the homotopy toolkit used by the Segal checks.

Two kinds of groupoid live here. ``FinGroupoid`` stores morphisms as
integers with explicit composition and inverse tables; it is what the
kernel tests and small constructions use. ``Groupoid`` is the abstract
interface everything else relies on, so the process groupoids of the
Segal layer can compute composition on demand instead of tabulating
millions of products.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable

from .errors import StructuralError


@dataclass
class Verdict:
    """Boolean result of a check plus an explanation when it fails."""

    ok: bool
    reason: str = ""
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        if self.ok:
            return "Verdict(ok)"
        return f"Verdict(failed: {self.reason}, witness={self.witness!r})"


def _order_key(m):
    # morphisms are ints or nested tuples of ints in every groupoid we build
    return m if isinstance(m, (int, tuple)) else repr(m)


class Groupoid:
    """Interface of a finite groupoid.

    Subclasses provide ``objects``, ``hom``, ``compose``, ``inverse``,
    ``identity``, ``src`` and ``tgt``. Everything else has a default that
    only uses those, and can be overridden when a faster route exists.
    """

    objects: list

    def hom(self, x, y) -> list:
        raise NotImplementedError

    def compose(self, g, f):
        """g after f."""
        raise NotImplementedError

    def inverse(self, f):
        raise NotImplementedError

    def identity(self, x):
        raise NotImplementedError

    def src(self, f):
        raise NotImplementedError

    def tgt(self, f):
        raise NotImplementedError

    # derived structure

    def automorphisms(self, x) -> list:
        return self.hom(x, x)

    def find_iso(self, x, y):
        hs = self.hom(x, y)
        return hs[0] if hs else None

    def canonical(self, x) -> tuple[Hashable, Any]:
        """A representative of the component of x and an iso x -> rep."""
        comp = self._component_table()
        rep = comp[x]
        return rep, self.find_iso(x, rep)

    def _component_table(self) -> dict:
        cache = getattr(self, "_comp_cache", None)
        if cache is not None:
            return cache
        table: dict = {}
        for x in self.objects:
            if x in table:
                continue
            table[x] = x
            for y in self.objects:
                if y not in table and self.find_iso(x, y) is not None:
                    table[y] = x
        self._comp_cache = table
        return table

    def components(self) -> list[list]:
        groups: dict = {}
        for x in self.objects:
            rep, _ = self.canonical(x)
            groups.setdefault(rep, []).append(x)
        return list(groups.values())

    def component_reps(self) -> list:
        return [c[0] for c in self.components()]

    def morphism_count(self) -> int:
        return sum(len(self.hom(x, y)) for x in self.objects for y in self.objects)


class FinGroupoid(Groupoid):
    """Explicit finite groupoid.

    Objects are 0..n-1 (labels optional). Morphism k has source ``msrc[k]``
    and target ``mtgt[k]``; ``comp[(g, f)]`` is g after f and ``inv[k]`` the
    inverse. Axioms are verified on construction unless ``check=False``.
    """

    def __init__(self, n_objects: int, msrc: list[int], mtgt: list[int],
                 comp: dict[tuple[int, int], int], inv: list[int], ident: list[int],
                 labels: list | None = None, check: bool = True):
        self.n = n_objects
        self.objects = list(range(n_objects))
        self.labels = labels
        self.msrc = list(msrc)
        self.mtgt = list(mtgt)
        self.comp = dict(comp)
        self.inv = list(inv)
        self.ident = list(ident)
        self._hom: dict[tuple[int, int], list[int]] = {}
        self._from: dict[int, list[int]] = {}
        for k, (s, t) in enumerate(zip(self.msrc, self.mtgt)):
            self._hom.setdefault((s, t), []).append(k)
            self._from.setdefault(s, []).append(k)
        if check:
            self.check_axioms()

    def check_axioms(self) -> None:
        nm = len(self.msrc)
        for x in self.objects:
            e = self.ident[x]
            if self.msrc[e] != x or self.mtgt[e] != x:
                raise StructuralError(f"identity of {x} has wrong endpoints")
        for f in range(nm):
            for g in self._hom_from(self.mtgt[f]):
                h = self.comp.get((g, f))
                if h is None:
                    raise StructuralError(f"composite {g}∘{f} missing")
                if self.msrc[h] != self.msrc[f] or self.mtgt[h] != self.mtgt[g]:
                    raise StructuralError(f"composite {g}∘{f} has wrong endpoints")
            if self.comp[(self.ident[self.mtgt[f]], f)] != f or self.comp[(f, self.ident[self.msrc[f]])] != f:
                raise StructuralError(f"identities are not units for {f}")
            fi = self.inv[f]
            if self.comp.get((fi, f)) != self.ident[self.msrc[f]] or self.comp.get((f, fi)) != self.ident[self.mtgt[f]]:
                raise StructuralError(f"inverse table wrong at {f}")
        for f in range(nm):
            for g in self._hom_from(self.mtgt[f]):
                gf = self.comp[(g, f)]
                for h in self._hom_from(self.mtgt[g]):
                    if self.comp[(h, gf)] != self.comp[(self.comp[(h, g)], f)]:
                        raise StructuralError("composition is not associative")

    def _hom_from(self, x: int) -> list[int]:
        return self._from.get(x, [])

    def hom(self, x, y):
        return list(self._hom.get((x, y), ()))

    def compose(self, g, f):
        if self.mtgt[f] != self.msrc[g]:
            raise StructuralError("morphisms not composable")
        return self.comp[(g, f)]

    def inverse(self, f):
        return self.inv[f]

    def identity(self, x):
        return self.ident[x]

    def src(self, f):
        return self.msrc[f]

    def tgt(self, f):
        return self.mtgt[f]

    def morphism_count(self) -> int:
        return len(self.msrc)

    # constructors

    @staticmethod
    def tabulate(g: Groupoid, objects: list | None = None) -> "FinGroupoid":
        """Copy a (small) groupoid into explicit tables."""
        objs = list(g.objects if objects is None else objects)
        index = {x: i for i, x in enumerate(objs)}
        mors, msrc, mtgt = [], [], []
        mindex = {}
        for x in objs:
            for y in objs:
                for m in g.hom(x, y):
                    mindex[(x, y, m)] = len(mors)
                    mors.append((x, y, m))
                    msrc.append(index[x])
                    mtgt.append(index[y])
        comp, inv = {}, []
        for k, (x, y, f) in enumerate(mors):
            inv.append(mindex[(y, x, g.inverse(f))])
            for z in objs:
                for h in g.hom(y, z):
                    comp[(mindex[(y, z, h)], k)] = mindex[(x, z, g.compose(h, f))]
        ident = [mindex[(x, x, g.identity(x))] for x in objs]
        out = FinGroupoid(len(objs), msrc, mtgt, comp, inv, ident, labels=objs)
        out.payload = mors
        return out

    @staticmethod
    def from_group(elements: list, mult: Callable, inv: Callable, unit) -> "FinGroupoid":
        """One-object groupoid of a finite group."""
        return FinGroupoid.connected(1, elements, mult, inv, unit)

    @staticmethod
    def connected(n: int, elements: list, mult: Callable, inv: Callable, unit) -> "FinGroupoid":
        """Connected groupoid on n objects with vertex group given by elements.

        Morphism (i, j, g) goes from i to j; composition multiplies labels.
        """
        return FinGroupoid.tabulate(_ConnectedGroupoid(n, elements, mult, inv, unit))

    @staticmethod
    def discrete(n: int) -> "FinGroupoid":
        return FinGroupoid(n, list(range(n)), list(range(n)),
                           {(i, i): i for i in range(n)}, list(range(n)), list(range(n)))

    @staticmethod
    def disjoint(parts: list["FinGroupoid"]) -> "FinGroupoid":
        n, msrc, mtgt, comp, inv, ident = 0, [], [], {}, [], []
        for p in parts:
            off_o, off_m = n, len(msrc)
            msrc += [s + off_o for s in p.msrc]
            mtgt += [t + off_o for t in p.mtgt]
            inv += [i + off_m for i in p.inv]
            ident += [i + off_m for i in p.ident]
            comp.update({(g + off_m, f + off_m): h + off_m for (g, f), h in p.comp.items()})
            n += p.n
        return FinGroupoid(n, msrc, mtgt, comp, inv, ident)


class _ConnectedGroupoid(Groupoid):
    def __init__(self, n, elements, mult, inv, unit):
        self.objects = list(range(n))
        self.elements = list(elements)
        self.mult, self.inv, self.unit = mult, inv, unit

    def hom(self, x, y):
        return [(x, y, g) for g in self.elements]

    def compose(self, g, f):
        return (f[0], g[1], self.mult(g[2], f[2]))

    def inverse(self, f):
        return (f[1], f[0], self.inv(f[2]))

    def identity(self, x):
        return (x, x, self.unit)

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]


class GroupoidFunctor:
    """A functor given by an object map and a morphism map (callables or dicts)."""

    def __init__(self, dom: Groupoid, cod: Groupoid, on_objects, on_morphisms, name: str = ""):
        self.dom, self.cod = dom, cod
        self._ob = on_objects if callable(on_objects) else on_objects.__getitem__
        self._mor = on_morphisms if callable(on_morphisms) else on_morphisms.__getitem__
        self.name = name

    def ob(self, x):
        return self._ob(x)

    def mor(self, f):
        return self._mor(f)

    def check(self, exhaustive: bool | None = None) -> Verdict:
        """Verify endpoints, identities and composition.

        Exhaustive over all composable pairs for explicit groupoids; for
        lazily presented ones the check runs over generators: each
        automorphism group and one connecting iso per object.
        """
        d, c = self.dom, self.cod
        if exhaustive is None:
            exhaustive = isinstance(d, FinGroupoid)
        for x in d.objects:
            if self.mor(d.identity(x)) != c.identity(self.ob(x)):
                return Verdict(False, "identity not preserved", x)
        if exhaustive:
            pairs = []
            for x in d.objects:
                for y in d.objects:
                    for f in d.hom(x, y):
                        pairs.append(f)
            morphs = pairs
        else:
            morphs = []
            for x in d.objects:
                rep, iso = d.canonical(x)
                morphs.append(iso)
                morphs.extend(d.automorphisms(rep))
        for f in morphs:
            ff = self.mor(f)
            if c.src(ff) != self.ob(d.src(f)) or c.tgt(ff) != self.ob(d.tgt(f)):
                return Verdict(False, "endpoints not preserved", f)
        for f in morphs:
            for g in morphs:
                if d.tgt(f) != d.src(g):
                    continue
                if self.mor(d.compose(g, f)) != c.compose(self.mor(g), self.mor(f)):
                    return Verdict(False, "composition not preserved", (g, f))
        return Verdict(True)

    def then(self, other: "GroupoidFunctor") -> "GroupoidFunctor":
        return GroupoidFunctor(self.dom, other.cod, lambda x: other.ob(self.ob(x)),
                               lambda f: other.mor(self.mor(f)))


def identity_functor(g: Groupoid) -> GroupoidFunctor:
    return GroupoidFunctor(g, g, lambda x: x, lambda f: f, "id")


class HomotopyPullback(Groupoid):
    """Standard model of X ×^h_S Y for functors F: X -> S and G: Y -> S.

    Objects are (x, y, σ) with σ: Fx -> Gy in S. A morphism from (x,y,σ) to
    (x',y',σ') is (φ, ψ) with σ' F(φ) = G(ψ) σ; it is stored as the tuple
    (source, target, φ, ψ). ``restrict`` optionally keeps only objects for
    which the predicate holds; the predicate must be invariant under
    isomorphism so that the result is a union of components.
    """

    def __init__(self, F: GroupoidFunctor, G: GroupoidFunctor, restrict: Callable | None = None):
        if F.cod is not G.cod:
            raise StructuralError("homotopy pullback needs functors into the same groupoid")
        self.F, self.G, self.S = F, G, F.cod
        self.X, self.Y = F.dom, G.dom
        self.restrict = restrict
        self._objects = None
        self.proj_x = GroupoidFunctor(self, self.X, lambda a: a[0], lambda m: m[2], "pr_X")
        self.proj_y = GroupoidFunctor(self, self.Y, lambda a: a[1], lambda m: m[3], "pr_Y")

    @property
    def objects(self):
        if self._objects is None:
            objs = []
            for x in self.X.objects:
                fx = self.F.ob(x)
                for y in self.Y.objects:
                    for s in self.S.hom(fx, self.G.ob(y)):
                        a = (x, y, s)
                        if self.restrict is None or self.restrict(a):
                            objs.append(a)
            self._objects = objs
        return self._objects

    def _ok(self, a, b, phi, psi) -> bool:
        S = self.S
        return S.compose(b[2], self.F.mor(phi)) == S.compose(self.G.mor(psi), a[2])

    def hom(self, a, b):
        out = []
        for phi in self.X.hom(a[0], b[0]):
            for psi in self.Y.hom(a[1], b[1]):
                if self._ok(a, b, phi, psi):
                    out.append((a, b, phi, psi))
        return out

    def automorphisms(self, a):
        return self.hom(a, a)

    def compose(self, g, f):
        return (f[0], g[1], self.X.compose(g[2], f[2]), self.Y.compose(g[3], f[3]))

    def inverse(self, f):
        return (f[1], f[0], self.X.inverse(f[2]), self.Y.inverse(f[3]))

    def identity(self, a):
        return (a, a, self.X.identity(a[0]), self.Y.identity(a[1]))

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]

    def find_iso(self, a, b):
        rep_a, ia = self.canonical(a)
        rep_b, ib = self.canonical(b)
        if rep_a != rep_b:
            return None
        return self.compose(self.inverse(ib), ia)

    def canonical(self, a):
        """Move x and y to their component representatives, then pick the
        least σ in the double coset G(Aut y)·σ·F(Aut x)."""
        X, Y, S, F, G = self.X, self.Y, self.S, self.F, self.G
        x, y, s = a
        rx, px = X.canonical(x)
        ry, py = Y.canonical(y)
        s1 = S.compose(G.mor(py), S.compose(s, S.inverse(F.mor(px))))
        best = None
        for phi in X.automorphisms(rx):
            fphi_inv = S.inverse(F.mor(phi))
            for psi in Y.automorphisms(ry):
                cand = S.compose(G.mor(psi), S.compose(s1, fphi_inv))
                key = _order_key(cand)
                if best is None or key < best[0]:
                    best = (key, cand, phi, psi)
        _, s_min, phi, psi = best
        rep = (rx, ry, s_min)
        return rep, (a, rep, X.compose(phi, px), Y.compose(psi, py))

    def component_reps(self):
        """One object per component, without listing all objects."""
        X, Y, S, F, G = self.X, self.Y, self.S, self.F, self.G
        reps = []
        for rx in X.component_reps():
            fx = F.ob(rx)
            for ry in Y.component_reps():
                seen = set()
                for s in S.hom(fx, G.ob(ry)):
                    rep, _ = self.canonical((rx, ry, s))
                    if rep in seen:
                        continue
                    seen.add(rep)
                    if self.restrict is None or self.restrict(rep):
                        reps.append(rep)
        return reps

    def components(self):
        groups: dict = {}
        for a in self.objects:
            groups.setdefault(self.canonical(a)[0], []).append(a)
        return list(groups.values())


def homotopy_pullback(F: GroupoidFunctor, G: GroupoidFunctor, restrict: Callable | None = None) -> HomotopyPullback:
    return HomotopyPullback(F, G, restrict)


class StrictPullback(Groupoid):
    """Objects (x, y) with Fx = Gy, morphisms (φ, ψ) with Fφ = Gψ."""

    def __init__(self, F: GroupoidFunctor, G: GroupoidFunctor):
        if F.cod is not G.cod:
            raise StructuralError("strict pullback needs functors into the same groupoid")
        self.F, self.G = F, G
        self.X, self.Y = F.dom, G.dom
        self.objects = [(x, y) for x in self.X.objects for y in self.Y.objects if F.ob(x) == G.ob(y)]

    def hom(self, a, b):
        return [(a, b, phi, psi) for phi in self.X.hom(a[0], b[0]) for psi in self.Y.hom(a[1], b[1])
                if self.F.mor(phi) == self.G.mor(psi)]

    def compose(self, g, f):
        return (f[0], g[1], self.X.compose(g[2], f[2]), self.Y.compose(g[3], f[3]))

    def inverse(self, f):
        return (f[1], f[0], self.X.inverse(f[2]), self.Y.inverse(f[3]))

    def identity(self, a):
        return (a, a, self.X.identity(a[0]), self.Y.identity(a[1]))

    def src(self, f):
        return f[0]

    def tgt(self, f):
        return f[1]


def strict_to_homotopy(P: StrictPullback, H: HomotopyPullback) -> GroupoidFunctor:
    """The comparison functor (x, y) -> (x, y, id)."""
    S = H.S
    return GroupoidFunctor(
        P, H,
        lambda a: (a[0], a[1], S.identity(H.F.ob(a[0]))),
        lambda m: ((m[0][0], m[0][1], S.identity(H.F.ob(m[0][0]))),
                   (m[1][0], m[1][1], S.identity(H.F.ob(m[1][0]))), m[2], m[3]))


def is_equivalence(F: GroupoidFunctor) -> Verdict:
    """Essentially surjective, full and faithful, with a witness on failure.

    Hom-sets inside one component are torsors over the automorphism group
    of any of its objects, so fullness and faithfulness are checked at one
    representative per component (F on Aut(x) -> Aut(Fx)), together with
    the cross-component case: Fx ≅ Fx' while x and x' are not isomorphic.
    """
    dom, cod = F.dom, F.cod
    hit: dict = {}
    for x in dom.component_reps():
        fx = F.ob(x)
        crep, _ = cod.canonical(fx)
        if crep in hit:
            return Verdict(False, "not full: hom-set empty in the domain but not in the codomain",
                           (hit[crep], x))
        hit[crep] = x
        auts = dom.automorphisms(x)
        images = {}
        for a in auts:
            fa = F.mor(a)
            if fa in images:
                return Verdict(False, "not faithful: two automorphisms with the same image",
                               (x, images[fa], a))
            images[fa] = a
        target = cod.automorphisms(fx)
        for b in target:
            if b not in images:
                return Verdict(False, "not full: automorphism not in the image", (x, b))
    for y in cod.component_reps():
        crep, _ = cod.canonical(y)
        if crep not in hit:
            return Verdict(False, "not essentially surjective", y)
    return Verdict(True)


def is_fibration(F: GroupoidFunctor) -> Verdict:
    """Path lifting: every β: Fx -> b lifts to some φ: x -> x' with F(φ) = β.

    The lifting property is invariant under isomorphism of x, so it is
    tested at one object per component.
    """
    dom, cod = F.dom, F.cod
    cod_members: dict = {}
    for comp in cod.components():
        rep, _ = cod.canonical(comp[0])
        cod_members[rep] = comp
    dom_members: dict = {}
    for comp in dom.components():
        rep, _ = dom.canonical(comp[0])
        dom_members[rep] = comp
    for x, comp in dom_members.items():
        fx = F.ob(x)
        lifted = set()
        for x2 in comp:
            for phi in dom.hom(x, x2):
                lifted.add(F.mor(phi))
        crep, _ = cod.canonical(fx)
        for b in cod_members[crep]:
            for beta in cod.hom(fx, b):
                if beta not in lifted:
                    return Verdict(False, "no lift", (x, beta))
    return Verdict(True)


def comparison_functor(P: Groupoid, a: GroupoidFunctor, b: GroupoidFunctor,
                       F: GroupoidFunctor, G: GroupoidFunctor, cell: Callable) -> GroupoidFunctor:
    """Functor P -> X ×^h_S Y for a square a: P->X, b: P->Y, F, G and a
    natural iso cell(p): F a p -> G b p."""
    H = homotopy_pullback(F, G)

    def ob(p):
        return (a.ob(p), b.ob(p), cell(p))

    def mor(m):
        s, t = P.src(m), P.tgt(m)
        return (ob(s), ob(t), a.mor(m), b.mor(m))

    return GroupoidFunctor(P, H, ob, mor, "comparison")


def is_homotopy_pullback_square(P: Groupoid, a: GroupoidFunctor, b: GroupoidFunctor,
                                F: GroupoidFunctor, G: GroupoidFunctor, cell: Callable) -> Verdict:
    return is_equivalence(comparison_functor(P, a, b, F, G, cell))


def product_groupoid(X: Groupoid, Y: Groupoid) -> FinGroupoid:
    """X × Y tabulated; handy as the pullback over a point."""

    class _P(Groupoid):
        objects = [(x, y) for x in X.objects for y in Y.objects]

        def hom(self, a, b):
            return [(f, g) for f in X.hom(a[0], b[0]) for g in Y.hom(a[1], b[1])]

        def compose(self, g, f):
            return (X.compose(g[0], f[0]), Y.compose(g[1], f[1]))

        def inverse(self, f):
            return (X.inverse(f[0]), Y.inverse(f[1]))

        def identity(self, a):
            return (X.identity(a[0]), Y.identity(a[1]))

        def src(self, f):
            return (X.src(f[0]), Y.src(f[1]))

        def tgt(self, f):
            return (X.tgt(f[0]), Y.tgt(f[1]))

    return FinGroupoid.tabulate(_P())


def terminal_groupoid() -> FinGroupoid:
    return FinGroupoid.discrete(1)


def permutation_group(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def perm_mult(g: tuple, f: tuple) -> tuple:
    """g after f for permutations given as tuples."""
    return tuple(g[i] for i in f)


def perm_inv(f: tuple) -> tuple:
    out = [0] * len(f)
    for i, v in enumerate(f):
        out[v] = i
    return tuple(out)
