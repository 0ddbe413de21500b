"""Finite sets as dense index ranges, maps between them, and the two
finite limits/colimits the rest of the package is built from."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import StructuralError


@dataclass(frozen=True)
class FinSet:
    """The set {0, ..., size-1}, optionally with display labels."""

    size: int
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.size < 0:
            raise StructuralError("negative set size")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.size:
                raise StructuralError(f"{len(labels)} labels for a set of size {self.size}")
            if len(set(labels)) != len(labels):
                raise StructuralError("labels must be pairwise distinct")

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def label(self, i: int) -> str:
        if self.labels is None:
            return str(i)
        return self.labels[i]

    def index(self, name: str) -> int:
        if self.labels is None:
            return int(name)
        return self.labels.index(name)

    @staticmethod
    def named(names: Iterable[str]) -> "FinSet":
        names = tuple(names)
        return FinSet(len(names), names)


@dataclass(frozen=True)
class FinMap:
    """A function dom -> cod given by its table of values."""

    dom: FinSet
    cod: FinSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.dom.size:
            raise StructuralError(f"table has {len(table)} entries, domain has {self.dom.size}")
        for v in table:
            if not 0 <= v < self.cod.size:
                raise StructuralError(f"value {v} outside codomain of size {self.cod.size}")

    def __call__(self, i: int) -> int:
        return self.table[i]

    @staticmethod
    def identity(s: FinSet) -> "FinMap":
        return FinMap(s, s, tuple(range(s.size)))

    @staticmethod
    def from_list(values: Sequence[int], cod: FinSet | int, dom: FinSet | None = None) -> "FinMap":
        if isinstance(cod, int):
            cod = FinSet(cod)
        if dom is None:
            dom = FinSet(len(values))
        return FinMap(dom, cod, tuple(values))

    def then(self, g: "FinMap") -> "FinMap":
        """Composite g after self."""
        if self.cod.size != g.dom.size:
            raise StructuralError("cannot compose: codomain and domain differ")
        return FinMap(self.dom, g.cod, tuple(g.table[v] for v in self.table))

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    def is_bijective(self) -> bool:
        return self.dom.size == self.cod.size and self.is_injective()

    def image(self) -> list[int]:
        return sorted(set(self.table))

    def fibers(self) -> list[list[int]]:
        """fibers()[c] lists the preimage of c in increasing order."""
        out: list[list[int]] = [[] for _ in range(self.cod.size)]
        for i, v in enumerate(self.table):
            out[v].append(i)
        return out

    def fiber(self, c: int) -> list[int]:
        return [i for i, v in enumerate(self.table) if v == c]

    def inverse(self) -> "FinMap":
        if not self.is_bijective():
            raise StructuralError("only bijections have inverses")
        inv = [0] * self.cod.size
        for i, v in enumerate(self.table):
            inv[v] = i
        return FinMap(self.cod, self.dom, tuple(inv))


def pullback(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """P = {(a, b) | f(a) = g(b)}, ordered lexicographically in (a, b)."""
    if f.cod.size != g.cod.size:
        raise StructuralError("pullback legs have different codomains")
    by_value = defaultdict(list)
    for b, v in enumerate(g.table):
        by_value[v].append(b)
    pairs = [(a, b) for a, v in enumerate(f.table) for b in by_value.get(v, ())]
    p = FinSet(len(pairs))
    return (p, FinMap(p, f.dom, tuple(a for a, _ in pairs)),
            FinMap(p, g.dom, tuple(b for _, b in pairs)))


def pushout_inj(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """Pushout of two injections out of M.

    Elements of Q are ordered as: A-only elements, then the glued elements
    in M order, then B-only elements.
    """
    if f.dom.size != g.dom.size:
        raise StructuralError("pushout legs have different domains")
    if not f.is_injective() or not g.is_injective():
        raise StructuralError("pushout_inj needs injective legs")
    m = f.dom.size
    hit_a = {v: k for k, v in enumerate(f.table)}
    hit_b = {v: k for k, v in enumerate(g.table)}
    a_only = [a for a in range(f.cod.size) if a not in hit_a]
    b_only = [b for b in range(g.cod.size) if b not in hit_b]
    na = len(a_only)
    to_q_a = [0] * f.cod.size
    for pos, a in enumerate(a_only):
        to_q_a[a] = pos
    for a, k in hit_a.items():
        to_q_a[a] = na + k
    to_q_b = [0] * g.cod.size
    for b, k in hit_b.items():
        to_q_b[b] = na + k
    for pos, b in enumerate(b_only):
        to_q_b[b] = na + m + pos
    q = FinSet(na + m + len(b_only))
    return q, FinMap(f.cod, q, tuple(to_q_a)), FinMap(g.cod, q, tuple(to_q_b))


def coproduct(a: FinSet, b: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    """Disjoint union with a-elements first."""
    labels = None
    if a.labels is not None and b.labels is not None and not set(a.labels) & set(b.labels):
        labels = a.labels + b.labels
    s = FinSet(a.size + b.size, labels)
    return (s, FinMap(a, s, tuple(range(a.size))),
            FinMap(b, s, tuple(range(a.size, a.size + b.size))))
