"""Finite groups as Cayley tables and permutation groups, plus isomorphism search."""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .fincat import CapacityError

DEFAULT_ORDER_BOUND = 10**4


def perm_mul(a, b):
    """``a . b`` (apply b first)."""
    return tuple(a[i] for i in b)


def perm_inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def perm_closure(gens, degree, bound=DEFAULT_ORDER_BOUND):
    ident = tuple(range(degree))
    seen = {ident}
    queue = deque([ident])
    gens = [tuple(g) for g in gens]
    while queue:
        p = queue.popleft()
        for g in gens:
            q = perm_mul(g, p)
            if q not in seen:
                seen.add(q)
                if len(seen) > bound:
                    raise CapacityError(f"permutation group order exceeds {bound}")
                queue.append(q)
    return sorted(seen)


class FiniteGroup:
    """Group on labels ``elements`` with ``table[i, j] = index of e_i * e_j``."""

    def __init__(self, elements, table, name=""):
        self.elements = list(elements)
        self.table = np.asarray(table, dtype=np.int64)
        self.name = name
        n = len(self.elements)
        diag = [i for i in range(n) if np.array_equal(self.table[i], np.arange(n))]
        if not diag:
            raise ValueError(f"{name}: no identity element")
        self.identity = diag[0]
        self._index = {e: i for i, e in enumerate(self.elements)}
        inv = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            hits = np.nonzero(self.table[i] == self.identity)[0]
            if hits.size != 1:
                raise ValueError(f"{name}: element {self.elements[i]!r} has no unique inverse")
            inv[i] = hits[0]
        self.inverse = inv

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    def index(self, e):
        return self._index[e]

    def mul(self, i, j):
        return int(self.table[i, j])

    def check_axioms(self):
        t = self.table
        n = len(self)
        if not all(sorted(row) == list(range(n)) for row in t.tolist()):
            return False
        ar = np.arange(n)
        left = t[t[:, :, None], ar[None, None, :]]
        right = t[ar[:, None, None], t[None, :, :]]
        return bool(np.array_equal(left, right))

    def element_order(self, i):
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def order_profile(self):
        return Counter(self.element_order(i) for i in range(len(self)))

    def class_profile(self):
        n = len(self)
        seen, sizes = set(), []
        for x in range(n):
            if x in seen:
                continue
            cls = {self.mul(self.mul(g, x), int(self.inverse[g])) for g in range(n)}
            seen |= cls
            sizes.append((self.element_order(x), len(cls)))
        return Counter(sizes)

    def generators(self):
        """Greedy small generating set, preferring high-order elements."""
        n = len(self)
        cands = sorted(range(n), key=lambda i: (-self.element_order(i), i))
        gens, span = [], {self.identity}
        for c in cands:
            if c in span:
                continue
            gens.append(c)
            span = self._span(gens)
            if len(span) == n:
                break
        return gens

    def _span(self, gens):
        span = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in span:
                    span.add(y)
                    queue.append(y)
        return span

    @classmethod
    def from_permutations(cls, perms, name=""):
        perms = sorted(tuple(p) for p in perms)
        index = {p: i for i, p in enumerate(perms)}
        n = len(perms)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(perms):
            for j, b in enumerate(perms):
                table[i, j] = index[perm_mul(a, b)]
        return cls(perms, table, name=name)

    @classmethod
    def cyclic(cls, n):
        t = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls([f"g{i}" for i in range(n)], t, name=f"Z{n}")

    @classmethod
    def symmetric(cls, n):
        return cls.from_permutations(itertools.permutations(range(n)), name=f"S{n}")

    @classmethod
    def direct_product(cls, g, h):
        els = [(a, b) for a in g.elements for b in h.elements]
        n, m = len(g), len(h)
        t = np.empty((n * m, n * m), dtype=np.int64)
        for i in range(n):
            for j in range(m):
                for k in range(n):
                    for l in range(m):
                        t[i * m + j, k * m + l] = g.table[i, k] * m + h.table[j, l]
        return cls(els, t, name=f"{g.name}x{h.name}")


def general_linear_group(n, q):
    """GL_n(F_q) for prime q, as matrices acting on row-major coordinate tuples."""
    vecs = list(itertools.product(range(q), repeat=n))
    mats = []
    for entries in itertools.product(range(q), repeat=n * n):
        m = [entries[i * n:(i + 1) * n] for i in range(n)]
        imgs = {tuple(sum(m[i][j] * v[j] for j in range(n)) % q for i in range(n)) for v in vecs}
        if len(imgs) == len(vecs):
            mats.append(tuple(entries))
    index = {v: i for i, v in enumerate(vecs)}
    perms = []
    for e in mats:
        m = [e[i * n:(i + 1) * n] for i in range(n)]
        perms.append(tuple(index[tuple(sum(m[i][j] * v[j] for j in range(n)) % q for i in range(n))] for v in vecs))
    return FiniteGroup.from_permutations(perms, name=f"GL{n}(F{q})")


@dataclass
class IsoResult:
    isomorphic: bool
    mapping: dict | None
    certificate: str

    def __bool__(self):
        return self.isomorphic


def groups_isomorphic(g1: FiniteGroup, g2: FiniteGroup, bound=DEFAULT_ORDER_BOUND) -> IsoResult:
    """Backtracking isomorphism search with order/conjugacy-class pruning.

    Returns an explicit index map g1 -> g2, or the invariant/exhaustion that
    rules one out.
    """
    if max(len(g1), len(g2)) > bound:
        raise CapacityError(f"groups_isomorphic: order exceeds {bound}")
    if len(g1) != len(g2):
        return IsoResult(False, None, f"orders differ: {len(g1)} vs {len(g2)}")
    if g1.order_profile() != g2.order_profile():
        return IsoResult(False, None, "element order statistics differ")
    if g1.class_profile() != g2.class_profile():
        return IsoResult(False, None, "conjugacy class statistics differ")
    gens = g1.generators()
    orders2 = {}
    for y in range(len(g2)):
        orders2.setdefault(g2.element_order(y), []).append(y)
    cands = [orders2.get(g1.element_order(x), []) for x in gens]
    tried = 0
    for images in itertools.product(*cands):
        tried += 1
        phi = _extend_hom(g1, g2, gens, images)
        if phi is not None:
            return IsoResult(True, phi, f"generator images found after {tried} candidates")
    return IsoResult(False, None, f"exhausted {tried} generator assignments")


def _extend_hom(g1, g2, gens, images):
    phi = {g1.identity: g2.identity}
    queue = deque([g1.identity])
    while queue:
        x = queue.popleft()
        for g, gi in zip(gens, images):
            y = g1.mul(x, g)
            val = g2.mul(phi[x], gi)
            if y in phi:
                if phi[y] != val:
                    return None
            else:
                phi[y] = val
                queue.append(y)
    if len(phi) != len(g1) or len(set(phi.values())) != len(g2):
        return None
    for a in range(len(g1)):
        for b in range(len(g1)):
            if phi[g1.mul(a, b)] != g2.mul(phi[a], phi[b]):
                return None
    return phi
