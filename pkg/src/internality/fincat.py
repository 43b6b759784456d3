"""Finite categories, functors, natural transformations, finite (co)limits of sets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable

import numpy as np

from . import _kernels

DEFAULT_CAP = 10**7


class CategoryError(ValueError):
    """Malformed category/functor data."""


class CapacityError(RuntimeError):
    """A search exceeded its configured bound."""


class _Budget:
    def __init__(self, cap, what):
        self.cap = cap
        self.what = what
        self.used = 0

    def tick(self, n=1):
        self.used += n
        if self.used > self.cap:
            raise CapacityError(f"{self.what}: more than {self.cap} candidate assignments")


class FinCategory:
    """A finite category given by explicit tables.

    ``compose[(g, f)]`` is ``g . f`` and is defined exactly when
    ``cod(f) == dom(g)``. Morphism identity is nominal.
    """

    def __init__(self, objects, morphisms, identity, compose, name=""):
        self.name = name
        self.objects = tuple(objects)
        self.morphisms = tuple(m for m, _, _ in morphisms)
        self._ends = {m: (d, c) for m, d, c in morphisms}
        self.identity = dict(identity)
        self.compose = dict(compose)
        self._check_structure()
        self._homs: dict = {}
        for m in self.morphisms:
            self._homs.setdefault(self._ends[m], []).append(m)

    def _check_structure(self):
        objs = set(self.objects)
        if len(objs) != len(self.objects):
            raise CategoryError(f"{self.name}: duplicate object identifiers")
        if len(set(self.morphisms)) != len(self.morphisms):
            raise CategoryError(f"{self.name}: duplicate morphism identifiers")
        for m, (d, c) in self._ends.items():
            if d not in objs or c not in objs:
                raise CategoryError(f"{self.name}: morphism {m!r} references unknown object")
        for x in self.objects:
            if x not in self.identity:
                raise CategoryError(f"{self.name}: object {x!r} has no identity entry")
        for x, i in self.identity.items():
            if x not in objs or i not in self._ends:
                raise CategoryError(f"{self.name}: identity entry {x!r}->{i!r} undeclared")
        for (g, f), h in self.compose.items():
            for m in (g, f, h):
                if m not in self._ends:
                    raise CategoryError(f"{self.name}: compose entry ({g!r},{f!r})->{h!r} undeclared")

    # accessors
    def dom(self, f):
        return self._ends[f][0]

    def cod(self, f):
        return self._ends[f][1]

    def id(self, x):
        return self.identity[x]

    def comp(self, g, f):
        return self.compose[(g, f)]

    def hom(self, x, y):
        return tuple(self._homs.get((x, y), ()))

    def ends(self, f):
        return self._ends[f]

    def __len__(self):
        return len(self.morphisms)

    def __repr__(self):
        return f"FinCategory({self.name!r}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def opposite(self):
        return FinCategory(
            self.objects,
            [(m, c, d) for m, (d, c) in self._ends.items()],
            self.identity,
            {(f, g): h for (g, f), h in self.compose.items()},
            name=f"{self.name}^op",
        )

    def product(self, other):
        objs = [(x, y) for x in self.objects for y in other.objects]
        mors = [
            ((f, g), (self.dom(f), other.dom(g)), (self.cod(f), other.cod(g)))
            for f in self.morphisms
            for g in other.morphisms
        ]
        ident = {(x, y): (self.id(x), other.id(y)) for x, y in objs}
        comp = {}
        for (f2, f1), h in self.compose.items():
            for (g2, g1), k in other.compose.items():
                comp[((f2, g2), (f1, g1))] = (h, k)
        return FinCategory(objs, mors, ident, comp, name=f"{self.name}x{other.name}")

    def full_subcategory(self, objects):
        keep = set(objects)
        mors = [(m, d, c) for m, (d, c) in self._ends.items() if d in keep and c in keep]
        names = {m for m, _, _ in mors}
        comp = {k: v for k, v in self.compose.items() if k[0] in names and k[1] in names}
        return FinCategory(
            [x for x in self.objects if x in keep],
            mors,
            {x: self.identity[x] for x in keep},
            comp,
            name=f"{self.name}|{len(keep)}",
        )


# ------------------------------------------------------------ constructors


def terminal_category():
    return FinCategory(["*"], [("id*", "*", "*")], {"*": "id*"}, {("id*", "id*"): "id*"}, name="1")


def empty_category():
    return FinCategory([], [], {}, {}, name="0")


def discrete_category(objects):
    objects = list(objects)
    return FinCategory(
        objects,
        [(f"id_{x}", x, x) for x in objects],
        {x: f"id_{x}" for x in objects},
        {(f"id_{x}", f"id_{x}"): f"id_{x}" for x in objects},
        name=f"disc{len(objects)}",
    )


def monoid_category(elements, mult, unit, name="M"):
    """One-object category; ``mult[(a, b)] = a*b`` becomes ``compose(a, b)``."""
    elements = list(elements)
    return FinCategory(
        ["*"],
        [(e, "*", "*") for e in elements],
        {"*": unit},
        {(a, b): mult[(a, b)] for a in elements for b in elements},
        name=name,
    )


def cyclic_group_category(n):
    els = [f"g{i}" for i in range(n)]
    mult = {(f"g{i}", f"g{j}"): f"g{(i + j) % n}" for i in range(n) for j in range(n)}
    return monoid_category(els, mult, "g0", name=f"Z{n}")


def preorder_category(objects, leq):
    """Thin category; ``leq`` must be reflexive and transitive."""
    objects = list(objects)
    mors, comp = [], {}
    for x in objects:
        for y in objects:
            if leq(x, y):
                mors.append((f"{x}<{y}", x, y))
    for x, y, z in itertools.product(objects, repeat=3):
        if leq(x, y) and leq(y, z):
            comp[(f"{y}<{z}", f"{x}<{y}")] = f"{x}<{z}"
    return FinCategory(objects, mors, {x: f"{x}<{x}" for x in objects}, comp, name="poset")


def concrete_category(sets, generators, max_morphisms=64, name="conc"):
    """Category of finite sets generated under composition by ``generators``.

    ``sets`` maps object -> size; ``generators`` is a list of
    (dom, cod, tuple image). Morphisms are extensional (tuple images).
    """
    mors = {}
    for x, n in sets.items():
        mors[(x, x, tuple(range(n)))] = None
    frontier = [(d, c, tuple(img)) for d, c, img in generators]
    while frontier:
        new = []
        for m in frontier:
            if m in mors:
                continue
            mors[m] = None
            if len(mors) > max_morphisms:
                raise CapacityError(f"{name}: closure exceeds {max_morphisms} morphisms")
            for other in list(mors):
                if other[1] == m[0]:
                    new.append((other[0], m[1], tuple(m[2][i] for i in other[2])))
                if m[1] == other[0]:
                    new.append((m[0], other[1], tuple(other[2][i] for i in m[2])))
        frontier = new
    keys = sorted(mors, key=lambda m: (str(m[0]), str(m[1]), m[2]))
    label = {m: f"{m[0]}>{m[1]}:{''.join(map(str, m[2]))}" for m in keys}
    comp = {}
    for f in keys:
        for g in keys:
            if f[1] == g[0]:
                h = (f[0], g[1], tuple(g[2][i] for i in f[2]))
                comp[(label[g], label[f])] = label[h]
    ident = {x: label[(x, x, tuple(range(n)))] for x, n in sets.items()}
    return FinCategory(list(sets), [(label[m], m[0], m[1]) for m in keys], ident, comp, name=name)


# ------------------------------------------------------------- validation


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    law: str = ""
    witness: tuple = ()
    message: str = ""

    def __bool__(self):
        return self.ok


def validate_category(c: FinCategory) -> ValidationReport:
    """Check typing, unit and associativity laws; first violation wins."""
    for f in c.morphisms:
        for g in c.morphisms:
            defined = (g, f) in c.compose
            if defined != (c.cod(f) == c.dom(g)):
                return ValidationReport(False, "typing", (f, g), f"compose({g},{f}) defined={defined}")
            if defined:
                h = c.compose[(g, f)]
                if c.ends(h) != (c.dom(f), c.cod(g)):
                    return ValidationReport(False, "typing", (f, g, h), "composite has wrong endpoints")
    for x in c.objects:
        i = c.id(x)
        if c.ends(i) != (x, x):
            return ValidationReport(False, "identity", (i,), f"identity of {x} is not an endomorphism")
    for f in c.morphisms:
        if c.comp(f, c.id(c.dom(f))) != f or c.comp(c.id(c.cod(f)), f) != f:
            return ValidationReport(False, "identity", (f,), f"unit law fails for {f}")
    index = {m: i for i, m in enumerate(c.morphisms)}
    table = np.full((len(index), len(index)), -1, dtype=np.int64)
    for (g, f), h in c.compose.items():
        table[index[g], index[f]] = index[h]
    f, g, h = _kernels.first_assoc_violation(table)
    if f >= 0:
        ms = c.morphisms
        return ValidationReport(False, "associativity", (ms[f], ms[g], ms[h]), "h.(g.f) != (h.g).f")
    return ValidationReport(True)


# --------------------------------------------------------------- functors


@dataclass
class FunctorData:
    source: FinCategory
    target: FinCategory
    on_objects: dict
    on_morphisms: dict
    name: str = ""

    def __call__(self, x):
        return self.on_objects[x]

    def fmap(self, f):
        return self.on_morphisms[f]

    def key(self):
        return (
            tuple(self.on_objects[x] for x in self.source.objects),
            tuple(self.on_morphisms[m] for m in self.source.morphisms),
        )


def validate_functor(F: FunctorData) -> ValidationReport:
    s, t = F.source, F.target
    for f in s.morphisms:
        d, c = s.ends(f)
        if t.ends(F.fmap(f)) != (F(d), F(c)):
            return ValidationReport(False, "typing", (f,), "image has wrong endpoints")
    for x in s.objects:
        if F.fmap(s.id(x)) != t.id(F(x)):
            return ValidationReport(False, "identity", (x,), "identity not preserved")
    for (g, f), h in s.compose.items():
        if t.comp(F.fmap(g), F.fmap(f)) != F.fmap(h):
            return ValidationReport(False, "composition", (f, g), "composition not preserved")
    return ValidationReport(True)


def identity_functor(c):
    return FunctorData(c, c, {x: x for x in c.objects}, {m: m for m in c.morphisms}, name="Id")


def compose_functors(G, F):
    return FunctorData(
        F.source,
        G.target,
        {x: G(F(x)) for x in F.source.objects},
        {m: G.fmap(F.fmap(m)) for m in F.source.morphisms},
        name=f"{G.name}{F.name}",
    )


def enumerate_functors(c: FinCategory, d: FinCategory, cap: int = DEFAULT_CAP):
    """All functors c -> d in canonical (declaration-lexicographic) order."""
    budget = _Budget(cap, "enumerate_functors")
    non_id = [m for m in c.morphisms if m not in set(c.identity.values())]
    # composites to check once both factors are assigned
    checks = {}
    for (g, f), h in c.compose.items():
        checks.setdefault(max(_pos(non_id, g), _pos(non_id, f), _pos(non_id, h)), []).append((g, f, h))
    out = []
    for objmap in itertools.product(d.objects, repeat=len(c.objects)):
        budget.tick()
        ob = dict(zip(c.objects, objmap))
        mor = {c.id(x): d.id(ob[x]) for x in c.objects}
        if not _check_level(checks.get(-1, ()), mor, d):
            continue
        _extend_functor(c, d, ob, mor, non_id, 0, checks, out, budget)
    return out


def _pos(seq, m):
    try:
        return seq.index(m)
    except ValueError:
        return -1


def _check_level(items, mor, d):
    for g, f, h in items:
        if d.comp(mor[g], mor[f]) != mor[h]:
            return False
    return True


def _extend_functor(c, d, ob, mor, non_id, k, checks, out, budget):
    if k == len(non_id):
        out.append(FunctorData(c, d, dict(ob), dict(mor)))
        return
    m = non_id[k]
    dd, cc = c.ends(m)
    for cand in d.hom(ob[dd], ob[cc]):
        budget.tick()
        mor[m] = cand
        if _check_level(checks.get(k, ()), mor, d):
            _extend_functor(c, d, ob, mor, non_id, k + 1, checks, out, budget)
    mor.pop(m, None)


@dataclass
class NatTransData:
    source_functor: FunctorData
    target_functor: FunctorData
    components: dict

    def key(self):
        return tuple(self.components[x] for x in self.source_functor.source.objects)


def is_natural(F, G, components):
    c, d = F.source, F.target
    for f in c.morphisms:
        x, y = c.ends(f)
        if d.comp(G.fmap(f), components[x]) != d.comp(components[y], F.fmap(f)):
            return False
    return True


def enumerate_nat_transformations(F: FunctorData, G: FunctorData, cap: int = DEFAULT_CAP):
    """All natural transformations F => G, components chosen in object order."""
    if F.source is not G.source or F.target is not G.target:
        raise CategoryError("functors must share source and target")
    c, d = F.source, F.target
    budget = _Budget(cap, "enumerate_nat_transformations")
    objs = list(c.objects)
    pos = {x: i for i, x in enumerate(objs)}
    # naturality squares become checkable once both endpoints are chosen
    squares = {}
    for f in c.morphisms:
        x, y = c.ends(f)
        squares.setdefault(max(pos[x], pos[y]), []).append((f, x, y))
    out = []

    def rec(k, comps):
        if k == len(objs):
            out.append(NatTransData(F, G, dict(comps)))
            return
        x = objs[k]
        for cand in d.hom(F(x), G(x)):
            budget.tick()
            comps[x] = cand
            if all(
                d.comp(G.fmap(f), comps[a]) == d.comp(comps[b], F.fmap(f)) for f, a, b in squares.get(k, ())
            ):
                rec(k + 1, comps)
        comps.pop(x, None)

    rec(0, {})
    return out


def vertical_compose(t: NatTransData, s: NatTransData) -> NatTransData:
    """``t . s`` for s: F => G and t: G => H."""
    d = s.source_functor.target
    comps = {x: d.comp(t.components[x], s.components[x]) for x in s.components}
    return NatTransData(s.source_functor, t.target_functor, comps)


def identity_transformation(F):
    return NatTransData(F, F, {x: F.target.id(F(x)) for x in F.source.objects})


# ------------------------------------------------------ finite set limits

FinSetObject = tuple  # distinct elements in canonical order


@dataclass
class SetDiagram:
    """A functor from a finite index category to finite sets.

    ``maps[m]`` is a dict from elements of ``values[dom m]`` to
    ``values[cod m]``.
    """

    index: FinCategory
    values: dict
    maps: dict

    def apply(self, m, a):
        return self.maps[m][a]


@dataclass
class Cone:
    apex: FinSetObject
    legs: dict  # object -> {apex element: vertex element}


def limit_of_diagram(d: SetDiagram, cap: int = DEFAULT_CAP) -> Cone:
    """Compatible families, as tuples ordered like ``d.index.objects``."""
    objs = list(d.index.objects)
    if not objs:
        return Cone(((),), {})
    budget = _Budget(cap, "limit_of_diagram")
    pos = {x: i for i, x in enumerate(objs)}
    incoming = {x: [] for x in objs}
    checks = {}
    for m in d.index.morphisms:
        x, y = d.index.ends(m)
        if x == y and m == d.index.id(x):
            continue
        incoming[y].append((m, x))
        checks.setdefault(max(pos[x], pos[y]), []).append((m, x, y))
    families = []

    def rec(k, fam):
        if k == len(objs):
            families.append(tuple(fam[x] for x in objs))
            return
        y = objs[k]
        forced = [d.apply(m, fam[x]) for m, x in incoming[y] if pos[x] < k]
        cands = [forced[0]] if forced else d.values[y]
        for v in cands:
            budget.tick()
            fam[y] = v
            if all(d.apply(m, fam[a]) == fam[b] for m, a, b in checks.get(k, ())):
                rec(k + 1, fam)
        fam.pop(y, None)

    rec(0, {})
    legs = {x: {fam: fam[i] for fam in families} for i, x in enumerate(objs)}
    return Cone(tuple(families), legs)


def certify_limit(d: SetDiagram, cone: Cone, bound: int = 10**6) -> bool:
    """Exhaustive check: the cone's apex is exactly the compatible families."""
    objs = list(d.index.objects)
    total = 1
    for x in objs:
        total *= len(d.values[x])
    if total > bound:
        raise CapacityError(f"certify_limit: product of size {total} exceeds {bound}")
    compatible = []
    for fam in itertools.product(*(d.values[x] for x in objs)):
        env = dict(zip(objs, fam))
        if all(d.apply(m, env[d.index.dom(m)]) == env[d.index.cod(m)] for m in d.index.morphisms):
            compatible.append(tuple(fam))
    if sorted(map(repr, compatible)) != sorted(map(repr, cone.apex)):
        return False
    for fam in cone.apex:
        for i, x in enumerate(objs):
            if cone.legs[x][fam] != fam[i]:
                return False
    return True


@dataclass
class Cocone:
    apex: FinSetObject  # class representatives (object, element)
    legs: dict  # object -> {vertex element: apex element}


def colimit_of_diagram(d: SetDiagram) -> Cocone:
    """Tagged disjoint union modulo the equivalence generated by the edges."""
    nodes = [(x, a) for x in d.index.objects for a in d.values[x]]
    idx = {n: i for i, n in enumerate(nodes)}
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in d.index.morphisms:
        x, y = d.index.ends(m)
        for a in d.values[x]:
            i, j = find(idx[(x, a)]), find(idx[(y, d.apply(m, a))])
            if i != j:
                parent[max(i, j)] = min(i, j)
    reps = {}
    for n in nodes:
        reps.setdefault(find(idx[n]), nodes[find(idx[n])])
    legs = {x: {a: nodes[find(idx[(x, a)])] for a in d.values[x]} for x in d.index.objects}
    return Cocone(tuple(reps[r] for r in sorted(reps)), legs)


def image_factorization(f: dict, domain=None, codomain=None):
    """Split a set map as ``f = inj . surj``; the image keeps codomain order."""
    domain = tuple(f) if domain is None else tuple(domain)
    hit = set(f[a] for a in domain)
    order = tuple(codomain) if codomain is not None else tuple(sorted(hit, key=repr))
    image = tuple(b for b in order if b in hit)
    surj = {a: f[a] for a in domain}
    inj = {b: b for b in image}
    return surj, image, inj
