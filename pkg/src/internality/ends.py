"""Ends of set-valued bifunctors and the groups of natural automorphisms they produce.

An end of ``S: C^op x C -> Set`` is the limit of its twisted diagram: one
vertex S(X, X) per object, one vertex S(X, Y) per morphism f: X -> Y, and
edges S(X, f), S(f, Y). For ``S = Hom(F-, G-)`` this is Nat(F, G).

For functors into finite sets given concretely (points plus generating maps)
the end is solved element by element as a constraint problem; this is what
turns a truncated category of definable sets into a finite group.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fincat import (
    DEFAULT_CAP,
    CapacityError,
    CategoryError,
    FinCategory,
    FunctorData,
    SetDiagram,
    _Budget,
    limit_of_diagram,
)
from .groups import FiniteGroup, groups_isomorphic, perm_mul

# ------------------------------------------------------------------ bifunctors


@dataclass
class Bifunctor:
    """S: C^op x C -> Set. ``act(f, g, s)`` is S(f, g)(s) for f: X' -> X,
    g: Y -> Y', sending S(X, Y) to S(X', Y')."""

    category: FinCategory
    values: dict  # (X, Y) -> tuple
    act: object
    name: str = ""


def hom_bifunctor(F: FunctorData, G: FunctorData) -> Bifunctor:
    """(X, Y) -> Hom_D(F X, G Y), acting by G(g) . h . F(f)."""
    if F.source is not G.source or F.target is not G.target:
        if F.source.objects != G.source.objects or F.target.objects != G.target.objects:
            raise CategoryError("hom_bifunctor: functors must share source and target")
    c, d = F.source, F.target
    values = {(x, y): d.hom(F(x), G(y)) for x in c.objects for y in c.objects}

    def act(f, g, h):
        return d.comp(G.fmap(g), d.comp(h, F.fmap(f)))

    return Bifunctor(c, values, act, name=f"Hom({F.name},{G.name})")


def twisted_diagram(s: Bifunctor) -> SetDiagram:
    """Vertices ('d', X) and ('m', f); objects interleaved so that the limit
    search checks each morphism vertex right after its endpoints."""
    c = s.category
    order, placed = [], set()
    mors = [f for f in c.morphisms]
    for x in c.objects:
        order.append(("d", x))
        placed.add(x)
        for f in mors:
            a, b = c.ends(f)
            if x in (a, b) and a in placed and b in placed:
                order.append(("m", f))
    objs = order
    morphisms, ident, comp = [], {}, {}
    for o in objs:
        morphisms.append((("id", o), o, o))
        ident[o] = ("id", o)
        comp[(("id", o), ("id", o))] = ("id", o)
    values, maps = {}, {}
    for o in objs:
        if o[0] == "d":
            values[o] = s.values[(o[1], o[1])]
        else:
            values[o] = s.values[c.ends(o[1])]
        maps[("id", o)] = {v: v for v in values[o]}
    for f in mors:
        a, b = c.ends(f)
        lf, rf = ("l", f), ("r", f)
        morphisms.append((lf, ("d", a), ("m", f)))
        morphisms.append((rf, ("d", b), ("m", f)))
        for e in (lf, rf):
            src = ("d", a) if e is lf else ("d", b)
            comp[(e, ("id", src))] = e
            comp[(("id", ("m", f)), e)] = e
        # S(X, f): S(X, X) -> S(X, Y) and S(f, Y): S(Y, Y) -> S(X, Y)
        maps[lf] = {v: s.act(c.id(a), f, v) for v in values[("d", a)]}
        maps[rf] = {v: s.act(f, c.id(b), v) for v in values[("d", b)]}
    idx = FinCategory(objs, morphisms, ident, comp, name=f"tw({c.name})")
    return SetDiagram(idx, values, maps)


@dataclass
class EndResult:
    families: list  # each: dict object -> element of S(X, X)
    diagram: SetDiagram

    def __len__(self):
        return len(self.families)


def end_of_bifunctor(s: Bifunctor, cap: int = DEFAULT_CAP) -> EndResult:
    d = twisted_diagram(s)
    cone = limit_of_diagram(d, cap=cap)
    objs = list(d.index.objects)
    fams = []
    for fam in cone.apex:
        fams.append({o[1]: v for o, v in zip(objs, fam) if o[0] == "d"})
    return EndResult(fams, d)


def check_wedge(s: Bifunctor, family: dict):
    """None if the family is a wedge, else the offending morphism."""
    c = s.category
    for f in c.morphisms:
        a, b = c.ends(f)
        if s.act(c.id(a), f, family[a]) != s.act(f, c.id(b), family[b]):
            return f
    return None


# ---------------------------------------------------- concrete diagrams + CSP


@dataclass
class ConcreteDiagram:
    """A functor into finite sets presented by points and generating maps.

    ``maps`` is a list of (source, target, dict); naturality is imposed along
    each of them (and hence along every composite). A dict defined on part of
    the source stands for a map out of that subobject. ``fixed`` objects must
    carry the identity component.
    """

    objects: dict  # name -> tuple of points
    maps: list
    fixed: frozenset = frozenset()

    @classmethod
    def from_set_diagram(cls, sd: SetDiagram, fixed=()):
        objs = {x: tuple(sd.values[x]) for x in sd.index.objects}
        maps = [(sd.index.dom(m), sd.index.cod(m), sd.maps[m]) for m in sd.index.morphisms]
        return cls(objs, maps, frozenset(fixed))

    def restrict(self, names):
        keep = set(names)
        return ConcreteDiagram(
            {k: v for k, v in self.objects.items() if k in keep},
            [m for m in self.maps if m[0] in keep and m[1] in keep],
            frozenset(self.fixed & keep),
        )


def natural_families(diagram: ConcreteDiagram, invertible=False, copies=None, cap: int = DEFAULT_CAP):
    """All natural families sigma_X, canonical order.

    Without ``copies`` each sigma_X: F(X) -> F(X). With ``copies = T`` (a
    tuple of parameter points) each component is T x F(X) -> F(X), natural in
    X only; this is the end computing End_T(F). ``invertible`` asks every
    induced endomorphism (t, x) -> (t, sigma(t, x)) to be a bijection.

    A family is a dict name -> tuple of images in point order (indexed by
    (t, point) pairs, t-major, when ``copies`` is given).
    """
    names = list(diagram.objects)
    ts = tuple(copies) if copies is not None else (None,)
    pos = {x: {p: i for i, p in enumerate(diagram.objects[x])} for x in names}
    # variables: (x, t, i)
    var_index, domains = {}, []
    for x in names:
        pts = diagram.objects[x]
        for ti in range(len(ts)):
            for i in range(len(pts)):
                var_index[(x, ti, i)] = len(domains)
                domains.append((x, ti))
    nvar = len(domains)
    # maps may be partial (defined on a subobject, e.g. one orbit); the
    # subobject must then be preserved by the component
    touch = {x: [[] for _ in diagram.objects[x]] for x in names}
    for src, dst, table in diagram.maps:
        tab = [-1] * len(diagram.objects[src])
        for p, v in table.items():
            tab[pos[src][p]] = pos[dst][v]
        for i, t in enumerate(tab):
            if t >= 0:
                touch[src][i].append((dst, tab))
    assign = [-1] * nvar
    used = {(x, ti): set() for x in names for ti in range(len(ts))}
    budget = _Budget(cap, "natural_families")
    results = []

    def setvar(v, val, trail):
        """Assign and propagate; False on conflict."""
        stack = [(v, val)]
        while stack:
            v, val = stack.pop()
            cur = assign[v]
            if cur >= 0:
                if cur != val:
                    return False
                continue
            x, ti = domains[v]
            if invertible:
                if val in used[(x, ti)]:
                    return False
                used[(x, ti)].add(val)
            assign[v] = val
            trail.append(v)
            i = v - var_index[(x, ti, 0)]
            for dst, tab in touch[x][i]:
                if tab[val] < 0:
                    return False
                stack.append((var_index[(dst, ti, tab[i])], tab[val]))
        return True

    def undo(trail):
        for v in trail:
            x, ti = domains[v]
            if invertible:
                used[(x, ti)].discard(assign[v])
            assign[v] = -1

    root = []
    ok = True
    for x in names:
        if x in diagram.fixed:
            for ti in range(len(ts)):
                for i in range(len(diagram.objects[x])):
                    ok = ok and setvar(var_index[(x, ti, i)], i, root)
    if not ok:
        return []

    def rec(start):
        v = start
        while v < nvar and assign[v] >= 0:
            v += 1
        if v == nvar:
            results.append(_family(diagram, names, ts, var_index, assign))
            return
        x, _ = domains[v]
        for val in range(len(diagram.objects[x])):
            budget.tick()
            trail = []
            if setvar(v, val, trail):
                rec(v + 1)
            undo(trail)

    rec(0)
    return results


def _family(diagram, names, ts, var_index, assign):
    fam = {}
    for x in names:
        pts = diagram.objects[x]
        fam[x] = tuple(pts[assign[var_index[(x, ti, i)]]] for ti in range(len(ts)) for i in range(len(pts)))
    return fam


def family_permutation(diagram: ConcreteDiagram, family: dict, names=None):
    """A family of bijections as one permutation of the concatenated points."""
    names = list(diagram.objects) if names is None else names
    perm, offset = [], 0
    for x in names:
        pts = diagram.objects[x]
        p = {q: i for i, q in enumerate(pts)}
        perm.extend(offset + p[family[x][i]] for i in range(len(pts)))
        offset += len(pts)
    return tuple(perm)


# ----------------------------------------------------------- End_T and Aut_T


@dataclass
class EndMonoid:
    """Natural families T x F => F with the composition (s.t)(u, x) = s(u, t(u, x))."""

    diagram: ConcreteDiagram
    copies: tuple
    families: list

    def __len__(self):
        return len(self.families)

    def compose(self, a, b):
        d, ts = self.diagram, self.copies
        out = {}
        for x, pts in d.objects.items():
            n = len(pts)
            p = {q: i for i, q in enumerate(pts)}
            out[x] = tuple(a[x][ti * n + p[b[x][ti * n + i]]] for ti in range(len(ts)) for i in range(n))
        return out

    def table(self):
        keys = [_key(f) for f in self.families]
        index = {k: i for i, k in enumerate(keys)}
        return [[index[_key(self.compose(a, b))] for b in self.families] for a in self.families]

    def identity(self):
        d = self.diagram
        return {x: tuple(pts) * len(self.copies) for x, pts in d.objects.items()}


def _key(fam):
    return tuple(sorted((k, v) for k, v in fam.items()))


def end_presheaf_End(diagram: ConcreteDiagram, copies=((),), cap: int = DEFAULT_CAP) -> EndMonoid:
    """End_T(F) for T given by its points ``copies``."""
    fams = natural_families(diagram, invertible=False, copies=copies, cap=cap)
    return EndMonoid(diagram, tuple(copies), fams)


def end_presheaf_Aut(diagram: ConcreteDiagram, copies=((),), cap: int = DEFAULT_CAP) -> EndMonoid:
    """Aut_T(F): invertible elements of End_T(F), fixing the ``fixed`` objects."""
    fams = natural_families(diagram, invertible=True, copies=copies, cap=cap)
    return EndMonoid(diagram, tuple(copies), fams)


# ---------------------------------------------------------------- pro-groups


@dataclass
class ProGroup:
    """Inverse system of finite groups G_0 <- G_1 <- ... from a subcategory schedule."""

    levels: list  # FiniteGroup per level
    families: list  # per level: list of families, aligned with group elements
    diagrams: list  # ConcreteDiagram per level
    transitions: list  # transitions[a]: element index at level a+1 -> index at level a
    stable_level: int | None
    partial: bool = False

    @property
    def orders(self):
        return [len(g) for g in self.levels]

    @property
    def top(self):
        return self.levels[-1]

    def transition_is_iso(self, a):
        t = self.transitions[a]
        return len(set(t)) == len(t) == len(self.levels[a])


def assemble_pro_group(diagram: ConcreteDiagram, schedule, cap: int = DEFAULT_CAP, stop_when_stable=False) -> ProGroup:
    """Groups of natural automorphisms of ``diagram`` restricted to each
    object set in ``schedule`` (an increasing list of name lists).

    The transition from level a+1 to level a restricts families; it must land
    in level a (restriction of a natural family is natural). The system is
    stable at the first level after which transitions are isomorphisms.
    """
    levels, fams_all, diags, trans = [], [], [], []
    stable = None
    for a, names in enumerate(schedule):
        sub = diagram.restrict(names)
        fams = natural_families(sub, invertible=True, cap=cap)
        perms = [family_permutation(sub, f) for f in fams]
        order = sorted(range(len(perms)), key=lambda i: perms[i])
        fams = [fams[i] for i in order]
        perms = [perms[i] for i in order]
        group = FiniteGroup.from_permutations(perms, name=f"G{a}")
        if a:
            prev_names = list(diags[-1].objects)
            prev_index = {_key({k: f[k] for k in prev_names}): i for i, f in enumerate(fams_all[-1])}
            t = []
            for f in fams:
                k = _key({x: f[x] for x in prev_names})
                if k not in prev_index:
                    raise CategoryError(f"level {a}: restriction of a family is not a level {a - 1} family")
                t.append(prev_index[k])
            trans.append(t)
            if stable is None and len(set(t)) == len(t) == len(fams_all[-1]):
                stable = a - 1
            elif stable is not None and not (len(set(t)) == len(t) == len(fams_all[-1])):
                stable = None
        levels.append(group)
        fams_all.append(fams)
        diags.append(sub)
        if stop_when_stable and stable is not None:
            break
    return ProGroup(levels, fams_all, diags, trans, stable, partial=stable is None)


def global_sections(pro: ProGroup, conjugators, level=-1):
    """Elements of a level fixed under conjugation by the given point actions.

    ``conjugators`` are dicts name -> permutation of that object's points
    (the action of the automorphisms whose invariants count as "global").
    A family sigma is global when p . sigma_X . p^-1 = sigma_X for all p.
    """
    d = pro.diagrams[level]
    out = []
    for i, fam in enumerate(pro.families[level]):
        ok = True
        for p in conjugators:
            for x, pts in d.objects.items():
                px = p[x]
                idx = {q: n for n, q in enumerate(pts)}
                sig = [idx[v] for v in fam[x]]
                for n in range(len(pts)):
                    if px[sig[n]] != sig[px[n]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append(i)
    return out
