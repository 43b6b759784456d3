"""Presheaves, internal homs and the quotient criterion for ind-closedness.

Two settings are covered. For an explicit ``FinCategory`` everything is
computed from the tables (products found by their universal property, the
internal-hom index category materialized and tested for filtering). For a
``DefCategory`` the internal hom out of ``X`` into ``Y`` at stage ``Z`` is the
set of invariant maps ``Z x X -> Y``; ind-closedness reduces to the existence
of quotients of the kernel relations of those maps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .defsets import EXTRA, BOOL, DefCategory, DefFunctor, DefMorphism, DefObject, PreconditionError, act, ext
from .fincat import DEFAULT_CAP, CapacityError, CategoryError, FinCategory, _Budget

# ------------------------------------------------------------------ presheaves


@dataclass
class Presheaf:
    """Contravariant set-valued functor on a ``FinCategory``.

    ``restrict[f]`` for ``f: X -> Y`` maps ``values[Y]`` to ``values[X]``.
    """

    base: FinCategory
    values: dict
    restrict: dict
    name: str = ""

    def __call__(self, x):
        return self.values[x]


def validate_presheaf(p: Presheaf):
    """None if functorial, else (law, witness)."""
    c = p.base
    for x in c.objects:
        r = p.restrict[c.id(x)]
        if any(r[a] != a for a in p.values[x]):
            return ("identity", (x,))
    for (g, f), gf in c.compose.items():
        rg, rf, rgf = p.restrict[g], p.restrict[f], p.restrict[gf]
        for a in p.values[c.cod(g)]:
            if rgf[a] != rf[rg[a]]:
                return ("composition", (g, f, a))
    return None


def yoneda_presheaf(c: FinCategory, x) -> Presheaf:
    """Hom(-, x); restriction along f is precomposition."""
    values = {z: c.hom(z, x) for z in c.objects}
    restrict = {f: {h: c.comp(h, f) for h in values[c.cod(f)]} for f in c.morphisms}
    return Presheaf(c, values, restrict, name=f"y({x})")


def presheaf_maps(p: Presheaf, q: Presheaf, cap: int = DEFAULT_CAP):
    """All natural transformations p => q, as dicts object -> component dict."""
    c = p.base
    objs = list(c.objects)
    pos = {x: i for i, x in enumerate(objs)}
    checks = {}
    for f in c.morphisms:
        x, y = c.ends(f)
        checks.setdefault(max(pos[x], pos[y]), []).append((f, x, y))
    budget = _Budget(cap, "presheaf_maps")
    out = []

    def rec(k, comps):
        if k == len(objs):
            out.append(dict(comps))
            return
        x = objs[k]
        dom, cod = p.values[x], q.values[x]
        for imgs in itertools.product(cod, repeat=len(dom)):
            budget.tick()
            comps[x] = dict(zip(dom, imgs))
            ok = True
            for f, a, b in checks.get(k, ()):
                # q(f) . eta_b == eta_a . p(f)
                for s in p.values[b]:
                    if q.restrict[f][comps[b][s]] != comps[a][p.restrict[f][s]]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                rec(k + 1, comps)
        comps.pop(x, None)

    rec(0, {})
    return out


@dataclass
class YonedaReport:
    ok: bool
    size: int
    witness: object = None
    message: str = ""


def check_yoneda_lemma(p: Presheaf, x, cap: int = DEFAULT_CAP) -> YonedaReport:
    """Nat(y(x), p) -> p(x), eta -> eta_x(id_x), checked bijective.

    Natural transformations are enumerated independently of the inverse
    formula a -> (h -> p(h)(a)), and the two are compared.
    """
    c = p.base
    yx = yoneda_presheaf(c, x)
    nats = presheaf_maps(yx, p, cap=cap)
    ix = c.id(x)
    images = [eta[x][ix] for eta in nats]
    if sorted(map(repr, images)) != sorted(map(repr, p.values[x])):
        return YonedaReport(False, len(nats), witness=images, message="evaluation at identity is not bijective")
    for eta in nats:
        a = eta[x][ix]
        for z in c.objects:
            for h in yx.values[z]:
                if eta[z][h] != p.restrict[h][a]:
                    return YonedaReport(False, len(nats), witness=(z, h), message="inverse formula disagrees")
    return YonedaReport(True, len(nats))


def check_yoneda_embedding(c: FinCategory, cap: int = DEFAULT_CAP) -> YonedaReport:
    """Hom(x, x') -> Nat(y x, y x') by postcomposition is bijective for all pairs."""
    for x in c.objects:
        for x2 in c.objects:
            nats = presheaf_maps(yoneda_presheaf(c, x), yoneda_presheaf(c, x2), cap=cap)
            via = sorted(repr({z: {h: c.comp(f, h) for h in c.hom(z, x)} for z in c.objects}) for f in c.hom(x, x2))
            if via != sorted(map(repr, nats)):
                return YonedaReport(False, len(nats), witness=(x, x2), message="not fully faithful")
    return YonedaReport(True, len(c.objects))


# ------------------------------------------------------------ products (tables)


def find_product(c: FinCategory, x, y):
    """A product (P, p1, p2) of x and y found by its universal property, or None."""
    for p in c.objects:
        for p1 in c.hom(p, x):
            for p2 in c.hom(p, y):
                if _is_product(c, p, p1, p2, x, y):
                    return (p, p1, p2)
    return None


def _is_product(c, p, p1, p2, x, y):
    for w in c.objects:
        pairs = {}
        for h in c.hom(w, p):
            key = (c.comp(p1, h), c.comp(p2, h))
            if key in pairs:
                return False
            pairs[key] = h
        if len(pairs) != len(c.hom(w, x)) * len(c.hom(w, y)):
            return False
    return True


def pairing(c: FinCategory, prod, f, g):
    p, p1, p2 = prod
    for h in c.hom(c.dom(f), p):
        if c.comp(p1, h) == f and c.comp(p2, h) == g:
            return h
    raise CategoryError("pairing: no mediating morphism")


def internal_hom_presheaf(c: FinCategory, x, y) -> Presheaf:
    """Z -> Hom(Z x X, Y), restriction along u: Z' -> Z is precomposition with u x id."""
    prods = {}
    for z in c.objects:
        pr = find_product(c, z, x)
        if pr is None:
            raise PreconditionError(f"no product of {z!r} and {x!r}", witness=(z, x))
        prods[z] = pr
    values = {z: c.hom(prods[z][0], y) for z in c.objects}
    restrict = {}
    for u in c.morphisms:
        z2, z = c.ends(u)
        p2, a2, b2 = prods[z2]
        uxid = pairing(c, prods[z], c.comp(u, a2), b2)
        restrict[u] = {h: c.comp(h, uxid) for h in values[z]}
    return Presheaf(c, values, restrict, name=f"[{x},{y}]")


def grothendieck_index(c: FinCategory, x, y, cap: int = DEFAULT_CAP) -> FinCategory:
    """Index category of the internal-hom system: objects (Z, phi: Z x X -> Y)."""
    p = internal_hom_presheaf(c, x, y)
    objs = [(z, h) for z in c.objects for h in p.values[z]]
    if len(objs) > cap:
        raise CapacityError("grothendieck_index: too many objects")
    mors, ident = [], {}
    for (z2, h2) in objs:
        for (z, h) in objs:
            for u in c.hom(z2, z):
                if p.restrict[u][h] == h2:
                    mors.append(((u, h2, h), (z2, h2), (z, h)))
    for (z, h) in objs:
        ident[(z, h)] = (c.id(z), h, h)
    comp = {}
    by_dom = {}
    for m, d, cd in mors:
        by_dom.setdefault(d, []).append(m)
    for f, d, cd in mors:
        for g in by_dom.get(cd, ()):
            comp[(g, f)] = (c.comp(g[0], f[0]), f[1], g[2])
    return FinCategory(objs, mors, ident, comp, name=f"El[{x},{y}]")


# ----------------------------------------------------- definable internal homs


def internal_hom_value(d: DefCategory, z: DefObject, x: DefObject, y: DefObject, cap=100_000):
    """Invariant maps Z x X -> Y (the stage-Z value of the internal hom)."""
    zx = d.product(z, x)
    return zx, d.invariant_maps(zx, y, cap=cap)


def curry(z: DefObject, x: DefObject, phi: DefMorphism):
    """phi: Z x X -> Y as {z: tuple of images in x's order}."""
    w = z.width
    return {a: tuple(phi.table[a + b] for b in x.elements) for a in z.elements}


def _orbits_under(perms, elements, base):
    """Orbit partition of ``elements`` under an explicit list of extended perms."""
    if not elements:
        return []
    arr = np.asarray(elements, dtype=np.int64).reshape(len(elements), len(elements[0]))
    gens = np.asarray(perms, dtype=np.int64)
    labels = _kernels.orbit_labels(gens, arr, base)
    groups = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(elements[i])
    return [tuple(v) for _, v in sorted(groups.items())]


def maps_invariant_under(perms, base, x: DefObject, y: DefObject, cap=100_000):
    """Maps x -> y commuting with every perm in ``perms`` (extended perms).

    Returned as tuples of images in x's element order.
    """
    perms = [tuple(p) for p in perms]
    orbits = _orbits_under(perms, list(x.elements), base)
    index = {e: i for i, e in enumerate(x.elements)}
    blocks, total = [], 1
    for orb in orbits:
        rep = orb[0]
        stab = [p for p in perms if act(p, rep) == rep]
        cands = [e for e in y.elements if all(act(p, e) == e for p in stab)]
        total *= len(cands)
        if total > cap:
            raise CapacityError(f"maps {x.name}->{y.name}: more than {cap}")
        trans = {}
        for p in perms:
            trans.setdefault(act(p, rep), p)
        slots = [index[e] for e in orb]
        # images of the whole orbit for each choice of image of the rep
        blocks.append((slots, [[act(trans[e], c) for e in orb] for c in cands]))
    out = []
    img = [None] * len(x.elements)
    for choice in itertools.product(*(b[1] for b in blocks)):
        for (slots, _), vals in zip(blocks, choice):
            for i, v in zip(slots, vals):
                img[i] = v
        out.append(tuple(img))
    return out


def _stabilizer_keys(d: DefCategory, j: int, pool):
    """For k = 0..j, the distinct stabilizers of k-tuples from ``pool`` (as
    sets of perm indices), each listed at the first k where it occurs."""
    n = d.structure.N
    perms = [ext(p, n) for p in d.group.perms]
    seen, per_level = set(), []
    for k in range(0, j + 1):
        if k == 0:
            reps = [()]
        else:
            tuples = list(itertools.product(pool, repeat=k))
            reps = [o[0] for o in _orbits_under(perms, tuples, d.base)] if tuples else []
        new = []
        for z in reps:
            key = frozenset(i for i, p in enumerate(perms) if act(p, z) == z)
            if key not in seen:
                seen.add(key)
                new.append(key)
        per_level.append(new)
    return perms, per_level


def _maps_for_key(d, perms, key, x, y, cap):
    maps = maps_invariant_under([perms[i] for i in sorted(key)], d.base, x, y, cap=cap)
    if _is_normal(perms, key):
        return set(maps)
    # conjugates of these maps are invariant under the conjugate stabilizers
    index = {e: i for i, e in enumerate(x.elements)}
    closed = set()
    for h in maps:
        for p in perms:
            g = [None] * len(h)
            for i, e in enumerate(x.elements):
                g[index[act(p, e)]] = act(p, h[i])
            closed.add(tuple(g))
        if len(closed) > cap:
            raise CapacityError("hom_stage: too many maps")
    return closed


def _is_normal(perms, key):
    index = {p: i for i, p in enumerate(perms)}
    for g in perms:
        ginv = [0] * len(g)
        for i, v in enumerate(g):
            ginv[v] = i
        for i in key:
            conj = tuple(g[perms[i][ginv[t]]] for t in range(len(g)))
            if index[conj] not in key:
                return False
    return True


def internal_hom_chain(d: DefCategory, x: DefObject, y: DefObject, levels: int, pool=None, cap=100_000):
    """Stages 0..levels of the hom ind-object: stage j holds the maps x -> y
    definable with at most j parameters from ``pool`` (default: all points).

    Parameters are taken up to the group action; maps invariant under a
    stabilizer depend only on the stabilizer, and conjugating by the group
    accounts for the other tuples in the orbit.
    """
    pool = sorted(range(d.structure.N) if pool is None else pool)
    perms, per_level = _stabilizer_keys(d, levels, pool)
    stages, cur = [], set()
    for keys in per_level:
        for key in keys:
            cur |= _maps_for_key(d, perms, key, x, y, cap)
            if len(cur) > cap:
                raise CapacityError("internal_hom_chain: too many maps")
        stages.append(frozenset(cur))
    return stages


def hom_stage(d: DefCategory, x: DefObject, y: DefObject, j: int, pool=None, cap=100_000):
    """Maps x -> y definable with at most ``j`` parameters drawn from ``pool``."""
    return set(internal_hom_chain(d, x, y, j, pool=pool, cap=cap)[j])


# ----------------------------------------------------------------- quotients


class QuotientFailure(Exception):
    """No definable quotient exists for some class-orbits of a relation."""

    def __init__(self, message, missing_classes, witness):
        super().__init__(message)
        self.missing_classes = missing_classes
        self.witness = witness


@dataclass
class Quotient:
    source: DefObject
    target: DefObject
    table: dict  # source element -> target element
    classes: list
    witnesses: list = field(default_factory=list)  # (object name, element) per class-orbit

    def kernel(self):
        return {(a, b) for a in self.source.elements for b in self.source.elements if self.table[a] == self.table[b]}


def _classes_from(x, related):
    if callable(related):
        classes = []
        for e in x.elements:
            for cl in classes:
                if related(cl[0], e):
                    cl.append(e)
                    break
            else:
                classes.append([e])
        return [tuple(c) for c in classes]
    # explicit partition
    return [tuple(c) for c in related]


def extract_quotient(d: DefCategory, x: DefObject, related) -> Quotient:
    """Realize X/E as a definable set, or raise ``QuotientFailure``.

    ``related`` is a predicate on pairs or an explicit list of classes. A
    class-orbit has a quotient exactly when some point ``w`` of an object of
    ``d`` has stabilizer equal to the setwise stabilizer of a class; ``w`` is
    the image of (X, chi_E) under a morphism of the internal-hom system for
    (X, 2), and its orbit is the quotient of that class-orbit. The result is
    the tagged union over class-orbits.
    """
    classes = _classes_from(x, related)
    where = {}
    for i, cl in enumerate(classes):
        for e in cl:
            if e in where:
                raise PreconditionError("classes overlap", witness=e)
            where[e] = i
    if len(where) != len(x.elements):
        raise PreconditionError("classes do not cover the object", witness=x.name)
    arr = d.group.array
    nperm = len(arr)
    # action on class indices
    class_img = np.empty((nperm, len(classes)), dtype=np.int64)
    for pi, p in enumerate(arr):
        for i, cl in enumerate(classes):
            j = where.get(act(p, cl[0]))
            if j is None or any(where.get(act(p, e)) != j for e in cl):
                raise PreconditionError("relation is not invariant", witness=(cl[0], pi))
            class_img[pi, i] = j
    orbit_of, corbits = {}, []
    for i in range(len(classes)):
        if i in orbit_of:
            continue
        members = sorted(set(class_img[:, i].tolist()))
        for j in members:
            orbit_of[j] = len(corbits)
        corbits.append(members)
    if len(corbits) >= EXTRA:
        raise CapacityError(f"extract_quotient: {len(corbits)} class-orbits exceed {EXTRA - 1} tags")
    n = d.structure.N
    table, witnesses, missing, first_missing = {}, [], [], None
    found = []
    for t, members in enumerate(corbits):
        rep = members[0]
        setwise = class_img[:, rep] == rep
        hit = _witness_with_stabilizer(d, setwise)
        if hit is None:
            missing.extend(classes[i] for i in members)
            if first_missing is None:
                first_missing = classes[rep]
            continue
        found.append((t, rep, members, hit))
    if missing:
        raise QuotientFailure(
            f"no definable quotient for {len(missing)} classes of {x.name}", missing, first_missing
        )
    width = max((len(w) for _, _, _, (_, w) in found), default=0)
    elements = []
    for t, rep, members, (oname, w) in found:
        witnesses.append((oname, w))
        for i in members:
            pi = int(np.nonzero(class_img[:, rep] == i)[0][0])
            q = (n + 1 + t,) + act(arr[pi], w) + (n,) * (width - len(w))
            for e in classes[i]:
                table[e] = q
        elements.extend(sorted({table[classes[i][0]] for i in members}))
    target = DefObject(f"{x.name}/E", ("#",) + ("?",) * width, tuple(elements))
    return Quotient(x, target, table, classes, witnesses)


def _witness_with_stabilizer(d: DefCategory, mask):
    for obj in d.objects:
        if "#o" in obj.name:
            continue
        for w in obj.elements:
            if np.array_equal(d.stabilizer_mask(w), mask):
                return (obj.name, w)
    return None


# ------------------------------------------------------------ ind-closedness


@dataclass
class IndClosedReport:
    ok: bool
    checked: int
    witness: dict | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_ind_closed(c, pairs=None, generators=None, cap=100_000) -> IndClosedReport:
    """Whether every internal-hom system over the given pairs is filtered.

    For a ``FinCategory`` the index category of each system is built and
    tested directly. For a ``DefCategory`` each invariant ``phi: Z x X -> Y``
    must have a definable quotient of its kernel relation on ``Z``; a failure
    is reported with (Z, phi, classes) and the pair of projections that has
    no coequalizing morphism in the system.
    """
    if isinstance(c, FinCategory):
        from .indpro import check_filtering

        pairs = pairs or [(a, b) for a in c.objects for b in c.objects]
        for x, y in pairs:
            try:
                idx = grothendieck_index(c, x, y)
            except PreconditionError as exc:
                return IndClosedReport(False, 0, {"pair": (x, y), "missing_product": exc.witness}, str(exc))
            rep = check_filtering(idx)
            if not rep.ok:
                return IndClosedReport(False, len(pairs), {"pair": (x, y), "index": rep.witness}, rep.message)
        return IndClosedReport(True, len(pairs))
    d: DefCategory = c
    sorts = [o for o in d.objects if "#o" not in o.name and o.name not in ("1",)]
    if pairs is None:
        base = [o for o in sorts if len(o.sorts) == 1]
        pairs = [(o, d.bool) for o in base if o is not d.bool] + [
            (o, o2) for o in base for o2 in base if o is not d.bool and o2 is not d.bool
        ]
    if generators is None:
        generators = [o for o in sorts if o is not d.bool]
    checked = 0
    for x, y in pairs:
        for z in generators:
            zx, maps = internal_hom_value(d, z, x, y, cap=cap)
            for phi in maps:
                checked += 1
                cur = curry(z, x, phi)
                inv = {}
                for a in z.elements:
                    inv.setdefault(cur[a], []).append(a)
                classes = list(inv.values())
                if len(classes) == len(z.elements):
                    continue
                try:
                    extract_quotient(d, z, classes)
                except QuotientFailure as exc:
                    return IndClosedReport(
                        False,
                        checked,
                        {
                            "pair": (x.name, y.name),
                            "stage": z.name,
                            "map": phi,
                            "classes": classes,
                            "unmatched_class": exc.witness,
                            "parallel_pair": ("pr1", "pr2"),
                        },
                        f"kernel of a map {z.name} x {x.name} -> {y.name} has no quotient",
                    )
    return IndClosedReport(True, checked)


# ------------------------------------------------- closed functor comparison


@dataclass
class ComparisonResult:
    ok: bool
    level: int
    failures: list
    witness: object = None

    def __bool__(self):
        return self.ok


class _Transporter:
    """h -> F(h) for maps x -> y given as image tuples, cached."""

    def __init__(self, functor: DefFunctor, x, y):
        fx = functor(x)
        pos = {e: i for i, e in enumerate(fx.elements)}
        self.slots = [pos.get(functor.on_points(x, a)) for a in x.elements]
        self.ok = None not in self.slots and len(set(self.slots)) == len(fx.elements) == len(x.elements)
        self.ymap = {b: functor.on_points(y, b) for b in y.elements}
        self.cache = {}

    def __call__(self, h):
        if h not in self.cache:
            out = [None] * len(h)
            for i, b in zip(self.slots, h):
                out[i] = self.ymap[b]
            self.cache[h] = tuple(out)
        return self.cache[h]


def closed_functor_comparison(functor: DefFunctor, x: DefObject, y: DefObject, level: int, slack: int = 0,
                              source_pool=None, target_pool=None, cap=100_000) -> ComparisonResult:
    """Compare F applied to the hom chain of (x, y) with the hom chain of (Fx, Fy).

    Up to ``level`` the comparison is an isomorphism of ind-objects when F is
    injective on maps and each side's stage j lands in the other's stage
    j + slack. Stage j means "definable with at most j parameters".
    """
    src, tgt = functor.source, functor.target
    top = level + slack
    s_chain = internal_hom_chain(src, x, y, top, pool=source_pool, cap=cap)
    t_chain = internal_hom_chain(tgt, functor(x), functor(y), top, pool=target_pool, cap=cap)
    tr = _Transporter(functor, x, y)
    if not tr.ok:
        return ComparisonResult(False, level, ["transport"], x.name)
    failures, witness = [], None
    images = {}
    for h in s_chain[top]:
        fh = tr(h)
        if fh in images and images[fh] != h:
            failures.append("injectivity")
            witness = witness or (images[fh], h)
        images[fh] = h
    for j in range(level + 1):
        fs = {tr(h) for h in s_chain[j]}
        extra = fs - t_chain[min(j + slack, top)]
        if extra:
            failures.append(f"source stage {j} leaves target stage {j + slack}")
            witness = witness or sorted(extra)[0]
            break
        fs_slack = {tr(h) for h in s_chain[min(j + slack, top)]}
        miss = t_chain[j] - fs_slack
        if miss:
            failures.append(f"target stage {j} not reached by source stage {j + slack}")
            witness = witness or sorted(miss)[0]
            break
    return ComparisonResult(not failures, level, failures, witness)


def check_left_exact(functor: DefFunctor, objects):
    """Terminal and binary products of ``objects`` are preserved (pointwise)."""
    src = functor.source
    t = functor(src.terminal)
    if len(t.elements) != 1:
        return ("terminal", src.terminal.name)
    for x in objects:
        for y in objects:
            p = src.product(x, y)
            fp = {functor.on_points(x, a) + functor.on_points(y, b) for a in x.elements for b in y.elements}
            if len(fp) != len(x.elements) * len(y.elements):
                return ("product", (x.name, y.name))
    return None
