"""Ind- and pro-objects as explicit finite diagrams of finite sets.

Vertices are finite sets (tuples of hashable points, or ``DefObject``s whose
``elements`` are used). Chains ``Y_0 -> Y_1 -> ... -> Y_k`` are the main
case: with only finitely many stages, a property of the colimit is read "up
to level k", i.e. it is required to have stabilized between the last two
stages.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fincat import CategoryError, Cocone, FinCategory, SetDiagram, colimit_of_diagram, preorder_category


class OrientationError(ValueError):
    pass


@dataclass
class Verdict:
    ok: bool
    witness: object = None
    message: str = ""

    def __bool__(self):
        return self.ok


def elements(v):
    return tuple(v.elements) if hasattr(v, "elements") else tuple(v)


# ---------------------------------------------------------------- filtering


def check_filtering(i: FinCategory) -> Verdict:
    """Nonempty, any two objects map to a common one, parallel pairs are coequalized."""
    if not i.objects:
        return Verdict(False, (), "empty index category")
    for a, b in itertools.combinations_with_replacement(i.objects, 2):
        if not any(i.hom(a, c) and i.hom(b, c) for c in i.objects):
            return Verdict(False, ("objects", a, b), f"{a!r} and {b!r} have no common target")
    for a in i.objects:
        for b in i.objects:
            hs = i.hom(a, b)
            for f, g in itertools.combinations(hs, 2):
                if not any(i.comp(h, f) == i.comp(h, g) for c in i.objects for h in i.hom(b, c)):
                    return Verdict(False, ("parallel", f, g), f"{f!r} and {g!r} are never coequalized")
    return Verdict(True)


def check_cofiltering(i: FinCategory) -> Verdict:
    return check_filtering(i.opposite())


# ---------------------------------------------------------------- diagrams


@dataclass
class FilteredDiagram:
    """A diagram of finite sets over a (co)filtering index.

    For ``orientation == "ind"`` the diagram is covariant in the index; for
    ``"pro"`` the index is cofiltering and the diagram is still covariant in
    it (limits are taken).
    """

    index: FinCategory
    vertices: dict
    edges: dict  # index morphism -> dict on points
    orientation: str = "ind"
    name: str = ""

    def points(self, i):
        return elements(self.vertices[i])

    def validate(self):
        chk = check_filtering(self.index) if self.orientation == "ind" else check_cofiltering(self.index)
        if not chk.ok:
            return chk
        c = self.index
        for x in c.objects:
            e = self.edges[c.id(x)]
            if any(e[a] != a for a in self.points(x)):
                return Verdict(False, ("identity", x), "identity edge is not the identity")
        for (g, f), h in c.compose.items():
            for a in self.points(c.dom(f)):
                if self.edges[h][a] != self.edges[g][self.edges[f][a]]:
                    return Verdict(False, ("composition", g, f, a), "edges are not functorial")
        return Verdict(True)

    # chains
    @property
    def length(self):
        return len(self.index.objects)

    def stage(self, i):
        return self.points(i)

    def transition(self, i, j):
        """Composite transition stage i -> stage j (i <= j for ind, i >= j for pro)."""
        if i == j:
            return {a: a for a in self.stage(i)}
        m = self.index.hom(i, j)
        if not m:
            raise CategoryError(f"no index morphism {i}->{j}")
        return self.edges[m[0]]


def chain(stages, transitions, orientation="ind", name="chain"):
    """Chain diagram. ``transitions[i]`` maps stage i to stage i+1 (ind) or
    stage i+1 to stage i (pro)."""
    k = len(stages)
    if len(transitions) != max(k - 1, 0):
        raise ValueError("need one transition per consecutive pair of stages")
    if orientation == "ind":
        idx = preorder_category(range(k), lambda a, b: a <= b)
    elif orientation == "pro":
        idx = preorder_category(range(k), lambda a, b: a >= b)
    else:
        raise OrientationError(orientation)
    idx.name = f"chain{k}" if name == "chain" else f"chain:{name}"
    vertices = {i: stages[i] for i in range(k)}
    comps = {}
    for i in range(k):
        comps[(i, i)] = {a: a for a in elements(stages[i])}
        for j in range(i + 1, k):
            step = transitions[j - 1]
            if orientation == "ind":
                prev = comps[(i, j - 1)]
                comps[(i, j)] = {a: step[prev[a]] for a in elements(stages[i])}
    if orientation == "pro":
        # transitions[i]: stage i+1 -> stage i; comps[(j, i)] for j > i
        for i in range(k):
            for j in range(i + 1, k):
                below = comps[(j - 1, i)]
                comps[(j, i)] = {a: below[transitions[j - 1][a]] for a in elements(stages[j])}
    edges = {}
    for m in idx.morphisms:
        a, b = idx.ends(m)
        edges[m] = comps[(a, b)]
    return FilteredDiagram(idx, vertices, edges, orientation, name)


def constant_chain(stage, k=1, orientation="ind"):
    ident = {a: a for a in elements(stage)}
    return chain([stage] * k, [ident] * (k - 1), orientation)


# --------------------------------------------------------------- Hom formulas


def all_maps(x, y):
    xs, ys = elements(x), elements(y)
    return [tuple(t) for t in itertools.product(ys, repeat=len(xs))]


def hom_into_ind(x, y: FilteredDiagram, hom=None) -> Cocone:
    """colim_i Hom(x, y_i): classes of (level, map) pairs under refinement.

    Maps are tuples of images in the order of ``x``'s points. ``hom(x, v)``
    lists the admissible maps; all set maps by default.
    """
    if y.orientation != "ind":
        raise OrientationError("hom_into_ind needs an ind-oriented diagram")
    hom = hom or all_maps
    values = {i: tuple(hom(x, y.vertices[i])) for i in y.index.objects}
    maps = {m: {h: tuple(y.edges[m][b] for b in h) for h in values[y.index.dom(m)]} for m in y.index.morphisms}
    return colimit_of_diagram(SetDiagram(y.index, values, maps))


def hom_from_pro(x: FilteredDiagram, y, hom=None) -> Cocone:
    """colim_i Hom(x_i, y) over the opposite of the cofiltering index."""
    if x.orientation != "pro":
        raise OrientationError("hom_from_pro needs a pro-oriented diagram")
    hom = hom or all_maps
    op = x.index.opposite()
    values = {i: tuple(hom(x.vertices[i], y)) for i in op.objects}
    maps = {}
    for m in op.morphisms:
        # m: j -> i in op is x.edges[m]: x_i -> x_j ... precompose
        src_i, tgt_j = x.index.ends(m)  # edge x_src -> x_tgt
        pts_src = x.points(src_i)
        pos_t = {a: n for n, a in enumerate(x.points(tgt_j))}
        maps[m] = {h: tuple(h[pos_t[x.edges[m][a]]] for a in pts_src) for h in values[tgt_j]}
    return colimit_of_diagram(SetDiagram(op, values, maps))


def refines_to(y: FilteredDiagram, a, b):
    """Whether (level, point) pairs a and b agree in the colimit."""
    cc = hom_into_ind((None,), y, hom=lambda _x, v: [(p,) for p in elements(v)])
    la = cc.legs[a[0]][(a[1],)]
    lb = cc.legs[b[0]][(b[1],)]
    return la == lb


# ------------------------------------------------------- morphisms of chains


@dataclass
class IndMorphism:
    """Level-wise family f_i: X_i -> Y_i between chains of equal length."""

    source: FilteredDiagram
    target: FilteredDiagram
    data: dict  # level -> dict

    def check(self):
        k = self.source.length
        for i in range(k - 1):
            tx, ty = self.source.transition(i, i + 1), self.target.transition(i, i + 1)
            for a in self.source.stage(i):
                if ty[self.data[i][a]] != self.data[i + 1][tx[a]]:
                    return Verdict(False, (i, a), "compatibility square fails")
        return Verdict(True)


def is_base_morphism(f: IndMorphism) -> Verdict:
    """Whether f comes from one map between the colimits of compact ends.

    The map is read off the colimit cocones: every (level, point) class of
    the source must have a single image class.
    """
    for end in (f.source, f.target):
        if not is_compact(end).ok:
            return Verdict(False, end.name, "an end is not compact")
    one = (None,)
    points = lambda _x, v: [(p,) for p in elements(v)]
    cx = hom_into_ind(one, f.source, hom=points)
    cy = hom_into_ind(one, f.target, hom=points)
    h = {}
    for j in range(f.source.length):
        for a in f.source.stage(j):
            u = cx.legs[j][(a,)]
            v = cy.legs[j][(f.data[j][a],)]
            if h.setdefault(u, v) != v:
                return Verdict(False, (j, a), "stage maps disagree in the colimit")
    return Verdict(True, h)


def is_compact(y: FilteredDiagram) -> Verdict:
    """Compact up to the last level: the final transition is a bijection."""
    k = y.length
    if k <= 1:
        return Verdict(True)
    t = y.transition(k - 2, k - 1)
    last = y.stage(k - 1)
    img = {t[a] for a in y.stage(k - 2)}
    ok = len(img) == len(y.stage(k - 2)) == len(last)
    return Verdict(ok, None if ok else (k - 2, len(y.stage(k - 2)), len(last)), "" if ok else "last transition is not bijective")


def pullback_chain(f: IndMorphism, level: int, z, g: dict) -> FilteredDiagram:
    """Stages X_j x_{Y_j} Z for j >= level, where Z -> Y_level is ``g``."""
    x, y = f.source, f.target
    stages, trans = [], []
    for j in range(level, x.length):
        tz = y.transition(level, j)
        fiber = {}
        for a in x.stage(j):
            fiber.setdefault(f.data[j][a], []).append(a)
        xo = {a: i for i, a in enumerate(x.stage(j))}
        pts = [(xo[a], ci, a, c) for ci, c in enumerate(elements(z)) for a in fiber.get(tz[g[c]], ())]
        stages.append(tuple((a, c) for _, _, a, c in sorted(pts, key=lambda p: (p[0], p[1]))))
    for j in range(level, x.length - 1):
        tx = x.transition(j, j + 1)
        trans.append({(a, c): (tx[a], c) for a, c in stages[j - level]})
    return chain(stages, trans)


def is_stationary(y: FilteredDiagram) -> bool:
    """Every transition is a bijection."""
    for j in range(y.length - 1):
        t = y.transition(j, j + 1)
        if len(set(t.values())) != len(y.stage(j)) or len(y.stage(j)) != len(y.stage(j + 1)):
            return False
    return True


def stage_generators(y: FilteredDiagram):
    """Maps from compact objects used to probe ``y``: each stage into itself."""
    return [(i, y.stage(i), {a: a for a in y.stage(i)}) for i in range(max(y.length - 1, 1))]


def is_proper(f: IndMorphism, generators=None) -> Verdict:
    """Every probe Z -> Y has a pullback that is compact up to the last level."""
    gens = stage_generators(f.target) if generators is None else generators
    for level, z, g in gens:
        p = pullback_chain(f, level, z, g)
        c = is_compact(p)
        if not c.ok:
            sizes = [len(p.stage(j)) for j in range(p.length)]
            return Verdict(False, {"probe_level": level, "pullback_sizes": sizes}, "pullback is not compact")
    return Verdict(True)


def stage_inclusion(y: FilteredDiagram, i: int) -> IndMorphism:
    """Y_i (as a constant chain) -> Y."""
    k = y.length
    const = constant_chain(y.stage(i), k)
    data = {j: (y.transition(i, j) if j >= i else {a: a for a in y.stage(i)}) for j in range(k)}
    if i > 0:
        raise ValueError("stage inclusions are only levelwise for level 0; use the shifted chain")
    return IndMorphism(const, y, data)


def truncate(y: FilteredDiagram, start: int) -> FilteredDiagram:
    stages = [y.stage(j) for j in range(start, y.length)]
    trans = [y.transition(j, j + 1) for j in range(start, y.length - 1)]
    return chain(stages, trans, name=y.name or "chain")


def _is_strict(y: FilteredDiagram) -> Verdict:
    k = y.length
    if k <= 1:
        return Verdict(True)
    last = y.transition(k - 2, k - 1)
    for i in range(k - 1):
        t = y.transition(i, k - 2)
        img = {t[a] for a in y.stage(i)}
        seen = {}
        for b in sorted(img, key=repr):
            c = last[b]
            if c in seen:
                return Verdict(False, {"stage": i, "identified": (seen[c], b)}, "stage image is not mono into the last level")
            seen[c] = b
    return Verdict(True)


def _is_semi_strict(y: FilteredDiagram) -> Verdict:
    for i in range(max(y.length - 1, 1)):
        yi = truncate(y, i)
        v = is_proper(stage_inclusion(yi, 0))
        if not v.ok:
            return Verdict(False, {"stage": i, **v.witness}, v.message)
    return Verdict(True)


def classify_ind_object(y: FilteredDiagram):
    """'strict', 'semi-strict-only' or 'neither', with the two verdicts."""
    if y.orientation != "ind":
        raise OrientationError("classify_ind_object needs an ind-oriented diagram")
    s, ss = _is_strict(y), _is_semi_strict(y)
    label = "strict" if s.ok else ("semi-strict-only" if ss.ok else "neither")
    return label, {"strict": s, "semi_strict": ss}


def fiber_product_criterion(y: FilteredDiagram) -> Verdict:
    """Semi-strictness via properness of X x_Y Z -> X x Z for stage probes.

    For compact X, Z the product X x Z is compact, so the comparison is
    proper exactly when the fiber product chain is compact.
    """
    for i in range(max(y.length - 1, 1)):
        for i2 in range(i, max(y.length - 1, 1)):
            stages, trans = [], []
            for j in range(i2, y.length):
                ti, ti2 = y.transition(i, j), y.transition(i2, j)
                stages.append(tuple((a, b) for a in y.stage(i) for b in y.stage(i2) if ti[a] == ti2[b]))
            for j in range(len(stages) - 1):
                trans.append({p: p for p in stages[j]})
            # stages are subsets of one compact product; compact iff stable
            if len(stages) > 1 and set(stages[-2]) != set(stages[-1]):
                return Verdict(False, {"stages": (i, i2)}, "fiber product keeps growing")
    return Verdict(True)


# ------------------------------------------------------------- Bi(X, Y)


def bi_ind_object(d, x, y, levels: int, pool=None, cap=100_000) -> FilteredDiagram:
    """Invertible maps x -> y, stage j = pairs (h, h') of j-parameter maps
    with h' h = id and h h' = id; points of stage j are such pairs."""
    from .presheaves import internal_hom_chain

    hxy = internal_hom_chain(d, x, y, levels, pool=pool, cap=cap)
    hyx = internal_hom_chain(d, y, x, levels, pool=pool, cap=cap)
    xs, ys = list(x.elements), list(y.elements)
    px = {e: i for i, e in enumerate(xs)}
    py = {e: i for i, e in enumerate(ys)}
    stages = []
    for j in range(levels + 1):
        inv = {}
        for h2 in hyx[j]:
            inv[h2] = True
        st = []
        for h in sorted(hxy[j]):
            if len(set(h)) != len(xs) or len(xs) != len(ys):
                continue
            back = [None] * len(ys)
            for i, b in enumerate(h):
                back[py[b]] = xs[i]
            back = tuple(back)
            if back in inv:
                st.append((h, back))
        stages.append(tuple(st))
    trans = [{p: p for p in stages[j]} for j in range(levels)]
    return chain(stages, trans, name=f"Bi({x.name},{y.name})")


def global_points(y: FilteredDiagram):
    """Points of the colimit of a chain: the distinct classes of the last stage."""
    cc = hom_into_ind((None,), y, hom=lambda _x, v: [(p,) for p in elements(v)])
    return cc.apex
