"""Finite structures and their categories of definable (= invariant) sets.

Elements of a structure get global indices (declaration order, sort by
sort). Every permutation used here is extended by ``EXTRA`` fixed slots past
the last element: slot ``N`` pads short tuples and slots ``N+1..`` serve as
coproduct tags, so tagged unions live in the same encoding as products.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fincat import CapacityError
from .groups import FiniteGroup, perm_closure, perm_inv, perm_mul

BOOL = "2"
TRUE, FALSE = "true", "false"
EXTRA = 64
DEFAULT_ARITY = 3


class StructureError(ValueError):
    pass


class PreconditionError(ValueError):
    """An operation was called outside its stated precondition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------- structures


class FinStructure:
    """Multi-sorted finite structure.

    ``functions[name] = (arg_sorts, result_sort, {arg_labels: result_label})``,
    ``relations[name] = (sorts, set of label tuples)`` and
    ``constants[name] = (sort, label)``. A two-element sort ``"2"`` with
    constants ``true``/``false`` is always present.
    """

    def __init__(self, sorts, functions=None, relations=None, constants=None, name="M"):
        self.name = name
        self.sorts = {s: list(els) for s, els in sorts.items()}
        self.functions = dict(functions or {})
        self.relations = {k: (tuple(v[0]), set(map(tuple, v[1]))) for k, v in (relations or {}).items()}
        self.constants = dict(constants or {})
        if BOOL not in self.sorts:
            self.sorts[BOOL] = [FALSE, TRUE]
            self.constants.setdefault(FALSE, (BOOL, FALSE))
            self.constants.setdefault(TRUE, (BOOL, TRUE))
        self._index()
        self._validate()

    def _index(self):
        self.gids = {}
        self.elements = []
        for s, els in self.sorts.items():
            if len(set(els)) != len(els):
                raise StructureError(f"sort {s!r} has repeated elements")
            for e in els:
                self.gids[(s, e)] = len(self.elements)
                self.elements.append((s, e))
        self.N = len(self.elements)
        self.sort_range = {}
        for s in self.sorts:
            ids = [self.gids[(s, e)] for e in self.sorts[s]]
            self.sort_range[s] = ids

    def gid(self, sort, label):
        try:
            return self.gids[(sort, label)]
        except KeyError:
            raise StructureError(f"unknown element {label!r} of sort {sort!r}") from None

    def label(self, g):
        if g >= self.N:
            return "_" if g == self.N else f"#{g - self.N}"
        return self.elements[g][1]

    def sort_of(self, g):
        return self.elements[g][0]

    def _validate(self):
        for name, (args, res, table) in self.functions.items():
            for s in (*args, res):
                if s not in self.sorts:
                    raise StructureError(f"function {name!r} references undeclared sort {s!r}")
            for key in itertools.product(*(self.sorts[s] for s in args)):
                if key not in table:
                    raise StructureError(f"function {name!r} is not total: missing {key!r}")
                if table[key] not in self.sorts[res]:
                    raise StructureError(f"function {name!r}: value {table[key]!r} outside sort {res!r}")
        for name, (srts, tuples) in self.relations.items():
            for s in srts:
                if s not in self.sorts:
                    raise StructureError(f"relation {name!r} references undeclared sort {s!r}")
            for t in tuples:
                if len(t) != len(srts):
                    raise StructureError(f"relation {name!r}: tuple {t!r} has wrong arity")
                for s, e in zip(srts, t):
                    self.gid(s, e)
        for name, (s, e) in self.constants.items():
            self.gid(s, e)

    def symbol_rows(self):
        """Each symbol as an int array of gid rows (graphs for functions)."""
        out = {}
        for name, (args, res, table) in self.functions.items():
            rows = [
                [self.gid(s, a) for s, a in zip(args, key)] + [self.gid(res, table[key])]
                for key in itertools.product(*(self.sorts[s] for s in args))
            ]
            out["f:" + name] = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(args) + 1)
        for name, (srts, tuples) in self.relations.items():
            rows = sorted([self.gid(s, e) for s, e in zip(srts, t)] for t in tuples)
            out["r:" + name] = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(srts))
        for name, (s, e) in self.constants.items():
            out["c:" + name] = np.asarray([[self.gid(s, e)]], dtype=np.int64)
        return out

    def reduct(self, sorts, name=None):
        """Restriction to ``sorts`` and the symbols living entirely inside them."""
        keep = set(sorts) | {BOOL}
        for s in keep:
            if s not in self.sorts:
                raise StructureError(f"reduct names unknown sort {s!r}")
        fns = {k: v for k, v in self.functions.items() if set(v[0]) | {v[1]} <= keep}
        rels = {k: v for k, v in self.relations.items() if set(v[0]) <= keep}
        consts = {k: v for k, v in self.constants.items() if v[0] in keep}
        return FinStructure(
            {s: self.sorts[s] for s in self.sorts if s in keep}, fns, rels, consts, name=name or f"{self.name}0"
        )

    def expand(self, sorts=None, relations=None, name=None):
        new_sorts = dict(self.sorts)
        new_sorts.update(sorts or {})
        rels = dict(self.relations)
        rels.update(relations or {})
        return FinStructure(new_sorts, self.functions, rels, self.constants, name=name or self.name)

    def canonical(self):
        """Plain-data form with row-major function tables, declaration order."""
        return {
            "name": self.name,
            "sorts": {s: list(e) for s, e in self.sorts.items() if s != BOOL},
            "functions": {
                k: {
                    "args": list(a),
                    "result": r,
                    "table": [t[key] for key in itertools.product(*(self.sorts[s] for s in a))],
                }
                for k, (a, r, t) in self.functions.items()
            },
            "relations": {k: {"sorts": list(s), "tuples": sorted(map(list, t))} for k, (s, t) in self.relations.items()},
            "constants": {k: [s, e] for k, (s, e) in self.constants.items() if s != BOOL},
        }


def ext(perm, n):
    """Extend a permutation of ``range(n)`` by the fixed padding/tag slots."""
    return tuple(perm) + tuple(range(n, n + EXTRA))


class AutGroup:
    """A group of automorphisms, stored as all its permutations of gids."""

    def __init__(self, structure, perms):
        self.structure = structure
        self.perms = sorted(tuple(p) for p in perms)
        n = structure.N
        self.array = np.asarray([ext(p, n) for p in self.perms], dtype=np.int64).reshape(len(self.perms), n + EXTRA)
        self.identity = tuple(range(n))

    @property
    def order(self):
        return len(self.perms)

    def __len__(self):
        return len(self.perms)

    def generators(self):
        """Greedy generating set in canonical order."""
        if not hasattr(self, "_gens"):
            gens, span = [], {self.identity}
            for p in self.perms:
                if p in span:
                    continue
                gens.append(p)
                span = set(perm_closure(gens, self.structure.N, bound=len(self.perms)))
                if len(span) == len(self.perms):
                    break
            self._gens = gens
        return self._gens

    def as_finite_group(self, name=""):
        if not hasattr(self, "_fg"):
            self._fg = FiniteGroup.from_permutations(self.perms, name=name or f"Aut({self.structure.name})")
        return self._fg

    def stabilizer(self, points):
        pts = list(points)
        return AutGroup(self.structure, [p for p in self.perms if all(p[x] == x for x in pts)])

    def fixed_points(self):
        n = self.structure.N
        return {g for g in range(n) if all(p[g] == g for p in self.perms)}


def automorphism_group(m: FinStructure, fixed=()) -> AutGroup:
    """All sort-preserving permutations preserving every symbol.

    Backtracking over gids in order; a symbol row is checked as soon as all
    its entries are assigned. ``fixed`` gids are pinned.
    """
    rows_by_last = {}
    for rows in m.symbol_rows().values():
        table = set(map(tuple, rows.tolist()))
        for r in rows.tolist():
            rows_by_last.setdefault(max(r), []).append((tuple(r), table))
    fixed = set(fixed)
    n = m.N
    img = [None] * n
    used = set()
    out = []

    def rec(g):
        if g == n:
            out.append(tuple(img))
            return
        sort_ids = m.sort_range[m.sort_of(g)]
        cands = [g] if g in fixed else sort_ids
        for c in cands:
            if c in used:
                continue
            img[g] = c
            if all(tuple(img[x] for x in r) in table for r, table in rows_by_last.get(g, ())):
                used.add(c)
                rec(g + 1)
                used.discard(c)
        img[g] = None

    rec(0)
    return AutGroup(m, out)


# ------------------------------------------------------------ parameter sets


@dataclass
class ParameterSet:
    structure: FinStructure
    elements: frozenset  # gids
    closed: bool = False

    @classmethod
    def from_labels(cls, m, pairs):
        return cls(m, frozenset(m.gid(s, e) for s, e in pairs))

    def labels(self):
        return sorted((self.structure.sort_of(g), self.structure.label(g)) for g in self.elements)


def definable_closure(m: FinStructure, a: ParameterSet, group: AutGroup | None = None) -> ParameterSet:
    """dcl(A): the points fixed by every automorphism fixing A pointwise."""
    group = group or automorphism_group(m)
    stab = group.stabilizer(a.elements)
    return ParameterSet(m, frozenset(stab.fixed_points()), closed=True)


# ------------------------------------------------------------------ objects


@dataclass(frozen=True)
class DefObject:
    name: str
    sorts: tuple
    elements: tuple  # equal-length tuples of extended gids

    def __len__(self):
        return len(self.elements)

    @property
    def width(self):
        return len(self.elements[0]) if self.elements else len(self.sorts)

    def array(self):
        return np.asarray(self.elements, dtype=np.int64).reshape(len(self.elements), self.width)


def act(perm, elem):
    return tuple(perm[e] for e in elem)


@dataclass
class DefMorphism:
    source: DefObject
    target: DefObject
    table: dict
    name: str = ""

    def __call__(self, x):
        return self.table[x]


class DefCategory:
    """Invariant subsets of sort products (up to an arity bound) and invariant maps.

    ``group`` defaults to Aut(M); passing a stabilizer gives the category of
    sets definable over parameters. Objects are the full sort products and,
    when ``orbit_objects`` is set, each of their orbits.
    """

    def __init__(self, m: FinStructure, arity=DEFAULT_ARITY, group: AutGroup | None = None,
                 orbit_objects=True, max_size=4096, max_orbits=64, sorts=None, name=None):
        self.structure = m
        self.group = group if group is not None else automorphism_group(m)
        self.arity = arity
        self.max_size = max_size
        self.name = name or f"Def({m.name},n={arity})"
        self.base = m.N + EXTRA
        self._gens = np.asarray(
            [ext(p, m.N) for p in self.group.generators()] or [ext(range(m.N), m.N)], dtype=np.int64
        )
        self._stab_cache = {}
        self._orbit_cache = {}
        self.objects = []
        self.by_name = {}
        use_sorts = [s for s in (sorts or m.sorts) if s != BOOL or sorts is not None]
        self.terminal = self.add_object(DefObject("1", (), ((),)))
        self.bool = self.add_object(self.sort_product((BOOL,)))
        for k in range(1, arity + 1):
            for combo in itertools.product(use_sorts, repeat=k):
                obj = self.sort_product(combo)
                if len(obj) > max_size or obj.name in self.by_name:
                    continue
                self.add_object(obj)
                if orbit_objects:
                    orbs = self.orbits(obj)
                    if 1 < len(orbs) <= max_orbits:
                        for o in orbs:
                            self.add_object(o)

    # construction helpers
    def sort_product(self, sorts):
        m = self.structure
        els = tuple(itertools.product(*(m.sort_range[s] for s in sorts)))
        return DefObject("x".join(sorts) if sorts else "1", tuple(sorts), els)

    def add_object(self, obj, check=True):
        if obj.name in self.by_name:
            return self.by_name[obj.name]
        if check and not self.is_invariant(obj.elements):
            raise PreconditionError(f"object {obj.name} is not invariant", witness=obj.name)
        self.objects.append(obj)
        self.by_name[obj.name] = obj
        return obj

    def subobject(self, parent, elements, name):
        keep = set(elements)
        return DefObject(name, parent.sorts, tuple(e for e in parent.elements if e in keep))

    def product(self, x, y, name=None):
        els = tuple(a + b for a in x.elements for b in y.elements)
        return DefObject(name or f"({x.name})x({y.name})", x.sorts + y.sorts, els)

    # group-theoretic queries
    def orbits(self, obj):
        """Orbit decomposition in canonical order (by smallest member)."""
        if obj.name in self._orbit_cache:
            return self._orbit_cache[obj.name]
        if len(obj) == 0:
            return []
        labels = _kernels.orbit_labels(self._gens, obj.array(), self.base)
        groups = {}
        for i, lab in enumerate(labels.tolist()):
            groups.setdefault(lab, []).append(obj.elements[i])
        out = [
            DefObject(f"{obj.name}#o{k}", obj.sorts, tuple(members))
            for k, (_, members) in enumerate(sorted(groups.items()))
        ]
        self._orbit_cache[obj.name] = out
        return out

    def is_invariant(self, elements):
        els = list(elements)
        if not els:
            return True
        rows = np.asarray(els, dtype=np.int64).reshape(len(els), len(els[0]))
        return bool(_kernels.preserves_rows(self._gens, rows, self.base).all())

    def stabilizer_mask(self, elem):
        if elem not in self._stab_cache:
            arr = self.group.array
            idx = list(elem)
            self._stab_cache[elem] = np.all(arr[:, idx] == np.asarray(idx, dtype=np.int64), axis=1) if idx else np.ones(len(arr), bool)
        return self._stab_cache[elem]

    def transporter(self, x, y):
        """Index of the first group element sending x to y, or None."""
        hits = np.nonzero(np.all(self.group.array[:, list(x)] == np.asarray(y), axis=1))[0] if x else np.arange(1)
        return int(hits[0]) if hits.size else None

    def is_invariant_map(self, table):
        for p in self._gens:
            for x, y in table.items():
                if table.get(act(p, x)) != act(p, y):
                    return False
        return True

    def orbit_map_candidates(self, x, target):
        """Elements of ``target`` whose stabilizer contains Stab(x)."""
        sx = self.stabilizer_mask(x)
        return [y for y in target.elements if np.all(self.stabilizer_mask(y)[sx])]

    def extend_from_rep(self, orbit, rep, image):
        """Invariant map on one orbit sending ``rep`` to ``image``."""
        table = {}
        for p in self.group.perms:
            table.setdefault(act(p, rep), act(p, image))
        return {x: table[x] for x in orbit.elements}

    def invariant_maps(self, x, y, cap=100_000):
        """All invariant maps x -> y, canonical order."""
        orbs = self.orbits(x)
        options = []
        total = 1
        for o in orbs:
            rep = o.elements[0]
            cands = self.orbit_map_candidates(rep, y)
            options.append([(o, rep, c) for c in cands])
            total *= len(cands)
            if total > cap:
                raise CapacityError(f"invariant_maps {x.name}->{y.name}: more than {cap} maps")
        out = []
        for choice in itertools.product(*options):
            table = {}
            for o, rep, c in choice:
                table.update(self.extend_from_rep(o, rep, c))
            out.append(DefMorphism(x, y, table))
        return out

    def hom(self, x, y, cap=100_000):
        return self.invariant_maps(x, y, cap=cap)

    def points(self, x):
        return x.elements

    def describe(self, elem):
        m = self.structure
        return "(" + ",".join(m.label(g) for g in elem) + ")"


def build_def_category(m: FinStructure, arity=DEFAULT_ARITY, size_policy="orbits", **kw) -> DefCategory:
    return DefCategory(m, arity=arity, orbit_objects=(size_policy == "orbits"), **kw)


# -------------------------------------------------------- parameter expansion


@dataclass
class DefFunctor:
    """A functor between definable categories given on objects and points."""

    source: DefCategory
    target: DefCategory
    on_objects: object  # callable DefObject -> DefObject
    on_points: object  # callable (DefObject, elem) -> elem
    name: str = ""

    def __call__(self, x):
        return self.on_objects(x)

    def fmap(self, f: DefMorphism) -> DefMorphism:
        fx, fy = self(f.source), self(f.target)
        table = {self.on_points(f.source, a): self.on_points(f.target, b) for a, b in f.table.items()}
        return DefMorphism(fx, fy, table, name=f"{self.name}({f.name})")


def expand_by_parameters(d: DefCategory, a: ParameterSet):
    """The category of A-definable sets and the inclusion functor I_A."""
    dcl = definable_closure(d.structure, a, d.group)
    if not a.closed and set(dcl.elements) != set(a.elements):
        missing = sorted(set(dcl.elements) - set(a.elements))
        raise PreconditionError("parameter set is not definably closed", witness=missing)
    stab = d.group.stabilizer(a.elements)
    target = DefCategory(d.structure, arity=d.arity, group=stab, max_size=d.max_size,
                         name=f"{d.name}_A")
    functor = DefFunctor(d, target, lambda x: target.by_name.get(x.name, x), lambda x, e: e, name="I_A")
    return target, functor


def points_over_parameters(d: DefCategory, a: ParameterSet, x: DefObject, y: DefObject, cap=100_000):
    """Maps x -> y definable over A, as tuples of images in x's element order."""
    stab = d.group.stabilizer(a.elements)
    da = DefCategory(d.structure, arity=1, group=stab, orbit_objects=False)
    return sorted({tuple(f.table[e] for e in x.elements) for f in da.invariant_maps(x, y, cap=cap)})


# --------------------------------------------------------------- imaginaries


@dataclass
class ImaginarySort:
    name: str
    source: DefObject
    classes: tuple  # tuple of tuples of source elements
    labels: tuple


def invariant_equivalence_classes(d: DefCategory, x: DefObject, related):
    """Classes of the equivalence relation ``related(a, b)`` on ``x``."""
    classes = []
    for e in x.elements:
        for cl in classes:
            if related(cl[0], e):
                cl.append(e)
                break
        else:
            classes.append([e])
    return [tuple(c) for c in classes]


def check_equivalence(x: DefObject, related):
    els = x.elements
    for a in els:
        if not related(a, a):
            return ("reflexivity", (a,))
    for a, b in itertools.product(els, repeat=2):
        if related(a, b) and not related(b, a):
            return ("symmetry", (a, b))
    for a, b, c in itertools.product(els, repeat=3):
        if related(a, b) and related(b, c) and not related(a, c):
            return ("transitivity", (a, b, c))
    return None


def adjoin_imaginaries(d: DefCategory, schedule):
    """Add a quotient sort for every class-orbit lacking a quotient in ``d``.

    ``schedule`` is a list of (object name, relation) pairs with relation a
    binary predicate on elements. Returns (new category, added sorts).
    Iterated schedules are expressed by calling again on the result.
    """
    from .presheaves import QuotientFailure, extract_quotient

    m = d.structure
    new_sorts, new_rels, added = {}, {}, []
    for k, (obj_name, related) in enumerate(schedule):
        x = d.by_name[obj_name]
        try:
            extract_quotient(d, x, related)
            continue
        except QuotientFailure as exc:
            missing = exc.missing_classes
        sname = f"{obj_name}/E{k}"
        while sname in m.sorts or sname in new_sorts:
            k += 1
            sname = f"{obj_name}/E{k}"
        labels = []
        graph = set()
        for i, cl in enumerate(missing):
            lab = f"e{i}"
            labels.append(lab)
            for e in cl:
                graph.add(tuple(m.label(g) for g in e) + (lab,))
        new_sorts[sname] = labels
        new_rels[f"q_{sname}"] = (tuple(x.sorts) + (sname,), graph)
        added.append(ImaginarySort(sname, x, tuple(missing), tuple(labels)))
    if not added:
        return d, []
    m2 = m.expand(new_sorts, new_rels, name=f"{m.name}^eq")
    return DefCategory(m2, arity=d.arity, max_size=d.max_size), added


def saturate_imaginaries(d: DefCategory, pairs, generators, max_rounds=4):
    """Adjoin the quotient named by each closedness witness until the
    ind-closedness check passes on ``pairs`` x ``generators`` (given by
    object name). Returns (category, added sorts, final report)."""
    from .presheaves import check_ind_closed

    added = []
    for _ in range(max_rounds + 1):
        rep = check_ind_closed(d, pairs=[(d.by_name[a], d.by_name[b]) for a, b in pairs],
                               generators=[d.by_name[g] for g in generators])
        if rep.ok or len(added) >= max_rounds:
            return d, added, rep
        stage = rep.witness["stage"]
        cls = {e: i for i, c in enumerate(rep.witness["classes"]) for e in c}
        d, new = adjoin_imaginaries(d, [(stage, lambda u, v, cls=cls: cls[u] == cls[v])])
        if not new:
            return d, added, rep
        added.extend(new)
    return d, added, rep


def check_stable_embedding(i: DefFunctor, level=1, pairs=None):
    """Whether the interpretation ``i`` is closed on hom ind-objects up to
    ``level``: maps between source objects definable in the target with j
    parameters are already definable in the source with j parameters.

    ``pairs`` defaults to (sort, 2) and (sort, sort') for the source sorts.
    Returns the first failing comparison or a passing one.
    """
    from .presheaves import ComparisonResult, closed_functor_comparison

    src, tgt = i.source, i.target
    if pairs is None:
        sorts = [src.by_name[s] for s in src.structure.sorts if s != BOOL]
        pairs = [(x, y) for x in sorts for y in [src.bool] + sorts]
    spool, tpool = list(range(src.structure.N)), list(range(tgt.structure.N))
    last = ComparisonResult(True, level, [])
    for x, y in pairs:
        last = closed_functor_comparison(i, x, y, level, 0, source_pool=spool, target_pool=tpool)
        if not last.ok:
            last.witness = {"pair": (x.name, y.name), "map": last.witness}
            return last
    return last
