"""Scenario files: loading, generation, execution and reports.

A scenario is a YAML mapping with keys ``name``, ``structure``, optional
``cover`` / ``quotient`` / ``ind_closed`` / ``indpro`` / ``bi_override``
blocks, ``truncation`` (arity, level), ``checks`` and ``expected``. Element
order is declaration order and function tables are row-major.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .defsets import (
    BOOL,
    DefCategory,
    FinStructure,
    StructureError,
    adjoin_imaginaries,
    automorphism_group,
    saturate_imaginaries,
)
from .fincat import CapacityError
from .galois import (
    BindingGroupMismatch,
    HypothesisRefusal,
    InternalityError,
    Presentation,
    binding_pro_group,
    build_internal_cover,
    certify_hypotheses,
    check_actions_natural,
    check_promotion,
    compact_binding_group,
    validate_internal_cover,
)
from .groups import groups_isomorphic
from .indpro import IndMorphism, chain, classify_ind_object, is_proper
from .presheaves import QuotientFailure, check_ind_closed, extract_quotient

CHECK_ORDER = ["validate", "ind_closed", "imaginaries", "quotient", "cover", "groups", "promotion",
               "hypotheses", "compact", "indpro"]
DATA = Path(__file__).parent / "data"


class ScenarioError(ValueError):
    """Malformed scenario input; ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line, self.column = line, column


# ------------------------------------------------------------------- parsing


def _parse_yaml(text, source="<scenario>"):
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ScenarioError(f"{source}: {exc.problem}", mark.line + 1 if mark else None,
                            mark.column + 1 if mark else None) from None


def _need(d, key, kind, where):
    if key not in d:
        raise ScenarioError(f"{where}: missing key {key!r}")
    if not isinstance(d[key], kind):
        raise ScenarioError(f"{where}.{key}: expected {kind.__name__ if isinstance(kind, type) else kind}")
    return d[key]


def structure_from_dict(d) -> FinStructure:
    if not isinstance(d, dict):
        raise ScenarioError("structure: expected a mapping")
    sorts = {str(k): [str(e) for e in v] for k, v in _need(d, "sorts", dict, "structure").items()}
    functions = {}
    for name, spec in (d.get("functions") or {}).items():
        args = [str(a) for a in _need(spec, "args", list, f"functions.{name}")]
        res = str(_need(spec, "result", str, f"functions.{name}"))
        table = [str(v) for v in _need(spec, "table", list, f"functions.{name}")]
        for s in args + [res]:
            if s not in sorts and s != BOOL:
                raise ScenarioError(f"functions.{name}: unknown sort {s!r}")
        keys = list(itertools.product(*(sorts.get(s, ["false", "true"]) for s in args)))
        if len(keys) != len(table):
            raise ScenarioError(f"functions.{name}: table has {len(table)} entries, expected {len(keys)}")
        functions[str(name)] = (tuple(args), res, dict(zip(keys, table)))
    relations = {}
    for name, spec in (d.get("relations") or {}).items():
        srts = [str(s) for s in _need(spec, "sorts", list, f"relations.{name}")]
        tuples = {tuple(str(e) for e in t) for t in _need(spec, "tuples", list, f"relations.{name}")}
        relations[str(name)] = (tuple(srts), tuples)
    constants = {str(k): (str(v[0]), str(v[1])) for k, v in (d.get("constants") or {}).items()}
    try:
        return FinStructure(sorts, functions, relations, constants, name=str(d.get("name", "M")))
    except StructureError as exc:
        raise ScenarioError(f"structure: {exc}") from None


def structure_to_dict(m: FinStructure):
    return m.canonical()


@dataclass
class Scenario:
    name: str
    raw: dict
    structure: FinStructure | None
    checks: list
    arity: int = 2
    level: int = 1
    expected: dict = field(default_factory=dict)

    @property
    def cover(self):
        return self.raw.get("cover")


def load_scenario(path_or_text, is_text=False) -> Scenario:
    if is_text:
        text, source = path_or_text, "<text>"
    else:
        p = Path(path_or_text)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read {p}: {exc.strerror}") from None
        source = str(p)
    raw = _parse_yaml(text, source)
    return scenario_from_dict(raw)


def scenario_from_dict(raw) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario: expected a mapping at top level")
    name = str(_need(raw, "name", str, "scenario"))
    structure = structure_from_dict(raw["structure"]) if "structure" in raw else None
    checks = [str(c) for c in raw.get("checks", [])]
    for c in checks:
        if c not in CHECK_ORDER:
            raise ScenarioError(f"checks: unknown check {c!r}")
    trunc = raw.get("truncation") or {}
    arity, level = int(trunc.get("arity", 2)), int(trunc.get("level", 1))
    if arity < 1 or level < 0:
        raise ScenarioError("truncation: arity must be positive and level non-negative")
    needs_structure = set(checks) - {"indpro"}
    if needs_structure and structure is None:
        raise ScenarioError("scenario: checks need a structure")
    if set(checks) & {"cover", "groups", "promotion", "hypotheses", "compact"} and "cover" not in raw:
        raise ScenarioError("scenario: cover checks need a 'cover' block")
    return Scenario(name, raw, structure, checks, arity, level, dict(raw.get("expected") or {}))


# ------------------------------------------------------------------ relations


def relation_by_name(name):
    if name == "unordered_pair":
        return lambda u, v: sorted(u) == sorted(v)
    if name == "equal":
        return lambda u, v: u == v
    if name == "same_first":
        return lambda u, v: u[0] == v[0]
    raise ScenarioError(f"unknown relation {name!r}")


# ---------------------------------------------------------------- generators


def _gset_dict(group):
    from .builders import gset_structure, named_group

    g = named_group(group)
    m, red, pres = gset_structure(g, name=f"gset_{group}")
    return m, red, pres, len(g)


def _cover_block(red, pres):
    return {
        "reduct": list(red),
        "presentations": [
            {"sort": p.sort, "params": [list(x) for x in p.params], "coords": list(p.coords), "term": p.term}
            for p in pres
        ],
    }


COVER_CHECKS = ["validate", "cover", "groups", "promotion", "hypotheses", "compact"]


def generate_example(kind, **params) -> dict:
    """A self-contained scenario mapping with expected results where derivable."""
    from .builders import field_structure, pair_coded_set, pure_set, vecspace_structure

    if kind == "gset":
        group = str(params.get("group", "S3"))
        try:
            m, red, pres, order = _gset_dict(group)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        return {
            "name": f"gset_{group.lower()}",
            "structure": structure_to_dict(m),
            "cover": _cover_block(red, pres),
            "truncation": {"arity": 2, "level": 1},
            "checks": COVER_CHECKS,
            "expected": {"order": order, "group": group, "cover_ok": True},
        }
    if kind == "vecspace":
        q, n = int(params.get("q", 2)), int(params.get("n", 2))
        if q ** n > 27 or n > 3:
            raise ScenarioError(f"vecspace: q^n = {q ** n} is beyond the supported size (27)")
        try:
            m, red, pres = vecspace_structure(q, n, name=f"vec_F{q}^{n}")
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        from .groups import general_linear_group

        order = len(general_linear_group(n, q))
        return {
            "name": f"vecspace_q{q}_n{n}",
            "structure": structure_to_dict(m),
            "cover": _cover_block(red, pres),
            "truncation": {"arity": 2, "level": 1},
            "checks": COVER_CHECKS,
            "expected": {"order": order, "group": f"GL{n}_{q}", "cover_ok": True},
        }
    if kind == "pair_quotient":
        p = int(params.get("p", 5))
        try:
            m = field_structure(p, name=f"F{p}")
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        return {
            "name": f"pair_quotient_f{p}",
            "structure": structure_to_dict(m),
            "quotient": {"object": "FxF", "relation": "unordered_pair", "compare_with": ["add", "mul"]},
            "truncation": {"arity": 2, "level": 1},
            "checks": ["validate", "quotient"],
            "expected": {"classes": p * (p + 1) // 2, "kernel_match": True},
        }
    if kind == "synthetic_fixture":
        name = str(params.get("fixture", "equality"))
        if name == "equality":
            size = int(params.get("size", 4))
            if size < 4:
                raise ScenarioError("equality fixture needs at least 4 elements (smaller sets code pairs by complements)")
            m = pure_set(size, name=f"set{size}")
            return {
                "name": f"equality_{size}",
                "structure": structure_to_dict(m),
                "ind_closed": {"pairs": [["X", "2"], ["X", "X"]], "generators": ["X", "XxX"]},
                "imaginaries": {"object": "XxX", "relation": "unordered_pair"},
                "truncation": {"arity": 2, "level": 1},
                "checks": ["validate", "ind_closed", "imaginaries"],
                "expected": {"ind_closed": False, "ind_closed_after_imaginaries": True, "imaginary_size": size * (size - 1) // 2},
            }
        if name == "nonstrict_bi":
            m, red, pres, order = _gset_dict("Z2")
            return {
                "name": "nonstrict_bi",
                "structure": structure_to_dict(m),
                "cover": _cover_block(red, pres),
                "bi_override": {"stages": [["u", "v"], ["u", "v"], ["w"]], "transitions": [["u", "v"], ["w", "w"]]},
                "truncation": {"arity": 2, "level": 1},
                "checks": ["validate", "cover", "groups", "hypotheses", "compact"],
                "expected": {"order": order, "refusal_clause": 2},
            }
        if name == "non_proper_chain":
            k = int(params.get("size", 4))
            stages = [[str(i) for i in range(j + 1)] for j in range(k)]
            return {
                "name": "non_proper_chain",
                "indpro": {
                    "source": {"stages": stages, "transitions": [s for s in stages[:-1]]},
                    "target": {"stages": [["*"]] * k, "transitions": [["*"]] * (k - 1)},
                    "components": [["*"] * len(s) for s in stages],
                },
                "checks": ["indpro"],
                "expected": {"proper": False, "source_class": "strict"},
            }
        if name == "cover_not_closed":
            m = pair_coded_set(4, name="paircoded4")
            pres = [Presentation("W", (("W", "w"),), (), "p1")]
            return {
                "name": "cover_not_closed",
                "structure": structure_to_dict(m),
                "cover": _cover_block(("S",), pres),
                "truncation": {"arity": 2, "level": 1},
                "checks": ["validate", "cover"],
                "expected": {"cover_ok": False, "failed_clauses": ["F_closed", "I_closed"]},
            }
        raise ScenarioError(f"unknown fixture {name!r}")
    if kind == "trivial":
        m = field_structure(2, name="F2")
        return {
            "name": "trivial_cover",
            "structure": structure_to_dict(m),
            "cover": {"reduct": ["F"], "presentations": []},
            "truncation": {"arity": 2, "level": 1},
            "checks": COVER_CHECKS,
            "expected": {"order": 1, "cover_ok": True},
        }
    raise ScenarioError(f"unsupported example kind {kind!r}")


class _PlainDumper(yaml.SafeDumper):
    """Writes shared lists in full instead of as anchors and aliases."""

    def ignore_aliases(self, data):
        return True


def dump_scenario(d: dict) -> str:
    return yaml.dump(d, Dumper=_PlainDumper, sort_keys=False, default_flow_style=None, width=100)


BUNDLED = {
    "gset_z2": ("gset", {"group": "Z2"}),
    "gset_z3": ("gset", {"group": "Z3"}),
    "gset_z4": ("gset", {"group": "Z4"}),
    "gset_s3": ("gset", {"group": "S3"}),
    "vecspace_q2_n2": ("vecspace", {"q": 2, "n": 2}),
    "vecspace_q3_n1": ("vecspace", {"q": 3, "n": 1}),
    "pair_quotient_f5": ("pair_quotient", {"p": 5}),
    "trivial_cover": ("trivial", {}),
}
FIXTURES = {
    "equality_4": ("synthetic_fixture", {"fixture": "equality", "size": 4}),
    "nonstrict_bi": ("synthetic_fixture", {"fixture": "nonstrict_bi"}),
    "non_proper_chain": ("synthetic_fixture", {"fixture": "non_proper_chain"}),
    "cover_not_closed": ("synthetic_fixture", {"fixture": "cover_not_closed"}),
}


def bundled_path(name):
    for folder in ("scenarios", "fixtures"):
        p = DATA / folder / f"{name}.yaml"
        if p.exists():
            return p
    raise ScenarioError(f"no bundled scenario named {name!r}")


def bundled_names():
    return sorted(BUNDLED) + sorted(FIXTURES)


# ---------------------------------------------------------------- execution


class Report:
    """Ordered per-check results; serializes deterministically."""

    def __init__(self, scenario_name, checks):
        self.data = {"scenario": scenario_name, "version": __version__, "checks": checks, "results": {}}
        self.status = 0

    def add(self, check, ok, **fields):
        entry = {"ok": bool(ok)}
        entry.update(fields)
        self.data["results"][check] = _plain(entry)
        if not ok and self.status == 0:
            self.status = 1

    @property
    def ok(self):
        return self.status == 0

    def to_json(self):
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def to_text(self):
        lines = [f"scenario: {self.data['scenario']}", f"version: {self.data['version']}"]
        for check, res in self.data["results"].items():
            lines.append(f"[{'PASS' if res['ok'] else 'FAIL'}] {check}")
            for k in sorted(res):
                if k != "ok":
                    lines.append(f"    {k}: {json.dumps(res[k], sort_keys=True)}")
        lines.append(f"status: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines) + "\n"


def export_report(report, fmt="json"):
    if fmt == "json":
        return report.to_json()
    if fmt == "text":
        return report.to_text()
    raise ScenarioError(f"unknown report format {fmt!r}")


def report_from_json(text):
    data = json.loads(text)
    r = Report(data["scenario"], data["checks"])
    r.data = data
    r.status = 0 if all(v["ok"] for v in data["results"].values()) else 1
    return r


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, int):
        return int(x)
    try:
        return int(x)
    except (TypeError, ValueError):
        return str(x)


def _labels(m, elem):
    return [m.label(g) for g in elem]


def _group_tables(result, m):
    """Generators of the stabilized level as permutations of named elements."""
    top = result.categorical.top
    gens = top.generators()
    out = []
    for gi in gens:
        p = result.oracle.perms[result.apply_index.index(gi)]
        moved = {f"{m.sort_of(i)}:{m.label(i)}": f"{m.sort_of(j)}:{m.label(j)}" for i, j in enumerate(p) if i != j}
        out.append(moved)
    return out


_ANY = object()


def run_scenario(sc: Scenario, checks=None, level=None, arity=None, expected=None) -> Report:
    """Run checks in dependency order; each failure carries a witness."""
    checks = list(checks) if checks else list(sc.checks)
    checks = [c for c in CHECK_ORDER if c in checks]
    level = sc.level if level is None else level
    arity = sc.arity if arity is None else arity
    exp = dict(sc.expected)
    exp.update(expected or {})
    rep = Report(sc.name, checks)
    m = sc.structure
    state = {}

    def expect(key, value, default=_ANY):
        # verdicts without a declared expectation must come out as ``default``
        if key in exp:
            return exp[key] == value
        return default is _ANY or value == default

    for check in checks:
        if check == "validate":
            g = automorphism_group(m)
            rep.add("validate", True, sorts={s: len(v) for s, v in m.sorts.items() if s != BOOL},
                    automorphisms=g.order)
        elif check == "ind_closed":
            spec = sc.raw.get("ind_closed") or {}
            d = DefCategory(m, arity=arity, orbit_objects=False)
            pairs, gens = _ind_closed_setup(d, spec)
            res = check_ind_closed(d, pairs=pairs, generators=gens)
            state["ind_closed_setup"] = spec
            w = None
            if res.witness:
                w = {"pair": res.witness["pair"], "stage": res.witness["stage"],
                     "unmatched_class": [_labels(m, e) for e in res.witness["unmatched_class"]]}
            rep.add("ind_closed", expect("ind_closed", res.ok, True), closed=res.ok, maps_checked=res.checked, witness=w)
        elif check == "imaginaries":
            spec = sc.raw.get("imaginaries") or {}
            d = DefCategory(m, arity=arity, orbit_objects=False)
            d2, added = adjoin_imaginaries(d, [(spec.get("object", "XxX"), relation_by_name(spec.get("relation", "unordered_pair")))])
            icspec = sc.raw.get("ind_closed") or {}
            pairs = icspec.get("pairs") or [(s_, BOOL) for s_ in m.sorts if s_ != BOOL]
            gens = icspec.get("generators") or [s_ for s_ in m.sorts if s_ != BOOL]
            d2, more, res = saturate_imaginaries(d2, pairs, gens)
            added = list(added) + list(more)
            sizes = [len(a.labels) for a in added]
            ok = expect("ind_closed_after_imaginaries", res.ok, True) and expect("imaginary_size", sizes[0] if sizes else 0)
            w = None if res.ok else {"pair": res.witness["pair"], "stage": res.witness["stage"]}
            rep.add("imaginaries", ok, added=[a.name for a in added], sizes=sizes, closed_after=res.ok, witness=w)
        elif check == "quotient":
            spec = sc.raw.get("quotient") or {}
            d = DefCategory(m, arity=arity, orbit_objects=False)
            x = d.by_name.get(spec.get("object", ""))
            if x is None:
                raise ScenarioError(f"quotient: unknown object {spec.get('object')!r}")
            try:
                q = extract_quotient(d, x, relation_by_name(spec.get("relation", "unordered_pair")))
            except QuotientFailure as exc:
                rep.add("quotient", expect("quotient_exists", False, True), exists=False,
                        witness=[_labels(m, e) for e in exc.witness])
                continue
            n_classes = len(set(q.table.values()))
            match = None
            if spec.get("compare_with"):
                match = _kernel_matches(m, x, q, spec["compare_with"])
            ok = expect("classes", n_classes) and expect("kernel_match", match) and expect("quotient_exists", True, True)
            rep.add("quotient", ok, exists=True, classes=n_classes, kernel_match=match,
                    witness_objects=sorted({w[0] for w in q.witnesses}))
        elif check == "cover":
            cover = _build_cover(sc, m, arity)
            state["cover"] = cover
            cr = validate_internal_cover(cover, level=level)
            failed = cr.failed()
            ok = expect("cover_ok", cr.ok, True)
            if "failed_clauses" in exp:
                ok = ok and sorted(exp["failed_clauses"]) == sorted(failed)
            rep.add("cover", ok, valid=cr.ok, failed_clauses=sorted(failed),
                    witnesses={k: cr.clauses[k].witness for k in sorted(failed)})
        elif check == "groups":
            cover = state.get("cover") or _build_cover(sc, m, arity)
            state["cover"] = cover
            try:
                res = binding_pro_group(cover)
            except BindingGroupMismatch as exc:
                rep.add("groups", False, mismatch=str(exc), categorical=exc.categorical, oracle=exc.oracle)
                continue
            state["groups"] = res
            order = len(res.categorical.top)
            ok = expect("order", order)
            named = None
            if "group" in exp:
                from .builders import named_group

                named = groups_isomorphic(res.categorical.top, named_group(exp["group"])).isomorphic
                ok = ok and named
            natural = check_actions_natural(res) is None
            ok = ok and natural
            fields = {"order": order, "level_orders": res.categorical.orders,
                      "stable_level": res.categorical.stable_level, "oracle_order": res.oracle.order,
                      "isomorphic_to_oracle": res.matching.isomorphic, "actions_natural": natural,
                      "generators": _group_tables(res, m)}
            if named is not None:
                fields["isomorphic_to_expected"] = named
            if not expect("order", order):
                fields["expected_order"] = exp["order"]
            rep.add("groups", ok, **fields)
        elif check == "promotion":
            res = state.get("groups")
            if res is None:
                rep.add("promotion", False, reason="binding group unavailable")
                continue
            pc = check_promotion(state["cover"], res)
            rep.add("promotion", pc.ok, bijective=pc.bijective, homomorphism=pc.homomorphism, size=pc.size,
                    witness=pc.witness)
        elif check == "hypotheses":
            cover = state.get("cover") or _build_cover(sc, m, arity)
            state["cover"] = cover
            override = None
            if "bi_override" in sc.raw:
                b = sc.raw["bi_override"]
                override = _chain_from(b)
            try:
                a = certify_hypotheses(cover, level=level, bi_override=override)
            except InternalityError as exc:
                rep.add("hypotheses", False, error=str(exc), witness=exc.witness)
                continue
            state["assumptions"] = a
            first = next((k for k, v in sorted(a.clauses.items()) if not v.ok), None)
            rep.add("hypotheses", expect("refusal_clause", first, None), certified={str(k): v.ok for k, v in a.clauses.items()},
                    witnesses={str(k): v.witness for k, v in a.clauses.items() if not v.ok})
        elif check == "compact":
            cover = state.get("cover") or _build_cover(sc, m, arity)
            try:
                a = state.get("assumptions") or certify_hypotheses(cover, level=level)
                g, data = compact_binding_group(cover, a)
            except HypothesisRefusal as exc:
                rep.add("compact", expect("refusal_clause", exc.clause, None), refused=True, clause=exc.clause,
                        message=str(exc))
                continue
            except InternalityError as exc:
                rep.add("compact", False, error=str(exc), witness=exc.witness)
                continue
            res = state.get("groups")
            if res is None:
                try:
                    res = binding_pro_group(cover)
                except BindingGroupMismatch:
                    res = None
            iso = groups_isomorphic(g, res.categorical.top).isomorphic if res is not None else None
            ok = bool(iso) and "refusal_clause" not in exp
            rep.add("compact", ok, refused=False, order=len(g), isomorphic_to_binding_group=iso,
                    compact_points={q: len(d.x) for q, d in data.items()})
        elif check == "indpro":
            spec = sc.raw.get("indpro") or {}
            src = _chain_from(spec["source"])
            tgt = _chain_from(spec["target"])
            comps = {}
            for j, imgs in enumerate(spec["components"]):
                comps[j] = dict(zip(src.stage(j), [str(v) for v in imgs]))
            f = IndMorphism(src, tgt, comps)
            chk = f.check()
            if not chk.ok:
                raise ScenarioError(f"indpro: components are not compatible at {chk.witness}")
            v = is_proper(f)
            label, _ = classify_ind_object(src)
            ok = expect("proper", v.ok) and expect("source_class", label)
            rep.add("indpro", ok, proper=v.ok, witness=v.witness, source_class=label)
    return rep


def _chain_from(spec):
    stages = [tuple(str(e) for e in s) for s in spec["stages"]]
    trans = []
    for j, imgs in enumerate(spec["transitions"]):
        trans.append(dict(zip(stages[j], [str(v) for v in imgs])))
    return chain(stages, trans)


def _ind_closed_setup(d, spec):
    pairs = None
    if spec.get("pairs"):
        pairs = [(d.by_name[a], d.by_name[b]) for a, b in spec["pairs"]]
    gens = [d.by_name[g] for g in spec["generators"]] if spec.get("generators") else None
    return pairs, gens


def _kernel_matches(m, x, q, fnames):
    """Whether the quotient's kernel equals the kernel of the map to the
    tuple of values of the named binary functions."""
    def key(e):
        return tuple(m.functions[f][2][(m.label(e[0]), m.label(e[1]))] for f in fnames)

    for a in x.elements:
        for b in x.elements:
            if (q.table[a] == q.table[b]) != (key(a) == key(b)):
                return False
    return True


def _build_cover(sc, m, arity):
    spec = sc.cover
    pres = []
    for p in spec.get("presentations") or []:
        pres.append(Presentation(str(p["sort"]), tuple((str(s), str(e)) for s, e in p["params"]),
                                 tuple(str(c) for c in p["coords"]), str(p["term"])))
    try:
        return build_internal_cover(m, [str(s) for s in spec.get("reduct") or []], pres, arity=arity)
    except (StructureError, InternalityError) as exc:
        raise ScenarioError(f"cover: {exc}") from None
