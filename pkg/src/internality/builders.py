"""Constructors for the standard example structures."""
from __future__ import annotations

import itertools

from .defsets import FinStructure
from .galois import Presentation
from .groups import FiniteGroup


def named_group(spec: str) -> FiniteGroup:
    """``Z<n>``, ``S<n>`` or ``GL<n>_<q>``."""
    spec = spec.strip()
    if spec[:1] in "ZC" and spec[1:].isdigit():
        return FiniteGroup.cyclic(int(spec[1:]))
    if spec[:1] == "S" and spec[1:].isdigit():
        return FiniteGroup.symmetric(int(spec[1:]))
    if spec.startswith("GL") and "_" in spec:
        from .groups import general_linear_group

        n, q = spec[2:].split("_")
        return general_linear_group(int(n), int(q))
    raise ValueError(f"unsupported group {spec!r}")


def gset_structure(g: FiniteGroup, name=None):
    """A torsor X for g with right action by the named labels K.

    ``act(x_i, k_j) = x_{i*j}``; every label is a constant, so automorphisms
    are exactly the left translations and Aut(M) = Aut(M/K) is g.
    """
    n = len(g)
    xs = [f"x{i}" for i in range(n)]
    ks = [f"k{i}" for i in range(n)]
    table = {(xs[i], ks[j]): xs[g.mul(i, j)] for i in range(n) for j in range(n)}
    consts = {f"h{j}": ("K", ks[j]) for j in range(n)}
    m = FinStructure({"X": xs, "K": ks}, {"act": (("X", "K"), "X", table)}, None, consts, name=name or f"gset_{g.name}")
    pres = Presentation("X", (("X", xs[g.identity]),), ("K",), "act(p1, c1)")
    return m, ("K",), [pres]


def prime_field(q):
    for d in range(2, int(q**0.5) + 1):
        if q % d == 0:
            raise ValueError(f"q={q} is not prime")
    if q < 2:
        raise ValueError("q must be a prime")
    return [str(i) for i in range(q)]


def vecspace_structure(q: int, n: int, name=None):
    """F_q^n over the field sort L; reduct L, parameters a basis."""
    ls = prime_field(q)
    if n < 1:
        raise ValueError("n must be positive")
    vecs = list(itertools.product(range(q), repeat=n))
    lab = {v: "v" + "".join(map(str, v)) for v in vecs}
    add = {(str(a), str(b)): str((a + b) % q) for a in range(q) for b in range(q)}
    mul = {(str(a), str(b)): str((a * b) % q) for a in range(q) for b in range(q)}
    vadd = {(lab[u], lab[v]): lab[tuple((x + y) % q for x, y in zip(u, v))] for u in vecs for v in vecs}
    smul = {(str(a), lab[v]): lab[tuple((a * x) % q for x in v)] for a in range(q) for v in vecs}
    funcs = {
        "add": (("L", "L"), "L", add),
        "mul": (("L", "L"), "L", mul),
        "vadd": (("V", "V"), "V", vadd),
        "smul": (("L", "V"), "V", smul),
    }
    consts = {"zero": ("L", "0"), "one": ("L", "1"), "vzero": ("V", lab[(0,) * n])}
    m = FinStructure({"L": ls, "V": [lab[v] for v in vecs]}, funcs, None, consts, name=name or f"vec_F{q}^{n}")
    basis = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    term = f"smul(c1, p1)"
    for j in range(2, n + 1):
        term = f"vadd({term}, smul(c{j}, p{j}))"
    pres = Presentation("V", tuple(("V", lab[b]) for b in basis), ("L",) * n, term)
    return m, ("L",), [pres]


def field_structure(p: int, name=None):
    """The prime field F_p with addition and multiplication."""
    ls = prime_field(p)
    add = {(str(a), str(b)): str((a + b) % p) for a in range(p) for b in range(p)}
    mul = {(str(a), str(b)): str((a * b) % p) for a in range(p) for b in range(p)}
    return FinStructure({"F": ls}, {"add": (("F", "F"), "F", add), "mul": (("F", "F"), "F", mul)},
                        name=name or f"F{p}")


def pure_set(n: int, sort="X", name=None):
    return FinStructure({sort: [chr(ord("a") + i) for i in range(n)]}, name=name or f"set{n}")


def pair_coded_set(n: int = 4, name=None):
    """A pure n-set S with one extra point w related to a and b only.

    S is not stably embedded: {a, b} is definable over the empty set but
    needs two parameters from S.
    """
    s = [chr(ord("a") + i) for i in range(n)]
    return FinStructure({"S": s, "W": ["w"]}, None, {"R": (("W", "S"), {("w", "a"), ("w", "b")})},
                        name=name or f"paircoded{n}")
