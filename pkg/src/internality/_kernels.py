"""Hot combinatorial kernels.

Every kernel has a numba implementation and a pure-numpy one with the same
signature and the same (canonical) output. The numba path is used unless
``INTERNALITY_DISABLE_NUMBA`` is set to a truthy value or numba cannot be
imported.
"""
import os

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

_DISABLED = os.environ.get("INTERNALITY_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    import numba as nb

    HAVE_NUMBA = True
except ImportError:
    nb = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def encode_rows(rows, base):
    """Mixed-radix code of each row (all digits < base)."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows[:, None]
    weights = base ** np.arange(rows.shape[1], dtype=np.int64)
    return rows @ weights


# ---------------------------------------------------------------- orbits


def _orbit_labels_numpy(gens, tuples, base):
    gens = np.asarray(gens, dtype=np.int64)
    tuples = np.asarray(tuples, dtype=np.int64)
    n = tuples.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    codes = encode_rows(tuples, base)
    order = np.argsort(codes)
    srt = codes[order]
    src, dst = [np.arange(n)], [np.arange(n)]
    for g in gens:
        img = encode_rows(g[tuples], base)
        pos = np.searchsorted(srt, img)
        pos = np.minimum(pos, n - 1)
        if not np.all(srt[pos] == img):
            raise ValueError("tuple set is not closed under the generators")
        src.append(np.arange(n))
        dst.append(order[pos])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    _, comp = connected_components(graph, directed=True, connection="weak")
    first = np.full(comp.max() + 1, n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n))
    return first[comp]


if HAVE_NUMBA:

    @nb.njit(cache=True)
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    @nb.njit(cache=True)
    def _orbit_labels_jit(gens, tuples, base, srt, order):
        n = tuples.shape[0]
        k = tuples.shape[1]
        parent = np.arange(n)
        ok = True
        for gi in range(gens.shape[0]):
            for i in range(n):
                code = 0
                w = 1
                for j in range(k):
                    code += gens[gi, tuples[i, j]] * w
                    w *= base
                pos = np.searchsorted(srt, code)
                if pos >= n or srt[pos] != code:
                    ok = False
                    return parent, ok
                a = _find(parent, i)
                b = _find(parent, order[pos])
                if a < b:
                    parent[b] = a
                elif b < a:
                    parent[a] = b
        for i in range(n):
            parent[i] = _find(parent, i)
        return parent, ok

    def _orbit_labels_numba(gens, tuples, base):
        gens = np.ascontiguousarray(gens, dtype=np.int64)
        tuples = np.ascontiguousarray(tuples, dtype=np.int64)
        if tuples.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        if tuples.ndim == 1:
            tuples = tuples[:, None]
        if gens.size == 0:
            gens = gens.reshape(0, max(1, gens.shape[-1] if gens.ndim == 2 else 1))
        codes = encode_rows(tuples, base)
        order = np.argsort(codes)
        labels, ok = _orbit_labels_jit(gens, tuples, base, codes[order], order)
        if not ok:
            raise ValueError("tuple set is not closed under the generators")
        # union by smaller index keeps roots minimal, so labels are canonical
        return labels


def orbit_labels(gens, tuples, base):
    """Label every row of ``tuples`` by the smallest row index in its orbit.

    ``gens`` is a (G, N) array of permutations of the global element indices,
    acting coordinatewise on the rows.
    """
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.ndim == 1:
        tuples = tuples[:, None]
    if HAVE_NUMBA:
        return _orbit_labels_numba(gens, tuples, base)
    return _orbit_labels_numpy(gens, tuples, base)


# ---------------------------------------------------------- preservation


def _preserves_numpy(cands, rows, base):
    cands = np.asarray(cands, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] == 0 or cands.shape[0] == 0:
        return np.ones(cands.shape[0], dtype=bool)
    srt = np.sort(encode_rows(rows, base))
    weights = base ** np.arange(rows.shape[1], dtype=np.int64)
    img = cands[:, rows] @ weights  # (K, R)
    return np.isin(img, srt).all(axis=1)


if HAVE_NUMBA:

    @nb.njit(cache=True)
    def _preserves_jit(cands, rows, base, srt):
        kk = cands.shape[0]
        out = np.ones(kk, dtype=np.bool_)
        for c in range(kk):
            for r in range(rows.shape[0]):
                code = 0
                w = 1
                for j in range(rows.shape[1]):
                    code += cands[c, rows[r, j]] * w
                    w *= base
                pos = np.searchsorted(srt, code)
                if pos >= srt.shape[0] or srt[pos] != code:
                    out[c] = False
                    break
        return out

    def _preserves_numba(cands, rows, base):
        cands = np.ascontiguousarray(cands, dtype=np.int64)
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        if rows.shape[0] == 0 or cands.shape[0] == 0:
            return np.ones(cands.shape[0], dtype=bool)
        srt = np.sort(encode_rows(rows, base))
        return _preserves_jit(cands, rows, base, srt)


def preserves_rows(cands, rows, base):
    """For each candidate permutation, whether it maps the row set into itself."""
    if HAVE_NUMBA:
        return _preserves_numba(cands, rows, base)
    return _preserves_numpy(cands, rows, base)


# --------------------------------------------------------- associativity


def _assoc_numpy(comp):
    comp = np.asarray(comp, dtype=np.int64)
    m = comp.shape[0]
    if m == 0:
        return (-1, -1, -1)
    # comp[g, f] = g . f ; -1 where undefined
    h, g, f = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    gf = comp[g, f]
    hg = comp[h, g]
    ok = (gf >= 0) & (hg >= 0)
    left = np.where(ok, comp[h, np.maximum(gf, 0)], -2)
    right = np.where(ok, comp[np.maximum(hg, 0), f], -2)
    bad = np.argwhere(ok & (left != right))
    if bad.size == 0:
        return (-1, -1, -1)
    hh, gg, ff = bad[0]
    return (int(ff), int(gg), int(hh))


if HAVE_NUMBA:

    @nb.njit(cache=True)
    def _assoc_jit(comp):
        m = comp.shape[0]
        for h in range(m):
            for g in range(m):
                hg = comp[h, g]
                if hg < 0:
                    continue
                for f in range(m):
                    gf = comp[g, f]
                    if gf < 0:
                        continue
                    if comp[h, gf] != comp[hg, f]:
                        return f, g, h
        return -1, -1, -1

    def _assoc_numba(comp):
        comp = np.ascontiguousarray(comp, dtype=np.int64)
        if comp.shape[0] == 0:
            return (-1, -1, -1)
        f, g, h = _assoc_jit(comp)
        return (int(f), int(g), int(h))


def first_assoc_violation(comp):
    """First (f, g, h) with h.(g.f) != (h.g).f, as indices; (-1, -1, -1) if none.

    Triples are scanned in (h, g, f) lexicographic order on both backends.
    """
    if HAVE_NUMBA:
        return _assoc_numba(comp)
    return _assoc_numpy(comp)
