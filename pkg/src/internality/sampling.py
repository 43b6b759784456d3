"""Seeded generators of small random categories, functors and chains."""
from __future__ import annotations

import random

from .fincat import CapacityError, FinCategory, concrete_category, enumerate_functors, preorder_category
from .indpro import IndMorphism, chain


def random_category(rng: random.Random, max_objects=4, max_morphisms=12, max_size=3) -> FinCategory:
    """A concrete category of small sets generated by a few random maps."""
    while True:
        n = rng.randint(1, max_objects)
        sizes = {f"o{i}": rng.randint(1, max_size) for i in range(n)}
        gens = []
        for _ in range(rng.randint(0, 3)):
            d, c = rng.choice(list(sizes)), rng.choice(list(sizes))
            gens.append((d, c, tuple(rng.randrange(sizes[c]) for _ in range(sizes[d]))))
        try:
            return concrete_category(sizes, gens, max_morphisms=max_morphisms, name="rand")
        except CapacityError:
            continue


def random_poset(rng: random.Random, max_objects=4) -> FinCategory:
    n = rng.randint(1, max_objects)
    rel = {(i, i) for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                rel.add((i, j))
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return preorder_category(range(n), lambda a, b: (a, b) in rel)


def random_functor_pair(rng: random.Random, max_objects=4, max_morphisms=12, cap=20_000):
    """(F, G) parallel functors between two random small categories."""
    while True:
        c = random_category(rng, max_objects, max_morphisms) if rng.random() < 0.7 else random_poset(rng, max_objects)
        d = random_category(rng, max_objects, max_morphisms)
        try:
            fs = enumerate_functors(c, d, cap=cap)
        except CapacityError:
            continue
        if fs:
            f = rng.choice(fs)
            return f, (f if rng.random() < 0.3 else rng.choice(fs))


def random_chain(rng: random.Random, length=None, max_size=4, compact=False):
    """An ind-chain of small sets; ``compact`` makes the last transition bijective."""
    k = length or rng.randint(1, 4)
    sizes = [rng.randint(1, max_size) for _ in range(k)]
    if compact and k > 1:
        sizes[-1] = sizes[-2]
    stages = [tuple(f"s{j}_{i}" for i in range(n)) for j, n in enumerate(sizes)]
    trans = []
    for j in range(k - 1):
        if compact and j == k - 2:
            img = list(stages[j + 1])
            rng.shuffle(img)
            trans.append(dict(zip(stages[j], img)))
        else:
            trans.append({a: rng.choice(stages[j + 1]) for a in stages[j]})
    return chain(stages, trans)


def random_chain_morphism(rng: random.Random, source, target, tries=20):
    """A compatible family source -> target built backwards from the last
    level, or None when no attempt succeeds."""
    k = source.length
    if target.length != k:
        raise ValueError("chains must have equal length")
    for _ in range(tries):
        data = {k - 1: {a: rng.choice(target.stage(k - 1)) for a in source.stage(k - 1)}}
        ok = True
        for j in range(k - 2, -1, -1):
            tx, ty = source.transition(j, j + 1), target.transition(j, j + 1)
            data[j] = {}
            for a in source.stage(j):
                pre = [b for b in target.stage(j) if ty[b] == data[j + 1][tx[a]]]
                if not pre:
                    ok = False
                    break
                data[j][a] = rng.choice(pre)
            if not ok:
                break
        if ok:
            return IndMorphism(source, target, data)
    return None
