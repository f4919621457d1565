"""Exhaustive identity suites behind ``permlocal verify``; each returns a list of failures."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

from ..bijections import btree_to_perm, e_plus, otree_to_perm, perm_to_btree, perm_to_otree
from ..limits_exact import enumerate_class, exponent_identity_holds, genfun_normalization_check, p231, symbolic_pat_j
from ..perm_core import Permutation, avoids, c_occ, pat_interval, split_at_max, standardize, star_insert
from ..rooted_order import RootedPermutation, local_distance, restrict
from ..samplers import RandomStream
from ..trees import contour_shape_check, dyck_words, leaf_labels, tree_from_contour

ULTRAMETRIC_TRIPLES = 10_000


def bijections(max_n: int, seed: int = 0) -> list[str]:
    bad = []
    for n in range(1, max_n + 1):
        for s in enumerate_class(231, n):
            t = perm_to_btree(s)
            if len(t) != n or btree_to_perm(t) != s:
                bad.append(f"231 roundtrip {s}")
        for s in enumerate_class(321, n):
            t = perm_to_otree(s)
            if len(t) != n + 1 or otree_to_perm(t) != s:
                bad.append(f"321 roundtrip {s}")
            if leaf_labels(t)[1] != e_plus(s):
                bad.append(f"Q transport {s}")
    return bad


def _max_split_count(pi: Permutation, sigma: Permutation) -> int:
    """Occurrences counted via the split of ``sigma`` at its maximum."""
    if not sigma:
        return 0
    left, right = split_at_max(sigma)
    ell, m, k, n = len(left) + 1, pi.index(max(pi)) + 1, len(pi), len(sigma)
    a, b = ell - m + 1, ell + k - m
    crossing = 1 if a >= 1 and b <= n and pat_interval(sigma, a, b) == pi else 0
    parts = [_max_split_count(pi, standardize(w)) for w in (left, right) if w]
    return sum(parts) + crossing


def identities(max_n: int, seed: int = 0) -> list[str]:
    bad = []
    for n in range(1, max_n + 1):
        for word in permutations(range(1, n + 1)):
            sigma = Permutation(word)
            in231 = avoids(sigma, (2, 3, 1))
            for k in range(1, min(n, 4) + 1):
                for pi in map(Permutation, permutations(range(1, k + 1))):
                    count = c_occ(pi, sigma)
                    if in231 and avoids(pi, (2, 3, 1)) and _max_split_count(pi, sigma) != count:
                        bad.append(f"max-split recursion {pi} in {sigma}")
                    if k < n:
                        stars = sum(c_occ(star_insert(pi, m), sigma) for m in range(1, k + 2))
                        tail = 1 if pat_interval(sigma, n - k + 1, n) == pi else 0
                        if stars + tail != count:
                            bad.append(f"star identity {pi} in {sigma}")
                    if k % 2 and k > 1:
                        h = k // 2
                        target = RootedPermutation(pi, h + 1)
                        roots = sum(1 for i in range(1, n + 1) if restrict(RootedPermutation(sigma, i), h) == target)
                        if roots != count:
                            bad.append(f"root counting {pi} in {sigma}")
    for edges in range(1, max_n + 1):
        for w in dyck_words(edges):
            q = leaf_labels(tree_from_contour(w))[1]
            for size in range(0, edges):
                for rest in combinations(range(2, edges + 1), size):
                    labels = (1, *rest)
                    if contour_shape_check(w, labels) != (list(labels) == q):
                        bad.append(f"contour shape {w} {labels}")
    bad += ultrametric(ULTRAMETRIC_TRIPLES, seed)
    return bad


def _random_rooted(stream: RandomStream, n_max: int) -> RootedPermutation:
    n = 1 + stream.below(n_max)
    word = stream.gen.permutation(n) + 1
    return RootedPermutation(Permutation(word.tolist()), 1 + stream.below(n))


def ultrametric(triples: int, seed: int = 0) -> list[str]:
    """``d(x, z) <= max(d(x, y), d(y, z))`` and symmetry on random rooted triples."""
    stream = RandomStream(seed, 7)
    bad = []
    for _ in range(triples):
        x, y, z = (_random_rooted(stream, 5) for _ in range(3))
        dxy, dyz, dxz = local_distance(x, y), local_distance(y, z), local_distance(x, z)
        if dxz > max(dxy, dyz) or dxy != local_distance(y, x):
            bad.append(f"ultrametric {x} {y} {z}")
    return bad


def symbolic(max_n: int, seed: int = 0) -> list[str]:
    bad = []
    for k in range(1, max_n + 1):
        for s in enumerate_class(231, k):
            if symbolic_pat_j(s)(Fraction(1, 2)) != p231(s) or not exponent_identity_holds(s):
                bad.append(f"symbolic {s}")
    return bad


def normalization(max_n: int, seed: int = 0) -> list[str]:
    return [] if genfun_normalization_check(max_n) else ["normalization"]


SUITES = {
    "bijections": bijections,
    "identities": identities,
    "symbolic": symbolic,
    "normalization": normalization,
}
