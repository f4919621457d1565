"""Av(231) <-> binary trees and Av(321) <-> rooted ordered trees."""

from __future__ import annotations

from typing import Sequence

from .perm_core import Permutation, as_perm, avoids
from .trees import NONE, BinaryTree, OrderedTree, inorder, leaf_labels, postorder, tree_from_contour


def perm_to_btree(sigma: Sequence[int]) -> BinaryTree:
    """Root at the maximum, left subtree from the prefix, right subtree from the suffix."""
    sigma = as_perm(sigma)
    if len(sigma) == 0:
        raise ValueError("the empty permutation has no tree")
    if not avoids(sigma, (2, 3, 1)):
        raise ValueError(f"{sigma} contains 231")
    # max-rooted Cartesian tree, built with a stack in one pass
    n = len(sigma)
    left, right = [NONE] * n, [NONE] * n
    stack: list[int] = []
    for i, v in enumerate(sigma):
        last = NONE
        while stack and sigma[stack[-1]] < v:
            last = stack.pop()
        left[i] = last
        if stack:
            right[stack[-1]] = i
        stack.append(i)
    return BinaryTree.from_links(left, right, root=stack[0])


def btree_to_perm(t: BinaryTree) -> Permutation:
    """Entry ``i`` is the post-order label of the ``i``-th vertex in in-order."""
    post = [0] * len(t)
    for rank, v in enumerate(postorder(t), start=1):
        post[v] = rank
    return Permutation(post[v] for v in inorder(t))


def e_plus(sigma: Sequence[int]) -> list[int]:
    """Indices weakly above the diagonal."""
    return [i for i, v in enumerate(sigma, start=1) if v >= i]


def e_minus(sigma: Sequence[int]) -> list[int]:
    """Indices strictly below the diagonal."""
    return [i for i, v in enumerate(sigma, start=1) if v < i]


def otree_to_perm(t: OrderedTree) -> Permutation:
    """Value ``s_i`` at index ``q_i`` for every leaf; other slots filled increasingly."""
    n = len(t) - 1
    if n == 0:
        return Permutation()
    s, q = leaf_labels(t)
    out = [0] * (n + 1)
    for qi, si in zip(q, s):
        out[qi] = si
    used = set(s)
    rest = (v for v in range(1, n + 1) if v not in used)
    for i in range(1, n + 1):
        if out[i] == 0:
            out[i] = next(rest)
    return Permutation(out[1:])


def perm_to_otree(sigma: Sequence[int]) -> OrderedTree:
    """The tree whose leaves sit at post-order labels E+ with pre-order labels sigma(E+)."""
    sigma = as_perm(sigma)
    if not avoids(sigma, (3, 2, 1)):
        raise ValueError(f"{sigma} contains 321")
    n = len(sigma)
    if n == 0:
        return OrderedTree.single()
    # leaf i is a peak reached by the s_i-th up step and left by the q_i-th down step
    ups = downs = 0
    word = []
    for q in e_plus(sigma):
        s = sigma[q - 1]
        word.append("D" * (q - 1 - downs) + "U" * (s - ups) + "D")
        ups, downs = s, q
    word.append("D" * (n - downs))
    return tree_from_contour("".join(word))


def window_set(sigma: Sequence[int], i: int, k: int) -> frozenset[int]:
    """Offsets ``x`` in ``[-k, k]`` with ``x + i`` in E+."""
    n = len(sigma)
    if not 1 <= i <= n or k < 1:
        raise ValueError("need 1 <= i <= n and k >= 1")
    return frozenset(x for x in range(-k, k + 1) if 1 <= x + i <= n and sigma[x + i - 1] >= x + i)


def has_separating_line(sigma: Sequence[int], i: int, k: int) -> bool:
    """Whether the window of radius ``k`` at ``i`` puts every E+ value above every E- value."""
    n = len(sigma)
    if not 1 <= i <= n or k < 1:
        raise ValueError("need 1 <= i <= n and k >= 1")
    idx = range(max(1, i - k), min(n, i + k) + 1)
    upper = [j for j in idx if sigma[j - 1] >= j]
    lower = [j for j in idx if sigma[j - 1] < j]
    if not upper or not lower:
        return True
    return sigma[min(upper) - 1] > sigma[max(lower) - 1]
