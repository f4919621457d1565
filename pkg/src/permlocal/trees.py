"""Rooted ordered trees, binary trees, traversals and contour words.

Vertices are dense integers numbered in pre-order with the root at 0, so two
trees are equal exactly when they have the same shape.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

NONE = -1


@dataclass(frozen=True)
class OrderedTree:
    children: tuple[tuple[int, ...], ...]

    @classmethod
    def from_children(cls, children: Sequence[Sequence[int]], root: int = 0) -> "OrderedTree":
        """Build from arbitrary vertex ids, renumbering in pre-order."""
        ids: dict[int, int] = {}
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            ids[v] = len(order)
            order.append(v)
            stack.extend(reversed(children[v]))
        return cls(tuple(tuple(ids[c] for c in children[v]) for v in order))

    @classmethod
    def single(cls) -> "OrderedTree":
        return cls(((),))

    def __len__(self) -> int:
        return len(self.children)

    def outdegree(self, v: int) -> int:
        return len(self.children[v])

    def parents(self) -> list[int]:
        par = [NONE] * len(self)
        for v, cs in enumerate(self.children):
            for c in cs:
                par[c] = v
        return par

    def leaves(self) -> list[int]:
        """Leaves from left to right."""
        return [v for v in range(len(self)) if not self.children[v]]

    def height_of(self, v: int) -> int:
        par = self.parents()
        h = 0
        while par[v] != NONE:
            v, h = par[v], h + 1
        return h

    def address(self, v: int) -> tuple[int, ...]:
        """Neveu address: 1-based child ranks along the path from the root."""
        par = self.parents()
        out = []
        while par[v] != NONE:
            out.append(self.children[par[v]].index(v) + 1)
            v = par[v]
        return tuple(reversed(out))


@dataclass(frozen=True)
class BinaryTree:
    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def from_links(cls, left: Sequence[int], right: Sequence[int], root: int = 0) -> "BinaryTree":
        """Build from arbitrary ids (``NONE`` for a missing child), renumbering in pre-order."""
        ids: dict[int, int] = {}
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            ids[v] = len(order)
            order.append(v)
            if right[v] != NONE:
                stack.append(right[v])
            if left[v] != NONE:
                stack.append(left[v])
        remap = lambda c: NONE if c == NONE else ids[c]
        return cls(tuple(remap(left[v]) for v in order), tuple(remap(right[v]) for v in order))

    @classmethod
    def single(cls) -> "BinaryTree":
        return cls((NONE,), (NONE,))

    def __len__(self) -> int:
        return len(self.left)

    def children_of(self, v: int) -> list[int]:
        return [c for c in (self.left[v], self.right[v]) if c != NONE]

    def address(self, v: int) -> tuple[int, ...]:
        """Word over {1, 2}: 1 for a left step, 2 for a right step."""
        par, side = [NONE] * len(self), [0] * len(self)
        for u in range(len(self)):
            if self.left[u] != NONE:
                par[self.left[u]], side[self.left[u]] = u, 1
            if self.right[u] != NONE:
                par[self.right[u]], side[self.right[u]] = u, 2
        out = []
        while par[v] != NONE:
            out.append(side[v])
            v = par[v]
        return tuple(reversed(out))

    def as_ordered(self) -> OrderedTree:
        """Forget the left/right distinction."""
        return OrderedTree(tuple(tuple(self.children_of(v)) for v in range(len(self))))


@dataclass(frozen=True)
class PointedTree:
    tree: OrderedTree
    vertex: int


# -- traversals ---------------------------------------------------------------


def preorder(t: OrderedTree | BinaryTree) -> list[int]:
    kids = _kids(t)
    out, stack = [], [0]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(reversed(kids(v)))
    return out


def postorder(t: OrderedTree | BinaryTree) -> list[int]:
    kids = _kids(t)
    out, stack = [], [0]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(kids(v))
    out.reverse()
    return out


def inorder(t: BinaryTree) -> list[int]:
    if not isinstance(t, BinaryTree):
        raise TypeError("in-order traversal needs a binary tree")
    out, stack, v = [], [], 0
    while stack or v != NONE:
        while v != NONE:
            stack.append(v)
            v = t.left[v]
        v = stack.pop()
        out.append(v)
        v = t.right[v]
    return out


def traverse(t: OrderedTree | BinaryTree, order: str) -> list[int]:
    if order == "pre":
        return preorder(t)
    if order == "post":
        return postorder(t)
    if order == "in":
        return inorder(t)
    raise ValueError(f"unknown traversal {order!r}")


def labels(t: OrderedTree | BinaryTree, order: str, start: int = 1) -> list[int]:
    """``out[v]`` is the tag of ``v`` when the traversal tags vertices ``start, start+1, ...``."""
    out = [0] * len(t)
    for i, v in enumerate(traverse(t, order)):
        out[v] = i + start
    return out


def _kids(t: OrderedTree | BinaryTree):
    if isinstance(t, BinaryTree):
        return t.children_of
    return lambda v: t.children[v]


# -- contour words ------------------------------------------------------------


def is_dyck(word: str) -> bool:
    height = 0
    for c in word:
        if c == "U":
            height += 1
        elif c == "D":
            height -= 1
            if height < 0:
                return False
        else:
            return False
    return height == 0


def contour(t: OrderedTree) -> str:
    out = []
    stack = [(0, 0)]
    while stack:
        v, i = stack.pop()
        if i < len(t.children[v]):
            stack.append((v, i + 1))
            stack.append((t.children[v][i], 0))
            out.append("U")
        elif stack:
            out.append("D")
    return "".join(out)


def tree_from_contour(word: str) -> OrderedTree:
    if not is_dyck(word):
        raise ValueError(f"not a Dyck word: {word!r}")
    children: list[list[int]] = [[]]
    path = [0]
    for c in word:
        if c == "U":
            children.append([])
            children[path[-1]].append(len(children) - 1)
            path.append(len(children) - 1)
        else:
            path.pop()
    # vertices were created in pre-order already
    return OrderedTree(tuple(tuple(cs) for cs in children))


def peaks(word: str) -> int:
    return word.count("UD")


def leaf_labels(t: OrderedTree) -> tuple[list[int], list[int]]:
    """Pre-order labels from 0 (``S``) and post-order labels from 1 (``Q``) of the leaves."""
    pre = labels(t, "pre", start=0)
    post = labels(t, "post", start=1)
    leaves = t.leaves()
    return [pre[v] for v in leaves], [post[v] for v in leaves]


def contour_shape_check(word: str, labels_set: Sequence[int]) -> bool:
    """Whether the contour has the shape forced by post-order leaf labels ``labels_set``."""
    xs = sorted(set(labels_set))
    if not xs or xs[0] != 1:
        raise ValueError("label set must contain 1")
    parts = [f"U+D{{{b - a}}}" for a, b in zip(xs, xs[1:])]
    return re.fullmatch("".join(parts) + "U+D+", word) is not None


# -- fringes -------------------------------------------------------------------


def fringe(t: OrderedTree, v: int) -> OrderedTree:
    if not 0 <= v < len(t):
        raise ValueError(f"vertex {v} not in tree")
    return OrderedTree.from_children(t.children, root=v)


def pointed_fringe(t: OrderedTree, v: int, h: int) -> PointedTree | None:
    """Fringe at the ``h``-th ancestor of ``v`` pointed at ``v``; ``None`` stands for the placeholder."""
    if not 0 <= v < len(t):
        raise ValueError(f"vertex {v} not in tree")
    par = t.parents()
    top = v
    for _ in range(h):
        top = par[top]
        if top == NONE:
            return None
    # the fringe keeps the pre-order of t, so ids shift by the fringe root's id
    sub = fringe(t, top)
    return PointedTree(sub, v - top)


# -- enumeration oracles -----------------------------------------------------


@lru_cache(maxsize=None)
def all_ordered_trees(n_vertices: int) -> tuple[OrderedTree, ...]:
    return tuple(tree_from_contour(w) for w in dyck_words(n_vertices - 1))


@lru_cache(maxsize=None)
def dyck_words(n: int) -> tuple[str, ...]:
    out = []

    def walk(prefix: str, up: int, down: int) -> None:
        if up == down == n:
            out.append(prefix)
            return
        if up < n:
            walk(prefix + "U", up + 1, down)
        if down < up:
            walk(prefix + "D", up, down + 1)

    walk("", 0, 0)
    return tuple(out)


def _binary_shapes(n: int) -> Iterator[tuple]:
    # nested (left, right) tuples, None for the empty tree
    if n == 0:
        yield None
        return
    for k in range(n):
        for a in _binary_shapes(k):
            for b in _binary_shapes(n - 1 - k):
                yield (a, b)


@lru_cache(maxsize=None)
def all_binary_trees(n: int) -> tuple[BinaryTree, ...]:
    out = []
    for shape in _binary_shapes(n):
        left: list[int] = []
        right: list[int] = []

        def build(node) -> int:
            v = len(left)
            left.append(NONE)
            right.append(NONE)
            if node[0] is not None:
                left[v] = build(node[0])
            if node[1] is not None:
                right[v] = build(node[1])
            return v

        build(shape)
        out.append(BinaryTree(tuple(left), tuple(right)))
    return tuple(out)
