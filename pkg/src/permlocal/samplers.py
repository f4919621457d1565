"""Seeded samplers: uniform Catalan objects, Galton-Watson trees, Boltzmann
231-avoiders and finite windows of the two limiting random orders."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

import numpy as np

from .bijections import btree_to_perm, otree_to_perm
from .perm_core import Permutation, standardize
from .rooted_order import RootedPermutation
from .trees import NONE, BinaryTree, OrderedTree, PointedTree, tree_from_contour

DEFAULT_VERTEX_CAP = 2**24


class RandomStream:
    """Reproducible random source keyed by ``(seed, stream_id)``."""

    _BLOCK = 1 << 14

    def __init__(self, seed: int, stream_id: int = 0) -> None:
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = seed
        self.stream_id = stream_id
        self.gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_id,))))
        self._bits: list[int] = []

    def coin(self) -> bool:
        if not self._bits:
            self._bits = self.gen.integers(0, 2, self._BLOCK, dtype=np.uint8).tolist()
        return self._bits.pop() == 1

    def geometric_half(self) -> int:
        """Number of tails before the first head."""
        k = 0
        while not self.coin():
            k += 1
        return k

    def below(self, k: int) -> int:
        return int(self.gen.integers(k))


@dataclass(frozen=True)
class Overflow:
    """Returned instead of a tree when the vertex cap is exceeded."""

    cap: int


@dataclass(frozen=True)
class OffspringLaw:
    variant: str
    delta: Fraction = Fraction(0)

    VARIANTS = ("geometric_half", "binary_delta", "size_biased_geometric_half")

    def __post_init__(self) -> None:
        if self.variant not in self.VARIANTS:
            raise ValueError(f"unknown offspring law {self.variant!r}")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")

    @classmethod
    def geometric_half(cls) -> "OffspringLaw":
        return cls("geometric_half")

    @classmethod
    def binary(cls, delta: Fraction | float = 0) -> "OffspringLaw":
        return cls("binary_delta", Fraction(delta))

    @classmethod
    def size_biased(cls) -> "OffspringLaw":
        return cls("size_biased_geometric_half")

    @property
    def p(self) -> Fraction:
        """Probability that a given potential child of a binary vertex exists."""
        return (1 - self.delta) / 2

    def pmf(self, k: int) -> Fraction:
        """Probability of exactly ``k`` children."""
        if k < 0:
            return Fraction(0)
        if self.variant == "geometric_half":
            return Fraction(1, 2 ** (k + 1))
        if self.variant == "size_biased_geometric_half":
            return Fraction(k, 2 ** (k + 1))
        p = self.p
        return {0: (1 - p) ** 2, 1: 2 * p * (1 - p), 2: p * p}.get(k, Fraction(0))

    def draw(self, stream: RandomStream) -> int:
        if self.variant == "geometric_half":
            return stream.geometric_half()
        if self.variant == "size_biased_geometric_half":
            return 1 + stream.geometric_half() + stream.geometric_half()
        raise TypeError("binary laws are drawn child by child")


# -- uniform Catalan structures -----------------------------------------------


def uniform_btree(n: int, stream: RandomStream) -> BinaryTree:
    """Rémy's leaf insertion on full binary trees, then the leaves are dropped."""
    if n < 1:
        raise ValueError("n must be positive")
    size = 2 * n + 1
    left, right, parent = [NONE] * size, [NONE] * size, [NONE] * size
    root = 0
    picks = stream.gen.random(n)
    sides = stream.gen.integers(0, 2, n).tolist()
    for k in range(n):
        x = int(picks[k] * (2 * k + 1))
        a, b = 2 * k + 1, 2 * k + 2
        p = parent[x]
        if p == NONE:
            root = a
        elif left[p] == x:
            left[p] = a
        else:
            right[p] = a
        parent[a] = p
        if sides[k]:
            left[a], right[a] = x, b
        else:
            left[a], right[a] = b, x
        parent[x] = parent[b] = a
    # leaves are exactly the even ids
    keep_left = [c if c != NONE and c % 2 else NONE for c in left]
    keep_right = [c if c != NONE and c % 2 else NONE for c in right]
    return BinaryTree.from_links(keep_left, keep_right, root=root)


def uniform_dyck_word(n: int, stream: RandomStream) -> str:
    """Uniform Dyck word of semilength ``n`` via the cycle lemma."""
    if n == 0:
        return ""
    steps = np.full(2 * n + 1, -1, dtype=np.int64)
    steps[:n] = 1
    steps = stream.gen.permutation(steps)
    # the only good rotation starts right after the first global minimum
    cut = int(np.argmin(np.cumsum(steps))) + 1
    rotated = np.concatenate([steps[cut:], steps[:cut]])[:-1]
    return np.where(rotated > 0, ord("U"), ord("D")).astype(np.uint8).tobytes().decode()


def uniform_otree(n_vertices: int, stream: RandomStream) -> OrderedTree:
    if n_vertices < 1:
        raise ValueError("a tree has at least one vertex")
    return tree_from_contour(uniform_dyck_word(n_vertices - 1, stream))


def uniform_av231(n: int, stream: RandomStream) -> Permutation:
    return btree_to_perm(uniform_btree(n, stream))


def uniform_av321(n: int, stream: RandomStream) -> Permutation:
    if n < 1:
        raise ValueError("n must be positive")
    return otree_to_perm(uniform_otree(n + 1, stream))


def uniform_av(model: str, n: int, stream: RandomStream) -> Permutation:
    if model == "av231":
        return uniform_av231(n, stream)
    if model == "av321":
        return uniform_av321(n, stream)
    raise ValueError(f"unknown model {model!r}")


# -- Galton-Watson trees ------------------------------------------------------


def gw_tree(law: OffspringLaw, stream: RandomStream, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """Unconditioned GW tree grown breadth-first, or ``Overflow`` past ``vertex_cap``."""
    if vertex_cap < 1:
        raise ValueError("vertex_cap must be positive")
    if law.variant == "binary_delta":
        return _binary_gw(law.p, stream, vertex_cap)
    children: list[list[int]] = [[]]
    head = 0
    while head < len(children):
        k = law.draw(stream)
        if len(children) + k > vertex_cap:
            return Overflow(vertex_cap)
        first = len(children)
        children[head] = list(range(first, first + k))
        children.extend([] for _ in range(k))
        head += 1
    return OrderedTree.from_children(children)


def _binary_gw(p: Fraction, stream: RandomStream, vertex_cap: int):
    half = p == Fraction(1, 2)
    threshold = float(p)
    present = stream.coin if half else (lambda: stream.gen.random() < threshold)
    left, right = [NONE], [NONE]
    head = 0
    while head < len(left):
        for links in (left, right):
            if present():
                if len(left) >= vertex_cap:
                    return Overflow(vertex_cap)
                links[head] = len(left)
                left.append(NONE)
                right.append(NONE)
        head += 1
    return BinaryTree.from_links(left, right)


def tstar_truncated(height_h: int, stream: RandomStream, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """The height-``h`` pointed fringe of the size-biased spine tree, pointed at ``u_0``."""
    if height_h < 0:
        raise ValueError("height must be non-negative")
    geo = OffspringLaw.geometric_half()
    children: list[list[int]] = []

    def grow() -> int | None:
        # breadth-first GW(geometric) subtree appended to ``children``; returns its root id
        start = len(children)
        children.append([])
        queue = [start]
        while queue:
            v = queue.pop()
            k = geo.draw(stream)
            if len(children) + k > vertex_cap:
                return None
            ids = list(range(len(children), len(children) + k))
            children.extend([] for _ in range(k))
            children[v] = ids
            queue.extend(ids)
        return start

    spine = grow()
    if spine is None:
        return Overflow(vertex_cap)
    pointed = spine
    for _ in range(height_h):
        k = OffspringLaw.size_biased().draw(stream)
        slot = stream.below(k)
        top = len(children)
        if top + 1 > vertex_cap:
            return Overflow(vertex_cap)
        children.append([])
        kids = []
        for j in range(k):
            if j == slot:
                kids.append(spine)
                continue
            sub = grow()
            if sub is None:
                return Overflow(vertex_cap)
            kids.append(sub)
        children[top] = kids
        spine = top
    tree, ids = _renumber(children, spine)
    return PointedTree(tree, ids[pointed])


def _renumber(children: list[list[int]], root: int) -> tuple[OrderedTree, dict[int, int]]:
    ids: dict[int, int] = {}
    stack = [root]
    while stack:
        v = stack.pop()
        ids[v] = len(ids)
        stack.extend(reversed(children[v]))
    return OrderedTree.from_children(children, root=root), ids


# -- Boltzmann 231-avoiders -----------------------------------------------------


def boltzmann_av231(stream: RandomStream, vertex_cap: int = DEFAULT_VERTEX_CAP):
    """``P(pi) = (1/2) 4**-|pi|``, ``P(empty) = 1/2``; ``Overflow`` past the cap."""
    if not stream.coin():
        return Permutation()
    t = _binary_gw(Fraction(1, 2), stream, vertex_cap)
    if isinstance(t, Overflow):
        return t
    return btree_to_perm(t)


def star_right(rp: RootedPermutation, pi) -> RootedPermutation:
    """Append a new maximum and then ``pi`` shifted above the old values."""
    k, ell = len(rp.sigma), len(pi)
    word = tuple(rp.sigma) + (ell + k + 1,) + tuple(v + k for v in pi)
    return RootedPermutation(Permutation(word), rp.root)


def star_left(rp: RootedPermutation, pi) -> RootedPermutation:
    """Prepend ``pi`` below the old values followed by a new maximum."""
    k, ell = len(rp.sigma), len(pi)
    word = tuple(pi) + (ell + k + 1,) + tuple(v + ell for v in rp.sigma)
    return RootedPermutation(Permutation(word), ell + rp.root + 1)


class _LazyInorder:
    """Walk of a Boltzmann binary tree in in-order, flipping child coins on demand.

    The same code serves the reversed walk: the two child coins are exchangeable,
    so reading the first coin as the right child gives the reverse in-order walk.
    """

    def __init__(self, stream: RandomStream, present: bool) -> None:
        self.stream = stream
        self.parent: list[int] = []
        self.depth: list[int] = []
        self.emitted: list[int] = []
        self.stack: list[int] = []
        self.cur = self._new(NONE) if present else NONE
        self.done = False

    def _new(self, parent: int) -> int:
        self.parent.append(parent)
        self.depth.append(0 if parent == NONE else self.depth[parent] + 1)
        return len(self.parent) - 1

    def take(self, m: int) -> list[int]:
        """First ``m`` vertices of the walk (fewer if the tree is smaller)."""
        while len(self.emitted) < m and not self.done:
            while self.cur != NONE:
                self.stack.append(self.cur)
                self.cur = self._new(self.cur) if self.stream.coin() else NONE
            if not self.stack:
                self.done = True
                break
            v = self.stack.pop()
            self.emitted.append(v)
            self.cur = self._new(v) if self.stream.coin() else NONE
        return self.emitted[:m]

    def is_ancestor(self, a: int, b: int) -> bool:
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        return a == b

    def ranks(self, vertices: list[int], reverse: bool) -> list[int]:
        """Relative values (post-order) of walk-prefix vertices, in the given list order."""
        pos = {v: i for i, v in enumerate(self.emitted)}

        def less(a: int, b: int) -> bool:
            # in in-order, the earlier vertex is larger exactly when it is an ancestor
            first, second = (a, b) if (pos[a] < pos[b]) != reverse else (b, a)
            earlier_is_larger = self.is_ancestor(first, second)
            return (a == second) == earlier_is_larger

        order = sorted(vertices, key=cmp_to_key(lambda a, b: -1 if less(a, b) else 1))
        rank = {v: r for r, v in enumerate(order)}
        return [rank[v] for v in vertices]


class _Limit231Builder:
    """Finite view of the iterated star construction around the root.

    Only blocks touching the current window are ever explored.  Value bands:
    every block occupies an interval of values, recorded by an integer band key.
    """

    def __init__(self, stream: RandomStream) -> None:
        self.stream = stream
        # blocks listed outward from the root: ("max", band) or ("seg", band, walk)
        self.left = [("seg", 0, _LazyInorder(stream, stream.coin()))]
        self.right = [("seg", 1, _LazyInorder(stream, stream.coin()))]
        self.root_band = 2
        self.top, self.bottom = 2, 0
        self.steps = 0

    def _entries(self, blocks, h: int) -> list[tuple]:
        out: list[tuple] = []
        for block in blocks:
            if len(out) >= h:
                break
            if block[0] == "max":
                out.append((block, None))
            else:
                out.extend((block, v) for v in block[2].take(h - len(out)))
        return out[:h]

    def grow(self, h: int, max_steps: int) -> None:
        while len(self._entries(self.left, h)) < h or len(self._entries(self.right, h)) < h:
            self.steps += 1
            if self.steps > max_steps:
                raise RuntimeError(f"window of radius {h} not stabilised after {max_steps} steps")
            if self.stream.coin():
                self.top += 2
                self.right.append(("max", self.top))
                self.right.append(("seg", self.top - 1, _LazyInorder(self.stream, self.stream.coin())))
            else:
                self.bottom -= 1
                self.top += 1
                self.left.append(("max", self.top))
                self.left.append(("seg", self.bottom, _LazyInorder(self.stream, self.stream.coin())))

    def window(self, h: int) -> RootedPermutation:
        left = self._entries(self.left, h)
        right = self._entries(self.right, h)
        keys: dict[int, tuple[int, int]] = {}
        entries = list(reversed(left)) + [(("max", self.root_band), None)] + right
        for side, reverse in ((left, True), (right, False)):
            by_block: dict[int, list[int]] = {}
            for block, v in side:
                if v is not None:
                    by_block.setdefault(id(block), []).append(v)
            for block, v in side:
                if v is not None and (id(block), v) not in keys:
                    verts = by_block[id(block)]
                    for u, r in zip(verts, block[2].ranks(verts, reverse)):
                        keys[(id(block), u)] = (block[1], r)
        values = [
            (block[1], 0) if v is None else keys[(id(block), v)]
            for block, v in entries
        ]
        return RootedPermutation(standardize(values), len(left) + 1)


def limit231_window(h: int, stream: RandomStream) -> RootedPermutation:
    """Radius-``h`` window of the limiting random order for uniform 231-avoiders."""
    return limit231_family(h, stream)[-1]


def limit231_family(h_max: int, stream: RandomStream) -> list[RootedPermutation]:
    """Windows of radii ``1..h_max`` read from one and the same sample."""
    if h_max < 1:
        raise ValueError("radius must be a positive integer")
    builder = _Limit231Builder(stream)
    out = []
    for h in range(1, h_max + 1):
        builder.grow(h, 64 * h_max)
        out.append(builder.window(h))
    return out


def limit321_windows(h: int, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` windows of radius ``h`` as rows of ranks (vectorised)."""
    if h < 1:
        raise ValueError("radius must be a positive integer")
    width = 2 * h + 1
    plus = stream.gen.integers(0, 2, (count, width))
    key = plus * width + np.arange(width)
    return np.argsort(np.argsort(key, axis=1), axis=1) + 1


def limit321_window(h: int, stream: RandomStream) -> RootedPermutation:
    """Fair +/- labels; all "-" positions below all "+" positions, each side increasing."""
    if h < 1:
        raise ValueError("radius must be a positive integer")
    labels = [stream.coin() for _ in range(2 * h + 1)]
    minus = [i for i, up in enumerate(labels) if not up]
    plus = [i for i, up in enumerate(labels) if up]
    ranks = [0] * len(labels)
    for r, i in enumerate(minus + plus, start=1):
        ranks[i] = r
    return RootedPermutation(Permutation(ranks), h + 1)
