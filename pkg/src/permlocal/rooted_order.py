"""Rooted permutations seen as total orders on integer intervals around 0."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .perm_core import Permutation, as_perm, format_perm, pat_interval


@dataclass(frozen=True)
class RootedPermutation:
    sigma: Permutation
    root: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", as_perm(self.sigma))
        if not 1 <= self.root <= len(self.sigma):
            raise ValueError(f"root {self.root} outside [1, {len(self.sigma)}]")

    @classmethod
    def parse(cls, text: str) -> "RootedPermutation":
        """Read ``<perm>@<root>``, e.g. ``7,5,2,9,3,4,8,6,1@4``."""
        word, sep, root = text.strip().rpartition("@")
        if not sep:
            raise ValueError(f"expected <perm>@<root>, got {text!r}")
        return cls(Permutation.parse(word), int(root))

    def __len__(self) -> int:
        return len(self.sigma)

    def __str__(self) -> str:
        return f"{format_perm(self.sigma, compact=False)}@{self.root}"


@dataclass(frozen=True)
class FiniteOrder:
    """A total order on ``[lo, hi]`` (with ``lo <= 0 <= hi``).

    ``ranks[x - lo]`` is the rank of position ``x``; rank 1 is the smallest.
    """

    lo: int
    hi: int
    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.lo <= 0 <= self.hi:
            raise ValueError("interval must contain 0")
        if sorted(self.ranks) != list(range(1, self.hi - self.lo + 2)):
            raise ValueError("ranks must be a permutation of the interval size")

    def rank(self, x: int) -> int:
        return self.ranks[x - self.lo]

    def __contains__(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def precedes(self, x: int, y: int) -> bool:
        """``x ≼ y``."""
        return self.rank(x) <= self.rank(y)

    def chain(self) -> list[int]:
        """Positions listed from the smallest to the largest element."""
        out = [0] * len(self.ranks)
        for offset, r in enumerate(self.ranks):
            out[r - 1] = self.lo + offset
        return out

    def as_word(self) -> Permutation:
        """The chain shifted to ``[1, n]``; this is the inverse of the rooted permutation."""
        return Permutation(x - self.lo + 1 for x in self.chain())


def to_order(rp: RootedPermutation) -> FiniteOrder:
    n, i = len(rp.sigma), rp.root
    return FiniteOrder(1 - i, n - i, tuple(rp.sigma))


def from_order(fo: FiniteOrder) -> RootedPermutation:
    return RootedPermutation(Permutation(fo.ranks), 1 - fo.lo)


def _as_rooted(x: RootedPermutation | FiniteOrder) -> RootedPermutation:
    return from_order(x) if isinstance(x, FiniteOrder) else x


def restrict(x: RootedPermutation | FiniteOrder, h: int) -> RootedPermutation:
    """The rooted pattern seen in the window of radius ``h`` around the root."""
    if h < 1:
        raise ValueError("radius must be a positive integer")
    rp = _as_rooted(x)
    n, i = len(rp.sigma), rp.root
    a, b = max(1, i - h), min(n, i + h)
    return RootedPermutation(pat_interval(rp.sigma, a, b), i - a + 1)


def local_distance(x: RootedPermutation | FiniteOrder, y: RootedPermutation | FiniteOrder) -> Fraction:
    """``2**-h`` for the largest radius ``h`` at which both restrictions agree."""
    x, y = _as_rooted(x), _as_rooted(y)
    if x == y:
        return Fraction(0)
    reach = max(x.root - 1, len(x) - x.root, y.root - 1, len(y) - y.root, 1)
    h = 0
    while h < reach and restrict(x, h + 1) == restrict(y, h + 1):
        h += 1
    # agreement at the full reach would force x == y
    return Fraction(1, 2**h)


def is_consistent(family: Sequence[RootedPermutation]) -> bool:
    """Whether ``family[h-1]`` is the radius-``h`` restriction of ``family[h]`` for each ``h``."""
    if not family:
        raise ValueError("family must be nonempty")
    return all(restrict(family[h], h) == family[h - 1] for h in range(1, len(family)))


def glue(family: Sequence[RootedPermutation]) -> FiniteOrder:
    """Union of a consistent family, i.e. the order of its largest member."""
    if not is_consistent(family):
        raise ValueError("cannot glue an inconsistent family")
    return to_order(family[-1])


def in_shift_set(fo: FiniteOrder | RootedPermutation, pi: Sequence[int], s: int) -> bool:
    """Membership of the order in the shifted pattern set for ``pi`` and shift ``s``."""
    if isinstance(fo, RootedPermutation):
        fo = to_order(fo)
    k = len(pi)
    if not (fo.lo <= 1 + s and k + s <= fo.hi):
        return False
    ranks = [fo.rank(v + s) for v in pi]
    return all(a < b for a, b in zip(ranks, ranks[1:]))
