"""Permutations in one-line notation, patterns and consecutive occurrences.

Indices are 1-based as in the usual combinatorial convention; the empty
permutation is an ordinary value of size 0.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class Permutation(tuple):
    """An immutable permutation of ``1..n`` stored as its one-line word."""

    __slots__ = ()

    def __new__(cls, word: Iterable[int] = ()) -> "Permutation":
        self = super().__new__(cls, (int(x) for x in word))
        if sorted(self) != list(range(1, len(self) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self)}: {tuple(self)!r}")
        return self

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Read ``7,5,2,9``, a digit string such as ``7529`` or ``-`` for the empty word."""
        text = text.strip()
        if text in ("-", ""):
            return cls()
        if "," in text:
            return cls(int(x) for x in text.split(","))
        if not text.isdigit():
            raise ValueError(f"cannot parse permutation {text!r}")
        if len(text) > 9:
            raise ValueError("digit strings are only accepted for n <= 9; use commas")
        return cls(int(c) for c in text)

    def size(self) -> int:
        return len(self)

    def __call__(self, i: int) -> int:
        """Value at the 1-based index ``i``."""
        if not 1 <= i <= len(self):
            raise IndexError(f"index {i} outside [1, {len(self)}]")
        return tuple.__getitem__(self, i - 1)

    def __str__(self) -> str:
        return format_perm(self)

    def __repr__(self) -> str:
        return f"Permutation({format_perm(self)!r})"


def format_perm(sigma: Sequence[int], compact: bool = True) -> str:
    if len(sigma) == 0:
        return "-"
    if compact and len(sigma) <= 9:
        return "".join(str(x) for x in sigma)
    return ",".join(str(x) for x in sigma)


def as_perm(x: Sequence[int] | str) -> Permutation:
    if isinstance(x, Permutation):
        return x
    if isinstance(x, str):
        return Permutation.parse(x)
    return Permutation(x)


def standardize(values: Sequence[float]) -> Permutation:
    """The permutation with the same relative order as ``values``."""
    order = sorted(range(len(values)), key=values.__getitem__)
    out = [0] * len(values)
    for rank, pos in enumerate(order, start=1):
        out[pos] = rank
    for a, b in zip(order, order[1:]):
        if values[a] == values[b]:
            raise ValueError(f"duplicate value {values[a]!r}")
    return tuple.__new__(Permutation, out)


def pat(sigma: Sequence[int], indices: Iterable[int]) -> Permutation:
    """Pattern induced by the (1-based) index set ``indices``."""
    idx = sorted(set(indices))
    n = len(sigma)
    if idx and (idx[0] < 1 or idx[-1] > n):
        raise IndexError(f"indices must lie in [1, {n}]")
    return standardize([sigma[i - 1] for i in idx])


def pat_interval(sigma: Sequence[int], a: int, b: int) -> Permutation:
    """Pattern of the interval ``[a, b]`` (empty when ``b < a``)."""
    if b < a:
        return Permutation()
    if a < 1 or b > len(sigma):
        raise IndexError(f"interval [{a}, {b}] leaves [1, {len(sigma)}]")
    return standardize(sigma[a - 1 : b])


def c_occ(pi: Sequence[int], sigma: Sequence[int]) -> int:
    """Number of consecutive occurrences of ``pi`` in ``sigma``."""
    k = len(pi)
    if k == 0:
        raise ValueError("pattern must be nonempty")
    pi = tuple(pi)
    return sum(1 for a in range(len(sigma) - k + 1) if tuple(standardize(sigma[a : a + k])) == pi)


def c_occ_proportion(pi: Sequence[int], sigma: Sequence[int]) -> Fraction:
    """``c_occ(pi, sigma) / |sigma|`` as an exact rational."""
    if len(sigma) == 0:
        raise ValueError("host permutation must be nonempty")
    return Fraction(c_occ(pi, sigma), len(sigma))


def window_codes(sigma: Sequence[int] | np.ndarray, k: int) -> np.ndarray:
    """Integer code of the pattern of every length-``k`` window, vectorised.

    The code of a pattern ``r_1..r_k`` is ``sum (r_j - 1) * k**(k-j)``, so codes
    sort like the patterns themselves.
    """
    arr = np.asarray(sigma, dtype=np.int64)
    if k < 1 or len(arr) < k:
        return np.zeros(0, dtype=np.int64)
    win = np.lib.stride_tricks.sliding_window_view(arr, k)
    ranks = np.argsort(np.argsort(win, axis=1, kind="stable"), axis=1)
    weights = k ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return ranks @ weights


def pattern_code(pi: Sequence[int]) -> int:
    k = len(pi)
    return sum((r - 1) * k ** (k - 1 - j) for j, r in enumerate(pi))


def pattern_from_code(code: int, k: int) -> Permutation:
    digits = []
    for _ in range(k):
        code, r = divmod(code, k)
        digits.append(r + 1)
    return Permutation(reversed(digits))


def pattern_counts(sigma: Sequence[int] | np.ndarray, k: int) -> Counter:
    """Counter mapping each size-``k`` pattern to its number of consecutive occurrences."""
    codes, counts = np.unique(window_codes(sigma, k), return_counts=True)
    return Counter({pattern_from_code(int(c), k): int(m) for c, m in zip(codes, counts)})


def inverse(sigma: Sequence[int]) -> Permutation:
    out = [0] * len(sigma)
    for i, v in enumerate(sigma, start=1):
        out[v - 1] = i
    return Permutation(out)


def reverse(sigma: Sequence[int]) -> Permutation:
    return tuple.__new__(Permutation, tuple(reversed(sigma)))


def complement(sigma: Sequence[int]) -> Permutation:
    n = len(sigma)
    return tuple.__new__(Permutation, tuple(n + 1 - v for v in sigma))


def direct_sum(pi: Sequence[int], sigma: Sequence[int]) -> Permutation:
    k = len(pi)
    return Permutation(tuple(pi) + tuple(v + k for v in sigma))


def star_insert(pi: Sequence[int], m: int) -> Permutation:
    """Append a new last value ranking between ``m - 1`` and ``m``."""
    k = len(pi)
    if not 1 <= m <= k + 1:
        raise ValueError(f"m must lie in [1, {k + 1}]")
    return Permutation([v + 1 if v >= m else v for v in pi] + [m])


def indmax(sigma: Sequence[int]) -> int:
    if len(sigma) == 0:
        raise ValueError("empty permutation has no maximum")
    return tuple(sigma).index(len(sigma)) + 1


def split_at_max(sigma: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Words left and right of the maximum (not standardized)."""
    m = indmax(sigma)
    return tuple(sigma[: m - 1]), tuple(sigma[m:])


def lr_maxima(sigma: Sequence[int]) -> set[int]:
    out, best = set(), 0
    for i, v in enumerate(sigma, start=1):
        if v > best:
            out.add(i)
            best = v
    return out


def rl_maxima(sigma: Sequence[int]) -> set[int]:
    out, best = set(), 0
    for i in range(len(sigma), 0, -1):
        if sigma[i - 1] > best:
            out.add(i)
            best = sigma[i - 1]
    return out


def maxima(sigma: Sequence[int]) -> set[int]:
    return lr_maxima(sigma) | rl_maxima(sigma)


def descents(sigma: Sequence[int]) -> int:
    return sum(1 for a, b in zip(sigma, sigma[1:]) if a > b)


# -- classical avoidance ------------------------------------------------------


def _has_123(word: Sequence[int]) -> bool:
    first = second = None
    for v in word:
        if first is None or v <= first:
            first = v
        elif second is None or v <= second:
            second = v
        else:
            return True
    return False


def _has_231(word: Sequence[int]) -> bool:
    # stack sorting succeeds exactly on 231-avoiders
    stack: list[int] = []
    out_last = 0
    for v in word:
        while stack and stack[-1] < v:
            top = stack.pop()
            if top < out_last:
                return True
            out_last = top
        stack.append(v)
    while stack:
        top = stack.pop()
        if top < out_last:
            return True
        out_last = top
    return False


_SIZE3 = {
    (1, 2, 3): lambda w: _has_123(w),
    (3, 2, 1): lambda w: _has_123(complement(w)),
    (2, 3, 1): lambda w: _has_231(w),
    (1, 3, 2): lambda w: _has_231(reverse(w)),
    (2, 1, 3): lambda w: _has_231(complement(w)),
    (3, 1, 2): lambda w: _has_231(complement(reverse(w))),
}

SUBSET_SEARCH_LIMIT = 20


def avoids(sigma: Sequence[int], rho: Sequence[int]) -> bool:
    """True iff no subsequence of ``sigma`` is order-isomorphic to ``rho``."""
    rho = tuple(rho)
    k, n = len(rho), len(sigma)
    if k == 0:
        raise ValueError("pattern must be nonempty")
    if k > n:
        return True
    if k == 1:
        return False
    if k == 2:
        ascending = any(a < b for a, b in zip(sigma, sigma[1:]))
        descending = any(a > b for a, b in zip(sigma, sigma[1:]))
        return not (ascending if rho == (1, 2) else descending)
    if k == 3:
        return not _SIZE3[rho](tuple(sigma))
    if n > SUBSET_SEARCH_LIMIT:
        raise ValueError(f"subset search for |rho| >= 4 is limited to |sigma| <= {SUBSET_SEARCH_LIMIT}")
    return not any(tuple(standardize([sigma[i] for i in idx])) == rho for idx in combinations(range(n), k))
