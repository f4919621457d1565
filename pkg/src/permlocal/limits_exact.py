"""Exact limit laws, the symbolic pattern recursion for binary GW trees and
brute-force enumeration oracles."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Mapping, Sequence

from .perm_core import (
    Permutation,
    as_perm,
    avoids,
    c_occ,
    descents,
    indmax,
    inverse,
    lr_maxima,
    maxima,
    pat_interval,
    rl_maxima,
    split_at_max,
    standardize,
)


class RationalPoly:
    """Polynomial in one variable ``p`` with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction | int] = ()) -> None:
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: Fraction | int) -> "RationalPoly":
        return cls([c])

    @classmethod
    def p(cls) -> "RationalPoly":
        return cls([0, 1])

    @classmethod
    def one_minus_p(cls) -> "RationalPoly":
        return cls([1, -1])

    @classmethod
    def monomial(cls, a: int, b: int, c: Fraction | int = 1) -> "RationalPoly":
        """``c * p**a * (1-p)**b``."""
        return cls([0] * a + [c]) * cls.one_minus_p() ** b

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _lift(self, other) -> "RationalPoly":
        return other if isinstance(other, RationalPoly) else RationalPoly.constant(other)

    def __add__(self, other) -> "RationalPoly":
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "RationalPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "RationalPoly":
        other = self._lift(other)
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RationalPoly":
        out, base = RationalPoly.constant(1), self
        while k:
            if k & 1:
                out = out * base
            base, k = base * base, k >> 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPoly.constant(other)
        return isinstance(other, RationalPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def div_one_minus_p(self) -> "RationalPoly":
        """Exact quotient by ``1 - p``; raises if ``1 - p`` does not divide."""
        if not self.coeffs:
            return RationalPoly()
        # synthetic division by (p - 1), then flip the sign
        quotient = [Fraction(0)] * (len(self.coeffs) - 1)
        carry = Fraction(0)
        for i in range(len(self.coeffs) - 1, 0, -1):
            carry = self.coeffs[i] + carry
            quotient[i - 1] = carry
        if self.coeffs[0] + carry != 0:
            raise ArithmeticError("1 - p does not divide the polynomial")
        return -RationalPoly(quotient)

    def monomial_form(self) -> tuple[Fraction, int, int] | None:
        """``(c, a, b)`` with ``self == c p^a (1-p)^b``, or ``None``."""
        if not self.coeffs:
            return None
        a = next(i for i, c in enumerate(self.coeffs) if c)
        rest = RationalPoly(self.coeffs[a:])
        b = 0
        while rest.degree() > 0:
            try:
                rest = rest.div_one_minus_p()
            except ArithmeticError:
                return None
            b += 1
        return rest.coeffs[0], a, b

    def factored(self) -> str:
        form = self.monomial_form()
        if form is None:
            return self.expanded()
        c, a, b = form
        parts = [] if c == 1 else [str(c)]
        if a:
            parts.append("p" if a == 1 else f"p^{a}")
        if b:
            parts.append("(1-p)" if b == 1 else f"(1-p)^{b}")
        return "*".join(parts) or "1"

    def expanded(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("p" if i == 1 else f"p^{i}")
                coef = str(c) if (not mono or abs(c) != 1) else ("-" if c < 0 else "")
                terms.append(f"{coef}*{mono}" if mono and coef not in ("", "-") else coef + mono)
        return " + ".join(terms).replace("+ -", "- ") or "0"

    def coefficient_list(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def in_delta(self) -> list[Fraction]:
        """Coefficients in ``delta`` after substituting ``p = (1 - delta) / 2``."""
        sub = RationalPoly([Fraction(1, 2), Fraction(-1, 2)])
        acc = RationalPoly()
        for c in reversed(self.coeffs):
            acc = acc * sub + c
        return list(acc.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({self.factored()})"

    __str__ = factored


P = RationalPoly.p()
Q = RationalPoly.one_minus_p()


# -- closed-form limit laws -----------------------------------------------------


def _check_class(pi: Sequence[int], rho: tuple[int, ...]) -> Permutation:
    pi = as_perm(pi)
    if len(pi) == 0:
        raise ValueError("pattern must be nonempty")
    if not avoids(pi, rho):
        raise ValueError(f"{pi} contains {''.join(map(str, rho))}")
    return pi


def p231(pi: Sequence[int]) -> Fraction:
    """Limit density ``2^(|LRMax|+|RLMax|) / 4^|pi|`` of a 231-avoiding pattern."""
    pi = _check_class(pi, (2, 3, 1))
    return Fraction(2 ** (len(lr_maxima(pi)) + len(rl_maxima(pi))), 4 ** len(pi))


def p321(pi: Sequence[int]) -> Fraction:
    """Limit density of a 321-avoiding pattern, keyed on the descents of its inverse."""
    pi = _check_class(pi, (3, 2, 1))
    k = len(pi)
    d = descents(inverse(pi))
    if d == 0:
        return Fraction(k + 1, 2**k)
    if d == 1:
        return Fraction(1, 2**k)
    return Fraction(0)


def limit_density(model: str, pi: Sequence[int]) -> Fraction:
    """Limit of the expected proportion of ``pi`` under ``model``; 0 outside the class."""
    rho = {"av231": (2, 3, 1), "av321": (3, 2, 1)}[model]
    if not avoids(pi, rho):
        return Fraction(0)
    return p231(pi) if model == "av231" else p321(pi)


# -- symbolic recursion for the binary GW tree ----------------------------------


def _parts(pi: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    left, right = split_at_max(pi)
    return tuple(left), tuple(standardize(right)) if right else ()


def tree_probability(pi: Sequence[int]) -> RationalPoly:
    """Probability that the binary GW tree equals the tree of ``pi``: ``p^(k-1) (1-p)^(k+1)``."""
    k = len(pi)
    return RationalPoly.monomial(k - 1, k + 1)


@lru_cache(maxsize=None)
def _pat_e(pi: tuple[int, ...]) -> RationalPoly:
    if len(pi) == 1:
        return RationalPoly.constant(1)
    left, right = _parts(pi)
    if left and right:
        return (P * P * _pat_e(left) * tree_probability(right)).div_one_minus_p()
    if left:
        return P * _pat_e(left)
    return (P * tree_probability(right)).div_one_minus_p()


@lru_cache(maxsize=None)
def _pat_b(pi: tuple[int, ...]) -> RationalPoly:
    if len(pi) == 1:
        return RationalPoly.constant(1)
    left, right = _parts(pi)
    if left and right:
        return (P * P * tree_probability(left) * _pat_b(right)).div_one_minus_p()
    if left:
        return (P * tree_probability(left)).div_one_minus_p()
    return P * _pat_b(right)


@lru_cache(maxsize=None)
def _pat_j(pi: tuple[int, ...]) -> RationalPoly:
    if len(pi) == 1:
        return RationalPoly.constant(1)
    left, right = _parts(pi)
    if left and right:
        return P * P * _pat_e(left) * _pat_b(right)
    if left:
        return P * _pat_e(left)
    return P * _pat_b(right)


def symbolic_pat_j(pi: Sequence[int]) -> RationalPoly:
    """Probability that the pattern around the root of the binary GW tree is ``pi``."""
    return _pat_j(tuple(_check_class(pi, (2, 3, 1))))


def symbolic_pat_e(pi: Sequence[int]) -> RationalPoly:
    """Probability that the last ``|pi|`` entries of the binary GW tree's permutation form ``pi``."""
    return _pat_e(tuple(_check_class(pi, (2, 3, 1))))


def symbolic_pat_b(pi: Sequence[int]) -> RationalPoly:
    """Probability that the first ``|pi|`` entries of the binary GW tree's permutation form ``pi``."""
    return _pat_b(tuple(_check_class(pi, (2, 3, 1))))


def boundary_limit_b(pi: Sequence[int]) -> Fraction:
    return symbolic_pat_b(pi)(Fraction(1, 2))


def boundary_limit_e(pi: Sequence[int]) -> Fraction:
    return symbolic_pat_e(pi)(Fraction(1, 2))


def max_distance(pi: Sequence[int], j: int) -> int:
    """Gap from the maximum at ``j`` to the next maximum on the way to the global maximum."""
    lr, rl = lr_maxima(pi), rl_maxima(pi)
    if j not in lr and j not in rl:
        raise ValueError(f"{j} is not the index of a left-to-right or right-to-left maximum")
    if j == indmax(pi):
        return 0
    a = 0
    if j in lr:
        while j + 1 + a not in lr:
            a += 1
    else:
        while j - 1 - a not in rl:
            a += 1
    return a


def exponent_identity_holds(pi: Sequence[int]) -> bool:
    """``alpha + beta == |Max| - 1 + 2 * sum of max distances`` for the monomial of ``pi``."""
    form = symbolic_pat_j(pi).monomial_form()
    if form is None:
        return False
    _, a, b = form
    mx = maxima(pi)
    return a + b == len(mx) - 1 + 2 * sum(max_distance(pi, j) for j in mx)


# -- enumeration ----------------------------------------------------------------

MAX_ENUMERATION = 12


@lru_cache(maxsize=None)
def _enumerate(rho: tuple[int, ...], n: int) -> tuple[Permutation, ...]:
    if n == 1:
        return (Permutation((1,)),)
    out = []
    for sigma in _enumerate(rho, n - 1):
        # removing the maximum keeps a permutation inside either class
        for pos in range(n):
            cand = tuple(sigma[:pos]) + (n,) + tuple(sigma[pos:])
            if avoids(cand, rho):
                out.append(tuple.__new__(Permutation, cand))
    return tuple(sorted(out))


def enumerate_class(rho: Sequence[int] | str | int, n: int) -> list[Permutation]:
    """All of ``Av^n(rho)`` for ``rho`` in {231, 321}, lexicographically sorted."""
    rho = tuple(Permutation.parse(str(rho)) if isinstance(rho, (int, str)) else as_perm(rho))
    if rho not in ((2, 3, 1), (3, 2, 1)):
        raise ValueError("only 231 and 321 are supported")
    if not 1 <= n <= MAX_ENUMERATION:
        raise ValueError(f"n must lie in [1, {MAX_ENUMERATION}]")
    return list(_enumerate(rho, n))


def catalan(n: int) -> int:
    c = 1
    for i in range(n):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c


def normalization_table(k_max: int) -> list[dict]:
    """Per size: weighted 231 sum against ``4^k`` and one-inverse-descent count against ``2^k - k - 1``."""
    if k_max > MAX_ENUMERATION:
        raise ValueError(f"k_max must be at most {MAX_ENUMERATION}")
    rows = []
    for k in range(1, k_max + 1):
        weighted = sum(2 ** (len(lr_maxima(s)) + len(rl_maxima(s))) for s in enumerate_class((2, 3, 1), k))
        av321 = enumerate_class((3, 2, 1), k)
        one_descent = sum(1 for s in av321 if descents(inverse(s)) == 1)
        total321 = sum(p321(s) for s in av321)
        rows.append(
            dict(k=k, weighted231=weighted, target231=4**k, one_descent=one_descent,
                 target_one_descent=2**k - (k + 1), total321=total321)
        )
    return rows


def genfun_normalization_check(k_max: int) -> bool:
    return all(
        r["weighted231"] == r["target231"] and r["one_descent"] == r["target_one_descent"] and r["total321"] == 1
        for r in normalization_table(k_max)
    )


# -- finite permutations from a shift-invariant order -----------------------------

MAX_FINITE_ORDER = 8


def finite_from_order(marginals: Mapping[Sequence[int], Fraction | float], tolerance: float = 0.0) -> dict[Permutation, Fraction | float]:
    """Law of the size-``n`` permutation whose mass at ``rho`` is the marginal of ``inverse(rho)``.

    ``marginals`` maps each size-``n`` pattern ``tau`` to the probability that the
    order places positions ``tau_1 < ... < tau_n``; missing entries count as 0.
    """
    if not marginals:
        raise ValueError("no marginals supplied")
    sizes = {len(t) for t in marginals}
    if len(sizes) != 1:
        raise ValueError("all marginals must concern patterns of the same size")
    n = sizes.pop()
    if n > MAX_FINITE_ORDER:
        raise ValueError(f"n must be at most {MAX_FINITE_ORDER}")
    total = sum(marginals.values())
    if abs(total - 1) > tolerance:
        raise ValueError(f"marginals sum to {total}, not 1")
    return {inverse(tau): w for tau, w in ((as_perm(t), w) for t, w in marginals.items()) if w}


def rooted_law_from_finite(law: Mapping[Permutation, Fraction], h: int) -> dict[Permutation, Fraction]:
    """``pi -> sum_rho P(rho) c_occ(pi, rho) / (n - 2h)`` over patterns of size ``2h+1``."""
    n = len(next(iter(law)))
    if n < 2 * h + 1:
        raise ValueError("need n >= 2h + 1")
    out: dict[Permutation, Fraction] = {}
    for rho, w in law.items():
        for a in range(1, n - 2 * h + 1):
            pi = pat_interval(rho, a, a + 2 * h)
            out[pi] = out.get(pi, Fraction(0)) + w * Fraction(1, n - 2 * h)
    return out


def limit321_order_marginals(n: int) -> dict[Permutation, Fraction]:
    """Exact marginals ``tau -> P(tau_1 < ... < tau_n)`` for the +/- labelled order on ``n`` positions."""
    if not 1 <= n <= MAX_FINITE_ORDER:
        raise ValueError(f"n must lie in [1, {MAX_FINITE_ORDER}]")
    out: dict[Permutation, Fraction] = {}
    for labels in product((0, 1), repeat=n):
        word = standardize([lab * n + i for i, lab in enumerate(labels)])
        tau = inverse(word)
        out[tau] = out.get(tau, Fraction(0)) + Fraction(1, 2**n)
    return out


def limit231_order_marginals(n: int) -> dict[Permutation, Fraction]:
    """Exact marginals for the 231 limit order, from the window law and shift-invariance."""
    if not 1 <= n <= MAX_FINITE_ORDER:
        raise ValueError(f"n must lie in [1, {MAX_FINITE_ORDER}]")
    window: dict[Permutation, Fraction] = {}
    if n % 2:
        window = {s: p231(s) for s in enumerate_class((2, 3, 1), n)}
    else:
        for s in enumerate_class((2, 3, 1), n + 1):
            w = pat_interval(s, 1, n)
            window[w] = window.get(w, Fraction(0)) + p231(s)
    return {inverse(w): v for w, v in window.items()}


def all_permutations(n: int) -> list[Permutation]:
    return [tuple.__new__(Permutation, p) for p in permutations(range(1, n + 1))]


def cocc_table(pi: Sequence[int], sigma: Sequence[int]) -> tuple[int, Fraction]:
    count = c_occ(pi, sigma)
    return count, Fraction(count, len(sigma))
