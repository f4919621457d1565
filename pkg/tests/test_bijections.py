import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from permlocal.bijections import (
    btree_to_perm,
    e_minus,
    e_plus,
    has_separating_line,
    otree_to_perm,
    perm_to_btree,
    perm_to_otree,
    window_set,
)
from permlocal.limits_exact import enumerate_class
from permlocal.perm_core import Permutation, c_occ, lr_maxima, pat, rl_maxima, split_at_max, standardize
from permlocal.trees import (
    NONE,
    BinaryTree,
    OrderedTree,
    all_binary_trees,
    all_ordered_trees,
    inorder,
    leaf_labels,
    tree_from_contour,
)

av231 = st.integers(1, 8).flatmap(lambda n: st.sampled_from(enumerate_class(231, n)))
av321 = st.integers(1, 8).flatmap(lambda n: st.sampled_from(enumerate_class(321, n)))


class TestBinary:
    def test_small_examples(self):
        assert perm_to_btree((1,)) == BinaryTree.single()
        assert perm_to_btree((2, 1)) == BinaryTree((NONE, NONE), (1, NONE))
        assert perm_to_btree((1, 2)) == BinaryTree((1, NONE), (NONE, NONE))

    def test_rejects_231(self):
        with pytest.raises(ValueError):
            perm_to_btree((2, 3, 1))
        with pytest.raises(ValueError):
            perm_to_btree(())

    def test_exhaustive_roundtrip(self):
        for n in range(1, 9):
            for t in all_binary_trees(n):
                s = btree_to_perm(t)
                assert s == oracles.btree_perm(t.left, t.right)
                assert perm_to_btree(s) == t
            for s in enumerate_class(231, n):
                assert btree_to_perm(perm_to_btree(s)) == s

    @given(av231)
    def test_maxima_are_branches(self, s):
        t = perm_to_btree(s)
        # in-order position i is the vertex carrying entry i
        vertex_at = inorder(t)
        assert {t.address(vertex_at[i - 1]) for i in lr_maxima(s)} == {(1,) * j for j in range(len(lr_maxima(s)))}
        assert {t.address(vertex_at[i - 1]) for i in rl_maxima(s)} == {(2,) * j for j in range(len(rl_maxima(s)))}

    @given(av231, st.sampled_from(enumerate_class(231, 2) + enumerate_class(231, 3)))
    def test_subtree_recursion(self, s, pi):
        left, right = split_at_max(s)
        ell, m, k = len(left) + 1, pi.index(max(pi)) + 1, len(pi)
        a, b = ell - m + 1, ell + k - m
        crossing = int(a >= 1 and b <= len(s) and pat(s, range(a, b + 1)) == pi)
        sub = sum(c_occ(pi, standardize(w)) for w in (left, right) if w)
        assert c_occ(pi, s) == sub + crossing


class TestOrdered:
    def test_small_examples(self):
        assert otree_to_perm(tree_from_contour("UD")) == (1,)
        assert otree_to_perm(tree_from_contour("UUDD")) == (2, 1)
        assert otree_to_perm(tree_from_contour("UDUD")) == (1, 2)
        assert otree_to_perm(OrderedTree.single()) == ()

    def test_rejects_321(self):
        with pytest.raises(ValueError):
            perm_to_otree((3, 2, 1))

    def test_exhaustive_roundtrip_and_q_transport(self):
        for n in range(1, 9):
            for t in all_ordered_trees(n + 1):
                s = otree_to_perm(t)
                assert s == oracles.otree_perm(t.children)
                assert perm_to_otree(s) == t
            for s in enumerate_class(321, n):
                t = perm_to_otree(s)
                assert len(t) == n + 1 and otree_to_perm(t) == s
                labels_s, labels_q = leaf_labels(t)
                assert labels_q == e_plus(s)
                assert labels_s == [s[q - 1] for q in labels_q]


class TestDiagonalSets:
    def test_examples(self):
        assert e_plus(Permutation.identity(5)) == [1, 2, 3, 4, 5] and e_minus(Permutation.identity(5)) == []
        assert e_plus((2, 1)) == [1] and e_minus((2, 1)) == [2]
        s = Permutation.parse("14526738")
        assert e_plus(s) == [1, 2, 3, 5, 6, 8] and e_minus(s) == [4, 7]

    @given(av321)
    def test_partition_into_increasing_runs(self, s):
        up, down = e_plus(s), e_minus(s)
        assert sorted(up + down) == list(range(1, len(s) + 1))
        for idx in (up, down):
            vals = [s[i - 1] for i in idx]
            assert vals == sorted(vals)


class TestWindows:
    def test_identity(self):
        s = Permutation.identity(6)
        assert window_set(s, 3, 2) == frozenset({-2, -1, 0, 1, 2})
        assert window_set(s, 1, 2) == frozenset({0, 1, 2})
        assert all(has_separating_line(s, i, k) for i in range(1, 7) for k in (1, 2, 3))

    def test_small_examples(self):
        assert window_set((2, 1), 1, 1) == frozenset({0})
        assert has_separating_line((2, 1), 1, 1)
        assert not has_separating_line(Permutation.parse("214365"), 3, 2)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            window_set((1,), 2, 1)
        with pytest.raises(ValueError):
            has_separating_line((1,), 1, 0)

    @given(av321, st.integers(1, 3), st.data())
    def test_against_definitions(self, s, k, data):
        i = data.draw(st.integers(1, len(s)))
        assert has_separating_line(s, i, k) == oracles.separating_line(s, i, k)
        up = set(e_plus(s))
        assert window_set(s, i, k) == {x for x in range(-k, k + 1) if x + i in up}
        # with a separating line the window has at most one inverse descent
        lo, hi = max(1, i - k), min(len(s), i + k)
        w = standardize(s[lo - 1 : hi])
        if has_separating_line(s, i, k):
            assert oracles.inverse_descents(w) <= 1
