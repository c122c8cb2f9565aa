"""Lexicographic ranking of k-subsets and wedge-product merge signs.

Subsets are plain tuples of strictly increasing 0-based indices. The basis of
Lambda^k C^d is ordered lexicographically, which is exactly the order
produced by ``itertools.combinations(range(d), k)``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Sequence, Tuple

Subset = Tuple[int, ...]


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); zero when k > n."""
    if n < 0 or k < 0:
        raise ValueError(f"binomial needs nonnegative arguments, got ({n}, {k})")
    # Python integers are arbitrary precision, so there is nothing to wrap.
    return comb(n, k)


def validate_subset(s: Sequence[int], d: int) -> Subset:
    s = tuple(int(x) for x in s)
    if len(s) > d:
        raise ValueError(f"subset {s} has more than d={d} elements")
    for i, x in enumerate(s):
        if x < 0 or x >= d:
            raise ValueError(f"element {x} of {s} outside [0, {d})")
        if i and s[i - 1] >= x:
            raise ValueError(f"subset {s} is not strictly increasing")
    return s


def rank(s: Sequence[int], d: int) -> int:
    """0-based position of ``s`` among all |s|-subsets of range(d) in lex order."""
    s = validate_subset(s, d)
    k = len(s)
    # Count the subsets that sort after s and subtract from the total.
    after = sum(comb(d - 1 - x, k - i) for i, x in enumerate(s))
    return comb(d, k) - 1 - after


def unrank(r: int, d: int, k: int) -> Subset:
    """Inverse of :func:`rank`."""
    total = binomial(d, k)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} out of range [0, {total}) for d={d}, k={k}")
    out = []
    x = 0
    for i in range(k):
        # skip all subsets whose i-th element is x
        while True:
            block = comb(d - 1 - x, k - 1 - i)
            if r < block:
                break
            r -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def merge_sign(a: Sequence[int], c: Sequence[int]) -> Tuple[Subset, int]:
    """Sorted union of disjoint ``a`` and ``c`` and the sign of the sorting permutation.

    e_a ^ e_c = sign * e_{a u c} in the wedge basis.
    """
    a = tuple(a)
    c = tuple(c)
    if set(a) & set(c):
        raise ValueError(f"subsets {a} and {c} are not disjoint")
    inversions = sum(1 for x in a for y in c if x > y)
    return tuple(sorted(a + c)), (-1 if inversions % 2 else 1)


@lru_cache(maxsize=None)
def subsets(d: int, k: int) -> Tuple[Subset, ...]:
    """All k-subsets of range(d) in lex (= rank) order."""
    return tuple(itertools.combinations(range(d), k))


@lru_cache(maxsize=None)
def rank_table(d: int, k: int) -> dict:
    return {s: i for i, s in enumerate(subsets(d, k))}
