"""
Bit tricks for monomials stored as bitmasks.

Bit a set means generator a is present; monomials are always read in
increasing generator order.
"""

from typing import Iterable, List, Sequence


def popcount(mask: int) -> int:
    """Number of set bits."""
    return bin(mask).count('1')


def bits_of(mask: int) -> List[int]:
    """Indices of set bits, increasing."""
    out = []
    index = 0
    while mask:
        if mask & 1:
            out.append(index)
        mask >>= 1
        index += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for index in indices:
        mask |= 1 << index
    return mask


def below(mask: int, a: int) -> int:
    """Count of set bits strictly below position a."""
    return popcount(mask & ((1 << a) - 1))


def reorder_sign(left: int, right: int) -> int:
    """
    Sign picked up when the product (monomial left)(monomial right) is
    rewritten in increasing order.

    Returns 0 when the monomials share a generator.
    """
    if left & right:
        return 0
    swaps = 0
    for b in bits_of(right):
        swaps += popcount(left >> (b + 1))
    return -1 if swaps & 1 else 1


def sort_sign(sequence: Sequence[int]) -> int:
    """Sign of the permutation sorting a sequence of distinct integers."""
    inversions = 0
    items = list(sequence)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                inversions += 1
    return -1 if inversions & 1 else 1
