"""GF(2) row reduction on int bitsets.

Bit ``i`` of a row is column ``i``; the pivot of a row is its lowest set bit,
so callers order their columns so that the preferred pivots come first.
"""

from __future__ import annotations

from typing import Callable, Iterable, TypeVar

T = TypeVar("T")


def low_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def iter_bits(v: int):
    while v:
        b = v & -v
        yield b.bit_length() - 1
        v ^= b


def rref(rows: Iterable[int]) -> dict[int, int]:
    """Reduced row echelon form. Returns ``{pivot column: row}``."""
    table: dict[int, int] = {}
    for v in rows:
        v = reduce_vector(v, table)
        if not v:
            continue
        p = low_bit(v)
        for q, r in table.items():
            if (r >> p) & 1:
                table[q] = r ^ v
        table[p] = v
    return table


def reduce_vector(v: int, table: dict[int, int]) -> int:
    """Reduce ``v`` against an RREF table (one pass suffices)."""
    if not table:
        return v
    mask = pivot_mask(table)
    x = v & mask
    while x:
        p = low_bit(x)
        v ^= table[p]
        x = v & mask
    return v


def pivot_mask(table: dict[int, int]) -> int:
    m = 0
    for p in table:
        m |= 1 << p
    return m


def rank(rows: Iterable[int]) -> int:
    return len(rref(rows))


def eliminate(
    rows: list[tuple[int, T]], combine: Callable[[T, T], T]
) -> tuple[dict[int, tuple[int, T]], list[T]]:
    """Row-reduce ``(mask, payload)`` pairs, carrying payloads along.

    Returns the RREF table ``{pivot: (mask, payload)}`` and the payloads of
    rows whose mask reduced to zero (these must vanish for consistency).
    """
    table: dict[int, tuple[int, T]] = {}
    leftovers: list[T] = []
    for mask, payload in rows:
        for p in sorted(table):
            if (mask >> p) & 1:
                pm, pp = table[p]
                mask ^= pm
                payload = combine(payload, pp)
        if not mask:
            leftovers.append(payload)
            continue
        p = low_bit(mask)
        for q in list(table):
            qm, qp = table[q]
            if (qm >> p) & 1:
                table[q] = (qm ^ mask, combine(qp, payload))
        table[p] = (mask, payload)
    return table, leftovers
