"""Multi-indices over the base directions (t, x, y, z)."""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

MultiIndex = tuple  # (e_t, e_x, e_y, e_z)

ZERO_INDEX: MultiIndex = (0, 0, 0, 0)


def unit(direction: int) -> MultiIndex:
    s = [0, 0, 0, 0]
    s[direction] = 1
    return tuple(s)


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def sub(a: MultiIndex, b: MultiIndex) -> MultiIndex | None:
    """``a - b`` or ``None`` when some component would go negative."""
    d = (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])
    return d if min(d) >= 0 else None


def order(a: MultiIndex) -> int:
    return a[0] + a[1] + a[2] + a[3]


def index_factorial(a: MultiIndex) -> int:
    return factorial(a[0]) * factorial(a[1]) * factorial(a[2]) * factorial(a[3])


@lru_cache(maxsize=None)
def multi_indices(n: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of order exactly ``n``, lexicographically descending (t first)."""
    out = []
    for a in range(n, -1, -1):
        for b in range(n - a, -1, -1):
            for c in range(n - a - b, -1, -1):
                out.append((a, b, c, n - a - b - c))
    return tuple(out)


@lru_cache(maxsize=None)
def multi_indices_upto(n: int) -> tuple[MultiIndex, ...]:
    return tuple(s for k in range(n + 1) for s in multi_indices(k))


def count_upto(n: int, dims: int = 4) -> int:
    return comb(n + dims, dims)


def to_key(a: MultiIndex) -> str:
    """JSON key form ``"e_t e_x e_y e_z"``."""
    return " ".join(str(e) for e in a)


def from_key(key: str) -> MultiIndex:
    parts = tuple(int(p) for p in key.split())
    if len(parts) != 4 or min(parts) < 0:
        raise ValueError(f"bad multi-index key {key!r}")
    return parts
