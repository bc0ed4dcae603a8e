"""Permutations of ``{0..n-1}`` stored as tuples.

Products act on the right: ``mul(p, q)`` applies ``p`` first, then ``q``.
Documents use 1-based cycle notation such as ``"(1 2)(3 4)"``; the
conversion helpers below are the only place the offset appears.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .errors import FoamError

Perm = tuple


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p: Sequence[int], n: int | None = None) -> bool:
    if n is not None and len(p) != n:
        return False
    return sorted(p) == list(range(len(p)))


def mul(p: Perm, q: Perm) -> Perm:
    return tuple(q[i] for i in p)


def product(perms: Iterable[Perm], n: int) -> Perm:
    r = identity(n)
    for p in perms:
        r = mul(r, p)
    return r


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def power(p: Perm, k: int) -> Perm:
    if k < 0:
        p, k = inverse(p), -k
    r = identity(len(p))
    for _ in range(k):
        r = mul(r, p)
    return r


def conjugate(p: Perm, by: Perm) -> Perm:
    """Relabel points of ``p`` by ``by``: the result maps by[i] to by[p[i]]."""
    r = [0] * len(p)
    for i, j in enumerate(p):
        r[by[i]] = by[j]
    return tuple(r)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """All cycles (fixed points included), each starting at its least point."""
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        c = []
        j = i
        while not seen[j]:
            seen[j] = True
            c.append(j)
            j = p[j]
        out.append(tuple(c))
    return out


def num_cycles(p: Perm) -> int:
    return len(cycles(p))


def defect(p: Perm) -> int:
    return len(p) - num_cycles(p)


def orbits(perms: Iterable[Perm], n: int) -> list[list[int]]:
    perms = list(perms)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def is_transitive(perms: Iterable[Perm], n: int) -> bool:
    return n >= 1 and len(orbits(perms, n)) == 1


def rotate_min(seq: Sequence) -> tuple:
    """Rotation of a cyclic sequence that starts at its least element."""
    if not seq:
        return tuple(seq)
    k = min(range(len(seq)), key=lambda i: seq[i])
    return tuple(seq[k:]) + tuple(seq[:k])


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Perm:
    """Parse 1-based cycle notation; ``""``, ``"()"`` and ``"id"`` mean identity."""
    text = text.strip()
    p = list(range(n))
    if text in ("", "()", "id", "e"):
        return tuple(p)
    if _CYCLE_RE.sub("", text).strip():
        raise FoamError("E_PARSE", f"bad cycle notation {text!r}")
    used = set()
    for body in _CYCLE_RE.findall(text):
        try:
            pts = [int(t) - 1 for t in body.replace(",", " ").split()]
        except ValueError:
            raise FoamError("E_PARSE", f"bad cycle notation {text!r}") from None
        for x in pts:
            if not 0 <= x < n or x in used:
                raise FoamError("E_PARSE", f"bad point in {text!r} for degree {n}")
            used.add(x)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            p[a] = b
    return tuple(p)


def format_cycles(p: Perm) -> str:
    parts = [c for c in cycles(p) if len(c) > 1]
    if not parts:
        return "()"
    return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in parts)


def one_line(p: Perm) -> list[int]:
    return [i + 1 for i in p]


def from_one_line(images: Sequence[int]) -> Perm:
    p = tuple(int(i) - 1 for i in images)
    if not is_perm(p):
        raise FoamError("E_PARSE", f"not a permutation: {list(images)}")
    return p
