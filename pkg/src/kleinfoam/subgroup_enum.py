"""Finite-index subgroups of surface-group presentations and their covers.

A subgroup of index d is stored as its coset table: the right action of each
generator on the d cosets, coset 0 being the subgroup itself. Tables are
standardized: cosets are numbered in order of first appearance when the
table is read coset by coset, column by column (g1, g1^-1, g2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import perm as P
from .errors import FoamError
from .group_presentations import (Presentation, TopType, euler_char_of_type, parse_word,
                                  presentation_of_type)

DEFAULT_BOUND = 10_000


@dataclass(frozen=True)
class CosetTable:
    presentation: Presentation
    perms: tuple[tuple[int, ...], ...]  # one per generator, in presentation order

    @property
    def index(self) -> int:
        return len(self.perms[0]) if self.perms else 1

    def action(self, name: str) -> tuple[int, ...]:
        return self.perms[self.presentation.names.index(name)]

    def act(self, coset: int, word) -> int:
        """Right action of a word given as (name, exponent) pairs."""
        names = self.presentation.names
        for name, e in word:
            p = self.perms[names.index(name)]
            if e > 0:
                coset = p[coset]
            else:
                coset = P.inverse(p)[coset]
        return coset

    def to_doc(self) -> dict:
        return {"format": 1, "type": str(self.presentation.type), "index": self.index,
                "generators": {n: P.one_line(p) for n, p in zip(self.presentation.names, self.perms)}}

    @classmethod
    def from_doc(cls, doc) -> "CosetTable":
        try:
            pres = presentation_of_type(TopType.parse(doc["type"]))
            gens = doc["generators"]
            perms = tuple(P.from_one_line(gens[n]) for n in pres.names)
        except KeyError as exc:
            raise FoamError("E_PARSE", f"coset table document: missing {exc}") from None
        except TypeError as exc:
            raise FoamError("E_PARSE", f"coset table document: {exc}") from None
        if len({len(p) for p in perms}) > 1 or (perms and len(perms[0]) != doc.get("index", len(perms[0]))):
            raise FoamError("E_PARSE", "coset table permutations have inconsistent degrees")
        t = cls(pres, perms)
        if not _relators_hold(pres, perms, t.index) or not P.is_transitive(perms, t.index):
            raise FoamError("E_PARSE", "not a transitive action satisfying the relators")
        return t

    def key(self) -> tuple:
        return (self.index, self.perms)


def _columns(pres: Presentation):
    return 2 * len(pres.generators)


def _word_cols(pres: Presentation, word) -> list[int]:
    idx = {n: i for i, n in enumerate(pres.names)}
    return [2 * idx[n] + (0 if e > 0 else 1) for n, e in word]


def _inv(x: int) -> int:
    return x ^ 1


def _relators_hold(pres: Presentation, perms, n: int) -> bool:
    names = pres.names
    invs = [P.inverse(p) for p in perms]
    for rel in pres.relators:
        for start in range(n):
            c = start
            for name, e in rel:
                k = names.index(name)
                c = perms[k][c] if e > 0 else invs[k][c]
            if c != start:
                return False
    return True


def _standardize(table: list[list[int]], start: int, ncols: int) -> tuple[tuple[int, ...], ...] | None:
    """Renumber a complete table from ``start`` in first-encounter order; returns
    the generator permutations."""
    new = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        for x in range(ncols):
            d = table[c][x]
            if d not in new:
                new[d] = len(order)
                order.append(d)
    n = len(order)
    perms = []
    for x in range(0, ncols, 2):
        p = [0] * n
        for c in order:
            p[new[c]] = new[table[c][x]]
        perms.append(tuple(p))
    return tuple(perms)


def coset_enumeration(pres: Presentation, subgroup_words, bound: int = DEFAULT_BOUND) -> CosetTable:
    """Todd-Coxeter (relator-based, with coincidence processing).

    ``subgroup_words`` are words as (name, exponent) pairs or strings such as
    ``"c1_1 c1_2"``. Raises E_BOUND_EXCEEDED when more than ``bound`` cosets
    would be needed.
    """
    ncols = _columns(pres)
    words = [parse_word(w, pres.names) if isinstance(w, str) else tuple(w) for w in subgroup_words]
    rels = [_word_cols(pres, r) for r in pres.relators]
    sub = [_word_cols(pres, w) for w in words]
    table: list[list[int]] = [[-1] * ncols]
    parent = [0]

    def rep(c):
        r = c
        while parent[r] != r:
            r = parent[r]
        while parent[c] != r:
            parent[c], c = r, parent[c]
        return r

    def define(a, x):
        if len(table) >= bound:
            raise FoamError("E_BOUND_EXCEEDED", f"more than {bound} cosets")
        b = len(table)
        table.append([-1] * ncols)
        parent.append(b)
        table[a][x] = b
        table[b][_inv(x)] = a

    def coincidence(a, b):
        queue = []

        def merge(k, l):
            k, l = rep(k), rep(l)
            if k != l:
                lo, hi = min(k, l), max(k, l)
                parent[hi] = lo
                queue.append(hi)

        merge(a, b)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(ncols):
                d = table[g][x]
                if d == -1:
                    continue
                if table[d][_inv(x)] == g:
                    table[d][_inv(x)] = -1
                mu, nu = rep(g), rep(d)
                if table[mu][x] != -1:
                    merge(nu, table[mu][x])
                elif table[nu][_inv(x)] != -1:
                    merge(mu, table[nu][_inv(x)])
                else:
                    table[mu][x] = nu
                    table[nu][_inv(x)] = mu

    def scan_and_fill(a, w):
        if not w:
            return
        f, i, b, j = a, 0, a, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] != -1:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != a:
                    coincidence(f, a)
                return
            while j >= i and table[b][_inv(w[j])] != -1:
                b = table[b][_inv(w[j])]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][_inv(w[i])] = f
                return
            define(f, w[i])

    for w in sub:
        scan_and_fill(0, w)
    a = 0
    while a < len(table):
        if parent[a] == a:
            for r in rels:
                if parent[a] != a:
                    break
                scan_and_fill(a, r)
            if parent[a] == a:
                for x in range(ncols):
                    if table[a][x] == -1:
                        define(a, x)
        a += 1
    live = [c for c in range(len(table)) if parent[c] == c]
    compact = {c: i for i, c in enumerate(live)}
    small = [[compact[rep(table[c][x])] for x in range(ncols)] for c in live]
    perms = _standardize(small, 0, ncols) if ncols else ()
    t = CosetTable(pres, perms if ncols else ())
    n = len(live)
    if ncols and not _relators_hold(pres, perms, n):
        raise FoamError("E_INCONSISTENT", "coset enumeration produced an invalid table")
    return t


# ---------------------------------------------------------------- low index

def low_index_subgroups(pres: Presentation, max_index: int) -> list[CosetTable]:
    """One coset table per conjugacy class of subgroups of index <= max_index."""
    if max_index < 1:
        raise FoamError("E_PARSE", "max index must be >= 1")
    ncols = _columns(pres)
    if ncols == 0:
        return [CosetTable(pres, ())]
    rels = [_word_cols(pres, r) for r in pres.relators]
    results: list[CosetTable] = []

    def deduce(T, n) -> bool:
        changed = True
        while changed:
            changed = False
            for a in range(n):
                for w in rels:
                    f, i, b, j = a, 0, a, len(w) - 1
                    while i <= j and T[f][w[i]] != -1:
                        f = T[f][w[i]]
                        i += 1
                    if i > j:
                        if f != a:
                            return False
                        continue
                    while j >= i and T[b][_inv(w[j])] != -1:
                        b = T[b][_inv(w[j])]
                        j -= 1
                    if j < i:
                        if f != b:
                            return False
                        continue
                    if i == j:
                        x = w[i]
                        if T[f][x] != -1 or T[b][_inv(x)] != -1:
                            return False
                        T[f][x] = b
                        T[b][_inv(x)] = f
                        changed = True
        return True

    def canonical(T, n) -> bool:
        """False if some other basepoint yields a lexicographically smaller table."""
        for s in range(1, n):
            new = {s: 0}
            old = [s]
            done = False
            for c_new in range(n):
                if done:
                    break
                if c_new >= len(old):
                    break
                c = old[c_new]
                for x in range(ncols):
                    d = T[c][x]
                    mine = T[c_new][x]
                    if d == -1 or mine == -1:
                        done = True
                        break
                    if d not in new:
                        new[d] = len(old)
                        old.append(d)
                    if new[d] < mine:
                        return False
                    if new[d] > mine:
                        done = True
                        break
        return True

    def search(T, n):
        for a in range(n):
            for x in range(ncols):
                if T[a][x] == -1:
                    break
            else:
                continue
            break
        else:
            perms = tuple(tuple(T[c][x] for c in range(n)) for x in range(0, ncols, 2))
            results.append(CosetTable(pres, perms))
            return
        targets = [b for b in range(n) if T[b][_inv(x)] == -1]
        if n < max_index:
            targets.append(n)
        for b in targets:
            U = [row[:] for row in T]
            m = n
            if b == n:
                U.append([-1] * ncols)
                m = n + 1
            U[a][x] = b
            U[b][_inv(x)] = a
            if deduce(U, m) and canonical(U, m):
                search(U, m)

    search([[-1] * ncols], 1)
    results.sort(key=lambda t: t.key())
    return results


def subgroup_generators(table: CosetTable) -> list[tuple[tuple[str, int], ...]]:
    """Schreier generators of the subgroup, as words."""
    pres = table.presentation
    n = table.index
    names = pres.names
    rep: dict[int, tuple] = {0: ()}
    order = [0]
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        for k, name in enumerate(names):
            for e in (1, -1):
                d = table.perms[k][c] if e > 0 else P.inverse(table.perms[k])[c]
                if d not in rep:
                    rep[d] = rep[c] + ((name, e),)
                    order.append(d)
    gens = []
    for c in range(n):
        for k, name in enumerate(names):
            d = table.perms[k][c]
            word = rep[c] + ((name, 1),) + tuple((nm, -e) for nm, e in reversed(rep[d]))
            red = _free_reduce(word)
            if red and red not in gens:
                gens.append(red)
    return gens


def _free_reduce(word):
    out: list = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


# ---------------------------------------------------------------- cover typing

@dataclass(frozen=True)
class CoverArc:
    j: int  # 1-based reflection index on the base oval
    coset: int
    forward: bool = True


@dataclass(frozen=True)
class CoverType:
    type: TopType
    orientable: bool
    ovals: dict  # base oval index -> tuple of circles (tuples of CoverArc)
    cusps: int  # interior punctures coming from corners
    euler: Fraction

    def to_doc(self) -> dict:
        return {"type": str(self.type), "orientable": self.orientable, "euler": str(self.euler),
                "corner_cusps": self.cusps,
                "ovals": {str(i): [[[a.j, a.coset + 1, "fwd" if a.forward else "bwd"] for a in c] for c in cs]
                          for i, cs in sorted(self.ovals.items())}}


class _Oval:
    def __init__(self, table: CosetTable, i: int):
        pres = table.presentation
        b = pres.type.b
        if not 1 <= i <= len(b):
            raise FoamError("E_BAD_OVAL", f"no oval {i}")
        if b[i - 1] < 1:
            raise FoamError("E_BAD_OVAL", f"oval {i} carries no reflections")
        self.b = b[i - 1]
        self.c = [table.action(f"c{i}_{j}") for j in range(1, self.b + 1)]
        self.e = table.action(f"e{i}")
        self.einv = P.inverse(self.e)
        self.n = table.index

    def A(self, j, z):
        return self.c[j - 1][z]

    def B(self, j, z):
        if j < self.b:
            return self.c[j][z]
        return self.einv[self.c[0][self.e[z]]]

    def after_forward(self, j, x) -> CoverArc:
        """Arc following (j, x) traversed forward, past the corner at its end."""
        z = x
        while True:
            nz = self.B(j, z)
            if nz == z:
                return CoverArc(j + 1, z) if j < self.b else CoverArc(1, self.e[z])
            z = nz
            nz = self.A(j, z)
            if nz == z:
                return CoverArc(j, z, False)
            z = nz

    def after_backward(self, j, y) -> CoverArc:
        """Arc following (j, y) traversed backward, past the corner at its start."""
        if j > 1:
            k, z = j - 1, y
        else:
            k, z = self.b, self.einv[y]
        while True:
            nz = self.A(k, z)
            if nz == z:
                return CoverArc(k, z, False)
            z = nz
            nz = self.B(k, z)
            if nz == z:
                return CoverArc(k + 1, z) if k < self.b else CoverArc(1, self.e[z])
            z = nz

    def corner_cycles(self) -> int:
        """Corner orbits of the dihedral pair with no fixed coset."""
        count = 0
        for j in range(1, self.b + 1):
            seen = set()
            for z0 in range(self.n):
                if z0 in seen:
                    continue
                orbit, stack = {z0}, [z0]
                while stack:
                    z = stack.pop()
                    for w in (self.A(j, z), self.B(j, z)):
                        if w not in orbit:
                            orbit.add(w)
                            stack.append(w)
                seen |= orbit
                if all(self.A(j, z) != z and self.B(j, z) != z for z in orbit):
                    count += 1
        return count


def _canon_circle(arcs: list[CoverArc]) -> tuple[CoverArc, ...]:
    key = lambda a: (a.j, a.coset)
    k = min(range(len(arcs)), key=lambda t: key(arcs[t]))
    if not arcs[k].forward:
        arcs = [CoverArc(a.j, a.coset, not a.forward) for a in reversed(arcs)]
        k = min(range(len(arcs)), key=lambda t: key(arcs[t]))
    return tuple(arcs[k:] + arcs[:k])


def oval_structure(table: CosetTable, i: int) -> list[tuple[CoverArc, ...]]:
    """Cover boundary circles over base oval ``i``: cyclic sequences of arcs
    ``(j, coset)``, one arc per coset fixed by ``c_{i,j}``."""
    ov = _Oval(table, i)
    arcs = [(j, x) for j in range(1, ov.b + 1) for x in range(ov.n) if ov.A(j, x) == x]
    used = set()
    circles = []
    for j, x in arcs:
        if (j, x) in used:
            continue
        seq = [CoverArc(j, x)]
        used.add((j, x))
        cur = seq[0]
        while True:
            nxt = ov.after_forward(cur.j, cur.coset) if cur.forward else ov.after_backward(cur.j, cur.coset)
            if (nxt.j, nxt.coset) == (j, x):
                if not nxt.forward:
                    raise FoamError("E_INCONSISTENT", "boundary walk reversed onto its start")
                break
            if (nxt.j, nxt.coset) in used:
                raise FoamError("E_INCONSISTENT", "boundary walk revisits an arc")
            used.add((nxt.j, nxt.coset))
            seq.append(nxt)
            cur = nxt
        circles.append(_canon_circle(seq))
    return sorted(circles, key=lambda c: [(a.j, a.coset, not a.forward) for a in c])


def _orientable(table: CosetTable) -> bool:
    pres = table.presentation
    n = table.index
    side = [None] * n
    side[0] = 0
    stack = [0]
    while stack:
        z = stack.pop()
        for g, p in zip(pres.generators, table.perms):
            for w, flip in ((p[z], g.w), (P.inverse(p)[z], g.w)):
                if w == z:
                    if flip and g.sort != "c":
                        return False
                    continue
                want = side[z] ^ flip
                if side[w] is None:
                    side[w] = want
                    stack.append(w)
                elif side[w] != want:
                    return False
    return True


def cover_topological_type(table: CosetTable) -> CoverType:
    pres = table.presentation
    base = pres.type
    d = table.index
    orientable = _orientable(table)
    r = sum(P.num_cycles(table.action(g.name)) for g in pres.generators if g.sort == "x")
    m = sum(P.num_cycles(table.action(g.name)) for g in pres.generators if g.sort == "h")
    ovals, b_new, cusps = {}, [], 0
    for i in range(1, base.k + 1):
        if base.b[i - 1] == 0:
            cyc = P.num_cycles(table.action(f"e{i}"))
            ovals[i] = ()
            b_new += [0] * cyc
            continue
        circles = oval_structure(table, i)
        ovals[i] = tuple(circles)
        b_new += [len(c) for c in circles]
        cusps += _Oval(table, i).corner_cycles()
    r += cusps
    k = len(b_new)
    chi = d * euler_char_of_type(base)
    # chi = base_term - m - k - r - sum(b)/2
    base_term = chi + m + k + r + Fraction(sum(b_new), 2)
    sign = "+" if orientable else "-"
    if base_term.denominator != 1:
        raise FoamError("E_INCONSISTENT", f"Euler characteristic {chi} gives no integral genus")
    bt = int(base_term)
    if orientable:
        if (2 - bt) % 2 or bt > 2:
            raise FoamError("E_INCONSISTENT", f"Euler characteristic {chi} gives no orientable genus")
        g = (2 - bt) // 2
    else:
        g = 2 - bt
        if g < 1:
            raise FoamError("E_INCONSISTENT", f"Euler characteristic {chi} gives no crosscap number")
    t = TopType(sign, g, m, r, k, tuple(b_new))
    return CoverType(t, orientable, ovals, cusps, chi)
