"""Canonical labeling of small colored, edge-labeled digraphs.

Color refinement followed by individualization/refinement search. The
certificate is the least leaf encoding; branches equivalent under
automorphisms already discovered (those fixing the current prefix) are
skipped.
"""

from __future__ import annotations

import json
from typing import Hashable, Sequence


def canonical_form(colors: Sequence[Hashable], rels: Sequence[tuple[int, int, str]]):
    """Return ``(certificate, order)``.

    ``order[k]`` is the node placed at canonical position ``k``. Two inputs
    get equal certificates iff they are isomorphic.
    """
    n = len(colors)
    palette = sorted({str(c) for c in colors})
    init = [palette.index(str(c)) for c in colors]
    labels = sorted({lab for _, _, lab in rels})
    lab_id = {lab: i for i, lab in enumerate(labels)}
    out_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    in_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    edges = []
    for u, v, lab in rels:
        out_adj[u].append((lab_id[lab], v))
        in_adj[v].append((lab_id[lab], u))
        edges.append((u, lab_id[lab], v))

    def refine(col: list[int]) -> list[int]:
        k = len(set(col))
        while True:
            sigs = [
                (col[u],
                 tuple(sorted((l, col[v]) for l, v in out_adj[u])),
                 tuple(sorted((l, col[v]) for l, v in in_adj[u])))
                for u in range(n)
            ]
            uniq = sorted(set(sigs))
            rank = {s: i for i, s in enumerate(uniq)}
            col = [rank[s] for s in sigs]
            if len(uniq) == k:
                return col
            k = len(uniq)

    def individualize(col: list[int], u: int) -> list[int]:
        c = col[u]
        keyed = [(col[x], 0 if (x == u or col[x] != c) else 1) for x in range(n)]
        uniq = sorted(set(keyed))
        rank = {s: i for i, s in enumerate(uniq)}
        return [rank[s] for s in keyed]

    leaves: dict[tuple, list[int]] = {}
    autos: list[list[int]] = []
    best: list = [None, None]

    def orbit_roots(prefix: list[int]) -> list[int]:
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in autos:
            if all(g[p] == p for p in prefix):
                for i in range(n):
                    a, b = find(i), find(g[i])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        return [find(i) for i in range(n)]

    def search(col: list[int], prefix: list[int]) -> None:
        col = refine(col)
        cells: dict[int, list[int]] = {}
        for x in range(n):
            cells.setdefault(col[x], []).append(x)
        if len(cells) == n:
            order = sorted(range(n), key=lambda x: col[x])
            pos = [0] * n
            for k, x in enumerate(order):
                pos[x] = k
            cert = (tuple(init[x] for x in order), tuple(sorted((pos[u], l, pos[v]) for u, l, v in edges)))
            seen = leaves.get(cert)
            if seen is None:
                leaves[cert] = order
                if best[0] is None or cert < best[0]:
                    best[0], best[1] = cert, order
            else:
                g = [0] * n
                for a, b in zip(seen, order):
                    g[a] = b
                autos.append(g)
            return
        target = min((len(m), c) for c, m in cells.items() if len(m) > 1)[1]
        explored: list[int] = []
        for u in cells[target]:
            if autos and explored:
                roots = orbit_roots(prefix)
                if roots[u] in {roots[x] for x in explored}:
                    continue
            search(individualize(col, u), prefix + [u])
            explored.append(u)

    search(list(init), [])
    cert, order = best
    text = json.dumps({"colors": [palette[i] for i in cert[0]], "labels": labels, "edges": cert[1]},
                      separators=(",", ":"))
    return text, tuple(order)
