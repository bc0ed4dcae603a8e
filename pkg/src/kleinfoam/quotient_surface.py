"""Canonical quotient surface of a foam carrying a disk-valued function.

Every patch sheet ``(patch, s)`` is an element. Sheets of different patches
glued along a common edge are identified, and the identification is closed
under the branch monodromy. The classes are the sheets of the quotient
cover of the disk, whose monodromy is induced from the patches.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from . import perm as P
from .branched_cover import (CircleData, DiskCoverData, EdgeImage, FunctionData, MarkedDisk,
                             PatchData, rh_invariants, validate_function_data)
from .errors import FoamError
from .foam_model import BWD, CIRCLE, FWD, Foam, check_normality, require_valid

Element = tuple[str, int]


def surface_name(genus: int, circles: int) -> str:
    if genus == 0 and circles == 1:
        return "disk"
    if genus == 0 and circles == 2:
        return "annulus"
    return f"genus {genus} with {circles} boundary circles"


@dataclass(frozen=True)
class QuotientType:
    euler: int
    circles: int
    genus: int

    @property
    def name(self) -> str:
        return surface_name(self.genus, self.circles)


@dataclass(frozen=True)
class QuotientResult:
    classes: tuple[tuple[Element, ...], ...]
    class_map: dict
    perms: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    seeds: tuple[tuple[Element, Element], ...]
    components: tuple[QuotientType, ...]
    function_data: FunctionData | None = field(default=None, compare=False)

    @property
    def degree(self) -> int:
        return len(self.classes)

    @property
    def boundary_perm(self) -> tuple[int, ...]:
        return P.product(self.perms, self.degree)

    @property
    def type(self) -> QuotientType | None:
        """Type of a connected quotient, None when it has several components."""
        return self.components[0] if len(self.components) == 1 else None

    def class_sizes(self) -> list[int]:
        return sorted(len(c) for c in self.classes)

    def to_doc(self) -> dict:
        return {
            "format": 1,
            "degree": self.degree,
            "branch_labels": list(self.labels),
            "classes": [[[p, s + 1] for p, s in c] for c in self.classes],
            "perms": [P.format_cycles(p) for p in self.perms],
            "boundary_perm": P.format_cycles(self.boundary_perm),
            "seeds": [[[a[0], a[1] + 1], [b[0], b[1] + 1]] for a, b in self.seeds],
            "components": [{"euler": t.euler, "circles": t.circles, "genus": t.genus, "name": t.name}
                           for t in self.components],
        }

    @classmethod
    def from_doc(cls, doc) -> "QuotientResult":
        try:
            classes = tuple(tuple((str(p), int(s) - 1) for p, s in c) for c in doc["classes"])
            n = len(classes)
            perms = tuple(P.parse_cycles(t, n) for t in doc["perms"])
            seeds = tuple(((str(a[0]), int(a[1]) - 1), (str(b[0]), int(b[1]) - 1)) for a, b in doc["seeds"])
            comps = tuple(QuotientType(int(t["euler"]), int(t["circles"]), int(t["genus"]))
                          for t in doc["components"])
            labels = tuple(doc["branch_labels"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FoamError("E_PARSE", f"quotient document: {exc}") from None
        cmap = {el: k for k, c in enumerate(classes) for el in c}
        return cls(classes, cmap, perms, labels, seeds, comps)


class _UnionFind:
    """Union-find whose root is always the least element of its class."""

    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        lo, hi = min(ra, rb), max(ra, rb)
        self.parent[hi] = lo
        return True


def _elements(fn: FunctionData) -> list[Element]:
    return sorted((pd.patch, s) for pd in fn.patches for s in range(pd.cover.degree))


def _act(fn: FunctionData, covers: dict, k: int, el: Element, inverse: bool = False) -> Element:
    p = covers[el[0]].perms[k]
    return (el[0], P.inverse(p)[el[1]] if inverse else p[el[1]])


def seam_seeds(foam: Foam, fn: FunctionData) -> list[tuple[Element, Element]]:
    """Pairs of sheets that lie over the same point of a shared edge."""
    on_edge: dict[str, list[Element]] = {}
    for pd in fn.patches:
        circles = {c.id: c for c in foam.patch(pd.patch).boundary}
        for cd in pd.circles:
            for arc, sheet in zip(circles[cd.circle].arcs, cd.arcs):
                on_edge.setdefault(arc.edge, []).append((pd.patch, sheet))
    seeds = []
    for e in sorted(on_edge):
        els = on_edge[e]
        for a, b in itertools.combinations(els, 2):
            if a[0] != b[0]:
                seeds.append((min(a, b), max(a, b)))
    return seeds


def build_quotient(foam: Foam, fn: FunctionData) -> QuotientResult:
    require_valid(foam)
    if any(not p.orientable for p in foam.patches):
        raise FoamError("E_ENGINE_SCOPE", "quotients are computed for orientable patches only")
    if not check_normality(foam).normal:
        raise FoamError("E_NOT_NORMAL", "foam is not normal")
    rep = validate_function_data(foam, fn)
    if not rep.ok:
        v = rep.violations[0]
        raise FoamError("E_INVALID", f"function data: {v.condition}: {v.message}")
    covers = {pd.patch: pd.cover for pd in fn.patches}
    nlab = len(fn.disk.labels)
    elements = _elements(fn)
    uf = _UnionFind(elements)
    seeds = seam_seeds(foam, fn)
    queue = deque()
    for a, b in seeds:
        if uf.union(a, b):
            queue.append((a, b))
    while queue:
        a, b = queue.popleft()
        for k in range(nlab):
            x, y = _act(fn, covers, k, a), _act(fn, covers, k, b)
            if uf.union(x, y):
                queue.append((x, y))
    groups: dict[Element, list[Element]] = {}
    for el in elements:
        groups.setdefault(uf.find(el), []).append(el)
    classes = tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))
    cmap = {el: i for i, c in enumerate(classes) for el in c}
    perms = []
    for k in range(nlab):
        img = [cmap[_act(fn, covers, k, c[0])] for c in classes]
        perms.append(tuple(img))
    perms = tuple(perms)
    comps = []
    for orb in P.orbits(perms, len(classes)):
        idx = {c: i for i, c in enumerate(orb)}
        sub = DiskCoverData(len(orb), tuple(tuple(idx[p[c]] for c in orb) for p in perms))
        comps.append(QuotientType(*rh_invariants(sub)))
    return QuotientResult(classes, cmap, perms, fn.disk.labels, tuple(seeds), tuple(comps), fn)


def check_factorization(result: QuotientResult, fn: FunctionData) -> tuple[bool, dict | None]:
    """Check that the class map intertwines patch and quotient monodromy."""
    cmap = result.class_map
    for pd in fn.patches:
        for s in range(pd.cover.degree):
            el = (pd.patch, s)
            if el not in cmap:
                return False, {"element": [pd.patch, s + 1], "reason": "element has no class"}
            for k, p in enumerate(pd.cover.perms):
                img = (pd.patch, p[s])
                if img not in cmap or cmap[img] != result.perms[k][cmap[el]]:
                    return False, {"element": [pd.patch, s + 1], "branch": fn.disk.labels[k],
                                   "reason": "class map does not intertwine the monodromy"}
    for a, b in result.seeds:
        if cmap.get(a) != cmap.get(b):
            return False, {"element": [a[0], a[1] + 1], "other": [b[0], b[1] + 1],
                           "reason": "seam-glued sheets lie in different classes"}
    return True, None


def _normalize_post(post: DiskCoverData) -> DiskCoverData:
    """Relabel sheets so the boundary monodromy is the cycle (1 2 ... e)."""
    try:
        chi, circles, genus = rh_invariants(post)
    except FoamError:
        raise FoamError("E_INCOMPATIBLE", "post cover must be connected") from None
    if (circles, genus) != (1, 0):
        raise FoamError("E_INCOMPATIBLE", "post cover must be a disk covering the disk")
    cyc = P.cycles(post.boundary_perm)[0]
    by = [0] * post.degree
    for k, x in enumerate(cyc):
        by[x] = k
    return DiskCoverData(post.degree, tuple(P.conjugate(p, tuple(by)) for p in post.perms))


def compose_through_quotient(result: QuotientResult, post: DiskCoverData, post_labels=None,
                             fn: FunctionData | None = None) -> FunctionData:
    """Function data of ``h o f`` where ``h`` is the disk cover ``post``.

    ``h o f = (h o f_K) o phi`` factors through the quotient by construction.
    Composite sheets are pairs (sheet of h, sheet of f); all marked points
    and the branch values of f sit in the last sector of h, just before the
    basepoint.
    """
    fn = fn or result.function_data
    if fn is None:
        raise FoamError("E_INCOMPATIBLE", "no function data to compose with")
    h = _normalize_post(post)
    e = h.degree
    post_labels = tuple(post_labels) if post_labels is not None else tuple(f"h{i + 1}" for i in range(len(h.perms)))
    if len(post_labels) != len(h.perms):
        raise FoamError("E_INCOMPATIBLE", "post labels do not match post permutations")
    if set(post_labels) & set(fn.disk.labels):
        raise FoamError("E_INCOMPATIBLE", "branch label spaces overlap")
    M = fn.disk.M
    patches = []
    for pd in fn.patches:
        d = pd.cover.degree

        def idx(j, s, d=d):
            return j * d + s

        perms = []
        for t in h.perms:
            perms.append(tuple(idx(t[j], s) for j in range(e) for s in range(d)))
        for sp in pd.cover.perms:
            perms.append(tuple(idx(j, sp[s] if j == e - 1 else s) for j in range(e) for s in range(d)))
        cover = DiskCoverData(d * e, tuple(perms))
        cyc_of = {x: c for c in P.cycles(cover.boundary_perm) for x in c}
        circles = []
        for cd in pd.circles:
            arcs = tuple(idx(e - 1, s) for s in cd.arcs)
            circles.append(CircleData(cd.circle, cyc_of[arcs[0]], arcs))
        patches.append(PatchData(pd.patch, cover, tuple(circles), pd.sign))
    eimg = {}
    for eid, im in fn.edge_images.items():
        if im.winding:
            eimg[eid] = EdgeImage(im.dir, winding=im.winding * e)
        else:
            crossings = (im.start + im.length) // M
            eimg[eid] = EdgeImage(im.dir, im.start, im.length + crossings * (e - 1) * M)
    disk = MarkedDisk(M, post_labels + fn.disk.labels)
    return FunctionData(disk, dict(fn.vertex_images), eimg, tuple(patches))


def preequivalence_oracle(foam: Foam, fn: FunctionData, a: Element, b: Element, bound: int) -> bool:
    """Brute force: is ``a ~ b`` forced by seeds moved along words of length <= bound?"""
    covers = {pd.patch: pd.cover for pd in fn.patches}
    nlab = len(fn.disk.labels)
    pairs = set()
    frontier = [(x, y) for x, y in seam_seeds(foam, fn)]
    pairs.update(frontier)
    for _ in range(bound):
        nxt = []
        for x, y in frontier:
            for k in range(nlab):
                for inv in (False, True):
                    q = (_act(fn, covers, k, x, inv), _act(fn, covers, k, y, inv))
                    if q not in pairs:
                        pairs.add(q)
                        nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    adj: dict = {}
    for x, y in pairs:
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)
    seen, stack = {a}, [a]
    while stack:
        x = stack.pop()
        if x == b:
            return True
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return a == b


def enumerate_function_data(foam: Foam, max_degree: int = 2, max_labels: int = 2, max_marked: int | None = None):
    """Every valid FunctionData within the bounds, in a fixed order.

    Brute force over marked-disk sizes, vertex and edge images, per-patch
    monodromy tuples, circle-to-cycle matchings and arc sheets; intended for
    small foams only.
    """
    require_valid(foam)
    g = foam.graph
    verts = list(g.vertices)
    if max_marked is None:
        max_marked = len(verts)
    Ms = [0] if not verts else range(1, max_marked + 1)
    for nlab in range(max_labels + 1):
        labels = tuple(f"b{i + 1}" for i in range(nlab))
        for M in Ms:
            for vimg in itertools.product(range(M), repeat=len(verts)) if verts else [()]:
                vmap = dict(zip(verts, vimg))
                for graph_map in _edge_images(g, vmap, M, max_degree):
                    per_patch = [list(_patch_choices(foam, p, nlab, max_degree)) for p in foam.patches]
                    for combo in itertools.product(*per_patch):
                        fn = FunctionData(MarkedDisk(M, labels), vmap, graph_map, tuple(combo))
                        if validate_function_data(foam, fn).ok:
                            yield fn


def _edge_images(g, vmap, M, max_degree):
    options = []
    for e in g.edges:
        opts = []
        for d in (FWD, BWD):
            if e.kind == CIRCLE:
                opts.extend(EdgeImage(d, winding=w) for w in range(1, max_degree + 1))
            else:
                tail, head = e.ends if d == FWD else e.ends[::-1]
                step = (vmap[head] - vmap[tail]) % M
                opts.append(EdgeImage(d, vmap[tail], step if step else M))
        options.append(opts)
    for choice in itertools.product(*options):
        yield {e.id: im for e, im in zip(g.edges, choice)}


def _patch_choices(foam, patch, nlab, max_degree):
    for d in range(1, max_degree + 1):
        group = list(itertools.permutations(range(d)))
        for perms in itertools.product(group, repeat=nlab):
            cover = DiskCoverData(d, tuple(perms))
            cycles = P.cycles(cover.boundary_perm)
            if len(cycles) != len(patch.boundary):
                continue
            for matching in itertools.permutations(cycles):
                sheet_opts = [itertools.product(cyc, repeat=len(c.arcs)) for c, cyc in zip(patch.boundary, matching)]
                for sheets in itertools.product(*[list(o) for o in sheet_opts]):
                    circles = tuple(CircleData(c.id, cyc, tuple(s))
                                    for c, cyc, s in zip(patch.boundary, matching, sheets))
                    for sign in (1, -1):
                        yield PatchData(patch.id, cover, circles, sign)
