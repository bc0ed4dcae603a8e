"""Shared builders for tests: corpus function data, random relabelings and
random small foams."""

from __future__ import annotations

import itertools
import random

from kleinfoam import perm as P
from kleinfoam.branched_cover import (CircleData, DiskCoverData, EdgeImage, FunctionData, PatchData,
                                      function_data_from_doc)
from kleinfoam.foam_model import (BWD, CIRCLE, CIRCLE_EDGE, CYCLE, FWD, SEGMENT, Arc, BoundaryCircle,
                                  Edge, Foam, GeneralizedGraph, SurfacePatch, flip_dir, validate_foam)


def annulus_cover_doc(edges, patches):
    """Degree-2 covers (12),(12) on annulus patches whose two circles sit on circle edges."""
    return {
        "marked_disk": {"M": 0, "branch_labels": ["x", "y"]},
        "graph_map": {"vertices": {}, "edges": {e: {"dir": "fwd", "winding": 1} for e in edges}},
        "patches": [{"patch": p, "degree": 2, "perms": ["(1 2)", "(1 2)"],
                     "circles": [{"circle": c1, "cycle": [1], "arcs": [1]},
                                 {"circle": c2, "cycle": [2], "arcs": [2]}]}
                    for p, c1, c2 in patches],
    }


def annulus_fn():
    return function_data_from_doc(annulus_cover_doc(["A", "B"], [("p", "c1", "c2")]))


def torus_fn():
    return function_data_from_doc(annulus_cover_doc(["A", "B"], [("p", "p1", "p2"), ("q", "q1", "q2")]))


# ---------------------------------------------------------------- relabeling

def relabel(foam: Foam, fn: FunctionData | None, rng: random.Random):
    """Apply a random isomorphism to a foam (and matching function data).

    Renames everything, shuffles lists, rotates cycles, flips edge
    directions, reverses patches and conjugates sheets.
    """
    g = foam.graph
    vname = {v: f"v{rng.randrange(10**9)}_{i}" for i, v in enumerate(g.vertices)}
    ename = {e.id: f"e{rng.randrange(10**9)}_{i}" for i, e in enumerate(g.edges)}
    pname = {p.id: f"p{rng.randrange(10**9)}_{i}" for i, p in enumerate(foam.patches)}
    flip = {e.id: rng.random() < 0.5 for e in g.edges}

    edges = []
    for e in g.edges:
        ends = tuple(vname[v] for v in e.ends) if e.ends else e.ends
        if flip[e.id] and e.kind == SEGMENT:
            ends = ends[::-1]
        edges.append(Edge(ename[e.id], e.kind, ends))
    rng.shuffle(edges)
    verts = [vname[v] for v in g.vertices]
    rng.shuffle(verts)

    def move_arc(a: Arc) -> Arc:
        return Arc(ename[a.edge], flip_dir(a.dir) if flip[a.edge] else a.dir)

    patches, pdata = [], []
    for p in foam.patches:
        reverse_all = p.orientable and rng.random() < 0.5
        pd = fn.patch_data(p.id) if fn is not None else None
        d = pd.cover.degree if pd else 0
        sheet = list(range(d))
        rng.shuffle(sheet)
        sheet = tuple(sheet)
        circles, cdata = [], []
        for c in p.boundary:
            cid = f"c{rng.randrange(10**9)}"
            arcs = [move_arc(a) for a in c.arcs]
            sheets = []
            cd = None
            if pd:
                cd = next(x for x in pd.circles if x.circle == c.id)
                sheets = [sheet[s] for s in cd.arcs]
            rev = reverse_all or (not p.orientable and rng.random() < 0.5)
            if rev:
                arcs = [Arc(a.edge, flip_dir(a.dir)) for a in reversed(arcs)]
                sheets = sheets[::-1]
            if c.kind == CYCLE and arcs:
                k = rng.randrange(len(arcs))
                arcs = arcs[k:] + arcs[:k]
                sheets = sheets[k:] + sheets[:k]
            circles.append(BoundaryCircle(cid, c.kind, tuple(arcs)))
            if pd:
                cdata.append(CircleData(cid, tuple(sheet[s] for s in cd.cycle), tuple(sheets)))
        order = list(range(len(circles)))
        rng.shuffle(order)
        patches.append(SurfacePatch(pname[p.id], p.orientable, p.genus, tuple(circles[i] for i in order)))
        if pd:
            perms = tuple(P.conjugate(x, sheet) for x in pd.cover.perms)
            pdata.append(PatchData(pname[p.id], DiskCoverData(d, perms), tuple(cdata[i] for i in order),
                                   -pd.sign if reverse_all else pd.sign))
    rng.shuffle(patches)
    new = Foam(GeneralizedGraph(tuple(verts), tuple(edges)), tuple(patches))
    if fn is None:
        return new, None
    vimg = {vname[v]: i for v, i in fn.vertex_images.items()}
    eimg = {}
    for eid, im in fn.edge_images.items():
        eimg[ename[eid]] = EdgeImage(flip_dir(im.dir) if flip[eid] else im.dir, im.start, im.length, im.winding)
    rng.shuffle(pdata)
    return new, FunctionData(fn.disk, vimg, eimg, tuple(pdata))


# ---------------------------------------------------------------- random foams

def _simple_cycles(edges):
    """Closed walks with no repeated vertex or edge, as tuples of (edge, dir)."""
    out = set()
    adj = {}
    for e in edges:
        if e.kind != SEGMENT:
            continue
        a, b = e.ends
        adj.setdefault(a, []).append((e.id, FWD, b))
        adj.setdefault(b, []).append((e.id, BWD, a))

    def extend(start, v, path, seen_v, seen_e):
        for eid, d, w in adj.get(v, []):
            if eid in seen_e:
                continue
            if w == start:
                cyc = path + [(eid, d)]
                out.add(tuple(P.rotate_min(cyc)))
            elif w not in seen_v and len(path) < 4:
                extend(start, w, path + [(eid, d)], seen_v | {w}, seen_e | {eid})

    for v in adj:
        extend(v, v, [], {v}, set())
    return sorted(out)


def random_foam(rng: random.Random, max_patches: int = 4, max_edges: int = 6) -> Foam | None:
    """A random valid foam, or None when the attempt fails."""
    nv = rng.randint(1, 3)
    verts = [f"v{i}" for i in range(nv)]
    ne = rng.randint(1, max_edges)
    edges = []
    for i in range(ne):
        if rng.random() < 0.15:
            edges.append(Edge(f"e{i}", CIRCLE))
        else:
            edges.append(Edge(f"e{i}", SEGMENT, (rng.choice(verts), rng.choice(verts))))
    cycles = _simple_cycles(edges)
    options = [[(a, d) for a, d in c] for c in cycles] + [[(e.id, rng.choice((FWD, BWD)))] for e in edges
                                                         if e.kind == CIRCLE]
    if not options:
        return None
    npatch = rng.randint(1, max_patches)
    patches = []
    covered = set()
    for k in range(npatch):
        used = set()
        circles = []
        for m in range(rng.randint(1, 2)):
            cand = [c for c in options if not (set(e for e, _ in c) & used)]
            if not cand:
                break
            c = rng.choice(cand)
            used |= {e for e, _ in c}
            kind = CIRCLE_EDGE if len(c) == 1 and any(e.id == c[0][0] and e.kind == CIRCLE for e in edges) else CYCLE
            circles.append(BoundaryCircle(f"c{k}_{m}", kind, tuple(Arc(e, d) for e, d in c)))
        covered |= used
        orientable = rng.random() < 0.8
        genus = rng.randint(0, 1) if orientable else rng.randint(1, 2)
        patches.append(SurfacePatch(f"P{k}", orientable, genus, tuple(circles)))
    edges = [e for e in edges if e.id in covered]
    verts = sorted({v for e in edges for v in (e.ends or ())})
    foam = Foam(GeneralizedGraph(tuple(verts), tuple(edges)), tuple(patches))
    try:
        if validate_foam(foam).ok:
            return foam
    except Exception:
        return None
    return None


def random_foams(seed: int, count: int, **kw) -> list[Foam]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        f = random_foam(rng, **kw)
        if f is not None:
            out.append(f)
    return out


def all_perm_tuples(n: int, k: int):
    return itertools.product(itertools.permutations(range(n)), repeat=k)
