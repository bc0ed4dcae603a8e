"""Special colorings, strong orientation, and combinatorial Klein certificates.

A special coloring fixes a cyclic order of the vertices of every graph
component, a direction for every edge and a sign for every patch. It is
valid when every boundary circle, read in the direction induced by its
patch sign, runs along edges in their chosen directions and visits the
vertices of its component once around the cyclic order, and the circles of
one patch land in distinct components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .branched_cover import (CircleData, EdgeImage, FunctionData, MarkedDisk,
                             PatchData, construct_disk_morphism)
from .errors import FoamError
from .foam_model import (BWD, CIRCLE, CYCLE, FWD, Arc, Foam, arc_ends, check_normality,
                         flip_dir, require_valid)


@dataclass(frozen=True)
class SpecialColoring:
    cyclic_orders: tuple[tuple[str, ...], ...]
    edge_dirs: dict  # edge id -> "fwd" | "bwd" (circle edges: fwd is sign +1)
    patch_signs: dict  # patch id -> +1 | -1

    def to_doc(self, foam: Foam | None = None) -> dict:
        dirs = {}
        for e, d in sorted(self.edge_dirs.items()):
            if foam is not None and foam.graph.edge(e).kind == CIRCLE:
                dirs[e] = 1 if d == FWD else -1
            else:
                dirs[e] = d
        return {"format": 1, "cyclic_orders": [list(o) for o in self.cyclic_orders],
                "edge_dirs": dirs, "patch_signs": dict(sorted(self.patch_signs.items()))}

    @classmethod
    def from_doc(cls, doc) -> "SpecialColoring":
        try:
            orders = tuple(tuple(str(v) for v in o) for o in doc["cyclic_orders"])
            dirs = {}
            for e, d in doc["edge_dirs"].items():
                if d in (1, -1):
                    d = FWD if d == 1 else BWD
                if d not in (FWD, BWD):
                    raise ValueError(f"bad direction for {e}")
                dirs[e] = d
            signs = {p: int(s) for p, s in doc["patch_signs"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FoamError("E_PARSE", f"coloring: {exc}") from None
        return cls(orders, dirs, signs)

    def mirrored(self) -> "SpecialColoring":
        """All edges and patch signs reversed, cyclic orders read backwards."""
        return SpecialColoring(
            tuple((o[0],) + tuple(reversed(o[1:])) for o in self.cyclic_orders),
            {e: flip_dir(d) for e, d in self.edge_dirs.items()},
            {p: -s for p, s in self.patch_signs.items()})


def _traversed(circle, sign: int) -> list[Arc]:
    if sign == 1:
        return list(circle.arcs)
    return [Arc(a.edge, flip_dir(a.dir)) for a in reversed(circle.arcs)]


def _winds_once(walk: list[str], pos: dict, p: int) -> bool:
    total = 0
    for a, b in zip(walk, walk[1:] + walk[:1]):
        step = (pos[b] - pos[a]) % p
        total += step if step else p
    return total == p


def _distinct_components(foam: Foam) -> str | None:
    comp_of = foam.graph.component_of_edge()
    for patch in sorted(foam.patches, key=lambda q: q.id):
        seen = {}
        for c in patch.boundary:
            comp = comp_of[c.arcs[0].edge]
            if comp in seen:
                return f"patch {patch.id}: circles {seen[comp]} and {c.id} lie in the same graph component"
            seen[comp] = c.id
    return None


def _walks(foam: Foam, signs: dict) -> list[tuple[str, str, list[str]]]:
    """(patch, circle, vertex walk) for every cycle-kind circle."""
    out = []
    for patch in foam.patches:
        for c in patch.boundary:
            if c.kind == CYCLE:
                arcs = _traversed(c, signs[patch.id])
                out.append((patch.id, c.id, [arc_ends(foam.graph, a)[0] for a in arcs]))
    return out


def _sign_choices(foam: Foam):
    """Patch-sign / edge-direction assignments consistent on every arc, in
    lexicographic order of the patch signs (patches by id, +1 first)."""
    patches = sorted(p.id for p in foam.patches)
    # bipartite constraint graph: arc (e, dir) in patch P forces dir_e = dir xor (s_P = -1)
    adj: dict = {}
    for p in foam.patches:
        for c in p.boundary:
            for a in c.arcs:
                flip = a.dir == BWD
                adj.setdefault(("p", p.id), []).append((("e", a.edge), flip))
                adj.setdefault(("e", a.edge), []).append((("p", p.id), flip))
    # value 0 means sign +1 / fwd; neighbours differ by `flip`
    groups = []
    assigned: dict = {}
    for pid in patches:
        root = ("p", pid)
        if root in assigned:
            continue
        comp = {root: 0}
        stack = [root]
        ok = True
        while stack:
            x = stack.pop()
            for y, flip in adj.get(x, []):
                want = comp[x] ^ flip
                if y not in comp:
                    comp[y] = want
                    stack.append(y)
                elif comp[y] != want:
                    ok = False
        if not ok:
            return
        assigned.update(comp)
        groups.append(comp)
    # groups are ordered by least patch id, so bit order matches lexicographic order
    for bits in itertools.product((0, 1), repeat=len(groups)):
        signs, dirs = {}, {}
        for bit, comp in zip(bits, groups):
            for (kind, name), val in comp.items():
                v = val ^ bit
                if kind == "p":
                    signs[name] = -1 if v else 1
                else:
                    dirs[name] = BWD if v else FWD
        yield signs, dirs


def _find_orders(foam: Foam, walks, limit: int):
    """First cyclic orders (per component) in which every walk winds once."""
    orders = []
    budget = [limit]
    for verts, _edges in foam.graph.components():
        if not verts:
            continue
        vset = set(verts)
        mine = [w for _, _, w in walks if w[0] in vset]
        found = None
        for rest in itertools.permutations(verts[1:]):
            budget[0] -= 1
            if budget[0] < 0:
                raise FoamError("E_LIMIT", "cyclic order search budget exhausted")
            order = (verts[0],) + rest
            pos = {v: i for i, v in enumerate(order)}
            if all(_winds_once(w, pos, len(order)) for w in mine):
                found = order
                break
        if found is None:
            return None
        orders.append(found)
    return tuple(orders)


def find_special_coloring(foam: Foam, limit: int = 2_000_000) -> tuple[SpecialColoring | None, str | None]:
    """Return ``(coloring, None)`` or ``(None, reason)``."""
    require_valid(foam)
    if any(not p.orientable for p in foam.patches):
        return None, "E_NONORIENTABLE_PATCH"
    reason = _distinct_components(foam)
    if reason:
        return None, reason
    any_signs = False
    for signs, dirs in _sign_choices(foam):
        any_signs = True
        orders = _find_orders(foam, _walks(foam, signs), limit)
        if orders is not None:
            return SpecialColoring(orders, dirs, signs), None
    if not any_signs:
        return None, "boundary orientations force an edge in both directions"
    return None, "no cyclic vertex order winds every boundary walk once"


def is_strongly_oriented(foam: Foam, col: SpecialColoring) -> tuple[bool, str | None]:
    require_valid(foam)
    g = foam.graph
    if set(col.patch_signs) != set(foam.patch_map) or any(s not in (1, -1) for s in col.patch_signs.values()):
        return False, "patch signs must give +1 or -1 for exactly the foam's patches"
    if set(col.edge_dirs) != {e.id for e in g.edges}:
        return False, "edge directions must cover exactly the foam's edges"
    comps = [set(v) for v, _ in g.components() if v]
    if sorted(map(sorted, comps)) != sorted(sorted(o) for o in col.cyclic_orders) or \
            any(len(set(o)) != len(o) for o in col.cyclic_orders):
        return False, "cyclic orders must list the vertices of each graph component once"
    for patch in sorted(foam.patches, key=lambda q: q.id):
        for c in patch.boundary:
            for a in _traversed(c, col.patch_signs[patch.id]):
                if a.dir != col.edge_dirs[a.edge]:
                    return False, (f"circle {c.id} of patch {patch.id} runs over edge {a.edge} "
                                   f"against its chosen direction")
    reason = _distinct_components(foam)
    if reason:
        return False, reason
    pos, size = {}, {}
    for o in col.cyclic_orders:
        for i, v in enumerate(o):
            pos[v], size[v] = i, len(o)
    for pid, cid, w in _walks(foam, col.patch_signs):
        if not _winds_once(w, pos, size[w[0]]):
            return False, f"circle {cid} of patch {pid} does not wind once around its cyclic order"
    return True, None


@dataclass(frozen=True)
class KleinCertificate:
    coloring: SpecialColoring
    function_data: FunctionData


def function_data_from_coloring(foam: Foam, col: SpecialColoring) -> FunctionData:
    """Degree-one-on-the-boundary disk map built from a special coloring."""
    M = max((len(o) for o in col.cyclic_orders), default=0)
    vimg = {v: i for o in col.cyclic_orders for i, v in enumerate(o)}
    eimg = {}
    for e in foam.graph.edges:
        d = col.edge_dirs[e.id]
        if e.kind == CIRCLE:
            eimg[e.id] = EdgeImage(d, winding=1)
            continue
        tail, head = e.ends if d == FWD else e.ends[::-1]
        step = (vimg[head] - vimg[tail]) % M
        eimg[e.id] = EdgeImage(d, vimg[tail], step if step else M)
    covers = {p.id: construct_disk_morphism(p.genus, len(p.boundary)) for p in foam.patches}
    nlab = max((len(c.perms) for c in covers.values()), default=0)
    patches = []
    for p in foam.patches:
        cov = covers[p.id].padded(nlab)
        circles = tuple(CircleData(c.id, (t,), (t,) * len(c.arcs)) for t, c in enumerate(p.boundary))
        patches.append(PatchData(p.id, cov, circles, col.patch_signs[p.id]))
    disk = MarkedDisk(M, tuple(f"b{i + 1}" for i in range(nlab)))
    return FunctionData(disk, vimg, eimg, tuple(patches))


def certify_klein(foam: Foam) -> KleinCertificate | None:
    """Certificate for a strongly oriented normal foam; None is inconclusive."""
    require_valid(foam)
    if not check_normality(foam).normal:
        raise FoamError("E_NOT_NORMAL", "foam is not normal")
    col, _ = find_special_coloring(foam)
    if col is None:
        return None
    return KleinCertificate(col, function_data_from_coloring(foam, col))
