"""Topological foams: data model, validation, normality, doubles, invariants.

A foam is a set of surface patches (stored by classification data plus
boundary combinatorics) glued along their boundary circles to a
generalized graph whose edges are segments or isolated circles.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from . import canon
from .errors import FoamError

FWD, BWD = "fwd", "bwd"
SEGMENT, CIRCLE = "segment", "circle"
CYCLE, CIRCLE_EDGE = "cycle", "circle_edge"


def flip_dir(d: str) -> str:
    return BWD if d == FWD else FWD


@dataclass(frozen=True)
class Edge:
    id: str
    kind: str
    ends: tuple[str, str] | None = None

    @property
    def is_loop(self) -> bool:
        return self.kind == SEGMENT and self.ends[0] == self.ends[1]


@dataclass(frozen=True)
class GeneralizedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def edge(self, eid: str) -> Edge:
        return self.edge_map[eid]

    def components(self) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        """Connected components as (sorted vertices, sorted edge ids).

        Each circle edge is a component of its own, with no vertices.
        """
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            if e.kind == SEGMENT:
                a, b = find(e.ends[0]), find(e.ends[1])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[str, tuple[list, list]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), ([], []))[0].append(v)
        out = []
        for e in self.edges:
            if e.kind == SEGMENT:
                groups[find(e.ends[0])][1].append(e.id)
            else:
                out.append(((), (e.id,)))
        out.extend((tuple(sorted(vs)), tuple(sorted(es))) for vs, es in groups.values())
        return sorted(out, key=lambda c: (c[0], c[1]))

    def component_of_edge(self) -> dict[str, int]:
        return {e: i for i, (_, es) in enumerate(self.components()) for e in es}


@dataclass(frozen=True)
class Arc:
    edge: str
    dir: str = FWD


@dataclass(frozen=True)
class BoundaryCircle:
    """A boundary circle and its image in the graph.

    ``kind == "circle_edge"`` circles hold exactly one arc, on a circle edge.
    """

    id: str
    kind: str
    arcs: tuple[Arc, ...]


@dataclass(frozen=True)
class SurfacePatch:
    id: str
    orientable: bool
    genus: int
    boundary: tuple[BoundaryCircle, ...]


@dataclass(frozen=True)
class Foam:
    graph: GeneralizedGraph
    patches: tuple[SurfacePatch, ...]

    @cached_property
    def patch_map(self) -> dict[str, SurfacePatch]:
        return {p.id: p for p in self.patches}

    def patch(self, pid: str) -> SurfacePatch:
        return self.patch_map[pid]


def arc_ends(graph: GeneralizedGraph, arc: Arc) -> tuple[str, str]:
    """(tail, head) vertices of a segment arc in traversal direction."""
    a, b = graph.edge(arc.edge).ends
    return (a, b) if arc.dir == FWD else (b, a)


def arc_germs(arc: Arc) -> tuple[tuple[str, int], tuple[str, int]]:
    """Half-edge germs (edge, end index) the arc departs from and arrives at."""
    if arc.dir == FWD:
        return (arc.edge, 0), (arc.edge, 1)
    return (arc.edge, 1), (arc.edge, 0)


# ---------------------------------------------------------------- documents

def _expect_keys(obj, allowed: set, required: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise FoamError("E_PARSE", f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise FoamError("E_PARSE", f"{where}: unknown keys {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise FoamError("E_PARSE", f"{where}: missing keys {sorted(missing)}")


def _expect_str(x, where: str) -> str:
    if not isinstance(x, str) or not x:
        raise FoamError("E_PARSE", f"{where}: expected a non-empty string")
    return x


def _parse_dir(x, where: str) -> str:
    if x not in (FWD, BWD):
        raise FoamError("E_PARSE", f"{where}: dir must be 'fwd' or 'bwd'")
    return x


def foam_from_doc(doc) -> Foam:
    """Build a Foam from its JSON document, rejecting malformed input."""
    _expect_keys(doc, {"format", "graph", "patches"}, {"graph", "patches"}, "foam")
    if doc.get("format", 1) != 1:
        raise FoamError("E_PARSE", "unsupported format version")
    g = doc["graph"]
    _expect_keys(g, {"vertices", "edges"}, {"vertices", "edges"}, "graph")
    if not isinstance(g["vertices"], list) or not isinstance(g["edges"], list):
        raise FoamError("E_PARSE", "graph: vertices and edges must be lists")
    vertices = tuple(_expect_str(v, "vertex") for v in g["vertices"])
    edges = []
    for e in g["edges"]:
        _expect_keys(e, {"id", "kind", "ends"}, {"id", "kind"}, "edge")
        eid = _expect_str(e["id"], "edge id")
        if e["kind"] == SEGMENT:
            ends = e.get("ends")
            if not isinstance(ends, list) or len(ends) != 2:
                raise FoamError("E_PARSE", f"edge {eid}: segment needs two ends")
            edges.append(Edge(eid, SEGMENT, (_expect_str(ends[0], "end"), _expect_str(ends[1], "end"))))
        elif e["kind"] == CIRCLE:
            if "ends" in e:
                raise FoamError("E_PARSE", f"edge {eid}: circle edges have no ends")
            edges.append(Edge(eid, CIRCLE))
        else:
            raise FoamError("E_PARSE", f"edge {eid}: unknown kind {e['kind']!r}")
    if not isinstance(doc["patches"], list):
        raise FoamError("E_PARSE", "patches must be a list")
    patches = []
    for p in doc["patches"]:
        _expect_keys(p, {"id", "orientable", "genus", "boundary"}, {"id", "orientable", "genus", "boundary"}, "patch")
        pid = _expect_str(p["id"], "patch id")
        if not isinstance(p["orientable"], bool):
            raise FoamError("E_PARSE", f"patch {pid}: orientable must be a bool")
        if not isinstance(p["genus"], int) or isinstance(p["genus"], bool):
            raise FoamError("E_PARSE", f"patch {pid}: genus must be an integer")
        circles = []
        for c in p["boundary"]:
            _expect_keys(c, {"id", "image"}, {"id", "image"}, f"patch {pid} circle")
            cid = _expect_str(c["id"], "circle id")
            im = c["image"]
            if not isinstance(im, dict):
                raise FoamError("E_PARSE", f"circle {cid}: image must be an object")
            if im.get("kind") == CYCLE:
                _expect_keys(im, {"kind", "arcs"}, {"kind", "arcs"}, f"circle {cid}")
                arcs = []
                for a in im["arcs"]:
                    _expect_keys(a, {"edge", "dir"}, {"edge", "dir"}, f"circle {cid} arc")
                    arcs.append(Arc(_expect_str(a["edge"], "arc edge"), _parse_dir(a["dir"], f"circle {cid}")))
                circles.append(BoundaryCircle(cid, CYCLE, tuple(arcs)))
            elif im.get("kind") == CIRCLE_EDGE:
                _expect_keys(im, {"kind", "edge", "dir"}, {"kind", "edge", "dir"}, f"circle {cid}")
                arc = Arc(_expect_str(im["edge"], "circle edge"), _parse_dir(im["dir"], f"circle {cid}"))
                circles.append(BoundaryCircle(cid, CIRCLE_EDGE, (arc,)))
            else:
                raise FoamError("E_PARSE", f"circle {cid}: unknown image kind")
        patches.append(SurfacePatch(pid, p["orientable"], p["genus"], tuple(circles)))
    foam = Foam(GeneralizedGraph(vertices, tuple(edges)), tuple(patches))
    check_references(foam)
    return foam


def foam_to_doc(foam: Foam) -> dict:
    edges = []
    for e in foam.graph.edges:
        d = {"id": e.id, "kind": e.kind}
        if e.kind == SEGMENT:
            d["ends"] = list(e.ends)
        edges.append(d)
    patches = []
    for p in foam.patches:
        circles = []
        for c in p.boundary:
            if c.kind == CYCLE:
                im = {"kind": CYCLE, "arcs": [{"edge": a.edge, "dir": a.dir} for a in c.arcs]}
            else:
                im = {"kind": CIRCLE_EDGE, "edge": c.arcs[0].edge, "dir": c.arcs[0].dir}
            circles.append({"id": c.id, "image": im})
        patches.append({"id": p.id, "orientable": p.orientable, "genus": p.genus, "boundary": circles})
    return {"format": 1, "graph": {"vertices": list(foam.graph.vertices), "edges": edges}, "patches": patches}


def load_foam(path) -> Foam:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FoamError("E_PARSE", str(exc)) from None
    return foam_from_doc(doc)


def check_references(foam: Foam) -> None:
    """Referential integrity and per-type invariants; raises E_PARSE."""
    g = foam.graph
    if len(set(g.vertices)) != len(g.vertices):
        raise FoamError("E_PARSE", "duplicate vertex ids")
    if len(g.edge_map) != len(g.edges):
        raise FoamError("E_PARSE", "duplicate edge ids")
    used = set()
    vset = set(g.vertices)
    for e in g.edges:
        if e.kind == SEGMENT:
            for v in e.ends:
                if v not in vset:
                    raise FoamError("E_PARSE", f"edge {e.id}: unknown vertex {v}")
            used.update(e.ends)
    isolated = vset - used
    if isolated:
        raise FoamError("E_PARSE", f"isolated vertices {sorted(isolated)}")
    if len(foam.patch_map) != len(foam.patches):
        raise FoamError("E_PARSE", "duplicate patch ids")
    for p in foam.patches:
        if p.genus < 0 or (not p.orientable and p.genus < 1):
            raise FoamError("E_PARSE", f"patch {p.id}: illegal genus {p.genus}")
        if not p.boundary:
            raise FoamError("E_PARSE", f"patch {p.id}: needs at least one boundary circle")
        if len({c.id for c in p.boundary}) != len(p.boundary):
            raise FoamError("E_PARSE", f"patch {p.id}: duplicate circle ids")
        for c in p.boundary:
            for a in c.arcs:
                e = g.edge_map.get(a.edge)
                if e is None:
                    raise FoamError("E_PARSE", f"circle {c.id}: unknown edge {a.edge}")
                want = SEGMENT if c.kind == CYCLE else CIRCLE
                if e.kind != want:
                    raise FoamError("E_PARSE", f"circle {c.id}: edge {a.edge} is not a {want} edge")
            if c.kind == CIRCLE_EDGE and len(c.arcs) != 1:
                raise FoamError("E_PARSE", f"circle {c.id}: circle_edge image needs one edge")


# ---------------------------------------------------------------- validation

@dataclass(frozen=True, order=True)
class Violation:
    condition: str
    message: str
    patch: str | None = None
    circle: str | None = None
    edge: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_doc(self) -> dict:
        return {"ok": self.ok, "violations": [
            {k: v for k, v in vars(x).items() if v is not None} for x in self.violations]}


def _circle_violations(foam: Foam, p: SurfacePatch, c: BoundaryCircle) -> list[Violation]:
    out = []
    if c.kind == CIRCLE_EDGE:
        return out
    g = foam.graph
    if not c.arcs:
        return [Violation("b", "empty boundary cycle", p.id, c.id)]
    edges = [a.edge for a in c.arcs]
    for e in sorted({e for e in edges if edges.count(e) > 1}):
        out.append(Violation("b", f"edge {e} repeated in one boundary circle", p.id, c.id, e))
    ends = [arc_ends(g, a) for a in c.arcs]
    n = len(ends)
    for i in range(n):
        if ends[i][1] != ends[(i + 1) % n][0]:
            out.append(Violation("b", f"arcs {i} and {(i + 1) % n} do not meet", p.id, c.id, c.arcs[i].edge))
    tails = [t for t, _ in ends]
    for v in sorted({v for v in tails if tails.count(v) > 1}):
        out.append(Violation("b", f"vertex {v} visited twice", p.id, c.id))
    return out


def validate_foam(foam: Foam) -> ValidationReport:
    """Check foam conditions (a) coverage, (b) simple circle images, (c) one arc per patch and edge."""
    check_references(foam)
    violations = []
    covered = set()
    for p in foam.patches:
        per_edge: dict[str, int] = {}
        for c in p.boundary:
            violations.extend(_circle_violations(foam, p, c))
            for a in c.arcs:
                covered.add(a.edge)
                per_edge[a.edge] = per_edge.get(a.edge, 0) + 1
        for e, k in per_edge.items():
            if k > 1:
                violations.append(Violation("c", f"patch meets edge {e} {k} times", p.id, None, e))
    for e in foam.graph.edges:
        if e.id not in covered:
            violations.append(Violation("a", f"edge {e.id} is not in the image", None, None, e.id))
    return ValidationReport(tuple(sorted(set(violations))))


def require_valid(foam: Foam) -> None:
    rep = validate_foam(foam)
    if not rep.ok:
        raise FoamError("E_INVALID_FOAM", "; ".join(v.message for v in rep.violations))


# ---------------------------------------------------------------- normality

@dataclass(frozen=True)
class VertexLink:
    vertex: str
    components: tuple[tuple[tuple[str, int], ...], ...]

    @property
    def connected(self) -> bool:
        return len(self.components) == 1


@dataclass(frozen=True)
class NormalityReport:
    links: tuple[VertexLink, ...]

    @property
    def normal(self) -> bool:
        return all(l.connected for l in self.links)

    def to_doc(self) -> dict:
        return {"normal": self.normal, "vertices": [
            {"vertex": l.vertex, "connected": l.connected,
             "components": [[f"{e}:{'tail' if k == 0 else 'head'}" for e, k in comp] for comp in l.components]}
            for l in self.links]}


def link_graph(foam: Foam, v: str) -> tuple[list, list]:
    """Nodes (half-edge germs at ``v``) and corner adjacencies of the link of ``v``."""
    nodes = []
    for e in foam.graph.edges:
        if e.kind == SEGMENT:
            for k in (0, 1):
                if e.ends[k] == v:
                    nodes.append((e.id, k))
    adj = []
    for p in foam.patches:
        for c in p.boundary:
            if c.kind != CYCLE:
                continue
            n = len(c.arcs)
            for i in range(n):
                a, b = c.arcs[i], c.arcs[(i + 1) % n]
                if arc_ends(foam.graph, a)[1] == v:
                    adj.append((arc_germs(a)[1], arc_germs(b)[0]))
    return nodes, adj


def check_normality(foam: Foam) -> NormalityReport:
    require_valid(foam)
    links = []
    for v in sorted(foam.graph.vertices):
        nodes, adj = link_graph(foam, v)
        parent = {x: x for x in nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in adj:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        comps: dict = {}
        for x in nodes:
            comps.setdefault(find(x), []).append(x)
        links.append(VertexLink(v, tuple(sorted(tuple(sorted(c)) for c in comps.values()))))
    return NormalityReport(tuple(links))


# ---------------------------------------------------------------- invariants

def patch_euler_characteristic(p: SurfacePatch) -> int:
    k = len(p.boundary)
    return 2 - 2 * p.genus - k if p.orientable else 2 - p.genus - k


def euler_characteristic(x) -> int:
    """Euler characteristic of a patch, or the sum over the patches of a foam."""
    if isinstance(x, Foam):
        return sum(patch_euler_characteristic(p) for p in x.patches)
    return patch_euler_characteristic(x)


@dataclass(frozen=True)
class DoubleEntry:
    patch: str
    genus: int
    euler: int
    fixed_circles: int


def double_of_patch(p: SurfacePatch) -> DoubleEntry:
    k = len(p.boundary)
    genus = 2 * p.genus + k - 1 if p.orientable else p.genus + k - 1
    return DoubleEntry(p.id, genus, 2 - 2 * genus, k)


def double_report(foam: Foam) -> list[DoubleEntry]:
    return [double_of_patch(p) for p in foam.patches]


# ---------------------------------------------------------------- isomorphism

def _encode(foam: Foam):
    """Colored, edge-labeled digraph whose isomorphisms are the foam isomorphisms.

    Segment edges carry two half-edge nodes and circle edges two side nodes,
    so reversing an edge is a graph automorphism. Every boundary circle gets
    one arc node per (position, traversal direction); the traversal nodes
    hang off an orientation node of the patch (orientable) or of the circle.
    """
    colors: list[str] = []
    rel: list[tuple[int, int, str]] = []
    index: dict[tuple, int] = {}

    def node(key, color):
        index[key] = len(colors)
        colors.append(color)
        return index[key]

    for v in foam.graph.vertices:
        node(("V", v), "V")
    for e in foam.graph.edges:
        if e.kind == SEGMENT:
            ne = node(("E", e.id), "E")
            for k in (0, 1):
                h = node(("H", e.id, k), "H")
                rel.append((ne, h, "end"))
                rel.append((h, index[("V", e.ends[k])], "at"))
        else:
            ne = node(("E", e.id), "CE")
            for k in (0, 1):
                rel.append((ne, node(("H", e.id, k), "CS"), "side"))
    for p in foam.patches:
        np_ = node(("P", p.id), f"P:{int(p.orientable)}:{p.genus}")
        if p.orientable:
            for t in (0, 1):
                rel.append((np_, node(("PO", p.id, t), "O"), "orient"))
        for c in p.boundary:
            nq = node(("Q", p.id, c.id), "Q")
            rel.append((np_, nq, "circ"))
            if not p.orientable:
                for t in (0, 1):
                    rel.append((nq, node(("QO", p.id, c.id, t), "O"), "orient"))
            n = len(c.arcs)
            for t in (0, 1):
                onode = index[("PO", p.id, t)] if p.orientable else index[("QO", p.id, c.id, t)]
                seq = []
                for i in range(n):
                    a = node(("A", p.id, c.id, i, t), "A")
                    rel.append((nq, a, "arc"))
                    rel.append((a, onode, "in"))
                    seq.append(a)
                order = seq if t == 0 else seq[::-1]
                for i in range(n):
                    rel.append((order[i], order[(i + 1) % n], "next"))
                for i, arc in enumerate(c.arcs):
                    eff = arc if t == 0 else Arc(arc.edge, flip_dir(arc.dir))
                    a = seq[i]
                    if c.kind == CYCLE:
                        dep, arr = arc_germs(eff)
                        rel.append((a, index[("H",) + dep], "from"))
                        rel.append((a, index[("H",) + arr], "to"))
                    else:
                        side = 0 if eff.dir == FWD else 1
                        rel.append((a, index[("H", arc.edge, side)], "along"))
    return colors, rel, index


@dataclass(frozen=True)
class _Canon:
    certificate: str
    order: tuple[int, ...]
    index: dict = field(hash=False, compare=False)


def _canon(foam: Foam) -> _Canon:
    colors, rel, index = _encode(foam)
    cert, order = canon.canonical_form(colors, rel)
    return _Canon(cert, order, index)


def fingerprint(foam: Foam) -> str:
    """Label-independent canonical fingerprint (hex digest)."""
    require_valid(foam)
    return hashlib.sha256(_canon(foam).certificate.encode()).hexdigest()


@dataclass(frozen=True)
class IsoWitness:
    vertices: dict
    edges: dict          # edge id -> (edge id, flipped)
    patches: dict        # patch id -> (patch id, reversed)
    circles: dict        # (patch, circle) -> (patch, circle)

    def to_doc(self) -> dict:
        return {
            "vertices": self.vertices,
            "edges": {k: {"edge": v[0], "flipped": v[1]} for k, v in self.edges.items()},
            "patches": {k: {"patch": v[0], "reversed": v[1]} for k, v in self.patches.items()},
            "circles": {f"{k[0]}/{k[1]}": f"{v[0]}/{v[1]}" for k, v in self.circles.items()},
        }


def _witness_from(ca: _Canon, cb: _Canon) -> IsoWitness:
    inv_b = {v: k for k, v in cb.index.items()}
    rank_a = {node: k for k, node in enumerate(ca.order)}

    def image(key):
        return inv_b[cb.order[rank_a[ca.index[key]]]]

    vmap, emap, pmap, cmap = {}, {}, {}, {}
    for key in ca.index:
        kind = key[0]
        if kind == "V":
            vmap[key[1]] = image(key)[1]
        elif kind == "E":
            target = image(key)[1]
            h0 = image(("H", key[1], 0))
            emap[key[1]] = (target, h0[2] == 1)
        elif kind == "Q":
            cmap[(key[1], key[2])] = image(key)[1:]
        elif kind == "P":
            pmap[key[1]] = image(key)[1]
    preversed = {}
    for pid, target in pmap.items():
        if ("PO", pid, 0) in ca.index:
            preversed[pid] = (target, image(("PO", pid, 0))[2] == 1)
        else:
            preversed[pid] = (target, False)
    return IsoWitness(vmap, emap, preversed, cmap)


def _cyclic_equal(a: list, b: list) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    return any(a[k:] + a[:k] == b for k in range(len(a)))


def verify_witness(a: Foam, b: Foam, w: IsoWitness) -> bool:
    """Check a witness by direct substitution into ``a`` and comparison with ``b``."""
    ga, gb = a.graph, b.graph
    if sorted(w.vertices.values()) != sorted(gb.vertices) or set(w.vertices) != set(ga.vertices):
        return False
    if sorted(t for t, _ in w.edges.values()) != sorted(e.id for e in gb.edges):
        return False
    for e in ga.edges:
        t, flipped = w.edges[e.id]
        f = gb.edge(t)
        if f.kind != e.kind:
            return False
        if e.kind == SEGMENT:
            ends = tuple(w.vertices[v] for v in e.ends)
            if flipped:
                ends = ends[::-1]
            if ends != f.ends:
                return False
    if sorted(t for t, _ in w.patches.values()) != sorted(p.id for p in b.patches):
        return False

    def mapped(arc: Arc) -> tuple:
        t, flipped = w.edges[arc.edge]
        return (t, flip_dir(arc.dir) if flipped else arc.dir)

    for p in a.patches:
        tid, rev = w.patches[p.id]
        q = b.patch(tid)
        if (p.orientable, p.genus, len(p.boundary)) != (q.orientable, q.genus, len(q.boundary)):
            return False
        qcircles = {c.id: c for c in q.boundary}
        targets = set()
        for c in p.boundary:
            tp, tc = w.circles[(p.id, c.id)]
            if tp != tid or tc not in qcircles:
                return False
            targets.add(tc)
            seq = [mapped(x) for x in c.arcs]
            rseq = [(e, flip_dir(d)) for e, d in reversed(seq)]
            want = [(x.edge, x.dir) for x in qcircles[tc].arcs]
            if p.orientable:
                if not _cyclic_equal(rseq if rev else seq, want):
                    return False
            elif not (_cyclic_equal(seq, want) or _cyclic_equal(rseq, want)):
                return False
        if len(targets) != len(p.boundary):
            return False
    return True


def isomorphic(a: Foam, b: Foam) -> IsoWitness | None:
    """An isomorphism witness from ``a`` to ``b``, or None."""
    require_valid(a)
    require_valid(b)
    ca, cb = _canon(a), _canon(b)
    if ca.certificate != cb.certificate:
        return None
    w = _witness_from(ca, cb)
    if not verify_witness(a, b, w):
        raise AssertionError("canonical labeling produced an invalid witness")
    return w


def all_arcs(foam: Foam) -> Iterable[tuple[SurfacePatch, BoundaryCircle, int, Arc]]:
    for p in foam.patches:
        for c in p.boundary:
            for i, a in enumerate(c.arcs):
                yield p, c, i, a
