"""Foams assembled from finite-index subgroups of a bordered surface group.

Each subgroup (given by its coset table) yields a cover of the base surface;
the boundary arcs of that cover (segment orbits) are grouped into edges, at
most one arc per cover in each edge, and arcs in one edge are glued
head-to-head along the orientation inherited from the base oval.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import FoamError
from .foam_model import (BWD, CYCLE, FWD, SEGMENT, Arc, BoundaryCircle, Edge, Foam,
                         GeneralizedGraph, SurfacePatch, check_normality, fingerprint,
                         validate_foam)
from .group_presentations import Presentation, TopType, presentation_of_type
from .subgroup_enum import CosetTable, CoverType, cover_topological_type, low_index_subgroups


@dataclass(frozen=True, order=True)
class SegmentOrbit:
    patch: int  # 1-based position in the system's table list
    oval: int
    j: int
    coset: int  # 0-based coset fixed by c_{oval,j}

    @property
    def id(self) -> str:
        return f"{self.patch}:{self.oval}:{self.j}:{self.coset + 1}"

    @classmethod
    def parse(cls, text: str) -> "SegmentOrbit":
        try:
            l, i, j, c = (int(x) for x in text.split(":"))
        except ValueError:
            raise FoamError("E_PARSE", f"bad orbit id {text!r}") from None
        return cls(l, i, j, c - 1)


EdgeSpec = tuple  # tuple of SegmentOrbit, sorted


def check_base(t: TopType) -> None:
    if t.m != 0:
        raise FoamError("E_UNGLUABLE", "bases with holes give covers with reflection-free boundary")
    if t.k < 1 or min(t.b) < 1:
        raise FoamError("E_UNGLUABLE", "bases need at least one oval and a puncture on every oval")


def _cover(table: CosetTable, l: int) -> CoverType:
    ct = cover_topological_type(table)
    if ct.type.m or ct.type.k == 0 or not any(ct.ovals.values()):
        raise FoamError("E_UNGLUABLE", f"patch {l} has boundary without reflection arcs")
    return ct


def segment_orbits(tables) -> list[SegmentOrbit]:
    out = []
    for l, table in enumerate(tables, 1):
        check_base(table.presentation.type)
        ct = _cover(table, l)
        for i, circles in sorted(ct.ovals.items()):
            for circle in circles:
                out.extend(SegmentOrbit(l, i, a.j, a.coset) for a in circle)
    return sorted(out)


def _set_partitions(items: list, patch_of):
    """Partitions of ``items`` into blocks with distinct patches, in a fixed order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, patch_of):
        yield [[first]] + part
        for k, block in enumerate(part):
            if all(patch_of(x) != patch_of(first) for x in block):
                yield part[:k] + [[first] + block] + part[k + 1:]


def enumerate_edge_partitions(orbits, limit: int | None = None):
    """Stream every H: per (oval, j), a partition of its orbits into edges.

    Raises E_LIMIT when more than ``limit`` candidates would be produced.
    """
    groups: dict[tuple[int, int], list[SegmentOrbit]] = {}
    for o in sorted(orbits):
        groups.setdefault((o.oval, o.j), []).append(o)
    per_group = [list(_set_partitions(groups[k], lambda o: o.patch)) for k in sorted(groups)]
    for n, choice in enumerate(itertools.product(*per_group)):
        if limit is not None and n >= limit:
            raise FoamError("E_LIMIT", f"more than {limit} edge partitions")
        yield normalize_partition(b for part in choice for b in part)


def normalize_partition(blocks) -> tuple[EdgeSpec, ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class FoamSystem:
    base: TopType
    tables: tuple[CosetTable, ...]
    H: tuple[EdgeSpec, ...]

    @property
    def presentation(self) -> Presentation:
        return presentation_of_type(self.base)

    def to_doc(self) -> dict:
        return {"format": 1, "base": str(self.base), "tables": [t.to_doc() for t in self.tables],
                "H": [[o.id for o in block] for block in self.H]}

    @classmethod
    def from_doc(cls, doc) -> "FoamSystem":
        try:
            base = TopType.parse(doc["base"])
            tables = tuple(CosetTable.from_doc(t) for t in doc["tables"])
            H = normalize_partition([SegmentOrbit.parse(o) for o in b] for b in doc["H"])
        except (KeyError, TypeError) as exc:
            raise FoamError("E_PARSE", f"foam system document: {exc}") from None
        for t in tables:
            if t.presentation.type != base:
                raise FoamError("E_PARSE", "table over a different base type")
        return cls(base, tables, H)


def check_system(sys: FoamSystem) -> list[SegmentOrbit]:
    check_base(sys.base)
    orbits = segment_orbits(sys.tables)
    seen = set()
    for block in sys.H:
        if len({(o.oval, o.j) for o in block}) != 1:
            raise FoamError("E_EDGE_CONFLICT", f"edge {[o.id for o in block]} mixes reflection classes")
        if len({o.patch for o in block}) != len(block):
            raise FoamError("E_EDGE_CONFLICT", f"edge {[o.id for o in block]} repeats a patch")
        for o in block:
            if o in seen:
                raise FoamError("E_EDGE_CONFLICT", f"orbit {o.id} lies in two edges")
            seen.add(o)
    if seen != set(orbits):
        missing = sorted(set(orbits) - seen)
        extra = sorted(seen - set(orbits))
        raise FoamError("E_EDGE_CONFLICT", f"H must partition the segment orbits "
                        f"(missing {[o.id for o in missing]}, unknown {[o.id for o in extra]})")
    return orbits


@dataclass(frozen=True)
class BuiltFoam:
    foam: Foam
    edge_orbits: dict  # edge id -> tuple of SegmentOrbit
    patch_tables: dict  # patch id -> 1-based table position
    arc_orbits: dict = field(default_factory=dict)  # (patch id, circle id, position) -> SegmentOrbit

    def provenance_doc(self) -> dict:
        return {"edges": {e: [o.id for o in os] for e, os in sorted(self.edge_orbits.items())},
                "patches": dict(sorted(self.patch_tables.items()))}


def build_foam_from_system(sys: FoamSystem) -> BuiltFoam:
    check_system(sys)
    edge_of: dict[SegmentOrbit, str] = {}
    edge_orbits = {}
    for n, block in enumerate(sys.H, 1):
        eid = f"E{n}"
        edge_orbits[eid] = block
        for o in block:
            edge_of[o] = eid

    # arc endpoints: (orbit, 0) is the tail and (orbit, 1) the head in the base direction
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    patches = []
    patch_tables = {}
    arc_orbits = {}
    for l, table in enumerate(sys.tables, 1):
        ct = _cover(table, l)
        pid = f"P{l}"
        patch_tables[pid] = l
        circles = []
        k = 0
        for i, cs in sorted(ct.ovals.items()):
            for circle in cs:
                k += 1
                cid = f"{pid}.c{k}"
                orbs = [SegmentOrbit(l, i, a.j, a.coset) for a in circle]
                arcs = tuple(Arc(edge_of[o], FWD if a.forward else BWD) for o, a in zip(orbs, circle))
                for pos, o in enumerate(orbs):
                    arc_orbits[(pid, cid, pos)] = o
                    find((o, 0))
                    find((o, 1))
                for t in range(len(circle)):
                    a, b = circle[t], circle[(t + 1) % len(circle)]
                    oa, ob = orbs[t], orbs[(t + 1) % len(circle)]
                    union((oa, 1 if a.forward else 0), (ob, 0 if b.forward else 1))
                circles.append(BoundaryCircle(cid, CYCLE, arcs))
        patches.append(SurfacePatch(pid, ct.orientable, ct.type.g, tuple(circles)))
    for block in sys.H:
        for o in block[1:]:
            union((block[0], 0), (o, 0))
            union((block[0], 1), (o, 1))
    roots = sorted({find(x) for x in list(parent)})
    vname = {r: f"V{n}" for n, r in enumerate(roots, 1)}
    edges = tuple(Edge(eid, SEGMENT, (vname[find((block[0], 0))], vname[find((block[0], 1))]))
                  for eid, block in edge_orbits.items())
    foam = Foam(GeneralizedGraph(tuple(vname[r] for r in roots), edges), tuple(patches))
    rep = validate_foam(foam)
    if not rep.ok:
        v = rep.violations[0]
        raise FoamError("E_LEMMA31_VIOLATION", f"built foam is not a foam: ({v.condition}) {v.message}")
    if not check_normality(foam).normal:
        raise FoamError("E_LEMMA31_VIOLATION", "built foam is not normal")
    return BuiltFoam(foam, edge_orbits, patch_tables, arc_orbits)


def recover_system(built: BuiltFoam, base: TopType, tables) -> FoamSystem:
    """Foam system read back from a built foam via its provenance."""
    blocks: dict[str, list[SegmentOrbit]] = {}
    for p in built.foam.patches:
        for c in p.boundary:
            for pos, arc in enumerate(c.arcs):
                blocks.setdefault(arc.edge, []).append(built.arc_orbits[(p.id, c.id, pos)])
    order = sorted(built.patch_tables.items(), key=lambda kv: kv[1])
    tabs = tuple(tables[l - 1] for _, l in order)
    return FoamSystem(base, tabs, normalize_partition(blocks.values()))


@dataclass(frozen=True)
class RoundTrip:
    ok: bool
    messages: tuple[str, ...]
    fingerprint: str

    def to_doc(self) -> dict:
        return {"ok": self.ok, "messages": list(self.messages), "fingerprint": self.fingerprint}


def roundtrip_check(sys: FoamSystem) -> RoundTrip:
    built = build_foam_from_system(sys)
    back = recover_system(built, sys.base, sys.tables)
    msgs = []
    if back.tables != sys.tables:
        msgs.append("recovered subgroup tables differ")
    if back.H != normalize_partition(sys.H):
        msgs.append("recovered edge partition differs")
    fp = fingerprint(built.foam)
    fp2 = fingerprint(build_foam_from_system(back).foam)
    if fp != fp2:
        msgs.append("rebuilt foam has a different fingerprint")
    return RoundTrip(not msgs, tuple(msgs), fp)


def permute_patches(sys: FoamSystem, order) -> FoamSystem:
    """Same system with the table list reordered (``order[k]`` = old position of new k)."""
    new_pos = {old + 1: new + 1 for new, old in enumerate(order)}
    tables = tuple(sys.tables[o] for o in order)
    H = normalize_partition(
        [SegmentOrbit(new_pos[o.patch], o.oval, o.j, o.coset) for o in block] for block in sys.H)
    return FoamSystem(sys.base, tables, H)


def gluable_tables(base: TopType, max_index: int) -> list[CosetTable]:
    out = []
    for t in low_index_subgroups(presentation_of_type(base), max_index):
        try:
            _cover(t, 1)
        except FoamError as exc:
            if exc.code != "E_UNGLUABLE":
                raise
            continue
        out.append(t)
    return out


def enumerate_foam_systems(base: TopType, max_index: int, max_patches: int = 2,
                           max_partitions: int = 200):
    """Foam systems over ``base``: patch lists are multisets of gluable
    subgroup classes of index <= max_index; each patch list contributes at
    most ``max_partitions`` edge partitions (first in enumeration order)."""
    base = TopType.parse(base)
    check_base(base)
    tables = gluable_tables(base, max_index)
    for n in range(1, max_patches + 1):
        for combo in itertools.combinations_with_replacement(range(len(tables)), n):
            tabs = tuple(tables[c] for c in combo)
            orbits = segment_orbits(tabs)
            for H in itertools.islice(enumerate_edge_partitions(orbits), max_partitions):
                yield FoamSystem(base, tabs, H)
