"""Permutation-monodromy model of foam morphisms to the disk foam.

A map of a patch to the disk D is recorded by its monodromy: one
permutation of the sheets for each interior branch value, listed in the
order of the shared branch-label list. The monodromy basepoint sits on the
boundary circle of D just before marked point 0, so the boundary monodromy
is the ordered product of the branch permutations.

Graph side: vertices go to marked points ``0..M-1`` of the boundary circle;
a segment edge covers the positive arc from the image of its tail to the
image of its head (``length`` elementary arcs; composites may wrap more than
once around, so ``length`` can exceed ``M``); a
circle edge wraps ``winding`` times around the boundary circle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import perm as P
from .errors import FoamError
from .foam_model import (CIRCLE, CYCLE, FWD, Arc, Foam, Violation, ValidationReport,
                         flip_dir, require_valid)


@dataclass(frozen=True)
class MarkedDisk:
    M: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.M < 0 or len(set(self.labels)) != len(self.labels):
            raise FoamError("E_PARSE", "marked disk needs M >= 0 and unique labels")


@dataclass(frozen=True)
class DiskCoverData:
    degree: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.degree < 1:
            raise FoamError("E_PARSE", "degree must be positive")
        for p in self.perms:
            if not P.is_perm(p, self.degree):
                raise FoamError("E_PARSE", f"{p} is not a permutation of degree {self.degree}")

    @property
    def boundary_perm(self) -> tuple[int, ...]:
        return P.product(self.perms, self.degree)

    @property
    def transitive(self) -> bool:
        return P.is_transitive(self.perms, self.degree)

    @classmethod
    def from_cycles(cls, degree: int, texts) -> "DiskCoverData":
        return cls(degree, tuple(P.parse_cycles(t, degree) for t in texts))

    def cycle_strings(self) -> list[str]:
        return [P.format_cycles(p) for p in self.perms]

    def padded(self, n: int) -> "DiskCoverData":
        """Same cover with identity permutations appended up to ``n`` labels."""
        return DiskCoverData(self.degree, self.perms + (P.identity(self.degree),) * (n - len(self.perms)))


def rh_invariants(cover: DiskCoverData) -> tuple[int, int, int]:
    """(Euler characteristic, boundary circles, genus) of a connected disk cover."""
    if not cover.transitive:
        raise FoamError("E_INCONSISTENT_MONODROMY", "cover is not transitive")
    chi = cover.degree - sum(P.defect(p) for p in cover.perms)
    circles = P.num_cycles(cover.boundary_perm)
    twice_g = 2 - chi - circles
    if twice_g < 0 or twice_g % 2:
        raise FoamError("E_INCONSISTENT_MONODROMY", f"chi={chi} with {circles} circles gives no genus")
    return chi, circles, twice_g // 2


def _transposition(d: int, i: int, j: int) -> tuple[int, ...]:
    p = list(range(d))
    p[i], p[j] = j, i
    return tuple(p)


def construct_disk_morphism(genus: int, circles: int) -> DiskCoverData:
    """Degree-``circles`` cover of the disk by the surface of the given genus
    with every boundary circle mapped with degree 1."""
    if genus < 0 or circles < 1:
        raise FoamError("E_UNREALIZABLE", "need genus >= 0 and at least one circle")
    d = circles
    if d == 1 and genus > 0:
        raise FoamError("E_UNREALIZABLE", "a degree-1 cover of the disk is a disk")
    up = [_transposition(d, i, i + 1) for i in range(d - 1)]
    handles = [_transposition(d, 0, 1)] * (2 * genus) if genus else []
    return DiskCoverData(d, tuple(up + up[::-1] + handles))


@dataclass(frozen=True)
class SphereCover:
    degree: int
    labels: tuple[str, ...]
    perms: tuple[tuple[int, ...], ...]

    def euler(self) -> int:
        return 2 * self.degree - sum(P.defect(p) for p in self.perms)

    def genus(self) -> int:
        return (2 - self.euler()) // 2


def sphere_double(cover: DiskCoverData, labels=None) -> SphereCover:
    """Monodromy of the doubled map on the doubled disk (the sphere).

    Each branch value p gains a mirror value with permutation p^-1; mirror
    values are listed in reverse so the total product stays the identity.
    """
    labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(len(cover.perms)))
    mirror = tuple(l + "'" for l in reversed(labels))
    perms = cover.perms + tuple(P.inverse(p) for p in reversed(cover.perms))
    return SphereCover(cover.degree, labels + mirror, perms)


# ---------------------------------------------------------------- function data

@dataclass(frozen=True)
class EdgeImage:
    """Image of a graph edge; ``dir`` names the edge direction mapped positively."""

    dir: str
    start: int = 0
    length: int = 0
    winding: int = 0


@dataclass(frozen=True)
class CircleData:
    circle: str
    cycle: tuple[int, ...]
    arcs: tuple[int, ...]


@dataclass(frozen=True)
class PatchData:
    patch: str
    cover: DiskCoverData
    circles: tuple[CircleData, ...]
    sign: int = 1


@dataclass(frozen=True)
class FunctionData:
    disk: MarkedDisk
    vertex_images: dict
    edge_images: dict
    patches: tuple[PatchData, ...]

    def patch_data(self, pid: str) -> PatchData:
        for pd in self.patches:
            if pd.patch == pid:
                return pd
        raise KeyError(pid)

    def __hash__(self):
        return hash(json.dumps(function_data_to_doc(self), sort_keys=True))


def traversal(arcs, sheets, sign: int):
    """Arcs and their sheet labels in the order the oriented patch induces."""
    if sign == 1:
        return list(arcs), list(sheets)
    return [Arc(a.edge, flip_dir(a.dir)) for a in reversed(arcs)], list(reversed(sheets))


def validate_function_data(foam: Foam, fn: FunctionData) -> ValidationReport:
    require_valid(foam)
    out: list[Violation] = []
    M = fn.disk.M
    nlab = len(fn.disk.labels)
    g = foam.graph

    def bad(cond, msg, patch=None, circle=None, edge=None):
        out.append(Violation(cond, msg, patch, circle, edge))

    for v in g.vertices:
        idx = fn.vertex_images.get(v)
        if idx is None or not 0 <= idx < M:
            bad("graph", f"vertex {v} has no marked point")
    for e in g.edges:
        im = fn.edge_images.get(e.id)
        if im is None:
            bad("graph", f"edge {e.id} has no image", edge=e.id)
            continue
        if e.kind == CIRCLE:
            if im.winding < 1:
                bad("graph", f"circle edge {e.id} needs winding >= 1", edge=e.id)
            continue
        tail, head = e.ends if im.dir == FWD else e.ends[::-1]
        ti, hi = fn.vertex_images.get(tail), fn.vertex_images.get(head)
        if ti is None or hi is None or M == 0:
            continue
        if im.length < 1 or im.start != ti or (im.start + im.length) % M != hi:
            bad("graph", f"edge {e.id} image does not join the images of its ends", edge=e.id)
    if out:
        return ValidationReport(tuple(out))

    seen = set()
    for pd in fn.patches:
        if pd.patch not in foam.patch_map or pd.patch in seen:
            bad("patch", f"unknown or repeated patch {pd.patch}", pd.patch)
            continue
        seen.add(pd.patch)
        p = foam.patch(pd.patch)
        if not p.orientable:
            bad("patch", "unfolded disk covers need orientable patches", p.id)
            continue
        if pd.sign not in (1, -1):
            bad("patch", "sign must be +1 or -1", p.id)
            continue
        cov = pd.cover
        if len(cov.perms) != nlab:
            bad("labels", f"{len(cov.perms)} permutations for {nlab} branch labels", p.id)
            continue
        sb = cov.boundary_perm
        cyc = {P.rotate_min(c) for c in P.cycles(sb)}
        listed = [P.rotate_min(cd.cycle) for cd in pd.circles]
        if len(cyc) != len(p.boundary):
            bad("circles", f"boundary permutation has {len(cyc)} cycles but the patch has "
                f"{len(p.boundary)} boundary circles", p.id)
            continue
        if sorted(listed) != sorted(cyc) or sorted(cd.circle for cd in pd.circles) != sorted(c.id for c in p.boundary):
            bad("circles", "circles do not biject with the cycles of the boundary permutation", p.id)
            continue
        if not cov.transitive:
            bad("transitive", "monodromy is not transitive on a connected patch", p.id)
            continue
        try:
            chi, k, genus = rh_invariants(cov)
        except FoamError as exc:
            bad("riemann-hurwitz", exc.message, p.id)
            continue
        if (genus, k) != (p.genus, len(p.boundary)):
            bad("riemann-hurwitz", f"cover has genus {genus} with {k} circles", p.id)
        circles = {c.id: c for c in p.boundary}
        for cd in pd.circles:
            _check_circle(fn, foam, p.id, circles[cd.circle], cd, pd.sign, sb, bad)
    missing = {p.id for p in foam.patches} - seen
    for pid in sorted(missing):
        bad("patch", f"patch {pid} has no cover data", pid)
    return ValidationReport(tuple(out))


def _check_circle(fn, foam, pid, circle, cd, sign, sb, bad) -> None:
    M = fn.disk.M
    m = len(cd.cycle)
    if len(cd.arcs) != len(circle.arcs) or any(s not in cd.cycle for s in cd.arcs):
        bad("sheets", "arc sheets must lie in the circle's cycle", pid, circle.id)
        return
    arcs, sheets = traversal(circle.arcs, cd.arcs, sign)
    for a in arcs:
        if a.dir != fn.edge_images[a.edge].dir:
            bad("orientation", f"edge {a.edge} is traversed against its image", pid, circle.id, a.edge)
            return
    if circle.kind != CYCLE:
        if fn.edge_images[arcs[0].edge].winding != m:
            bad("winding", f"circle edge winds {fn.edge_images[arcs[0].edge].winding} times "
                f"but the circle's cycle has length {m}", pid, circle.id)
        return
    total = 0
    n = len(arcs)
    for k in range(n):
        im = fn.edge_images[arcs[k].edge]
        total += im.length
        crossings = (im.start + im.length) // M
        if P.power(sb, crossings)[sheets[k]] != sheets[(k + 1) % n]:
            bad("sheets", f"sheet of arc {k + 1} does not continue arc {k}", pid, circle.id)
            return
    if total != M * m:
        bad("winding", f"circle covers {total} elementary arcs, expected {M * m}", pid, circle.id)


# ---------------------------------------------------------------- documents

def function_data_to_doc(fn: FunctionData) -> dict:
    edges = {}
    for eid, im in sorted(fn.edge_images.items()):
        if im.winding:
            edges[eid] = {"dir": im.dir, "winding": im.winding}
        else:
            edges[eid] = {"dir": im.dir, "arc": [im.start, im.length]}
    return {
        "format": 1,
        "marked_disk": {"M": fn.disk.M, "branch_labels": list(fn.disk.labels)},
        "graph_map": {"vertices": dict(sorted(fn.vertex_images.items())), "edges": edges},
        "patches": [{
            "patch": pd.patch, "sign": pd.sign, "degree": pd.cover.degree,
            "perms": pd.cover.cycle_strings(),
            "circles": [{"circle": cd.circle, "cycle": [s + 1 for s in cd.cycle], "arcs": [s + 1 for s in cd.arcs]}
                        for cd in pd.circles],
        } for pd in fn.patches],
    }


def function_data_from_doc(doc) -> FunctionData:
    try:
        md = doc["marked_disk"]
        disk = MarkedDisk(int(md["M"]), tuple(md["branch_labels"]))
        gm = doc["graph_map"]
        vimg = {str(k): int(v) for k, v in gm["vertices"].items()}
        eimg = {}
        for eid, d in gm["edges"].items():
            if d.get("dir") not in ("fwd", "bwd"):
                raise FoamError("E_PARSE", f"edge {eid}: bad dir")
            if "winding" in d:
                eimg[eid] = EdgeImage(d["dir"], winding=int(d["winding"]))
            else:
                start, length = d["arc"]
                eimg[eid] = EdgeImage(d["dir"], int(start), int(length))
        patches = []
        for pdoc in doc["patches"]:
            deg = int(pdoc["degree"])
            cover = DiskCoverData.from_cycles(deg, pdoc["perms"])
            circles = tuple(CircleData(c["circle"], tuple(s - 1 for s in c["cycle"]), tuple(s - 1 for s in c["arcs"]))
                            for c in pdoc["circles"])
            patches.append(PatchData(pdoc["patch"], cover, circles, int(pdoc.get("sign", 1))))
    except (KeyError, TypeError, ValueError) as exc:
        raise FoamError("E_PARSE", f"function data: {exc}") from None
    return FunctionData(disk, vimg, eimg, tuple(patches))


def total_defect(cover: DiskCoverData) -> int:
    return sum(P.defect(p) for p in cover.perms)

