"""Small named foams and presentation types used in demos and tests."""

from __future__ import annotations

from .foam_model import (BWD, CIRCLE, CIRCLE_EDGE, CYCLE, FWD, SEGMENT, Arc,
                         BoundaryCircle, Edge, Foam, GeneralizedGraph, SurfacePatch)


def _cycle(cid: str, *arcs: tuple[str, str]) -> BoundaryCircle:
    return BoundaryCircle(cid, CYCLE, tuple(Arc(e, d) for e, d in arcs))


def _on_circle(cid: str, edge: str, d: str = FWD) -> BoundaryCircle:
    return BoundaryCircle(cid, CIRCLE_EDGE, (Arc(edge, d),))


def fold() -> Foam:
    """Two disks glued along one circle edge (a sphere)."""
    g = GeneralizedGraph((), (Edge("e", CIRCLE),))
    return Foam(g, (SurfacePatch("p0", True, 0, (_on_circle("c0", "e"),)),
                    SurfacePatch("p1", True, 0, (_on_circle("c1", "e"),))))


def theta() -> Foam:
    g = GeneralizedGraph(("v0", "v1"), tuple(Edge(f"e{i}", SEGMENT, ("v0", "v1")) for i in range(3)))
    return Foam(g, (
        SurfacePatch("p01", True, 0, (_cycle("c01", ("e0", FWD), ("e1", BWD)),)),
        SurfacePatch("p12", True, 0, (_cycle("c12", ("e1", FWD), ("e2", BWD)),)),
        SurfacePatch("p02", True, 0, (_cycle("c02", ("e0", FWD), ("e2", BWD)),)),
    ))


def theta_bad() -> Foam:
    """Theta foam with one boundary circle running over e0 twice."""
    f = theta()
    bad = SurfacePatch("p01", True, 0, (_cycle("c01", ("e0", FWD), ("e0", BWD)),))
    return Foam(f.graph, (bad,) + f.patches[1:])


def two_bigon() -> Foam:
    g = GeneralizedGraph(("v0", "v1"), (Edge("e0", SEGMENT, ("v0", "v1")), Edge("e1", SEGMENT, ("v0", "v1"))))
    return Foam(g, (SurfacePatch("p0", True, 0, (_cycle("c0", ("e0", FWD), ("e1", BWD)),)),
                    SurfacePatch("p1", True, 0, (_cycle("c1", ("e0", FWD), ("e1", BWD)),))))


def annulus() -> Foam:
    """A single annulus whose two boundary circles lie on two circle edges."""
    g = GeneralizedGraph((), (Edge("A", CIRCLE), Edge("B", CIRCLE)))
    return Foam(g, (SurfacePatch("p", True, 0, (_on_circle("c1", "A"), _on_circle("c2", "B"))),))


def torus() -> Foam:
    """Two annuli glued along both boundary circles."""
    g = GeneralizedGraph((), (Edge("A", CIRCLE), Edge("B", CIRCLE)))
    return Foam(g, (SurfacePatch("p", True, 0, (_on_circle("p1", "A"), _on_circle("p2", "B"))),
                    SurfacePatch("q", True, 0, (_on_circle("q1", "A"), _on_circle("q2", "B")))))


def two_loops() -> Foam:
    """Two disks on two loops at one vertex: valid but not normal."""
    g = GeneralizedGraph(("v",), (Edge("e1", SEGMENT, ("v", "v")), Edge("e2", SEGMENT, ("v", "v"))))
    return Foam(g, (SurfacePatch("A", True, 0, (_cycle("a", ("e1", FWD)),)),
                    SurfacePatch("B", True, 0, (_cycle("b", ("e2", FWD)),))))


def mobius_fold() -> Foam:
    """A Moebius band and a disk sharing one circle edge."""
    g = GeneralizedGraph((), (Edge("e", CIRCLE),))
    return Foam(g, (SurfacePatch("m", False, 1, (_on_circle("cm", "e"),)),
                    SurfacePatch("d", True, 0, (_on_circle("cd", "e"),))))


FOAMS = {
    "fold": fold,
    "theta": theta,
    "two_bigon": two_bigon,
    "annulus": annulus,
    "torus": torus,
    "two_loops": two_loops,
    "mobius_fold": mobius_fold,
}

# topological type tuples (sign, g, m, r, k, (b_1..b_k))
TORUS = ("+", 1, 0, 0, 0, ())
FREE2 = ("+", 0, 0, 3, 0, ())
DIHEDRAL = ("+", 0, 0, 0, 1, (2,))
TRIANGLE = ("+", 0, 0, 0, 1, (3,))
HOLED_TORUS = ("+", 1, 1, 0, 0, ())
CROSSCAP_OVAL = ("-", 1, 0, 0, 1, (1,))
