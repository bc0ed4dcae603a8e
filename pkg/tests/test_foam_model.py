import json
import random

import pytest

from helpers import random_foams, relabel
from oracles import simplicial_normality

from kleinfoam import corpus
from kleinfoam.errors import FoamError
from kleinfoam.foam_model import (CIRCLE, CYCLE, FWD, SEGMENT, Arc, BoundaryCircle, Edge, Foam, GeneralizedGraph, SurfacePatch,
                                  check_normality, double_of_patch, double_report, euler_characteristic,
                                  fingerprint, foam_from_doc, foam_to_doc, isomorphic, load_foam,
                                  validate_foam, verify_witness)


def test_fold_and_theta_are_valid():
    assert validate_foam(corpus.fold()).ok
    assert validate_foam(corpus.theta()).ok


def test_repeated_edge_violates_b():
    rep = validate_foam(corpus.theta_bad())
    assert not rep.ok
    b = [v for v in rep.violations if v.condition == "b"]
    assert b and b[0].patch == "p01" and b[0].edge == "e0"


def test_uncovered_edge_violates_a():
    f = corpus.fold()
    g = GeneralizedGraph((), f.graph.edges + (Edge("extra", CIRCLE),))
    rep = validate_foam(Foam(g, f.patches))
    assert [v.condition for v in rep.violations] == ["a"]
    assert rep.violations[0].edge == "extra"


def test_broken_cycle_violates_b():
    g = GeneralizedGraph(("u", "v", "w"), (Edge("e", SEGMENT, ("u", "v")), Edge("f", SEGMENT, ("w", "u"))))
    p = SurfacePatch("p", True, 0, (BoundaryCircle("c", CYCLE, (Arc("e", FWD), Arc("f", FWD))),))
    rep = validate_foam(Foam(g, (p,)))
    assert {v.condition for v in rep.violations} == {"b"}


def test_dangling_reference_is_a_parse_error():
    doc = foam_to_doc(corpus.fold())
    doc["patches"][0]["boundary"][0]["image"]["edge"] = "nope"
    with pytest.raises(FoamError) as exc:
        foam_from_doc(doc)
    assert exc.value.code == "E_PARSE"


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("graph"),
    lambda d: d["graph"]["edges"].append({"id": "x", "kind": "wobbly"}),
    lambda d: d["patches"][0].update(genus="1"),
    lambda d: d["patches"][0].update(orientable=1),
    lambda d: d.update(format=2),
    lambda d: d["patches"][0]["boundary"][0]["image"].update(dir="up"),
    lambda d: d.update(extra=1),
])
def test_malformed_documents(mutate):
    doc = foam_to_doc(corpus.fold())
    mutate(doc)
    with pytest.raises(FoamError) as exc:
        foam_from_doc(doc)
    assert exc.value.code == "E_PARSE"


def test_load_missing_file(tmp_path):
    with pytest.raises(FoamError) as exc:
        load_foam(tmp_path / "none.json")
    assert exc.value.code == "E_PARSE"


@pytest.mark.parametrize("name", sorted(corpus.FOAMS))
def test_document_roundtrip(name, tmp_path):
    f = corpus.FOAMS[name]()
    path = tmp_path / "f.json"
    path.write_text(json.dumps(foam_to_doc(f)))
    assert load_foam(path) == f


def test_normality_examples():
    assert check_normality(corpus.fold()).normal
    rep = check_normality(corpus.theta())
    assert rep.normal
    v0 = next(l for l in rep.links if l.vertex == "v0")
    assert len(v0.components[0]) == 3
    bad = check_normality(corpus.two_loops())
    assert not bad.normal
    (link,) = bad.links
    assert link.components == ((("e1", 0), ("e1", 1)), (("e2", 0), ("e2", 1)))


def test_normality_matches_simplicial_oracle():
    for f in random_foams(31, 120):
        assert check_normality(f).normal == simplicial_normality(f)


def test_euler_characteristic_examples():
    disk = SurfacePatch("d", True, 0, (None,))
    annulus = SurfacePatch("a", True, 0, (None, None))
    moebius = SurfacePatch("m", False, 1, (None,))
    assert [euler_characteristic(p) for p in (disk, annulus, moebius)] == [1, 0, 0]
    assert euler_characteristic(corpus.fold()) == 2
    assert euler_characteristic(corpus.torus()) == 0


def test_double_examples():
    disk = double_of_patch(SurfacePatch("d", True, 0, (None,)))
    assert (disk.genus, disk.euler, disk.fixed_circles) == (0, 2, 1)
    assert double_of_patch(SurfacePatch("a", True, 0, (None, None))).genus == 1
    assert double_of_patch(SurfacePatch("m", False, 1, (None,))).genus == 1
    assert [d.patch for d in double_report(corpus.theta())] == ["p01", "p12", "p02"]


def test_fingerprint_examples():
    f = corpus.fold()
    swapped = Foam(f.graph, tuple(
        SurfacePatch("p1" if p.id == "p0" else "p0", p.orientable, p.genus, p.boundary) for p in f.patches))
    assert fingerprint(f) == fingerprint(swapped)
    assert fingerprint(f) != fingerprint(corpus.theta())
    t = corpus.theta()
    ren = {"e0": "e1", "e1": "e2", "e2": "e0"}
    doc = json.loads(json.dumps(foam_to_doc(t)))
    for e in doc["graph"]["edges"]:
        e["id"] = ren[e["id"]]
    for p in doc["patches"]:
        for c in p["boundary"]:
            for a in c["image"]["arcs"]:
                a["edge"] = ren[a["edge"]]
    assert fingerprint(foam_from_doc(doc)) == fingerprint(t)


def test_fingerprint_distinguishes_corpus():
    prints = {name: fingerprint(make()) for name, make in corpus.FOAMS.items()}
    assert len(set(prints.values())) == len(prints)


def test_isomorphism_witness_under_random_relabeling():
    rng = random.Random(3)
    foams = [make() for make in corpus.FOAMS.values()] + random_foams(4, 60)
    for f in foams:
        g, _ = relabel(f, None, rng)
        w = isomorphic(f, g)
        assert w is not None and verify_witness(f, g, w)
        assert fingerprint(f) == fingerprint(g)


def test_non_isomorphic():
    assert isomorphic(corpus.torus(), corpus.annulus()) is None
    assert isomorphic(corpus.fold(), corpus.mobius_fold()) is None
    assert isomorphic(corpus.two_bigon(), corpus.two_bigon()) is not None


def test_invalid_foam_refused_by_fingerprint():
    with pytest.raises(FoamError) as exc:
        fingerprint(corpus.theta_bad())
    assert exc.value.code == "E_INVALID_FOAM"
