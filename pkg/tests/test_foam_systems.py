import itertools
import json

import pytest

from kleinfoam import corpus
from kleinfoam.errors import FoamError
from kleinfoam.foam_model import check_normality, fingerprint, validate_foam
from kleinfoam.foam_systems import (FoamSystem, SegmentOrbit, build_foam_from_system,
                                    enumerate_edge_partitions, enumerate_foam_systems, gluable_tables,
                                    normalize_partition, permute_patches, recover_system, roundtrip_check,
                                    segment_orbits)
from kleinfoam.group_presentations import TopType, presentation_of_type
from kleinfoam.subgroup_enum import low_index_subgroups

BASE = TopType.parse(corpus.DIHEDRAL)


def tables():
    """index 1, then the two index-2 subgroups keeping one reflection each"""
    return gluable_tables(BASE, 2)


def ids(orbits):
    return [o.id for o in orbits]


def singletons(tabs):
    return normalize_partition([[o] for o in segment_orbits(tabs)])


def test_gluable_tables_skip_the_translation_subgroup():
    ts = tables()
    assert [t.index for t in ts] == [1, 2, 2]
    trans = [t for t in low_index_subgroups(presentation_of_type(BASE), 2) if t.perms == ((0, 1), (1, 0), (1, 0))]
    with pytest.raises(FoamError) as exc:
        segment_orbits(trans)
    assert exc.value.code == "E_UNGLUABLE"


def test_segment_orbits():
    ts = tables()
    assert ids(segment_orbits(ts[:1])) == ["1:1:1:1", "1:1:2:1"]
    assert ids(segment_orbits([ts[1], ts[2]])) == ["1:1:1:1", "1:1:1:2", "2:1:2:1", "2:1:2:2"]
    assert SegmentOrbit.parse("2:1:2:1") == SegmentOrbit(2, 1, 2, 0)
    with pytest.raises(FoamError):
        SegmentOrbit.parse("2:1")


def test_ungluable_bases():
    for t in ("+,0,1,0,1,(1)", "+,1,0,0,0", "+,0,0,1,1,(0)"):
        with pytest.raises(FoamError) as exc:
            list(enumerate_foam_systems(t, 1))
        assert exc.value.code == "E_UNGLUABLE"


def test_partition_counts():
    o = [SegmentOrbit(p, 1, 1, c) for p, c in ((1, 0), (2, 0), (2, 1))]
    assert len(list(enumerate_edge_partitions(o))) == 3
    assert len(list(enumerate_edge_partitions(o[1:]))) == 1
    assert len(list(enumerate_edge_partitions(o[:2]))) == 2
    with pytest.raises(FoamError) as exc:
        list(enumerate_edge_partitions(o, limit=2))
    assert exc.value.code == "E_LIMIT"


def test_partitions_cover_every_orbit_once():
    ts = tables()
    orbits = segment_orbits([ts[0], ts[1], ts[1]])
    for H in enumerate_edge_partitions(orbits):
        flat = sorted(o for b in H for o in b)
        assert flat == sorted(orbits)
        assert all(len({o.patch for o in b}) == len(b) for b in H)


def test_build_single_disk():
    ts = tables()
    built = build_foam_from_system(FoamSystem(BASE, ts[:1], singletons(ts[:1])))
    assert len(built.foam.graph.edges) == 2 and len(built.foam.patches) == 1
    assert built.provenance_doc() == {"edges": {"E1": ["1:1:1:1"], "E2": ["1:1:2:1"]}, "patches": {"P1": 1}}


def test_build_two_disks():
    ts = tables()
    tabs = (ts[0], ts[0])
    assert len(build_foam_from_system(FoamSystem(BASE, tabs, singletons(tabs))).foam.graph.edges) == 4
    paired = normalize_partition([[SegmentOrbit(1, 1, j, 0), SegmentOrbit(2, 1, j, 0)] for j in (1, 2)])
    f = build_foam_from_system(FoamSystem(BASE, tabs, paired)).foam
    assert len(f.graph.edges) == 2
    assert validate_foam(f).ok and check_normality(f).normal


def test_edge_conflicts():
    ts = tables()
    tabs = (ts[0], ts[0])
    bad = [
        [[SegmentOrbit(1, 1, 1, 0), SegmentOrbit(2, 1, 2, 0)], [SegmentOrbit(1, 1, 2, 0)], [SegmentOrbit(2, 1, 1, 0)]],
        [[SegmentOrbit(1, 1, 1, 0)], [SegmentOrbit(1, 1, 1, 0), SegmentOrbit(2, 1, 1, 0)],
         [SegmentOrbit(1, 1, 2, 0)], [SegmentOrbit(2, 1, 2, 0)]],
        [[SegmentOrbit(1, 1, 1, 0)]],
    ]
    for H in bad:
        with pytest.raises(FoamError) as exc:
            build_foam_from_system(FoamSystem(BASE, tabs, normalize_partition(H)))
        assert exc.value.code == "E_EDGE_CONFLICT"
    one = (ts[1],)
    same_patch = normalize_partition([[SegmentOrbit(1, 1, 1, 0), SegmentOrbit(1, 1, 1, 1)]])
    with pytest.raises(FoamError) as exc:
        build_foam_from_system(FoamSystem(BASE, one, same_patch))
    assert exc.value.code == "E_EDGE_CONFLICT"


def test_roundtrip_and_recovery():
    systems = list(enumerate_foam_systems(BASE, 2, max_patches=2))
    assert systems
    for s in systems:
        rt = roundtrip_check(s)
        assert rt.ok, rt.to_doc()
        built = build_foam_from_system(s)
        assert recover_system(built, BASE, s.tables) == s


def test_patch_order_does_not_matter():
    ts = tables()
    tabs = (ts[0], ts[1])
    for H in enumerate_edge_partitions(segment_orbits(tabs)):
        s = FoamSystem(BASE, tabs, H)
        fp = fingerprint(build_foam_from_system(s).foam)
        swapped = permute_patches(s, (1, 0))
        assert swapped.tables == (ts[1], ts[0])
        assert fingerprint(build_foam_from_system(swapped).foam) == fp


def test_different_partitions_different_foams():
    ts = tables()
    tabs = (ts[0], ts[0])
    prints = {fingerprint(build_foam_from_system(FoamSystem(BASE, tabs, H)).foam)
              for H in enumerate_edge_partitions(segment_orbits(tabs))}
    # singletons, the two single pairings (isomorphic by swapping patches), both paired
    assert len(prints) == 3


def test_system_document_roundtrip():
    for s in itertools.islice(enumerate_foam_systems(BASE, 3, max_patches=2), 0, None, 5):
        assert FoamSystem.from_doc(json.loads(json.dumps(s.to_doc()))) == s
    doc = next(enumerate_foam_systems(BASE, 1)).to_doc()
    doc["base"] = "+,0,0,0,1,(3)"
    with pytest.raises(FoamError):
        FoamSystem.from_doc(doc)


def test_built_foam_can_fail_to_be_a_foam_off_the_dihedral_base():
    # a crosscap base: gluing the index-1 loop arc head-to-head with one arc of a
    # cyclic triple cover identifies two punctures of one cover circle
    t = "-,1,0,0,1,1"
    doc = {"base": t, "H": [["1:1:1:1", "2:1:1:1"], ["2:1:1:2"], ["2:1:1:3"]],
           "tables": [{"type": t, "generators": {"d1": [1], "e1": [1], "c1_1": [1]}},
                      {"type": t, "generators": {"d1": [2, 3, 1], "e1": [2, 3, 1], "c1_1": [1, 2, 3]}}]}
    s = FoamSystem.from_doc(doc)
    with pytest.raises(FoamError) as exc:
        build_foam_from_system(s)
    assert exc.value.code == "E_LEMMA31_VIOLATION"
    assert "(b)" in str(exc.value)
