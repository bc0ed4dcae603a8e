import dataclasses
import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import annulus_fn, relabel
from kleinfoam import corpus
from kleinfoam import perm as P
from kleinfoam.branched_cover import (DiskCoverData, FunctionData, MarkedDisk, PatchData,
                                      construct_disk_morphism, function_data_from_doc,
                                      function_data_to_doc, rh_invariants, sphere_double,
                                      validate_function_data)
from kleinfoam.errors import FoamError
from kleinfoam.orientation import certify_klein
from kleinfoam.quotient_surface import enumerate_function_data


def cover(d, *cycles):
    return DiskCoverData.from_cycles(d, list(cycles))


def test_rh_examples():
    assert rh_invariants(DiskCoverData(1, ())) == (1, 1, 0)
    assert rh_invariants(cover(2, "(1 2)", "(1 2)")) == (0, 2, 0)
    assert rh_invariants(cover(2, "(1 2)", "(1 2)", "(1 2)", "(1 2)")) == (-2, 2, 1)


def test_rh_rejects_disconnected_cover():
    with pytest.raises(FoamError) as exc:
        rh_invariants(cover(2, "()", "()"))
    assert exc.value.code == "E_INCONSISTENT_MONODROMY"


def test_construct_examples():
    assert construct_disk_morphism(0, 1) == DiskCoverData(1, ())
    assert construct_disk_morphism(0, 2) == cover(2, "(1 2)", "(1 2)")
    with pytest.raises(FoamError) as exc:
        construct_disk_morphism(1, 1)
    assert exc.value.code == "E_UNREALIZABLE"


def test_construct_is_minimal_for_the_annulus():
    # brute force over S_2 tuples: fewer than two branch points cannot give 2 circles
    for n in range(2):
        for perms in itertools.product([(0, 1), (1, 0)], repeat=n):
            c = DiskCoverData(2, tuple(perms))
            assert not (c.transitive and P.num_cycles(c.boundary_perm) == 2)


def test_sphere_double_examples():
    assert sphere_double(DiskCoverData(1, ())).euler() == 2
    s = sphere_double(cover(2, "(1 2)", "(1 2)"), ["x", "y"])
    assert s.labels == ("x", "y", "y'", "x'") and s.euler() == 0
    c = construct_disk_morphism(1, 2)
    assert sphere_double(c).euler() == -4 == 2 * rh_invariants(c)[0]


@st.composite
def transitive_covers(draw):
    d = draw(st.integers(1, 5))
    k = draw(st.integers(0, 5))
    perms = tuple(tuple(draw(st.permutations(list(range(d))))) for _ in range(k))
    c = DiskCoverData(d, perms)
    if not c.transitive:
        c = DiskCoverData(d, perms + (tuple(list(range(1, d)) + [0]),))
    return c


@given(transitive_covers())
def test_sphere_double_doubles_euler(c):
    s = sphere_double(c)
    chi = rh_invariants(c)[0]
    assert s.euler() == 2 * chi
    assert P.product(s.perms, c.degree) == P.identity(c.degree)


@given(transitive_covers(), st.data())
def test_rh_invariant_under_relabeling(c, data):
    by = tuple(data.draw(st.permutations(list(range(c.degree)))))
    conj = DiskCoverData(c.degree, tuple(P.conjugate(p, by) for p in c.perms))
    assert rh_invariants(conj) == rh_invariants(c)
    assert conj.boundary_perm == P.conjugate(c.boundary_perm, by)


@given(transitive_covers())
def test_genus_is_nonnegative_integer(c):
    chi, k, g = rh_invariants(c)
    assert g >= 0 and 2 - 2 * g - k == chi


def test_validate_examples():
    fold = corpus.fold()
    fn = certify_klein(fold).function_data
    assert validate_function_data(fold, fn).ok
    p0 = fn.patch_data("p0")
    fake = PatchData("p0", DiskCoverData(2, ()), p0.circles)
    bad = dataclasses.replace(fn, patches=(fake,) + fn.patches[1:])
    rep = validate_function_data(fold, bad)
    assert [v.condition for v in rep.violations] == ["circles"]
    assert validate_function_data(corpus.annulus(), annulus_fn()).ok


def test_validate_reports_mismatched_seams():
    bigon = corpus.two_bigon()
    fn = certify_klein(bigon).function_data
    im = fn.edge_images["e0"]
    moved = dataclasses.replace(fn, edge_images={**fn.edge_images, "e0": dataclasses.replace(im, start=1)})
    assert not validate_function_data(bigon, moved).ok


def test_validate_rejects_wrong_winding():
    fn = annulus_fn()
    ims = {e: dataclasses.replace(im, winding=2) for e, im in fn.edge_images.items()}
    rep = validate_function_data(corpus.annulus(), dataclasses.replace(fn, edge_images=ims))
    assert {v.condition for v in rep.violations} == {"winding"}


def test_validate_rejects_nonorientable_patch():
    f = corpus.mobius_fold()
    fn = FunctionData(MarkedDisk(0, ()), {}, dict(annulus_fn().edge_images), ())
    assert not validate_function_data(f, fn).ok


def test_document_roundtrip():
    for fn in [certify_klein(corpus.two_bigon()).function_data, annulus_fn()]:
        doc = json.loads(json.dumps(function_data_to_doc(fn)))
        assert function_data_from_doc(doc) == fn
    with pytest.raises(FoamError) as exc:
        function_data_from_doc({"marked_disk": {}})
    assert exc.value.code == "E_PARSE"


def test_marked_disk_labels_unique():
    with pytest.raises(FoamError):
        MarkedDisk(1, ("a", "a"))


def test_validation_verdict_invariant_under_relabeling():
    rng = random.Random(12)
    bigon = corpus.two_bigon()
    fns = list(enumerate_function_data(bigon, max_degree=2, max_labels=2))
    assert fns
    for fn in rng.sample(fns, min(40, len(fns))):
        pd = fn.patches[0]
        cd = pd.circles[0]
        broken = dataclasses.replace(pd, circles=(dataclasses.replace(
            cd, arcs=(cd.arcs[0],) + tuple((s + 1) % pd.cover.degree for s in cd.arcs[1:])),) + pd.circles[1:])
        for cand in (fn, dataclasses.replace(fn, patches=(broken,) + fn.patches[1:])):
            f2, fn2 = relabel(bigon, cand, rng)
            assert validate_function_data(f2, fn2).ok == validate_function_data(bigon, cand).ok
