import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elempoly.abelian import TRIVIAL, free
from elempoly.sgm import (
    ImageShapeError,
    SgmDescriptor,
    construct_from_handles,
    handles_of_image,
    r3_image_shape_check,
    source_from_image,
    verify_homology_relation,
)
from elempoly.terms import (
    BoundaryConnSum,
    ConnSum,
    Disc,
    PreconditionError,
    Product,
    Sphere,
    bcs,
    dimension,
    equal,
    reduced_homology,
)

S, D = Sphere, Disc


def test_construct_examples():
    d = construct_from_handles(5, 3, [2])
    assert equal(d.source, Product(S(2), S(3)))
    assert equal(d.image_manifold, Product(S(2), D(1)))
    d = construct_from_handles(5, 2, [])
    assert equal(d.source, S(5)) and equal(d.image_manifold, D(2))
    d = construct_from_handles(7, 4, [1, 2])
    assert equal(d.source, ConnSum((Product(S(1), S(6)), Product(S(2), S(5)))))
    assert equal(d.image_manifold, BoundaryConnSum((Product(S(1), D(3)), Product(S(2), D(2)))))
    assert d.barf_mode == "embedding"


def test_descriptor_fields_and_rendering():
    d = construct_from_handles(5, 3, [2])
    assert (d.fiber_dim, d.collar_fiber_dim) == (2, 3)
    assert str(d) == "SGM m=5 n=3 M=S2 x S3 W=S2 x D1 fiber=S^2 collar=D^3"
    assert d.to_dict()["fiber"] == "S^2"


@pytest.mark.parametrize(
    "m,n,handles",
    [(3, 4, [1]), (4, 4, []), (5, 1, []), (6, 3, [0]), (6, 3, [3]), (6, 3, [1, -1])],
)
def test_construct_rejects(m, n, handles):
    with pytest.raises(PreconditionError):
        construct_from_handles(m, n, handles)


def test_descriptor_validation():
    with pytest.raises(PreconditionError):
        SgmDescriptor(5, 3, S(5), S(3))  # image without boundary
    with pytest.raises(PreconditionError):
        SgmDescriptor(5, 3, S(4), D(3))
    with pytest.raises(ValueError):
        SgmDescriptor(5, 3, S(5), D(3), "fold")


def test_source_from_image_examples():
    assert equal(source_from_image(D(3), 6), S(6))
    w = BoundaryConnSum((Product(S(2), D(1)), Product(S(2), D(1))))
    assert equal(source_from_image(w, 5), ConnSum((Product(S(2), S(3)), Product(S(2), S(3)))))
    with pytest.raises(ImageShapeError):
        source_from_image(Product(S(2), S(2)), 6)


def test_unsupported_piece_is_named():
    w = bcs(Product(S(1), D(2)), Product(Product(S(1), S(1)), D(1)))
    with pytest.raises(ImageShapeError) as info:
        handles_of_image(w)
    assert info.value.offending is not None
    assert "unsupported image piece" in str(info.value)
    with pytest.raises(PreconditionError):
        source_from_image(D(3), 3)


def test_homology_relation_examples():
    assert verify_homology_relation(construct_from_handles(5, 3, [2]))
    assert verify_homology_relation(construct_from_handles(5, 2, []))
    # the relation is a real check: a mismatched descriptor fails it
    assert not verify_homology_relation(SgmDescriptor(5, 3, S(5), Product(S(2), D(1))))


def test_homology_relation_by_hand():
    d = construct_from_handles(5, 3, [2])
    hm, hw = reduced_homology(d.source), reduced_homology(d.image_manifold)
    assert hm[2] == free(1) == hw[2]
    assert hw.get(3, TRIVIAL) == TRIVIAL
    assert hm[3] == free(1)


def _all_handles(n, max_len=4):
    for size in range(max_len + 1):
        yield from itertools.combinations_with_replacement(range(1, n), size)


def test_inverse_pair_and_image_vanishing_exhaustive():
    count = 0
    for n in range(2, 6):
        for m in range(n + 1, 10):
            for hs in _all_handles(n):
                d = construct_from_handles(m, n, list(hs))
                assert equal(source_from_image(d.image_manifold, m), d.source)
                assert sorted(handles_of_image(d.image_manifold)) == list(hs)
                hw = reduced_homology(d.image_manifold)
                assert all(g == TRIVIAL for i, g in hw.items() if i >= n)
                count += 1
    assert count > 500


@settings(max_examples=100, deadline=None)
@given(
    st.integers(2, 5).flatmap(
        lambda n: st.tuples(
            st.just(n), st.integers(n + 1, 9), st.lists(st.integers(1, n - 1), max_size=4)
        )
    )
)
def test_homology_relation_random(args):
    n, m, hs = args
    d = construct_from_handles(m, n, hs)
    assert dimension(d.source) == m and dimension(d.image_manifold) == n
    assert verify_homology_relation(d)


def test_r3_shape():
    assert r3_image_shape_check(D(3))
    assert r3_image_shape_check(bcs(Product(S(2), D(1)), Product(S(2), D(1))))
    assert not r3_image_shape_check(Product(S(1), D(2)))
    with pytest.raises(PreconditionError):
        r3_image_shape_check(D(4))
