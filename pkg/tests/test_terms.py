import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elempoly.abelian import cyclic, free, parse_group
from elempoly.terms import (
    BoundaryConnSum,
    Capabilities,
    ConnSum,
    CustomAtom,
    Disc,
    ManifoldFlags,
    Mode,
    Point,
    PreconditionError,
    Product,
    Sphere,
    SphereBundle,
    TermValidationError,
    UnsupportedRuleError,
    Wedge,
    capabilities,
    connectivity,
    dimension,
    equal,
    euler_characteristic,
    flags,
    is_contractible,
    is_k_connected,
    is_simply_connected,
    normalize,
    reduced_homology,
    render,
    simple_connectivity,
)

S, D = Sphere, Disc
CLOSED_SC = ManifoldFlags(is_closed=True, is_orientable=True, is_simply_connected=True)


def H(t):
    return {d: str(g) for d, g in reduced_homology(t).items()}


def test_dimension_examples():
    assert dimension(S(2)) == 2
    assert dimension(Product(S(2), S(3))) == 5
    assert dimension(Wedge((S(2), S(3)))) == 3
    assert dimension(SphereBundle(True)) == 5
    assert dimension(Point()) == 0


def test_connsum_rejects_mixed_dimensions():
    with pytest.raises(TermValidationError, match="S2"):
        ConnSum((S(2), S(3)))
    with pytest.raises(TermValidationError):
        ConnSum((S(3),))
    with pytest.raises(TermValidationError):
        ConnSum((D(3), S(3)))
    with pytest.raises(TermValidationError):
        BoundaryConnSum((S(3), D(3)))
    with pytest.raises(TermValidationError):
        Wedge((S(0), S(2)))


def test_homology_examples():
    assert H(D(4)) == {}
    assert H(Product(S(2), S(3))) == {2: "Z", 3: "Z", 5: "Z"}
    sb = SphereBundle(False)
    assert H(ConnSum((sb, sb))) == {2: "Z^2", 3: "Z^2", 5: "Z"}
    assert H(SphereBundle(True)) == {2: "Z", 3: "Z", 5: "Z"}
    assert H(Wedge((S(2), S(2), S(4)))) == {2: "Z^2", 4: "Z"}
    assert H(BoundaryConnSum((Product(S(2), D(2)), Product(S(2), D(2))))) == {2: "Z^2"}
    torus = Product(S(1), S(1))
    assert H(ConnSum((torus, torus))) == {1: "Z^4", 2: "Z"}


def test_connsum_matches_wedge_plus_top_class():
    sb = SphereBundle(False)
    cs = reduced_homology(ConnSum((sb, sb)))
    w = reduced_homology(Wedge((S(2), S(2), S(3), S(3))))
    assert {d: g for d, g in cs.items() if d < 5} == w
    assert cs[5] == free(1)


def test_kunneth_with_torsion():
    moore = CustomAtom(
        "m2", 3, {0: free(1), 1: cyclic(2)},
        ManifoldFlags(is_manifold=False),
    )
    # H(M x M) for M = Moore space M(Z/2, 1): Z/2 + Z/2 in degree 1, Z/2 in 2 and 3
    assert H(Product(moore, moore)) == {1: "Z/2 + Z/2", 2: "Z/2", 3: "Z/2"}
    assert H(Product(moore, S(3))) == {1: "Z/2", 3: "Z", 4: "Z/2"}


def test_nonorientable_connsum_is_unsupported():
    rp2 = CustomAtom("rp2", 2, {0: free(1), 1: cyclic(2)}, ManifoldFlags(is_closed=True))
    with pytest.raises(UnsupportedRuleError):
        reduced_homology(ConnSum((rp2, rp2)))


def test_simple_connectivity_examples():
    assert not is_simply_connected(S(1))
    assert is_simply_connected(Wedge((S(2), S(3))))
    assert is_simply_connected(ConnSum((SphereBundle(False), SphereBundle(True))))
    ok, why = simple_connectivity(ConnSum((S(2), S(2))))
    assert not ok and why.startswith("unknown")


def test_connectivity_examples():
    assert connectivity(S(3)) == 2
    assert connectivity(Product(S(2), S(3))) == 1
    assert connectivity(Wedge((S(4), S(6)))) == 3
    assert connectivity(D(7)) == 7 and is_contractible(D(7))
    with pytest.raises(PreconditionError):
        connectivity(S(1))
    assert is_k_connected(D(2), 10)
    assert not is_k_connected(S(1), 1)
    assert is_k_connected(S(1), 0)


def test_capabilities_examples():
    assert capabilities(S(2)).embeds_codim(1, trivial=True)
    assert capabilities(S(2)).embeds_into(3)
    sb = SphereBundle(False)
    cs = ConnSum((sb, sb))
    assert capabilities(cs).embeds_codim(2, trivial=True)
    assert not capabilities(cs).embeds_codim(1)
    cp2 = CustomAtom("cp2", 4, {0: free(1), 2: free(1), 4: free(1)}, CLOSED_SC)
    assert capabilities(cp2).embeds_into(7)
    assert not capabilities(cp2).embeds_into(6)
    assert not capabilities(cp2).immerses_codim(5, trivial=True)


def test_capabilities_closure():
    caps = capabilities(Product(S(2), S(3)))
    assert caps.codim(2, trivial=True, mode=Mode.SEE)
    assert caps.codim(5, trivial=True)
    assert caps.into(7, Mode.SEE) and not caps.into(6)
    assert capabilities(SphereBundle(True)) == Capabilities()
    assert not capabilities(Wedge((S(2), S(3)))).into(100)


def test_capability_lower_bounds_are_upward_closed():
    c = Capabilities(immerse_codims={(3, False)})
    assert c.codim(4) and not c.codim(2) and not c.codim(4, trivial=True)
    e = Capabilities(embed_codims={(2, True)})
    assert (2, True) in e.immerse_codims


def test_normalize_examples():
    a, b, c = S(2), S(3), S(4)
    assert normalize(Wedge((Wedge((a, b)), c))) == Wedge((a, b, c))
    m = Product(S(2), S(3))
    assert normalize(ConnSum((m, S(5)))) == m
    assert normalize(BoundaryConnSum((Product(S(1), D(2)), D(3)))) == Product(S(1), D(2))
    assert equal(ConnSum((m, SphereBundle(True))), ConnSum((SphereBundle(True), m)))
    assert equal(Product(S(2), S(3)), Product(S(3), S(2)))
    assert not equal(SphereBundle(True), SphereBundle(False))
    assert normalize(Product(Product(S(2), D(1)), D(2))) == Product(S(2), D(3))
    assert normalize(Wedge((Point(), S(2)))) == S(2)


def test_render_examples():
    assert render(Product(Wedge((S(2), S(3))), S(2))) == "S2 v S3 x S2"
    assert render(Wedge((Product(S(2), S(3)), S(2)))) == "(S2 x S3) v S2"
    assert render(ConnSum((SphereBundle(False), SphereBundle(True)))) == "SB+ # SB-"
    assert render(Wedge((S(2), Wedge((S(3), S(4)))))) == "S2 v (S3 v S4)"


def test_custom_atom_validation():
    with pytest.raises(TermValidationError):
        CustomAtom("x", 2, {3: free(1)})
    with pytest.raises(TermValidationError):
        CustomAtom("x", 2, {0: free(2)})
    with pytest.raises(TermValidationError):
        ManifoldFlags(is_closed=True, has_boundary=True)
    with pytest.raises(TermValidationError):
        ManifoldFlags(is_connected=False, is_simply_connected=True)


def test_flags():
    f = flags(Product(S(2), D(3)))
    assert f.is_manifold and f.has_boundary and not f.is_closed
    assert flags(ConnSum((S(2), S(2)))).is_closed
    assert not flags(Wedge((S(2), S(2)))).is_manifold
    assert flags(Point()).is_closed


# --- randomized terms ---------------------------------------------------------

TORSION_ATOM = CustomAtom(
    "t", 4, {0: free(1), 2: cyclic(3)}, ManifoldFlags(is_manifold=False, is_simply_connected=True)
)

leaves = st.sampled_from(
    [Point(), S(1), S(2), S(3), S(4), D(1), D(3), SphereBundle(False), SphereBundle(True), TORSION_ATOM]
)


def _extend(children):
    connected = children.filter(lambda t: flags(t).is_connected)
    return st.one_of(
        st.builds(Product, children, children),
        st.lists(connected, min_size=2, max_size=3).map(lambda ops: Wedge(tuple(ops))),
    )


terms = st.recursive(leaves, _extend, max_leaves=4)


@settings(max_examples=200, deadline=None)
@given(terms, terms)
def test_euler_characteristic_laws(a, b):
    assert euler_characteristic(Product(a, b)) == euler_characteristic(a) * euler_characteristic(b)
    if flags(a).is_connected and flags(b).is_connected:
        ops = (a, b, a)
        assert euler_characteristic(Wedge(ops)) == sum(map(euler_characteristic, ops)) - 2


@settings(max_examples=200, deadline=None)
@given(terms)
def test_normalize_idempotent_and_invariants_preserved(t):
    n = normalize(t)
    assert normalize(n) == n
    assert equal(t, n)
    assert dimension(n) == dimension(t)
    assert reduced_homology(n) == reduced_homology(t)
    assert is_simply_connected(n) == is_simply_connected(t) or dimension(t) < 3


@settings(max_examples=200, deadline=None)
@given(terms)
def test_connectivity_at_least_one_when_simply_connected(t):
    if is_simply_connected(t):
        assert connectivity(t) >= 1
        assert 1 not in reduced_homology(t)


@settings(max_examples=100, deadline=None)
@given(terms, terms, terms)
def test_equal_is_an_equivalence(a, b, c):
    assert equal(a, a)
    assert equal(a, b) == equal(b, a)
    if equal(a, b) and equal(b, c):
        assert equal(a, c)
    assert equal(Product(a, b), Product(b, a))


codims = st.frozensets(st.tuples(st.integers(0, 4), st.booleans()), max_size=3)


@settings(max_examples=100, deadline=None)
@given(codims, codims, st.integers(1, 4))
def test_capabilities_monotone_under_declarations(base, extra, a):
    flags_ = CLOSED_SC
    small = CustomAtom("m", 3, {0: free(1), 3: free(1)}, flags_, Capabilities(embed_codims=base))
    big = CustomAtom("m", 3, {0: free(1), 3: free(1)}, flags_, Capabilities(embed_codims=base | extra))
    for host in (lambda x: x, lambda x: Product(x, S(2)), lambda x: ConnSum((x, S(3)))):
        cs, cb = capabilities(host(small)), capabilities(host(big))
        for mode in Mode:
            for trivial in (False, True):
                assert not cs.codim(a, trivial, mode) or cb.codim(a, trivial, mode)
            assert not cs.into(a + 5, mode) or cb.into(a + 5, mode)


def test_group_parse_helper():
    assert parse_group("Z^2") == free(2)
