import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elempoly.abelian import cyclic, free
from elempoly.elementary import MergeKind, MergeStep, TypeTag
from elempoly.parser import (
    ParseError,
    ScriptError,
    TermConstructionError,
    UnknownAtomError,
    parse_declarations,
    parse_root_script,
    parse_term,
    render_document,
    render_script,
)
from elempoly.terms import (
    BoundaryConnSum,
    ConnSum,
    CustomAtom,
    Disc,
    Mode,
    Point,
    Product,
    Sphere,
    SphereBundle,
    Wedge,
    capabilities,
    flags,
    render,
)

S, D = Sphere, Disc


def test_term_examples():
    assert parse_term("S2 x S3") == Product(S(2), S(3))
    assert parse_term("(S2 v S3) x S2") == Product(Wedge((S(2), S(3))), S(2))
    assert parse_term("PT") == Point()
    assert parse_term("SB+ # SB-") == ConnSum((SphereBundle(False), SphereBundle(True)))
    assert parse_term("  D3&D3 ") == BoundaryConnSum((D(3), D(3)))


def test_precedence_and_associativity():
    # '#' binds tightest, then '&', then 'v', and 'x' loosest
    assert parse_term("S2 # S2 x S3") == Product(ConnSum((S(2), S(2))), S(3))
    assert parse_term("S2 v S3 x S4") == Product(Wedge((S(2), S(3))), S(4))
    assert parse_term("S1 x S2 x S3") == Product(Product(S(1), S(2)), S(3))
    assert parse_term("S2 v S3 v S4") == Wedge((S(2), S(3), S(4)))
    assert parse_term("S2 v (S3 v S4)") == Wedge((S(2), Wedge((S(3), S(4)))))
    with pytest.raises(TermConstructionError):
        # reads S2 x (D1 & S2) x D1, and S2 has no boundary
        parse_term("S2 x D1 & S2 x D1")


def test_syntax_errors_have_spans():
    with pytest.raises(ParseError) as e:
        parse_term("S2 x")
    assert (e.value.span.line, e.value.span.column) == (1, 5)
    assert "end of input" in e.value.message
    for bad in ("", "x S2", "S2 S3", "(S2", "S2)", "Q7", "S", "SB", "S2 ^ S3"):
        with pytest.raises(ParseError) as e:
            parse_term(bad)
        assert 0 <= e.value.span.begin <= e.value.span.end <= len(bad)


def test_construction_and_reference_errors():
    with pytest.raises(TermConstructionError):
        parse_term("S2 # S3")
    with pytest.raises(TermConstructionError):
        parse_term("S0 v S2")
    with pytest.raises(UnknownAtomError) as e:
        parse_term("S2 x @foo")
    assert e.value.span.column == 6


def test_declarations():
    text = """
    # a fake projective plane with a capability
    atom @cp dim=4 closed orientable simply_connected H2=Z H4=Z
    atom @m dim=3 nonmanifold simply_connected H2=Z/2
    atom @k dim=3 closed orientable simply_connected homotopy_sphere H3=Z embed=1t immerses_into=5
    @cp x @m v @k
    """
    t = parse_term(text)
    atoms = parse_declarations(text)
    assert set(atoms) == {"cp", "m", "k"}
    assert dict(atoms["m"].homology)[2] == cyclic(2)
    assert atoms["k"].flags.is_homotopy_sphere
    assert capabilities(atoms["k"]).codim(1, True, Mode.SEE)
    assert capabilities(atoms["cp"]).embeds_into(7)
    assert isinstance(t, Product)
    with pytest.raises(ParseError):
        parse_term("atom @a dim=2 closed boundary\n@a")
    with pytest.raises(ParseError):
        parse_term("atom @a dim=2 sparkly\n@a")
    with pytest.raises(ParseError):
        parse_term("atom @a dim=2\natom @a dim=3\n@a")


SCRIPT = """\
# two spheres and a bouquet
root:
0: S2 smooth=1 p=1
1: S3 smooth=1 p=1
steps:
bouquet 0 1
"""


def test_script_example():
    root, steps = parse_root_script(SCRIPT)
    assert len(root) == 2 and root[0].type_tag is TypeTag.DIFF
    assert steps == [MergeStep(MergeKind.BOUQUET, 0, 1)]


def test_script_errors():
    bad_order = SCRIPT.replace("bouquet 0 1", "connsum 1 0")
    with pytest.raises(ScriptError, match="k1 < k2"):
        parse_root_script(bad_order)
    three = "root:\n0: S2 smooth=1 p=1\n1: S2 smooth=1 p=1\n2: S2 smooth=1 p=1\nsteps:\nbouquet 0 1\n"
    with pytest.raises(ScriptError, match="2 steps"):
        parse_root_script(three)
    with pytest.raises(ScriptError, match="out of range"):
        parse_root_script(three + "bouquet 0 2\n")
    with pytest.raises(ScriptError, match="smooth=left"):
        parse_root_script(SCRIPT.replace("bouquet 0 1", "product 0 1"))
    with pytest.raises(ScriptError, match="numbered"):
        parse_root_script("root:\n1: S2 smooth=1 p=1\n")
    with pytest.raises(ScriptError):
        parse_root_script("0: S2 smooth=1 p=1\n")
    with pytest.raises(ScriptError):
        parse_root_script("root:\n0: S2 v S3 smooth=1 p=1\n")
    with pytest.raises(ScriptError):
        parse_root_script("root:\n0: S2 smooth=2 p=1\n")


def test_script_pl_entries_and_single_root():
    root, steps = parse_root_script("root:\n0: S2 v S3 smooth=0 p=0\n")
    assert root[0].type_tag is TypeTag.PL and steps == []


def test_script_round_trip():
    text = SCRIPT.replace("bouquet 0 1", "product 0 1 smooth=right")
    root, steps = parse_root_script(text)
    assert parse_root_script(render_script(root, steps)) == (root, steps)


# --- round trip over random terms ----------------------------------------------

ATOM = CustomAtom(
    "q", 4,
    {0: free(1), 2: free(2), 4: free(1)},
    flags(Product(S(2), S(2))),
)

closed_by_dim = {
    2: [S(2), Product(S(1), S(1))],
    4: [S(4), Product(S(2), S(2)), ATOM],
    5: [S(5), SphereBundle(False), SphereBundle(True), Product(S(2), S(3))],
}
bounded_by_dim = {
    3: [D(3), Product(S(2), D(1)), Product(S(1), D(2))],
    4: [D(4), Product(S(2), D(2)), Product(S(3), D(1))],
}


@st.composite
def terms(draw, depth=3):
    kind = draw(st.sampled_from(["leaf", "x", "v", "#", "&"] if depth else ["leaf"]))
    if kind == "leaf":
        return draw(st.sampled_from([Point(), S(1), S(3), D(2), SphereBundle(True), ATOM]))
    if kind == "x":
        return Product(draw(terms(depth - 1)), draw(terms(depth - 1)))
    if kind == "v":
        ops = draw(st.lists(terms(depth - 1), min_size=2, max_size=3))
        return Wedge(tuple(o if flags(o).is_connected else S(2) for o in ops))
    if kind == "#":
        d = draw(st.sampled_from(sorted(closed_by_dim)))
        ops = draw(st.lists(st.sampled_from(closed_by_dim[d]), min_size=2, max_size=3))
        return ConnSum(tuple(ops))
    d = draw(st.sampled_from(sorted(bounded_by_dim)))
    ops = draw(st.lists(st.sampled_from(bounded_by_dim[d]), min_size=2, max_size=3))
    return BoundaryConnSum(tuple(ops))


@settings(max_examples=300, deadline=None)
@given(terms())
def test_render_parse_round_trip(t):
    assert parse_term(render_document(t)) == t
    assert render(parse_term(render_document(t))) == render(t)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="SDPTB+-x v#&()0123@ab\n", max_size=20))
def test_errors_carry_spans_inside_input(text):
    try:
        parse_term(text)
    except ParseError as e:
        assert 0 <= e.span.begin <= e.span.end <= len(text)
        assert e.span.line >= 1 and e.span.column >= 1
