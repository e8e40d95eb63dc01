import pytest
from hypothesis import given
from hypothesis import strategies as st

from cycolor.configlang import (
    BOUNDED,
    UNBOUNDED_NEW,
    UNBOUNDED_ORIG,
    ConfigurationBlock,
    FaceSpec,
    ReductionPair,
    ReductionParseError,
    format_reduction,
    hidden_count_range,
    parse_reduction_file,
    unbounded_pairs,
    validate,
)
from cycolor.fixtures import eight0_pair, eight0_text


def test_fixture_structure():
    pair = eight0_pair()
    assert pair.reduced.m == 5 and pair.reduced.n == 9
    assert pair.original.m == 5 and pair.original.n == 10
    red5, orig5 = pair.reduced.faces[4], pair.original.faces[4]
    assert red5.kind == BOUNDED and orig5.kind == BOUNDED
    assert red5.letters == ("a", "b") and orig5.letters == ("a", "b")
    assert red5.internals == (1, 3, 4, 7, 8)
    assert orig5.internals == (1, 3, 4, 7, 8, 10)


def test_fixture_face2_original():
    pair = eight0_pair()
    f2 = pair.original.faces[1]
    assert f2.kind == UNBOUNDED_ORIG
    assert f2.ref_index == 2
    assert f2.letters == ()
    assert f2.internals == (5, 6, 7, 9, 10)


def test_minimal_file_parses():
    pair = parse_reduction_file("1 1\n0 a 1\n1 1\n0 a 1\n")
    assert pair.reduced.faces[0].size() == 2
    assert validate(pair, 16) == []


def test_roundtrip_bit_exact_on_fixture():
    text = eight0_text()
    pair = parse_reduction_file(text)
    assert format_reduction(pair) == text
    assert parse_reduction_file(format_reduction(pair)) == pair


def test_hidden_count_range_examples():
    f = FaceSpec(UNBOUNDED_NEW, (), (1,), a1=7, a2=9)
    assert hidden_count_range(f, 16) == (9, 11)
    g = FaceSpec(UNBOUNDED_NEW, (), (1,), a1=5, a2=7)
    assert hidden_count_range(g, 17) == (12, 14)
    h = FaceSpec(UNBOUNDED_NEW, (), (1,), a1=18, a2=18)
    assert hidden_count_range(h, 16) == (0, 0)
    with pytest.raises(ValueError, match="negative hidden count"):
        hidden_count_range(h, 15)
    with pytest.raises(ValueError, match="bounded"):
        hidden_count_range(FaceSpec(BOUNDED, (), (1,)), 16)


def test_hidden_count_range_through_reference():
    pair = eight0_pair()
    for idx, new, orig in unbounded_pairs(pair):
        assert hidden_count_range(orig, 16, pair.reduced) == hidden_count_range(new, 16)


@given(
    a1=st.integers(min_value=1, max_value=8),
    gap=st.integers(min_value=0, max_value=5),
    bump=st.integers(min_value=1, max_value=4),
)
def test_hidden_count_range_antitone(a1, gap, bump):
    delta = 16
    f = FaceSpec(UNBOUNDED_NEW, (), (), a1=a1, a2=a1 + gap)
    g = FaceSpec(UNBOUNDED_NEW, (), (), a1=a1 + bump, a2=a1 + gap + bump)
    fk = hidden_count_range(f, delta)
    gk = hidden_count_range(g, delta)
    assert gk[0] <= fk[0] and gk[1] <= fk[1]


def test_fixture_validates_at_16_and_17():
    pair = eight0_pair()
    assert validate(pair, 16) == []
    assert validate(pair, 17) == []


def test_dangling_reference_diagnostic():
    pair = eight0_pair()
    faces = list(pair.original.faces)
    bad = FaceSpec(UNBOUNDED_ORIG, (), faces[1].internals, ref_index=9)
    mutated = ReductionPair(
        pair.reduced,
        ConfigurationBlock(pair.original.m, pair.original.n, tuple([faces[0], bad] + faces[2:])),
    )
    diags = validate(mutated, 16)
    assert any("dangling face reference" in d for d in diags)


def test_unconstrained_internal_vertex_diagnostic():
    block = ConfigurationBlock(1, 3, (FaceSpec(BOUNDED, ("a",), (1, 2)),))
    pair = ReductionPair(block, block)
    diags = validate(pair, 16)
    assert any("unconstrained internal vertex 3" in d for d in diags)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ReductionParseError, match="line 2.*out of range"):
        parse_reduction_file("1 1\n0 a 5\n1 1\n0 a 1\n")
    with pytest.raises(ReductionParseError, match="line 4.*dangling"):
        parse_reduction_file("1 1\n5-7 a 1\n1 1\n3 a 1\n")
    with pytest.raises(ReductionParseError, match="header"):
        parse_reduction_file("x y\n")
    with pytest.raises(ReductionParseError, match="trailing"):
        parse_reduction_file("1 1\n0 a 1\n1 1\n0 a 1\nextra stuff here\n")
    with pytest.raises(ReductionParseError, match="reference the first block"):
        parse_reduction_file("1 1\n0 a 1\n1 1\n5-7 a 1\n")


def test_letter_and_internal_token_validation():
    with pytest.raises(ReductionParseError, match="letter"):
        parse_reduction_file("1 1\n0 AB 1\n1 1\n0 ab 1\n")
    with pytest.raises(ReductionParseError, match="duplicate"):
        parse_reduction_file("1 2\n0 a 1,1\n1 2\n0 a 1,2\n")


def test_lenient_whitespace():
    text = "1 1\n0   a    1\n\n1 1\n0 a 1\n"
    pair = parse_reduction_file(text)
    assert pair.reduced.faces[0].letters == ("a",)
