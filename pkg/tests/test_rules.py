from fractions import Fraction as F

import pytest

from cycolor import rules
from cycolor.rules import (
    NEGATIVE_AMOUNT_KEYS,
    RuleKeyError,
    TriangleClass,
    classify_triangle,
    is_column,
    key_name,
    paper_table,
    rule_keys,
    symbolic_table,
    t_combine,
    t_value,
)


@pytest.fixture(scope="module", params=[16, 17])
def table(request):
    return paper_table(request.param)


def test_published_spot_values():
    t = paper_table(16)
    assert t.amount("weak", 12) == F(4, 3)
    assert t.amount("C", 5, 0) == F(-11507, 36960)
    assert t.amount("weak", 16) == F(3, 2)
    assert t.amount("E", 7, 0) == F(79, 240)
    assert t.r_threshold(7) == 13
    assert t.amount("iso", 12) == F(23827, 36960)
    assert t.amount("through_heavy",) == F(17, 80)
    assert t.amount("A", 11) == F(4, 3)
    assert t.amount("G", 8) == F(82, 105)
    assert t.amount("D", 10, 1) == 0
    assert t.amount("5_to_tri_1", 2) == F(37, 120)
    assert t.amount("6_to_tri_2_opp") == F(767, 1680)
    assert t.amount("short_to_lightA", 8, 2, 0) == F(3, 28)
    assert t.amount("face_to_lightA", 9, 2) == F(3257, 30240)
    assert t.amount("star_CC_to_5_extra") == F(37, 240)
    assert t.amount("11_to_opp_66tri_extra") == F(28, 165)


def test_table_complete(table):
    for key in rule_keys(table.delta):
        value = table[key]
        assert isinstance(value, F), key


def test_closed_forms(table):
    for ell in range(14, table.delta + 1):
        base = 1 - F(4, ell)
        assert table.amount("weak", ell) == 2 * base
        assert table.amount("small", ell, 0) == base
        assert table.amount("small", ell, 1) == base / 2
        assert table.amount("iso", ell) == base
        assert table.amount("small", ell, 0) == 2 * table.amount("small", ell, 1)
        assert table.amount("weak", ell) == 2 * table.amount("iso", ell)


def test_negative_amounts_frozen(table):
    negatives = {
        k
        for k in rule_keys(table.delta)
        if rules.is_charge_key(k) and table[k] < 0
    }
    assert negatives == NEGATIVE_AMOUNT_KEYS


def test_out_of_range_keys_rejected(table):
    for bad in [("A", 5), ("weak", 11), ("C", 8, 3), ("small", 12, 2),
                ("weak", table.delta + 1), ("E", 12, 0), ("nonsense",)]:
        with pytest.raises(RuleKeyError):
            table.amount(*bad)


def test_t_value_cases():
    assert t_value(3, 4) == 1
    assert t_value(4, 7) == 2
    assert t_value(5, 9) == 0
    assert t_value(3, 9) == 0
    assert t_value(4, 4) == 1
    assert t_combine(1, 2) == 4
    assert t_combine(0, 0) == 0
    assert t_combine(2, 2) == 5
    for a in range(3):
        for b in range(3):
            assert t_combine(a, b) == t_combine(b, a)


def test_triangle_classification_partition():
    assert classify_triangle(3, 3, 3, False) is TriangleClass.A
    assert classify_triangle(3, 3, 4, True) is TriangleClass.B
    assert classify_triangle(3, 3, 4, False) is TriangleClass.C
    assert classify_triangle(3, 4, 4, False) is TriangleClass.C
    for d1 in (3, 4, 5):
        for d2 in (3, 4, 5):
            for d3 in (3, 4, 5):
                for adj in (False, True):
                    assert classify_triangle(d1, d2, d3, adj) in TriangleClass


def test_column_classification():
    assert is_column((3, 3, 3, 3), True)
    assert not is_column((3, 3, 3, 3), False)
    assert not is_column((3, 3, 4, 3), True)


def test_symbolic_table_matches_key_space(table):
    sym = symbolic_table(table.delta)
    assert sym.keys() == table.keys()
    point = table.as_point()
    for key in rule_keys(table.delta):
        if rules.is_charge_key(key):
            assert sym[key].evaluate(point) == table[key]
        else:
            assert sym[key] == table[key]


def test_key_names_unique(table):
    names = [key_name(k) for k in rule_keys(table.delta)]
    assert len(names) == len(set(names))
    assert "C_5_0" in names and "weak_12" in names and "through_heavy" in names


def test_table_hash_stable_and_delta_sensitive():
    assert paper_table(16).table_hash() == paper_table(16).table_hash()
    assert paper_table(16).table_hash() != paper_table(17).table_hash()


def test_dump_lines(table):
    lines = table.dump_lines()
    assert len(lines) == len(table.keys())
    assert any(line.startswith("weak_12 = 4/3") for line in lines)
