"""The discharging rule catalog: exact amounts and local structure classifiers.

Every charge amount used anywhere in the toolkit resolves through one keyed
table, so the abstract audits, the concrete graph application and the LP
schema all consume a single source of truth.  Amounts are exact rationals
(stdlib Fraction); the symbolic variant maps the same keys to LinExpr
variables for rule-weight synthesis.

Keys are tuples ``(family, *params)``.  ``key_name`` renders the flat string
used in LP files and reports, e.g. ``("C", 5, 0)`` -> ``"C_5_0"``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple, Union

from .linexpr import LinExpr

F = Fraction

RuleKey = Tuple
Amount = Union[Fraction, LinExpr]

# Structural amounts fixed by the discharging scheme itself (not tunable
# rule weights): the payments from (<=4)-faces to their 3-vertices and the
# quarter each (>=5)-vertex pays to an incident 4-face.
UNIT = F(1)
HALF = F(1, 2)
QUARTER = F(1, 4)

# Supported maximum face sizes.  Closed-form families extend past 17, which
# the CLI exposes only behind an explicit experimental flag.
SUPPORTED_DELTAS = (16, 17)

# 12- and 13-faces: weak / small_0 / small_1 / iso.
_LARGE_TABLE = {
    12: (F(4, 3), F(2, 3), F(1, 3), F(23827, 36960)),
    13: (F(14023, 10080), F(14023, 20160), F(6137, 20160), F(1097, 1680)),
}

# 6..11-faces: amounts to A-triangles, B-triangles and columns.
_ABG_TABLE = {
    6: (F(1), F(3, 4), F(3, 4)),
    7: (F(1), F(14, 15), F(9, 10)),
    8: (F(1), F(14, 15), F(82, 105)),
    9: (F(17383, 15120), F(17383, 15120), F(2743, 2520)),
    10: (F(8983, 7560), F(8983, 7560), F(16217, 15120)),
    11: (F(4, 3), F(4, 3), F(4, 3)),
}

# 5..11-faces: amounts to C-triangles, indexed by the combined t-value for
# sizes 5..7 and by the per-endpoint t-value for sizes 8..11.
_C_TABLE = {
    5: (F(-11507, 36960), F(-7, 40), F(349, 840), F(-1, 7), F(13, 30), F(53, 120)),
    6: (F(-10, 33), F(1, 336), F(1, 2), F(0), F(1, 2), F(97, 160)),
    7: (F(2, 55), F(1, 336), F(211, 336), F(0), F(1, 2), F(13, 15)),
    8: (F(583, 1680), F(193, 840), F(7, 15)),
    9: (F(7223, 30240), F(1517, 7560), F(17383, 30240)),
    10: (F(83, 378), F(47851, 166320), F(8983, 15120)),
    11: (F(17, 33), F(7, 22), F(3, 5)),
}

# 5..11-faces: amounts to non-column 4-faces, same indexing scheme as C.
_D_TABLE = {
    5: (F(1, 4), F(0), F(349, 840), F(1, 15), F(1, 8), F(4, 7)),
    6: (F(1, 4), F(0), F(3, 8), F(-13, 60), F(1, 8), F(67, 120)),
    7: (F(1, 4), F(0), F(3, 8), F(3, 7), F(3281, 20160), F(13, 15)),
    8: (F(41, 105), F(1, 4), F(1, 3)),
    9: (F(1009, 2160), F(5, 18), F(5017, 10080)),
    10: (F(20743, 40320), F(0), F(4615, 8064)),
    11: (F(13, 22), F(26, 165), F(13, 22)),
}

# 5..11-faces: isolated-vertex amounts (threshold r, E_0, E_1).
_E_TABLE = {
    5: (15, F(1, 7), F(-61, 240)),
    6: (14, F(49, 240), F(-1, 15)),
    7: (13, F(79, 240), F(-1, 15)),
    8: (13, F(41, 105), F(9, 28)),
    9: (12, F(7, 15), F(1, 3)),
    10: (12, F(7, 15), F(1, 3)),
    11: (11, F(7, 15), F(1, 3)),
}

# Vertex rules.
_FIVE_TO_TRI_1 = {0: F(767, 1680), 1: F(737, 1680), 2: F(37, 120)}

_SINGLE_CONSTANTS = {
    "5_to_tri_2_light": F(83, 140),
    "5_to_tri_2_heavy": F(57, 140),
    "6_to_tri_le2_adj": F(63, 80),
    "6_to_tri_2_opp": F(767, 1680),
    "6_to_tri_3_light": F(113, 120),
    "6_to_tri_3_all6": F(8, 15),
    "6_to_tri_3_heavy": F(881, 1680),
    "light_D_extra": F(1, 30),
    "light_C_extra": F(1, 30),
    "through_heavy": F(17, 80),
    "four_to_five": F(109, 840),
    "four1": F(1, 2),
    "four2": F(1, 2),
    "star_CC_to_5_extra": F(37, 240),
    "star_CC_to_11_extra": F(14, 165),
    "10_to_13_A_extra": F(89, 6048),
    "11_to_opp_66tri_extra": F(28, 165),
}

# Extra charge to A-triangles next to nearly maximal faces.  Neighbour sizes
# are keyed as offsets below the maximum face size: offset o means size
# delta - o, so the entries stay valid for any supported delta.
_SHORT_TO_LIGHT_A = {
    (7, 1, 1): F(1, 15),
    (7, 1, 0): F(1, 30),
    (8, 2, 2): F(1, 7),
    (8, 2, 1): F(1, 7),
    (8, 2, 0): F(3, 28),
    (8, 1, 1): F(1, 15),
    (8, 1, 0): F(1, 30),
}

_FACE_TO_LIGHT_A = {
    (9, 1): F(185, 6048),
    (9, 2): F(3257, 30240),
    (10, 1): F(583, 10080),
    (10, 2): F(583, 5040),
}

# Combined t-value for 5..7-faces, indexed by the two endpoint t-values.
_T_COMBINE = ((0, 1, 2), (1, 3, 4), (2, 4, 5))

# Keys whose table value is negative; frozen against the tables by tests.
NEGATIVE_AMOUNT_KEYS = frozenset(
    {
        ("C", 5, 0),
        ("C", 5, 1),
        ("C", 5, 3),
        ("C", 6, 0),
        ("D", 6, 3),
        ("E", 5, 1),
        ("E", 6, 1),
        ("E", 7, 1),
    }
)


class RuleKeyError(KeyError):
    """A rule key outside its declared parameter range."""


def _closed_weak(ell: int) -> Fraction:
    return 2 * (1 - F(4, ell))


def _closed_small(ell: int, a: int) -> Fraction:
    base = 1 - F(4, ell)
    return base if a == 0 else base / 2


def t_combine(t1: int, t2: int) -> int:
    """Combined t-value of a C-triangle or 4-face from its endpoint t-values."""
    return _T_COMBINE[t1][t2]


def t_value(deg: int, f_prime_size: int) -> int:
    """Endpoint t-value: 1 when the third face at the endpoint is small,
    2 when the endpoint is a 4-vertex next to a big third face, 0 otherwise."""
    if f_prime_size <= 4:
        return 1
    if deg == 4:
        return 2
    return 0


class TriangleClass(Enum):
    A = "A"
    B = "B"
    C = "C"


def classify_triangle(deg_v1: int, deg_v2: int, deg_v3: int,
                      apex_flanks_adjacent: bool) -> TriangleClass:
    """Classify the 3-face across edge v1v2 with opposite vertex v3.

    ``apex_flanks_adjacent`` states whether the two neighbours of v3 other
    than v1 and v2 are themselves adjacent (only consulted for the B case).
    """
    if deg_v1 == 3 and deg_v2 == 3 and deg_v3 == 3:
        return TriangleClass.A
    if deg_v1 == 3 and deg_v2 == 3 and deg_v3 == 4 and apex_flanks_adjacent:
        return TriangleClass.B
    return TriangleClass.C


def is_column(degrees: Tuple[int, int, int, int], opposite_on_4face: bool) -> bool:
    """Whether the 4-face v1v2v3v4 seen across edge v1v2 is a column."""
    return all(d == 3 for d in degrees) and opposite_on_4face


def rule_keys(delta: int) -> Iterator[RuleKey]:
    """Every valid key for the given maximum face size, charge and structural."""
    for ell in range(12, delta + 1):
        yield ("weak", ell)
        yield ("small", ell, 0)
        yield ("small", ell, 1)
        yield ("iso", ell)
    for ell in range(6, 12):
        yield ("A", ell)
        yield ("B", ell)
        yield ("G", ell)
    for ell in range(5, 12):
        ts = range(6) if ell <= 7 else range(3)
        for t in ts:
            yield ("C", ell, t)
        for t in ts:
            yield ("D", ell, t)
        yield ("r", ell)
        yield ("E", ell, 0)
        yield ("E", ell, 1)
    for m in range(3):
        yield ("5_to_tri_1", m)
    for name in _SINGLE_CONSTANTS:
        yield (name,)
    for k in sorted(_SHORT_TO_LIGHT_A):
        yield ("short_to_lightA",) + k
    for k in sorted(_FACE_TO_LIGHT_A):
        yield ("face_to_lightA",) + k


def is_charge_key(key: RuleKey) -> bool:
    """r thresholds are structural parameters, not transferable amounts."""
    return key[0] != "r"


def key_name(key: RuleKey) -> str:
    return "_".join(str(p) for p in key)


def _lookup(key: RuleKey, delta: int) -> Fraction:
    fam = key[0]
    try:
        if fam == "weak":
            (ell,) = key[1:]
            if not 12 <= ell <= delta:
                raise RuleKeyError(key)
            return _LARGE_TABLE[ell][0] if ell <= 13 else _closed_weak(ell)
        if fam == "small":
            ell, a = key[1:]
            if not (12 <= ell <= delta and a in (0, 1)):
                raise RuleKeyError(key)
            return _LARGE_TABLE[ell][1 + a] if ell <= 13 else _closed_small(ell, a)
        if fam == "iso":
            (ell,) = key[1:]
            if not 12 <= ell <= delta:
                raise RuleKeyError(key)
            return _LARGE_TABLE[ell][3] if ell <= 13 else _closed_small(ell, 0)
        if fam in ("A", "B", "G"):
            (ell,) = key[1:]
            return _ABG_TABLE[ell]["ABG".index(fam)]
        if fam in ("C", "D"):
            ell, t = key[1:]
            table = _C_TABLE if fam == "C" else _D_TABLE
            return table[ell][t]
        if fam == "r":
            (ell,) = key[1:]
            return F(_E_TABLE[ell][0])
        if fam == "E":
            ell, v = key[1:]
            return _E_TABLE[ell][1 + v]
        if fam == "5_to_tri_1":
            (m,) = key[1:]
            return _FIVE_TO_TRI_1[m]
        if fam == "short_to_lightA":
            return _SHORT_TO_LIGHT_A[key[1:]]
        if fam == "face_to_lightA":
            return _FACE_TO_LIGHT_A[key[1:]]
        if fam in _SINGLE_CONSTANTS and len(key) == 1:
            return _SINGLE_CONSTANTS[fam]
    except (KeyError, IndexError, ValueError) as exc:
        raise RuleKeyError(key) from exc
    raise RuleKeyError(key)


@dataclass(frozen=True)
class RuleTable:
    """Keyed amounts for one maximum face size.

    ``values`` maps every key in ``rule_keys(delta)`` to a Fraction (the
    published constants) or to a LinExpr variable (the synthesis schema).
    Structural ``r`` thresholds are numeric in both variants.
    """

    delta: int
    values: Dict[RuleKey, Amount]

    def __getitem__(self, key: RuleKey) -> Amount:
        try:
            return self.values[key]
        except KeyError:
            raise RuleKeyError(key) from None

    def amount(self, *key) -> Amount:
        return self[tuple(key)]

    def r_threshold(self, ell: int) -> int:
        return int(self.values[("r", ell)])

    def keys(self) -> List[RuleKey]:
        return list(self.values.keys())

    def charge_variable_names(self) -> List[str]:
        return [key_name(k) for k in self.values if is_charge_key(k)]

    def as_point(self) -> Dict[str, Fraction]:
        """Variable-name -> value map; only meaningful for concrete tables."""
        point = {}
        for k, v in self.values.items():
            if is_charge_key(k):
                if not isinstance(v, Fraction):
                    raise TypeError("as_point requires a concrete table")
                point[key_name(k)] = v
        return point

    def dump_lines(self) -> List[str]:
        lines = []
        for k in self.values:
            v = self.values[k]
            if isinstance(v, Fraction):
                lines.append(f"{key_name(k)} = {v} ({float(v):.6f})")
            else:
                lines.append(f"{key_name(k)} = <variable>")
        return lines

    def table_hash(self) -> str:
        text = "\n".join(
            f"{key_name(k)}={self.values[k]}" for k in sorted(self.values, key=key_name)
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def paper_table(delta: int) -> RuleTable:
    """The published constants, exactly."""
    return RuleTable(delta, {k: _lookup(k, delta) for k in rule_keys(delta)})


def symbolic_table(delta: int) -> RuleTable:
    """Same key space with each charge amount replaced by an LP variable."""
    values: Dict[RuleKey, Amount] = {}
    for k in rule_keys(delta):
        if is_charge_key(k):
            values[k] = LinExpr.var(key_name(k))
        else:
            values[k] = _lookup(k, delta)
    return RuleTable(delta, values)
