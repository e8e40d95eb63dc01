"""Final-charge audits for vertices.

Degrees 3..7 are checked by exhaustive enumeration of the cyclic sequence
of incident face sizes.  For degree >= 8 the per-slot charges c_i depend on
a five-face window and the audit checks the windowed bound
q_i = c_{i-1}/2 + c_i + c_{i+1}/2 <= 1 over all seven-face windows, which
caps the total sent at d/2 <= d-4.

Where a rule's firing depends on structure outside the enumerated window
(the forwarding side of the two-phase rules), the audit charges the vertex
pessimistically, as if the transfer always fires.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .audit import AuditReport, Violation
from .catalog import ForbiddenPatternCatalog, SizeClass, VertexFan, VertexWindow
from .rules import HALF, QUARTER, UNIT, RuleTable

# The mid-size edge condition of the vertex-to-edge-to-triangle rule reads
# on the edge: some face at the edge has size 5..10.
MID_LO, MID_HI = 5, 10


def _is_mid(s: int) -> bool:
    return MID_LO <= s <= MID_HI


def fan_charge(d: int, sizes: Tuple[int, ...], table: RuleTable):
    """Final charge of a d-vertex (3 <= d <= 7) with the given fan.

    Forwarding conditions beyond the fan are assumed to hold (worst case),
    so the result is a lower bound on the true final charge.
    """
    delta = table.delta
    charge = table_zero(table) + (d - 4)
    smalls = [i for i in range(d) if sizes[i] <= 4]
    tri_pos = [i for i in range(d) if sizes[i] == 3]

    if d == 3:
        if len(smalls) == 1:
            charge = charge + UNIT
        elif len(smalls) == 2 and all(sizes[i] == 4 for i in smalls):
            charge = charge + UNIT
    if d >= 5:
        charge = charge - QUARTER * sum(1 for s in sizes if s == 4)

    # vertex-to-triangle payments
    if d == 5:
        if len(tri_pos) == 1:
            m = sum(1 for s in sizes if s == 4)
            if m <= 2:
                charge = charge - table[("5_to_tri_1", m)]
        elif len(tri_pos) == 2 and (tri_pos[1] - tri_pos[0]) not in (1, d - 1):
            for i in tri_pos:
                l1, l2 = sizes[(i - 1) % d], sizes[(i + 1) % d]
                key = ("5_to_tri_2_light",) if l1 <= 7 and l2 <= 7 else ("5_to_tri_2_heavy",)
                charge = charge - table[key]
    elif d == 6:
        adjacent_pair = len(tri_pos) == 2 and (tri_pos[1] - tri_pos[0]) in (1, d - 1)
        if len(tri_pos) == 1 or adjacent_pair:
            charge = charge - table[("6_to_tri_le2_adj",)] * len(tri_pos)
        elif len(tri_pos) == 2:
            charge = charge - table[("6_to_tri_2_opp",)] * 2
        elif len(tri_pos) == 3 and tri_pos in ([0, 2, 4], [1, 3, 5]):
            for i in tri_pos:
                l1, l2 = sizes[(i - 1) % d], sizes[(i + 1) % d]
                if min(l1, l2) == 5 and max(l1, l2) <= 7:
                    key = ("6_to_tri_3_light",)
                elif l1 == 6 and l2 == 6:
                    key = ("6_to_tri_3_all6",)
                else:
                    key = ("6_to_tri_3_heavy",)
                charge = charge - table[key]
    elif d == 7:
        for i in tri_pos:
            l1, l5 = sizes[(i - 2) % d], sizes[(i + 2) % d]
            if l1 == 3 and l5 == 3:
                key = ("6_to_tri_3_light",)
            elif min(l1, l5) <= 4 and max(l1, l5) != 3:
                key = ("6_to_tri_le2_adj",)
            else:
                key = ("6_to_tri_2_opp",)
            charge = charge - table[key]

    # iso / E receipts (diverted to the opposite small face for 4-vertices)
    for i in range(d):
        ell = sizes[i]
        if ell < 5:
            continue
        left, right = sizes[(i - 1) % d], sizes[(i + 1) % d]
        if left <= 4 or right <= 4:
            continue
        if d == 4 and sizes[(i + 2) % d] <= 4:
            continue  # sink is the opposite small face, not the vertex
        if ell >= 12:
            charge = charge + table[("iso", ell)]
        else:
            r = table.r_threshold(ell)
            variant = 1 if (left >= r and right >= r) else 0
            charge = charge + table[("E", ell, variant)]

    th = table[("through_heavy",)]
    in_triangle = bool(tri_pos)

    # vertex pays along edges between two big faces
    if not (d == 3 and in_triangle):
        pays_self = False
        if d == 3:
            pays_self = len(smalls) == 0
        elif d == 4:
            pays_self = len(smalls) == 0
        elif d == 5:
            pays_self = not (len(tri_pos) == 2)
        else:
            pays_self = True
        if pays_self:
            for i in range(d):
                if sizes[(i - 1) % d] >= 12 and sizes[i] >= 12:
                    charge = charge - th

    # vertex feeds triangles two steps away across a mid-size edge
    if d >= 6 or (d == 5 and len(tri_pos) == 1):
        for j in range(d):
            a, b = sizes[(j - 1) % d], sizes[j]  # faces at edge j
            if not (_is_mid(a) or _is_mid(b)):
                continue
            if sizes[(j + 1) % d] == 3:  # instance through face j
                charge = charge - th
            if sizes[(j - 2) % d] == 3:  # instance through face j-1
                charge = charge - th
    return charge


def table_zero(table: RuleTable):
    """Additive zero compatible with the table's value type."""
    sample = table[("through_heavy",)]
    return sample - sample


def iterate_small_vertex_fans(
    delta: int, d: int, catalog: ForbiddenPatternCatalog
) -> Iterator[Tuple[Tuple[int, ...], Optional[str], int]]:
    """(fan, discarded_by, weight) for all cyclic size sequences; pruned
    subtrees are reported once with their completion count as weight."""
    sizes = [0] * d
    span = delta - 2  # sizes 3..delta

    def rec(i: int) -> Iterator[Tuple[Tuple[int, ...], Optional[str], int]]:
        if i == d:
            fan = tuple(sizes)
            # wrap-around adjacency
            lo, hi = min(sizes[-1], sizes[0]), max(sizes[-1], sizes[0])
            if lo == 3 and hi <= 4:
                yield fan, "TFEDGE", 1
                return
            yield fan, None, 1  # caller applies the catalog
            return
        for s in range(3, delta + 1):
            sizes[i] = s
            if i > 0:
                lo, hi = min(sizes[i - 1], s), max(sizes[i - 1], s)
                if lo == 3 and hi <= 4:
                    yield tuple(sizes[: i + 1]), "TFEDGE", span ** (d - 1 - i)
                    continue
            # subtree-wide cyclic-degree bound
            partial = sum(x - 2 for x in sizes[: i + 1])
            if partial + (d - 1 - i) * (delta - 2) <= delta + 1:
                yield tuple(sizes[: i + 1]), "DEG", span ** (d - 1 - i)
                continue
            yield from rec(i + 1)

    yield from rec(0)


def audit_small_vertices_python(
    delta: int,
    table: RuleTable,
    catalog: ForbiddenPatternCatalog,
    degrees: Tuple[int, ...] = (3, 4, 5, 6, 7),
) -> AuditReport:
    """Reference implementation; the kernel below mirrors it and is tested
    against it on the smaller degrees."""
    report = AuditReport("vertices-small", delta)
    for d in degrees:
        for fan, pruned_by, weight in iterate_small_vertex_fans(delta, d, catalog):
            if pruned_by is not None:
                report.record_discard(pruned_by, weight)
                continue
            context = VertexFan(d, tuple(SizeClass.exact(s) for s in fan))
            name = catalog.match(context, delta)
            if name is not None:
                report.record_discard(name)
                continue
            charge = fan_charge(d, fan, table)
            report.record_case((d,) + fan, charge, charge >= 0)
    return report


def audit_small_vertices(
    delta: int,
    table: RuleTable,
    catalog: ForbiddenPatternCatalog,
    degrees: Tuple[int, ...] = (3, 4, 5, 6, 7),
    collect_forms: bool = False,
):
    """Kernel-backed exhaustive audit of degrees 3..7.

    With ``collect_forms`` the distinct charge forms (coefficient patterns
    over the rule amounts) are returned alongside the report for constraint
    generation.  Falls back to the pure-Python path without numba.
    """
    from . import _vkernel

    if not _vkernel.HAVE_NUMBA:
        report = audit_small_vertices_python(delta, table, catalog, degrees)
        return (report, {}) if collect_forms else report

    import numpy as np
    from numba.typed import Dict as NumbaDict
    from numba import types as nbtypes

    report = AuditReport("vertices-small", delta)
    tabs = _vkernel.scaled_tables(table)
    names, mindeg, exactdeg, plen, plo, phi = _vkernel.compile_patterns(
        catalog.patterns, delta
    )
    all_forms: Dict[Tuple[int, int], int] = {}
    key_type = nbtypes.UniTuple(nbtypes.int64, 2)
    for d in degrees:
        viol_buf = np.zeros((2000, 8), dtype=np.int64)
        pattern_hits = np.zeros(max(len(names), 1), dtype=np.int64)
        counters = np.zeros(5, dtype=np.int64)
        forms = NumbaDict.empty(key_type, nbtypes.int64)
        n_viol = _vkernel.small_vertex_kernel(
            d,
            delta,
            tabs["E0"],
            tabs["E1"],
            tabs["R"],
            tabs["ISO"],
            tabs["consts"],
            mindeg,
            exactdeg,
            plen,
            plo,
            phi,
            viol_buf,
            pattern_hits,
            forms,
            collect_forms,
            counters,
        )
        report.enumerated += int(counters[0])
        report.discarded += int(counters[1] + counters[2] + counters[3])
        for label, idx in (("TFEDGE", 1), ("DEG", 2)):
            if counters[idx]:
                report.discards_by_pattern[label] = (
                    report.discards_by_pattern.get(label, 0) + int(counters[idx])
                )
        for pi, name in enumerate(names):
            if pattern_hits[pi]:
                report.discards_by_pattern[name] = (
                    report.discards_by_pattern.get(name, 0) + int(pattern_hits[pi])
                )
        report.violation_count += int(counters[4])
        for i in range(min(n_viol, viol_buf.shape[0])):
            fan = tuple(int(x) for x in viol_buf[i, :d])
            charge = Fraction(int(viol_buf[i, 7]), _vkernel.SCALE)
            if len(report.violations) < 200:
                from .audit import Violation

                report.violations.append(Violation("vertices-small", (d,) + fan, charge))
        if collect_forms:
            for key, count in forms.items():
                k = (int(key[0]), int(key[1]))
                all_forms[k] = all_forms.get(k, 0) + int(count)
    if collect_forms:
        return report, all_forms
    return report


def decode_form(key: Tuple[int, int], table: RuleTable):
    """Rebuild the symbolic charge expression from a packed feature key."""
    k1, k2 = key
    d = k1 & 0xF
    quarters = (k1 >> 4) & 0xF
    unit_kind = (k1 >> 8) & 0x3
    m5 = ((k1 >> 10) & 0x7) - 1
    light = (k1 >> 13) & 0x7
    heavy = (k1 >> 16) & 0x7
    le2 = (k1 >> 19) & 0x7
    opp = (k1 >> 22) & 0x7
    l3 = (k1 >> 25) & 0x7
    a6 = (k1 >> 28) & 0x7
    h3 = (k1 >> 31) & 0x7
    through = (k1 >> 34) & 0xF
    expr = table_zero(table) + (d - 4)
    if unit_kind:
        expr = expr + UNIT
    expr = expr - QUARTER * quarters
    if m5 >= 0:
        expr = expr - table[("5_to_tri_1", m5)]
    for count, key_ in (
        (light, ("5_to_tri_2_light",)),
        (heavy, ("5_to_tri_2_heavy",)),
        (le2, ("6_to_tri_le2_adj",)),
        (opp, ("6_to_tri_2_opp",)),
        (l3, ("6_to_tri_3_light",)),
        (a6, ("6_to_tri_3_all6",)),
        (h3, ("6_to_tri_3_heavy",)),
    ):
        if count:
            expr = expr - table[key_] * count
    shift = 0
    for i in range(14):
        count = (k2 >> shift) & 0x7
        shift += 3
        if count:
            ell, variant = 5 + i // 2, i % 2
            expr = expr + table[("E", ell, variant)] * count
    for i in range(6):
        count = (k2 >> shift) & 0x7
        shift += 3
        if count:
            expr = expr + table[("iso", 12 + i)] * count
    if through:
        expr = expr - table[("through_heavy",)] * through
    return expr


# ---------------------------------------------------------------------------
# Degree >= 8: windowed audit


def window_c(window5: Tuple, table: RuleTable):
    """Per-slot charge c_i of a (>=8)-vertex from the five-face window
    (f_{i-2}, f_{i-1}, f_i, f_{i+1}, f_{i+2}); outer slots may be SizeClass
    ranges as long as every rule predicate is constant on them."""
    a, b, m, dd, e = window5
    a = a if isinstance(a, SizeClass) else SizeClass.exact(a)
    e = e if isinstance(e, SizeClass) else SizeClass.exact(e)
    th = table[("through_heavy",)]
    zero = table_zero(table)
    if m == 3:
        if a.hi == 3 and e.hi == 3:
            amt = table[("6_to_tri_3_light",)]
        elif (a.hi <= 4 or e.hi <= 4) and not (a.hi == 3 and e.hi == 3):
            # min <= 4 and max != 3 must be certain on the classes
            amt = (
                table[("6_to_tri_le2_adj",)]
                if (a.hi <= 4 and e.lo >= 4) or (e.hi <= 4 and a.lo >= 4)
                else None
            )
            if amt is None:
                raise ValueError(f"ambiguous window classes {window5}")
        else:
            amt = table[("6_to_tri_2_opp",)]
        c = zero + amt
        # edge (f_{i-1}, f_i) feeding this triangle through face f_{i-1}
        if _class_is_mid(b) or _class_is_mid_certain(a):
            c = c + th
        if _class_is_mid(dd) or _class_is_mid_certain(e):
            c = c + th
        return c
    if m == 4:
        return zero + QUARTER
    c = zero
    if b >= 12 and m >= 12:
        c = c + th * HALF
    if m >= 12 and dd >= 12:
        c = c + th * HALF
    if b >= 5 and dd >= 5:
        if m >= 12:
            c = c - table[("iso", m)]
        else:
            r = table.r_threshold(m)
            variant = 1 if (b >= r and dd >= r) else 0
            c = c - table[("E", m, variant)]
    return c


def _class_is_mid(s: int) -> bool:
    return MID_LO <= s <= MID_HI


def _class_is_mid_certain(c: SizeClass) -> bool:
    return MID_LO <= c.lo and c.hi <= MID_HI


# Outer window slots are collapsed to classes on which every predicate the
# rules consult (=3, <=4, 5..10, >=11) is constant.
def outer_classes(delta: int) -> List[SizeClass]:
    return [
        SizeClass.exact(3),
        SizeClass.exact(4),
        SizeClass(5, 10),
        SizeClass(11, delta),
    ]


def outer_class_weight(c: SizeClass) -> int:
    return c.hi - c.lo + 1


def audit_big_vertices(
    delta: int,
    table: RuleTable,
    catalog: ForbiddenPatternCatalog,
    collect=None,
) -> AuditReport:
    """Enumerate seven-face windows around a (>=8)-vertex and check
    q_i = c_{i-1}/2 + c_i + c_{i+1}/2 <= 1 on every window that survives the
    catalog; reported counts weigh collapsed outer slots by their size."""
    report = AuditReport("vertices-big", delta)
    outers = outer_classes(delta)
    inner = range(3, delta + 1)
    c_memo: Dict[Tuple, object] = {}

    def c_of(window5) -> object:
        key = tuple(
            (s.lo, s.hi) if isinstance(s, SizeClass) else s for s in window5
        )
        if key not in c_memo:
            c_memo[key] = window_c(window5, table)
        return c_memo[key]

    def tf(x: int, y: int) -> bool:
        return min(x, y) == 3 and max(x, y) <= 4

    one = table_zero(table) + 1
    for s1 in outers:
        for s2 in inner:
            if s1.hi <= 4 and tf(s1.lo, s2):
                report.record_discard("TFEDGE", outer_class_weight(s1) * (delta - 2) ** 5)
                continue
            for s3 in inner:
                if tf(s2, s3):
                    report.record_discard(
                        "TFEDGE", outer_class_weight(s1) * (delta - 2) ** 4
                    )
                    continue
                for s4 in inner:
                    if tf(s3, s4):
                        report.record_discard(
                            "TFEDGE", outer_class_weight(s1) * (delta - 2) ** 3
                        )
                        continue
                    for s5 in inner:
                        if tf(s4, s5):
                            report.record_discard(
                                "TFEDGE", outer_class_weight(s1) * (delta - 2) ** 2
                            )
                            continue
                        for s6 in inner:
                            if tf(s5, s6):
                                report.record_discard(
                                    "TFEDGE", outer_class_weight(s1) * (delta - 2)
                                )
                                continue
                            for s7 in outers:
                                weight = outer_class_weight(s1) * outer_class_weight(s7)
                                if s7.hi <= 4 and tf(s6, s7.lo):
                                    report.record_discard("TFEDGE", weight)
                                    continue
                                window = (s1, s2, s3, s4, s5, s6, s7)
                                ctx = VertexWindow(
                                    8,
                                    tuple(
                                        s if isinstance(s, SizeClass) else SizeClass.exact(s)
                                        for s in window
                                    ),
                                )
                                name = catalog.match(ctx, delta)
                                if name is not None:
                                    report.record_discard(name, weight)
                                    continue
                                q = (
                                    c_of((s1, s2, s3, s4, s5)) * HALF
                                    + c_of((s2, s3, s4, s5, s6))
                                    + c_of((s3, s4, s5, s6, s7)) * HALF
                                )
                                margin = one - q
                                if collect is not None:
                                    collect(window, margin, weight)
                                    report.enumerated += weight
                                else:
                                    report.enumerated += weight
                                    if not margin >= 0:
                                        report.violation_count += 1
                                        if len(report.violations) < 200:
                                            report.violations.append(
                                                Violation(
                                                    "vertices-big",
                                                    tuple(str(s) for s in window),
                                                    margin,
                                                )
                                            )
    return report
