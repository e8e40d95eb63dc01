"""JIT kernel for the small-vertex audit (degrees 3..7).

Charges are exact: every table constant times SCALE is an integer (asserted
during table preparation), so the kernel works in scaled int64 arithmetic.
Besides counting and violation collection it can record the distinct charge
FORMS (coefficient patterns over rule amounts) packed into two int64 words,
which the LP generator decodes into symbolic constraints.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np

from .rules import RuleTable

try:
    from numba import njit
    from numba.typed import Dict as NumbaDict
    from numba import types as nbtypes

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

SCALE = 1330560 * 17  # common denominator of every constant, either palette

# feature vector layout (indices into the per-leaf counter array)
F_D = 0
F_QUARTERS = 1
F_UNIT = 2  # 0 none, 1 unit, 2 two halves
F_5T1_M = 3  # -1 if absent else m
F_LIGHT = 4
F_HEAVY = 5
F_LE2 = 6
F_OPP = 7
F_3LIGHT = 8
F_3ALL6 = 9
F_3HEAVY = 10
F_THROUGH = 11
F_E_BASE = 12  # 14 slots: (ell-5)*2 + variant, ell in 5..11
F_ISO_BASE = 26  # 6 slots: ell-12, ell in 12..17
N_FEATURES = 32


def scaled_tables(table: RuleTable) -> Dict[str, object]:
    """Integer-scaled table arrays for the kernel; exactness is asserted."""

    def s(value: Fraction) -> int:
        scaled = value * SCALE
        assert scaled.denominator == 1, value
        return int(scaled)

    delta = table.delta
    E0 = np.zeros(delta + 1, dtype=np.int64)
    E1 = np.zeros(delta + 1, dtype=np.int64)
    R = np.zeros(delta + 1, dtype=np.int64)
    ISO = np.zeros(delta + 1, dtype=np.int64)
    for ell in range(5, 12):
        E0[ell] = s(table[("E", ell, 0)])
        E1[ell] = s(table[("E", ell, 1)])
        R[ell] = table.r_threshold(ell)
    for ell in range(12, delta + 1):
        ISO[ell] = s(table[("iso", ell)])
    consts = np.array(
        [
            s(table[("5_to_tri_1", 0)]),
            s(table[("5_to_tri_1", 1)]),
            s(table[("5_to_tri_1", 2)]),
            s(table[("5_to_tri_2_light",)]),
            s(table[("5_to_tri_2_heavy",)]),
            s(table[("6_to_tri_le2_adj",)]),
            s(table[("6_to_tri_2_opp",)]),
            s(table[("6_to_tri_3_light",)]),
            s(table[("6_to_tri_3_all6",)]),
            s(table[("6_to_tri_3_heavy",)]),
            s(table[("through_heavy",)]),
            SCALE,  # unit
            SCALE // 2,  # half
            SCALE // 4,  # quarter
        ],
        dtype=np.int64,
    )
    return {"E0": E0, "E1": E1, "R": R, "ISO": ISO, "consts": consts, "delta": delta}


def compile_patterns(patterns, delta: int):
    """Flatten fan_window patterns into arrays for the kernel.

    Only fan_window entries participate; the degree/adjacency staples are
    native to the kernel.  Returns (count, mindeg, exactdeg, length, lo, hi).
    """
    rows = [p for p in patterns if p.kind == "fan_window"]
    n = len(rows)
    maxlen = max((len(p.params["window"]) for p in rows), default=1)
    mindeg = np.zeros(n, dtype=np.int64)
    exactdeg = np.full(n, -1, dtype=np.int64)
    length = np.zeros(n, dtype=np.int64)
    lo = np.zeros((n, maxlen), dtype=np.int64)
    hi = np.zeros((n, maxlen), dtype=np.int64)
    from .catalog import parse_size_predicate

    for i, p in enumerate(rows):
        mindeg[i] = int(p.params.get("min_degree", 3))
        if "degree" in p.params:
            exactdeg[i] = int(p.params["degree"])
        win = p.params["window"]
        length[i] = len(win)
        for j, text in enumerate(win):
            pred = parse_size_predicate(text, delta)
            lo[i, j] = pred.lo
            hi[i, j] = pred.hi
    names = [p.name for p in rows]
    return names, mindeg, exactdeg, length, lo, hi


if HAVE_NUMBA:

    @njit(cache=True)
    def _match_patterns(sizes, d, mindeg, exactdeg, plen, plo, phi):
        """Index of the first matching fan_window pattern, or -1."""
        for pi in range(mindeg.shape[0]):
            if exactdeg[pi] >= 0:
                if d != exactdeg[pi]:
                    continue
            elif d < mindeg[pi]:
                continue
            L = plen[pi]
            if L > d:
                continue
            for start in range(d):
                ok = True
                for k in range(L):
                    s = sizes[(start + k) % d]
                    if s < plo[pi, k] or s > phi[pi, k]:
                        ok = False
                        break
                if ok:
                    return pi
                ok = True
                for k in range(L):
                    s = sizes[(start - k) % d]
                    if s < plo[pi, k] or s > phi[pi, k]:
                        ok = False
                        break
                if ok:
                    return pi
        return -1

    @njit(cache=True)
    def _leaf_charge(sizes, d, delta, E0, E1, R, ISO, consts, features):
        """Scaled final charge of the fan; fills the feature vector."""
        for i in range(N_FEATURES):
            features[i] = 0
        features[F_D] = d
        features[F_5T1_M] = -1
        charge = (d - 4) * SCALE
        n_small = 0
        n_quad = 0
        n_tri = 0
        for i in range(d):
            if sizes[i] <= 4:
                n_small += 1
                if sizes[i] == 4:
                    n_quad += 1
                else:
                    n_tri += 1
        if d == 3:
            if n_small == 1:
                charge += consts[11]
                features[F_UNIT] = 1
            elif n_small == 2 and n_quad == 2:
                charge += consts[11]
                features[F_UNIT] = 2
        if d >= 5:
            charge -= consts[13] * n_quad
            features[F_QUARTERS] = n_quad

        # triangle payments
        if d == 5 and n_tri == 1:
            if n_quad <= 2:
                charge -= consts[n_quad]
                features[F_5T1_M] = n_quad
        elif d == 5 and n_tri == 2:
            p1 = -1
            p2 = -1
            for i in range(d):
                if sizes[i] == 3:
                    if p1 < 0:
                        p1 = i
                    else:
                        p2 = i
            if (p2 - p1) != 1 and (p2 - p1) != d - 1:
                for i in range(d):
                    if sizes[i] == 3:
                        l1 = sizes[(i - 1) % d]
                        l2 = sizes[(i + 1) % d]
                        if l1 <= 7 and l2 <= 7:
                            charge -= consts[3]
                            features[F_LIGHT] += 1
                        else:
                            charge -= consts[4]
                            features[F_HEAVY] += 1
        elif d == 6 and n_tri >= 1:
            p1 = -1
            p2 = -1
            for i in range(d):
                if sizes[i] == 3:
                    if p1 < 0:
                        p1 = i
                    else:
                        p2 = i
            adjacent_pair = n_tri == 2 and ((p2 - p1) == 1 or (p2 - p1) == d - 1)
            if n_tri == 1 or adjacent_pair:
                charge -= consts[5] * n_tri
                features[F_LE2] += n_tri
            elif n_tri == 2:
                charge -= consts[6] * 2
                features[F_OPP] += 2
            elif n_tri == 3:
                alt = (sizes[0] == 3 and sizes[2] == 3 and sizes[4] == 3) or (
                    sizes[1] == 3 and sizes[3] == 3 and sizes[5] == 3
                )
                if alt:
                    for i in range(d):
                        if sizes[i] != 3:
                            continue
                        l1 = sizes[(i - 1) % d]
                        l2 = sizes[(i + 1) % d]
                        mn = l1 if l1 < l2 else l2
                        mx = l1 if l1 > l2 else l2
                        if mn == 5 and mx <= 7:
                            charge -= consts[7]
                            features[F_3LIGHT] += 1
                        elif l1 == 6 and l2 == 6:
                            charge -= consts[8]
                            features[F_3ALL6] += 1
                        else:
                            charge -= consts[9]
                            features[F_3HEAVY] += 1
        elif d == 7:
            for i in range(d):
                if sizes[i] != 3:
                    continue
                l1 = sizes[(i - 2) % d]
                l5 = sizes[(i + 2) % d]
                mn = l1 if l1 < l5 else l5
                mx = l1 if l1 > l5 else l5
                if l1 == 3 and l5 == 3:
                    charge -= consts[7]
                    features[F_3LIGHT] += 1
                elif mn <= 4 and mx != 3:
                    charge -= consts[5]
                    features[F_LE2] += 1
                else:
                    charge -= consts[6]
                    features[F_OPP] += 1

        # iso / E receipts
        for i in range(d):
            ell = sizes[i]
            if ell < 5:
                continue
            left = sizes[(i - 1) % d]
            right = sizes[(i + 1) % d]
            if left <= 4 or right <= 4:
                continue
            if d == 4 and sizes[(i + 2) % d] <= 4:
                continue
            if ell >= 12:
                charge += ISO[ell]
                features[F_ISO_BASE + ell - 12] += 1
            else:
                if left >= R[ell] and right >= R[ell]:
                    charge += E1[ell]
                    features[F_E_BASE + (ell - 5) * 2 + 1] += 1
                else:
                    charge += E0[ell]
                    features[F_E_BASE + (ell - 5) * 2] += 1

        through = 0
        if not (d == 3 and n_tri > 0):
            pays_self = False
            if d == 3 or d == 4:
                pays_self = n_small == 0
            elif d == 5:
                pays_self = n_tri != 2
            else:
                pays_self = True
            if pays_self:
                for i in range(d):
                    if sizes[(i - 1) % d] >= 12 and sizes[i] >= 12:
                        through += 1
        if d >= 6 or (d == 5 and n_tri == 1):
            for j in range(d):
                a = sizes[(j - 1) % d]
                b = sizes[j]
                if not ((5 <= a <= 10) or (5 <= b <= 10)):
                    continue
                if sizes[(j + 1) % d] == 3:
                    through += 1
                if sizes[(j - 2) % d] == 3:
                    through += 1
        charge -= consts[10] * through
        features[F_THROUGH] = through
        return charge

    @njit(cache=True)
    def _pack_features(features):
        k1 = np.int64(0)
        k2 = np.int64(0)
        # word 1: scalars (4 bits each is plenty except D/through)
        k1 = (
            features[F_D]
            | (features[F_QUARTERS] << 4)
            | (features[F_UNIT] << 8)
            | ((features[F_5T1_M] + 1) << 10)
            | (features[F_LIGHT] << 13)
            | (features[F_HEAVY] << 16)
            | (features[F_LE2] << 19)
            | (features[F_OPP] << 22)
            | (features[F_3LIGHT] << 25)
            | (features[F_3ALL6] << 28)
            | (features[F_3HEAVY] << 31)
            | (features[F_THROUGH] << 34)
        )
        shift = 0
        for i in range(14):
            k2 |= features[F_E_BASE + i] << shift
            shift += 3
        for i in range(6):
            k2 |= features[F_ISO_BASE + i] << shift
            shift += 3
        return k1, k2

    @njit(cache=True)
    def small_vertex_kernel(
        d,
        delta,
        E0,
        E1,
        R,
        ISO,
        consts,
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
        collect_below=0,
    ):
        """Enumerate all fans of a d-vertex; counters = (enumerated, tfedge,
        deg, pattern-discarded, violations)."""
        sizes = np.zeros(d, dtype=np.int64)
        features = np.zeros(N_FEATURES, dtype=np.int64)
        span = delta - 2
        # iterative DFS
        level = 0
        sizes[0] = 2  # pre-increment form
        n_viol = 0
        while level >= 0:
            sizes[level] += 1
            if sizes[level] > delta:
                level -= 1
                continue
            s = sizes[level]
            if level > 0:
                a = sizes[level - 1]
                mn = a if a < s else s
                mx = a if a > s else s
                if mn == 3 and mx <= 4:
                    w = 1
                    for _ in range(d - 1 - level):
                        w *= span
                    counters[0] += w
                    counters[1] += w
                    continue
            partial = 0
            for i in range(level + 1):
                partial += sizes[i] - 2
            if partial + (d - 1 - level) * (delta - 2) <= delta + 1:
                w = 1
                for _ in range(d - 1 - level):
                    w *= span
                counters[0] += w
                counters[2] += w
                continue
            if level < d - 1:
                level += 1
                sizes[level] = 2
                continue
            # leaf
            counters[0] += 1
            a = sizes[d - 1]
            b = sizes[0]
            mn = a if a < b else b
            mx = a if a > b else b
            if mn == 3 and mx <= 4:
                counters[1] += 1
                continue
            total = 0
            for i in range(d):
                total += sizes[i] - 2
            if total <= delta + 1:
                counters[2] += 1
                continue
            pi = _match_patterns(sizes, d, mindeg, exactdeg, plen, plo, phi)
            if pi >= 0:
                counters[3] += 1
                pattern_hits[pi] += 1
                continue
            charge = _leaf_charge(sizes, d, delta, E0, E1, R, ISO, consts, features)
            if collect_forms:
                key = _pack_features(features)
                if key in forms:
                    forms[key] = forms[key] + 1
                else:
                    forms[key] = np.int64(1)
            if charge < 0:
                counters[4] += 1
            if charge < collect_below or (charge < 0 and collect_below == 0):
                if n_viol < viol_buf.shape[0]:
                    for i in range(d):
                        viol_buf[n_viol, i] = sizes[i]
                    viol_buf[n_viol, 7] = charge
                    n_viol += 1
        return n_viol
