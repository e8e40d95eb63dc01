"""Charge ledger and concrete application of the discharging rules.

``apply_rules`` instantiates the whole rule catalog on a PlaneGraph and
returns a ledger whose total is conserved exactly and whose edge balances
are zero (two-phase transfers fire atomically).  Graphs containing locally
forbidden structure are still processed: rules whose parameter combinations
fall outside the published tables simply do not fire, which affects only
per-element balances, never conservation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .planegraph import PlaneGraph
from .rules import (
    HALF,
    QUARTER,
    UNIT,
    RuleKeyError,
    RuleTable,
    TriangleClass,
    key_name,
    t_combine,
    t_value,
)

Element = Tuple[str, object]  # ("v", i) | ("f", j) | ("e", (u, v))


def vertex(i: int) -> Element:
    return ("v", i)


def face(j: int) -> Element:
    return ("f", j)


def edge(u: int, v: int) -> Element:
    return ("e", (min(u, v), max(u, v)))


@dataclass
class Transfer:
    rule: str
    amount: Fraction
    source: Element
    target: Element


@dataclass
class ChargeLedger:
    balances: Dict[Element, Fraction]
    log: List[Transfer] = field(default_factory=list)

    def total(self) -> Fraction:
        return sum(self.balances.values(), Fraction(0))

    def move(self, rule: str, amount: Fraction, source: Element, target: Element) -> None:
        self.balances[source] -= amount
        self.balances[target] += amount
        self.log.append(Transfer(rule, amount, source, target))

    def of(self, element: Element) -> Fraction:
        return self.balances[element]


def initial_charge(g: PlaneGraph) -> ChargeLedger:
    """deg(v)-4 on vertices, |f|-4 on faces, 0 on edges."""
    balances: Dict[Element, Fraction] = {}
    for v in g.vertices():
        balances[vertex(v)] = Fraction(g.degree(v) - 4)
    for j, walk in enumerate(g.faces):
        balances[face(j)] = Fraction(len(set(walk)) - 4)
    for u, v in g.edges():
        balances[edge(u, v)] = Fraction(0)
    return ChargeLedger(balances)


class GraphContext:
    """Precomputed incidence structure for rule evaluation."""

    def __init__(self, g: PlaneGraph):
        self.g = g
        self.face_size = [len(set(w)) for w in g.faces]
        self.dart_face: Dict[Tuple[int, int], int] = {}
        for j, walk in enumerate(g.faces):
            n = len(walk)
            for t in range(n):
                self.dart_face[(walk[t], walk[(t + 1) % n])] = j
        self.edge_faces: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for u, v in g.edges():
            self.edge_faces[(u, v)] = (self.dart_face[(u, v)], self.dart_face[(v, u)])
        # fan[v][i] = face at the corner between neighbors i and i+1 of v
        self.fan: List[List[int]] = []
        for v in g.vertices():
            rot = g.rotation[v]
            self.fan.append([self.dart_face[(rot[i], v)] for i in range(len(rot))])

    def degree(self, v: int) -> int:
        return self.g.degree(v)

    def size(self, j: int) -> int:
        return self.face_size[j]

    def other_face(self, u: int, v: int, j: int) -> int:
        a, b = self.edge_faces[(min(u, v), max(u, v))]
        return b if a == j else a

    def faces_of_edge(self, u: int, v: int) -> Tuple[int, int]:
        return self.edge_faces[(min(u, v), max(u, v))]

    def vertex_faces(self, v: int) -> List[int]:
        return self.fan[v]

    def distinct_vertex_faces(self, v: int) -> List[int]:
        seen: List[int] = []
        for j in self.fan[v]:
            if j not in seen:
                seen.append(j)
        return seen

    def walk(self, j: int) -> Tuple[int, ...]:
        return self.g.faces[j]

    def boundary_triples(self, j: int):
        """(prev, v, next) for every boundary position of face j."""
        walk = self.g.faces[j]
        n = len(walk)
        for t in range(n):
            yield walk[(t - 1) % n], walk[t], walk[(t + 1) % n]

    def boundary_edges(self, j: int):
        """(u1, v1, v2, u2): each edge with its boundary neighbors."""
        walk = self.g.faces[j]
        n = len(walk)
        for t in range(n):
            yield walk[(t - 1) % n], walk[t], walk[(t + 1) % n], walk[(t + 2) % n]

    def third_vertex(self, j: int, v1: int, v2: int) -> int:
        (w,) = set(self.g.faces[j]) - {v1, v2}
        return w

    def small_faces_at(self, v: int) -> List[int]:
        return [j for j in self.distinct_vertex_faces(v) if self.face_size[j] <= 4]

    def triangles_at(self, v: int) -> List[int]:
        return [j for j in self.distinct_vertex_faces(v) if self.face_size[j] == 3]

    def triangle_class(self, j: int, v1: int, v2: int) -> TriangleClass:
        """Class of 3-face j seen across its edge v1v2."""
        v3 = self.third_vertex(j, v1, v2)
        adjacent = False
        if self.degree(v3) == 4:
            others = [x for x in self.g.rotation[v3] if x not in (v1, v2)]
            adjacent = len(others) == 2 and (
                others[1] in self.g.rotation[others[0]]
            )
        return self._classify(v1, v2, v3, adjacent)

    def _classify(self, v1: int, v2: int, v3: int, adjacent: bool) -> TriangleClass:
        from .rules import classify_triangle

        return classify_triangle(self.degree(v1), self.degree(v2), self.degree(v3), adjacent)

    def is_column(self, j: int, v1: int, v2: int) -> bool:
        """Whether 4-face j is a column as seen across its edge v1v2."""
        if self.face_size[j] != 4:
            return False
        walk = self.g.faces[j]
        if any(self.degree(x) != 3 for x in set(walk)):
            return False
        n = len(walk)
        for t in range(n):
            a, b = walk[t], walk[(t + 1) % n]
            if {a, b} == {v1, v2}:
                v4, v3 = walk[(t - 1) % n], walk[(t + 2) % n]
                other = self.other_face(v3, v4, j)
                return self.face_size[other] == 4
        return False

    def flank_face(self, j: int, u: int, v: int) -> int:
        """Face across edge uv from face j (u, v consecutive on j)."""
        return self.other_face(u, v, j)

    def isolated_on(self, j: int, u1: int, v: int, u2: int) -> bool:
        f1 = self.other_face(u1, v, j)
        f2 = self.other_face(u2, v, j)
        return self.face_size[f1] >= 5 and self.face_size[f2] >= 5

    def sink_of(self, v: int, j: int) -> Element:
        """Sink of vertex v with respect to sending face j."""
        if self.degree(v) == 4:
            j_edges = set()
            walk = self.g.faces[j]
            n = len(walk)
            for t in range(n):
                j_edges.add(frozenset((walk[t], walk[(t + 1) % n])))
            for cand in self.distinct_vertex_faces(v):
                if cand == j or self.face_size[cand] > 4:
                    continue
                cw = self.g.faces[cand]
                m = len(cw)
                shares = any(
                    frozenset((cw[t], cw[(t + 1) % m])) in j_edges for t in range(m)
                )
                if not shares:
                    return face(cand)
        return vertex(v)

    def t_of(self, j0: int, u: int, v1: int) -> int:
        """t-value of endpoint v1 on an edge of face j0, with u the boundary
        neighbor of v1 on j0 beyond the shared edge."""
        f_prime = self.other_face(u, v1, j0)
        return t_value(self.degree(v1), self.face_size[f_prime])


def sink_of(g: PlaneGraph, v: int, sender_face: int) -> Element:
    return GraphContext(g).sink_of(v, sender_face)


def applicable_rules(g: PlaneGraph, table: RuleTable) -> List[Transfer]:
    """Every transfer the rule catalog prescribes on g, deduplicated."""
    ctx = GraphContext(g)
    delta = table.delta
    out: List[Transfer] = []
    seen: Set[Tuple] = set()

    def emit(rule, amount, source: Element, target: Element, dedup=None):
        name = rule if isinstance(rule, str) else key_name(rule)
        key = dedup if dedup is not None else (name, source, target)
        if key in seen:
            return
        seen.add(key)
        out.append(Transfer(name, amount, source, target))

    # --- payments from small faces to their 3-vertices
    for v in g.vertices():
        if ctx.degree(v) != 3:
            continue
        small = ctx.small_faces_at(v)
        if len(small) == 1:
            emit("unit_to_3vertex", UNIT, face(small[0]), vertex(v))
        elif len(small) == 2 and all(ctx.size(j) == 4 for j in small):
            for j in small:
                emit("half_to_3vertex", HALF, face(j), vertex(v))

    # --- basic face rules (sizes 5..delta)
    for j0 in range(len(g.faces)):
        ell = ctx.size(j0)
        if ell < 5:
            continue
        for u1, v1, v2, u2 in ctx.boundary_edges(j0):
            f = ctx.other_face(v1, v2, j0)
            fsize = ctx.size(f)
            if fsize > 4:
                continue
            dedup = ("basic", j0, f, frozenset((v1, v2)))
            t1 = ctx.t_of(j0, u1, v1)
            t2 = ctx.t_of(j0, u2, v2)
            if fsize == 3:
                cls = ctx.triangle_class(f, v1, v2)
                if cls is TriangleClass.A:
                    key = ("weak", ell) if ell >= 12 else ("A", ell)
                elif cls is TriangleClass.B:
                    key = ("weak", ell) if ell >= 12 else ("B", ell)
                else:
                    key = None
                if key is not None:
                    try:
                        emit(key, table[key], face(j0), face(f), dedup)
                    except RuleKeyError:
                        pass
                    continue
                family = "C"
            else:
                if ctx.is_column(f, v1, v2):
                    key = ("weak", ell) if ell >= 12 else ("G", ell)
                    try:
                        emit(key, table[key], face(j0), face(f), dedup)
                    except RuleKeyError:
                        pass
                    continue
                family = "D"
            # C-triangles and non-column 4-faces
            if ell >= 12:
                a1 = 1 if ctx.size(ctx.other_face(u1, v1, j0)) <= 4 else 0
                a2 = 1 if ctx.size(ctx.other_face(u2, v2, j0)) <= 4 else 0
                amount = table[("small", ell, a1)] + table[("small", ell, a2)]
                emit(f"small_{ell}_{a1}+small_{ell}_{a2}", amount, face(j0), face(f), dedup)
            elif ell <= 7:
                key = (family, ell, t_combine(t1, t2))
                try:
                    emit(key, table[key], face(j0), face(f), dedup)
                except RuleKeyError:
                    pass
            else:
                try:
                    amount = table[(family, ell, t1)] + table[(family, ell, t2)]
                    emit(f"{family}_{ell}_{t1}+{family}_{ell}_{t2}", amount, face(j0), face(f), dedup)
                except RuleKeyError:
                    pass

        # isolated vertices: iso / E payments to sinks
        for u1, v, u2 in ctx.boundary_triples(j0):
            if not ctx.isolated_on(j0, u1, v, u2):
                continue
            target = ctx.sink_of(v, j0)
            if ell >= 12:
                key = ("iso", ell)
            else:
                r = table.r_threshold(ell)
                s1 = ctx.size(ctx.other_face(u1, v, j0))
                s2 = ctx.size(ctx.other_face(u2, v, j0))
                key = ("E", ell, 1 if (s1 >= r and s2 >= r) else 0)
            emit(key, table[key], face(j0), target, ("isoE", j0, v))

    # --- vertex rules
    for v in g.vertices():
        d = ctx.degree(v)
        if d < 5:
            continue
        fan = ctx.fan[v]
        for j in ctx.distinct_vertex_faces(v):
            if ctx.size(j) == 4:
                emit("quarter_to_4face", QUARTER, vertex(v), face(j), ("q4", v, j))
        tris = [i for i, j in enumerate(fan) if ctx.size(j) == 3]
        if d == 5:
            m = len([j for j in ctx.distinct_vertex_faces(v) if ctx.size(j) == 4])
            if len(tris) == 1:
                key = ("5_to_tri_1", m)
                try:
                    emit(key, table[key], vertex(v), face(fan[tris[0]]), ("5t1", v))
                except RuleKeyError:
                    pass
            elif len(tris) == 2 and (tris[1] - tris[0]) not in (1, d - 1):
                for i in tris:
                    l1 = ctx.size(fan[(i - 1) % d])
                    l2 = ctx.size(fan[(i + 1) % d])
                    key = (
                        ("5_to_tri_2_light",)
                        if l1 <= 7 and l2 <= 7
                        else ("5_to_tri_2_heavy",)
                    )
                    emit(key, table[key], vertex(v), face(fan[i]), ("5t2", v, i))
        elif d == 6:
            adjacent_pair = len(tris) == 2 and (tris[1] - tris[0]) in (1, d - 1)
            if len(tris) == 1 or (len(tris) == 2 and adjacent_pair):
                for i in tris:
                    emit(
                        ("6_to_tri_le2_adj",),
                        table[("6_to_tri_le2_adj",)],
                        vertex(v),
                        face(fan[i]),
                        ("6t", v, i),
                    )
            elif len(tris) == 2:
                for i in tris:
                    emit(
                        ("6_to_tri_2_opp",),
                        table[("6_to_tri_2_opp",)],
                        vertex(v),
                        face(fan[i]),
                        ("6t", v, i),
                    )
            elif len(tris) == 3 and tris in ([0, 2, 4], [1, 3, 5]):
                for i in tris:
                    l1 = ctx.size(fan[(i - 1) % d])
                    l2 = ctx.size(fan[(i + 1) % d])
                    if min(l1, l2) == 5 and max(l1, l2) <= 7:
                        key = ("6_to_tri_3_light",)
                    elif l1 == 6 and l2 == 6:
                        key = ("6_to_tri_3_all6",)
                    else:
                        key = ("6_to_tri_3_heavy",)
                    emit(key, table[key], vertex(v), face(fan[i]), ("6t", v, i))
        else:  # d >= 7
            for i in tris:
                l1 = ctx.size(fan[(i - 2) % d])
                l5 = ctx.size(fan[(i + 2) % d])
                if l1 == 3 and l5 == 3:
                    key = ("6_to_tri_3_light",)
                elif min(l1, l5) <= 4 and max(l1, l5) != 3:
                    key = ("6_to_tri_le2_adj",)
                else:
                    key = ("6_to_tri_2_opp",)
                emit(key, table[key], vertex(v), face(fan[i]), ("7t", v, i))

    # --- additional charge to 3- and 4-faces from 6..10-faces
    for j0 in range(len(g.faces)):
        ell = ctx.size(j0)
        if not 6 <= ell <= 10:
            continue
        for u1, v1, v2, u2 in ctx.boundary_edges(j0):
            f = ctx.other_face(v1, v2, j0)
            fsize = ctx.size(f)
            if fsize > 4:
                continue
            s1 = ctx.size(ctx.other_face(u1, v1, j0))
            s2 = ctx.size(ctx.other_face(u2, v2, j0))
            lo, hi = min(s1, s2), max(s1, s2)
            dedup = ("extra", j0, f, frozenset((v1, v2)))
            if (
                ell == 6
                and fsize == 4
                and ctx.degree(v1) == 3
                and ctx.degree(v2) == 3
                and hi <= delta - 1
                and not ctx.is_column(f, v1, v2)
            ):
                emit(("light_D_extra",), table[("light_D_extra",)], face(j0), face(f), dedup)
            if ell == 7 and fsize == 3:
                cls = ctx.triangle_class(f, v1, v2)
                if (
                    cls is TriangleClass.C
                    and ctx.degree(v1) == 3
                    and ctx.degree(v2) == 3
                    and hi <= delta - 1
                ):
                    emit(("light_C_extra",), table[("light_C_extra",)], face(j0), face(f), dedup)
                if cls is TriangleClass.A and lo == delta - 1:
                    key = ("short_to_lightA", 7, 1, delta - hi)
                    try:
                        emit(key, table[key], face(j0), face(f), dedup)
                    except RuleKeyError:
                        pass
            if ell == 8 and fsize == 3:
                cls = ctx.triangle_class(f, v1, v2)
                if cls is TriangleClass.A and lo in (delta - 2, delta - 1):
                    key = ("short_to_lightA", 8, delta - lo, delta - hi)
                    try:
                        emit(key, table[key], face(j0), face(f), dedup)
                    except RuleKeyError:
                        pass
            if ell == 9 and fsize == 3:
                cls = ctx.triangle_class(f, v1, v2)
                if cls is TriangleClass.A and lo == delta - 3:
                    key = ("face_to_lightA", 9, 2 if hi == lo else 1)
                    emit(key, table[key], face(j0), face(f), dedup)
            if ell == 10 and fsize == 3:
                cls = ctx.triangle_class(f, v1, v2)
                if cls is TriangleClass.A and lo == delta - 4:
                    key = ("face_to_lightA", 10, 2 if hi == lo else 1)
                    emit(key, table[key], face(j0), face(f), dedup)

    # --- two-phase rules through edges
    th = table[("through_heavy",)]

    def is_3_in_3face(u: int) -> bool:
        return ctx.degree(u) == 3 and bool(ctx.triangles_at(u))

    for u0, v0 in g.edges():
        fa, fb = ctx.faces_of_edge(u0, v0)
        sa, sb = ctx.size(fa), ctx.size(fb)
        e = edge(u0, v0)
        # first family: both faces big, charge crosses to a triangle
        if sa >= 12 and sb >= 12:
            for u, v in ((u0, v0), (v0, u0)):
                if is_3_in_3face(u):
                    continue
                if not (ctx.degree(v) == 3 and ctx.triangles_at(v)):
                    continue
                tri = ctx.triangles_at(v)[0]
                w = ctx.walk(tri)
                others = [x for x in set(w) if x != v]
                opp = ctx.other_face(others[0], others[1], tri)
                if ctx.size(opp) > 11:
                    continue
                du = ctx.degree(u)
                small_u = ctx.small_faces_at(u)
                if du <= 4 and len(small_u) == 1:
                    emit("through_heavy", th, face(small_u[0]), e, ("th1s", u0, v0, u))
                elif du == 4 and len(small_u) == 2 and all(ctx.size(x) == 4 for x in small_u):
                    for x in small_u:
                        emit("through_heavy/2", th / 2, face(x), e, ("th1h", u0, v0, u, x))
                elif du == 5 and len(ctx.triangles_at(u)) == 2 and len(small_u) == 2:
                    for x in ctx.triangles_at(u):
                        emit("through_heavy/2", th / 2, face(x), e, ("th1h", u0, v0, u, x))
                else:
                    emit("through_heavy", th, vertex(u), e, ("th1v", u0, v0, u))
                emit("through_heavy", th, e, face(tri), ("th1f", u0, v0, u))
        # second family: an edge with a mid face feeds a triangle beyond it
        if 5 <= sa <= 10 or 5 <= sb <= 10:
            for u, v in ((u0, v0), (v0, u0)):
                du = ctx.degree(u)
                if not (du >= 6 or (du == 5 and len(ctx.triangles_at(u)) == 1)):
                    continue
                for f0 in (fa, fb):
                    walk = ctx.walk(f0)
                    n = len(walk)
                    pos = walk.index(u)
                    nbrs = (walk[(pos - 1) % n], walk[(pos + 1) % n])
                    uprime = nbrs[0] if nbrs[1] == v else nbrs[1]
                    fpr = ctx.other_face(u, uprime, f0)
                    if ctx.size(fpr) != 3:
                        continue
                    emit("through_heavy", th, vertex(u), e, ("th2v", u0, v0, u, f0))
                    emit("through_heavy", th, e, face(fpr), ("th2f", u0, v0, u, f0))
        # third family: triangle-to-triangle through an edge on a big face
        pairs = []
        if 5 <= sa <= 10 and sb >= 12:
            pairs.append(fb)
        if 5 <= sb <= 10 and sa >= 12:
            pairs.append(fa)
        for fbig in pairs:
            for u, v in ((u0, v0), (v0, u0)):
                if ctx.degree(u) != 5 or len(ctx.triangles_at(u)) != 2:
                    continue
                walk = ctx.walk(fbig)
                n = len(walk)
                pos = walk.index(u)
                nbrs = (walk[(pos - 1) % n], walk[(pos + 1) % n])
                uprime = nbrs[0] if nbrs[1] == v else nbrs[1]
                fpr = ctx.other_face(u, uprime, fbig)
                if ctx.size(fpr) != 3:
                    continue
                tri_other = [x for x in ctx.triangles_at(u) if x != fpr]
                if len(tri_other) != 1:
                    continue
                emit("through_heavy", th, face(fpr), e, ("th3s", u0, v0, u, fbig))
                emit("through_heavy", th, e, face(tri_other[0]), ("th3f", u0, v0, u, fbig))

    # --- special rules
    for j in range(len(g.faces)):
        if ctx.size(j) != 4:
            continue
        walk = ctx.walk(j)
        for t in range(4):
            v1, v2, v3, v4 = (walk[(t + i) % 4] for i in range(4))
            fpr = ctx.other_face(v1, v2, j)
            if ctx.size(fpr) == 5:
                opp = ctx.other_face(v3, v4, j)
                if (
                    ctx.degree(v3) >= 4
                    or ctx.degree(v4) >= 4
                    or ctx.size(opp) >= 6
                ):
                    emit(
                        ("four_to_five",),
                        table[("four_to_five",)],
                        face(j),
                        face(fpr),
                        ("f45", j, fpr, frozenset((v1, v2))),
                    )
            # four1: this face pays an adjacent 4-face whose far corners chain on
            if ctx.size(fpr) == 4:
                fw = ctx.walk(fpr)
                m = len(fw)
                for s in range(m):
                    a, b = fw[s], fw[(s + 1) % m]
                    if {a, b} == {v1, v2}:
                        # label the receiver p1p2p3p4 with p1p2 the shared edge
                        p1, p2 = fw[s], fw[(s + 1) % m]
                        p3, p4 = fw[(s + 2) % m], fw[(s + 3) % m]
                        if (
                            ctx.degree(p1) == 4
                            and ctx.degree(p2) == 4
                            and ctx.size(ctx.other_face(p1, p4, fpr)) == 4
                            and ctx.size(ctx.other_face(p2, p3, fpr)) == 4
                        ):
                            emit(
                                ("four1",),
                                table[("four1",)],
                                face(j),
                                face(fpr),
                                ("f41", j, fpr),
                            )
                        break
            # four2: pay the triangle hanging off a 4-vertex corner
            if (
                ctx.degree(v1) == 4
                and ctx.size(ctx.other_face(v1, v4, j)) >= delta - 1
                and ctx.size(ctx.other_face(v2, v3, j)) >= delta - 1
            ):
                target = ctx.sink_of(v1, j)
                if target[0] == "f" and ctx.size(target[1]) == 3:
                    emit(("four2",), table[("four2",)], face(j), target, ("f42", j, target[1]))

    for j in range(len(g.faces)):
        ell = ctx.size(j)
        if ell in (5, 11):
            key = ("star_CC_to_5_extra",) if ell == 5 else ("star_CC_to_11_extra",)
            for v1, v2, v3 in ctx.boundary_triples(j):
                if ctx.degree(v1) != 3:
                    continue
                fa_ = ctx.other_face(v1, v2, j)
                fb_ = ctx.other_face(v2, v3, j)
                if ctx.size(fa_) != 3 or ctx.size(fb_) != 3:
                    continue
                if ctx.triangle_class(fa_, v1, v2) is not TriangleClass.C:
                    continue
                if ctx.triangle_class(fb_, v2, v3) is not TriangleClass.C:
                    continue
                emit(key, table[key], face(fa_), face(j), ("cc", j, fa_, frozenset((v1, v2))))
        if ell == 10:
            for v1, v2, v3 in ctx.boundary_triples(j):
                tri = ctx.other_face(v2, v3, j)
                if ctx.size(tri) != 3:
                    continue
                if ctx.triangle_class(tri, v2, v3) is not TriangleClass.A:
                    continue
                if ctx.size(ctx.other_face(v1, v2, j)) >= 13:
                    emit(
                        ("10_to_13_A_extra",),
                        table[("10_to_13_A_extra",)],
                        face(j),
                        face(tri),
                        ("ten13", j, tri),
                    )
        if ell == 11:
            for v1, v2, v3 in ctx.boundary_triples(j):
                if ctx.degree(v2) != 4:
                    continue
                if ctx.size(ctx.other_face(v1, v2, j)) not in (5, 6):
                    continue
                if ctx.size(ctx.other_face(v2, v3, j)) not in (5, 6):
                    continue
                target = ctx.sink_of(v2, j)
                if target[0] == "f" and ctx.size(target[1]) == 3:
                    emit(
                        ("11_to_opp_66tri_extra",),
                        table[("11_to_opp_66tri_extra",)],
                        face(j),
                        target,
                        ("opp66", j, v2),
                    )

    return out


def apply_rules(g: PlaneGraph, table: RuleTable) -> ChargeLedger:
    """Initial assignment plus every applicable transfer; conservation and
    zero edge balances hold exactly by construction and are re-checked."""
    if g.max_face_size() > table.delta:
        raise ValueError(
            f"graph has a face of size {g.max_face_size()} > delta {table.delta}"
        )
    ledger = initial_charge(g)
    before = ledger.total()
    for tr in applicable_rules(g, table):
        ledger.move(tr.rule, tr.amount, tr.source, tr.target)
    after = ledger.total()
    if before != after:
        raise AssertionError("charge conservation violated")
    for (kind, ident), bal in ledger.balances.items():
        if kind == "e" and bal != 0:
            raise AssertionError(f"edge {ident} retained charge {bal}")
    return ledger
