"""Combinatorial plane graphs given by rotation systems.

A graph is described by the cyclic order of neighbors around every vertex.
Faces are traced with the standard next-dart-in-rotation walk and validated
against Euler's formula, which catches non-planar or mis-ordered rotations.
The module also provides the brute-force cyclic-coloring oracle used to
cross-check everything else at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple


class PlaneGraphError(ValueError):
    """Invalid rotation system (asymmetry, duplicates, Euler violation...)."""


class GraphParseError(PlaneGraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Coloring:
    """Total vertex coloring with colors drawn from 1..palette_size."""

    assignment: Dict[int, int]
    palette_size: int

    def colors_used(self) -> int:
        return len(set(self.assignment.values()))


@dataclass(frozen=True)
class PlaneGraph:
    rotation: Tuple[Tuple[int, ...], ...]
    faces: Tuple[Tuple[int, ...], ...] = field(default=())  # filled by build

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    def vertices(self) -> range:
        return range(len(self.rotation))

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(
            {(min(u, v), max(u, v)) for u in self.vertices() for v in self.rotation[u]}
        )

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.rotation) // 2

    def face_sizes(self) -> List[int]:
        return sorted(len(set(w)) for w in self.faces)

    def max_face_size(self) -> int:
        return max(len(set(w)) for w in self.faces)

    def faces_at_vertex(self, v: int) -> List[int]:
        return [i for i, walk in enumerate(self.faces) if v in walk]

    def faces_at_edge(self, u: int, v: int) -> List[int]:
        out = []
        for i, walk in enumerate(self.faces):
            n = len(walk)
            for j in range(n):
                a, b = walk[j], walk[(j + 1) % n]
                if (a, b) == (u, v) or (a, b) == (v, u):
                    out.append(i)
                    break
        return out


def _validate_rotation(rotation: Sequence[Sequence[int]]) -> None:
    n = len(rotation)
    for v, nbrs in enumerate(rotation):
        seen = set()
        for w in nbrs:
            if not 0 <= w < n:
                raise PlaneGraphError(f"vertex {v}: neighbor {w} out of range")
            if w == v:
                raise PlaneGraphError(f"vertex {v}: self-loop")
            if w in seen:
                raise PlaneGraphError(f"vertex {v}: duplicate neighbor {w}")
            seen.add(w)
    for v, nbrs in enumerate(rotation):
        for w in nbrs:
            if v not in rotation[w]:
                raise PlaneGraphError(f"asymmetric adjacency: {v}->{w} without {w}->{v}")


def _connected(rotation: Sequence[Sequence[int]]) -> bool:
    n = len(rotation)
    if n == 0:
        return False
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in rotation[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _trace_faces(rotation: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    index_of: List[Dict[int, int]] = [
        {w: i for i, w in enumerate(nbrs)} for nbrs in rotation
    ]
    unused = {(u, v) for u, nbrs in enumerate(rotation) for v in nbrs}
    faces = []
    while unused:
        start = min(unused)
        walk = []
        dart = start
        while True:
            unused.discard(dart)
            u, v = dart
            walk.append(u)
            nbrs = rotation[v]
            dart = (v, nbrs[(index_of[v][u] + 1) % len(nbrs)])
            if dart == start:
                break
        faces.append(tuple(walk))
    return faces


def build_plane_graph(
    rotation: Sequence[Sequence[int]], allow_bridges: bool = False
) -> PlaneGraph:
    """Trace faces of the rotation system and validate Euler's formula.

    Rejects disconnected graphs and multi-edges.  Bridges (an edge appearing
    twice on one face walk) are rejected by default since every graph the
    proof machinery cares about is 3-connected; connectivity probes may opt
    in to bridged graphs.
    """
    rotation = tuple(tuple(nbrs) for nbrs in rotation)
    _validate_rotation(rotation)
    if not _connected(rotation):
        raise PlaneGraphError("graph is not connected")
    faces = _trace_faces(rotation)
    n = len(rotation)
    e = sum(len(nbrs) for nbrs in rotation) // 2
    if n - e + len(faces) != 2:
        raise PlaneGraphError(
            f"Euler check failed: V={n} E={e} F={len(faces)} (rotation not planar?)"
        )
    if not allow_bridges:
        for walk in faces:
            darts = set()
            m = len(walk)
            for j in range(m):
                a, b = walk[j], walk[(j + 1) % m]
                if (min(a, b), max(a, b)) in darts:
                    raise PlaneGraphError(f"bridge detected at edge {(a, b)}")
                darts.add((min(a, b), max(a, b)))
    g = PlaneGraph.__new__(PlaneGraph)
    object.__setattr__(g, "rotation", rotation)
    object.__setattr__(g, "faces", tuple(faces))
    return g


def parse_graph(text: str) -> PlaneGraph:
    """Parse the plain-text format: first line n, then ``v: w1 w2 ... wd``
    with vertices numbered 1..n and neighbors in embedding order."""
    lines = text.splitlines()
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    body = [(no, ln) for no, ln in body if ln and not ln.startswith("#")]
    if not body:
        raise GraphParseError("empty graph file", 1)
    no, first = body[0]
    try:
        n = int(first)
    except ValueError:
        raise GraphParseError(f"expected vertex count, got {first!r}", no) from None
    if len(body) - 1 != n:
        raise GraphParseError(
            f"expected {n} adjacency lines, found {len(body) - 1}", no
        )
    rotation: List[List[int]] = [[] for _ in range(n)]
    seen = set()
    for no, ln in body[1:]:
        head, sep, rest = ln.partition(":")
        if not sep:
            raise GraphParseError("expected 'v: w1 w2 ...'", no)
        try:
            v = int(head)
            nbrs = [int(tok) for tok in rest.split()]
        except ValueError:
            raise GraphParseError(f"bad integer in {ln!r}", no) from None
        if not 1 <= v <= n:
            raise GraphParseError(f"vertex {v} out of range 1..{n}", no)
        if v in seen:
            raise GraphParseError(f"duplicate adjacency line for vertex {v}", no)
        seen.add(v)
        if any(not 1 <= w <= n for w in nbrs):
            raise GraphParseError(f"neighbor out of range in {ln!r}", no)
        rotation[v - 1] = [w - 1 for w in nbrs]
    for no, ln in body[1:]:
        v = int(ln.partition(":")[0])
        for w in rotation[v - 1]:
            if (v - 1) not in rotation[w]:
                raise GraphParseError(
                    f"asymmetric adjacency: {v} lists {w + 1} but not conversely", no
                )
    return build_plane_graph(rotation)


def format_graph(g: PlaneGraph) -> str:
    lines = [str(g.vertex_count)]
    for v in g.vertices():
        lines.append(f"{v + 1}: " + " ".join(str(w + 1) for w in g.rotation[v]))
    return "\n".join(lines) + "\n"


def cyclic_adjacency(g: PlaneGraph) -> List[Set[int]]:
    """u ~ v iff they are incident with a common face."""
    adj: List[Set[int]] = [set() for _ in g.vertices()]
    for walk in g.faces:
        verts = sorted(set(walk))
        for i, u in enumerate(verts):
            for v in verts[i + 1 :]:
                adj[u].add(v)
                adj[v].add(u)
    return adj


def cyclic_degree(g: PlaneGraph, v: int) -> int:
    if not 0 <= v < g.vertex_count:
        raise PlaneGraphError(f"vertex {v} not in graph")
    return len(cyclic_adjacency(g)[v])


def check_cyclic_coloring(g: PlaneGraph, coloring: Coloring) -> bool:
    """True iff every face walk carries pairwise-distinct colors.  Repeated
    visits of one vertex on a walk compare as one vertex."""
    missing = [v for v in g.vertices() if v not in coloring.assignment]
    if missing:
        raise PlaneGraphError(f"partial coloring: vertices {missing} uncolored")
    for v, c in coloring.assignment.items():
        if not 1 <= c <= coloring.palette_size:
            raise PlaneGraphError(f"color {c} of vertex {v} outside palette")
    for walk in g.faces:
        verts = set(walk)
        colors = {coloring.assignment[v] for v in verts}
        if len(colors) != len(verts):
            return False
    return True


def brute_force_cyclic_coloring(g: PlaneGraph, k: int) -> Optional[Coloring]:
    """Backtracking search for a cyclic coloring with at most k colors.

    Works on the cyclic-adjacency graph with first-fail vertex ordering and
    color-symmetry breaking: a vertex may reuse any color already placed or
    open exactly the next fresh one.
    """
    if k <= 0:
        return None
    adj = cyclic_adjacency(g)
    n = g.vertex_count
    order: List[int] = []
    placed = [False] * n
    # Static first-fail order: most cyclically constrained vertices first,
    # ties broken by picking a neighbor of the already-ordered prefix.
    for _ in range(n):
        best = None
        for v in range(n):
            if placed[v]:
                continue
            rank = (sum(placed[u] for u in adj[v]), len(adj[v]))
            if best is None or rank > best[0]:
                best = (rank, v)
        order.append(best[1])
        placed[best[1]] = True

    colors: Dict[int, int] = {}

    def extend(idx: int, used: int) -> bool:
        if idx == n:
            return True
        v = order[idx]
        forbidden = {colors[u] for u in adj[v] if u in colors}
        limit = min(k, used + 1)
        for c in range(1, limit + 1):
            if c in forbidden:
                continue
            colors[v] = c
            if extend(idx + 1, max(used, c)):
                return True
            del colors[v]
        return False

    if extend(0, 0):
        return Coloring(dict(colors), k)
    return None


def cyclic_chromatic_number(g: PlaneGraph, upper: Optional[int] = None) -> int:
    """Linear scan over palette sizes; oracle scale only."""
    if upper is None:
        upper = g.vertex_count
    for k in range(1, upper + 1):
        if brute_force_cyclic_coloring(g, k) is not None:
            return k
    raise PlaneGraphError(f"no cyclic coloring with up to {upper} colors")


def is_three_connected(g: PlaneGraph) -> bool:
    """Exhaustive vertex-pair removal; fine at oracle scale."""
    n = g.vertex_count
    if n < 4:
        return False

    def connected_without(removed: FrozenSet[int]) -> bool:
        remaining = [v for v in g.vertices() if v not in removed]
        if not remaining:
            return False
        seen = {remaining[0]}
        stack = [remaining[0]]
        while stack:
            v = stack.pop()
            for w in g.rotation[v]:
                if w not in removed and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(remaining)

    for u in range(n):
        if not connected_without(frozenset({u})):
            return False
        for v in range(u + 1, n):
            if not connected_without(frozenset({u, v})):
                return False
    return True
