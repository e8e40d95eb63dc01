"""Data-driven catalog of forbidden local patterns.

The audit engine is pattern-agnostic: every discard is justified by a named
catalog entry, loaded from JSON data shipped with the package.  Entries
describe reducible configurations as structural predicates over the local
contexts the audits enumerate:

  cyclic_degree_le   fires on a full vertex fan when the cyclic degree,
                     computed as sum(size - 2), is at most the bound
  adjacent_faces     fires when two faces matching the size predicates share
                     an edge (consecutive fan slots, or a face against one
                     of its edge-neighbours)
  fan_window         fires when a window of consecutive face sizes around a
                     vertex matches a predicate sequence (either direction),
                     optionally guarded by the center vertex degree

Size predicates are strings over concrete sizes with ``delta`` available:
``"3"``, ``"<=4"``, ``">=5"``, ``"5..10"``, ``"delta-1"``, ``">=delta-1"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple


class SizeClass:
    """Slot value in an audit context: an exact size or a closed range."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi

    @staticmethod
    def exact(n: int) -> "SizeClass":
        return SizeClass(n, n)

    def __repr__(self):
        return f"{self.lo}" if self.lo == self.hi else f"{self.lo}..{self.hi}"


def as_class(value) -> SizeClass:
    return value if isinstance(value, SizeClass) else SizeClass.exact(int(value))


@dataclass(frozen=True)
class SizePredicate:
    lo: int
    hi: int
    text: str

    def holds_for_all(self, cls: SizeClass) -> bool:
        return self.lo <= cls.lo and cls.hi <= self.hi

    def holds_for_some(self, cls: SizeClass) -> bool:
        return not (cls.hi < self.lo or self.hi < cls.lo)


def parse_size_predicate(text: str, delta: int) -> SizePredicate:
    def term(t: str) -> int:
        t = t.strip()
        if t.startswith("delta"):
            rest = t[5:].strip()
            return delta + (int(rest) if rest else 0)
        return int(t)

    t = text.strip()
    if t.startswith("<="):
        return SizePredicate(3, term(t[2:]), text)
    if t.startswith(">="):
        return SizePredicate(term(t[2:]), delta, text)
    if ".." in t:
        lo, hi = t.split("..")
        return SizePredicate(term(lo), term(hi), text)
    if t == "*":
        return SizePredicate(3, delta, text)
    n = term(t)
    return SizePredicate(n, n, text)


@dataclass(frozen=True)
class VertexFan:
    """Full cyclic fan of face sizes around a vertex of known degree."""

    degree: int
    sizes: Tuple[SizeClass, ...]


@dataclass(frozen=True)
class VertexWindow:
    """Consecutive face sizes around a vertex of degree at least min_degree;
    the rest of the fan is unknown."""

    min_degree: int
    sizes: Tuple[SizeClass, ...]


@dataclass(frozen=True)
class Pattern:
    name: str
    kind: str
    params: dict
    description: str = ""

    def matches(self, context, delta: int) -> bool:
        if self.kind == "cyclic_degree_le":
            return self._match_cyclic_degree(context, delta)
        if self.kind == "adjacent_faces":
            return self._match_adjacent(context, delta)
        if self.kind == "fan_window":
            return self._match_window(context, delta)
        raise ValueError(f"unknown pattern kind {self.kind!r}")

    def _bound(self, delta: int) -> int:
        text = str(self.params["bound"])
        return parse_size_predicate(text, delta).hi

    def _match_cyclic_degree(self, context, delta: int) -> bool:
        if not isinstance(context, VertexFan):
            return False
        # certain only when the maximal possible cyclic degree is bounded
        upper = sum(c.hi - 2 for c in context.sizes)
        return upper <= self._bound(delta)

    def _match_adjacent(self, context, delta: int) -> bool:
        p1 = parse_size_predicate(self.params["sizes"][0], delta)
        p2 = parse_size_predicate(self.params["sizes"][1], delta)
        if isinstance(context, (VertexFan, VertexWindow)):
            sizes = context.sizes
            cyclic = isinstance(context, VertexFan)
            n = len(sizes)
            span = n if cyclic else n - 1
            for i in range(span):
                a, b = sizes[i], sizes[(i + 1) % n]
                if (p1.holds_for_all(a) and p2.holds_for_all(b)) or (
                    p1.holds_for_all(b) and p2.holds_for_all(a)
                ):
                    return True
        return False

    def _match_window(self, context, delta: int) -> bool:
        preds = [parse_size_predicate(t, delta) for t in self.params["window"]]
        mind = int(self.params.get("min_degree", 3))
        if isinstance(context, VertexFan):
            if context.degree < mind:
                return False
            sizes = context.sizes
            n = len(sizes)
            if len(preds) > n:
                return False
            for start in range(n):
                for direction in (1, -1):
                    if all(
                        preds[k].holds_for_all(sizes[(start + direction * k) % n])
                        for k in range(len(preds))
                    ):
                        return True
            return False
        if isinstance(context, VertexWindow):
            if context.min_degree < mind:
                # degree not guaranteed high enough: cannot certify the match
                return False
            sizes = context.sizes
            n = len(sizes)
            if len(preds) > n:
                return False
            for start in range(n - len(preds) + 1):
                for direction in (1, -1):
                    idxs = [start + direction * k for k in range(len(preds))]
                    if direction == -1:
                        idxs = [i + len(preds) - 1 for i in idxs]
                    if any(i < 0 or i >= n for i in idxs):
                        continue
                    if all(preds[k].holds_for_all(sizes[idxs[k]]) for k in range(len(preds))):
                        return True
            return False
        return False


@dataclass
class ForbiddenPatternCatalog:
    patterns: List[Pattern]

    def match(self, context, delta: int) -> Optional[str]:
        """Name of the first matching pattern, or None."""
        for p in self.patterns:
            if p.matches(context, delta):
                return p.name
        return None

    def names(self) -> List[str]:
        return [p.name for p in self.patterns]


def empty_catalog() -> ForbiddenPatternCatalog:
    return ForbiddenPatternCatalog([])


def load_catalog(path: Optional[str] = None) -> ForbiddenPatternCatalog:
    if path is None:
        text = resources.files("cycolor.data").joinpath("catalog.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    patterns = [
        Pattern(e["name"], e["kind"], e.get("params", {}), e.get("description", ""))
        for e in raw["patterns"]
    ]
    return ForbiddenPatternCatalog(patterns)


def match_forbidden(context, catalog: ForbiddenPatternCatalog, delta: int) -> Optional[str]:
    return catalog.match(context, delta)
