"""Parser and data model for two-block reducible-configuration files.

A file holds two blocks: the reduced (new) configuration first, then the
original configuration being certified.  Each block starts with ``m n``
(face count, internal-vertex count) followed by m face lines:

    0 <letters> <internals>          bounded face of the drawn size
    a1-a2 <letters> <internals>      unbounded face, first block only
    r <letters> <internals>          unbounded face of the second block,
                                     sharing its hidden boundary with face
                                     r of the first block (1-based)

``<letters>`` is a contiguous run of lowercase letters or ``-`` when the
face has no lettered vertices; ``<internals>`` is a comma-separated list of
internal ids in 1..n, or ``-``.  An unbounded face is additionally incident
with k hidden vertices, delta+2-a2 <= k <= delta+2-a1; corresponding faces
of the two blocks share those hidden vertices, so k is common to the pair
while the face sizes differ by the number of listed vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

BOUNDED = "bounded"
UNBOUNDED_NEW = "unbounded_new"
UNBOUNDED_ORIG = "unbounded_orig"


class ReductionParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class VertexToken:
    kind: str  # "internal" | "letter"
    value: int | str

    @staticmethod
    def internal(i: int) -> "VertexToken":
        return VertexToken("internal", i)

    @staticmethod
    def letter(c: str) -> "VertexToken":
        return VertexToken("letter", c)


@dataclass(frozen=True)
class FaceSpec:
    kind: str  # BOUNDED / UNBOUNDED_NEW / UNBOUNDED_ORIG
    letters: Tuple[str, ...]
    internals: Tuple[int, ...]
    a1: Optional[int] = None
    a2: Optional[int] = None
    ref_index: Optional[int] = None

    def tokens(self) -> List[VertexToken]:
        return [VertexToken.letter(c) for c in self.letters] + [
            VertexToken.internal(i) for i in self.internals
        ]

    @property
    def bounded(self) -> bool:
        return self.kind == BOUNDED

    def size(self) -> int:
        if not self.bounded:
            raise ValueError("unbounded faces have a size range, not a size")
        return len(self.letters) + len(self.internals)


@dataclass(frozen=True)
class ConfigurationBlock:
    m: int
    n: int
    faces: Tuple[FaceSpec, ...]

    def letter_set(self) -> frozenset:
        return frozenset(c for f in self.faces for c in f.letters)


@dataclass(frozen=True)
class ReductionPair:
    reduced: ConfigurationBlock
    original: ConfigurationBlock

    def resolve(self, face: FaceSpec) -> FaceSpec:
        """The first-block face carrying the hidden-range of ``face``."""
        if face.kind != UNBOUNDED_ORIG:
            return face
        return self.reduced.faces[face.ref_index - 1]


def hidden_count_range(
    face: FaceSpec, delta: int, reduced_block: Optional[ConfigurationBlock] = None
) -> Tuple[int, int]:
    """Allowed number of hidden vertices of an unbounded face.

    Second-block faces inherit the range through their reference, which
    requires passing the first block.
    """
    if face.kind == BOUNDED:
        raise ValueError("bounded face has no hidden vertices")
    if face.kind == UNBOUNDED_ORIG:
        if reduced_block is None:
            raise ValueError("resolving a second-block face requires the first block")
        face = reduced_block.faces[face.ref_index - 1]
    kmin = delta + 2 - face.a2
    kmax = delta + 2 - face.a1
    if kmin < 0:
        raise ValueError(
            f"negative hidden count: range {face.a1}-{face.a2} at max face size {delta}"
        )
    return kmin, kmax


def _parse_letters(token: str, lineno: int) -> Tuple[str, ...]:
    if token == "-":
        return ()
    if not token.isalpha() or not token.islower():
        raise ReductionParseError(f"bad letter token {token!r}", lineno)
    letters = tuple(token)
    if len(set(letters)) != len(letters):
        raise ReductionParseError(f"duplicate letter in {token!r}", lineno)
    return letters


def _parse_internals(token: str, n: int, lineno: int) -> Tuple[int, ...]:
    if token == "-":
        return ()
    try:
        ids = tuple(int(t) for t in token.split(","))
    except ValueError:
        raise ReductionParseError(f"bad internal-vertex list {token!r}", lineno) from None
    for i in ids:
        if not 1 <= i <= n:
            raise ReductionParseError(f"internal vertex {i} out of range 1..{n}", lineno)
    if len(set(ids)) != len(ids):
        raise ReductionParseError(f"duplicate internal vertex in {token!r}", lineno)
    return ids


def _parse_block(
    lines: Iterator[Tuple[int, str]], first_block: bool, first: Optional[ConfigurationBlock]
) -> ConfigurationBlock:
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ReductionParseError("missing block header", 0) from None
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ReductionParseError(f"expected 'm n' header, got {header!r}", lineno)
    m, n = int(parts[0]), int(parts[1])
    if m <= 0 or n <= 0:
        raise ReductionParseError("m and n must be positive", lineno)
    faces = []
    for _ in range(m):
        try:
            lineno, text = next(lines)
        except StopIteration:
            raise ReductionParseError(
                f"block declares {m} faces but input ended after {len(faces)}", lineno
            ) from None
        parts = text.split()
        if len(parts) == 2:
            parts.append("-")
        if len(parts) != 3:
            raise ReductionParseError(f"expected 'marker letters internals'", lineno)
        marker, letter_tok, internal_tok = parts
        letters = _parse_letters(letter_tok, lineno)
        internals = _parse_internals(internal_tok, n, lineno)
        if marker == "0":
            faces.append(FaceSpec(BOUNDED, letters, internals))
        elif "-" in marker:
            if not first_block:
                raise ReductionParseError(
                    "second-block unbounded faces must reference the first block", lineno
                )
            a1s, _, a2s = marker.partition("-")
            if not (a1s.isdigit() and a2s.isdigit()):
                raise ReductionParseError(f"bad size range {marker!r}", lineno)
            a1, a2 = int(a1s), int(a2s)
            if a1 > a2:
                raise ReductionParseError(f"empty size range {marker!r}", lineno)
            faces.append(FaceSpec(UNBOUNDED_NEW, letters, internals, a1=a1, a2=a2))
        elif marker.isdigit():
            if first_block:
                raise ReductionParseError(
                    "first-block unbounded faces need an a1-a2 range", lineno
                )
            ref = int(marker)
            if not 1 <= ref <= first.m:
                raise ReductionParseError(f"dangling face reference {ref}", lineno)
            if first.faces[ref - 1].kind != UNBOUNDED_NEW:
                raise ReductionParseError(
                    f"face reference {ref} addresses a bounded face", lineno
                )
            faces.append(FaceSpec(UNBOUNDED_ORIG, letters, internals, ref_index=ref))
        else:
            raise ReductionParseError(f"bad face marker {marker!r}", lineno)
    return ConfigurationBlock(m, n, tuple(faces))


def parse_reduction_file(text: str) -> ReductionPair:
    numbered = [
        (i + 1, ln.strip())
        for i, ln in enumerate(text.splitlines())
        if ln.strip() and not ln.strip().startswith("#")
    ]
    lines = iter(numbered)
    reduced = _parse_block(lines, True, None)
    original = _parse_block(lines, False, reduced)
    leftover = next(lines, None)
    if leftover is not None:
        raise ReductionParseError(f"unexpected trailing content {leftover[1]!r}", leftover[0])
    return ReductionPair(reduced, original)


def format_reduction(pair: ReductionPair) -> str:
    def fmt_block(block: ConfigurationBlock) -> List[str]:
        out = [f"{block.m} {block.n}"]
        for f in block.faces:
            if f.kind == BOUNDED:
                marker = "0"
            elif f.kind == UNBOUNDED_NEW:
                marker = f"{f.a1}-{f.a2}"
            else:
                marker = str(f.ref_index)
            letters = "".join(f.letters) or "-"
            internals = ",".join(str(i) for i in f.internals) or "-"
            out.append(f"{marker} {letters} {internals}")
        return out

    return "\n".join(fmt_block(pair.reduced) + fmt_block(pair.original)) + "\n"


def validate(pair: ReductionPair, delta: int) -> List[str]:
    """Value-level diagnostics; empty list means the pair is well-formed for
    the given maximum face size.  Diagnostics are values, never raises."""
    diags: List[str] = []
    if pair.original.n < pair.reduced.n:
        diags.append(
            "original block has fewer internal vertices than the reduced block"
        )
    if pair.reduced.letter_set() != pair.original.letter_set():
        diags.append("letter sets of the two blocks differ")
    for label, block in (("reduced", pair.reduced), ("original", pair.original)):
        if block.m != len(block.faces):
            diags.append(f"{label} block: face count disagrees with declared m")
        covered = {i for f in block.faces for i in f.internals}
        for i in range(1, block.n + 1):
            if i not in covered:
                diags.append(f"{label} block: unconstrained internal vertex {i}")
        for idx, f in enumerate(block.faces, start=1):
            for i in f.internals:
                if not 1 <= i <= block.n:
                    diags.append(
                        f"{label} block: face {idx} lists internal {i} out of range"
                    )
            if f.kind == UNBOUNDED_ORIG:
                if label == "reduced":
                    diags.append(f"reduced block: face {idx} uses a face reference")
                    continue
                if not 1 <= f.ref_index <= pair.reduced.m or (
                    pair.reduced.faces[f.ref_index - 1].kind != UNBOUNDED_NEW
                ):
                    diags.append(f"original block: face {idx} dangling face reference")
                    continue
            if f.kind != BOUNDED:
                try:
                    hidden_count_range(f, delta, pair.reduced)
                except ValueError as exc:
                    diags.append(f"{label} block: face {idx}: {exc}")
    return diags


def unbounded_pairs(pair: ReductionPair) -> List[Tuple[int, FaceSpec, FaceSpec]]:
    """Corresponding unbounded faces as (first-block index, new, original)."""
    by_ref = {}
    for f in pair.original.faces:
        if f.kind == UNBOUNDED_ORIG:
            by_ref[f.ref_index] = f
    out = []
    for idx, f in enumerate(pair.reduced.faces, start=1):
        if f.kind == UNBOUNDED_NEW:
            if idx not in by_ref:
                raise ValueError(f"first-block face {idx} has no counterpart")
            out.append((idx, f, by_ref[idx]))
    return out
