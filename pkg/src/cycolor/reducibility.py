"""Reducibility checking for two-block configurations.

A boundary scenario assigns colors to the non-internal vertices: one color
per letter and a set of colors for the hidden vertices of each unbounded
face (hidden vertices are shared between corresponding faces of the two
blocks, so they are chosen once, keyed by the first-block face index).

``check_reducible`` verifies that every scenario whose restriction extends
to the internal vertices of the reduced block also extends in the original
block.  Scenarios are enumerated up to color permutation, exactly one
representative per orbit, by refining color classes: colors that have been
used identically so far are interchangeable, so a face only chooses how
many colors to reuse from each class plus how many fresh colors to open.

Extension checks are memoized by the color-structure of the per-face
footprints, which is invariant under palette permutation; this collapses
the bulk of the work since many scenario orbits induce the same footprint
structure.
"""

from __future__ import annotations

import json
import hashlib
import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .configlang import (
    BOUNDED,
    UNBOUNDED_NEW,
    UNBOUNDED_ORIG,
    ConfigurationBlock,
    ReductionPair,
    format_reduction,
    hidden_count_range,
    unbounded_pairs,
    validate,
)

REDUCIBLE = "REDUCIBLE"
NOT_REDUCED = "NOT_REDUCED"


@dataclass(frozen=True)
class BoundaryScenario:
    """Colors on the non-internal vertices, palette 1..delta+2."""

    letter_colors: Dict[str, int]
    hidden_sets: Dict[int, FrozenSet[int]]  # keyed by first-block face index
    delta: int

    @property
    def palette(self) -> int:
        return self.delta + 2

    def colors_used(self) -> FrozenSet[int]:
        used = set(self.letter_colors.values())
        for s in self.hidden_sets.values():
            used |= s
        return frozenset(used)

    def to_json(self) -> dict:
        return {
            "letters": dict(sorted(self.letter_colors.items())),
            "hidden": {str(k): sorted(v) for k, v in sorted(self.hidden_sets.items())},
            "delta": self.delta,
        }

    @staticmethod
    def from_json(obj: dict) -> "BoundaryScenario":
        return BoundaryScenario(
            {k: int(v) for k, v in obj["letters"].items()},
            {int(k): frozenset(v) for k, v in obj["hidden"].items()},
            int(obj["delta"]),
        )


@dataclass(frozen=True)
class Verdict:
    status: str
    delta: int
    scenarios: int
    extensions_tested: int
    witness: Optional[BoundaryScenario] = None

    @property
    def reducible(self) -> bool:
        return self.status == REDUCIBLE


def pair_fingerprint(pair: ReductionPair) -> str:
    return hashlib.sha256(format_reduction(pair).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Block preprocessing


@dataclass(frozen=True)
class _PreparedBlock:
    """Faces flattened for fast footprint/extension computation."""

    face_letters: Tuple[Tuple[str, ...], ...]
    face_hidden_key: Tuple[Optional[int], ...]  # first-block index or None
    face_internals: Tuple[Tuple[int, ...], ...]
    vertex_faces: Tuple[Tuple[int, ...], ...]  # internals are 0-based here
    n_internal: int


def _prepare(block: ConfigurationBlock) -> _PreparedBlock:
    face_letters = []
    face_hidden = []
    face_internals = []
    for idx, f in enumerate(block.faces, start=1):
        face_letters.append(f.letters)
        if f.kind == UNBOUNDED_NEW:
            face_hidden.append(idx)
        elif f.kind == UNBOUNDED_ORIG:
            face_hidden.append(f.ref_index)
        else:
            face_hidden.append(None)
        face_internals.append(f.internals)
    vertex_faces: List[List[int]] = [[] for _ in range(block.n)]
    for i, internals in enumerate(face_internals):
        for v in internals:
            vertex_faces[v - 1].append(i)
    return _PreparedBlock(
        tuple(face_letters),
        tuple(face_hidden),
        tuple(face_internals),
        tuple(tuple(fs) for fs in vertex_faces),
        block.n,
    )


def _footprints(prep: _PreparedBlock, scenario: BoundaryScenario) -> List[int]:
    """Per-face bitmask of non-internal colors (bit c-1 for color c)."""
    masks = []
    for letters, hidden_key in zip(prep.face_letters, prep.face_hidden_key):
        mask = 0
        for c in letters:
            mask |= 1 << (scenario.letter_colors[c] - 1)
        if hidden_key is not None:
            for col in scenario.hidden_sets[hidden_key]:
                mask |= 1 << (col - 1)
        masks.append(mask)
    return masks


def _slot_counts(prep: _PreparedBlock, scenario: BoundaryScenario) -> List[int]:
    out = []
    for letters, hidden_key in zip(prep.face_letters, prep.face_hidden_key):
        k = len(scenario.hidden_sets[hidden_key]) if hidden_key is not None else 0
        out.append(len(letters) + k)
    return out


def footprint_key(prep: _PreparedBlock, scenario: BoundaryScenario) -> Tuple:
    """Canonical color-structure of the footprints; permutation invariant."""
    masks = _footprints(prep, scenario)
    union = 0
    for m in masks:
        union |= m
    vectors: Dict[int, int] = {}
    c = union
    while c:
        bit = c & (-c)
        c ^= bit
        vec = 0
        for i, m in enumerate(masks):
            if m & bit:
                vec |= 1 << i
        vectors[vec] = vectors.get(vec, 0) + 1
    return (
        tuple(sorted(vectors.items())),
        tuple(_slot_counts(prep, scenario)),
        scenario.palette,
    )


def face_color_footprint(
    block: ConfigurationBlock,
    scenario: BoundaryScenario,
    face_index: int,
    partial: Optional[Dict[int, int]] = None,
) -> FrozenSet[int]:
    """Colors already present on one face: letters, hidden vertices and any
    internal vertices colored by ``partial`` (1-based internal ids)."""
    prep = _prepare(block)
    i = face_index - 1
    mask = _footprints(prep, scenario)[i]
    colors = set()
    c = 1
    while mask:
        if mask & 1:
            colors.add(c)
        mask >>= 1
        c += 1
    if partial:
        for v in prep.face_internals[i]:
            if v in partial:
                colors.add(partial[v])
    return frozenset(colors)


def _search(prep: _PreparedBlock, face_masks: List[int], palette_mask: int) -> bool:
    """Most-constrained-vertex backtracking over the internal vertices."""
    n = prep.n_internal
    assigned = [0] * n  # color bit or 0

    def rec(remaining: List[int]) -> bool:
        if not remaining:
            return True
        best_v = -1
        best_avail = 0
        best_count = 1 << 30
        for v in remaining:
            used = 0
            for fi in prep.vertex_faces[v]:
                used |= face_masks[fi]
            avail = palette_mask & ~used
            cnt = bin(avail).count("1")
            if cnt == 0:
                return False
            if cnt < best_count:
                best_count, best_v, best_avail = cnt, v, avail
        rest = [v for v in remaining if v != best_v]
        avail = best_avail
        while avail:
            bit = avail & (-avail)
            avail ^= bit
            touched = prep.vertex_faces[best_v]
            for fi in touched:
                face_masks[fi] |= bit
            assigned[best_v] = bit
            if rec(rest):
                return True
            assigned[best_v] = 0
            for fi in touched:
                face_masks[fi] &= ~bit
        return False

    return rec(list(range(n)))


def extends(
    block: ConfigurationBlock,
    scenario: BoundaryScenario,
    _memo: Optional[Dict[Tuple, bool]] = None,
) -> bool:
    """Whether the internal vertices admit colors in 1..delta+2 making every
    face's incident colors pairwise distinct."""
    prep = _prepare(block)
    return _extends_prepared(prep, scenario, _memo)


def _extends_prepared(
    prep: _PreparedBlock,
    scenario: BoundaryScenario,
    memo: Optional[Dict[Tuple, bool]] = None,
) -> bool:
    key = footprint_key(prep, scenario) if memo is not None else None
    if memo is not None and key in memo:
        return memo[key]
    masks = _footprints(prep, scenario)
    slots = _slot_counts(prep, scenario)
    result = True
    for mask, s in zip(masks, slots):
        if bin(mask).count("1") != s:
            result = False  # two non-internal vertices of one face collide
            break
    if result:
        palette_mask = (1 << scenario.palette) - 1
        result = _search(prep, masks, palette_mask)
    if memo is not None:
        memo[key] = result
    return result


def naive_extends(block: ConfigurationBlock, scenario: BoundaryScenario) -> bool:
    """Independent oracle: enumerate internal colorings in file order with
    plain prefix feasibility checks; no ordering heuristics, no bitmasks."""
    faces = []
    for idx, f in enumerate(block.faces, start=1):
        colors = set(scenario.letter_colors[c] for c in f.letters)
        expected = len(f.letters)
        if f.kind == UNBOUNDED_NEW:
            hidden = scenario.hidden_sets[idx]
            colors |= hidden
            expected += len(hidden)
        elif f.kind == UNBOUNDED_ORIG:
            hidden = scenario.hidden_sets[f.ref_index]
            colors |= hidden
            expected += len(hidden)
        if len(colors) != expected:
            return False
        faces.append((set(f.internals), colors))
    n = block.n
    palette = range(1, scenario.palette + 1)

    def rec(v: int, chosen: Dict[int, int]) -> bool:
        if v > n:
            return True
        for c in palette:
            ok = True
            for internals, base in faces:
                if v not in internals:
                    continue
                if c in base or any(chosen[w] == c for w in internals if w in chosen):
                    ok = False
                    break
            if ok:
                chosen[v] = c
                if rec(v + 1, chosen):
                    return True
                del chosen[v]
        return False

    return rec(1, {})


# ---------------------------------------------------------------------------
# Scenario enumeration (one representative per color-permutation orbit)


@dataclass(frozen=True)
class _ScenarioSpace:
    letters: Tuple[str, ...]
    # per unbounded face: (first-block index, kmin, kmax, excluded letters)
    faces: Tuple[Tuple[int, int, int, FrozenSet[str]], ...]
    delta: int

    @property
    def palette(self) -> int:
        return self.delta + 2


def _scenario_space(pair: ReductionPair, delta: int) -> _ScenarioSpace:
    letters: List[str] = []
    for f in pair.reduced.faces:
        for c in f.letters:
            if c not in letters:
                letters.append(c)
    faces = []
    for idx, new, orig in unbounded_pairs(pair):
        kmin, kmax = hidden_count_range(new, delta)
        excluded = frozenset(new.letters) | frozenset(orig.letters)
        faces.append((idx, kmin, kmax, excluded))
    return _ScenarioSpace(tuple(letters), tuple(faces), delta)


def _letter_partitions(letters: Sequence[str], palette: int) -> Iterator[List[List[str]]]:
    """Set partitions in restricted-growth order, capped by palette size."""

    def rec(i: int, blocks: List[List[str]]):
        if i == len(letters):
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(letters[i])
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < palette:
            blocks.append([letters[i]])
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def scenario_branches(pair: ReductionPair, delta: int) -> List[Tuple]:
    """Deterministic top-level work units: (letter partition, k-vector)."""
    space = _scenario_space(pair, delta)
    branches = []
    for partition in _letter_partitions(space.letters, space.palette):
        k_ranges = [range(kmin, kmax + 1) for (_, kmin, kmax, _) in space.faces]
        for kvec in itertools.product(*k_ranges):
            branches.append((tuple(tuple(b) for b in partition), kvec))
    return branches


def _enumerate_branch(
    space: _ScenarioSpace, partition: Tuple[Tuple[str, ...], ...], kvec: Tuple[int, ...]
) -> Iterator[BoundaryScenario]:
    palette = space.palette
    letter_colors: Dict[str, int] = {}
    for color0, blk in enumerate(partition):
        for c in blk:
            letter_colors[c] = color0 + 1
    used0 = len(partition)
    # classes: list of (letter_members frozenset, colors tuple)
    classes0: List[Tuple[FrozenSet[str], Tuple[int, ...]]] = [
        (frozenset(blk), (i + 1,)) for i, blk in enumerate(partition)
    ]
    hidden_acc: List[FrozenSet[int]] = []

    def rec(fi: int, classes, used: int) -> Iterator[BoundaryScenario]:
        if fi == len(space.faces):
            yield BoundaryScenario(
                dict(letter_colors),
                {space.faces[i][0]: hidden_acc[i] for i in range(len(hidden_acc))},
                space.delta,
            )
            return
        face_idx, _, _, excluded = space.faces[fi]
        k = kvec[fi]
        eligible = [
            (ci, cls)
            for ci, cls in enumerate(classes)
            if not (cls[0] & excluded)
        ]
        caps = [len(cls[1]) for _, cls in eligible]
        chosen: List[int] = []

        def walk(pos: int, left: int):
            if pos == len(eligible):
                fresh = left
                if used + fresh > palette:
                    return
                taken_colors: List[int] = []
                new_classes = []
                consumed = {}
                for (ci, cls), t in zip(eligible, chosen):
                    consumed[ci] = t
                for ci, cls in enumerate(classes):
                    t = consumed.get(ci, 0)
                    letters_of, colors = cls
                    if t:
                        take, keep = colors[:t], colors[t:]
                        taken_colors.extend(take)
                        new_classes.append((letters_of, take, True))
                        if keep:
                            new_classes.append((letters_of, keep, False))
                    else:
                        new_classes.append((letters_of, colors, False))
                fresh_colors = tuple(range(used + 1, used + 1 + fresh))
                taken_colors.extend(fresh_colors)
                if fresh:
                    new_classes.append((frozenset(), fresh_colors, True))
                hidden_acc.append(frozenset(taken_colors))
                next_classes = [(lets, cols) for (lets, cols, _) in new_classes]
                yield from rec(fi + 1, next_classes, used + fresh)
                hidden_acc.pop()
                return
            for t in range(0, min(caps[pos], left) + 1):
                chosen.append(t)
                yield from walk(pos + 1, left - t)
                chosen.pop()

        yield from walk(0, k)

    yield from rec(0, classes0, used0)


def enumerate_scenarios(pair: ReductionPair, delta: int) -> Iterator[BoundaryScenario]:
    """Exactly one representative per orbit of the color-permutation group,
    in a fixed canonical order: colors are numbered by first use along
    (letters in file order, then unbounded faces in file order)."""
    diags = validate(pair, delta)
    if diags:
        raise ValueError("invalid pair: " + "; ".join(diags))
    space = _scenario_space(pair, delta)
    for partition, kvec in scenario_branches(pair, delta):
        yield from _enumerate_branch(space, partition, kvec)


def apply_permutation(scenario: BoundaryScenario, perm: Dict[int, int]) -> BoundaryScenario:
    return BoundaryScenario(
        {c: perm[v] for c, v in scenario.letter_colors.items()},
        {i: frozenset(perm[v] for v in s) for i, s in scenario.hidden_sets.items()},
        scenario.delta,
    )


# ---------------------------------------------------------------------------
# Optimized branch runner used by check_reducible.
#
# Within one branch the letter colors are fixed, so per-face letter masks and
# letter-collision flags are branch constants; the DFS then only juggles the
# hidden-color class masks.  Scenario objects are materialized solely for
# witnesses.


@dataclass(frozen=True)
class _BlockSpec:
    base_letter_idx: Tuple[Tuple[int, ...], ...]  # per face: letter indices
    hidden_pos: Tuple[int, ...]  # per face: position in hidden list, or -1
    vertex_faces: Tuple[Tuple[int, ...], ...]
    n_internal: int
    n_faces: int


def _block_spec(block: ConfigurationBlock, letters: Sequence[str], hidden_order: Sequence[int]) -> _BlockSpec:
    lidx = {c: i for i, c in enumerate(letters)}
    hpos = {idx: p for p, idx in enumerate(hidden_order)}
    base = []
    hid = []
    for idx, f in enumerate(block.faces, start=1):
        base.append(tuple(lidx[c] for c in f.letters))
        if f.kind == UNBOUNDED_NEW:
            hid.append(hpos[idx])
        elif f.kind == UNBOUNDED_ORIG:
            hid.append(hpos[f.ref_index])
        else:
            hid.append(-1)
    vertex_faces: List[List[int]] = [[] for _ in range(block.n)]
    for i, f in enumerate(block.faces):
        for v in f.internals:
            vertex_faces[v - 1].append(i)
    return _BlockSpec(
        tuple(base), tuple(hid), tuple(tuple(x) for x in vertex_faces), block.n, len(block.faces)
    )


def _try_extend(spec: _BlockSpec, masks: List[int], palette_mask: int) -> bool:
    vertex_faces = spec.vertex_faces
    remaining = list(range(spec.n_internal))

    def rec(rem: List[int]) -> bool:
        if not rem:
            return True
        best_v = -1
        best_avail = 0
        best_count = 99
        for v in rem:
            used = 0
            for fi in vertex_faces[v]:
                used |= masks[fi]
            avail = palette_mask & ~used
            cnt = avail.bit_count()
            if cnt == 0:
                return False
            if cnt < best_count:
                best_count, best_v, best_avail = cnt, v, avail
                if cnt == 1:
                    break
        rem2 = [v for v in rem if v != best_v]
        faces_v = vertex_faces[best_v]
        avail = best_avail
        while avail:
            bit = avail & (-avail)
            avail ^= bit
            for fi in faces_v:
                masks[fi] |= bit
            if rec(rem2):
                for fi in faces_v:
                    masks[fi] &= ~bit
                return True
            for fi in faces_v:
                masks[fi] &= ~bit
        return False

    return rec(remaining)


def _low_bits(mask: int, t: int) -> int:
    out = 0
    for _ in range(t):
        b = mask & (-mask)
        out |= b
        mask ^= b
    return out


def _kernel_branch(
    space: _ScenarioSpace,
    spec_red: _BlockSpec,
    spec_orig: _BlockSpec,
    partition: Tuple[Tuple[str, ...], ...],
    kvec: Tuple[int, ...],
    stop_at_witness: bool,
) -> Optional[Tuple[int, int, int, Optional[BoundaryScenario]]]:
    """JIT-compiled mirror of _fast_branch; None when the kernel cannot run."""
    from . import _kernel

    H = len(space.faces)
    if not _kernel.HAVE_NUMBA or H + 1 > _kernel.MAX_DEPTH:
        return None
    if (1 << H) * (len(space.letters) + 1) > _kernel.MAX_CLASSES:
        return None
    import numpy as np

    letters = space.letters
    lidx = {c: i for i, c in enumerate(letters)}
    color_of_letter = {}
    for color0, blk in enumerate(partition):
        for c in blk:
            color_of_letter[lidx[c]] = color0 + 1

    def face_consts(spec: _BlockSpec):
        bases = np.zeros(spec.n_faces, dtype=np.int64)
        collision = 0
        for i, li in enumerate(spec.base_letter_idx):
            m = 0
            for j in li:
                m |= 1 << (color_of_letter[j] - 1)
            if m.bit_count() != len(li):
                collision = 1
            bases[i] = m
        return bases, collision

    def flatten(spec: _BlockSpec):
        off = np.zeros(spec.n_internal + 1, dtype=np.int64)
        flat = []
        for v in range(spec.n_internal):
            flat.extend(spec.vertex_faces[v])
            off[v + 1] = len(flat)
        return off, np.array(flat if flat else [0], dtype=np.int64)

    bases_r, coll_r = face_consts(spec_red)
    bases_o, coll_o = face_consts(spec_orig)
    off_r, vf_r = flatten(spec_red)
    off_o, vf_o = flatten(spec_orig)
    excl = np.zeros(max(H, 1), dtype=np.int64)
    for p, (_, _, _, excluded) in enumerate(space.faces):
        m = 0
        for c in excluded:
            m |= 1 << lidx[c]
        excl[p] = m
    kv = np.array(list(kvec) if kvec else [0], dtype=np.int64)
    lb0 = np.zeros(len(partition), dtype=np.int64)
    cm0 = np.zeros(len(partition), dtype=np.int64)
    for bi, blk in enumerate(partition):
        m = 0
        for c in blk:
            m |= 1 << lidx[c]
        lb0[bi] = m
        cm0[bi] = 1 << bi
    hpos_r = np.array(spec_red.hidden_pos, dtype=np.int64)
    hpos_o = np.array(spec_orig.hidden_pos, dtype=np.int64)
    out = np.zeros(4, dtype=np.int64)
    out_hidden = np.zeros(max(H, 1), dtype=np.int64)
    _kernel.run_branch(
        H,
        kv,
        excl,
        space.palette,
        lb0,
        cm0,
        len(partition),
        bases_r,
        hpos_r,
        spec_red.n_internal,
        off_r,
        vf_r,
        coll_r,
        bases_o,
        hpos_o,
        spec_orig.n_internal,
        off_o,
        vf_o,
        coll_o,
        1 if stop_at_witness else 0,
        out,
        out_hidden,
    )
    witness = None
    if out[3]:
        letter_colors = {letters[i]: color_of_letter[i] for i in range(len(letters))}
        hs = {}
        for p, (face_idx, _, _, _) in enumerate(space.faces):
            colors = set()
            m = int(out_hidden[p])
            c = 1
            while m:
                if m & 1:
                    colors.add(c)
                m >>= 1
                c += 1
            hs[face_idx] = frozenset(colors)
        witness = BoundaryScenario(letter_colors, hs, space.delta)
    return int(out[0]), int(out[1]), int(out[2]), witness


def _fast_branch(
    space: _ScenarioSpace,
    spec_red: _BlockSpec,
    spec_orig: _BlockSpec,
    partition: Tuple[Tuple[str, ...], ...],
    kvec: Tuple[int, ...],
    stop_at_witness: bool,
) -> Tuple[int, int, int, Optional[BoundaryScenario]]:
    palette = space.palette
    palette_mask = (1 << palette) - 1
    letters = space.letters
    lidx = {c: i for i, c in enumerate(letters)}
    color_of_letter = {}
    for color0, blk in enumerate(partition):
        for c in blk:
            color_of_letter[lidx[c]] = color0 + 1
    nblocks = len(partition)

    def face_consts(spec: _BlockSpec):
        bases = []
        collision = False
        for li in spec.base_letter_idx:
            m = 0
            for i in li:
                m |= 1 << (color_of_letter[i] - 1)
            if m.bit_count() != len(li):
                collision = True
            bases.append(m)
        return bases, collision

    bases_red, coll_red = face_consts(spec_red)
    bases_orig, coll_orig = face_consts(spec_orig)
    hidden_red = spec_red.hidden_pos
    hidden_orig = spec_orig.hidden_pos

    excl_bits = []
    for _, _, _, excluded in space.faces:
        m = 0
        for c in excluded:
            m |= 1 << lidx[c]
        excl_bits.append(m)

    classes0 = []
    for bi, blk in enumerate(partition):
        lb = 0
        for c in blk:
            lb |= 1 << lidx[c]
        classes0.append((lb, 1 << bi))

    H = len(space.faces)
    hidden_masks = [0] * H
    scenarios = 0
    extensions = 0
    red_true = 0
    witness: Optional[BoundaryScenario] = None

    def materialize() -> BoundaryScenario:
        letter_colors = {letters[i]: color_of_letter[i] for i in range(len(letters))}
        hs = {}
        for p, (face_idx, _, _, _) in enumerate(space.faces):
            colors = set()
            m = hidden_masks[p]
            c = 1
            while m:
                if m & 1:
                    colors.add(c)
                m >>= 1
                c += 1
            hs[face_idx] = frozenset(colors)
        return BoundaryScenario(letter_colors, hs, space.delta)

    def leaf() -> bool:
        """Returns True when the DFS should stop (witness found)."""
        nonlocal scenarios, extensions, red_true, witness
        scenarios += 1
        extensions += 1
        if coll_red:
            return False
        masks = [
            bases_red[i] | (hidden_masks[hp] if hp >= 0 else 0)
            for i, hp in enumerate(hidden_red)
        ]
        if not _try_extend(spec_red, masks, palette_mask):
            return False
        red_true += 1
        extensions += 1
        if not coll_orig:
            masks = [
                bases_orig[i] | (hidden_masks[hp] if hp >= 0 else 0)
                for i, hp in enumerate(hidden_orig)
            ]
            if _try_extend(spec_orig, masks, palette_mask):
                return False
        if witness is None:
            witness = materialize()
        return stop_at_witness

    def rec(fi: int, classes: List[Tuple[int, int]], used: int) -> bool:
        if fi == H:
            return leaf()
        k = kvec[fi]
        excl = excl_bits[fi]
        eligible = [ci for ci, cls in enumerate(classes) if not (cls[0] & excl)]
        caps = [classes[ci][1].bit_count() for ci in eligible]
        ne = len(eligible)
        takes = [0] * ne

        def walk(pos: int, left: int) -> bool:
            if pos == ne:
                fresh = left
                if used + fresh > palette:
                    return False
                taken_mask = 0
                new_classes = []
                eset = {}
                for j in range(ne):
                    eset[eligible[j]] = takes[j]
                for ci, (lb, cm) in enumerate(classes):
                    t = eset.get(ci, 0)
                    if t:
                        tk = _low_bits(cm, t)
                        taken_mask |= tk
                        new_classes.append((lb, tk))
                        rest = cm ^ tk
                        if rest:
                            new_classes.append((lb, rest))
                    else:
                        new_classes.append((lb, cm))
                if fresh:
                    fm = ((1 << fresh) - 1) << used
                    taken_mask |= fm
                    new_classes.append((0, fm))
                hidden_masks[fi] = taken_mask
                stop = rec(fi + 1, new_classes, used + fresh)
                hidden_masks[fi] = 0
                return stop
            cap = caps[pos]
            if cap > left:
                cap = left
            for t in range(cap + 1):
                takes[pos] = t
                if walk(pos + 1, left - t):
                    return True
            takes[pos] = 0
            return False

        return walk(0, k)

    rec(0, classes0, nblocks)
    return scenarios, extensions, red_true, witness


# ---------------------------------------------------------------------------
# The reducibility verdict


def check_reducible(
    pair: ReductionPair,
    delta: int,
    workers: int = 1,
    checkpoint_path: Optional[str] = None,
    stop_at_witness: bool = True,
    progress: Optional[callable] = None,
    use_kernel: bool = True,
) -> Verdict:
    """Decide reducibility by canonical scenario enumeration.

    REDUCIBLE iff every scenario that extends in the reduced block also
    extends in the original block; otherwise the canonically first failing
    scenario is the witness.  With ``checkpoint_path`` branch-level progress
    persists as JSON and a re-run resumes after completed branches.  Worker
    partitioning is deterministic: verdict and statistics are independent of
    the worker count.
    """
    diags = validate(pair, delta)
    if diags:
        raise ValueError("invalid pair: " + "; ".join(diags))
    space = _scenario_space(pair, delta)
    hidden_order = [idx for idx, _, _, _ in space.faces]
    spec_red = _block_spec(pair.reduced, space.letters, hidden_order)
    spec_orig = _block_spec(pair.original, space.letters, hidden_order)
    branches = scenario_branches(pair, delta)
    fingerprint = pair_fingerprint(pair)

    done: Dict[int, dict] = {}
    if checkpoint_path:
        try:
            with open(checkpoint_path) as fh:
                saved = json.load(fh)
            if saved.get("pair") == fingerprint and saved.get("delta") == delta:
                done = {int(k): v for k, v in saved.get("branches", {}).items()}
        except (OSError, ValueError):
            done = {}

    def save() -> None:
        if not checkpoint_path:
            return
        payload = {
            "pair": fingerprint,
            "delta": delta,
            "total_branches": len(branches),
            "branches": {str(k): v for k, v in done.items()},
        }
        tmp = checkpoint_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(payload, fh)
        import os

        os.replace(tmp, checkpoint_path)

    pending = [i for i in range(len(branches)) if i not in done]
    # A branch that already produced a witness makes the ones after it moot
    # when we may stop early.
    if stop_at_witness and any(d.get("witness") for d in done.values()):
        first = min(bi for bi, d in done.items() if d.get("witness"))
        pending = [bi for bi in pending if bi < first]

    if workers > 1 and pending:
        from multiprocessing import get_context

        ctx = get_context("fork")
        args = [
            (space, spec_red, spec_orig, branches[i], i, stop_at_witness, use_kernel)
            for i in pending
        ]
        with ctx.Pool(workers) as pool:
            for bi, result in pool.imap(_branch_worker, args, chunksize=1):
                done[bi] = result
                if progress:
                    progress(len(done), len(branches))
                save()
    else:
        for bi in pending:
            partition, kvec = branches[bi]
            result = None
            if use_kernel:
                result = _kernel_branch(
                    space, spec_red, spec_orig, partition, kvec, stop_at_witness
                )
            if result is None:
                result = _fast_branch(
                    space, spec_red, spec_orig, partition, kvec, stop_at_witness
                )
            scen, ext, _red, wit = result
            done[bi] = {
                "scenarios": scen,
                "extensions": ext,
                "witness": wit.to_json() if wit else None,
            }
            if progress:
                progress(len(done), len(branches))
            save()
            if stop_at_witness and wit is not None:
                break

    scenarios = sum(d["scenarios"] for d in done.values())
    extensions = sum(d["extensions"] for d in done.values())
    witness = None
    for bi in sorted(done):
        w = done[bi].get("witness")
        if w is not None:
            witness = BoundaryScenario.from_json(w)
            break
    if witness is not None:
        return Verdict(NOT_REDUCED, delta, scenarios, extensions, witness)
    return Verdict(REDUCIBLE, delta, scenarios, extensions)


def _branch_worker(arg):
    space, spec_red, spec_orig, branch, bi, stop, use_kernel = arg
    partition, kvec = branch
    result = None
    if use_kernel:
        result = _kernel_branch(space, spec_red, spec_orig, partition, kvec, stop)
    if result is None:
        result = _fast_branch(space, spec_red, spec_orig, partition, kvec, stop)
    scen, ext, _red, wit = result
    return bi, {
        "scenarios": scen,
        "extensions": ext,
        "witness": wit.to_json() if wit else None,
    }
