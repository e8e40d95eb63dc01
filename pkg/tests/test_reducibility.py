import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cycolor.configlang import (
    BOUNDED,
    ConfigurationBlock,
    FaceSpec,
    ReductionPair,
)
from cycolor.fixtures import eight0_pair
from cycolor.reducibility import (
    NOT_REDUCED,
    REDUCIBLE,
    BoundaryScenario,
    apply_permutation,
    check_reducible,
    enumerate_scenarios,
    extends,
    face_color_footprint,
    naive_extends,
    scenario_branches,
)

BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52}


def letter_pair(nletters: int) -> ReductionPair:
    letters = tuple("abcdefg"[:nletters])
    block = ConfigurationBlock(1, 1, (FaceSpec(BOUNDED, letters, (1,)),))
    return ReductionPair(block, block)


def weakened_eight0() -> ReductionPair:
    pair = eight0_pair()
    red = pair.reduced
    return ReductionPair(
        ConfigurationBlock(red.m - 1, red.n, red.faces[:4]), pair.original
    )


@pytest.mark.parametrize("nletters", [1, 2, 3, 4])
def test_letter_only_scenario_counts_are_bell_numbers(nletters):
    pair = letter_pair(nletters)
    count = sum(1 for _ in enumerate_scenarios(pair, 16))
    assert count == BELL[nletters]


def test_letter_scenarios_capped_by_palette():
    # Palette smaller than the letter count caps the partition block count.
    pair = letter_pair(4)
    count = sum(1 for _ in enumerate_scenarios(pair, 0))  # palette of 2
    # partitions of 4 letters into at most 2 blocks
    assert count == 8


def eight0_pair_identity() -> ReductionPair:
    """Original block structurally identical to the reduced one, expressed
    through face references as the file format requires."""
    from cycolor.configlang import UNBOUNDED_NEW, UNBOUNDED_ORIG

    pair = eight0_pair()
    mirrored = []
    for idx, f in enumerate(pair.reduced.faces, start=1):
        if f.kind == UNBOUNDED_NEW:
            mirrored.append(FaceSpec(UNBOUNDED_ORIG, f.letters, f.internals, ref_index=idx))
        else:
            mirrored.append(f)
    return ReductionPair(
        pair.reduced,
        ConfigurationBlock(pair.reduced.m, pair.reduced.n, tuple(mirrored)),
    )


def test_identity_pair_reducible():
    v = check_reducible(eight0_pair_identity(), 9)
    assert v.status == REDUCIBLE
    assert check_reducible(letter_pair(3), 16).status == REDUCIBLE


def test_eight0_small_palette_regression():
    # Frozen after a verified run; the count equals an independent
    # cell-structure DP computation of the orbit count.
    v = check_reducible(eight0_pair(), 7)
    assert v.status == REDUCIBLE
    assert v.scenarios == 17309
    assert v.extensions_tested == 31593


def test_kernel_and_python_paths_agree():
    pair = eight0_pair()
    fast = check_reducible(pair, 7, use_kernel=True)
    slow = check_reducible(pair, 7, use_kernel=False)
    assert (fast.status, fast.scenarios, fast.extensions_tested) == (
        slow.status,
        slow.scenarios,
        slow.extensions_tested,
    )


def test_enumeration_matches_check_statistics():
    pair = eight0_pair()
    count = sum(1 for _ in enumerate_scenarios(pair, 8))
    v = check_reducible(pair, 8)
    assert count == v.scenarios == 199735


def test_scenarios_unique():
    pair = eight0_pair()
    seen = set()
    for s in enumerate_scenarios(pair, 7):
        key = (
            tuple(sorted(s.letter_colors.items())),
            tuple((i, tuple(sorted(v))) for i, v in sorted(s.hidden_sets.items())),
        )
        assert key not in seen
        seen.add(key)


def test_scenario_validity_invariants():
    pair = eight0_pair()
    space_letters = {"a", "b"}
    for i, s in enumerate(enumerate_scenarios(pair, 7)):
        if i >= 500:
            break
        assert set(s.letter_colors) == space_letters
        for idx, hidden in s.hidden_sets.items():
            face = pair.reduced.faces[idx - 1]
            for c in face.letters:
                assert s.letter_colors[c] not in hidden
            assert all(1 <= col <= s.palette for col in hidden)


def test_extends_permutation_invariance():
    pair = eight0_pair()
    rng = random.Random(7)
    scenarios = []
    for i, s in enumerate(enumerate_scenarios(pair, 7)):
        if i % 997 == 0:
            scenarios.append(s)
        if len(scenarios) >= 12:
            break
    for s in scenarios:
        perm_list = list(range(1, s.palette + 1))
        rng.shuffle(perm_list)
        perm = {i + 1: perm_list[i] for i in range(s.palette)}
        t = apply_permutation(s, perm)
        for block in (pair.reduced, pair.original):
            assert extends(block, s) == extends(block, t)


def test_extends_agrees_with_naive_oracle():
    pair = eight0_pair()
    rng = random.Random(11)
    picked = []
    for i, s in enumerate(enumerate_scenarios(pair, 7)):
        if rng.random() < 0.002:
            picked.append(s)
        if len(picked) >= 15:
            break
    assert picked
    for s in picked:
        for block in (pair.reduced, pair.original):
            assert extends(block, s) == naive_extends(block, s)


def test_mutation_yields_witness_that_replays():
    mut = weakened_eight0()
    v = check_reducible(mut, 7)
    assert v.status == NOT_REDUCED
    w = v.witness
    assert w is not None
    assert extends(mut.reduced, w) is True
    assert extends(mut.original, w) is False
    assert naive_extends(mut.reduced, w) is True
    assert naive_extends(mut.original, w) is False


def test_weakening_original_preserves_reducibility():
    # Dropping a face from the original block only makes extension easier.
    pair = eight0_pair()
    orig = pair.original
    weak_orig = ConfigurationBlock(orig.m - 1, orig.n, orig.faces[:4])
    v = check_reducible(ReductionPair(pair.reduced, weak_orig), 7)
    assert v.status == REDUCIBLE


def test_face_color_footprint_examples():
    pair = eight0_pair()
    scenario = BoundaryScenario(
        {"a": 1, "b": 2},
        {1: frozenset(), 2: frozenset({9, 10}), 3: frozenset(), 4: frozenset()},
        16,
    )
    # bounded face five of the reduced block: letters a, b only
    assert face_color_footprint(pair.reduced, scenario, 5) == {1, 2}
    # unbounded face one with no hidden colors: letter a only
    assert face_color_footprint(pair.reduced, scenario, 1) == {1}
    # face two listing internal 5 colored 7 plus hidden {9, 10}
    assert face_color_footprint(pair.reduced, scenario, 2, partial={5: 7}) == {7, 9, 10}


def test_checkpoint_resume(tmp_path):
    pair = eight0_pair()
    path = str(tmp_path / "state.json")

    class Stop(Exception):
        pass

    def prog(done, total):
        if done >= 5:
            raise Stop()

    with pytest.raises(Stop):
        check_reducible(pair, 7, checkpoint_path=path, progress=prog)
    with open(path) as fh:
        saved = json.load(fh)
    assert 0 < len(saved["branches"]) < saved["total_branches"]
    v = check_reducible(pair, 7, checkpoint_path=path)
    assert v.status == REDUCIBLE
    assert v.scenarios == 17309


def test_worker_partitioning_deterministic():
    pair = eight0_pair()
    seq = check_reducible(pair, 7, workers=1)
    par = check_reducible(pair, 7, workers=2)
    assert (seq.status, seq.scenarios, seq.extensions_tested) == (
        par.status,
        par.scenarios,
        par.extensions_tested,
    )


def test_branches_cover_k_ranges():
    pair = eight0_pair()
    branches = scenario_branches(pair, 7)
    # two letter partitions x k-range products (3*2*3*3)
    assert len(branches) == 2 * 54


def test_scenario_json_roundtrip():
    s = BoundaryScenario({"a": 1, "b": 3}, {1: frozenset({2, 5}), 2: frozenset()}, 16)
    assert BoundaryScenario.from_json(s.to_json()) == s


def test_invalid_pair_rejected():
    pair = eight0_pair()
    with pytest.raises(ValueError, match="invalid pair"):
        check_reducible(pair, 5)  # hidden ranges go negative
