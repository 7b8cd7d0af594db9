import pytest

from laddergroups.ladders import (
    LadderShapeError,
    LadderSystem,
    LadderSystemError,
    PrefixExhaustedError,
    companion_same_range,
    first_block_reaching,
    is_tree_like,
    make_block_special,
    make_simple_special,
    omega_range,
    prefix_special,
    validate_special,
)
from laddergroups.ordinals import nat, omega_power, parse_ordinal, plus_omega

W2 = omega_power(2)
W2_2 = omega_power(2, 2)
W3 = omega_power(3)


def test_simple_ladder_on_w2_validates():
    eta = make_simple_special(W2, 8)
    assert [str(e) for e in eta.entries[:3]] == ["w*1+1", "w*2+1", "w*3+1"]
    rep = validate_special(eta)
    assert rep.ok
    assert not rep.errors
    # index-zero breakpoint is tolerated with a warning; k_n = n needs it
    assert any("k_0 = 0" in w for w in rep.warnings)


def test_simple_ladder_on_shifted_delta():
    eta = make_simple_special(W2_2, 8)
    assert str(eta.entries[0]) == "w^2*1+w*1+1"
    assert validate_special(eta).ok


def test_simple_ladder_on_w3():
    eta = make_simple_special(W3, 4)
    assert [str(e) for e in eta.entries] == [
        "w^2*1+1", "w^2*2+1", "w^2*3+1", "w^2*4+1"
    ]
    assert validate_special(eta).ok


def test_make_simple_rejects_non_limit():
    with pytest.raises(LadderShapeError):
        make_simple_special(W2 + nat(5), 4)


def test_finite_entry_ladder_fails_separation():
    sl = prefix_special(W2, tuple(nat(n + 1) for n in range(6)))
    rep = validate_special(sl)
    assert not rep.ok
    assert any("separation condition (b)" in e for e in rep.errors)
    assert any("cofinality not certified" in w for w in rep.warnings)


def test_system_rejects_undivisible_delta():
    delta = W2 + omega_power(1)
    sl = prefix_special(delta, tuple(omega_power(1, n + 1) + nat(1) for n in range(4)))
    with pytest.raises(LadderSystemError, match="not divisible"):
        LadderSystem.build(parse_ordinal("w^2*2"), {delta: sl})


def test_omega_range_simple():
    eta = make_simple_special(W2, 6)
    rng = omega_range(eta)
    assert [str(b) for b in rng.blocks] == [f"w*{n + 2}" for n in range(6)]


def test_omega_range_paired_blocks():
    eta = make_block_special(W2, 6)
    assert [str(e) for e in eta.entries[:4]] == ["w*1+1", "w*1+2", "w*2+1", "w*2+2"]
    rng = omega_range(eta)
    assert [str(b) for b in rng.blocks] == [f"w*{n + 2}" for n in range(6)]
    per_index = rng.per_index()
    for n in range(6):
        assert per_index[2 * n] == per_index[2 * n + 1] == rng.blocks[n]


def test_omega_range_single_block():
    sl = prefix_special(W2, (plus_omega(nat(0)) + nat(1),), (0, 1))
    assert len(omega_range(sl).blocks) == 1


def test_companion_paired():
    eta = make_simple_special(W2, 6)
    nu = companion_same_range(eta, (2,) * 6)
    assert nu.breakpoints == (0, 2, 4, 6, 8, 10, 12)
    for n in range(6):
        assert str(nu.entries[2 * n]) == f"w*{n + 1}+1"
        assert str(nu.entries[2 * n + 1]) == f"w*{n + 1}+2"
    assert omega_range(nu).blocks == omega_range(eta).blocks
    assert validate_special(nu).ok


def test_companion_identity_shape():
    eta = make_simple_special(W2, 6)
    nu = companion_same_range(eta, (1,) * 6)
    assert nu.entries == eta.entries


def test_companion_mixed_sizes():
    eta = make_simple_special(W2, 3)
    nu = companion_same_range(eta, (1, 2, 3))
    assert nu.breakpoints == (0, 1, 3, 6)
    assert omega_range(nu).blocks == omega_range(eta).blocks
    assert validate_special(nu).ok


def test_first_block_reaching():
    eta = make_simple_special(W2_2, 8)
    assert first_block_reaching(eta, W2) == 0
    assert first_block_reaching(eta, W2 + omega_power(1, 3)) == 2
    assert first_block_reaching(eta, nat(0)) == 0


def test_first_block_reaching_uses_rule_beyond_prefix():
    eta = make_simple_special(W2, 2)
    assert first_block_reaching(eta, parse_ordinal("w*40")) == 39


def test_first_block_reaching_prefix_exhaustion():
    sl = prefix_special(W2, (parse_ordinal("w*1+1"), parse_ordinal("w*2+1")))
    with pytest.raises(PrefixExhaustedError):
        first_block_reaching(sl, parse_ordinal("w*90"))


def test_tree_like_disjoint_and_single():
    alpha = parse_ordinal("w^2*2+1")
    sys_one = LadderSystem.build(alpha, {W2: make_simple_special(W2, 6)})
    assert is_tree_like(sys_one).ok
    sys_two = LadderSystem.build(
        alpha, {W2: make_simple_special(W2, 6), W2_2: make_simple_special(W2_2, 6)}
    )
    assert is_tree_like(sys_two).ok


def test_tree_like_violation_found():
    alpha = parse_ordinal("w^2*2+1")
    l1 = make_simple_special(W2, 5)
    # shares l1's values but at shifted positions
    entries = (parse_ordinal("w*1+2"),) + l1.entries[1:4] + (parse_ordinal("w^2*1+w*1+1"),)
    l2 = prefix_special(W2_2, entries)
    sys = LadderSystem.build(alpha, {W2: l1, W2_2: l2})
    rep = is_tree_like(sys)
    assert not rep.ok
    assert rep.witness[4] == "prefix-disagreement"


def test_tree_like_monotone_under_prefix_restriction():
    alpha = parse_ordinal("w^2*2+1")
    sys = LadderSystem.build(
        alpha,
        {W2: make_block_special(W2, 6), W2_2: make_block_special(W2_2, 6)},
    )
    assert is_tree_like(sys).ok
    for blocks in (1, 2, 4):
        assert is_tree_like(sys.restrict_blocks(blocks)).ok


def test_rule_backed_ladders_approach_delta():
    # every threshold below delta is eventually cleared within the rule
    for delta, blocks in ((W2, 6), (W2_2, 6), (W3, 4)):
        eta = make_simple_special(delta, blocks)
        rep = validate_special(eta)
        assert rep.ok
        assert all(e < delta for e in eta.entries)
        for threshold in (nat(5), delta.limit_part):
            if threshold < delta:
                n = first_block_reaching(eta, threshold)
                assert not eta.deepen(n + 1).head(n) < threshold


def test_block_condition_constant_on_blocks():
    for sl in (make_block_special(W2, 5), make_block_special(W2_2, 4, ((1, 3, 7),))):
        rng = omega_range(sl)
        for n in range(sl.block_count):
            vals = {plus_omega(v) for v in sl.block_values(n)}
            assert vals == {rng.blocks[n]}


def test_omega_range_strictly_increasing_and_bounded():
    for delta, blocks in ((W2, 8), (W2_2, 8), (W3, 5)):
        rng = omega_range(make_simple_special(delta, blocks))
        for a, b in zip(rng.blocks, rng.blocks[1:]):
            assert a < b
        assert all(v <= delta for v in rng.blocks)
