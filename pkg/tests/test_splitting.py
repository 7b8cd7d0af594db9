import random

import pytest
from hypothesis import given, strategies as st

from laddergroups.equivalence import disjointify
from laddergroups.ladders import LadderSystem, make_block_special, prefix_special
from laddergroups.ordinals import omega_power, parse_ordinal
from laddergroups.presentation import ConfigError, GroupConfig, WGEN
from laddergroups.splitting import (
    Coloring,
    ExtensionError,
    ExtensionHom,
    IntegerTarget,
    MarkedBasisTarget,
    UniformizationData,
    UniformizationError,
    build_twisted,
    choose_annihilator,
    extend_hom,
    greedy_uniformize,
    induced_coloring,
    parity_obstruction,
    recover_uniformization,
    splitting_search,
    splitting_search_pair,
    zero_coloring,
)
from laddergroups.stages import build_stage

W2 = omega_power(2)
W2_2 = omega_power(2, 2)
ALPHA = parse_ordinal("w^2*2+1")


def paired_system(blocks=6, deltas=(W2,)):
    alpha = parse_ordinal("w^2+1") if deltas == (W2,) else ALPHA
    return LadderSystem.build(
        alpha, {d: make_block_special(d, blocks) for d in deltas}
    )


def shared_prefix_system(shared_blocks=3, blocks=6):
    """Two paired-block ladders agreeing on their first blocks: tree-like."""
    l1 = make_block_special(W2, blocks)
    tail = tuple(
        parse_ordinal(f"w^2*1+w*{n + 1}+{1 + (k % 2)}")
        for n in range(shared_blocks, blocks)
        for k in range(2)
    )
    entries = l1.entries[: 2 * shared_blocks] + tail
    l2 = prefix_special(W2_2, entries, tuple(range(0, 2 * blocks + 1, 2)))
    return LadderSystem.build(ALPHA, {W2: l1, W2_2: l2})


# ---------------------------------------------------------------------------
# uniformization


def test_uniformize_disjoint_tails():
    sys = paired_system(6, (W2, W2_2))
    c = zero_coloring(sys, 12)
    d = disjointify(sys)
    u = greedy_uniformize(sys, c, d)
    assert u.thresholds == {W2: 0, W2_2: 0}
    for delta, sl in sys.items():
        for n in range(12):
            assert u.psi[sl.entries[n]] == 0


def test_uniformize_empty_system():
    sys = LadderSystem.build(parse_ordinal("w^2+1"), {})
    u = greedy_uniformize(sys, Coloring({}, 2), disjointify(sys))
    assert u.psi == {} and u.thresholds == {}


def test_uniformize_shared_prefix_equal_colors():
    sys = shared_prefix_system()
    shared = {W2: (0, 1, 1, 0, 1, 0) + (0, 1) * 3, W2_2: (0, 1, 1, 0, 1, 0) + (1, 0) * 3}
    c = Coloring(shared, 2)
    d = disjointify(sys)
    u = greedy_uniformize(sys, c, d)
    assert u.thresholds[W2] == 0
    assert u.thresholds[W2_2] == 6  # first index of the first unshared block


def test_uniformize_conflict_detected():
    sys = shared_prefix_system()
    clash = {W2: (0,) * 12, W2_2: (1,) * 12}
    d = disjointify(sys)
    # force a below-threshold conflict by lowering the second threshold
    from laddergroups.equivalence import Disjointification

    d0 = Disjointification({W2: 0, W2_2: 0}, True, ())
    with pytest.raises(UniformizationError):
        greedy_uniformize(sys, Coloring(clash, 2), d0)


# ---------------------------------------------------------------------------
# extension


def test_extend_unit_phi_single_delta():
    sys = paired_system(6)
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, sys.alpha, 6)
    target = IntegerTarget()
    phi = {(W2, n): 1 for n in range(6)}
    ind = induced_coloring(sg, phi, target)
    assert ind.entries[W2][:4] == (1, 3, 1, 3)  # codes of 1 and 2
    u = greedy_uniformize(sys, ind, disjointify(sys))
    hom, rep = extend_hom(sg, phi, u, target)
    assert rep.ok and rep.relations_checked == 6
    for n in range(6):
        assert hom.on_z(W2, n) == 0


def test_extend_zero_phi_gives_zero_extension():
    sys = paired_system(5)
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, sys.alpha, 5)
    target = IntegerTarget()
    phi = {(W2, n): 0 for n in range(5)}
    u = greedy_uniformize(sys, induced_coloring(sg, phi, target), disjointify(sys))
    hom, rep = extend_hom(sg, phi, u, target)
    assert rep.ok
    assert all(v == 0 for v in hom.x_values.values())


def test_extend_random_phi_many_systems():
    rng = random.Random(2024)
    for trial in range(8):
        sys = paired_system(6, (W2, W2_2)) if trial % 2 else paired_system(6)
        cfg = GroupConfig.alternating(sys)
        sg = build_stage(cfg, sys.alpha, 6)
        target = IntegerTarget()
        phi = {(d, n): rng.randint(-20, 20) for d in sg.deltas for n in range(6)}
        u = greedy_uniformize(sys, induced_coloring(sg, phi, target), disjointify(sys))
        hom, rep = extend_hom(sg, phi, u, target)
        assert rep.ok, trial


def test_extend_shared_prefix_exercises_cross_cases():
    rng = random.Random(5)
    sys = shared_prefix_system()
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, ALPHA, 6)
    target = IntegerTarget()
    phi = {(d, n): rng.randint(-9, 9) for d in sg.deltas for n in range(6)}
    u = greedy_uniformize(sys, induced_coloring(sg, phi, target), disjointify(sys))
    assert u.thresholds[W2_2] > 0
    hom, rep = extend_hom(sg, phi, u, target)
    assert rep.ok
    cases = dict(rep.case_counts)
    assert cases["both-tail"] > 0  # backfill below the threshold hits tail values


# ---------------------------------------------------------------------------
# marked-basis target and recovery


def test_marked_target_codec_round_trip():
    target = MarkedBasisTarget()
    elems = [
        target.zero,
        target.basis(0, 0, 0),
        target.basis(3, 1, 0),
        target.scale(2, target.basis(1, 1, 1)),
        target.sub(target.basis(2, 0, 1), target.scale(3, target.basis(0, 1, 0))),
    ]
    for e in elems:
        assert target.decode(target.encode(e)) == e


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 3), st.integers(0, 3),
                          st.integers(-4, 4)), max_size=3))
def test_marked_target_codec_random(items):
    target = MarkedBasisTarget()
    e = target.zero
    for n, m, j, c in items:
        e = target.add(e, target.scale(c, target.basis(n, m, j)))
    assert target.decode(target.encode(e)) == e


def test_roundtrip_disjoint_system():
    rng = random.Random(31)
    sys = paired_system(6, (W2, W2_2))
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, ALPHA, 6)
    target = MarkedBasisTarget()
    c = Coloring({d: tuple(rng.randrange(2) for _ in range(12)) for d in sys.deltas}, 2)
    phi = {
        (d, n): target.basis(n, c.color(d, 2 * n), c.color(d, 2 * n + 1))
        for d in sg.deltas
        for n in range(6)
    }
    u = greedy_uniformize(sys, induced_coloring(sg, phi, target), disjointify(sys))
    hom, _ = extend_hom(sg, phi, u, target)
    data, rep = recover_uniformization(sg, c, hom)
    assert rep.ok
    for d in sys.deltas:
        sl = sys.ladder(d)
        for k in range(data.thresholds[d], 12):
            assert data.psi[sl.entries[k]] == c.color(d, k)


def crafted_extension(sg, cfg, c, target):
    """A tight extension: chain symbols vanish, the second block position of
    every relation carries the full image."""
    x_values = {}
    z_values = {(d, n): target.zero for d in sg.deltas for n in range(sg.depth + 1)}
    for d in sg.deltas:
        sl = cfg.system.ladder(d)
        for n in range(sg.depth):
            phi_dn = target.basis(n, c.color(d, 2 * n), c.color(d, 2 * n + 1))
            x_values.setdefault(sl.entries[2 * n], target.zero)
            x_values[sl.entries[2 * n + 1]] = phi_dn
    return ExtensionHom(target, x_values, z_values)


def test_recover_certificates_on_shared_prefix():
    sys = shared_prefix_system(shared_blocks=4, blocks=6)
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, ALPHA, 6)
    target = MarkedBasisTarget()
    # equal colors on the shared region keep the crafted extension consistent
    shared = (1, 0, 0, 1, 1, 1, 0, 0)
    c = Coloring(
        {W2: shared + (1, 0, 0, 1), W2_2: shared + (0, 1, 1, 0)}, 2
    )
    hom = crafted_extension(sg, cfg, c, target)
    data, rep = recover_uniformization(sg, c, hom)
    assert rep.ok
    assert rep.thresholds == (("w^2*1", 5), ("w^2*2", 5))
    assert rep.coincidences_checked > 0
    assert rep.divisibility_certificates > 0


def test_recover_rejects_non_extension():
    sys = shared_prefix_system(shared_blocks=4, blocks=6)
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, ALPHA, 6)
    target = MarkedBasisTarget()
    c = Coloring({W2: (1, 0) * 6, W2_2: (1, 0) * 6}, 2)
    hom = crafted_extension(sg, cfg, c, target)
    broken = dict(hom.x_values)
    key = cfg.system.ladder(W2).entries[5]
    broken[key] = target.add(broken[key], target.basis(9, 9, 9))
    with pytest.raises(ExtensionError, match="g\\["):
        recover_uniformization(sg, c, ExtensionHom(target, broken, dict(hom.z_values)))


# ---------------------------------------------------------------------------
# twisted stages and sections


def test_twisted_zero_coloring_splits():
    sys = paired_system(6)
    cfg = GroupConfig.alternating(sys)
    ts, ex = build_twisted(cfg, zero_coloring(sys, 6), sys.alpha, 6)
    assert ex.ok
    res = splitting_search(ts, 5)
    assert res.found
    assert res.seed_offsets == (("w^2*1", 0),)


def test_twisted_single_twist_term():
    sys = paired_system(6)
    cfg = GroupConfig.alternating(sys)
    c = Coloring({W2: (1,) + (0,) * 5}, 2)
    ts, ex = build_twisted(cfg, c, sys.alpha, 6)
    assert ex.ok
    rels = ts.twisted.formal_relations()
    twisted_terms = [rel for _, rel in rels if rel.coeff(WGEN) != 0]
    assert len(twisted_terms) == 1
    # solvable: psi(0) = 1 absorbs the color at index 0
    res = splitting_search(ts, 5)
    assert res.found


def test_exactness_at_stage():
    sys = paired_system(5, (W2, W2_2))
    cfg = GroupConfig.alternating(sys)
    c = Coloring({W2: (0, 1, 1, 0, 1), W2_2: (1, 1, 0, 0, 1)}, 2)
    ts, ex = build_twisted(cfg, c, ALPHA, 5)
    assert ex.relations_killed and ex.kernel_is_twist_line
    assert ex.kernel_pure and ex.surjective


def test_annihilator_examples():
    assert choose_annihilator((3, 6)) == (2, -1)
    assert choose_annihilator((0, 0)) == (1, 0)
    with pytest.raises(ConfigError):
        choose_annihilator((5,))
    assert choose_annihilator((0,)) == (1,)
    assert choose_annihilator((0, 7)) == (1, 0)


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=6))
def test_annihilator_orthogonal_and_primitive(b):
    from math import gcd

    a = choose_annihilator(tuple(b))
    assert sum(x * y for x, y in zip(a, b)) == 0
    assert gcd(*a) == 1


def test_annihilator_thousand_random_vectors():
    from math import gcd

    rng = random.Random(99)
    for _ in range(1000):
        t = rng.randint(2, 6)
        b = tuple(rng.randint(-40, 40) for _ in range(t))
        a = choose_annihilator(b)
        assert len(a) == t
        assert sum(x * y for x, y in zip(a, b)) == 0
        assert gcd(*a) == 1


def test_parity_obstruction_core():
    sys = paired_system(8)
    b_data = {(W2, n): (3, 6) for n in range(8)}
    cfg = GroupConfig.from_rule(sys, None, lambda d, n, t: choose_annihilator(b_data[(d, n)]))
    c1 = Coloring({W2: (0, 0, 1) + (0,) * 13}, 2)
    c2 = zero_coloring(sys, 16)
    verdict = parity_obstruction(cfg, c1, c2, b_data, sys.alpha, 8, bounds=(1, 5, 25))
    assert verdict.status == "OBSTRUCTED"
    assert verdict.nstar == 2
    assert "2*Delta = -1" in verdict.witness
    assert all(status == "exhausted" for _, status, _ in verdict.searches)


def test_parity_inconclusive_at_low_index():
    sys = paired_system(6)
    b_data = {(W2, n): (0, 0) for n in range(6)}
    cfg = GroupConfig.from_rule(sys, None, lambda d, n, t: choose_annihilator(b_data[(d, n)]))
    c1 = Coloring({W2: (1,) + (0,) * 11}, 2)
    c2 = zero_coloring(sys, 12)
    verdict = parity_obstruction(cfg, c1, c2, b_data, sys.alpha, 6, bounds=(3,))
    assert verdict.status == "INCONCLUSIVE"
    assert verdict.nstar == 0


def test_parity_equal_colorings_not_obstructed():
    sys = paired_system(6)
    b_data = {(W2, n): (1, -2) for n in range(6)}
    cfg = GroupConfig.from_rule(sys, None, lambda d, n, t: choose_annihilator(b_data[(d, n)]))
    c = zero_coloring(sys, 12)
    verdict = parity_obstruction(cfg, c, c, b_data, sys.alpha, 6, bounds=(3,))
    assert verdict.status == "NOT_OBSTRUCTED"
    assert verdict.searches[0][1] == "found"


def test_pair_search_monotone_exhaustion():
    sys = paired_system(8)
    b_data = {(W2, n): (3, 6) for n in range(8)}
    cfg = GroupConfig.from_rule(sys, None, lambda d, n, t: choose_annihilator(b_data[(d, n)]))
    lift = {}
    for (d, n), vec in b_data.items():
        for beta, b in zip(cfg.system.ladder(d).block_values(n), vec):
            lift[beta] = b
    c1 = Coloring({W2: (0, 0, 1) + (0,) * 13}, 2)
    ts1, _ = build_twisted(cfg, c1, sys.alpha, 8)
    ts2, _ = build_twisted(cfg, zero_coloring(sys, 16), sys.alpha, 8)
    for bound in (1, 5, 25):
        assert not splitting_search_pair(ts1, ts2, bound, lift).found


def test_single_stage_with_searched_seed_can_split_where_pair_cannot():
    # the paired obstruction is sharper than any single-stage search
    sys = paired_system(8)
    b_data = {(W2, n): (3, 6) for n in range(8)}
    cfg = GroupConfig.from_rule(sys, None, lambda d, n, t: choose_annihilator(b_data[(d, n)]))
    lift = {}
    for (d, n), vec in b_data.items():
        for beta, b in zip(cfg.system.ladder(d).block_values(n), vec):
            lift[beta] = b
    c1 = Coloring({W2: (0, 0, 1) + (0,) * 13}, 2)
    ts1, _ = build_twisted(cfg, c1, sys.alpha, 8)
    res = splitting_search(ts1, 5, lift)
    assert res.found
    assert res.seed_offsets == (("w^2*1", 1),)


def test_extend_depth_insufficient_for_tail_clause():
    sys = paired_system(6)
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, sys.alpha, 6)
    target = IntegerTarget()
    phi = {(W2, n): 1 for n in range(6)}
    forced = UniformizationData(
        {v: 0 for v in sys.ladder(W2).entries}, {W2: 13}
    )
    with pytest.raises(ConfigError, match="increase depth"):
        extend_hom(sg, phi, forced, target)


def test_recover_requires_tree_like_system():
    l1 = make_block_special(W2, 6)
    # same values shifted by one block: an index-mismatched coincidence
    from laddergroups.ordinals import nat
    entries = (nat(1), nat(2)) + l1.entries[:10]
    shifted = prefix_special(W2_2, entries, tuple(range(0, 13, 2)))
    sys = LadderSystem.build(ALPHA, {W2: l1, W2_2: shifted})
    from laddergroups.ladders import is_tree_like
    assert not is_tree_like(sys).ok
    cfg = GroupConfig.alternating(sys)
    sg = build_stage(cfg, ALPHA, 6)
    target = MarkedBasisTarget()
    c = Coloring({W2: (0,) * 12, W2_2: (0,) * 12}, 2)
    hom = ExtensionHom(target, {}, {})
    from laddergroups.presentation import ScopeError
    with pytest.raises(ScopeError, match="tree-like"):
        recover_uniformization(sg, c, hom)
