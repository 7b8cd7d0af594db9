"""Disjointification of ladder tails, overlap rigidity, and level-preserving
stage isomorphisms between groups built on range-matched ladder systems.

Two systems with the same omega-range yield stages that are isomorphic by a
map respecting every filtration level.  The map fixes most x generators,
sends each tail ladder value of the simple source to the matching block
combination of the destination, swaps the destination block heads back, and
matches the division chains; chain elements below the disjointification
threshold are backfilled through the relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ladders import (
    LadderInvalidError,
    LadderSystem,
    first_block_reaching,
    omega_range,
)
from .ordinals import Ordinal, format_ordinal
from .presentation import (
    FreeElement,
    Generator,
    GeneratorMap,
    GroupConfig,
    ScopeError,
    block_element,
    chain_element,
    generator_level,
    verify_hom,
    xgen,
    ygen,
)
from .stages import StageGroup, build_stage, filtration_subgroup


@dataclass(frozen=True)
class Disjointification:
    """Block thresholds m_delta making the ladder tails pairwise disjoint."""

    thresholds: dict[Ordinal, int]
    certified: bool
    minimality_notes: tuple[str, ...]

    def m(self, delta: Ordinal) -> int:
        return self.thresholds[delta]


def _tails_disjoint(sys: LadderSystem, thresholds: dict[Ordinal, int]) -> bool:
    blocks: list[set] = []
    expanded: list[set] = []
    for d, sl in sys.items():
        m = thresholds[d]
        rng = omega_range(sl)
        blocks.append({v.terms for v in rng.blocks[m:]})
        expanded.append(
            {v.terms for n in range(m, sl.block_count) for v in sl.block_values(n)}
        )
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if blocks[i] & blocks[j] or expanded[i] & expanded[j]:
                return False
    return True


def disjointify(sys: LadderSystem) -> Disjointification:
    """Thresholds from the ordering argument: the tail of each ladder must
    clear every smaller delta.  The resulting tails, both the block head "+
    omega" values and the expanded per-index values, are certified pairwise
    disjoint by a direct scan."""
    thresholds: dict[Ordinal, int] = {}
    for d, sl in sys.items():
        m = 0
        for smaller in sys.deltas_below(d):
            m = max(m, first_block_reaching(sl, smaller))
        thresholds[d] = m
    certified = _tails_disjoint(sys, thresholds)
    notes = []
    deltas = sys.deltas
    if deltas and thresholds[deltas[-1]] > 0:
        top = deltas[-1]
        trial = dict(thresholds)
        trial[top] -= 1
        still = _tails_disjoint(sys, trial)
        notes.append(
            f"decrementing m[{format_ordinal(top)}] "
            + ("keeps tails disjoint" if still else "breaks disjointness")
        )
    return Disjointification(thresholds, certified, tuple(notes))


@dataclass(frozen=True)
class OverlapReport:
    coincidences: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def overlap_check(
    sys_a: LadderSystem, sys_b: LadderSystem, d: Disjointification
) -> OverlapReport:
    """Scan all tail value coincidences between the two systems; each must
    identify the delta and the block index.  Requires equal omega-ranges."""
    ranges_a = {dd: omega_range(sl) for dd, sl in sys_a.items()}
    ranges_b = {dd: omega_range(sl) for dd, sl in sys_b.items()}
    if set(ranges_a) != set(ranges_b) or any(
        ranges_a[dd].blocks != ranges_b[dd].blocks for dd in ranges_a
    ):
        raise LadderInvalidError("omega-ranges of the two systems differ")
    count = 0
    violations = []
    tails_b = {}
    for d2, l2 in sys_b.items():
        vals = {}
        for m in range(d.m(d2), l2.block_count):
            for v in l2.block_values(m):
                vals[v.terms] = m
        tails_b[d2] = vals
    for d1, l1 in sys_a.items():
        for d2, vals2 in tails_b.items():
            for n in range(d.m(d1), l1.block_count):
                for v in l1.block_values(n):
                    if v.terms in vals2:
                        count += 1
                        m = vals2[v.terms]
                        if d1 != d2 or m != n:
                            violations.append(
                                f"value {v} shared by ({format_ordinal(d1)},{n}) "
                                f"and ({format_ordinal(d2)},{m})"
                            )
    return OverlapReport(count, tuple(violations))


# ---------------------------------------------------------------------------
# level-preserving isomorphisms


def build_matched_stages(
    cfg_src: GroupConfig, cfg_dst: GroupConfig, alpha: Ordinal, depth: int
) -> tuple[StageGroup, StageGroup]:
    """Build the two stages over a shared x universe so their bases are
    directly comparable."""
    shared: set[Ordinal] = set()
    for cfg in (cfg_src, cfg_dst):
        for dd in cfg.system.deltas_below(alpha):
            sl = cfg.system.ladder(dd)
            shared.update(sl.entries[: sl.k(depth)])
    extra = tuple(sorted(shared, key=lambda o: o.terms))
    return (
        build_stage(cfg_src, alpha, depth, extra_x=extra),
        build_stage(cfg_dst, alpha, depth, extra_x=extra),
    )


def _check_simple(cfg: GroupConfig, depth: int) -> None:
    for dd in cfg.system.deltas:
        sl = cfg.system.ladder(dd)
        for n in range(depth):
            if sl.k(n) != n or sl.t(n) != 1 or cfg.coeff(dd, n) != (1,):
                raise ScopeError(
                    "source stage must be of the simplest form "
                    "(k_n = n, singleton blocks, unit coefficients)"
                )


def level_iso_build(
    src: StageGroup, dst: StageGroup, d: Disjointification
) -> GeneratorMap:
    """The level-preserving stage isomorphism between a simple source and a
    range-matched destination.

    Tail clauses (block image, head swap, fixpoints, chain match) follow the
    disjointification thresholds; chains below a threshold are backfilled
    downward through the relations.  Destination blocks must lead with
    coefficient 1, which keeps the head swap unimodular.
    """
    if src.alpha != dst.alpha or src.depth != dst.depth:
        raise ScopeError("stages must share level and depth")
    if src.cfg.psi != dst.cfg.psi:
        raise ScopeError("stages must share psi")
    if src.x_indices != dst.x_indices:
        raise ScopeError("stages must share their x universe; use build_matched_stages")
    _check_simple(src.cfg, src.depth)
    depth = src.depth
    if set(src.deltas) != set(dst.deltas):
        raise ScopeError("stages must live on the same deltas")
    for dd in src.deltas:
        eta = src.cfg.system.ladder(dd)
        nu = dst.cfg.system.ladder(dd)
        if omega_range(eta).blocks[:depth] != omega_range(nu).blocks[:depth]:
            raise LadderInvalidError(f"omega-ranges differ on {format_ordinal(dd)}")
        for n in range(depth):
            if dst.cfg.coeff(dd, n)[0] != 1:
                raise ScopeError(
                    f"destination block ({format_ordinal(dd)},{n}) does not lead "
                    "with coefficient 1 (normalization not applied)"
                )
        if d.m(dd) > depth:
            raise ScopeError(f"threshold for {format_ordinal(dd)} exceeds stage depth")

    images: dict[Generator, FreeElement] = {}

    def put(key: Generator, value: FreeElement) -> None:
        if key in images and images[key] != value:
            raise ScopeError(f"conflicting images for {key}")
        images[key] = value

    for dd in src.deltas:
        eta = src.cfg.system.ladder(dd)
        nu = dst.cfg.system.ladder(dd)
        for n in range(d.m(dd), depth):
            src_val = eta.entries[n]
            put(xgen(src_val), block_element(dst.cfg, dd, n))
            head = nu.head(n)
            if head != src_val:
                put(xgen(head), FreeElement.single(xgen(src_val)))
    for beta in src.x_indices:
        key = xgen(beta)
        if key not in images:
            images[key] = FreeElement.single(key)
    for dd in src.deltas:
        eta = src.cfg.system.ladder(dd)
        m = d.m(dd)
        for n in range(m, depth + 1):
            images[ygen(dd, n)] = chain_element(dst.cfg, dd, n)
        for n in reversed(range(m)):
            x_img = images[xgen(eta.entries[n])]
            images[ygen(dd, n)] = (
                images[ygen(dd, n + 1)].scale(src.cfg.psi(n)) - x_img
            )
    return GeneratorMap(images)


@dataclass(frozen=True)
class LevelIsoReport:
    relations_ok: bool
    images_in_group: bool
    determinant: str
    inverse_integral: bool
    level_checks: tuple[tuple[str, bool], ...]
    src_basis: tuple[str, ...]
    dst_basis: tuple[str, ...]
    matrix: tuple[tuple[str, ...], ...]
    ok: bool


def level_iso_verify(
    gmap: GeneratorMap, src: StageGroup, dst: StageGroup
) -> LevelIsoReport:
    """Three checks: source relations die in the destination, the basis
    matrix is integrally invertible, and every filtration level maps onto
    the matching destination level.  The integer basis matrix itself is
    part of the certificate."""
    hom = verify_hom(gmap, src.formal_relations())
    in_group = all(
        dst.membership(gmap.image_of(g)).in_group for g in gmap.domain()
    )
    src_keys = src.stage_basis()
    dst_keys = dst.stage_basis()
    index = {k: i for i, k in enumerate(dst_keys)}
    matrix: list[list[Fraction]] = []
    for key in src_keys:
        img = gmap.apply(FreeElement.single(key))
        coords = dst.rewrite(img)
        row = [Fraction(0)] * len(dst_keys)
        for k, q in coords.items():
            row[index[k]] = q
        matrix.append(row)
    integral = all(q.denominator == 1 for row in matrix for q in row)
    det = _determinant(matrix)
    inverse_ok = integral and abs(det) == 1
    levels = sorted(
        {generator_level(k).terms for k in src_keys} | {src.alpha.terms},
    )
    level_checks = []
    all_levels_ok = True
    for terms in levels:
        mu = Ordinal(terms)
        rows = [i for i, k in enumerate(src_keys) if not mu < generator_level(k)]
        cols = [index[k] for k in filtration_subgroup(dst, mu)]
        outside = [
            j for j in range(len(dst_keys)) if j not in cols
        ]
        contained = all(matrix[i][j] == 0 for i in rows for j in outside)
        sub = [[matrix[i][j] for j in cols] for i in rows]
        onto = len(rows) == len(cols) and abs(_determinant(sub)) == 1
        ok = contained and onto
        all_levels_ok = all_levels_ok and ok
        level_checks.append((format_ordinal(mu), ok))
    ok = hom.ok and in_group and inverse_ok and all_levels_ok
    return LevelIsoReport(
        hom.ok,
        in_group,
        str(det),
        inverse_ok,
        tuple(level_checks),
        tuple(str(k) for k in src_keys),
        tuple(str(k) for k in dst_keys),
        tuple(tuple(str(q) for q in row) for row in matrix),
        ok,
    )


def invert_level_iso(
    gmap: GeneratorMap, src: StageGroup, dst: StageGroup
) -> GeneratorMap:
    """Inverse of a verified stage isomorphism, as a map on the destination
    presentation."""
    src_keys = src.stage_basis()
    dst_keys = dst.stage_basis()
    index = {k: i for i, k in enumerate(dst_keys)}
    matrix = []
    for key in src_keys:
        coords = dst.rewrite(gmap.apply(FreeElement.single(key)))
        row = [Fraction(0)] * len(dst_keys)
        for k, q in coords.items():
            row[index[k]] = q
        matrix.append(row)
    inv = _inverse(matrix)
    images: dict[Generator, FreeElement] = {}
    for g in dst.presentation_generators():
        coords = dst.rewrite(dst.realize(g))
        vec = [Fraction(0)] * len(dst_keys)
        for k, q in coords.items():
            vec[index[k]] = q
        out = FreeElement()
        for j, key in enumerate(src_keys):
            c = sum((vec[i] * inv[i][j] for i in range(len(dst_keys))), Fraction(0))
            if c:
                out = out + src.realize(key).scale(c)
        images[g] = out
    return GeneratorMap(images)


def _determinant(matrix: list[list[Fraction]]) -> Fraction:
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def _inverse(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    m = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            raise ScopeError("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [row[n:] for row in m]
