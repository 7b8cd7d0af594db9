"""Stage groups: truncated presentations with their filtration, separability
projections and freeness bases.

A stage fixes a level alpha and a chain depth N.  Its basis is the chain
elements chain(delta, N) for delta below alpha together with the explored x
generators (twisted stages also carry the twist generator w); every stage
element rewrites uniquely over that basis, which is what makes membership,
projections and freeness certificates finite computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ordinals import Ordinal, format_ordinal, plus_omega
from .presentation import (
    ConfigError,
    FreeElement,
    Generator,
    GeneratorMap,
    GroupConfig,
    MembershipResult,
    ScopeError,
    WGEN,
    block_element,
    chain_element,
    chain_relation,
    generator_level,
    membership,
    membership_at_level,
    relation_label,
    stage_rewrite,
    verify_hom,
    xgen,
    ygen,
)


@dataclass(frozen=True)
class StageGroup:
    cfg: GroupConfig
    alpha: Ordinal
    depth: int
    coloring: object = None
    x_indices: tuple[Ordinal, ...] = field(default=(), repr=False)

    @property
    def deltas(self) -> tuple[Ordinal, ...]:
        return self.cfg.system.deltas_below(self.alpha)

    def stage_basis(self) -> tuple[Generator, ...]:
        keys = [ygen(d, self.depth) for d in self.deltas]
        keys.extend(xgen(b) for b in self.x_indices)
        if self.coloring is not None:
            keys.append(WGEN)
        return tuple(keys)

    def presentation_generators(self) -> tuple[Generator, ...]:
        keys = [ygen(d, n) for d in self.deltas for n in range(self.depth + 1)]
        keys.extend(xgen(b) for b in self.x_indices)
        if self.coloring is not None:
            keys.append(WGEN)
        return tuple(keys)

    def formal_relations(self) -> list[tuple[str, FreeElement]]:
        return [
            (relation_label(d, n), chain_relation(self.cfg, d, n, self.coloring))
            for d in self.deltas
            for n in range(self.depth)
        ]

    def realize(self, key: Generator) -> FreeElement:
        if key.kind == "y":
            return chain_element(self.cfg, key.ordinal, key.index, self.coloring)
        return FreeElement.single(key)

    def rewrite(self, e: FreeElement) -> FreeElement:
        return stage_rewrite(self.cfg, self.depth, e, self.coloring)

    def membership(self, e: FreeElement) -> MembershipResult:
        return membership(self.cfg, self.depth, e, self.coloring)


def build_stage(
    cfg: GroupConfig,
    alpha: Ordinal,
    depth: int,
    coloring=None,
    extra_x: tuple[Ordinal, ...] = (),
) -> StageGroup:
    """Assemble and verify a stage: every ladder must be explored through
    `depth` blocks, and every relation must expand to zero through the chain
    elements before the stage is accepted."""
    deltas = cfg.system.deltas_below(alpha)
    for d in deltas:
        sl = cfg.system.ladder(d)
        if sl.block_count < depth:
            raise ConfigError(
                f"ladder on {format_ordinal(d)} explored to {sl.block_count} blocks, "
                f"need {depth}; increase depth"
            )
        if coloring is not None and coloring.depth(d) < depth:
            raise ConfigError(f"coloring on {format_ordinal(d)} shallower than stage depth")
    xs = set()
    for d in deltas:
        sl = cfg.system.ladder(d)
        xs.update(sl.entries[: sl.k(depth)])
    xs.update(extra_x)
    stage = StageGroup(cfg, alpha, depth, coloring,
                       tuple(sorted(xs, key=lambda o: o.terms)))
    for d in deltas:
        for n in range(depth):
            residue = chain_relation(cfg, d, n, coloring, expanded=True)
            if not residue.is_zero:
                raise ConfigError(
                    f"relation {relation_label(d, n)} does not close: {residue}"
                )
    return stage


def filtration_subgroup(sg: StageGroup, mu: Ordinal) -> tuple[Generator, ...]:
    """Stage basis of the filtration subgroup at level mu: the basis keys
    whose admission level is at most mu (w is carried at every level)."""
    if sg.alpha < mu:
        raise ScopeError(f"level {mu} above stage level {sg.alpha}")
    keys = []
    for key in sg.stage_basis():
        if key.kind == "w" or not mu < generator_level(key):
            keys.append(key)
    return tuple(keys)


# ---------------------------------------------------------------------------
# separability projections


@dataclass(frozen=True)
class ProjectionReport:
    nu: str
    cuts: tuple[tuple[str, int], ...]
    relations_killed: int
    identity_on_level: int
    images_in_level: int
    idempotent: int
    closed_form_notes: tuple[str, ...]
    ok: bool


def projection(sg: StageGroup, nu: Ordinal) -> tuple[GeneratorMap, ProjectionReport]:
    """Projection of the stage onto its filtration subgroup at level nu.

    x generators at or above nu + omega are killed, everything under the
    level is fixed, and for each delta above nu the chain is zeroed from the
    first block whose head reaches nu + omega, the earlier chain elements
    being backfilled through the relations.  That cut is the one forced by
    the relations: a block below the cut sits entirely inside the level
    subgroup, so its block element must survive the projection intact.
    """
    if sg.coloring is not None:
        raise ScopeError("projections are defined on untwisted stages")
    if nu in sg.cfg.system.deltas:
        raise ScopeError(f"{nu} carries a ladder; projections need nu outside the set")
    if sg.alpha < nu:
        raise ScopeError(f"nu {nu} above stage level {sg.alpha}")
    cfg = sg.cfg
    bound = plus_omega(nu)
    images: dict[Generator, FreeElement] = {}
    for beta in sg.x_indices:
        g = xgen(beta)
        images[g] = FreeElement.single(g) if beta < bound else FreeElement()
    cuts = []
    notes = []
    for d in sg.deltas:
        if d < nu:
            for n in range(sg.depth + 1):
                images[ygen(d, n)] = chain_element(cfg, d, n)
            continue
        sl = cfg.system.ladder(d)
        cut = sg.depth
        for n in range(sg.depth):
            if not sl.head(n) < bound:
                cut = n
                break
        cuts.append((format_ordinal(d), cut))
        for n in range(cut, sg.depth + 1):
            images[ygen(d, n)] = FreeElement()
        for n in reversed(range(cut)):
            blk_img = element_apply(images, block_element(cfg, d, n))
            images[ygen(d, n)] = images[ygen(d, n + 1)].scale(cfg.psi(n)) - blk_img
        notes.extend(_closed_form_notes(cfg, d, cut, images))
    gmap = GeneratorMap(images)

    relations = sg.formal_relations()
    hom = verify_hom(gmap, relations)
    sub = filtration_subgroup(sg, nu)
    identity = sum(
        1 for key in sub if gmap.apply(FreeElement.single(key)) == sg.realize(key)
    )
    in_level = sum(
        1
        for g in gmap.domain()
        if membership_at_level(cfg, sg.depth, gmap.image_of(g), nu)
    )
    idem = sum(
        1 for g in gmap.domain() if gmap.apply(gmap.image_of(g)) == gmap.image_of(g)
    )
    total = len(gmap.domain())
    ok = hom.ok and identity == len(sub) and in_level == total and idem == total
    report = ProjectionReport(
        format_ordinal(nu),
        tuple(cuts),
        len(relations) - len(hom.failures),
        identity,
        in_level,
        idem,
        tuple(notes),
        ok,
    )
    return gmap, report


def element_apply(images: dict[Generator, FreeElement], e: FreeElement) -> FreeElement:
    out = FreeElement()
    for g, q in e.items():
        out = out + images[g].scale(q)
    return out


def _closed_form_notes(cfg, d, cut, images) -> list[str]:
    """Compare the recursion against the two closed-form weightings.

    The unshifted product of psi values reproduces the recursion; the
    shifted weighting psi(j+1) found in closed-form write-ups disagrees
    whenever psi is not constant on the range, and gets a note."""
    notes = []
    for n in range(cut):
        recursion = images[ygen(d, n)]
        plain = FreeElement()
        shifted = FreeElement()
        for i in range(n, cut):
            blk = element_apply(images, block_element(cfg, d, i))
            plain = plain + blk.scale(-cfg.psi_product(n, i))
            w = 1
            for j in range(n, i):
                w *= cfg.psi(j + 1)
            shifted = shifted + blk.scale(-w)
        if plain != recursion:
            notes.append(f"plain closed form diverges at ({format_ordinal(d)},{n})")
        if shifted != recursion:
            notes.append(
                f"shifted psi(j+1) closed form diverges from recursion at "
                f"({format_ordinal(d)},{n})"
            )
    return notes


# ---------------------------------------------------------------------------
# freeness bases


@dataclass(frozen=True)
class FreenessBasis:
    basis: tuple[Generator, ...]
    chain_cut: int
    basis_chain_index: int
    closure: tuple[Generator, ...]
    ok: bool
    problems: tuple[str, ...]


def freeness_basis(sg: StageGroup, T: tuple[Generator, ...]) -> FreenessBasis:
    """Explicit free basis of the pure closure of T in the stage.

    T is enlarged as in the freeness argument: a uniform chain cut m over
    the touched deltas, all chain symbols up to m, and the ladder x
    generators below breakpoint m+1.  The basis keeps chain index m when
    psi(m) = 1; otherwise the pure closure picks up one more division and
    the chain index m+1 is required (the gcd-1 block coefficients make that
    element primitive).  Every closure element is certified to rewrite
    integrally over the basis.
    """
    cfg = sg.cfg
    scope = set(sg.presentation_generators())
    for g in T:
        if g not in scope:
            raise ScopeError(f"{g} outside stage scope")
    touched = sorted({g.ordinal for g in T if g.kind == "y"}, key=lambda o: o.terms)
    if not touched:
        basis = tuple(sorted(set(T), key=Generator.sort_key))
        return FreenessBasis(basis, 0, 0, basis, True, ())
    m = max(g.index for g in T if g.kind == "y")
    for g in T:
        if g.kind != "x":
            continue
        for d in touched:
            sl = cfg.system.ladder(d)
            if g.ordinal in sl.entries:
                pos = sl.entries.index(g.ordinal)
                # entries before the first breakpoint are covered by any cut
                if pos >= sl.k(0):
                    m = max(m, sl.block_of_position(pos))
    mstar = m if cfg.psi(m) == 1 else m + 1
    if mstar > sg.depth or m + 1 > min(cfg.system.ladder(d).block_count for d in touched):
        raise ConfigError("stage too shallow for the requested closure; increase depth")
    closure: set[Generator] = set(T)
    basis: set[Generator] = {g for g in T if g.kind == "x"}
    for d in touched:
        sl = cfg.system.ladder(d)
        closure.update(ygen(d, n) for n in range(mstar + 1))
        closure.update(xgen(b) for b in sl.entries[: sl.k(m + 1)])
        basis.add(ygen(d, mstar))
        basis.update(xgen(b) for b in sl.entries[: sl.k(m + 1)])
    problems = []
    basis_sorted = tuple(sorted(basis, key=Generator.sort_key))
    for g in sorted(closure, key=Generator.sort_key):
        concrete = sg.realize(g)
        coords = stage_rewrite(cfg, mstar, concrete)
        for key, q in coords.items():
            if q.denominator != 1:
                problems.append(f"{g} has fractional coordinate over the basis")
                break
            if key not in basis:
                problems.append(f"{g} touches {key} outside the basis")
                break
    if len(basis_sorted) != _rank(sg, basis_sorted, mstar):
        problems.append("basis is linearly dependent")
    return FreenessBasis(
        basis_sorted,
        m,
        mstar,
        tuple(sorted(closure, key=Generator.sort_key)),
        not problems,
        tuple(problems),
    )


def _rank(sg: StageGroup, keys: tuple[Generator, ...], depth: int) -> int:
    """Rank over the rationals of the concrete vectors behind the keys."""
    pivots: list[tuple[Generator, dict[Generator, Fraction]]] = []
    for g in keys:
        row = dict(stage_rewrite(sg.cfg, depth, sg.realize(g)).items())
        for pg, prow in pivots:
            if row.get(pg):
                factor = row[pg] / prow[pg]
                for k, v in prow.items():
                    row[k] = row.get(k, Fraction(0)) - factor * v
        row = {k: v for k, v in row.items() if v}
        if row:
            pivot = min(row, key=Generator.sort_key)
            pivots.append((pivot, row))
    return len(pivots)
