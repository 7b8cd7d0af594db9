"""Exact sparse linear algebra over abstract generators, and the presented
groups built on a ladder system.

Generators come in three families: ``x`` generators indexed by ordinals,
``y`` generators indexed by (delta, n), and the single twist generator
``w``.  Group elements are finite rational combinations of generators.  The
``y(delta, 0)`` generator doubles as the seed of delta's division chain; for
n >= 1 the key ``y(delta, n)`` is used as the formal presentation symbol of
the n-th chain element, which concretely is a rational combination of the
seed and x generators (the chain satisfies psi(n) * chain(n+1) = chain(n) +
block(n), which is the group's only family of relations).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, lcm

from .ladders import LadderSystem
from .ordinals import Ordinal, format_ordinal

Rat = Fraction | int


class ScopeError(ValueError):
    """An element mentioned generators outside the current scope."""


class MapDomainError(KeyError):
    """A generator map was applied outside its declared domain."""


class ConfigError(ValueError):
    """A group configuration violated its invariants."""


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Generator:
    kind: str  # "x" | "y" | "w"
    ordinal: Ordinal | None = None
    index: int | None = None

    def sort_key(self):
        if self.kind == "x":
            return (0, self.ordinal.terms, 0)
        if self.kind == "y":
            return (1, self.ordinal.terms, self.index)
        return (2, (), 0)

    def __str__(self) -> str:
        if self.kind == "x":
            return f"x[{format_ordinal(self.ordinal)}]"
        if self.kind == "y":
            return f"y[{format_ordinal(self.ordinal)},{self.index}]"
        return "w"

    __repr__ = __str__


def xgen(beta: Ordinal) -> Generator:
    return Generator("x", beta, None)


def ygen(delta: Ordinal, n: int = 0) -> Generator:
    return Generator("y", delta, n)


WGEN = Generator("w")


def generator_level(g: Generator) -> Ordinal:
    """Least filtration level admitting g: x[beta] enters once beta < level
    + omega, y[delta, n] once delta < level."""
    if g.kind == "x":
        return g.ordinal.limit_part
    if g.kind == "y":
        return g.ordinal + Ordinal(((0, 1),))
    raise ScopeError("the twist generator has no filtration level")


# ---------------------------------------------------------------------------
# free elements


class FreeElement:
    """Immutable finite rational combination of generators."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: dict[Generator, Fraction] | None = None):
        clean = {}
        if coeffs:
            for g, q in coeffs.items():
                q = Fraction(q)
                if q:
                    clean[g] = q
        object.__setattr__(self, "_coeffs", clean)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def single(cls, g: Generator, coeff: Rat = 1) -> "FreeElement":
        return cls({g: Fraction(coeff)})

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, g: Generator) -> Fraction:
        return self._coeffs.get(g, Fraction(0))

    def support(self) -> tuple[Generator, ...]:
        return tuple(sorted(self._coeffs, key=Generator.sort_key))

    def items(self) -> list[tuple[Generator, Fraction]]:
        return sorted(self._coeffs.items(), key=lambda kv: kv[0].sort_key())

    def __add__(self, other: "FreeElement") -> "FreeElement":
        out = dict(self._coeffs)
        for g, q in other._coeffs.items():
            out[g] = out.get(g, Fraction(0)) + q
        return FreeElement(out)

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        out = dict(self._coeffs)
        for g, q in other._coeffs.items():
            out[g] = out.get(g, Fraction(0)) - q
        return FreeElement(out)

    def __neg__(self) -> "FreeElement":
        return FreeElement({g: -q for g, q in self._coeffs.items()})

    def scale(self, q: Rat) -> "FreeElement":
        q = Fraction(q)
        if not q:
            return ZERO_ELEMENT
        return FreeElement({g: q * c for g, c in self._coeffs.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeElement) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(tuple((g, q) for g, q in self.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for g, q in self.items():
            mag = q if q > 0 else -q
            coeff = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            term = f"{coeff}*{g}"
            if not parts:
                parts.append(term if q > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if q > 0 else f"- {term}")
        return " ".join(parts)

    __repr__ = __str__


ZERO_ELEMENT = FreeElement()


# ---------------------------------------------------------------------------
# generator maps


@dataclass(frozen=True)
class GeneratorMap:
    """Finite generator-to-element mapping, extended linearly.

    Application outside the declared domain is a hard error, not zero."""

    images: dict[Generator, FreeElement] = field(repr=False)

    def domain(self) -> tuple[Generator, ...]:
        return tuple(sorted(self.images, key=Generator.sort_key))

    def image_of(self, g: Generator) -> FreeElement:
        try:
            return self.images[g]
        except KeyError:
            raise MapDomainError(f"generator {g} outside map domain") from None

    def apply(self, e: FreeElement) -> FreeElement:
        out: dict[Generator, Fraction] = {}
        for g, q in e.items():
            img = self.image_of(g)
            for h, c in img.items():
                out[h] = out.get(h, Fraction(0)) + q * c
        return FreeElement(out)


def compose_maps(outer: GeneratorMap, inner: GeneratorMap) -> GeneratorMap:
    return GeneratorMap({g: outer.apply(img) for g, img in inner.images.items()})


@dataclass(frozen=True)
class HomReport:
    ok: bool
    failures: tuple[tuple[str, str], ...]


def verify_hom(
    gmap: GeneratorMap, relations: list[tuple[str, FreeElement]]
) -> HomReport:
    """A map out of the presented group must kill every relation; report the
    nonzero images."""
    failures = []
    for label, rel in relations:
        image = gmap.apply(rel)
        if not image.is_zero:
            failures.append((label, str(image)))
    return HomReport(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# psi and group configurations


class FactorialPsi:
    """psi(n) = n! with 0! = 1."""

    def __call__(self, n: int) -> int:
        return factorial(n)

    def describe(self) -> str:
        return "factorial"

    def __eq__(self, other) -> bool:
        return isinstance(other, FactorialPsi)


class TablePsi:
    def __init__(self, values: tuple[int, ...]):
        if any(v < 1 for v in values):
            raise ConfigError("psi values must be positive")
        self.values = tuple(values)

    def __call__(self, n: int) -> int:
        try:
            return self.values[n]
        except IndexError:
            raise ConfigError(f"psi table has no entry for n = {n}") from None

    def describe(self) -> str:
        return "table:" + ",".join(map(str, self.values))

    def __eq__(self, other) -> bool:
        return isinstance(other, TablePsi) and self.values == other.values


@dataclass(frozen=True)
class GroupConfig:
    """A ladder system together with psi and the block coefficient table.

    coeffs maps (delta, n) to the integer vector of length t_n used in block
    n of delta's relations; every vector must have gcd 1.
    """

    system: LadderSystem
    psi: FactorialPsi | TablePsi
    coeffs: dict[tuple[Ordinal, int], tuple[int, ...]] = field(repr=False)

    def __post_init__(self) -> None:
        for (delta, n), vec in self.coeffs.items():
            sl = self.system.ladder(delta)
            if n >= sl.block_count:
                raise ConfigError(
                    f"coefficients given for unexplored block {n} of {delta}"
                )
            if len(vec) != sl.t(n):
                raise ConfigError(
                    f"block {n} of {delta} has size {sl.t(n)}, got {len(vec)} coefficients"
                )
            if gcd(*vec) != 1:
                raise ConfigError(
                    f"coefficients {vec} for block {n} of {delta} do not have gcd 1"
                )

    @classmethod
    def from_rule(cls, system, psi, rule) -> "GroupConfig":
        """Build the coefficient table from rule(delta, n, t) -> vector."""
        coeffs = {}
        for delta, sl in system.items():
            for n in range(sl.block_count):
                coeffs[(delta, n)] = tuple(rule(delta, n, sl.t(n)))
        return cls(system, psi or FactorialPsi(), coeffs)

    @classmethod
    def all_ones(cls, system, psi=None) -> "GroupConfig":
        return cls.from_rule(system, psi or FactorialPsi(), lambda d, n, t: (1,) * t)

    @classmethod
    def alternating(cls, system, psi=None) -> "GroupConfig":
        """The (1, -1, 1, ...) coefficient pattern of the paired-block example."""
        return cls.from_rule(
            system, psi or FactorialPsi(), lambda d, n, t: tuple((-1) ** l for l in range(t))
        )

    def coeff(self, delta: Ordinal, n: int) -> tuple[int, ...]:
        try:
            return self.coeffs[(delta, n)]
        except KeyError:
            raise ConfigError(f"no coefficients for block {n} of {delta}") from None

    def restrict(self, blocks: int) -> "GroupConfig":
        """The same configuration over prefixes truncated to `blocks` blocks."""
        system = self.system.restrict_blocks(blocks)
        kept = {
            (delta, n): vec
            for (delta, n), vec in self.coeffs.items()
            if n < system.ladder(delta).block_count
        }
        return GroupConfig(system, self.psi, kept)

    def block_x_indices(self, delta: Ordinal, n: int) -> tuple[Ordinal, ...]:
        return self.system.ladder(delta).block_values(n)

    def psi_product(self, lo: int, hi: int) -> int:
        """Product of psi(j) for lo <= j < hi."""
        out = 1
        for j in range(lo, hi):
            v = self.psi(j)
            if v == 0:
                raise ConfigError("psi must be nonzero")
            out *= v
        return out


# ---------------------------------------------------------------------------
# chain elements and relations


def block_element(
    cfg: GroupConfig, delta: Ordinal, n: int, twist: int | None = None
) -> FreeElement:
    """The block combination sum_l a_l * x[ladder(k_n + l)], plus twist * w
    when a twist coefficient is supplied."""
    coeffs = cfg.coeff(delta, n)
    out = {xgen(b): Fraction(a) for a, b in zip(coeffs, cfg.block_x_indices(delta, n))}
    if twist:
        out[WGEN] = Fraction(twist)
    return FreeElement(out)


def chain_element(cfg, delta: Ordinal, n: int, coloring=None) -> FreeElement:
    """The n-th division chain element of delta, concretely in the ambient
    module: (prod_{i<n} 1/psi(i)) * seed + partial block sums.  With a
    coloring the blocks carry their twist term, realizing the twisted chain.
    """
    sl = cfg.system.ladder(delta)
    if n > sl.block_count:
        raise ScopeError(f"chain index {n} beyond explored blocks of {delta}")
    out = FreeElement.single(ygen(delta, 0), Fraction(1, cfg.psi_product(0, n)))
    for i in range(n):
        twist = coloring.color(delta, i) if coloring is not None else None
        blk = block_element(cfg, delta, i, twist)
        out = out + blk.scale(Fraction(1, cfg.psi_product(i, n)))
    return out


def chain_relation(
    cfg, delta: Ordinal, n: int, coloring=None, expanded: bool = False
) -> FreeElement:
    """The relation psi(n)*chain(n+1) - chain(n) - block(n) (minus its twist
    term when a coloring is given).

    Formal version uses y(delta, .) presentation symbols; the expanded
    version substitutes the concrete chain elements and must be zero.
    """
    twist = coloring.color(delta, n) if coloring is not None else None
    blk = block_element(cfg, delta, n, twist)
    if expanded:
        hi = chain_element(cfg, delta, n + 1, coloring).scale(cfg.psi(n))
        lo = chain_element(cfg, delta, n, coloring)
    else:
        hi = FreeElement.single(ygen(delta, n + 1), cfg.psi(n))
        lo = FreeElement.single(ygen(delta, n))
    return hi - lo - blk


def relation_label(delta: Ordinal, n: int) -> str:
    return f"g[{format_ordinal(delta)},{n}]"


# ---------------------------------------------------------------------------
# stage rewriting and membership


def stage_rewrite(cfg, depth: int, e: FreeElement, coloring=None) -> FreeElement:
    """Coordinates of e over the depth-N stage basis.

    The basis is {chain(delta, N)} for delta in the system plus the x
    generators (plus w for twisted stages); basis coordinates are returned
    as a combination of the formal keys y(delta, N), x[beta] and w.
    """
    out: dict[Generator, Fraction] = {}

    def bump(g: Generator, q: Fraction) -> None:
        out[g] = out.get(g, Fraction(0)) + q

    for g, q in e.items():
        if g.kind == "x":
            bump(g, q)
        elif g.kind == "w":
            if coloring is None:
                raise ScopeError("twist generator outside a twisted stage")
            bump(WGEN, q)
        else:
            if g.index != 0:
                raise ScopeError(
                    f"{g} is a formal chain symbol, not an element of the group span"
                )
            delta = g.ordinal
            try:
                cfg.system.ladder(delta)
            except KeyError:
                raise ScopeError(f"{g} indexed outside the ladder system") from None
            bump(ygen(delta, depth), q * cfg.psi_product(0, depth))
            for i in range(depth):
                p_i = cfg.psi_product(0, i)
                coeffs = cfg.coeff(delta, i)
                for a, beta in zip(coeffs, cfg.block_x_indices(delta, i)):
                    bump(xgen(beta), -q * p_i * a)
                if coloring is not None:
                    c = coloring.color(delta, i)
                    if c:
                        bump(WGEN, -q * p_i * c)
    return FreeElement(out)


def basis_realize(cfg, depth: int, key: Generator, coloring=None) -> FreeElement:
    """Concrete element behind a stage basis key."""
    if key.kind == "y":
        return chain_element(cfg, key.ordinal, key.index, coloring)
    return FreeElement.single(key)


@dataclass(frozen=True)
class MembershipResult:
    in_group: bool
    pure_multiple: int
    coordinates: FreeElement


def membership(cfg, depth: int, e: FreeElement, coloring=None) -> MembershipResult:
    """Integer-span membership in the depth-N stage, with the least positive
    multiple landing in it (the lcm of coordinate denominators)."""
    coords = stage_rewrite(cfg, depth, e, coloring)
    denoms = [q.denominator for _, q in coords.items()]
    mult = lcm(*denoms) if denoms else 1
    return MembershipResult(mult == 1, mult, coords)


def membership_at_level(
    cfg, depth: int, e: FreeElement, level: Ordinal, coloring=None
) -> bool:
    """Membership in the filtration subgroup at the given level: integral
    coordinates supported on basis keys admitted at that level."""
    coords = stage_rewrite(cfg, depth, e, coloring)
    for g, q in coords.items():
        if q.denominator != 1:
            return False
        if g.kind == "w":
            continue
        if level < generator_level(g):
            return False
    return True
