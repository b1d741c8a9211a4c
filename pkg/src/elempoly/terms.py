"""Space terms and their symbolic invariants.

A :class:`SpaceTerm` is an immutable syntax tree over a handful of atoms
(point, sphere, disc, the two ``S^3``-bundles over ``S^2``, declared custom
atoms) and four combinators (product, wedge, connected sum, boundary
connected sum). Homology, connectivity and immersion/embedding
capabilities are computed structurally from the tree.

Equality of normalized terms is a sufficient, not a necessary, criterion
for two terms to describe diffeomorphic spaces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, Mapping

from .abelian import FgAbelianGroup, TRIVIAL, direct_sum, free, tensor, tor

__all__ = [
    "TermError",
    "TermValidationError",
    "UnsupportedRuleError",
    "PreconditionError",
    "Mode",
    "ManifoldFlags",
    "Capabilities",
    "SpaceTerm",
    "Point",
    "Sphere",
    "Disc",
    "SphereBundle",
    "CustomAtom",
    "Product",
    "Wedge",
    "ConnSum",
    "BoundaryConnSum",
    "product",
    "wedge",
    "connsum",
    "bcs",
    "dimension",
    "flags",
    "reduced_homology",
    "simple_connectivity",
    "is_simply_connected",
    "connectivity",
    "is_contractible",
    "is_k_connected",
    "euler_characteristic",
    "capabilities",
    "normalize",
    "equal",
    "render",
    "term_key",
]


class TermError(ValueError):
    """Base class for term-level failures."""


class TermValidationError(TermError):
    """A combinator was applied to operands it does not accept."""


class UnsupportedRuleError(TermError):
    """No sound symbolic rule covers this term."""


class PreconditionError(TermError):
    """An operation was called outside its documented domain."""


class Mode(enum.Enum):
    """Immersion (SIE) or embedding (SEE) flavour of a capability query."""

    SIE = "SIE"
    SEE = "SEE"


@dataclass(frozen=True)
class ManifoldFlags:
    is_manifold: bool = True
    is_closed: bool = False
    has_boundary: bool = False
    is_connected: bool = True
    is_orientable: bool = False
    is_simply_connected: bool = False
    is_homotopy_sphere: bool = False

    def __post_init__(self):
        if self.is_closed and self.has_boundary:
            raise TermValidationError("a term cannot be both closed and have boundary")
        if self.is_simply_connected and not self.is_connected:
            raise TermValidationError("simply-connected implies connected")
        if (self.is_closed or self.has_boundary) and not self.is_manifold:
            raise TermValidationError("closed/boundary flags only apply to manifolds")
        if self.is_homotopy_sphere and not (self.is_closed and self.is_manifold):
            raise TermValidationError("a homotopy sphere is a closed manifold")


def _fs(items) -> frozenset:
    return frozenset(items or ())


@dataclass(frozen=True)
class Capabilities:
    """What a term is known to immerse or embed into.

    Codimension entries are ``(a, trivial_normal)`` pairs and ``*_into_Rn``
    entries are ambient dimensions; all of them are lower bounds, so every
    query is closed upwards. Embedding implies immersion.
    """

    immerse_codims: frozenset = frozenset()
    embed_codims: frozenset = frozenset()
    immerses_into_Rn: frozenset = frozenset()
    embeds_into_Rn: frozenset = frozenset()

    def __post_init__(self):
        embed = _fs(self.embed_codims)
        object.__setattr__(self, "embed_codims", embed)
        object.__setattr__(self, "immerse_codims", _fs(self.immerse_codims) | embed)
        into = _fs(self.embeds_into_Rn)
        object.__setattr__(self, "embeds_into_Rn", into)
        object.__setattr__(self, "immerses_into_Rn", _fs(self.immerses_into_Rn) | into)

    def union(self, other: Capabilities) -> Capabilities:
        return Capabilities(
            self.immerse_codims | other.immerse_codims,
            self.embed_codims | other.embed_codims,
            self.immerses_into_Rn | other.immerses_into_Rn,
            self.embeds_into_Rn | other.embeds_into_Rn,
        )

    def saturate(self, dim: int) -> Capabilities:
        """Add the ambient dimensions implied by codimension entries."""
        return Capabilities(
            self.immerse_codims,
            self.embed_codims,
            self.immerses_into_Rn | {dim + a for a, _ in self.immerse_codims},
            self.embeds_into_Rn | {dim + a for a, _ in self.embed_codims},
        )

    def _codims(self, mode: Mode) -> frozenset:
        return self.embed_codims if mode is Mode.SEE else self.immerse_codims

    def codim(self, a: int, trivial: bool = False, mode: Mode = Mode.SIE) -> bool:
        return any(b <= a and (t or not trivial) for b, t in self._codims(mode))

    def into(self, n: int, mode: Mode = Mode.SIE) -> bool:
        dims = self.embeds_into_Rn if mode is Mode.SEE else self.immerses_into_Rn
        return any(m <= n for m in dims)

    def immerses_codim(self, a: int, trivial: bool = False) -> bool:
        return self.codim(a, trivial, Mode.SIE)

    def embeds_codim(self, a: int, trivial: bool = False) -> bool:
        return self.codim(a, trivial, Mode.SEE)

    def immerses_into(self, n: int) -> bool:
        return self.into(n, Mode.SIE)

    def embeds_into(self, n: int) -> bool:
        return self.into(n, Mode.SEE)


NO_CAPABILITIES = Capabilities()


# --- the term language ------------------------------------------------------


class SpaceTerm:
    """Base class of all term nodes. Nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


def _span():
    return field(default=None, compare=False, repr=False, hash=False, kw_only=True)


@dataclass(frozen=True)
class Point(SpaceTerm):
    span: object = _span()


@dataclass(frozen=True)
class Sphere(SpaceTerm):
    d: int
    span: object = _span()

    def __post_init__(self):
        if self.d < 0:
            raise TermValidationError(f"sphere dimension {self.d} < 0")


@dataclass(frozen=True)
class Disc(SpaceTerm):
    d: int
    span: object = _span()

    def __post_init__(self):
        if self.d < 0:
            raise TermValidationError(f"disc dimension {self.d} < 0")


@dataclass(frozen=True)
class SphereBundle(SpaceTerm):
    """Total space of an ``S^3``-bundle over ``S^2``; ``twisted=False`` is ``S^2 x S^3``."""

    twisted: bool = False
    span: object = _span()

    base_dim = 2
    fiber_dim = 3


@dataclass(frozen=True)
class CustomAtom(SpaceTerm):
    """A declared space with an unreduced homology table and flags."""

    name: str
    dim: int
    homology: tuple = ()
    flags: ManifoldFlags = ManifoldFlags()
    capabilities: Capabilities = NO_CAPABILITIES
    span: object = _span()

    def __post_init__(self):
        table = self.homology.items() if isinstance(self.homology, Mapping) else self.homology
        table = tuple(sorted((int(k), g) for k, g in table if not g.is_trivial))
        object.__setattr__(self, "homology", table)
        if self.dim < 0:
            raise TermValidationError(f"atom @{self.name}: negative dimension")
        for deg, _ in table:
            if deg < 0 or deg > self.dim:
                raise TermValidationError(
                    f"atom @{self.name}: homology in degree {deg} outside 0..{self.dim}"
                )
        h0 = dict(table).get(0)
        if self.flags.is_connected and h0 is not None and h0 != free(1):
            raise TermValidationError(f"atom @{self.name}: connected atoms need H0 = Z, got {h0}")
        if not self.flags.is_connected and (h0 is None or h0.rank < 2):
            raise TermValidationError(f"atom @{self.name}: disconnected atoms need H0 = Z^c, c >= 2")


def _operands(ops) -> tuple:
    ops = tuple(ops)
    for o in ops:
        if not isinstance(o, SpaceTerm):
            raise TypeError(f"operand {o!r} is not a SpaceTerm")
    return ops


@dataclass(frozen=True)
class Product(SpaceTerm):
    left: SpaceTerm
    right: SpaceTerm
    span: object = _span()

    def __post_init__(self):
        _operands((self.left, self.right))


@dataclass(frozen=True)
class Wedge(SpaceTerm):
    operands: tuple
    span: object = _span()

    def __post_init__(self):
        ops = _operands(self.operands)
        object.__setattr__(self, "operands", ops)
        if len(ops) < 2:
            raise TermValidationError("a wedge needs at least two operands")
        bad = [o for o in ops if not flags(o).is_connected]
        if bad:
            raise TermValidationError(
                "wedge operands must be connected: " + ", ".join(render(o) for o in bad)
            )


def _check_equal_dims(kind: str, ops: tuple):
    dims = [dimension(o) for o in ops]
    if len(set(dims)) > 1:
        listing = ", ".join(f"{render(o)} (dim {d})" for o, d in zip(ops, dims))
        raise TermValidationError(f"{kind} operands must have equal dimension: {listing}")
    return dims[0]


@dataclass(frozen=True)
class ConnSum(SpaceTerm):
    operands: tuple
    span: object = _span()

    def __post_init__(self):
        ops = _operands(self.operands)
        object.__setattr__(self, "operands", ops)
        if len(ops) < 2:
            raise TermValidationError("a connected sum needs at least two operands")
        bad = [
            o for o in ops
            if not (flags(o).is_manifold and flags(o).is_closed and flags(o).is_connected)
        ]
        if bad:
            raise TermValidationError(
                "connected-sum operands must be closed connected manifolds: "
                + ", ".join(render(o) for o in bad)
            )
        d = _check_equal_dims("connected-sum", ops)
        if d < 2:
            raise TermValidationError(f"connected sums need dimension >= 2, got {d}")


@dataclass(frozen=True)
class BoundaryConnSum(SpaceTerm):
    operands: tuple
    span: object = _span()

    def __post_init__(self):
        ops = _operands(self.operands)
        object.__setattr__(self, "operands", ops)
        if len(ops) < 2:
            raise TermValidationError("a boundary connected sum needs at least two operands")
        bad = [
            o for o in ops
            if not (flags(o).is_manifold and flags(o).has_boundary and flags(o).is_connected)
        ]
        if bad:
            raise TermValidationError(
                "boundary-connected-sum operands must be connected manifolds with boundary: "
                + ", ".join(render(o) for o in bad)
            )
        _check_equal_dims("boundary-connected-sum", ops)


def product(*factors: SpaceTerm) -> SpaceTerm:
    """Left-nested product of one or more factors."""
    if not factors:
        return Point()
    out = factors[0]
    for f in factors[1:]:
        out = Product(out, f)
    return out


def wedge(*ops: SpaceTerm) -> SpaceTerm:
    return ops[0] if len(ops) == 1 else Wedge(ops)


def connsum(*ops: SpaceTerm) -> SpaceTerm:
    return ops[0] if len(ops) == 1 else ConnSum(ops)


def bcs(*ops: SpaceTerm) -> SpaceTerm:
    return ops[0] if len(ops) == 1 else BoundaryConnSum(ops)


# --- invariants -------------------------------------------------------------


@lru_cache(maxsize=None)
def dimension(t: SpaceTerm) -> int:
    if isinstance(t, Point):
        return 0
    if isinstance(t, (Sphere, Disc)):
        return t.d
    if isinstance(t, SphereBundle):
        return 5
    if isinstance(t, CustomAtom):
        return t.dim
    if isinstance(t, Product):
        return dimension(t.left) + dimension(t.right)
    if isinstance(t, Wedge):
        return max(dimension(o) for o in t.operands)
    if isinstance(t, (ConnSum, BoundaryConnSum)):
        return _check_equal_dims(type(t).__name__, t.operands)
    raise TypeError(f"not a space term: {t!r}")


@lru_cache(maxsize=None)
def simple_connectivity(t: SpaceTerm) -> tuple[bool, str]:
    """``(certified, reason)``; an uncertified term is reported as not simply-connected."""
    if isinstance(t, Point):
        return True, "point"
    if isinstance(t, Sphere):
        if t.d >= 2:
            return True, "sphere of dimension >= 2"
        return False, f"S{t.d} is not simply-connected"
    if isinstance(t, Disc):
        return True, "disc"
    if isinstance(t, SphereBundle):
        return True, "sphere bundle over S2 with S3 fibre"
    if isinstance(t, CustomAtom):
        ok = t.flags.is_simply_connected
        return ok, "declared" if ok else f"@{t.name} not declared simply-connected"
    if isinstance(t, (Product, Wedge)):
        ops = (t.left, t.right) if isinstance(t, Product) else t.operands
        for o in ops:
            ok, why = simple_connectivity(o)
            if not ok:
                return False, why
        return True, "product" if isinstance(t, Product) else "wedge"
    if isinstance(t, (ConnSum, BoundaryConnSum)):
        for o in t.operands:
            ok, why = simple_connectivity(o)
            if not ok:
                return False, why
        if dimension(t) < 3:
            return False, "unknown: sum of dimension < 3"
        return True, "sum of dimension >= 3"
    raise TypeError(f"not a space term: {t!r}")


def is_simply_connected(t: SpaceTerm) -> bool:
    return simple_connectivity(t)[0]


@lru_cache(maxsize=None)
def flags(t: SpaceTerm) -> ManifoldFlags:
    sc = is_simply_connected(t)
    if isinstance(t, Point):
        return ManifoldFlags(True, True, False, True, True, True)
    if isinstance(t, Sphere):
        return ManifoldFlags(True, True, False, t.d >= 1, True, sc, True)
    if isinstance(t, Disc):
        return ManifoldFlags(True, t.d == 0, t.d >= 1, True, True, sc)
    if isinstance(t, SphereBundle):
        return ManifoldFlags(True, True, False, True, True, True)
    if isinstance(t, CustomAtom):
        return t.flags
    if isinstance(t, Product):
        a, b = flags(t.left), flags(t.right)
        manifold = a.is_manifold and b.is_manifold
        closed = manifold and a.is_closed and b.is_closed
        return ManifoldFlags(
            is_manifold=manifold,
            is_closed=closed,
            has_boundary=manifold and (a.has_boundary or b.has_boundary),
            is_connected=a.is_connected and b.is_connected,
            is_orientable=a.is_orientable and b.is_orientable,
            is_simply_connected=sc,
        )
    if isinstance(t, Wedge):
        return ManifoldFlags(False, False, False, True, False, sc)
    if isinstance(t, (ConnSum, BoundaryConnSum)):
        closed = isinstance(t, ConnSum)
        return ManifoldFlags(
            is_manifold=True,
            is_closed=closed,
            has_boundary=not closed,
            is_connected=True,
            is_orientable=all(flags(o).is_orientable for o in t.operands),
            is_simply_connected=sc,
        )
    raise TypeError(f"not a space term: {t!r}")


def _add_tables(*tables: Mapping[int, FgAbelianGroup]) -> dict[int, FgAbelianGroup]:
    out: dict[int, FgAbelianGroup] = {}
    for table in tables:
        for deg, g in table.items():
            out[deg] = direct_sum(out.get(deg, TRIVIAL), g)
    return {d: g for d, g in sorted(out.items()) if not g.is_trivial}


def _unreduced(table: Mapping[int, FgAbelianGroup]) -> dict[int, FgAbelianGroup]:
    return _add_tables(table, {0: free(1)})


def _kunneth(ha: Mapping[int, FgAbelianGroup], hb: Mapping[int, FgAbelianGroup]):
    out: dict[int, FgAbelianGroup] = {}
    for (i, a), (j, b) in cartesian(ha.items(), hb.items()):
        out[i + j] = direct_sum(out.get(i + j, TRIVIAL), tensor(a, b))
        out[i + j + 1] = direct_sum(out.get(i + j + 1, TRIVIAL), tor(a, b))
    return {d: g for d, g in sorted(out.items()) if not g.is_trivial}


@lru_cache(maxsize=None)
def _reduced_homology(t: SpaceTerm) -> tuple:
    if isinstance(t, (Point, Disc)):
        return ()
    if isinstance(t, Sphere):
        return ((t.d, free(1)),)
    if isinstance(t, SphereBundle):
        return ((2, free(1)), (3, free(1)), (5, free(1)))
    if isinstance(t, CustomAtom):
        table = dict(t.homology)
        h0 = table.get(0, free(1) if t.flags.is_connected else TRIVIAL)
        if h0.rank >= 1:
            h0 = FgAbelianGroup(h0.rank - 1, h0.torsion)
        table[0] = h0
        return tuple((d, g) for d, g in sorted(table.items()) if not g.is_trivial)
    if isinstance(t, Product):
        a = _unreduced(reduced_homology(t.left))
        b = _unreduced(reduced_homology(t.right))
        full = _kunneth(a, b)
        full[0] = FgAbelianGroup(full[0].rank - 1, full[0].torsion)
        return tuple((d, g) for d, g in sorted(full.items()) if not g.is_trivial)
    if isinstance(t, (Wedge, BoundaryConnSum)):
        return tuple(_add_tables(*(reduced_homology(o) for o in t.operands)).items())
    if isinstance(t, ConnSum):
        bad = [o for o in t.operands if not (flags(o).is_orientable and flags(o).is_closed)]
        if bad:
            raise UnsupportedRuleError(
                "connected-sum homology is only available for closed orientable operands; "
                "offending: " + ", ".join(render(o) for o in bad)
            )
        n = dimension(t)
        table = _add_tables(*(reduced_homology(o) for o in t.operands))
        table = {d: g for d, g in table.items() if 0 < d < n}
        table[n] = free(1)
        return tuple(sorted(table.items()))
    raise TypeError(f"not a space term: {t!r}")


def reduced_homology(t: SpaceTerm) -> dict[int, FgAbelianGroup]:
    """Nonzero reduced integral homology groups keyed by degree."""
    return dict(_reduced_homology(t))


def euler_characteristic(t: SpaceTerm) -> int:
    return 1 + sum((-1) ** d * g.rank for d, g in reduced_homology(t).items())


def is_contractible(t: SpaceTerm) -> bool:
    return is_simply_connected(t) and not reduced_homology(t)


def connectivity(t: SpaceTerm) -> int:
    """Largest ``c`` such that ``t`` is ``c``-connected (Hurewicz regime).

    Contractible terms report ``max(dimension(t), 1)`` by convention; use
    :func:`is_contractible` to tell them apart.
    """
    ok, why = simple_connectivity(t)
    if not ok:
        raise PreconditionError(f"connectivity needs a simply-connected term: {why}")
    table = reduced_homology(t)
    if not table:
        return max(dimension(t), 1)
    return min(table) - 1


def is_k_connected(t: SpaceTerm, c: int) -> bool:
    """Whether ``t`` is certified ``c``-connected."""
    if c < 0:
        return True
    if c == 0:
        return flags(t).is_connected
    if not is_simply_connected(t):
        return False
    return is_contractible(t) or connectivity(t) >= c


# --- capabilities -----------------------------------------------------------

# codim 0 stands for "is its own ambient space"; every query is closed upward
_SPHERE_CAPS = Capabilities(embed_codims={(1, True)})
_DISC_CAPS = Capabilities(embed_codims={(0, True)})
_SB_TRIVIAL_CAPS = Capabilities(embed_codims={(2, True)})


def _product_caps(a: Capabilities, b: Capabilities) -> Capabilities:
    def add(xs, ys):
        return {(p + q, True) for (p, tp), (q, tq) in cartesian(xs, ys) if tp and tq}

    return Capabilities(
        immerse_codims=add(a.immerse_codims, b.immerse_codims),
        embed_codims=add(a.embed_codims, b.embed_codims),
        immerses_into_Rn={p + q for p, q in cartesian(a.immerses_into_Rn, b.immerses_into_Rn)},
        embeds_into_Rn={p + q for p, q in cartesian(a.embeds_into_Rn, b.embeds_into_Rn)},
    )


def _connsum_caps(ops: Iterable[SpaceTerm]) -> Capabilities:
    caps = [capabilities(o) for o in ops]

    def common(mode: Mode):
        candidates = {a for c in caps for a, t in c._codims(mode) if t}
        return {(a, True) for a in candidates if all(c.codim(a, True, mode) for c in caps)}

    return Capabilities(immerse_codims=common(Mode.SIE), embed_codims=common(Mode.SEE))


@lru_cache(maxsize=None)
def capabilities(t: SpaceTerm) -> Capabilities:
    """Conservative capabilities derived from atom facts and closure rules."""
    if isinstance(t, Point):
        caps = _DISC_CAPS
    elif isinstance(t, Sphere):
        caps = _SPHERE_CAPS
    elif isinstance(t, Disc):
        caps = _DISC_CAPS
    elif isinstance(t, SphereBundle):
        caps = NO_CAPABILITIES if t.twisted else _SB_TRIVIAL_CAPS
    elif isinstance(t, CustomAtom):
        caps = t.capabilities
        f = t.flags
        if f.is_manifold and f.is_closed and f.is_connected and f.is_orientable and t.dim == 4:
            # closed orientable 4-manifolds embed in R^7
            caps = caps.union(Capabilities(embeds_into_Rn={7}))
    elif isinstance(t, Product):
        caps = _product_caps(capabilities(t.left), capabilities(t.right))
    elif isinstance(t, ConnSum):
        if all(flags(o).is_orientable for o in t.operands):
            caps = _connsum_caps(t.operands)
        else:
            caps = NO_CAPABILITIES
    elif isinstance(t, (Wedge, BoundaryConnSum)):
        caps = NO_CAPABILITIES
    else:
        raise TypeError(f"not a space term: {t!r}")
    return caps.saturate(dimension(t))


# --- normal forms -----------------------------------------------------------

_RANK = {
    Point: 0, Sphere: 1, Disc: 2, SphereBundle: 3, CustomAtom: 4,
    Product: 5, Wedge: 6, ConnSum: 7, BoundaryConnSum: 8,
}


@lru_cache(maxsize=None)
def term_key(t: SpaceTerm) -> tuple:
    """A total order on terms used to sort commutative operands."""
    r = _RANK[type(t)]
    if isinstance(t, Point):
        return (r,)
    if isinstance(t, (Sphere, Disc)):
        return (r, t.d)
    if isinstance(t, SphereBundle):
        return (r, int(t.twisted))
    if isinstance(t, CustomAtom):
        return (r, t.name, t.dim, repr(t.homology), repr(t.flags), repr(t.capabilities))
    if isinstance(t, Product):
        return (r, (term_key(t.left), term_key(t.right)))
    return (r, tuple(term_key(o) for o in t.operands))


def _factors(t: SpaceTerm) -> list[SpaceTerm]:
    if isinstance(t, Product):
        return _factors(t.left) + _factors(t.right)
    return [t]


@lru_cache(maxsize=None)
def normalize(t: SpaceTerm) -> SpaceTerm:
    """Canonical representative: flattened, sorted, identities absorbed.

    Products are flattened and sorted, disc factors merge (``D^a x D^b = D^(a+b)``)
    and point factors drop. Wedges drop point operands, connected sums drop
    ``S^n`` and boundary connected sums drop ``D^n``. Spans are discarded.
    """
    if isinstance(t, (Point, Sphere, Disc, SphereBundle, CustomAtom)):
        return replace(t, span=None) if t.span is not None else t
    if isinstance(t, Product):
        factors = [f for x in (t.left, t.right) for f in _factors(normalize(x))]
        disc = sum(f.d for f in factors if isinstance(f, Disc))
        factors = [f for f in factors if not isinstance(f, (Disc, Point))]
        if disc:
            factors.append(Disc(disc))
        factors.sort(key=term_key)
        return product(*factors)
    kind = type(t)
    ops = []
    for o in t.operands:
        o = normalize(o)
        ops.extend(o.operands if isinstance(o, kind) else [o])
    if kind is Wedge:
        ops = [o for o in ops if not isinstance(o, Point)]
        identity = Point()
    elif kind is ConnSum:
        n = dimension(t)
        ops = [o for o in ops if o != Sphere(n)]
        identity = Sphere(n)
    else:
        n = dimension(t)
        ops = [o for o in ops if o != Disc(n)]
        identity = Disc(n)
    if not ops:
        return identity
    if len(ops) == 1:
        return ops[0]
    ops.sort(key=term_key)
    return kind(tuple(ops))


def equal(a: SpaceTerm, b: SpaceTerm) -> bool:
    """Normal-form equality: sufficient, not necessary, for diffeomorphism."""
    return normalize(a) == normalize(b)


# --- rendering --------------------------------------------------------------

OPERATOR_SYMBOL = {Product: "x", Wedge: "v", BoundaryConnSum: "&", ConnSum: "#"}
# binding strength; '#' binds tightest, 'x' loosest
PRECEDENCE = {Product: 1, Wedge: 2, BoundaryConnSum: 3, ConnSum: 4}
_ATOM_PREC = 5


def _prec(t: SpaceTerm) -> int:
    return PRECEDENCE.get(type(t), _ATOM_PREC)


def render(t: SpaceTerm) -> str:
    """Canonical text of a term in the parser's grammar."""
    if isinstance(t, Point):
        return "PT"
    if isinstance(t, Sphere):
        return f"S{t.d}"
    if isinstance(t, Disc):
        return f"D{t.d}"
    if isinstance(t, SphereBundle):
        return "SB-" if t.twisted else "SB+"
    if isinstance(t, CustomAtom):
        return f"@{t.name}"
    ops = (t.left, t.right) if isinstance(t, Product) else t.operands
    p = PRECEDENCE[type(t)]
    parts = []
    for i, o in enumerate(ops):
        text = render(o)
        op_prec = _prec(o)
        # n-ary chains parse flat, so a nested node of the same kind needs
        # parentheses; only a left-nested product may stay bare
        same_ok = isinstance(t, Product) and i == 0
        if op_prec < p or (op_prec == p and not same_ok):
            text = f"({text})"
        parts.append(text)
    return f" {OPERATOR_SYMBOL[type(t)]} ".join(parts)


def custom_atoms(t: SpaceTerm) -> list[CustomAtom]:
    """Custom atoms occurring in ``t``, in first-occurrence order."""
    seen: dict[str, CustomAtom] = {}

    def walk(x):
        if isinstance(x, CustomAtom):
            seen.setdefault(x.name, x)
        elif isinstance(x, Product):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, (Wedge, ConnSum, BoundaryConnSum)):
            for o in x.operands:
                walk(o)

    walk(t)
    return list(seen.values())
