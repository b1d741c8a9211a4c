"""Hypothesis checks, thickening witnesses and decompositions.

``check_main_theorem_1`` verifies that an elementary polyhedron ``K`` and
its root meet the connectivity, dimension and root-form conditions, then
builds an ``n``-dimensional compact manifold term collapsing to ``K``:
atoms are thickened to ``Y x D^a``, bouquets become boundary connected
sums, product merges multiply by their smooth factor, connected sums are
thickened whole, and a final disc factor pads up to dimension ``n``.

``decompose_main_theorem_2`` splits ``K`` into bouquet pieces that are
either ``F x K_F`` products or closed manifolds ``F0``;
``check_main_corollary`` tests the ``n = 7, k = 2`` refinements of those
pieces. The remaining functions are the decision procedures for
special generic maps into low-dimensional targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import TRIVIAL
from .elementary import (
    BuildNode,
    MergeKind,
    ReductionResult,
    RootSequence,
    TripleValue,
    TypeTag,
    build_tree,
    roots_of,
    run_reduction,
)
from .terms import (
    ConnSum,
    CustomAtom,
    Disc,
    Mode,
    Point,
    PreconditionError,
    Product,
    SpaceTerm,
    Sphere,
    SphereBundle,
    Wedge,
    bcs,
    capabilities,
    dimension,
    equal,
    flags,
    is_k_connected,
    normalize,
    product,
    reduced_homology,
    render,
    wedge,
)

__all__ = [
    "Mode",
    "TheoremParams",
    "EntryReport",
    "HypothesisFailure",
    "SieWitness",
    "ProductPiece",
    "ManifoldPiece",
    "Decomposition",
    "DecompositionError",
    "PieceVerdict",
    "CorollaryReport",
    "check_root_conditions",
    "check_main_theorem_1",
    "decompose_main_theorem_2",
    "check_main_corollary",
    "check_free_h",
    "free_h_lint",
    "classify_dim5",
    "classify_sgm_r2",
]


@dataclass(frozen=True)
class TheoremParams:
    n: int
    k: int
    a: int

    def __post_init__(self):
        if not (self.n > self.k > 1):
            raise PreconditionError(f"need n > k > 1, got n={self.n}, k={self.k}")
        if self.a <= 0:
            raise PreconditionError(f"need a > 0, got a={self.a}")


@dataclass(frozen=True)
class EntryReport:
    index: int
    value: TripleValue
    status: str  # "form-a", "form-b" or "violation"
    reason: str

    @property
    def ok(self) -> bool:
        return self.status != "violation"

    def to_dict(self) -> dict:
        return {"index": self.index, "value": str(self.value), "status": self.status, "reason": self.reason}


def _classify_entry(i: int, v: TripleValue, params: TheoremParams, mode: Mode) -> EntryReport:
    if v.type_tag is not TypeTag.DIFF or v.smooth != 1:
        return EntryReport(i, v, "violation", "root entries must be smooth Diff values (second component 1)")
    f = flags(v.space)
    if not (f.is_manifold and f.is_closed and f.is_connected):
        return EntryReport(i, v, "violation", f"{render(v.space)} is not a closed connected manifold")
    caps = capabilities(v.space)
    verb = "embeds" if mode is Mode.SEE else "immerses"
    if v.p == 1:
        if caps.codim(params.a, trivial=True, mode=mode):
            return EntryReport(i, v, "form-a", f"{verb} in codimension {params.a} with trivial normal bundle")
        return EntryReport(
            i, v, "violation",
            f"p = 1 but {render(v.space)} has no known codimension-{params.a} {mode.value} "
            "capability with trivial normal bundle",
        )
    if caps.into(params.n, mode):
        return EntryReport(i, v, "form-b", f"{verb} into R^{params.n}")
    return EntryReport(
        i, v, "violation", f"p = 0 but {render(v.space)} has no known {mode.value} capability into R^{params.n}"
    )


def check_root_conditions(root: RootSequence, params: TheoremParams, mode: Mode = Mode.SIE) -> list[EntryReport]:
    """Classify each root entry as form (a), form (b) or a violation."""
    return [_classify_entry(i, v, params, mode) for i, v in enumerate(root)]


class HypothesisFailure(ValueError):
    """One or more theorem hypotheses fail; ``failures`` lists ``(kind, detail)``."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        self.kinds = [k for k, _ in failures]
        super().__init__("; ".join(f"[{k}] {d}" for k, d in failures))


@dataclass(frozen=True)
class SieWitness:
    manifold: SpaceTerm
    collapses_to: SpaceTerm
    mode: Mode
    params: TheoremParams
    construction: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": "SEE" if self.mode is Mode.SEE else "SIE",
            "manifold": render(self.manifold),
            "dimension": dimension(self.manifold),
            "collapses_to": render(self.collapses_to),
            "construction": list(self.construction),
        }


def _bouquet_leaves(node: BuildNode) -> list[BuildNode]:
    if node.kind is MergeKind.BOUQUET:
        return [leaf for c in node.children for leaf in _bouquet_leaves(c)]
    return [node]


def _split_product(node: BuildNode) -> tuple[BuildNode, BuildNode]:
    left, right = node.children
    return (left, right) if node.smooth_side == "left" else (right, left)


def _thicken(node: BuildNode, a: int, log: list[str]) -> SpaceTerm:
    """A compact manifold of dimension ``dim(node) + a`` collapsing to ``node``."""
    space = node.value.space
    if node.is_leaf or node.kind is MergeKind.CONNSUM:
        out = Product(space, Disc(a))
        log.append(f"thicken {render(space)} -> {render(out)}")
        return out
    if node.kind is MergeKind.PRODUCT:
        smooth, other = _split_product(node)
        inner = _thicken(other, a, log)
        out = Product(smooth.value.space, inner)
        log.append(f"product with smooth factor {render(smooth.value.space)} -> {render(out)}")
        return out
    leaves = _bouquet_leaves(node)
    target = max(dimension(leaf.value.space) for leaf in leaves) + a
    # each piece is thickened straight to the common dimension
    parts = [_thicken(leaf, target - dimension(leaf.value.space), log) for leaf in leaves]
    out = bcs(*parts)
    log.append(f"boundary connected sum of {len(parts)} pieces -> {render(out)}")
    return out


def check_main_theorem_1(
    root: RootSequence, steps, params: TheoremParams, mode: Mode = Mode.SIE
) -> SieWitness:
    """Check the hypotheses for ``K`` and return a thickening witness."""
    result = run_reduction(root, steps)
    K = result.polyhedron
    failures = []
    if not is_k_connected(K, params.k - 1):
        failures.append(("connectivity", f"K = {render(K)} is not certified {params.k - 1}-connected"))
    if dimension(K) > params.n - params.a:
        failures.append(
            ("dimension", f"dim K = {dimension(K)} exceeds n - a = {params.n - params.a}")
        )
    for rep in check_root_conditions(root, params, mode):
        if not rep.ok:
            failures.append(("root-condition", f"entry {rep.index} {rep.value}: {rep.reason}"))
    if failures:
        raise HypothesisFailure(failures)

    for v in root:
        # follows from the hypotheses; a failure here is a bug in the rule system
        if not is_k_connected(v.space, params.k - 1):
            raise AssertionError(f"root entry {render(v.space)} is not {params.k - 1}-connected")

    log: list[str] = []
    w = _thicken(build_tree(result), params.a, log)
    gap = params.n - dimension(w)
    if gap:
        w = Product(w, Disc(gap))
        log.append(f"pad by D{gap} to dimension {params.n} -> {render(w)}")
    if dimension(w) != params.n:
        raise AssertionError("witness dimension mismatch")
    if reduced_homology(w) != reduced_homology(K):
        raise AssertionError("witness homology differs from K")
    return SieWitness(w, K, mode, params, tuple(log))


@dataclass(frozen=True)
class ProductPiece:
    F: SpaceTerm
    K_F: SpaceTerm

    @property
    def term(self) -> SpaceTerm:
        return Product(self.F, self.K_F)

    def to_dict(self) -> dict:
        return {"piece": "product", "F": render(self.F), "K_F": render(self.K_F)}


@dataclass(frozen=True)
class ManifoldPiece:
    F0: SpaceTerm

    @property
    def term(self) -> SpaceTerm:
        return self.F0

    def to_dict(self) -> dict:
        return {"piece": "manifold", "F0": render(self.F0)}


@dataclass(frozen=True)
class Decomposition:
    pieces: tuple
    K: SpaceTerm
    params: TheoremParams
    mode: Mode

    @property
    def assembly(self) -> SpaceTerm:
        """The bouquet of all pieces, normalized."""
        return normalize(wedge(*(p.term for p in self.pieces)))

    def to_dict(self) -> dict:
        return {
            "K": render(self.K),
            "pieces": [p.to_dict() for p in self.pieces],
            "assembly": render(self.assembly),
        }


class DecompositionError(ValueError):
    def __init__(self, failures: list[tuple[SpaceTerm, str]]):
        self.failures = failures
        super().__init__("; ".join(f"piece {render(t)}: {why}" for t, why in failures))


def _leaves(node: BuildNode) -> list[BuildNode]:
    if node.is_leaf:
        return [node]
    return [x for c in node.children for x in _leaves(c)]


def _qualifies_as_F(t: SpaceTerm, params: TheoremParams, mode: Mode) -> bool:
    f = flags(t)
    return (
        f.is_manifold and f.is_closed and f.is_connected
        and is_k_connected(t, params.k - 1)
        and capabilities(t).codim(params.a, trivial=True, mode=mode)
    )


def _manifold_piece_problems(t: SpaceTerm, params: TheoremParams, mode: Mode) -> list[str]:
    problems = []
    f = flags(t)
    if not (f.is_manifold and f.is_closed and f.is_connected):
        problems.append("F0 is not a closed connected manifold")
    elif not is_k_connected(t, params.k - 1):
        problems.append(f"F0 is not {params.k - 1}-connected")
    if not capabilities(t).into(params.n, mode):
        problems.append(f"F0 has no known {mode.value} capability into R^{params.n}")
    return problems


def _classify_piece(node: BuildNode, params: TheoremParams, mode: Mode):
    space = node.value.space
    if node.kind is not MergeKind.PRODUCT:
        problems = _manifold_piece_problems(space, params, mode)
        return ManifoldPiece(space), problems

    smooth_factors = []
    other = node
    while other.kind is MergeKind.PRODUCT:
        smooth, other = _split_product(other)
        smooth_factors.append(smooth.value.space)
    problems = []
    k1 = params.k - 1
    for f_term in smooth_factors:
        if not is_k_connected(f_term, k1):
            what = "simply-connected" if k1 == 1 else f"{k1}-connected"
            problems.append(f"F factor {render(f_term)} is not {what}")
        elif not _qualifies_as_F(f_term, params, mode):
            problems.append(
                f"F factor {render(f_term)} lacks a codimension-{params.a} {mode.value} "
                "capability with trivial normal bundle"
            )
    for leaf in _leaves(other):
        if not _qualifies_as_F(leaf.value.space, params, mode) and not problems:
            problems.append(
                f"K_F root entry {render(leaf.value.space)} is not a {k1}-connected closed manifold "
                f"with a codimension-{params.a} trivial-normal capability"
            )
    kf = normalize(other.value.space)
    if isinstance(kf, Product):
        # manifold factors that K_F would split off move into F
        factors = []
        x = kf
        while isinstance(x, Product):
            factors.append(x.right)
            x = x.left
        factors.append(x)
        factors.reverse()
        movable = [t for t in factors if _qualifies_as_F(t, params, mode)]
        rest = [t for t in factors if t not in movable]
        if not rest:
            rest = [movable.pop()]
        smooth_factors += movable
        kf = product(*rest)
    F = normalize(product(*smooth_factors))
    if isinstance(kf, Point):
        return ManifoldPiece(F), problems + _manifold_piece_problems(F, params, mode)
    if not is_k_connected(kf, k1) and not problems:
        problems.append(f"K_F = {render(kf)} is not {k1}-connected")
    return ProductPiece(F, kf), problems


def decompose_main_theorem_2(
    result: ReductionResult, params: TheoremParams, mode: Mode = Mode.SIE
) -> Decomposition:
    """Split ``K`` into its outermost bouquet pieces and classify each one."""
    root = roots_of(result)
    bad = [r for r in check_root_conditions(root, params, mode) if not r.ok]
    if bad:
        raise DecompositionError([(r.value.space, f"root condition: {r.reason}") for r in bad])
    pieces, failures = [], []
    for node in _bouquet_leaves(build_tree(result)):
        piece, problems = _classify_piece(node, params, mode)
        pieces.append(piece)
        failures.extend((piece.term, why) for why in problems)
    if failures:
        raise DecompositionError(failures)
    return Decomposition(tuple(pieces), result.polyhedron, params, mode)


@dataclass(frozen=True)
class PieceVerdict:
    piece: object
    ok: bool
    reasons: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {**self.piece.to_dict(), "ok": self.ok, "reasons": list(self.reasons)}


@dataclass(frozen=True)
class CorollaryReport:
    verdicts: tuple[PieceVerdict, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "pieces": [v.to_dict() for v in self.verdicts]}


def _summands(t: SpaceTerm, kind) -> list[SpaceTerm]:
    t = normalize(t)
    return list(t.operands) if isinstance(t, kind) else [t]


def _closed_sc(t: SpaceTerm) -> bool:
    f = flags(t)
    return f.is_manifold and f.is_closed and f.is_simply_connected


def check_main_corollary(decomposition: Decomposition, mode: Mode | None = None) -> CorollaryReport:
    """Per-piece check of the ``n = 7, k = 2`` refinements."""
    p = decomposition.params
    if (p.n, p.k) != (7, 2):
        raise PreconditionError(f"the corollary is stated for n = 7, k = 2; got n={p.n}, k={p.k}")
    mode = mode or decomposition.mode
    verdicts = []
    for piece in decomposition.pieces:
        reasons = []
        if isinstance(piece, ProductPiece):
            F, dF = piece.F, dimension(piece.F)
            if not _closed_sc(F):
                reasons.append(f"F = {render(F)} is not closed and simply-connected")
            if not 2 <= dF <= 4:
                reasons.append(f"dim F = {dF} outside 2..4")
            ops = _summands(piece.K_F, Wedge)
            if dF >= 3:
                nonsphere = [o for o in ops if not isinstance(o, Sphere)]
                if nonsphere:
                    reasons.append(
                        "dim F >= 3 but K_F is not a bouquet of spheres: "
                        + ", ".join(render(o) for o in nonsphere)
                    )
            for o in ops:
                if not _closed_sc(o):
                    reasons.append(f"K_F summand {render(o)} is not closed and simply-connected")
                if not dimension(o) < 7 - dF:
                    reasons.append(f"K_F summand {render(o)} has dimension {dimension(o)} >= {7 - dF}")
                if not capabilities(o).into(7, mode):
                    reasons.append(f"K_F summand {render(o)} has no known {mode.value} capability into R^7")
        else:
            for o in _summands(piece.F0, ConnSum):
                if not _closed_sc(o):
                    reasons.append(f"F0 summand {render(o)} is not closed and simply-connected")
                if not dimension(o) < 7:
                    reasons.append(f"F0 summand {render(o)} has dimension {dimension(o)} >= 7")
                if not capabilities(o).into(7, mode):
                    reasons.append(f"F0 summand {render(o)} has no known {mode.value} capability into R^7")
        verdicts.append(PieceVerdict(piece, not reasons, tuple(reasons)))
    return CorollaryReport(tuple(verdicts))


def check_free_h(x: SpaceTerm, k: int) -> bool:
    """Whether ``H_{k-2}(x)`` is free for a compact simply-connected
    ``k``-manifold ``x`` with non-empty boundary, ``k > 3``."""
    if k <= 3:
        raise PreconditionError(f"the free-homology check needs k > 3, got k = {k}")
    f = flags(x)
    if not f.is_manifold:
        raise PreconditionError(f"{render(x)} is not a manifold")
    if not f.has_boundary:
        raise PreconditionError(f"{render(x)} has empty boundary")
    if not f.is_simply_connected:
        raise PreconditionError(f"{render(x)} is not certified simply-connected")
    if dimension(x) != k:
        raise PreconditionError(f"dim {render(x)} = {dimension(x)} but k = {k}")
    return reduced_homology(x).get(k - 2, TRIVIAL).is_free


def free_h_lint(atom: CustomAtom) -> str | None:
    """Reason to reject a declared atom that has torsion in ``H_{k-2}``, else None."""
    f = atom.flags
    if not (f.is_manifold and f.has_boundary and f.is_simply_connected and atom.dim > 3):
        return None
    if check_free_h(atom, atom.dim):
        return None
    g = reduced_homology(atom)[atom.dim - 2]
    return (
        f"@{atom.name}: compact simply-connected {atom.dim}-manifold with boundary "
        f"cannot have torsion in H_{atom.dim - 2} (declared {g})"
    )


def _require_closed_sc(m: SpaceTerm, what: str):
    f = flags(m)
    if not (f.is_manifold and f.is_closed):
        raise PreconditionError(f"{what}: {render(m)} is not a closed manifold")
    if not f.is_simply_connected:
        raise PreconditionError(f"{what}: {render(m)} is not certified simply-connected")


def _is_homotopy_sphere(t: SpaceTerm) -> bool:
    t = normalize(t)
    return isinstance(t, Sphere) or (isinstance(t, CustomAtom) and t.flags.is_homotopy_sphere)


def _is_bundle_summand(t: SpaceTerm) -> bool:
    if isinstance(t, SphereBundle):
        return True
    # S2 x S3 is the trivial bundle
    return equal(t, Product(Sphere(2), Sphere(3)))


def classify_dim5(m: SpaceTerm, n: int) -> bool:
    """Whether the closed simply-connected 5-manifold ``m`` admits a special
    generic map into ``R^n`` (1 <= n <= 4)."""
    if not 1 <= n <= 4:
        raise PreconditionError(f"target dimension must be 1..4, got {n}")
    if dimension(m) != 5:
        raise PreconditionError(f"{render(m)} has dimension {dimension(m)}, not 5")
    _require_closed_sc(m, "classify_dim5")
    if _is_homotopy_sphere(m) and dimension(m) == 5:
        return True
    if n <= 2:
        return False
    return all(_is_bundle_summand(o) for o in _summands(m, ConnSum))


def classify_sgm_r2(m: SpaceTerm) -> bool:
    """Whether the closed simply-connected ``m`` admits a special generic map into ``R^2``."""
    if dimension(m) < 2:
        raise PreconditionError(f"{render(m)} has dimension {dimension(m)} < 2")
    _require_closed_sc(m, "classify_sgm_r2")
    return _is_homotopy_sphere(m)

