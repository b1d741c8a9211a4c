"""The merge procedure that produces elementary polyhedra.

A root is a sequence of triples ``(space, smooth, p)``. Each merge step
removes two entries ``k1 < k2`` from the current sequence, shifts the rest
left and appends a new triple built by a bouquet, a product or a connected
sum. After ``l`` steps one triple is left; its space is the elementary
polyhedron. Bouquet and product steps record trace embeddings of both
operands into the merged space.

>>> from elempoly.terms import Sphere
>>> root = RootSequence.of(TripleValue.diff(Sphere(2), 1), TripleValue.diff(Sphere(3), 1))
>>> out = run_reduction(root, [MergeStep(MergeKind.BOUQUET, 0, 1)])
>>> print(out.result)
(S2 v S3, PL, 0, 1)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .terms import (
    ConnSum,
    Product,
    SpaceTerm,
    TermValidationError,
    Wedge,
    dimension,
    flags,
    render,
)

__all__ = [
    "TypeTag",
    "TripleValue",
    "RootSequence",
    "MergeKind",
    "MergeStep",
    "TraceEmbedding",
    "AuditEntry",
    "RootRecord",
    "ReductionState",
    "ReductionResult",
    "ReductionError",
    "RuleViolation",
    "StepCountError",
    "CLAUSES",
    "reindex",
    "apply_merge",
    "run_reduction",
    "roots_of",
    "BuildNode",
    "build_tree",
]


class TypeTag(enum.Enum):
    DIFF = "Diff"
    PL = "PL"


@dataclass(frozen=True)
class TripleValue:
    """One value of a sequence: a space, its smooth flag and its ``p`` flag."""

    space: SpaceTerm
    type_tag: TypeTag
    smooth: int
    p: int

    def __post_init__(self):
        if self.smooth not in (0, 1) or self.p not in (0, 1):
            raise ValueError(f"smooth and p must be 0 or 1, got {self.smooth}, {self.p}")
        is_diff = self.type_tag is TypeTag.DIFF
        if (self.smooth == 1) != (is_diff and flags(self.space).is_manifold):
            raise ValueError(
                f"smooth = 1 exactly when the value is a Diff manifold type: "
                f"({render(self.space)}, {self.type_tag.value}, {self.smooth}, {self.p})"
            )

    @classmethod
    def diff(cls, space: SpaceTerm, p: int = 1) -> TripleValue:
        return cls(space, TypeTag.DIFF, 1, p)

    @classmethod
    def pl(cls, space: SpaceTerm, p: int = 1) -> TripleValue:
        return cls(space, TypeTag.PL, 0, p)

    def __str__(self) -> str:
        return f"({render(self.space)}, {self.type_tag.value}, {self.smooth}, {self.p})"

    def to_dict(self) -> dict:
        return {
            "space": render(self.space),
            "type": self.type_tag.value,
            "smooth": self.smooth,
            "p": self.p,
        }


@dataclass(frozen=True)
class RootSequence:
    entries: tuple[TripleValue, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("a root needs at least one entry")

    @classmethod
    def of(cls, *entries: TripleValue) -> RootSequence:
        return cls(tuple(entries))

    @property
    def l(self) -> int:
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> TripleValue:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)


class MergeKind(enum.Enum):
    BOUQUET = "bouquet"
    PRODUCT = "product"
    CONNSUM = "connsum"


@dataclass(frozen=True)
class MergeStep:
    kind: MergeKind
    k1: int
    k2: int
    # which operand is the smooth manifold factor of a product merge
    smooth_side: str | None = None

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("merge indices must be non-negative")
        if self.k1 >= self.k2:
            raise ValueError(f"merge indices need k1 < k2, got {self.k1}, {self.k2}")
        if self.kind is MergeKind.PRODUCT:
            if self.smooth_side is None:
                object.__setattr__(self, "smooth_side", "left")
            if self.smooth_side not in ("left", "right"):
                raise ValueError(f"smooth_side must be 'left' or 'right', got {self.smooth_side!r}")
        elif self.smooth_side is not None:
            raise ValueError("smooth_side only applies to product merges")

    def __str__(self) -> str:
        text = f"{self.kind.value} {self.k1} {self.k2}"
        return text + (f" smooth={self.smooth_side}" if self.smooth_side else "")


@dataclass(frozen=True)
class TraceEmbedding:
    child: SpaceTerm
    parent: SpaceTerm
    special: bool
    step: int

    def to_dict(self) -> dict:
        return {
            "child": render(self.child),
            "parent": render(self.parent),
            "special": self.special,
            "step": self.step,
        }


@dataclass(frozen=True)
class RootRecord:
    root: RootSequence


@dataclass(frozen=True)
class AuditEntry:
    step: int
    merge: MergeStep
    operands: tuple[TripleValue, TripleValue]
    appended: TripleValue
    embeddings: tuple[TraceEmbedding, ...]

    @property
    def rule(self) -> MergeKind:
        return self.merge.kind

    def to_dict(self) -> dict:
        out = {
            "step": self.step,
            "rule": self.merge.kind.value,
            "k1": self.merge.k1,
            "k2": self.merge.k2,
            "appended": self.appended.to_dict(),
            "embeddings": [e.to_dict() for e in self.embeddings],
        }
        if self.merge.smooth_side:
            out["smooth_side"] = self.merge.smooth_side
        return out


# clause id -> what the clause demands
CLAUSES = {
    "index-range": "merge indices must lie inside the current sequence",
    "bouquet-connected": "bouquet operands must be connected",
    "product-smooth-factor": "the smooth factor of a product must be a Diff value with smooth = 1",
    "product-p-flags": "both operands of a product must have p = 1",
    "connsum-smooth-flags": "both operands of a connected sum must be Diff values with smooth = 1",
    "connsum-manifolds": "connected-sum operands must be closed connected manifolds of one dimension >= 2",
}


class ReductionError(ValueError):
    """A reduction could not proceed; ``state`` holds the last good state."""

    state: ReductionState | None = None
    step_index: int | None = None


class RuleViolation(ReductionError):
    def __init__(self, clause: str, detail: str):
        self.clause = clause
        self.detail = detail
        super().__init__(f"[{clause}] {CLAUSES[clause]}: {detail}")


class StepCountError(ReductionError):
    pass


def reindex(seq: Sequence, k1: int, k2: int, new) -> tuple:
    """Drop positions ``k1`` and ``k2``, keep the order of the rest, append ``new``."""
    return tuple(v for j, v in enumerate(seq) if j != k1 and j != k2) + (new,)


@dataclass(frozen=True)
class ReductionState:
    root: RootSequence
    sequence: tuple[TripleValue, ...]
    step: int = 0
    trace: tuple[TraceEmbedding, ...] = ()
    audit: tuple = ()

    @classmethod
    def start(cls, root: RootSequence) -> ReductionState:
        return cls(root, root.entries, 0, (), (RootRecord(root),))

    @property
    def done(self) -> bool:
        return len(self.sequence) == 1


def _merge_value(step: MergeStep, a: TripleValue, b: TripleValue) -> TripleValue:
    if step.kind is MergeKind.BOUQUET:
        bad = [v for v in (a, b) if not flags(v.space).is_connected]
        if bad:
            raise RuleViolation(
                "bouquet-connected", ", ".join(render(v.space) for v in bad) + " not connected"
            )
        return TripleValue.pl(Wedge((a.space, b.space)), a.p * b.p)

    if step.kind is MergeKind.PRODUCT:
        if a.p != 1 or b.p != 1:
            raise RuleViolation("product-p-flags", f"p flags are {a.p} and {b.p}")
        smooth = a if step.smooth_side == "left" else b
        if not (smooth.type_tag is TypeTag.DIFF and smooth.smooth == 1):
            raise RuleViolation(
                "product-smooth-factor",
                f"{step.smooth_side} operand {smooth} is not a smooth manifold value",
            )
        return TripleValue.pl(Product(a.space, b.space), 1)

    if not all(v.type_tag is TypeTag.DIFF and v.smooth == 1 for v in (a, b)):
        raise RuleViolation("connsum-smooth-flags", f"operands are {a} and {b}")
    fa, fb = flags(a.space), flags(b.space)
    ok = all(f.is_manifold and f.is_closed and f.is_connected for f in (fa, fb))
    da, db = dimension(a.space), dimension(b.space)
    if not ok or da != db or da < 2:
        raise RuleViolation(
            "connsum-manifolds", f"{render(a.space)} (dim {da}) and {render(b.space)} (dim {db})"
        )
    try:
        space = ConnSum((a.space, b.space))
    except TermValidationError as exc:  # pragma: no cover - guarded above
        raise RuleViolation("connsum-manifolds", str(exc)) from exc
    return TripleValue.diff(space, a.p * b.p)


def apply_merge(state: ReductionState, step: MergeStep) -> ReductionState:
    """One merge; returns a new state and leaves ``state`` untouched."""
    n = len(state.sequence)
    if step.k2 >= n:
        raise RuleViolation("index-range", f"indices {step.k1}, {step.k2} with sequence length {n}")
    a, b = state.sequence[step.k1], state.sequence[step.k2]
    new = _merge_value(step, a, b)
    embeddings = ()
    if step.kind is not MergeKind.CONNSUM:
        embeddings = tuple(
            TraceEmbedding(v.space, new.space, v.smooth == 1, state.step) for v in (a, b)
        )
    entry = AuditEntry(state.step, step, (a, b), new, embeddings)
    return ReductionState(
        state.root,
        reindex(state.sequence, step.k1, step.k2, new),
        state.step + 1,
        state.trace + embeddings,
        state.audit + (entry,),
    )


@dataclass(frozen=True)
class ReductionResult:
    result: TripleValue
    trace: tuple[TraceEmbedding, ...]
    audit: tuple

    @property
    def polyhedron(self) -> SpaceTerm:
        return self.result.space

    @property
    def steps(self) -> list[AuditEntry]:
        return [e for e in self.audit if isinstance(e, AuditEntry)]


def run_reduction(root: RootSequence, steps: Iterable[MergeStep]) -> ReductionResult:
    steps = list(steps)
    if len(steps) != root.l:
        raise StepCountError(
            f"a root of length {len(root)} needs exactly {root.l} merge steps, got {len(steps)}"
        )
    state = ReductionState.start(root)
    for i, step in enumerate(steps):
        try:
            state = apply_merge(state, step)
        except ReductionError as exc:
            exc.state = state
            exc.step_index = i
            raise
    return ReductionResult(state.sequence[0], state.trace, state.audit)


def roots_of(result: ReductionResult) -> RootSequence:
    """The root recorded for this run (roots are not unique in general)."""
    if not result.audit or not isinstance(result.audit[0], RootRecord):
        raise ValueError("audit log carries no root record")
    return result.audit[0].root


@dataclass(frozen=True)
class BuildNode:
    """Provenance of a sequence value: a root leaf or a merge of two nodes."""

    value: TripleValue
    kind: MergeKind | None = None
    children: tuple = field(default=())
    root_index: int | None = None
    smooth_side: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind is None


def build_tree(result: ReductionResult) -> BuildNode:
    """Replay the audit log into the tree of merges that produced the result."""
    root = roots_of(result)
    nodes = tuple(BuildNode(v, root_index=i) for i, v in enumerate(root))
    for entry in result.steps:
        m = entry.merge
        node = BuildNode(
            entry.appended, m.kind, (nodes[m.k1], nodes[m.k2]), smooth_side=m.smooth_side
        )
        nodes = reindex(nodes, m.k1, m.k2, node)
    if len(nodes) != 1:
        raise ValueError("audit log does not describe a complete reduction")
    return nodes[0]
