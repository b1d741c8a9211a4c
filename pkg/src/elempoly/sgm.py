"""Structure records for special generic maps built from round handles.

A special generic map ``f: M -> R^n`` factors through a compact
``n``-manifold ``W`` whose boundary is the image of the singular set. Over
the interior of ``W`` the map is an ``S^(m-n)``-bundle and over a collar of
the boundary a ``D^(m-n+1)``-bundle. For ``W`` a boundary connected sum of
``S^l x D^(n-l)`` pieces, ``M`` is the connected sum of ``S^l x S^(m-l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .abelian import TRIVIAL, FgAbelianGroup
from .terms import (
    BoundaryConnSum,
    Disc,
    PreconditionError,
    Product,
    SpaceTerm,
    Sphere,
    TermError,
    bcs,
    connsum,
    dimension,
    flags,
    normalize,
    reduced_homology,
    render,
)

__all__ = [
    "SgmDescriptor",
    "ImageShapeError",
    "construct_from_handles",
    "handles_of_image",
    "source_from_image",
    "verify_homology_relation",
    "r3_image_shape_check",
]


@dataclass(frozen=True)
class SgmDescriptor:
    m: int
    n: int
    source: SpaceTerm
    image_manifold: SpaceTerm
    barf_mode: str = "embedding"

    def __post_init__(self):
        if not self.m > self.n >= 1:
            raise PreconditionError(f"need m > n >= 1, got m={self.m}, n={self.n}")
        if dimension(self.source) != self.m:
            raise PreconditionError(f"source {render(self.source)} does not have dimension {self.m}")
        if dimension(self.image_manifold) != self.n:
            raise PreconditionError(f"image {render(self.image_manifold)} does not have dimension {self.n}")
        if not flags(self.image_manifold).has_boundary:
            raise PreconditionError(f"image {render(self.image_manifold)} has empty boundary")
        if self.barf_mode not in ("immersion", "embedding"):
            raise ValueError(f"barf_mode must be 'immersion' or 'embedding', got {self.barf_mode!r}")

    @property
    def fiber_dim(self) -> int:
        return self.m - self.n

    @property
    def collar_fiber_dim(self) -> int:
        return self.m - self.n + 1

    def render(self) -> str:
        return (
            f"SGM m={self.m} n={self.n} M={render(self.source)} W={render(self.image_manifold)} "
            f"fiber=S^{self.fiber_dim} collar=D^{self.collar_fiber_dim}"
        )

    __str__ = render

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "source": render(self.source),
            "image": render(self.image_manifold),
            "fiber": f"S^{self.fiber_dim}",
            "collar": f"D^{self.collar_fiber_dim}",
            "barf_mode": self.barf_mode,
        }


class ImageShapeError(PreconditionError):
    def __init__(self, message: str, offending: SpaceTerm | None = None):
        self.offending = offending
        super().__init__(message)


def _source(m: int, handles: Sequence[int]) -> SpaceTerm:
    if not handles:
        return Sphere(m)
    return connsum(*(Product(Sphere(l), Sphere(m - l)) for l in handles))


def construct_from_handles(m: int, n: int, handles: Sequence[int]) -> SgmDescriptor:
    if not m > n:
        raise PreconditionError(f"need m > n, got m={m}, n={n}")
    if n < 2:
        raise PreconditionError(f"need n >= 2, got n={n}")
    bad = [l for l in handles if not 1 <= l <= n - 1]
    if bad:
        raise PreconditionError(f"handle indices must lie in 1..{n - 1}, got {bad}")
    if handles:
        image = bcs(*(Product(Sphere(l), Disc(n - l)) for l in handles))
    else:
        image = Disc(n)
    return SgmDescriptor(m, n, _source(m, handles), image, "embedding")


def _handle_index(piece: SpaceTerm, n: int) -> int:
    if isinstance(piece, Product) and isinstance(piece.left, Sphere) and isinstance(piece.right, Disc):
        l = piece.left.d
        if 1 <= l <= n - 1 and piece.right.d == n - l:
            return l
    raise ImageShapeError(
        f"unsupported image piece {render(piece)}: expected S^l x D^(n-l) with 1 <= l <= n-1", piece
    )


def handles_of_image(w: SpaceTerm) -> list[int]:
    """Handle indices of a disc or a boundary connected sum of ``S^l x D^(n-l)``."""
    if not flags(w).has_boundary:
        raise ImageShapeError(f"image {render(w)} has empty boundary", w)
    t = normalize(w)
    n = dimension(t)
    if isinstance(t, Disc):
        return []
    pieces = t.operands if isinstance(t, BoundaryConnSum) else (t,)
    return [_handle_index(p, n) for p in pieces]


def source_from_image(w: SpaceTerm, m: int) -> SpaceTerm:
    """The source manifold of the round-handle map onto ``w``."""
    if not m > dimension(w):
        raise PreconditionError(f"need m > dim W = {dimension(w)}, got m={m}")
    return _source(m, handles_of_image(w))


def _group(table: dict, i: int) -> FgAbelianGroup:
    return table.get(i, TRIVIAL)


def verify_homology_relation(d: SgmDescriptor) -> bool:
    """Check ``H_i(M) = H_i(W) + H_(m-i)(W)`` for ``0 < i < m``."""
    hm = reduced_homology(d.source)
    hw = reduced_homology(d.image_manifold)
    return all(
        _group(hm, i) == _group(hw, i) + _group(hw, d.m - i) for i in range(1, d.m)
    )


def r3_image_shape_check(w: SpaceTerm) -> bool:
    """Whether a 3-dimensional image is ``D^3`` or a boundary sum of ``S^2 x D^1``."""
    if dimension(w) != 3:
        raise PreconditionError(f"{render(w)} has dimension {dimension(w)}, not 3")
    try:
        handles = handles_of_image(w)
    except TermError:
        return False
    return all(l == 2 for l in handles)
