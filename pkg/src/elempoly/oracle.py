"""Brute-force integral homology of explicit simplicial complexes.

This module knows nothing about space terms. It triangulates spheres,
discs, wedges, products and closed orientable surfaces, builds boundary
matrices and reads homology off Smith normal forms. The symbolic engine
in :mod:`elempoly.terms` is checked against it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .abelian import FgAbelianGroup, IntMatrix

__all__ = [
    "SimplicialComplex",
    "boundary_matrix",
    "homology",
    "homology_table",
    "euler_characteristic",
    "sphere_complex",
    "disc_complex",
    "point_complex",
    "wedge_complex",
    "product_complex",
    "torus_complex",
    "surface_complex",
    "read_complex",
    "parse_complex",
    "format_complex",
]


def _label_key(v):
    # ints before strings, each in natural order
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite simplicial complex stored by its facets.

    Vertices carry a total order (``_label_key``); every simplex is a tuple
    sorted in that order and oriented by it.
    """

    facets: tuple[tuple[Hashable, ...], ...]
    basepoint: Hashable = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        faces = {tuple(sorted(set(f), key=_label_key)) for f in self.facets if f}
        if not faces:
            raise ValueError("a simplicial complex needs at least one facet")
        maximal = []
        by_size = sorted(faces, key=len, reverse=True)
        for f in by_size:
            fs = set(f)
            if not any(fs < set(g) for g in maximal):
                maximal.append(f)
        maximal.sort(key=lambda f: (len(f), [_label_key(v) for v in f]))
        object.__setattr__(self, "facets", tuple(maximal))
        if self.basepoint is None:
            object.__setattr__(self, "basepoint", self.vertices[0])
        elif self.basepoint not in set(self.vertices):
            raise ValueError(f"basepoint {self.basepoint!r} is not a vertex")

    @cached_property
    def vertices(self) -> tuple:
        return tuple(sorted({v for f in self.facets for v in f}, key=_label_key))

    @property
    def dimension(self) -> int:
        return max(len(f) for f in self.facets) - 1

    def simplices(self, i: int) -> list[tuple]:
        """All ``i``-simplices, lexicographically ordered."""
        if i < 0 or i > self.dimension:
            return []
        cached = self._cache.get(i)
        if cached is None:
            faces = set()
            for f in self.facets:
                if len(f) > i:
                    faces.update(itertools.combinations(f, i + 1))
            cached = sorted(faces, key=lambda s: [_label_key(v) for v in s])
            self._cache[i] = cached
        return cached

    def f_vector(self) -> list[int]:
        return [len(self.simplices(i)) for i in range(self.dimension + 1)]


def _boundary_array(c: SimplicialComplex, i: int) -> np.ndarray:
    if i == 0:
        # augmentation: reduced homology in degree 0
        return np.ones((1, len(c.simplices(0))), dtype=np.int64)
    rows = c.simplices(i - 1)
    cols = c.simplices(i)
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if not cols:
        return out
    index = {s: k for k, s in enumerate(rows)}
    for j, s in enumerate(cols):
        for drop in range(len(s)):
            out[index[s[:drop] + s[drop + 1:]], j] = -1 if drop % 2 else 1
    return out


def boundary_matrix(c: SimplicialComplex, i: int) -> IntMatrix:
    """Matrix of the boundary map from ``i``-simplices to ``(i-1)``-simplices.

    Face ``k`` (vertex ``k`` removed) of a simplex gets sign ``(-1)^k``.
    """
    if i < 1:
        raise ValueError("boundary_matrix needs degree i >= 1")
    arr = _boundary_array(c, i)
    return IntMatrix.from_rows(arr.tolist(), arr.shape[1])


def _rank_and_torsion(arr: np.ndarray, backend=None) -> tuple[int, list[int]]:
    if arr.size == 0:
        return 0, []
    diag = _kernels.snf_diagonal(arr, backend)
    return len(diag), [d for d in diag if d > 1]


def homology(c: SimplicialComplex, i: int, reduced: bool = False, backend=None) -> FgAbelianGroup:
    """``H_i(c; Z)`` from the Smith forms of the adjacent boundary maps."""
    if i < 0:
        raise ValueError("homology degree must be non-negative")
    n_i = len(c.simplices(i))
    if n_i == 0:
        return FgAbelianGroup()
    if i == 0 and not reduced:
        rank_out = 0
    else:
        rank_out, _ = _rank_and_torsion(_boundary_array(c, i), backend)
    rank_in, torsion = _rank_and_torsion(_boundary_array(c, i + 1), backend)
    return FgAbelianGroup.from_cyclic(n_i - rank_out - rank_in, torsion)


def homology_table(c: SimplicialComplex, reduced: bool = True, backend=None) -> dict[int, FgAbelianGroup]:
    """Nonzero homology groups keyed by degree."""
    table = {}
    for i in range(c.dimension + 1):
        g = homology(c, i, reduced=reduced, backend=backend)
        if not g.is_trivial:
            table[i] = g
    return table


def euler_characteristic(c: SimplicialComplex) -> int:
    return sum((-1) ** i * n for i, n in enumerate(c.f_vector()))


# --- catalog constructions -------------------------------------------------


def point_complex() -> SimplicialComplex:
    return SimplicialComplex(((0,),))


def sphere_complex(d: int) -> SimplicialComplex:
    """Boundary of the ``(d+1)``-simplex on vertices ``0..d+1``."""
    if d < 0:
        raise ValueError("sphere dimension must be >= 0")
    return SimplicialComplex(tuple(itertools.combinations(range(d + 2), d + 1)))


def disc_complex(d: int) -> SimplicialComplex:
    """The full ``d``-simplex."""
    if d < 0:
        raise ValueError("disc dimension must be >= 0")
    return SimplicialComplex((tuple(range(d + 1)),))


def _relabel(c: SimplicialComplex, mapping) -> list[tuple]:
    return [tuple(mapping[v] for v in f) for f in c.facets]


def wedge_complex(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    """One-point union identifying the two basepoints; vertices become ``0..N-1``."""
    amap = {v: k for k, v in enumerate(a.vertices)}
    offset = len(amap)
    bmap, k = {}, offset
    for v in b.vertices:
        if v == b.basepoint:
            bmap[v] = amap[a.basepoint]
        else:
            bmap[v] = k
            k += 1
    return SimplicialComplex(
        tuple(_relabel(a, amap) + _relabel(b, bmap)), basepoint=amap[a.basepoint]
    )


def _staircases(p: int, q: int):
    # monotone lattice paths from (0,0) to (p,q)
    for rights in itertools.combinations(range(p + q), p):
        i = j = 0
        path = [(0, 0)]
        rs = set(rights)
        for step in range(p + q):
            if step in rs:
                i += 1
            else:
                j += 1
            path.append((i, j))
        yield path


def product_complex(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of ``|a| x |b|`` using both vertex orders."""
    nb_ = len(b.vertices)
    aidx = {v: k for k, v in enumerate(a.vertices)}
    bidx = {v: k for k, v in enumerate(b.vertices)}
    facets = []
    for s in a.facets:
        for t in b.facets:
            for path in _staircases(len(s) - 1, len(t) - 1):
                facets.append(tuple(aidx[s[i]] * nb_ + bidx[t[j]] for i, j in path))
    base = aidx[a.basepoint] * nb_ + bidx[b.basepoint]
    return SimplicialComplex(tuple(facets), basepoint=base)


def torus_complex() -> SimplicialComplex:
    """The 7-vertex torus: triangles ``{i, i+1, i+3}`` and ``{i, i+2, i+3}`` mod 7."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(tuple(facets))


def surface_complex(genus: int) -> SimplicialComplex:
    """Closed orientable surface of the given genus.

    Genus 0 is the tetrahedron boundary. Higher genus glues copies of the
    7-vertex torus along a removed triangle, one torus at a time.
    """
    if genus < 0:
        raise ValueError("genus must be non-negative")
    if genus == 0:
        return sphere_complex(2)
    base = torus_complex()
    facets = list(base.facets)
    next_label = 7
    # triangle of the running surface that the next torus is glued along
    hole = (0, 1, 3)
    for _ in range(genus - 1):
        facets = [f for f in facets if set(f) != set(hole)]
        mapping = {0: hole[0], 1: hole[1], 3: hole[2]}
        for v in (2, 4, 5, 6):
            mapping[v] = next_label
            next_label += 1
        facets += [tuple(mapping[v] for v in f) for f in base.facets if set(f) != {0, 1, 3}]
        # (2, 4, 5) is a triangle of the torus disjoint from {0, 1, 3}
        hole = (mapping[2], mapping[4], mapping[5])
    return SimplicialComplex(tuple(facets))


# --- file format -----------------------------------------------------------


def _coerce_label(tok: str):
    return int(tok) if tok.lstrip("-").isdigit() else tok


def parse_complex(text: str) -> SimplicialComplex:
    """Read the facet-per-line format with ``#`` comments and a ``base`` directive."""
    facets, base = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "base":
            if len(toks) != 2:
                raise ValueError(f"line {lineno}: 'base' takes exactly one label")
            base = _coerce_label(toks[1])
            continue
        facets.append(tuple(_coerce_label(t) for t in toks))
    if not facets:
        raise ValueError("complex file has no facets")
    return SimplicialComplex(tuple(facets), basepoint=base)


def read_complex(path: str | Path) -> SimplicialComplex:
    return parse_complex(Path(path).read_text(encoding="utf-8"))


def format_complex(c: SimplicialComplex) -> str:
    lines = [f"base {c.basepoint}"]
    lines += [" ".join(str(v) for v in f) for f in c.facets]
    return "\n".join(lines) + "\n"
