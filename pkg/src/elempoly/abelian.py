"""Finitely generated abelian groups and exact integer Smith normal form.

Every homology value in the package is an :class:`FgAbelianGroup` kept in
invariant-factor normal form, so two groups are isomorphic exactly when
they compare equal.

>>> print(direct_sum(cyclic(2), cyclic(3)))
Z/6
>>> print(tensor(cyclic(4), cyclic(6)))
Z/2
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SmithForm",
    "FgAbelianGroup",
    "smith_normal_form",
    "cokernel",
    "direct_sum",
    "tensor",
    "tor",
    "free",
    "cyclic",
    "TRIVIAL",
    "parse_group",
]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with Python (arbitrary precision) entries."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(
                f"entry grid does not match declared shape {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        grid = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        return cls(len(grid), cols, grid)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, rows: int, cols: int, diag: Sequence[int]) -> IntMatrix:
        return cls(
            rows,
            cols,
            tuple(
                tuple(diag[i] if i == j and i < len(diag) else 0 for j in range(cols))
                for i in range(rows)
            ),
        )

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_t = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols_t)
                for row in self.entries
            ),
        )

    def transpose(self) -> IntMatrix:
        if self.rows == 0:
            return IntMatrix.zeros(self.cols, 0)
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """Result of :func:`smith_normal_form`: ``left @ m @ right == D``."""

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    def matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(self.left.rows, self.right.cols, self.diagonal)


def smith_normal_form(m: IntMatrix | Sequence[Sequence[int]]) -> SmithForm:
    """Diagonalize ``m`` by unimodular row and column operations.

    Returns the diagonal ``d1 | d2 | ...`` (length ``min(rows, cols)``,
    non-negative, zeros trailing) together with the unimodular
    certificates. Pivots are chosen with minimal absolute value.
    """
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.entries]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    # v is stored transposed so column operations become row operations
    vt = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        vt[i], vt[j] = vt[j], vt[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        ra, rs = a[dst], a[src]
        for c in range(cols):
            if rs[c]:
                ra[c] += q * rs[c]
        ud, us = u[dst], u[src]
        for c in range(rows):
            if us[c]:
                ud[c] += q * us[c]

    def add_col(dst, src, q):
        for r in a:
            if r[src]:
                r[dst] += q * r[src]
        vd, vs = vt[dst], vt[src]
        for c in range(cols):
            if vs[c]:
                vd[c] += q * vs[c]

    diag: list[int] = []
    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            row = a[i]
            for j in range(t, cols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            # Euclid step: bring the smallest remainder on the cross into the pivot
            best = None
            for i in range(t + 1, rows):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), "r", i)
            for j in range(t + 1, cols):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), "c", j)
            if best is not None:
                if best[1] == "r":
                    swap_rows(t, best[2])
                else:
                    swap_cols(t, best[2])
                continue
            p = a[t][t]
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        diag.append(a[t][t])
    diag.extend([0] * (min(rows, cols) - len(diag)))
    left = IntMatrix.from_rows(u, rows)
    right = IntMatrix.from_rows(vt, cols).transpose() if cols else IntMatrix.zeros(0, 0)
    return SmithForm(tuple(diag), left, right)


_GROUP_TERM = re.compile(r"^(?:Z(?:\^(\d+))?|Z/(\d+)|0)$")


@dataclass(frozen=True, order=True)
class FgAbelianGroup:
    """``Z^rank + Z/d1 + ... + Z/dt`` with ``d1 | d2 | ... | dt`` and ``d1 >= 2``."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        object.__setattr__(self, "torsion", tuple(self.torsion))
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
            if i and d % self.torsion[i - 1]:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def from_cyclic(cls, rank: int = 0, orders: Iterable[int] = ()) -> FgAbelianGroup:
        """Normalize ``Z^rank + sum Z/d`` for arbitrary ``d`` (0 means Z, 1 is dropped)."""
        orders = [abs(int(d)) for d in orders]
        rank += sum(1 for d in orders if d == 0)
        orders = [d for d in orders if d > 1]
        if not orders:
            return cls(rank, ())
        if all(orders[i + 1] % orders[i] == 0 for i in range(len(orders) - 1)):
            return cls(rank, tuple(orders))
        snf = smith_normal_form(IntMatrix.diagonal(len(orders), len(orders), orders))
        return cls(rank, tuple(d for d in snf.diagonal if d > 1))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def summands(self) -> list[int]:
        """Cyclic orders with 0 standing for Z."""
        return [0] * self.rank + list(self.torsion)

    def __add__(self, other: FgAbelianGroup) -> FgAbelianGroup:
        return direct_sum(self, other)

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


TRIVIAL = FgAbelianGroup()


def free(rank: int = 1) -> FgAbelianGroup:
    return FgAbelianGroup(rank)


def cyclic(d: int) -> FgAbelianGroup:
    return FgAbelianGroup.from_cyclic(0, [d])


def parse_group(text: str) -> FgAbelianGroup:
    """Inverse of ``str(group)``: ``"Z^2 + Z/2"``, ``"Z"``, ``"0"``."""
    rank, orders = 0, []
    for part in text.replace(" ", "").split("+"):
        hit = _GROUP_TERM.match(part)
        if hit is None:
            raise ValueError(f"cannot read group summand {part!r} in {text!r}")
        if part == "0":
            continue
        if hit.group(2) is not None:
            orders.append(int(hit.group(2)))
        else:
            rank += int(hit.group(1) or 1)
    return FgAbelianGroup.from_cyclic(rank, orders)


def cokernel(m: IntMatrix | Sequence[Sequence[int]]) -> FgAbelianGroup:
    """The group ``Z^rows / im(m)`` presented by the relation matrix ``m``."""
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    diag = smith_normal_form(m).diagonal
    nonzero = [d for d in diag if d]
    return FgAbelianGroup.from_cyclic(m.rows - len(nonzero), nonzero)


def direct_sum(*groups: FgAbelianGroup) -> FgAbelianGroup:
    rank = sum(g.rank for g in groups)
    orders = [d for g in groups for d in g.torsion]
    return FgAbelianGroup.from_cyclic(rank, orders)


def tensor(a: FgAbelianGroup, b: FgAbelianGroup) -> FgAbelianGroup:
    orders = []
    for p in a.summands():
        for q in b.summands():
            # Z/0 = Z, and gcd(0, q) = q covers Z (x) Z/q
            orders.append(gcd(p, q))
    return FgAbelianGroup.from_cyclic(0, orders)


def tor(a: FgAbelianGroup, b: FgAbelianGroup) -> FgAbelianGroup:
    orders = [gcd(p, q) for p in a.torsion for q in b.torsion]
    return FgAbelianGroup.from_cyclic(0, orders)


def sum_groups(groups: Iterable[FgAbelianGroup]) -> FgAbelianGroup:
    return reduce(direct_sum, groups, TRIVIAL)
