"""Integer elimination kernels for boundary matrices.

The hot loop of the simplicial oracle is eliminating the many ``+-1``
pivots of a boundary matrix. Two interchangeable implementations exist:
a numba ``@njit`` kernel and a plain numpy one. ``ELEMPOLY_BACKEND``
(``numba`` or ``numpy``) picks the default; numba is used when it imports.

Only unit pivots are eliminated here. The (usually tiny) residual block is
handed to the exact big-integer Smith form in :mod:`elempoly.abelian`.
"""

from __future__ import annotations

import os

import numpy as np

from .abelian import IntMatrix, smith_normal_form

# entries beyond this abort the int64 route and the exact route takes over;
# limit + limit**2 must stay below 2**63 so one update step cannot overflow
ENTRY_LIMIT = (1 << 31) - 1

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

_requested = os.environ.get("ELEMPOLY_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"ELEMPOLY_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
DEFAULT_BACKEND = "numba" if (_requested == "numba" and nb is not None) else "numpy"


def _unit_eliminate_py(a, row_done, col_done, limit):
    """Reference loop body; compiled by numba below, never run uncompiled."""
    m, n = a.shape
    count = 0
    nzc = np.empty(n, np.int64)
    progress = True
    while progress:
        progress = False
        for j in range(n):
            if col_done[j]:
                continue
            piv = -1
            for i in range(m):
                if not row_done[i] and (a[i, j] == 1 or a[i, j] == -1):
                    piv = i
                    break
            if piv < 0:
                continue
            s = a[piv, j]
            k = 0
            for c in range(n):
                if a[piv, c] != 0:
                    nzc[k] = c
                    k += 1
            for i in range(m):
                if i == piv or row_done[i] or a[i, j] == 0:
                    continue
                f = a[i, j] * s
                for t in range(k):
                    c = nzc[t]
                    v = a[i, c] - f * a[piv, c]
                    if v > limit or v < -limit:
                        return -1
                    a[i, c] = v
            row_done[piv] = True
            col_done[j] = True
            count += 1
            progress = True
    return count


if nb is not None:
    _unit_eliminate_nb = nb.njit(cache=True, nogil=True)(_unit_eliminate_py)
else:  # pragma: no cover
    _unit_eliminate_nb = None


def _unit_eliminate_np(a, row_done, col_done, limit):
    m, n = a.shape
    count = 0
    progress = True
    while progress:
        progress = False
        for j in range(n):
            if col_done[j]:
                continue
            col = a[:, j]
            live = (col != 0) & ~row_done
            units = np.flatnonzero(live & ((col == 1) | (col == -1)))
            if units.size == 0:
                continue
            piv = units[0]
            s = col[piv]
            rows = np.flatnonzero(live)
            rows = rows[rows != piv]
            if rows.size:
                cols = np.flatnonzero(a[piv])
                block = a[np.ix_(rows, cols)] - np.outer(col[rows] * s, a[piv, cols])
                if block.size and np.abs(block).max() > limit:
                    return -1
                a[np.ix_(rows, cols)] = block
            row_done[piv] = True
            col_done[j] = True
            count += 1
            progress = True
    return count


def unit_eliminate(a: np.ndarray, backend: str | None = None):
    """Eliminate unit pivots of ``a`` in place.

    Returns ``(count, residual)`` where ``residual`` is the int64 block on
    the untouched rows and columns, or ``(-1, None)`` on int64 overflow risk.
    """
    backend = backend or DEFAULT_BACKEND
    a = np.asarray(a)
    if a.size:
        peak = max(abs(int(x)) for x in a.flat) if a.dtype == object else int(np.abs(a).max())
        if peak > ENTRY_LIMIT:
            return -1, None
    a = np.ascontiguousarray(a, dtype=np.int64)
    m, n = a.shape
    row_done = np.zeros(m, dtype=np.bool_)
    col_done = np.zeros(n, dtype=np.bool_)
    if backend == "numba":
        if _unit_eliminate_nb is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        count = _unit_eliminate_nb(a, row_done, col_done, ENTRY_LIMIT)
    elif backend == "numpy":
        count = _unit_eliminate_np(a, row_done, col_done, ENTRY_LIMIT)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if count < 0:
        return -1, None
    return count, a[np.ix_(~row_done, ~col_done)]


def _exact_diagonal(a: np.ndarray) -> list[int]:
    a = a[np.any(a != 0, axis=1)] if a.size else a
    if a.size:
        a = a[:, np.any(a != 0, axis=0)]
    if a.size == 0:
        return []
    snf = smith_normal_form(IntMatrix.from_rows(a.tolist()))
    return [d for d in snf.diagonal if d]


def snf_diagonal(a: np.ndarray, backend: str | None = None) -> list[int]:
    """Nonzero Smith invariant factors of an integer matrix, ascending."""
    a = np.asarray(a)
    if a.size == 0:
        return []
    count, residual = unit_eliminate(a.copy(), backend)
    if count < 0:
        return _exact_diagonal(np.asarray(a, dtype=object))
    return [1] * count + _exact_diagonal(residual)
