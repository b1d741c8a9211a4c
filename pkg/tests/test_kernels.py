import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from elempoly import _kernels
from elempoly.abelian import smith_normal_form
from elempoly.oracle import _boundary_array, product_complex, sphere_complex

BACKENDS = ["numpy"] + (["numba"] if _kernels.nb is not None else [])


def exact(a):
    return [d for d in smith_normal_form(a.tolist()).diagonal if d] if a.size else []


@pytest.mark.parametrize("backend", BACKENDS)
def test_small_examples(backend):
    assert _kernels.snf_diagonal(np.array([[2, 0], [0, 3]]), backend) == [1, 6]
    assert _kernels.snf_diagonal(np.zeros((3, 2), dtype=np.int64), backend) == []
    assert _kernels.snf_diagonal(np.eye(3, dtype=np.int64), backend) == [1, 1, 1]
    assert _kernels.snf_diagonal(np.zeros((0, 4), dtype=np.int64), backend) == []


matrices = st.tuples(st.integers(1, 7), st.integers(1, 7)).flatmap(
    lambda shape: arrays(np.int64, shape, elements=st.integers(-4, 4))
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_backends_agree_with_exact_form(a):
    want = exact(a)
    for b in BACKENDS:
        assert _kernels.snf_diagonal(a.copy(), b) == want


@pytest.mark.parametrize("backend", BACKENDS)
def test_overflow_falls_back_to_exact(backend):
    big = 1 << 35
    a = np.array([[big, 1], [1, big]], dtype=np.int64)
    assert _kernels.unit_eliminate(a.copy(), backend) == (-1, None)
    assert _kernels.snf_diagonal(a, backend) == [1, big * big - 1]


@pytest.mark.parametrize("backend", BACKENDS)
def test_growth_past_limit_falls_back(backend):
    # entries start under the limit but the update step would exceed it
    x = 1 << 30
    a = np.array([[1, x, 0], [x, 0, x], [0, x, 3]], dtype=np.int64)
    assert _kernels.snf_diagonal(a, backend) == exact(a)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.unit_eliminate(np.eye(2, dtype=np.int64), "fortran")


def test_backends_agree_on_boundary_maps():
    c = product_complex(sphere_complex(2), sphere_complex(2))
    for i in range(1, c.dimension + 1):
        a = _boundary_array(c, i)
        results = {b: _kernels.snf_diagonal(a, b) for b in BACKENDS}
        assert len({tuple(r) for r in results.values()}) == 1
        assert all(d == 1 for d in results["numpy"])
