import itertools

import numpy as np
import pytest

from conelab import _pykernels, kernels

try:
    from conelab import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels else [])


def brute_nilpotents(d, b):
    out = []
    for entries in itertools.product(range(-b, b + 1), repeat=d * d):
        N = np.array(entries, dtype=np.int64).reshape(d, d)
        if not np.linalg.matrix_power(N, d).any():
            out.append(N.tobytes())
    return sorted(out)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("d,b", [(1, 2), (2, 1), (2, 2), (3, 1)])
def test_nilpotent_candidates_match_brute_force(mod, d, b):
    got = mod.nilpotent_candidates(d, b)
    assert got.shape[1:] == (d, d)
    assert sorted(m.tobytes() for m in got) == brute_nilpotents(d, b)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_agree_in_order():
    assert np.array_equal(_ckernels.nilpotent_candidates(3, 1), _pykernels.nilpotent_candidates(3, 1))


@pytest.mark.parametrize("mod", BACKENDS)
def test_jacobi_against_numpy(mod):
    rng = np.random.default_rng(3)
    for n in (1, 2, 4, 8):
        A = rng.normal(size=(n, n))
        A = np.ascontiguousarray(A + A.T)
        assert np.allclose(mod.jacobi_eigvalsh(A), np.linalg.eigvalsh(A), atol=1e-10)


@pytest.mark.parametrize("mod", BACKENDS)
def test_soc_margins(mod):
    X = np.array([[1.0, 1.0, 0.0], [5.0, 3.0, 4.0], [0.0, 1.0, 0.0]])
    assert np.allclose(mod.soc_margins(X), [0.0, 0.0, -1.0])
