import os
import subprocess
import sys
import warnings

import numpy as np
import pytest

from jcpath import kernels
from jcpath.dynamics import SystemParams, _branch_views, _controlled_coefficients, controlled_propagator
from jcpath.hilbert import CompositeState

BACKENDS = ["python"]
try:
    kernels.backend_module("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


def apply(mod, psi0, coeffs, d):
    psi = psi0.copy()
    view = psi.reshape(2, 2, d, d, -1)
    for v, (blocks, g0, edge, spectator) in zip(_branch_views(view), coeffs):
        mod.apply_branch(v, blocks, g0, edge, spectator)
    return psi


@pytest.mark.parametrize("n_max", [1, 4, 11])
def test_backends_agree(n_max):
    params = SystemParams(7.3, 7.0, 7.6, 0.4, 0.7, n_max)
    coeffs = _controlled_coefficients(params, 2.3)
    d = n_max + 1
    rng = np.random.default_rng(n_max)
    psi0 = rng.normal(size=(4 * d * d, 3)) + 1j * rng.normal(size=(4 * d * d, 3))
    diag = np.exp(1j * rng.uniform(0, 6, 4 * d * d))
    outs = {}
    for name in BACKENDS:
        mod = kernels.backend_module(name)
        out = apply(mod, psi0, coeffs, d)
        mod.apply_diagonal(out, diag)
        outs[name] = out
    ref = outs["python"]
    assert np.linalg.norm(ref) == pytest.approx(np.linalg.norm(psi0), rel=1e-12)
    for out in outs.values():
        assert np.max(np.abs(out - ref)) <= 1e-12


def test_active_backend_is_unitary():
    params = SystemParams(7.3, 7.0, 7.6, 0.4, 0.7, 6)
    rng = np.random.default_rng(0)
    v = rng.normal(size=params.shape.dim) + 1j * rng.normal(size=params.shape.dim)
    psi = CompositeState.from_unnormalized(params.shape, v)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = controlled_propagator(params, 0.0, 9.0).apply(psi)
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1, abs=1e-12)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def test_pure_fallback_selected_by_environment():
    env = dict(os.environ, JCPATH_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import jcpath.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
