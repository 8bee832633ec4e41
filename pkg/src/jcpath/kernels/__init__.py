"""Hot loops for applying propagators to state vectors.

The compiled Cython extension is used when it was built; otherwise the numpy
implementation is selected. Set ``JCPATH_PURE=1`` to force the fallback.
"""

import os

from . import _pure

BACKEND = "python"
_impl = _pure

if not os.environ.get("JCPATH_PURE"):
    try:
        from . import _ckernel as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pure

apply_branch = _impl.apply_branch
apply_diagonal = _impl.apply_diagonal


def backend_module(name):
    """Return the kernel module for ``"python"`` or ``"cython"``."""
    if name == "python":
        return _pure
    if name == "cython":
        from . import _ckernel

        return _ckernel
    raise ValueError(f"unknown kernel backend {name!r}")
