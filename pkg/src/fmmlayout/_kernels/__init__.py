"""Backend dispatch for the hot numerical kernels.

``active`` is the module the rest of the package calls into; it is the
numba implementation unless the env flag (see `fmmlayout._backend`)
selects the pure-numpy fallback.  Both implementations stay importable
so they can be cross-checked and benchmarked against each other.
"""

from .. import _backend
from . import numpy_impl

if _backend.BACKEND == "numba":
    from . import numba_impl

    active = numba_impl
else:  # pragma: no cover - exercised via subprocess tests
    numba_impl = None
    active = numpy_impl

BACKEND = _backend.BACKEND


def get_impl(name: str):
    """Return a kernel module by backend name ('numba' or 'numpy')."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if numba_impl is None:
            from . import numba_impl as ni  # raises if numba truly missing

            return ni
        return numba_impl
    raise ValueError(f"unknown backend {name!r}")
