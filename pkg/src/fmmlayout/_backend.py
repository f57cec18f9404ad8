"""Kernel backend selection.

Every hot numerical kernel exists in two variants with identical
signatures: compiled loops in ``_kernels.numba_impl`` and vectorized
numpy in ``_kernels.numpy_impl``.  The active variant is fixed once at
import time:

* ``FMMLAYOUT_BACKEND=numpy``  -- force the pure-numpy path
* ``FMMLAYOUT_BACKEND=numba``  -- require numba (raises if missing)
* unset / ``auto``             -- numba when importable, numpy otherwise

Timing-sensitive acceptance checks assume the numba path; the numpy path
is a functional fallback and the reference for backend-equivalence tests.
"""

import os

ENV_VAR = "FMMLAYOUT_BACKEND"


def _resolve() -> str:
    choice = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  -- fail loudly if requested but absent

        return "numba"
    if choice != "auto":
        raise ValueError(
            f"{ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}"
        )
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _resolve()
