"""Backend selection for the hot numeric kernels.

Two interchangeable implementations of the inner loops exist:

* ``convexa._core.numpy_backend`` -- vectorized numpy, always available.
* ``convexa._core.numba_backend`` -- @njit compiled loops, used when numba
  imports cleanly.

``CONVEXA_BACKEND`` picks one explicitly (``numpy`` or ``numba``); anything
else, or the variable being unset, means "numba if importable, else numpy".
``CONVEXA_THREADS`` caps the worker pool used when suites fan out.
"""
from __future__ import annotations

import os

_FORCED = None  # test hook; overrides the environment when set


def backend_name() -> str:
    if _FORCED is not None:
        return _FORCED
    want = os.environ.get("CONVEXA_BACKEND", "auto").lower()
    if want in ("numpy", "numba"):
        return want
    return "numba" if numba_available() else "numpy"


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
        return True
    except ImportError:
        return False


def get_backend(name: str | None = None):
    """Return the kernel module for `name` (default: the configured one)."""
    name = name or backend_name()
    if name == "numba":
        if not numba_available():
            raise RuntimeError("CONVEXA_BACKEND=numba but numba is not importable")
        from convexa._core import numba_backend
        return numba_backend
    from convexa._core import numpy_backend
    return numpy_backend


def thread_cap() -> int:
    raw = os.environ.get("CONVEXA_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)
