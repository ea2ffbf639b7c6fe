"""Hot numerical kernels: numba fast path with a pure-numpy fallback.

The backend is chosen once at import from the AMC_BACKEND environment
variable: "numba" or "numpy" force a backend, anything else (or unset)
auto-selects numba when importable.  Both implementations share one
calling convention, so the benchmark and the equivalence tests can
import numpy_impl / numba_impl directly regardless of the default.
"""
from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

MODE_EUROPEAN = 0
MODE_COEFFS = 1
FD_PROJECTION = 0
FD_PSOR = 1

_requested = os.environ.get("AMC_BACKEND", "auto").strip().lower()

if _requested == "numpy":
    from . import numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError as exc:
        if _requested == "numba":
            raise ImportError(f"AMC_BACKEND=numba but numba is unavailable: {exc}") from exc
        from . import numpy_impl as _impl

        BACKEND = "numpy"
        logger.warning("numba unavailable, falling back to the numpy backend: %s", exc)

simulate_paths = _impl.simulate_paths
iteration_pass = _impl.iteration_pass
fd_put = _impl.fd_put


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND
