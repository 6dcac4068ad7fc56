"""Backend selection for the series summation kernel.

Prefers the compiled Cython extension when it is importable; otherwise the
pure-Python twin takes over.  Set ``BELLSHAPE_PURE_PYTHON=1`` to force the
fallback (useful for the backend-parity tests and the benchmark).
"""

import os

if os.environ.get("BELLSHAPE_PURE_PYTHON"):
    from . import _series_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _series_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _series_py as _impl

        BACKEND = "python"

eval_series = _impl.eval_series
eval_series_grid = _impl.eval_series_grid


def backend_name() -> str:
    """Name of the active kernel backend: ``cython`` or ``python``."""
    return BACKEND
