"""Numeric kernel backend selection.

The hot inner loops (B-spline design evaluation and the banded solves
behind the smoothing splines) exist twice: numba-jitted versions in
``_kernels_numba`` and plain numpy versions in ``_kernels_numpy``.

Selection is controlled by the ``GAMROC_NUMBA`` environment variable,
read once at import time:

* unset or ``auto`` -- use numba when it imports cleanly, else numpy;
* ``0`` / ``off``   -- force the numpy path;
* ``1`` / ``on``    -- require numba, raising ImportError if missing.

Both backends implement the same function signatures and agree to
floating-point tolerance; ``benchmarks/bench_kernels.py`` compares them.
"""

import os

_flag = os.environ.get("GAMROC_NUMBA", "auto").strip().lower()

if _flag in ("0", "off", "false", "no"):
    _use_numba = False
elif _flag in ("1", "on", "true", "yes"):
    import numba  # noqa: F401  (fail loudly when explicitly requested)

    _use_numba = True
else:
    try:
        import numba  # noqa: F401

        _use_numba = True
    except ImportError:
        _use_numba = False

if _use_numba:
    from . import _kernels_numba as kernels
else:
    from . import _kernels_numpy as kernels

BACKEND = "numba" if _use_numba else "numpy"

__all__ = ["kernels", "BACKEND"]
