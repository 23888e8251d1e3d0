"""Stencil-kernel backend selection.

The compiled extension ``timecloak.kernels._core`` is preferred when it
imports cleanly; otherwise the vectorized NumPy fallback is used.  Setting
the environment variable ``TIMECLOAK_PURE_PYTHON=1`` forces the fallback.

Both backends implement the same functions with bit-identical arithmetic:
``leapfrog_step_1d``, ``leapfrog_step_2d``, ``transformed_step_1d``,
``transformed_step_2d``.
"""

import os

from . import _fallback

if os.environ.get("TIMECLOAK_PURE_PYTHON", "") == "1":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
leapfrog_step_1d = _impl.leapfrog_step_1d
leapfrog_step_2d = _impl.leapfrog_step_2d
transformed_step_1d = _impl.transformed_step_1d
transformed_step_2d = _impl.transformed_step_2d

__all__ = [
    "BACKEND",
    "leapfrog_step_1d",
    "leapfrog_step_2d",
    "transformed_step_1d",
    "transformed_step_2d",
]
