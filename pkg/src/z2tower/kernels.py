"""Backend selection for the reduced-form kernels.

The compiled extension is used when it imports; setting
``Z2TOWER_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("Z2TOWER_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
_COMPILED_LIMIT = getattr(_impl, "MAX_D", None)


def reduced_forms(D: int) -> list[tuple[int, int]]:
    if _COMPILED_LIMIT is not None and D >= _COMPILED_LIMIT:
        return _kernels_py.reduced_forms(D)
    return _impl.reduced_forms(D)


def cycle_labels(D: int, forms: list[tuple[int, int]]) -> tuple[list[int], int]:
    if _COMPILED_LIMIT is not None and D >= _COMPILED_LIMIT:
        return _kernels_py.cycle_labels(D, forms)
    return _impl.cycle_labels(D, forms)
