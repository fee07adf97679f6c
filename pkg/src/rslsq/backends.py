"""Selects the kernel backend: compiled extension if importable, numpy fallback.

Set ``RSLSQ_BACKEND=python`` to force the fallback (useful for benchmarking
the two implementations against each other).
"""

import os

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:
    _kernels_c = None

_requested = os.environ.get("RSLSQ_BACKEND", "").strip().lower()
if _requested in ("", "auto"):
    _active = _kernels_c if _kernels_c is not None else _kernels_py
elif _requested == "python":
    _active = _kernels_py
elif _requested in ("c", "compiled"):
    if _kernels_c is None:
        raise ImportError(
            "RSLSQ_BACKEND=c requested but the compiled extension is not built"
        )
    _active = _kernels_c
else:
    raise ValueError(f"unknown RSLSQ_BACKEND value: {_requested!r}")


def active():
    """Return the kernel module in use."""
    return _active


def backend_name() -> str:
    return "compiled" if _active is _kernels_c else "python"


def compiled_available() -> bool:
    return _kernels_c is not None
