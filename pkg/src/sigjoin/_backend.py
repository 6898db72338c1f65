"""Kernel backend selection.

The compiled extension is used when importable; ``SIGJOIN_PURE_PYTHON=1``
forces the pure-Python kernels.
"""

import os

from . import _purepy

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _purepy}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if os.environ.get("SIGJOIN_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
    kernels = _purepy
else:
    kernels = _compiled

BACKEND = kernels.NAME


def get(name: str | None = None):
    """Kernel module by name ("cython" or "python"); the active one if None."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {sorted(BACKENDS)}") from None
