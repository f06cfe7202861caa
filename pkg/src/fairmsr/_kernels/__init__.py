"""Hot kernels: compiled Cython module with a pure-Python fallback.

The compiled backend is used when importable; set ``FAIRMSR_BACKEND=python``
to force the fallback. Both expose the same functions with identical results.
"""

from __future__ import annotations

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

if _ckernel is not None and os.environ.get("FAIRMSR_BACKEND", "").lower() != "python":
    kernel = _ckernel
else:
    kernel = _pykernel

BACKEND = kernel.BACKEND


def available_backends() -> dict:
    out = {"python": _pykernel}
    if _ckernel is not None:
        out["cython"] = _ckernel
    return out


def get_backend(name: str | None = None):
    if name is None:
        return kernel
    backends = available_backends()
    if name not in backends:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(backends)}")
    return backends[name]
