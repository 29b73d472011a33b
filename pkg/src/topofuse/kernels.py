"""Backend selection for the hot loops.

The compiled extension is used when it was built and importable; otherwise
the pure-Python module takes over.  Setting ``TOPOFUSE_PURE_PYTHON=1`` forces
the fallback (handy for benchmarking and for checking the two agree).
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("TOPOFUSE_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def _ints(xs) -> np.ndarray:
    return np.ascontiguousarray(xs, dtype=np.int64)


def longest_path_levels(n: int, succ_ptr, succ_idx, backend: str | None = None):
    """Return ``(levels, acyclic)`` for a CSR successor graph."""
    backend = backend or BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        levels, ok = _ckernels.longest_path_levels(n, _ints(succ_ptr), _ints(succ_idx))
        return levels.tolist(), ok
    return _pykernels.longest_path_levels(n, list(succ_ptr), list(succ_idx))


def joint_product(cards, par_ptr, par_idx, cpt_ptr, cpt_vals, backend: str | None = None) -> np.ndarray:
    """Flat joint probabilities, one entry per configuration in C order."""
    backend = backend or BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels.joint_product(
            _ints(cards),
            _ints(par_ptr),
            _ints(par_idx),
            _ints(cpt_ptr),
            np.ascontiguousarray(cpt_vals, dtype=np.float64),
        )
    out = _pykernels.joint_product(
        [int(c) for c in cards],
        [int(p) for p in par_ptr],
        [int(p) for p in par_idx],
        [int(p) for p in cpt_ptr],
        [float(v) for v in cpt_vals],
    )
    return np.asarray(out, dtype=np.float64)


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])
