"""Backend selection for the convolution kernels.

Two interchangeable implementations exist: a compiled Cython extension
and a numpy fallback whose taps are batched GEMMs.  On this workload the
BLAS-backed numpy path is the faster one (see benchmarks/bench_conv.py),
so "auto" resolves to it; set GAZEID_CONV_BACKEND=ext to force the
compiled kernels.
"""

from __future__ import annotations

import os

from . import _conv_numpy

try:
    from . import _convkernels as _ext
except ImportError:  # extension not built
    _ext = None

_choice = os.environ.get("GAZEID_CONV_BACKEND", "auto").lower()
if _choice == "ext":
    if _ext is None:
        raise ImportError(
            "GAZEID_CONV_BACKEND=ext but the compiled extension is unavailable"
        )
    _impl = _ext
elif _choice == "numpy":
    _impl = _conv_numpy
elif _choice == "auto":
    _impl = _conv_numpy
else:
    raise ValueError(f"unknown GAZEID_CONV_BACKEND: {_choice}")

BACKEND_NAME = "ext" if _impl is _ext else "numpy"
HAVE_EXT = _ext is not None

conv1d_forward = _impl.conv1d_forward
conv1d_grad_input = _impl.conv1d_grad_input
conv1d_grad_weights = _impl.conv1d_grad_weights


def backends():
    """Name -> module for every available backend (for tests/benchmarks)."""
    out = {"numpy": _conv_numpy}
    if _ext is not None:
        out["ext"] = _ext
    return out
