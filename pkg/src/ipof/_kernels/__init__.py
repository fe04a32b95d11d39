"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set IPOF_DISABLE_NATIVE=1 to force the NumPy fallback (used by the backend
benchmark and for debugging).
"""

import os

if os.environ.get("IPOF_DISABLE_NATIVE"):
    from ipof._kernels._fallback import PropagationKernel

    BACKEND = "numpy"
else:
    try:
        from ipof._kernels._native import PropagationKernel

        BACKEND = "native"
    except ImportError:
        from ipof._kernels._fallback import PropagationKernel

        BACKEND = "numpy"

__all__ = ["PropagationKernel", "BACKEND"]
