"""Kernel selection: compiled extension when built, pure Python otherwise.

ASSERTIFY_PURE_PYTHON=1 forces the fallback (used by tests and the
benchmark to compare both paths).
"""

import os

from .lcs_py import lcs_length as lcs_length_py

if os.environ.get("ASSERTIFY_PURE_PYTHON") == "1":
    lcs_length = lcs_length_py
    KERNEL_BACKEND = "python"
else:
    try:
        from ._lcs import lcs_length  # type: ignore[no-redef]

        KERNEL_BACKEND = "cython"
    except ImportError:
        lcs_length = lcs_length_py
        KERNEL_BACKEND = "python"

__all__ = ["lcs_length", "lcs_length_py", "KERNEL_BACKEND"]
