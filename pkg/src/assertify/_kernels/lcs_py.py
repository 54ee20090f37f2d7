"""Pure-Python longest-common-subsequence kernel.

Fallback used when the compiled extension is unavailable (or explicitly
disabled via ASSERTIFY_PURE_PYTHON=1). Same contract as the Cython build:
rolling two-row dynamic program over integer token ids.
"""

from __future__ import annotations

from typing import Sequence


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of the longest common subsequence of two id sequences."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if b[j] == ai:
                curr[j + 1] = prev[j] + 1
            else:
                left = curr[j]
                up = prev[j + 1]
                curr[j + 1] = left if left >= up else up
        prev, curr = curr, prev
    return prev[m]
