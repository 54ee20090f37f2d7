# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled LCS kernel: two-row dynamic program over integer token ids."""

from cpython cimport array
import array


def lcs_length(a, b):
    """Length of the longest common subsequence of two id sequences."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(b)
    if n == 0 or m == 0:
        return 0
    cdef array.array arr_a = array.array('q', a)
    cdef array.array arr_b = array.array('q', b)
    cdef long long[::1] va = arr_a
    cdef long long[::1] vb = arr_b
    cdef array.array row0 = array.array('q', bytes(8 * (m + 1)))
    cdef array.array row1 = array.array('q', bytes(8 * (m + 1)))
    cdef long long[::1] prev = row0
    cdef long long[::1] curr = row1
    cdef long long[::1] tmp
    cdef Py_ssize_t i, j
    cdef long long ai, left, up
    for i in range(n):
        ai = va[i]
        for j in range(m):
            if vb[j] == ai:
                curr[j + 1] = prev[j] + 1
            else:
                left = curr[j]
                up = prev[j + 1]
                curr[j + 1] = left if left >= up else up
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m]
