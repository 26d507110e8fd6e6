# cython: language_level=3, boundscheck=False, wraparound=False
"""C kernels for string distances; the hot loop of corpus alignment.

Same contracts as netrans._simdist_py.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


def lcs_length(unicode a, unicode b):
    """Length of the longest common subsequence of two strings."""
    if len(a) > len(b):
        a, b = b, a
    cdef Py_ssize_t m = len(a)
    cdef Py_ssize_t n = len(b)
    if m == 0:
        return 0
    cdef Py_ssize_t *prev = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *curr = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or curr == NULL:
        PyMem_Free(prev)
        PyMem_Free(curr)
        raise MemoryError()
    cdef Py_ssize_t i, j, best
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 cb
    try:
        for i in range(m + 1):
            prev[i] = 0
        for j in range(n):
            cb = b[j]
            curr[0] = 0
            for i in range(1, m + 1):
                if a[i - 1] == cb:
                    curr[i] = prev[i - 1] + 1
                else:
                    curr[i] = curr[i - 1] if curr[i - 1] >= prev[i] else prev[i]
            tmp = prev
            prev = curr
            curr = tmp
        best = prev[m]
    finally:
        PyMem_Free(prev)
        PyMem_Free(curr)
    return best


def edit_distance_indel(unicode a, unicode b):
    """Minimal number of single-character insertions and deletions."""
    if len(a) > len(b):
        a, b = b, a
    cdef Py_ssize_t m = len(a)
    cdef Py_ssize_t n = len(b)
    if m == 0:
        return n
    cdef Py_ssize_t *prev = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *curr = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or curr == NULL:
        PyMem_Free(prev)
        PyMem_Free(curr)
        raise MemoryError()
    cdef Py_ssize_t i, j, dist, lo
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 cb
    try:
        for i in range(m + 1):
            prev[i] = i
        for j in range(1, n + 1):
            cb = b[j - 1]
            curr[0] = j
            for i in range(1, m + 1):
                if a[i - 1] == cb:
                    curr[i] = prev[i - 1]
                else:
                    lo = curr[i - 1] if curr[i - 1] <= prev[i] else prev[i]
                    curr[i] = lo + 1
            tmp = prev
            prev = curr
            curr = tmp
        dist = prev[m]
    finally:
        PyMem_Free(prev)
        PyMem_Free(curr)
    return dist
