# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pairwise-dot kernel.

Columns are passed as rows of a C-contiguous ``(p, n)`` array. Each block of
``block`` columns is packed into a k-major panel; for a tile of four columns
``i`` the inner loop updates one accumulator per (i, panel column) pair.
That vectorizes across pairs while every dot product is still summed over
``k = 0..n-1`` in order, so values are bit-identical for any block size.
"""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc


cdef inline bint _better(double v, Py_ssize_t i, Py_ssize_t j,
                         double best, Py_ssize_t bi, Py_ssize_t bj) noexcept nogil:
    if v > best:
        return True
    if v == best and (i < bi or (i == bi and j < bj)):
        return True
    return False


cdef inline void _scan(const double* acc, Py_ssize_t i, Py_ssize_t b0, Py_ssize_t bw,
                       double* best, Py_ssize_t* best_i, Py_ssize_t* best_j) noexcept nogil:
    """Fold the pairs (i, b0 + jj) with b0 + jj > i into the running maximum."""
    cdef Py_ssize_t jj
    cdef Py_ssize_t first = i + 1 - b0
    cdef double v
    if first < 0:
        first = 0
    for jj in range(first, bw):
        v = fabs(acc[jj])
        if _better(v, i, b0 + jj, best[0], best_i[0], best_j[0]):
            best[0] = v
            best_i[0] = i
            best_j[0] = b0 + jj


def max_abs_offdiag(const double[:, ::1] cols, Py_ssize_t block=64):
    """Return ``(max_{i<j} |<c_i, c_j>|, i, j)`` over the rows of ``cols``."""
    cdef Py_ssize_t p = cols.shape[0]
    cdef Py_ssize_t n = cols.shape[1]
    cdef Py_ssize_t b0, bw, i, iend, jj, k, t
    cdef double best = -1.0
    cdef Py_ssize_t best_i = -1, best_j = -1
    cdef double a0, a1, a2, a3, v
    cdef const double* c0
    cdef const double* c1
    cdef const double* c2
    cdef const double* c3
    cdef double* panel
    cdef double* acc
    cdef double* row

    if p < 2:
        raise ValueError("need at least two columns")
    if block < 1:
        raise ValueError("block must be positive")
    if block > p:
        block = p

    panel = <double*> malloc(n * block * sizeof(double))
    acc = <double*> malloc(4 * block * sizeof(double))
    if panel == NULL or acc == NULL:
        free(panel)
        free(acc)
        raise MemoryError()

    try:
        with nogil:
            b0 = 0
            while b0 < p:
                bw = min(block, p - b0)
                # panel[k * bw + jj] = cols[b0 + jj, k]
                for jj in range(bw):
                    for k in range(n):
                        panel[k * bw + jj] = cols[b0 + jj, k]
                i = 0
                iend = b0 + bw - 1
                while i + 4 <= iend:
                    c0 = &cols[i, 0]
                    c1 = &cols[i + 1, 0]
                    c2 = &cols[i + 2, 0]
                    c3 = &cols[i + 3, 0]
                    for jj in range(4 * bw):
                        acc[jj] = 0.0
                    for k in range(n):
                        a0 = c0[k]
                        a1 = c1[k]
                        a2 = c2[k]
                        a3 = c3[k]
                        row = &panel[k * bw]
                        for jj in range(bw):
                            v = row[jj]
                            acc[jj] = acc[jj] + a0 * v
                            acc[bw + jj] = acc[bw + jj] + a1 * v
                            acc[2 * bw + jj] = acc[2 * bw + jj] + a2 * v
                            acc[3 * bw + jj] = acc[3 * bw + jj] + a3 * v
                    for t in range(4):
                        _scan(&acc[t * bw], i + t, b0, bw, &best, &best_i, &best_j)
                    i += 4
                while i < iend:
                    c0 = &cols[i, 0]
                    for jj in range(bw):
                        acc[jj] = 0.0
                    for k in range(n):
                        a0 = c0[k]
                        row = &panel[k * bw]
                        for jj in range(bw):
                            acc[jj] = acc[jj] + a0 * row[jj]
                    _scan(acc, i, b0, bw, &best, &best_i, &best_j)
                    i += 1
                b0 += bw
    finally:
        free(panel)
        free(acc)

    return best, best_i, best_j
