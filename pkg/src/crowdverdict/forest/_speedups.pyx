# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-search kernel.

Contract and floating-point evaluation order match ``_split_py.scan_best_split``
exactly; the two kernels are interchangeable bit-for-bit.  Sorting is an
in-place introsort-style quicksort on (value, label) pairs; label order inside
runs of equal values does not affect the result because candidate thresholds
only exist between distinct values.
"""

import numpy as np


cdef inline void _insertion_sort(double* v, unsigned char* l, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double vk
    cdef unsigned char lk
    for i in range(lo + 1, hi + 1):
        vk = v[i]
        lk = l[i]
        j = i - 1
        while j >= lo and v[j] > vk:
            v[j + 1] = v[j]
            l[j + 1] = l[j]
            j -= 1
        v[j + 1] = vk
        l[j + 1] = lk


cdef inline void _swap(double* v, unsigned char* l, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef double tv = v[a]
    cdef unsigned char tl = l[a]
    v[a] = v[b]
    l[a] = l[b]
    v[b] = tv
    l[b] = tl


cdef void _quicksort(double* v, unsigned char* l, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    # Iterative quicksort with a manual stack; median-of-three pivot.  The
    # larger partition is pushed and the smaller iterated, so 128 slots cover
    # any input that fits in memory.
    cdef Py_ssize_t stack_lo[128]
    cdef Py_ssize_t stack_hi[128]
    cdef int top = 0
    cdef Py_ssize_t i, j, mid
    cdef double pivot
    stack_lo[0] = lo
    stack_hi[0] = hi
    while top >= 0:
        lo = stack_lo[top]
        hi = stack_hi[top]
        top -= 1
        while hi - lo > 16:
            mid = lo + (hi - lo) // 2
            if v[mid] < v[lo]:
                _swap(v, l, mid, lo)
            if v[hi] < v[lo]:
                _swap(v, l, hi, lo)
            if v[hi] < v[mid]:
                _swap(v, l, hi, mid)
            pivot = v[mid]
            i = lo
            j = hi
            while i <= j:
                while v[i] < pivot:
                    i += 1
                while v[j] > pivot:
                    j -= 1
                if i <= j:
                    _swap(v, l, i, j)
                    i += 1
                    j -= 1
            # Recurse into the smaller side via the stack, loop on the larger.
            if j - lo < hi - i:
                if i < hi:
                    top += 1
                    stack_lo[top] = i
                    stack_hi[top] = hi
                hi = j
            else:
                if lo < j:
                    top += 1
                    stack_lo[top] = lo
                    stack_hi[top] = j
                lo = i
        if hi > lo:
            _insertion_sort(v, l, lo, hi)


def scan_best_split(double[:, ::1] x, const unsigned char[:] y, Py_ssize_t min_leaf):
    """Best (column, threshold, score) over all columns of a node sub-matrix."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k = x.shape[1]
    cdef Py_ssize_t i, j, row
    cdef long long total = 0
    for row in range(n):
        total += y[row]
    cdef double parent = (<double> (total * (n - total))) / (<double> n)

    buf_v = np.empty(n, dtype=np.float64)
    buf_l = np.empty(n, dtype=np.uint8)
    cdef double[:] vals = buf_v
    cdef unsigned char[:] labs = buf_l

    cdef Py_ssize_t best_j = -1
    cdef double best_thr = 0.0
    cdef double best_s = 0.0

    cdef long long c_left, c_right, n_left, n_right
    cdef double imp_left, imp_right, s, thr
    cdef double col_s, col_thr
    cdef bint col_found

    with nogil:
        for j in range(k):
            for row in range(n):
                vals[row] = x[row, j]
                labs[row] = y[row]
            _quicksort(&vals[0], &labs[0], 0, n - 1)
            col_found = False
            col_s = 0.0
            col_thr = 0.0
            c_left = 0
            for i in range(n - 1):
                c_left += labs[i]
                if vals[i] == vals[i + 1]:
                    continue
                n_left = i + 1
                n_right = n - n_left
                if n_left < min_leaf or n_right < min_leaf:
                    continue
                c_right = total - c_left
                imp_left = (<double> (c_left * (n_left - c_left))) / (<double> n_left)
                imp_right = (<double> (c_right * (n_right - c_right))) / (<double> n_right)
                s = parent - imp_left - imp_right
                if not col_found or s > col_s:
                    col_found = True
                    col_s = s
                    thr = (vals[i] + vals[i + 1]) / 2.0
                    if thr >= vals[i + 1]:
                        thr = vals[i]
                    col_thr = thr
            if col_found and col_s > best_s and col_s > 0.0:
                best_j = j
                best_thr = col_thr
                best_s = col_s

    return best_j, best_thr, best_s
