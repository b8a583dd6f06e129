# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled reduced-form kernels; same contract as ``_kernels_py``."""
from libc.stdlib cimport malloc, realloc, free
from libc.stdint cimport int64_t
from math import isqrt

BACKEND = "cython"

# int64 headroom: b*b <= D and 4*|a|*|c| <= 2*D
MAX_D = 1 << 61


cdef inline int64_t _floormod(int64_t x, int64_t m):
    cdef int64_t r = x % m
    if r < 0:
        r += m
    return r


def reduced_forms(D):
    if D >= MAX_D:
        raise OverflowError("discriminant too large for the compiled kernel")
    cdef int64_t d = D
    cdef int64_t s = isqrt(D)
    cdef int64_t b, a, n, lo, hi
    cdef Py_ssize_t cap = 1024, count = 0
    cdef int64_t *buf = <int64_t *> malloc(2 * cap * sizeof(int64_t))
    cdef int64_t *tmp
    if buf == NULL:
        raise MemoryError()
    try:
        b = 2 - d % 2
        while b <= s:
            n = (d - b * b) // 4
            lo = (s - b + 2) // 2
            hi = (s + b) // 2
            a = lo
            while a <= hi:
                if n % a == 0:
                    if count == cap:
                        cap *= 2
                        tmp = <int64_t *> realloc(buf, 2 * cap * sizeof(int64_t))
                        if tmp == NULL:
                            raise MemoryError()
                        buf = tmp
                    buf[2 * count] = a
                    buf[2 * count + 1] = b
                    count += 1
                a += 1
            b += 2
        out = []
        for i in range(count):
            out.append((buf[2 * i], buf[2 * i + 1]))
            out.append((-buf[2 * i], buf[2 * i + 1]))
        return out
    finally:
        free(buf)


cdef Py_ssize_t _find(int64_t *pa, int64_t *pb, Py_ssize_t m, int64_t a, int64_t b):
    # positive-a table sorted by (b, a); returns position or -1
    cdef Py_ssize_t lo = 0, hi = m - 1, mid
    cdef int64_t aa = a if a > 0 else -a
    while lo <= hi:
        mid = (lo + hi) >> 1
        if pb[mid] < b or (pb[mid] == b and pa[mid] < aa):
            lo = mid + 1
        elif pb[mid] == b and pa[mid] == aa:
            return 2 * mid + (1 if a < 0 else 0)
        else:
            hi = mid - 1
    return -1


def cycle_labels(D, forms):
    if D >= MAX_D:
        raise OverflowError("discriminant too large for the compiled kernel")
    cdef int64_t d = D
    cdef int64_t s = isqrt(D)
    cdef Py_ssize_t nf = len(forms), m = nf // 2
    cdef Py_ssize_t i, j, start
    cdef int64_t a, b, c, two_c
    cdef int ncycles = 0
    cdef int64_t *pa = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t *pb = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int *lab = <int *> malloc((nf + 1) * sizeof(int))
    if pa == NULL or pb == NULL or lab == NULL:
        free(pa); free(pb); free(lab)
        raise MemoryError()
    try:
        for j in range(m):
            pa[j] = forms[2 * j][0]
            pb[j] = forms[2 * j][1]
        for j in range(nf):
            lab[j] = -1
        for start in range(nf):
            if lab[start] >= 0:
                continue
            a = pa[start // 2] if start % 2 == 0 else -pa[start // 2]
            b = pb[start // 2]
            i = start
            while lab[i] < 0:
                lab[i] = ncycles
                c = (b * b - d) // (4 * a)
                two_c = 2 * (c if c > 0 else -c)
                b = s - _floormod(s + b, two_c)
                a = c
                i = _find(pa, pb, m, a, b)
                if i < 0:
                    raise ArithmeticError("reduction walk left the reduced set")
            if i != start:
                raise ArithmeticError("reduction walk did not close")
            ncycles += 1
        return [lab[j] for j in range(nf)], ncycles
    finally:
        free(pa); free(pb); free(lab)
