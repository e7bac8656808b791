# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled vector kernels (see flowspace._kernels.pure for the contract).

All slot values and masks must fit in 64 bits; vectors are short (the
rule state has 14 slots), so fixed stack buffers are used for the
scalar entry points and one heap block for the batch pair scan.
"""

from libc.stdlib cimport free, malloc

DEF MAX_SLOTS = 64

ctypedef unsigned long long u64


cdef Py_ssize_t _load(object seq, u64* buf) except -1:
    cdef Py_ssize_t i, n = len(seq)
    if n > MAX_SLOTS:
        raise ValueError("vector longer than %d slots" % MAX_SLOTS)
    for i in range(n):
        buf[i] = seq[i]
    return n


def translate(values, deltas, masks):
    cdef u64 v[MAX_SLOTS]
    cdef u64 d[MAX_SLOTS]
    cdef u64 m[MAX_SLOTS]
    cdef Py_ssize_t i, n = _load(values, v)
    if _load(deltas, d) != n or _load(masks, m) != n:
        raise ValueError("length mismatch")
    return tuple([(v[i] + d[i]) & m[i] for i in range(n)])


def compose(second_linear, second_translation, first_linear, first_translation, masks):
    cdef u64 sl[MAX_SLOTS]
    cdef u64 st[MAX_SLOTS]
    cdef u64 fl[MAX_SLOTS]
    cdef u64 ft[MAX_SLOTS]
    cdef u64 m[MAX_SLOTS]
    cdef Py_ssize_t i, n = _load(second_linear, sl)
    if (_load(second_translation, st) != n or _load(first_linear, fl) != n
            or _load(first_translation, ft) != n or _load(masks, m) != n):
        raise ValueError("length mismatch")
    lin = tuple([sl[i] & fl[i] for i in range(n)])
    tr = tuple([(sl[i] * ft[i] + st[i]) & m[i] for i in range(n)])
    return lin, tr


def apply(linear, translation, state, masks):
    cdef u64 l[MAX_SLOTS]
    cdef u64 t[MAX_SLOTS]
    cdef u64 s[MAX_SLOTS]
    cdef u64 m[MAX_SLOTS]
    cdef Py_ssize_t i, n = _load(linear, l)
    if _load(translation, t) != n or _load(state, s) != n or _load(masks, m) != n:
        raise ValueError("length mismatch")
    return tuple([(l[i] * s[i] + t[i]) & m[i] for i in range(n)])


def negate(translation, masks):
    cdef u64 t[MAX_SLOTS]
    cdef u64 m[MAX_SLOTS]
    cdef Py_ssize_t i, n = _load(translation, t)
    if _load(masks, m) != n:
        raise ValueError("length mismatch")
    return tuple([(m[i] + 1 - t[i]) & m[i] for i in range(n)])


def is_identity(linear, translation):
    cdef u64 l[MAX_SLOTS]
    cdef u64 t[MAX_SLOTS]
    cdef Py_ssize_t i, n = _load(linear, l)
    if _load(translation, t) != n:
        raise ValueError("length mismatch")
    for i in range(n):
        if l[i] != 1 or t[i] != 0:
            return False
    return True


def inverse_pairs(linears, translations, masks):
    cdef u64 m[MAX_SLOTS]
    cdef Py_ssize_t k = len(linears)
    cdef Py_ssize_t n = _load(masks, m)
    cdef Py_ssize_t i, j, c, base_i, base_j
    cdef bint hit
    if len(translations) != k:
        raise ValueError("length mismatch")
    if k == 0:
        return []
    cdef u64* tr = <u64*> malloc(k * n * sizeof(u64))
    cdef char* ok = <char*> malloc(k * sizeof(char))
    if tr == NULL or ok == NULL:
        free(tr)
        free(ok)
        raise MemoryError()
    out = []
    try:
        for i in range(k):
            lin = linears[i]
            row = translations[i]
            if len(lin) != n or len(row) != n:
                raise ValueError("length mismatch")
            ok[i] = 1
            for c in range(n):
                if lin[c] != 1:
                    ok[i] = 0
                tr[i * n + c] = row[c]
        for i in range(k):
            if not ok[i]:
                continue
            base_i = i * n
            for j in range(i + 1, k):
                if not ok[j]:
                    continue
                base_j = j * n
                hit = True
                for c in range(n):
                    if (tr[base_i + c] + tr[base_j + c]) & m[c] != 0:
                        hit = False
                        break
                if hit:
                    out.append((i, j))
    finally:
        free(tr)
        free(ok)
    return out
