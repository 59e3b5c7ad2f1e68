# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Hamming-code kernels; same contract as :mod:`lpreps._kernels_py`."""

from libc.stdlib cimport calloc, malloc, free
from libc.stdint cimport uint64_t

BACKEND = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _weight(uint64_t v) noexcept nogil:
    return __builtin_popcountll(v)


def greedy_code(int n, int m, list seeds):
    cdef uint64_t size = (<uint64_t>1) << n
    cdef uint64_t word, position, i, count = 0, k
    cdef unsigned char* blocked = <unsigned char*>calloc(size, 1)
    cdef uint64_t* masks
    if blocked == NULL:
        raise MemoryError()
    for word in range(size):
        if _weight(word) < m:
            count += 1
    masks = <uint64_t*>malloc(count * sizeof(uint64_t))
    if masks == NULL:
        free(blocked)
        raise MemoryError()
    k = 0
    for word in range(size):
        if _weight(word) < m:
            masks[k] = word
            k += 1
    words = []
    try:
        for seed in seeds:
            word = seed
            words.append(int(word))
            for i in range(count):
                blocked[masks[i] ^ word] = 1
        position = 0
        while position < size:
            if not blocked[position]:
                words.append(int(position))
                for i in range(count):
                    blocked[masks[i] ^ position] = 1
            position += 1
    finally:
        free(blocked)
        free(masks)
    return words


def min_pairwise_distance(list words):
    cdef Py_ssize_t n = len(words), i, j
    cdef int best = 1 << 30, d
    cdef uint64_t* arr
    if n < 2:
        return -1
    arr = <uint64_t*>malloc(n * sizeof(uint64_t))
    if arr == NULL:
        raise MemoryError()
    for i in range(n):
        arr[i] = words[i]
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                d = _weight(arr[i] ^ arr[j])
                if d < best:
                    best = d
    free(arr)
    return best
