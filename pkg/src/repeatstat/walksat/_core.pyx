# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled WalkSAT-SKC kernel; same algorithm and draw order as _pycore.run."""

import numpy as np
from libc.stdint cimport uint64_t, int32_t
from libc.stdlib cimport malloc, free


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    state[0] += 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _unit(uint64_t* state) noexcept nogil:
    return <double>(_next(state) >> 11) * (1.0 / 9007199254740992.0)


cdef inline Py_ssize_t _below(uint64_t* state, Py_ssize_t n) noexcept nogil:
    return <Py_ssize_t>(_unit(state) * n)


def run(const int32_t[::1] lits, const int32_t[::1] cstart, const int32_t[::1] occ,
        const int32_t[::1] ostart, int num_vars, double w, long long max_flips,
        unsigned long long seed):
    cdef Py_ssize_t num_clauses = cstart.shape[0] - 1
    cdef uint64_t state = seed
    assign_arr = np.empty(num_vars, dtype=np.uint8)
    cdef unsigned char[::1] assign = assign_arr
    cdef Py_ssize_t v, c, j, k, t, nunsat = 0, ci, start, end, nzero, ncand, pick, slot, li
    cdef int32_t lit, var, b, best
    cdef long long flips = 0
    cdef Py_ssize_t pos, neg
    cdef Py_ssize_t maxw = 1

    for c in range(num_clauses):
        if cstart[c + 1] - cstart[c] > maxw:
            maxw = cstart[c + 1] - cstart[c]

    cdef int32_t* numtrue = <int32_t*>malloc(max(num_clauses, 1) * sizeof(int32_t))
    cdef int32_t* unsat = <int32_t*>malloc(max(num_clauses, 1) * sizeof(int32_t))
    cdef int32_t* where = <int32_t*>malloc(max(num_clauses, 1) * sizeof(int32_t))
    cdef int32_t* breaks = <int32_t*>malloc(maxw * sizeof(int32_t))
    cdef Py_ssize_t* cands = <Py_ssize_t*>malloc(maxw * sizeof(Py_ssize_t))
    if not numtrue or not unsat or not where or not breaks or not cands:
        free(numtrue); free(unsat); free(where); free(breaks); free(cands)
        raise MemoryError()

    try:
        with nogil:
            for v in range(num_vars):
                assign[v] = <unsigned char>(_next(&state) >> 63)
            for c in range(num_clauses):
                t = 0
                for j in range(cstart[c], cstart[c + 1]):
                    lit = lits[j]
                    if lit > 0:
                        if assign[lit - 1] == 1:
                            t += 1
                    elif assign[-lit - 1] == 0:
                        t += 1
                numtrue[c] = <int32_t>t
                if t == 0:
                    where[c] = <int32_t>nunsat
                    unsat[nunsat] = <int32_t>c
                    nunsat += 1
                else:
                    where[c] = -1

            while True:
                if nunsat == 0:
                    break
                if flips >= max_flips:
                    flips = -1
                    break
                ci = unsat[_below(&state, nunsat)]
                start = cstart[ci]
                end = cstart[ci + 1]
                nzero = 0
                best = 0x7FFFFFFF
                for j in range(start, end):
                    lit = lits[j]
                    if lit > 0:
                        li = 2 * (lit - 1) + 1
                    else:
                        li = 2 * (-lit - 1)
                    b = 0
                    for k in range(ostart[li], ostart[li + 1]):
                        if numtrue[occ[k]] == 1:
                            b += 1
                    breaks[j - start] = b
                    if b == 0:
                        cands[nzero] = j
                        nzero += 1
                    if b < best:
                        best = b
                if nzero > 0:
                    pick = cands[_below(&state, nzero)]
                elif _unit(&state) < w:
                    pick = start + _below(&state, end - start)
                else:
                    ncand = 0
                    for j in range(start, end):
                        if breaks[j - start] == best:
                            cands[ncand] = j
                            ncand += 1
                    pick = cands[_below(&state, ncand)]

                lit = lits[pick]
                var = lit if lit > 0 else -lit
                assign[var - 1] ^= 1
                if assign[var - 1] == 1:
                    pos = 2 * (var - 1)
                else:
                    pos = 2 * (var - 1) + 1
                neg = pos ^ 1
                for k in range(ostart[pos], ostart[pos + 1]):
                    c = occ[k]
                    numtrue[c] += 1
                    if numtrue[c] == 1:
                        nunsat -= 1
                        slot = where[c]
                        if unsat[nunsat] != c:
                            unsat[slot] = unsat[nunsat]
                            where[unsat[nunsat]] = <int32_t>slot
                        where[c] = -1
                for k in range(ostart[neg], ostart[neg + 1]):
                    c = occ[k]
                    numtrue[c] -= 1
                    if numtrue[c] == 0:
                        where[c] = <int32_t>nunsat
                        unsat[nunsat] = <int32_t>c
                        nunsat += 1
                flips += 1
    finally:
        free(numtrue); free(unsat); free(where); free(breaks); free(cands)

    return flips, assign_arr
