# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled statevector kernels.

Same contract as ``_kernels_py``: flat complex128 state of length 2**n,
basis-state index bit k encodes qubit k, in-place mutation.
"""

from libc.math cimport sqrt

IMPLEMENTATION = "compiled"

ctypedef double complex cplx


cdef inline int popcount64(unsigned long long v) nogil:
    cdef int count = 0
    while v:
        v &= v - 1
        count += 1
    return count


cdef inline Py_ssize_t pair_index(Py_ssize_t pair, Py_ssize_t low_mask, int target) nogil:
    # interleave: low bits below the target, high bits shifted past it
    return ((pair & ~low_mask) << 1) | (pair & low_mask)


def apply_one_qubit(cplx[::1] state, int target, cplx m00, cplx m01, cplx m10, cplx m11):
    cdef Py_ssize_t n_pairs = state.shape[0] >> 1
    cdef Py_ssize_t step = (<Py_ssize_t>1) << target
    cdef Py_ssize_t low_mask = step - 1
    cdef Py_ssize_t pair, i0, i1
    cdef cplx a0, a1
    with nogil:
        for pair in range(n_pairs):
            i0 = pair_index(pair, low_mask, target)
            i1 = i0 | step
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m00 * a0 + m01 * a1
            state[i1] = m10 * a0 + m11 * a1


def apply_controlled_one_qubit(cplx[::1] state, int target, unsigned long long control_mask,
                               cplx m00, cplx m01, cplx m10, cplx m11):
    cdef Py_ssize_t n_pairs = state.shape[0] >> 1
    cdef Py_ssize_t step = (<Py_ssize_t>1) << target
    cdef Py_ssize_t low_mask = step - 1
    cdef Py_ssize_t pair, i0, i1
    cdef cplx a0, a1
    with nogil:
        for pair in range(n_pairs):
            i0 = pair_index(pair, low_mask, target)
            if (<unsigned long long>i0 & control_mask) != control_mask:
                continue
            i1 = i0 | step
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m00 * a0 + m01 * a1
            state[i1] = m10 * a0 + m11 * a1


def apply_swap(cplx[::1] state, int q0, int q1):
    cdef Py_ssize_t dim = state.shape[0]
    cdef unsigned long long b0 = (<unsigned long long>1) << q0
    cdef unsigned long long b1 = (<unsigned long long>1) << q1
    cdef Py_ssize_t i, j
    cdef cplx tmp
    with nogil:
        for i in range(dim):
            # visit each pair once: bit q0 set, bit q1 clear
            if (i & b0) and not (i & b1):
                j = <Py_ssize_t>(((<unsigned long long>i) ^ b0) ^ b1)
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp


def expect_pauli(cplx[::1] state, unsigned long long x_mask, unsigned long long y_mask,
                 unsigned long long z_mask):
    cdef Py_ssize_t dim = state.shape[0]
    cdef unsigned long long flip = x_mask | y_mask
    cdef unsigned long long sign_mask = y_mask | z_mask
    cdef Py_ssize_t i
    cdef cplx acc = 0
    cdef cplx term
    cdef int n_y = popcount64(y_mask) % 4
    cdef cplx phase
    with nogil:
        for i in range(dim):
            term = state[<Py_ssize_t>((<unsigned long long>i) ^ flip)].conjugate() * state[i]
            if popcount64((<unsigned long long>i) & sign_mask) & 1:
                acc -= term
            else:
                acc += term
    phase = 1
    if n_y == 1:
        phase = 1j
    elif n_y == 2:
        phase = -1
    elif n_y == 3:
        phase = -1j
    return complex(phase * acc)


def prob_of_one(cplx[::1] state, int qubit):
    cdef Py_ssize_t dim = state.shape[0]
    cdef unsigned long long bit = (<unsigned long long>1) << qubit
    cdef Py_ssize_t i
    cdef double total = 0.0
    cdef cplx a
    with nogil:
        for i in range(dim):
            if (<unsigned long long>i) & bit:
                a = state[i]
                total += a.real * a.real + a.imag * a.imag
    return total


def project_qubit(cplx[::1] state, int qubit, int outcome, double norm):
    cdef Py_ssize_t dim = state.shape[0]
    cdef unsigned long long bit = (<unsigned long long>1) << qubit
    cdef Py_ssize_t i
    cdef double scale = 1.0 / sqrt(norm) if norm > 0 else 0.0
    cdef bint keep_one = outcome == 1
    with nogil:
        for i in range(dim):
            if ((<unsigned long long>i & bit) != 0) == keep_one:
                state[i] = state[i] * scale
            else:
                state[i] = 0
