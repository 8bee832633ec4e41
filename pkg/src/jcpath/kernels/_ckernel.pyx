# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagator kernels; same contract as ``_pure``."""


def apply_branch(double complex[:, :, :, :] psi,
                 const double complex[:, :, :] blocks,
                 double complex g0_phase,
                 double complex edge_phase,
                 const double complex[:] spectator):
    cdef Py_ssize_t D = psi.shape[1]
    cdef Py_ssize_t M = psi.shape[2]
    cdef Py_ssize_t B = psi.shape[3]
    cdef Py_ssize_t n, m, b
    cdef double complex e, g, b00, b01, b10, b11, s
    if blocks.shape[0] != D - 1 or spectator.shape[0] != M:
        raise ValueError("kernel coefficient shapes do not match the state")
    with nogil:
        for m in range(M):
            s = spectator[m]
            for n in range(D - 1):
                b00 = blocks[n, 0, 0] * s
                b01 = blocks[n, 0, 1] * s
                b10 = blocks[n, 1, 0] * s
                b11 = blocks[n, 1, 1] * s
                for b in range(B):
                    e = psi[0, n, m, b]
                    g = psi[1, n + 1, m, b]
                    psi[0, n, m, b] = b00 * e + b01 * g
                    psi[1, n + 1, m, b] = b10 * e + b11 * g
            for b in range(B):
                psi[1, 0, m, b] = psi[1, 0, m, b] * (g0_phase * s)
                psi[0, D - 1, m, b] = psi[0, D - 1, m, b] * (edge_phase * s)


def apply_diagonal(double complex[:, :] psi, const double complex[:] diag):
    cdef Py_ssize_t i, b
    cdef Py_ssize_t N = psi.shape[0]
    cdef Py_ssize_t B = psi.shape[1]
    if diag.shape[0] != N:
        raise ValueError("diagonal length does not match the state")
    with nogil:
        for i in range(N):
            for b in range(B):
                psi[i, b] = psi[i, b] * diag[i]
