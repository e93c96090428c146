# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GRU step loop: dgemm for the recurrent projection, fused gates.

Semantics match kernels.gru_core_numpy exactly: gate order (z, r, candidate),
single bias folded into x_proj by the caller, reset applied to the recurrent
contribution inside the candidate.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, tanh
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


cdef inline double _sigmoid(double v) noexcept nogil:
    return 1.0 / (1.0 + exp(-v))


def gru_core(double[:, :, ::1] x_proj, double[:, ::1] w_rec, double[:, ::1] h0):
    cdef Py_ssize_t steps = x_proj.shape[0]
    cdef Py_ssize_t batch = x_proj.shape[1]
    cdef Py_ssize_t h3 = x_proj.shape[2]
    cdef Py_ssize_t hidden = h3 // 3

    if w_rec.shape[0] != hidden or w_rec.shape[1] != h3:
        raise ValueError("w_rec shape does not match x_proj gate width")
    if h0.shape[0] != batch or h0.shape[1] != hidden:
        raise ValueError("h0 shape does not match x_proj batch/hidden")

    out_arr = np.empty((steps, batch, hidden), dtype=np.float64)
    h_arr = np.ascontiguousarray(h0).copy()
    gh_arr = np.empty((batch, h3), dtype=np.float64)

    cdef double[:, :, ::1] out = out_arr
    cdef double[:, ::1] h = h_arr
    cdef double[:, ::1] gh = gh_arr

    cdef int m = <int> h3        # columns of the row-major product
    cdef int n = <int> batch     # rows of the row-major product
    cdef int k = <int> hidden
    cdef double one = 1.0, zero = 0.0
    cdef char* no_trans = 'N'
    cdef Py_ssize_t t, b, j
    cdef double z, r, c

    if steps == 0 or batch == 0:
        return out_arr, h_arr

    with nogil:
        for t in range(steps):
            # gh = h @ w_rec using column-major dgemm on row-major buffers:
            # C_rm[n,m] = A_rm[n,k] * B_rm[k,m]  ==  dgemm(N, N, m, n, k, B, A)
            dgemm(no_trans, no_trans, &m, &n, &k, &one,
                  &w_rec[0, 0], &m, &h[0, 0], &k, &zero, &gh[0, 0], &m)
            for b in range(batch):
                for j in range(hidden):
                    z = _sigmoid(x_proj[t, b, j] + gh[b, j])
                    r = _sigmoid(x_proj[t, b, hidden + j] + gh[b, hidden + j])
                    c = tanh(x_proj[t, b, 2 * hidden + j] + r * gh[b, 2 * hidden + j])
                    h[b, j] = (1.0 - z) * c + z * h[b, j]
                    out[t, b, j] = h[b, j]
    return out_arr, h_arr
