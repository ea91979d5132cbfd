# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled dilated 1D convolution kernels (stride 1, "same" padding).

Mirrors the interface of _conv_numpy: float64 C-contiguous arrays in
time-major (batch, time, channels) layout.  Inner loops run over the
contiguous channel axis.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv1d_forward(cnp.ndarray[double, ndim=3] x_arr,
                   cnp.ndarray[double, ndim=3] w_arr,
                   cnp.ndarray[double, ndim=1] b_arr,
                   int dilation):
    cdef double[:, :, ::1] x = np.ascontiguousarray(x_arr)
    # tap-major copy of the weights: wt[j, i, o]
    cdef double[:, :, ::1] wt = np.ascontiguousarray(np.transpose(w_arr, (2, 1, 0)))
    cdef double[::1] b = np.ascontiguousarray(b_arr)
    cdef Py_ssize_t n = x.shape[0], t = x.shape[1], ci = x.shape[2]
    cdef Py_ssize_t k = wt.shape[0], co = wt.shape[2]
    cdef Py_ssize_t pad = dilation * (k - 1) // 2
    y_arr = np.empty((n, t, co), dtype=np.float64)
    cdef double[:, :, ::1] y = y_arr
    cdef Py_ssize_t bi, i, j, o, tt, lo, hi, off
    cdef double xv

    with nogil:
        for bi in range(n):
            for tt in range(t):
                for o in range(co):
                    y[bi, tt, o] = b[o]
            for j in range(k):
                off = j * dilation - pad
                lo = -off if off < 0 else 0
                hi = t - off if off > 0 else t
                for tt in range(lo, hi):
                    for i in range(ci):
                        xv = x[bi, tt + off, i]
                        if xv != 0.0:
                            for o in range(co):
                                y[bi, tt, o] += xv * wt[j, i, o]
    return y_arr


def conv1d_grad_input(cnp.ndarray[double, ndim=3] gy_arr,
                      cnp.ndarray[double, ndim=3] w_arr,
                      int dilation):
    cdef double[:, :, ::1] gy = np.ascontiguousarray(gy_arr)
    # tap-major, output-channel-middle copy: wq[j, o, i]
    cdef double[:, :, ::1] wq = np.ascontiguousarray(np.transpose(w_arr, (2, 0, 1)))
    cdef Py_ssize_t n = gy.shape[0], t = gy.shape[1], co = gy.shape[2]
    cdef Py_ssize_t k = wq.shape[0], ci = wq.shape[2]
    cdef Py_ssize_t pad = dilation * (k - 1) // 2
    gx_arr = np.zeros((n, t, ci), dtype=np.float64)
    cdef double[:, :, ::1] gx = gx_arr
    cdef Py_ssize_t bi, i, j, o, tt, lo, hi, off
    cdef double gv

    # gx[n,t+off,i] += gy[n,t,o] * w[o,i,j], off = j*dilation - pad
    with nogil:
        for bi in range(n):
            for j in range(k):
                off = j * dilation - pad
                lo = -off if off < 0 else 0
                hi = t - off if off > 0 else t
                for tt in range(lo, hi):
                    for o in range(co):
                        gv = gy[bi, tt, o]
                        if gv != 0.0:
                            for i in range(ci):
                                gx[bi, tt + off, i] += gv * wq[j, o, i]
    return gx_arr


def conv1d_grad_weights(cnp.ndarray[double, ndim=3] gy_arr,
                        cnp.ndarray[double, ndim=3] x_arr,
                        int k,
                        int dilation):
    cdef double[:, :, ::1] gy = np.ascontiguousarray(gy_arr)
    cdef double[:, :, ::1] x = np.ascontiguousarray(x_arr)
    cdef Py_ssize_t n = gy.shape[0], t = gy.shape[1], co = gy.shape[2]
    cdef Py_ssize_t ci = x.shape[2]
    cdef Py_ssize_t pad = dilation * (k - 1) // 2
    gw_arr = np.zeros((co, ci, k), dtype=np.float64)
    gb_arr = np.zeros(co, dtype=np.float64)
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t bi, i, j, o, tt, lo, hi, off
    cdef double gv

    with nogil:
        for bi in range(n):
            for tt in range(t):
                for o in range(co):
                    gb[o] += gy[bi, tt, o]
            for j in range(k):
                off = j * dilation - pad
                lo = -off if off < 0 else 0
                hi = t - off if off > 0 else t
                for tt in range(lo, hi):
                    for o in range(co):
                        gv = gy[bi, tt, o]
                        if gv != 0.0:
                            for i in range(ci):
                                gw[o, i, j] += gv * x[bi, tt + off, i]
    return gw_arr, gb_arr
