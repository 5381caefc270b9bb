# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Gather kernel behind the 3x3 convolution layers.

The convolution itself is a matrix product against the weights reshaped
to (9*C, O); what dominates on small images is building the column
buffer.  This module does that gather with straight memcpy runs: for
each output location the three rows of the 3x3 patch are contiguous
3*C-element slices of the padded NHWC input.
"""

from libc.string cimport memcpy


ctypedef fused real:
    float
    double


def gather3x3(const real[:, :, :, ::1] xp, real[:, ::1] col):
    """Fill col (B*H*W, 9*C) with 3x3 patches of xp (B, H+2, W+2, C).

    Column layout is (tap row, tap col, channel) fastest-channel, so
    col @ w.reshape(9*C, O) is the convolution output.
    """
    cdef Py_ssize_t B = xp.shape[0]
    cdef Py_ssize_t Hp = xp.shape[1]
    cdef Py_ssize_t Wp = xp.shape[2]
    cdef Py_ssize_t C = xp.shape[3]
    cdef Py_ssize_t H = Hp - 2
    cdef Py_ssize_t W = Wp - 2
    cdef Py_ssize_t run = 3 * C
    cdef Py_ssize_t b, h, w, i, r
    cdef real *dst
    cdef const real *src
    if H < 1 or W < 1:
        raise ValueError("padded input smaller than the kernel")
    if col.shape[0] != B * H * W or col.shape[1] != 3 * run:
        raise ValueError("column buffer shape mismatch")
    with nogil:
        r = 0
        for b in range(B):
            for h in range(H):
                for w in range(W):
                    dst = &col[r, 0]
                    for i in range(3):
                        src = &xp[b, h + i, w, 0]
                        memcpy(dst, src, run * sizeof(real))
                        dst += run
                    r += 1


def maxpool2x2(const real[:, :, :, ::1] x, real[:, :, :, ::1] y,
               unsigned char[:, :, :, ::1] am):
    """2x2/2 max pool of x (B, H, W, C) into y (B, H/2, W/2, C).

    am records which tap won, 0..3 in (row, col) order with ties going
    to the earliest tap, as the backward pass routes gradients there.
    """
    cdef Py_ssize_t B = x.shape[0]
    cdef Py_ssize_t H = x.shape[1]
    cdef Py_ssize_t W = x.shape[2]
    cdef Py_ssize_t C = x.shape[3]
    cdef Py_ssize_t Ho = H // 2, Wo = W // 2
    cdef Py_ssize_t b, h, w, c, i, j, t
    cdef real v, best
    cdef unsigned char bt
    if H % 2 or W % 2:
        raise ValueError("pool input sides must be even")
    if y.shape[0] != B or y.shape[1] != Ho or y.shape[2] != Wo or y.shape[3] != C:
        raise ValueError("pool output shape mismatch")
    if am.shape[0] != B or am.shape[1] != Ho or am.shape[2] != Wo or am.shape[3] != C:
        raise ValueError("pool argmax shape mismatch")
    with nogil:
        for b in range(B):
            for h in range(Ho):
                for w in range(Wo):
                    for c in range(C):
                        best = x[b, 2 * h, 2 * w, c]
                        bt = 0
                        t = 0
                        for i in range(2):
                            for j in range(2):
                                if t > 0:
                                    v = x[b, 2 * h + i, 2 * w + j, c]
                                    if v > best:
                                        best = v
                                        bt = <unsigned char> t
                                t += 1
                        y[b, h, w, c] = best
                        am[b, h, w, c] = bt


def maxpool2x2_backward(const real[:, :, :, ::1] dy,
                        const unsigned char[:, :, :, ::1] am,
                        real[:, :, :, ::1] dx):
    """Scatter dy back through the taps recorded by maxpool2x2."""
    cdef Py_ssize_t B = dy.shape[0]
    cdef Py_ssize_t Ho = dy.shape[1]
    cdef Py_ssize_t Wo = dy.shape[2]
    cdef Py_ssize_t C = dy.shape[3]
    cdef Py_ssize_t b, h, w, c
    cdef unsigned char t
    if dx.shape[0] != B or dx.shape[1] != 2 * Ho or dx.shape[2] != 2 * Wo or dx.shape[3] != C:
        raise ValueError("pool gradient shape mismatch")
    with nogil:
        dx[:, :, :, :] = <real> 0
        for b in range(B):
            for h in range(Ho):
                for w in range(Wo):
                    for c in range(C):
                        t = am[b, h, w, c]
                        dx[b, 2 * h + (t >> 1), 2 * w + (t & 1), c] = dy[b, h, w, c]
