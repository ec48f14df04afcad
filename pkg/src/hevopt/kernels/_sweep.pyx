# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backward-sweep kernels.

Bitwise twin of kernels/reference.py: every arithmetic expression is a
transcription of the numpy reference in the same evaluation order, so both
backends produce identical float64 results (enforced by tests).  Do not
"optimise" expressions here without mirroring reference.py.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()

cdef double INF = float("inf")


cdef inline Py_ssize_t _cell(const double[::1] axis, double x) noexcept nogil:
    # searchsorted(side="right") - 1, clipped to [0, n-2]
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = axis.shape[0]
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if x < axis[mid]:
            hi = mid
        else:
            lo = mid + 1
    lo = lo - 1
    if lo < 0:
        lo = 0
    if lo > axis.shape[0] - 2:
        lo = axis.shape[0] - 2
    return lo


cdef inline double _snap(const double[::1] axis, double x) noexcept nogil:
    cdef Py_ssize_t n = axis.shape[0]
    cdef double h = (axis[n - 1] - axis[0]) / (n - 1)
    cdef double pos = (x - axis[0]) / h
    cdef double idx = floor(pos + 0.5)
    if idx < 0.0:
        idx = 0.0
    if idx > n - 1:
        idx = n - 1
    return axis[<Py_ssize_t> idx]


def sweep_stage_two_state(
    const double[:, ::1] j_next,
    const double[::1] soc_axis,
    const double[::1] theta_axis,
    const double[::1] voc,
    const double[::1] rb,
    const double[::1] r_cell,
    const double[::1] pm,
    const double[::1] fuel,
    const unsigned char[::1] u_ok,
    double dt,
    double s0,
    double mass_cp,
    double alpha2,
    double alpha3,
    double t_in1,
    double t_in2,
    double soc_lo,
    double soc_hi,
    double theta_lo,
    double theta_hi,
    double big_value,
    double boundary_penalty,
    bint snap,
):
    cdef Py_ssize_t ns = soc_axis.shape[0]
    cdef Py_ssize_t nt = theta_axis.shape[0]
    cdef Py_ssize_t nu = pm.shape[0]
    cdef double M = big_value

    j_out_arr = np.empty((ns, nt), dtype=np.float64)
    pol_arr = np.empty((ns, nt), dtype=np.int16)
    ok_arr = np.empty(nu, dtype=np.uint8)
    qg_arr = np.empty(nu, dtype=np.float64)
    ii_arr = np.empty(nu, dtype=np.intp)
    tx_arr = np.empty(nu, dtype=np.float64)

    cdef double[:, ::1] j_out = j_out_arr
    cdef short[:, ::1] pol = pol_arr
    cdef unsigned char[::1] oku = ok_arr
    cdef double[::1] qg = qg_arr
    cdef Py_ssize_t[::1] iiu = ii_arr
    cdef double[::1] txu = tx_arr

    cdef Py_ssize_t i, j, iu, bestu, i0, k0
    cdef double voc_i, rb_i, rc_i, soc_i, disc, i_b, soc2, th, q_d, th2
    cdef double tx, ty, w00, w10, w01, w11, j00, j10, j01, j11, jn, cand, best
    cdef double l00, l10, l01, l11, num, den

    with nogil:
        for i in range(ns):
            voc_i = voc[i]
            rb_i = rb[i]
            rc_i = r_cell[i]
            soc_i = soc_axis[i]

            # electrical chain per control (SOC dependence only)
            for iu in range(nu):
                if u_ok[iu] == 0:
                    oku[iu] = 0
                    continue
                disc = voc_i * voc_i - 4.0 * rb_i * pm[iu]
                if disc < 0.0:
                    oku[iu] = 0
                    continue
                i_b = (voc_i - sqrt(disc)) / (2.0 * rb_i)
                soc2 = soc_i + dt * (-i_b / s0)
                if soc2 < soc_lo or soc2 > soc_hi:
                    oku[iu] = 0
                    continue
                if snap:
                    soc2 = _snap(soc_axis, soc2)
                oku[iu] = 1
                qg[iu] = rc_i * i_b * i_b
                i0 = _cell(soc_axis, soc2)
                iiu[iu] = i0
                txu[iu] = (soc2 - soc_axis[i0]) / (soc_axis[i0 + 1] - soc_axis[i0])

            for j in range(nt):
                th = theta_axis[j]
                q_d = -alpha2 * (th - t_in1) - alpha3 * (th - t_in2)
                best = INF
                bestu = -1
                for iu in range(nu):
                    if oku[iu] == 0:
                        cand = M
                    else:
                        th2 = th + dt * ((qg[iu] - q_d) / mass_cp)
                        if th2 < theta_lo or th2 > theta_hi:
                            cand = M
                        else:
                            if snap:
                                th2 = _snap(theta_axis, th2)
                            i0 = iiu[iu]
                            tx = txu[iu]
                            k0 = _cell(theta_axis, th2)
                            ty = (th2 - theta_axis[k0]) / (theta_axis[k0 + 1] - theta_axis[k0])
                            w00 = (1.0 - tx) * (1.0 - ty)
                            w10 = tx * (1.0 - ty)
                            w01 = (1.0 - tx) * ty
                            w11 = tx * ty
                            j00 = j_next[i0, k0]
                            j10 = j_next[i0 + 1, k0]
                            j01 = j_next[i0, k0 + 1]
                            j11 = j_next[i0 + 1, k0 + 1]
                            if (
                                (w00 > 0.0 and j00 >= M)
                                or (w10 > 0.0 and j10 >= M)
                                or (w01 > 0.0 and j01 >= M)
                                or (w11 > 0.0 and j11 >= M)
                            ):
                                l00 = 1.0 if j00 < M else 0.0
                                l10 = 1.0 if j10 < M else 0.0
                                l01 = 1.0 if j01 < M else 0.0
                                l11 = 1.0 if j11 < M else 0.0
                                num = ((w00 * j00 * l00 + w10 * j10 * l10) + w01 * j01 * l01) + w11 * j11 * l11
                                den = ((w00 * l00 + w10 * l10) + w01 * l01) + w11 * l11
                                jn = num / den + (1.0 - den) * boundary_penalty if den > 0.0 else M
                            else:
                                jn = ((w00 * j00 + w10 * j10) + w01 * j01) + w11 * j11
                            cand = fuel[iu] + jn
                            if cand > M:
                                cand = M
                    if cand <= best:
                        best = cand
                        bestu = iu
                if bestu < 0 or best >= M:
                    j_out[i, j] = M
                    pol[i, j] = -1
                else:
                    j_out[i, j] = best
                    pol[i, j] = <short> bestu

    return j_out_arr, pol_arr


def sweep_stage_soc_only(
    const double[::1] j_next,
    const double[::1] soc_axis,
    const double[::1] voc,
    const double[::1] rb,
    const double[::1] pm,
    const double[::1] fuel,
    const unsigned char[::1] u_ok,
    double dt,
    double s0,
    double soc_lo,
    double soc_hi,
    double big_value,
    double boundary_penalty,
    bint snap,
):
    cdef Py_ssize_t ns = soc_axis.shape[0]
    cdef Py_ssize_t nu = pm.shape[0]
    cdef double M = big_value

    j_out_arr = np.empty(ns, dtype=np.float64)
    pol_arr = np.empty(ns, dtype=np.int16)
    cdef double[::1] j_out = j_out_arr
    cdef short[::1] pol = pol_arr

    cdef Py_ssize_t i, iu, bestu, i0
    cdef double voc_i, rb_i, soc_i, disc, i_b, soc2
    cdef double tx, w0, w1, j0, j1, jn, cand, best
    cdef double l0, l1, num, den

    with nogil:
        for i in range(ns):
            voc_i = voc[i]
            rb_i = rb[i]
            soc_i = soc_axis[i]
            best = INF
            bestu = -1
            for iu in range(nu):
                cand = M
                if u_ok[iu] != 0:
                    disc = voc_i * voc_i - 4.0 * rb_i * pm[iu]
                    if disc >= 0.0:
                        i_b = (voc_i - sqrt(disc)) / (2.0 * rb_i)
                        soc2 = soc_i + dt * (-i_b / s0)
                        if soc_lo <= soc2 <= soc_hi:
                            if snap:
                                soc2 = _snap(soc_axis, soc2)
                            i0 = _cell(soc_axis, soc2)
                            tx = (soc2 - soc_axis[i0]) / (soc_axis[i0 + 1] - soc_axis[i0])
                            w0 = 1.0 - tx
                            w1 = tx
                            j0 = j_next[i0]
                            j1 = j_next[i0 + 1]
                            if (w0 > 0.0 and j0 >= M) or (w1 > 0.0 and j1 >= M):
                                l0 = 1.0 if j0 < M else 0.0
                                l1 = 1.0 if j1 < M else 0.0
                                num = w0 * j0 * l0 + w1 * j1 * l1
                                den = w0 * l0 + w1 * l1
                                jn = num / den + (1.0 - den) * boundary_penalty if den > 0.0 else M
                            else:
                                jn = w0 * j0 + w1 * j1
                            cand = fuel[iu] + jn
                            if cand > M:
                                cand = M
                if cand <= best:
                    best = cand
                    bestu = iu
            if bestu < 0 or best >= M:
                j_out[i] = M
                pol[i] = -1
            else:
                j_out[i] = best
                pol[i] = <short> bestu

    return j_out_arr, pol_arr
