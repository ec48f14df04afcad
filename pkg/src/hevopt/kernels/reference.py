"""Numpy implementation of the backward-sweep kernels and interpolation.

This module is the semantic reference for the compiled twin in _sweep.pyx:
the Cython code transcribes these expressions op for op, and both backends
must produce bit-identical float64 results.  When editing arithmetic here,
mirror the change there (tests/test_kernels.py enforces the twin contract).

Conventions shared by both backends:
  * cell lookup is searchsorted(side="right") - 1, clipped to [0, n-2];
    a query bit-equal to a node therefore lands on that node with local
    coordinate exactly 0 (or 1 at the top node), so node queries return
    node values exactly.
  * big-value (dead) corners never mix into finite results: a cell whose
    positive-weight corners are all dead interpolates to the big value;
    a partially dead cell interpolates over its live positive-weight
    corners with renormalized weights PLUS a graded boundary penalty
    (dead-weight fraction times `boundary_penalty`).  A strict
    any-dead-corner clamp provably empties the feasible set here
    (sub-cell forced-regen drift erodes the live band's top edge each
    braking stage while a clamped floor can never extend downward), and
    an unpenalized renormalization leaves the policy without any pressure
    back toward the certified tube.  The penalty is chosen far above any
    real fuel cost and far below the big value, so cost-to-go values sort
    into three clean regimes: real < penalized < dead.
  * candidate costs are fuel + interpolated cost-to-go, clamped to the big
    value; the state-box check runs on the continuous successor before any
    grid snapping.
  * arg-min ties go to the larger control index.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "sweep_stage_two_state",
    "sweep_stage_soc_only",
    "interp_value_1d",
    "interp_value_2d",
    "snap_to_axis",
]


def _cell(axis: np.ndarray, x) -> np.ndarray:
    idx = np.searchsorted(axis, x, side="right") - 1
    return np.clip(idx, 0, axis.size - 2)


def snap_to_axis(x, axis: np.ndarray):
    """Nearest uniform-grid node (axis assumed uniformly spaced)."""
    n = axis.size
    h = (axis[n - 1] - axis[0]) / (n - 1)
    pos = (x - axis[0]) / h
    idx = np.clip(np.floor(pos + 0.5), 0, n - 1).astype(np.intp)
    out = axis[idx]
    return float(out) if np.isscalar(x) else out


def interp_value_1d(
    axis: np.ndarray, j: np.ndarray, x: float, big_value: float,
    boundary_penalty: float = 1.0,
) -> float:
    """Scalar linear interpolation with penalized live-corner renormalization."""
    i = int(_cell(axis, x))
    t = (x - axis[i]) / (axis[i + 1] - axis[i])
    w0 = 1.0 - t
    w1 = t
    j0 = float(j[i])
    j1 = float(j[i + 1])
    if (w0 > 0.0 and j0 >= big_value) or (w1 > 0.0 and j1 >= big_value):
        l0 = 1.0 if j0 < big_value else 0.0
        l1 = 1.0 if j1 < big_value else 0.0
        num = w0 * j0 * l0 + w1 * j1 * l1
        den = w0 * l0 + w1 * l1
        return num / den + (1.0 - den) * boundary_penalty if den > 0.0 else big_value
    return w0 * j0 + w1 * j1


def interp_value_2d(
    soc_axis: np.ndarray,
    theta_axis: np.ndarray,
    j: np.ndarray,
    x: float,
    y: float,
    big_value: float,
    boundary_penalty: float = 1.0,
) -> float:
    """Scalar bilinear interpolation with penalized live-corner renormalization."""
    i = int(_cell(soc_axis, x))
    k = int(_cell(theta_axis, y))
    tx = (x - soc_axis[i]) / (soc_axis[i + 1] - soc_axis[i])
    ty = (y - theta_axis[k]) / (theta_axis[k + 1] - theta_axis[k])
    w00 = (1.0 - tx) * (1.0 - ty)
    w10 = tx * (1.0 - ty)
    w01 = (1.0 - tx) * ty
    w11 = tx * ty
    j00 = float(j[i, k])
    j10 = float(j[i + 1, k])
    j01 = float(j[i, k + 1])
    j11 = float(j[i + 1, k + 1])
    if (
        (w00 > 0.0 and j00 >= big_value)
        or (w10 > 0.0 and j10 >= big_value)
        or (w01 > 0.0 and j01 >= big_value)
        or (w11 > 0.0 and j11 >= big_value)
    ):
        l00 = 1.0 if j00 < big_value else 0.0
        l10 = 1.0 if j10 < big_value else 0.0
        l01 = 1.0 if j01 < big_value else 0.0
        l11 = 1.0 if j11 < big_value else 0.0
        num = ((w00 * j00 * l00 + w10 * j10 * l10) + w01 * j01 * l01) + w11 * j11 * l11
        den = ((w00 * l00 + w10 * l10) + w01 * l01) + w11 * l11
        return num / den + (1.0 - den) * boundary_penalty if den > 0.0 else big_value
    return ((w00 * j00 + w10 * j10) + w01 * j01) + w11 * j11


def sweep_stage_two_state(
    j_next: np.ndarray,      # (ns, nt) cost-to-go at stage k+1
    soc_axis: np.ndarray,    # (ns,)
    theta_axis: np.ndarray,  # (nt,)
    voc: np.ndarray,         # (ns,) pack OCV at the SOC nodes
    rb: np.ndarray,          # (ns,) pack resistance at the SOC nodes
    r_cell: np.ndarray,      # (ns,) per-cell resistance at the SOC nodes
    pm: np.ndarray,          # (nu,) battery electrical power per control
    fuel: np.ndarray,        # (nu,) stage fuel mass per control
    u_ok: np.ndarray,        # (nu,) uint8 torque-split feasibility per control
    dt: float,
    s0: float,
    mass_cp: float,
    alpha2: float,
    alpha3: float,
    t_in1: float,
    t_in2: float,
    soc_lo: float,
    soc_hi: float,
    theta_lo: float,
    theta_hi: float,
    big_value: float,
    boundary_penalty: float,
    snap: bool,
):
    """One backward DP stage on the (SOC, theta) grid.

    Returns (j_out (ns,nt) float64, policy (ns,nt) int16 with -1 for dead).
    """
    ns = soc_axis.size
    nt = theta_axis.size
    M = big_value

    voc_c = voc[:, None]
    rb_c = rb[:, None]

    # electrical chain, state dependence through SOC only: (ns, nu)
    disc = voc_c * voc_c - 4.0 * rb_c * pm[None, :]
    ok = (disc >= 0.0) & (u_ok[None, :] != 0)
    i_b = (voc_c - np.sqrt(np.maximum(disc, 0.0))) / (2.0 * rb_c)
    soc2 = soc_axis[:, None] + dt * (-i_b / s0)
    ok &= (soc2 >= soc_lo) & (soc2 <= soc_hi)
    if snap:
        soc2 = snap_to_axis(soc2, soc_axis)
    q_g = r_cell[:, None] * i_b * i_b

    # thermal chain: (ns, nt, nu)
    q_d = -alpha2 * (theta_axis - t_in1) - alpha3 * (theta_axis - t_in2)  # (nt,)
    th2 = theta_axis[None, :, None] + dt * (
        (q_g[:, None, :] - q_d[None, :, None]) / mass_cp
    )
    ok3 = ok[:, None, :] & (th2 >= theta_lo) & (th2 <= theta_hi)
    if snap:
        th2 = snap_to_axis(th2, theta_axis)

    # bilinear cost-to-go with weight>0 poisoning
    ii = _cell(soc_axis, soc2)                                  # (ns, nu)
    tx = (soc2 - soc_axis[ii]) / (soc_axis[ii + 1] - soc_axis[ii])
    jj = _cell(theta_axis, th2)                                 # (ns, nt, nu)
    ty = (th2 - theta_axis[jj]) / (theta_axis[jj + 1] - theta_axis[jj])

    ii3 = ii[:, None, :]
    tx3 = tx[:, None, :]
    j00 = j_next[ii3, jj]
    j10 = j_next[ii3 + 1, jj]
    j01 = j_next[ii3, jj + 1]
    j11 = j_next[ii3 + 1, jj + 1]
    w00 = (1.0 - tx3) * (1.0 - ty)
    w10 = tx3 * (1.0 - ty)
    w01 = (1.0 - tx3) * ty
    w11 = tx3 * ty
    poisoned = (
        ((w00 > 0.0) & (j00 >= M))
        | ((w10 > 0.0) & (j10 >= M))
        | ((w01 > 0.0) & (j01 >= M))
        | ((w11 > 0.0) & (j11 >= M))
    )
    jn = ((w00 * j00 + w10 * j10) + w01 * j01) + w11 * j11
    l00 = (j00 < M) * 1.0
    l10 = (j10 < M) * 1.0
    l01 = (j01 < M) * 1.0
    l11 = (j11 < M) * 1.0
    num = ((w00 * j00 * l00 + w10 * j10 * l10) + w01 * j01 * l01) + w11 * j11 * l11
    den = ((w00 * l00 + w10 * l10) + w01 * l01) + w11 * l11
    jn_boundary = np.full_like(num, M)
    np.divide(num, den, out=jn_boundary, where=den > 0.0)
    jn_boundary = np.where(den > 0.0, jn_boundary + (1.0 - den) * boundary_penalty, jn_boundary)
    jn = np.where(poisoned, jn_boundary, jn)

    cand = np.minimum(fuel[None, None, :] + jn, M)
    cand = np.where(ok3, cand, M)

    # arg-min with ties to the larger control index
    nu = pm.size
    iu = (nu - 1) - np.argmin(cand[:, :, ::-1], axis=2)
    best = np.take_along_axis(cand, iu[:, :, None], axis=2)[:, :, 0]
    dead = best >= M
    j_out = np.where(dead, M, best)
    policy = np.where(dead, -1, iu).astype(np.int16)
    return j_out, policy


def sweep_stage_soc_only(
    j_next: np.ndarray,    # (ns,)
    soc_axis: np.ndarray,
    voc: np.ndarray,
    rb: np.ndarray,
    pm: np.ndarray,
    fuel: np.ndarray,
    u_ok: np.ndarray,
    dt: float,
    s0: float,
    soc_lo: float,
    soc_hi: float,
    big_value: float,
    boundary_penalty: float,
    snap: bool,
):
    """One backward DP stage on the SOC-only grid (thermal state ignored)."""
    M = big_value
    voc_c = voc[:, None]
    rb_c = rb[:, None]

    disc = voc_c * voc_c - 4.0 * rb_c * pm[None, :]
    ok = (disc >= 0.0) & (u_ok[None, :] != 0)
    i_b = (voc_c - np.sqrt(np.maximum(disc, 0.0))) / (2.0 * rb_c)
    soc2 = soc_axis[:, None] + dt * (-i_b / s0)
    ok &= (soc2 >= soc_lo) & (soc2 <= soc_hi)
    if snap:
        soc2 = snap_to_axis(soc2, soc_axis)

    ii = _cell(soc_axis, soc2)
    tx = (soc2 - soc_axis[ii]) / (soc_axis[ii + 1] - soc_axis[ii])
    j0 = j_next[ii]
    j1 = j_next[ii + 1]
    w0 = 1.0 - tx
    w1 = tx
    poisoned = ((w0 > 0.0) & (j0 >= M)) | ((w1 > 0.0) & (j1 >= M))
    jn = w0 * j0 + w1 * j1
    l0 = (j0 < M) * 1.0
    l1 = (j1 < M) * 1.0
    num = w0 * j0 * l0 + w1 * j1 * l1
    den = w0 * l0 + w1 * l1
    jn_boundary = np.full_like(num, M)
    np.divide(num, den, out=jn_boundary, where=den > 0.0)
    jn_boundary = np.where(den > 0.0, jn_boundary + (1.0 - den) * boundary_penalty, jn_boundary)
    jn = np.where(poisoned, jn_boundary, jn)

    cand = np.minimum(fuel[None, :] + jn, M)
    cand = np.where(ok, cand, M)

    nu = pm.size
    iu = (nu - 1) - np.argmin(cand[:, ::-1], axis=1)
    best = np.take_along_axis(cand, iu[:, None], axis=1)[:, 0]
    dead = best >= M
    j_out = np.where(dead, M, best)
    policy = np.where(dead, -1, iu).astype(np.int16)
    return j_out, policy
