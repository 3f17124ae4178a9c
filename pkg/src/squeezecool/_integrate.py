"""Fast fixed-structure master-equation integrator for the full-model oracle.

The generator handled here is

    d vec(rho)/dt = [ L_static + f(t) Z_diag
                      + sum_q (e^{i w_q t} S_q) ] vec(rho)

with L_static a CSR superoperator, Z_diag a diagonal superoperator (the sigma_z
drive commutator), f(t) = sum_m c_m cos(w_m t), and a set of phased CSR blocks
S_q for the rotating coupling pieces.  Integration is an adaptive embedded
Dormand-Prince 5(4) with PI step control, compiled with numba when available.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    if os.environ.get("SQUEEZECOOL_NO_NUMBA"):
        raise ImportError("numba disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
         ph_data, ph_ind, ph_ptr, ph_freq, t, y, out):
    n = y.size
    f = 0.0
    for m in range(camp.size):
        f += camp[m] * np.cos(wfreq[m] * t)
    for i in range(n):
        acc = f * zdiag[i] * y[i]
        for k in range(ls_ptr[i], ls_ptr[i + 1]):
            acc += ls_data[k] * y[ls_ind[k]]
        out[i] = acc
    nq = ph_freq.size
    for q in range(nq):
        w = ph_freq[q]
        phase = complex(np.cos(w * t), np.sin(w * t))
        base = q * (n + 1)
        for i in range(n):
            acc = 0.0 + 0.0j
            for k in range(ph_ptr[base + i], ph_ptr[base + i + 1]):
                acc += ph_data[k] * y[ph_ind[k]]
            out[i] += phase * acc


@njit(cache=True)
def _dp45_drive(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                ph_data, ph_ind, ph_ptr, ph_freq,
                y0, sample_times, rtol, atol, max_step):
    n = y0.size
    ns = sample_times.size
    out = np.empty((ns, n), dtype=np.complex128)
    y = y0.copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    k5 = np.empty(n, dtype=np.complex128)
    k6 = np.empty(n, dtype=np.complex128)
    k7 = np.empty(n, dtype=np.complex128)
    ytmp = np.empty(n, dtype=np.complex128)
    t = 0.0
    h = min(max_step, 1e-3)
    err_prev = 1.0
    _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
         ph_data, ph_ind, ph_ptr, ph_freq, t, y, k1)
    n_steps = 0
    for s in range(ns):
        t_end = sample_times[s]
        while t < t_end - 1e-12:
            if h > t_end - t:
                h = t_end - t
            if h < 1e-13:
                return out[:0], -1  # step-size underflow
            for i in range(n):
                ytmp[i] = y[i] + h * 0.2 * k1[i]
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + 0.2 * h, ytmp, k2)
            for i in range(n):
                ytmp[i] = y[i] + h * (0.075 * k1[i] + 0.225 * k2[i])
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + 0.3 * h, ytmp, k3)
            for i in range(n):
                ytmp[i] = y[i] + h * ((44.0 / 45.0) * k1[i] - (56.0 / 15.0) * k2[i]
                                      + (32.0 / 9.0) * k3[i])
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + 0.8 * h, ytmp, k4)
            for i in range(n):
                ytmp[i] = y[i] + h * ((19372.0 / 6561.0) * k1[i]
                                      - (25360.0 / 2187.0) * k2[i]
                                      + (64448.0 / 6561.0) * k3[i]
                                      - (212.0 / 729.0) * k4[i])
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + (8.0 / 9.0) * h, ytmp, k5)
            for i in range(n):
                ytmp[i] = y[i] + h * ((9017.0 / 3168.0) * k1[i]
                                      - (355.0 / 33.0) * k2[i]
                                      + (46732.0 / 5247.0) * k3[i]
                                      + (49.0 / 176.0) * k4[i]
                                      - (5103.0 / 18656.0) * k5[i])
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + h, ytmp, k6)
            for i in range(n):
                ytmp[i] = y[i] + h * ((35.0 / 384.0) * k1[i]
                                      + (500.0 / 1113.0) * k3[i]
                                      + (125.0 / 192.0) * k4[i]
                                      - (2187.0 / 6784.0) * k5[i]
                                      + (11.0 / 84.0) * k6[i])
            _rhs(ls_data, ls_ind, ls_ptr, zdiag, camp, wfreq,
                 ph_data, ph_ind, ph_ptr, ph_freq, t + h, ytmp, k7)
            # embedded error: y5 - y4
            err_sq = 0.0
            for i in range(n):
                ei = h * ((71.0 / 57600.0) * k1[i]
                          - (71.0 / 16695.0) * k3[i]
                          + (71.0 / 1920.0) * k4[i]
                          - (17253.0 / 339200.0) * k5[i]
                          + (22.0 / 525.0) * k6[i]
                          - (1.0 / 40.0) * k7[i])
                sc = atol + rtol * max(abs(y[i]), abs(ytmp[i]))
                r = abs(ei) / sc
                err_sq += r * r
            err = np.sqrt(err_sq / n)
            if err <= 1.0:
                t += h
                for i in range(n):
                    y[i] = ytmp[i]
                    k1[i] = k7[i]
                n_steps += 1
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * err**-0.2 * err_prev**0.08
                    err_prev = err
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
                h = min(h * fac, max_step)
            else:
                h *= max(0.1, 0.9 * err**-0.25)
        for i in range(n):
            out[s, i] = y[i]
    return out, n_steps


def integrate_driven(ls_csr, zdiag, camp, wfreq, phased, y0, sample_times,
                     rtol=1e-9, atol=1e-9, max_step=np.inf):
    """Integrate the driven generator, returning states at the sample times.

    ``phased`` is a list of (csr_matrix, frequency) pairs for the rotating
    coupling blocks.  All CSR blocks must share the system size.
    """
    n = y0.size
    ph_freq = np.array([w for _, w in phased], dtype=float)
    if phased:
        ph_data = np.concatenate([np.asarray(m.data, dtype=complex) for m, _ in phased])
        ph_ind = np.concatenate([np.asarray(m.indices, dtype=np.int64) for m, _ in phased])
        ptrs = []
        offset = 0
        for m, _ in phased:
            ptrs.append(np.asarray(m.indptr, dtype=np.int64) + offset)
            offset += m.nnz
        ph_ptr = np.concatenate(ptrs)
    else:
        ph_data = np.zeros(0, dtype=complex)
        ph_ind = np.zeros(0, dtype=np.int64)
        ph_ptr = np.zeros(0, dtype=np.int64)
    out, n_steps = _dp45_drive(
        np.asarray(ls_csr.data, dtype=complex),
        np.asarray(ls_csr.indices, dtype=np.int64),
        np.asarray(ls_csr.indptr, dtype=np.int64),
        np.asarray(zdiag, dtype=complex),
        np.asarray(camp, dtype=float),
        np.asarray(wfreq, dtype=float),
        ph_data, ph_ind, ph_ptr, ph_freq,
        np.asarray(y0, dtype=complex),
        np.asarray(sample_times, dtype=float),
        float(rtol), float(atol), float(max_step),
    )
    if n_steps < 0:
        raise RuntimeError("step-size underflow in driven integration")
    return out, n_steps
