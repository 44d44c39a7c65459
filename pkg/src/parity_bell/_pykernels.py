"""Pure numpy versions of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``PARITY_BELL_PURE`` is set.
"""

import numpy as np

_RESCALE = 1e150
_LOG_RESCALE = np.log(_RESCALE)


def hermite_table(n_levels, q):
    """Normalized oscillator eigenfunctions psi_0..psi_{n_levels-1} at ``q``.

    Upward three-term recurrence on the polynomial part with the Gaussian
    carried as a separate log-scale, so large ``|q|`` does not underflow
    before the polynomial grows.
    """
    q = np.ascontiguousarray(q, dtype=np.float64)
    out = np.empty((n_levels, q.size))
    p_prev = np.zeros_like(q)
    p = np.full_like(q, np.pi ** -0.25)
    logscale = -0.5 * q * q
    for n in range(n_levels):
        with np.errstate(divide="ignore", under="ignore"):
            mag = np.exp(np.log(np.abs(p)) + logscale)
        out[n] = np.copysign(mag, p)
        p_next = np.sqrt(2.0 / (n + 1)) * q * p - np.sqrt(n / (n + 1)) * p_prev
        big = np.abs(p_next) > _RESCALE
        if big.any():
            p_next[big] /= _RESCALE
            p[big] /= _RESCALE
            logscale[big] += _LOG_RESCALE
        p_prev, p = p, p_next
    return out


def pair_sum(wa, wb, a, b):
    """sum_{ij} wa[i] wb[j] a[i, j] b[i, j] as a complex scalar."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return complex(np.asarray(wa, dtype=np.float64) @ (a * b) @ np.asarray(wb, dtype=np.float64))


def _unit(v, fallback):
    nrm = np.sqrt(v @ v)
    return v / nrm if nrm > 0.0 else fallback


def chsh_value(k, n, n2, m, m2):
    return float(n @ k @ (m + m2) + n2 @ k @ (m - m2))


def chsh_ascent(k, starts, tol=1e-15, max_iter=10000):
    """Alternating exact maximization of the CHSH form from each start.

    ``starts`` has shape (R, 4, 3) holding (n, n', m, m'). Each block update
    replaces one vector with the normalized field it couples to, which can
    only increase the value. Returns (values, settings).
    """
    k = np.asarray(k, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.float64)
    values = np.empty(starts.shape[0])
    settings = np.empty_like(starts)
    kt = k.T
    for r in range(starts.shape[0]):
        n, n2, m, m2 = (starts[r, i].copy() for i in range(4))
        old = chsh_value(k, n, n2, m, m2)
        for _ in range(max_iter):
            n = _unit(k @ (m + m2), n)
            n2 = _unit(k @ (m - m2), n2)
            m = _unit(kt @ (n + n2), m)
            m2 = _unit(kt @ (n - n2), m2)
            val = chsh_value(k, n, n2, m, m2)
            if val - old <= tol:
                old = max(val, old)
                break
            old = val
        values[r] = old
        settings[r] = (n, n2, m, m2)
    return values, settings
