"""Numpy implementations of the hot kernels.

These define the reference behaviour; ``_ckernels.pyx`` mirrors every
function here with the same signature.

Coefficient vectors always have 11 entries ``(a1..a6, b1..b5)`` for

    n^2 = a1 + b1 f + (a2 + b2 f) / (l^2 - (a3 + b3 f)^2)
                   + (a4 + b4 f) / (l^2 - (a5 + b5 f)^2) - a6 l^2

with ``f`` the thermal parameter of the model and ``l`` in micrometres.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def sellmeier_index(coeffs, f, lam):
    c = coeffs
    lam = np.asarray(lam, dtype=float)
    l2 = lam * lam
    p1 = c[2] + c[8] * f
    p2 = c[4] + c[10] * f
    n2 = (
        c[0]
        + c[6] * f
        + (c[1] + c[7] * f) / (l2 - p1 * p1)
        + (c[3] + c[9] * f) / (l2 - p2 * p2)
        - c[5] * l2
    )
    return np.sqrt(n2)


def condition_values(ce, co, f, x):
    x = np.asarray(x, dtype=float)
    return (sellmeier_index(ce, f, x) - sellmeier_index(co, f, x)) / x


def _condition_scalar(ce, co, f, x):
    return float(condition_values(ce, co, f, np.array([x]))[0])


def bisect_level(ce, co, f, level, a, b, xtol=1e-13, maxiter=200):
    """Root of F(x) = level on [a, b]; requires a sign change over the bracket."""
    ga = _condition_scalar(ce, co, f, a) - level
    gb = _condition_scalar(ce, co, f, b) - level
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga * gb > 0.0:
        raise ValueError("bracket does not straddle the level")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        gm = _condition_scalar(ce, co, f, m) - level
        if gm == 0.0:
            return m
        if (gm < 0.0) == (ga < 0.0):
            a, ga = m, gm
        else:
            b = m
        if b - a <= xtol:
            break
    return 0.5 * (a + b)


def pump_averaged_intensity(cp, cs, ci, f, lam_s, lam_p, weights, k_qpm,
                            half_length, lam_lo, lam_hi):
    """Weighted sum over pump nodes of sinc^2((dk - k_qpm) * half_length).

    Rows where the energy-conserving partner wavelength falls outside
    ``[lam_lo, lam_hi]`` contribute nothing.
    """
    lam_s = np.asarray(lam_s, dtype=float)[:, None]
    lam_p = np.asarray(lam_p, dtype=float)[None, :]
    inv_i = 1.0 / lam_p - 1.0 / lam_s
    valid = inv_i > 0.0
    lam_i = np.where(valid, 1.0 / np.where(valid, inv_i, 1.0), 1.0)
    valid &= (lam_i >= lam_lo) & (lam_i <= lam_hi)
    lam_i = np.where(valid, lam_i, lam_lo)
    dk = TWO_PI * (
        sellmeier_index(cp, f, lam_p) / lam_p
        - sellmeier_index(cs, f, lam_s) / lam_s
        - sellmeier_index(ci, f, lam_i) / lam_i
    )
    x = (dk - k_qpm) * half_length
    s = np.sinc(x / np.pi)
    vals = np.where(valid, s * s, 0.0)
    return vals @ np.asarray(weights, dtype=float)
