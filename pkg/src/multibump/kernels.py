"""Hot grid-wide loops with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the environment variable
``MULTIBUMP_BACKEND`` ("numba" or "numpy").  Default is numba when it is
importable.  Both paths compute identical arithmetic so results agree to
machine precision; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np

_requested = os.environ.get("MULTIBUMP_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"MULTIBUMP_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_HAVE_NUMBA = False
if _requested == "numba":
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _laplacian_1d_numpy(u, h):
    out = -2.0 * u
    out[:-1] += u[1:]
    out[1:] += u[:-1]
    return out / (h * h)


def _laplacian_2d_numpy(u, h):
    out = -4.0 * u
    out[:-1, :] += u[1:, :]
    out[1:, :] += u[:-1, :]
    out[:, :-1] += u[:, 1:]
    out[:, 1:] += u[:, :-1]
    return out / (h * h)


def _laplacian_3d_numpy(u, h):
    out = -6.0 * u
    out[:-1, :, :] += u[1:, :, :]
    out[1:, :, :] += u[:-1, :, :]
    out[:, :-1, :] += u[:, 1:, :]
    out[:, 1:, :] += u[:, :-1, :]
    out[:, :, :-1] += u[:, :, 1:]
    out[:, :, 1:] += u[:, :, :-1]
    return out / (h * h)


def _envelope_sum_numpy(coords, centers, eta):
    out = np.zeros(coords.shape[0])
    for c in centers:
        d = np.sqrt(np.sum((coords - c[None, :]) ** 2, axis=1))
        out += np.exp(-eta * d)
    return out


def _cubic_tail_eval_numpy(r, h_table, coefs, r_max, amp, rate, nu):
    """Evaluate the radial table (uniform-knot cubic pieces) with decay tail."""
    out = np.empty_like(r)
    inside = r < r_max
    ri = r[inside]
    idx = np.minimum((ri / h_table).astype(np.int64), coefs.shape[1] - 1)
    t = ri - idx * h_table
    c = coefs[:, idx]
    out[inside] = ((c[0] * t + c[1]) * t + c[2]) * t + c[3]
    ro = r[~inside]
    if nu == 0.0:
        out[~inside] = amp * np.exp(-rate * ro)
    else:
        out[~inside] = amp * ro ** (-nu) * np.exp(-rate * ro)
    return out


def _radial_translate_sum_numpy(coords, centers, h_table, coefs, r_max, amp, rate, nu):
    out = np.zeros(coords.shape[0])
    for c in centers:
        d = np.sqrt(np.sum((coords - c[None, :]) ** 2, axis=1))
        out += _cubic_tail_eval_numpy(d, h_table, coefs, r_max, amp, rate, nu)
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _laplacian_1d_numba(u, h):
        n = u.shape[0]
        out = np.empty(n)
        inv = 1.0 / (h * h)
        for i in range(n):
            left = u[i - 1] if i > 0 else 0.0
            right = u[i + 1] if i < n - 1 else 0.0
            out[i] = (left + right - 2.0 * u[i]) * inv
        return out

    @njit(cache=True, parallel=True)
    def _laplacian_2d_numba(u, h):
        n0, n1 = u.shape
        out = np.empty((n0, n1))
        inv = 1.0 / (h * h)
        for i in prange(n0):
            for j in range(n1):
                acc = -4.0 * u[i, j]
                if i > 0:
                    acc += u[i - 1, j]
                if i < n0 - 1:
                    acc += u[i + 1, j]
                if j > 0:
                    acc += u[i, j - 1]
                if j < n1 - 1:
                    acc += u[i, j + 1]
                out[i, j] = acc * inv
        return out

    @njit(cache=True, parallel=True)
    def _laplacian_3d_numba(u, h):
        n0, n1, n2 = u.shape
        out = np.empty((n0, n1, n2))
        inv = 1.0 / (h * h)
        for i in prange(n0):
            for j in range(n1):
                for l in range(n2):
                    acc = -6.0 * u[i, j, l]
                    if i > 0:
                        acc += u[i - 1, j, l]
                    if i < n0 - 1:
                        acc += u[i + 1, j, l]
                    if j > 0:
                        acc += u[i, j - 1, l]
                    if j < n1 - 1:
                        acc += u[i, j + 1, l]
                    if l > 0:
                        acc += u[i, j, l - 1]
                    if l < n2 - 1:
                        acc += u[i, j, l + 1]
                    out[i, j, l] = acc * inv
        return out

    @njit(cache=True, parallel=True)
    def _envelope_sum_numba(coords, centers, eta):
        m, dim = coords.shape
        k = centers.shape[0]
        out = np.zeros(m)
        for i in prange(m):
            acc = 0.0
            for s in range(k):
                d2 = 0.0
                for j in range(dim):
                    dd = coords[i, j] - centers[s, j]
                    d2 += dd * dd
                acc += np.exp(-eta * np.sqrt(d2))
            out[i] = acc
        return out

    @njit(cache=True, parallel=True)
    def _radial_translate_sum_numba(coords, centers, h_table, coefs, r_max, amp, rate, nu):
        m, dim = coords.shape
        k = centers.shape[0]
        nseg = coefs.shape[1]
        out = np.zeros(m)
        for i in prange(m):
            acc = 0.0
            for s in range(k):
                d2 = 0.0
                for j in range(dim):
                    dd = coords[i, j] - centers[s, j]
                    d2 += dd * dd
                r = np.sqrt(d2)
                if r < r_max:
                    idx = int(r / h_table)
                    if idx > nseg - 1:
                        idx = nseg - 1
                    t = r - idx * h_table
                    acc += ((coefs[0, idx] * t + coefs[1, idx]) * t + coefs[2, idx]) * t + coefs[3, idx]
                else:
                    if nu == 0.0:
                        acc += amp * np.exp(-rate * r)
                    else:
                        acc += amp * r ** (-nu) * np.exp(-rate * r)
            out[i] = acc
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def laplacian(u, h):
    """Second-order 5/7-point Laplacian with Dirichlet zero outside the box.

    `u` is shaped (n,), (n, n) or (n, n, n); returns an array of the same shape.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    if BACKEND == "numba":
        if u.ndim == 1:
            return _laplacian_1d_numba(u, h)
        if u.ndim == 2:
            return _laplacian_2d_numba(u, h)
        return _laplacian_3d_numba(u, h)
    if u.ndim == 1:
        return _laplacian_1d_numpy(u, h)
    if u.ndim == 2:
        return _laplacian_2d_numpy(u, h)
    return _laplacian_3d_numpy(u, h)


def envelope_sum(coords, centers, eta):
    """Sum_i exp(-eta*|x - Q_i|) at each row of `coords` (m, dim)."""
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if BACKEND == "numba":
        return _envelope_sum_numba(coords, centers, eta)
    return _envelope_sum_numpy(coords, centers, eta)


def radial_translate_sum(coords, centers, h_table, coefs, r_max, amp, rate, nu):
    """Sum of translated radial profiles evaluated from piecewise-cubic coefficients.

    `coefs` is (4, nseg) with segment-local polynomials c0*t^3+c1*t^2+c2*t+c3 on
    uniform knots of spacing `h_table`; beyond `r_max` the fitted decay law
    amp * r^(-nu) * exp(-rate*r) takes over.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    coefs = np.ascontiguousarray(coefs, dtype=np.float64)
    if BACKEND == "numba":
        return _radial_translate_sum_numba(coords, centers, h_table, coefs,
                                           r_max, amp, rate, nu)
    return _radial_translate_sum_numpy(coords, centers, h_table, coefs,
                                       r_max, amp, rate, nu)
