"""Hot inner loops over prime fields.

Each kernel exists twice: a loop-level implementation compiled by numba and a
vectorised numpy implementation. ``rref_mod_p`` and ``eval_quadratic_mod_p``
dispatch according to :data:`dgquot._accel.USE_NUMBA`; the explicit variants
stay importable so tests and the benchmark can compare them.

All arrays are ``int64`` with entries in ``[0, p)`` and ``p < 2**31``, so a single
product fits in 63 bits; sums are reduced after every step.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit


# --------------------------------------------------------------------------- rref


def _rref_mod_p_loops(a, p):
    m, n = a.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        # modular inverse by Fermat
        inv = 1
        base = a[r, c]
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(m):
            if i != r:
                f = a[i, c]
                if f != 0:
                    for j in range(c, n):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return pivots[:r]


_rref_mod_p_nb = njit(_rref_mod_p_loops)


def rref_mod_p_numba(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    work = np.ascontiguousarray(a, dtype=np.int64).copy()
    piv = _rref_mod_p_nb(work, np.int64(p))
    return work, piv


def rref_mod_p_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    work = np.array(a, dtype=np.int64, copy=True)
    m, n = work.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(work[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        inv = pow(int(work[r, c]), p - 2, p)
        work[r, c:] = (work[r, c:] * inv) % p
        col = work[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            work[rows, c:] = (work[rows, c:] - (col[rows, None] * work[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return work, np.array(pivots, dtype=np.int64)


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``a`` over GF(p); returns ``(R, pivot_columns)``."""
    if a.size == 0:
        return np.zeros(a.shape, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return rref_mod_p_numba(a, p)
    return rref_mod_p_numpy(a, p)


# ------------------------------------------------------------------ quadratic maps


def _eval_quadratic_loops(x, lin_out, lin_var, lin_coef, quad_out, quad_i, quad_j, quad_coef, n_out, p):
    n = x.shape[0]
    out = np.zeros((n, n_out), dtype=np.int64)
    for s in range(n):
        for t in range(lin_out.shape[0]):
            v = x[s, lin_var[t]]
            if v != 0:
                o = lin_out[t]
                out[s, o] = (out[s, o] + lin_coef[t] * v) % p
        for t in range(quad_out.shape[0]):
            v = x[s, quad_i[t]]
            if v != 0:
                w = x[s, quad_j[t]]
                if w != 0:
                    o = quad_out[t]
                    out[s, o] = (out[s, o] + quad_coef[t] * ((v * w) % p)) % p
    return out


_eval_quadratic_nb = njit(_eval_quadratic_loops)


def _as64(*arrays):
    return tuple(np.ascontiguousarray(a, dtype=np.int64) for a in arrays)


def eval_quadratic_numba(x, lin, quad, n_out, p):
    lin_out, lin_var, lin_coef = _as64(*lin)
    quad_out, quad_i, quad_j, quad_coef = _as64(*quad)
    return _eval_quadratic_nb(
        np.ascontiguousarray(x, dtype=np.int64), lin_out, lin_var, lin_coef,
        quad_out, quad_i, quad_j, quad_coef, np.int64(n_out), np.int64(p),
    )


def eval_quadratic_numpy(x, lin, quad, n_out, p):
    x = np.asarray(x, dtype=np.int64)
    lin_out, lin_var, lin_coef = _as64(*lin)
    quad_out, quad_i, quad_j, quad_coef = _as64(*quad)
    n = x.shape[0]
    out = np.zeros((n_out, n), dtype=np.int64)
    if lin_out.size:
        terms = (lin_coef[:, None] * x[:, lin_var].T) % p
        np.add.at(out, lin_out, terms)
        out %= p
    if quad_out.size:
        # chunk so that the partial sums stay far below 2**63
        step = 1 << 20
        for lo in range(0, quad_out.size, step):
            sl = slice(lo, lo + step)
            prod = (x[:, quad_i[sl]].T * x[:, quad_j[sl]].T) % p
            terms = (quad_coef[sl, None] * prod) % p
            np.add.at(out, quad_out[sl], terms)
            out %= p
    return np.ascontiguousarray(out.T)


def eval_quadratic_mod_p(x, lin, quad, n_out: int, p: int) -> np.ndarray:
    """Evaluate a batch of quadratic maps ``F(x) = L x + Q(x, x)`` over GF(p).

    ``x`` has shape ``(samples, variables)``. ``lin`` is ``(out, var, coef)`` and
    ``quad`` is ``(out, var_i, var_j, coef)``, all flat arrays of equal length.
    Returns an array of shape ``(samples, n_out)``.
    """
    if USE_NUMBA:
        return eval_quadratic_numba(x, lin, quad, n_out, p)
    return eval_quadratic_numpy(x, lin, quad, n_out, p)
