"""Compiled inner loops for lattice reduction and enumeration.

Bases are real ``float64`` matrices whose *columns* are the basis vectors.
All kernels are ``nogil`` so trial blocks can run on worker threads.

Status codes returned by the search kernels:

* ``OK`` (0): search completed.
* ``BUDGET`` (-1): node budget exhausted; the result must not be used.
"""

import numpy as np
from numba import njit

OK = 0
BUDGET = -1

# sentinel coefficient bounds for unconstrained searches
UNBOUNDED = 1 << 40

_TIE_RTOL = 1e-10
_TIE_ATOL = 1e-14


@njit(cache=True, nogil=True)
def gso(B):
    """Gram-Schmidt data of the columns of ``B``: (squared norms, mu, B*)."""
    m, n = B.shape
    bstar = np.zeros((m, n))
    bnorm2 = np.zeros(n)
    mu = np.zeros((n, n))
    for i in range(n):
        for r in range(m):
            bstar[r, i] = B[r, i]
        for j in range(i):
            if bnorm2[j] > 0.0:
                dot = 0.0
                for r in range(m):
                    dot += B[r, i] * bstar[r, j]
                mu[i, j] = dot / bnorm2[j]
            for r in range(m):
                bstar[r, i] -= mu[i, j] * bstar[r, j]
        s = 0.0
        for r in range(m):
            s += bstar[r, i] * bstar[r, i]
        bnorm2[i] = s
        mu[i, i] = 1.0
    return bnorm2, mu, bstar


@njit(cache=True, nogil=True)
def lll(B, delta):
    """LLL-reduce the columns of ``B``. Returns ``(reduced, U)`` with reduced ~ B @ U."""
    m, n = B.shape
    B = B.copy()
    U = np.eye(n, dtype=np.int64)
    bnorm2, mu, _ = gso(B)
    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 1000000:
            break
        for j in range(k - 1, -1, -1):
            q = np.floor(mu[k, j] + 0.5)
            if q != 0.0:
                qi = np.int64(q)
                for r in range(m):
                    B[r, k] -= q * B[r, j]
                for r in range(n):
                    U[r, k] -= qi * U[r, j]
                for l in range(j):
                    mu[k, l] -= q * mu[j, l]
                mu[k, j] -= q
        if bnorm2[k] >= (delta - mu[k, k - 1] * mu[k, k - 1]) * bnorm2[k - 1]:
            k += 1
        else:
            for r in range(m):
                tmp = B[r, k]
                B[r, k] = B[r, k - 1]
                B[r, k - 1] = tmp
            for r in range(n):
                ti = U[r, k]
                U[r, k] = U[r, k - 1]
                U[r, k - 1] = ti
            bnorm2, mu, _ = gso(B)
            if k > 1:
                k -= 1
    return B, U


@njit(cache=True, nogil=True)
def qr_r(B, t):
    """Upper-triangular factor of ``B`` and the projected target.

    Returns ``(R, tq, rest2)`` where ``tq = Q^T t`` and ``rest2`` is the squared
    norm of the part of ``t`` outside the column span.
    """
    m, n = B.shape
    bnorm2, mu, bstar = gso(B)
    R = np.zeros((n, n))
    tq = np.zeros(n)
    for j in range(n):
        nj = np.sqrt(bnorm2[j])
        R[j, j] = nj
        for i in range(j + 1, n):
            R[j, i] = mu[i, j] * nj
        dot = 0.0
        for r in range(m):
            dot += t[r] * bstar[r, j]
        tq[j] = dot / nj
    t2 = 0.0
    for r in range(m):
        t2 += t[r] * t[r]
    p2 = 0.0
    for j in range(n):
        p2 += tq[j] * tq[j]
    rest2 = t2 - p2
    if rest2 < 0.0:
        rest2 = 0.0
    return R, tq, rest2


@njit(cache=True, nogil=True)
def _center(R, tq, x, k):
    n = R.shape[0]
    s = tq[k]
    for j in range(k + 1, n):
        s -= R[k, j] * x[j]
    return s / R[k, k]


@njit(cache=True, nogil=True)
def babai(R, tq, lo, hi):
    """Nearest-plane point in the triangular frame, clipped to ``[lo, hi]``.

    Returns ``(x, d2)`` with ``d2 = ||R x - tq||^2``.
    """
    n = R.shape[0]
    x = np.zeros(n, dtype=np.int64)
    d2 = 0.0
    for k in range(n - 1, -1, -1):
        c = _center(R, tq, x, k)
        v = np.int64(np.floor(c + 0.5))
        if v < lo[k]:
            v = lo[k]
        elif v > hi[k]:
            v = hi[k]
        x[k] = v
        e = R[k, k] * (v - c)
        d2 += e * e
    return x, d2


@njit(cache=True, nogil=True)
def _imatvec(U, x):
    n = U.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        s = 0
        for j in range(U.shape[1]):
            s += U[i, j] * x[j]
        out[i] = s
    return out


@njit(cache=True, nogil=True)
def _lex_less(a, b):
    for i in range(a.shape[0]):
        if a[i] < b[i]:
            return True
        if a[i] > b[i]:
            return False
    return False


@njit(cache=True, nogil=True)
def _next_sibling(k, x, xl, xr, c, lo, hi):
    # nearest remaining integer to c[k] inside [lo, hi]; ties go left
    left_ok = xl[k] >= lo[k]
    right_ok = xr[k] <= hi[k]
    if not left_ok and not right_ok:
        return False
    if left_ok and right_ok:
        if abs(xl[k] - c[k]) <= abs(xr[k] - c[k]):
            x[k] = xl[k]
            xl[k] -= 1
        else:
            x[k] = xr[k]
            xr[k] += 1
    elif left_ok:
        x[k] = xl[k]
        xl[k] -= 1
    else:
        x[k] = xr[k]
        xr[k] += 1
    return True


@njit(cache=True, nogil=True)
def _init_level(k, x, xl, xr, c, lo, hi):
    v = np.int64(np.floor(c[k] + 0.5))
    if v < lo[k]:
        v = lo[k]
    elif v > hi[k]:
        v = hi[k]
    x[k] = v
    xl[k] = v - 1
    xr[k] = v + 1


@njit(cache=True, nogil=True)
def search(R, tq, lo, hi, U, x0, d0, exclude_zero, max_nodes):
    """Schnorr-Euchner search for the point minimizing ``||R x - tq||``.

    ``x0``/``d0`` seed the incumbent (a Babai point for CVP, a basis vector
    for SVP). Candidates with equal distance (to a relative 1e-10) are
    resolved towards the lexicographically smallest ``U @ x``.

    Returns ``(x, U @ x, d2, nodes, status)``.
    """
    n = R.shape[0]
    best = x0.copy()
    best_orig = _imatvec(U, best)
    best_d = d0
    bound = best_d + _TIE_RTOL * best_d + _TIE_ATOL
    x = np.zeros(n, dtype=np.int64)
    xl = np.zeros(n, dtype=np.int64)
    xr = np.zeros(n, dtype=np.int64)
    c = np.zeros(n)
    partial = np.zeros(n + 1)
    nodes = 0
    k = n - 1
    c[k] = tq[k] / R[k, k]
    _init_level(k, x, xl, xr, c, lo, hi)
    while True:
        diff = x[k] - c[k]
        e = R[k, k] * diff
        d = partial[k + 1] + e * e
        nodes += 1
        if nodes > max_nodes:
            return best, best_orig, best_d, nodes, BUDGET
        if d <= bound:
            if k > 0:
                partial[k] = d
                k -= 1
                c[k] = _center(R, tq, x, k)
                _init_level(k, x, xl, xr, c, lo, hi)
                continue
            skip = False
            if exclude_zero:
                skip = True
                for i in range(n):
                    if x[i] != 0:
                        skip = False
                        break
            if not skip:
                orig = _imatvec(U, x)
                tol = _TIE_RTOL * best_d + _TIE_ATOL
                if d < best_d - tol:
                    best[:] = x
                    best_orig = orig
                    best_d = d
                elif _lex_less(orig, best_orig):
                    best[:] = x
                    best_orig = orig
                    if d < best_d:
                        best_d = d
                bound = best_d + _TIE_RTOL * best_d + _TIE_ATOL
        else:
            k += 1
            if k >= n:
                break
        while not _next_sibling(k, x, xl, xr, c, lo, hi):
            k += 1
            if k >= n:
                break
        if k >= n:
            break
    return best, best_orig, best_d, nodes, OK


@njit(cache=True, nogil=True)
def count_ball(R, radius2, max_nodes):
    """Number of ``x`` with ``||R x||^2 <= radius2``; -1 when over budget."""
    n = R.shape[0]
    lo = np.full(n, -UNBOUNDED, dtype=np.int64)
    hi = np.full(n, UNBOUNDED, dtype=np.int64)
    tq = np.zeros(n)
    bound = radius2 + _TIE_RTOL * radius2 + _TIE_ATOL
    x = np.zeros(n, dtype=np.int64)
    xl = np.zeros(n, dtype=np.int64)
    xr = np.zeros(n, dtype=np.int64)
    c = np.zeros(n)
    partial = np.zeros(n + 1)
    nodes = 0
    count = 0
    k = n - 1
    c[k] = 0.0
    _init_level(k, x, xl, xr, c, lo, hi)
    while True:
        e = R[k, k] * (x[k] - c[k])
        d = partial[k + 1] + e * e
        nodes += 1
        if nodes > max_nodes:
            return -1
        if d <= bound:
            if k > 0:
                partial[k] = d
                k -= 1
                c[k] = _center(R, tq, x, k)
                _init_level(k, x, xl, xr, c, lo, hi)
                continue
            count += 1
        else:
            k += 1
            if k >= n:
                break
        while not _next_sibling(k, x, xl, xr, c, lo, hi):
            k += 1
            if k >= n:
                break
        if k >= n:
            break
    return count


@njit(cache=True, nogil=True)
def closest_point(B, t, lo, hi, reduce, delta, max_nodes):
    """Exact closest point of the lattice ``B Z^n`` (or its box ``[lo, hi]``).

    With ``reduce`` the basis is LLL-reduced first; bounds are only
    meaningful without reduction (they apply to the coefficients searched).
    Returns ``(coeffs, d2, status)`` with coefficients in the input basis.
    """
    n = B.shape[1]
    if reduce:
        Bred, U = lll(B, delta)
    else:
        Bred = B
        U = np.eye(n, dtype=np.int64)
    R, tq, rest2 = qr_r(Bred, t)
    x0, d0 = babai(R, tq, lo, hi)
    _, orig, d2, _, status = search(R, tq, lo, hi, U, x0, d0, False, max_nodes)
    return orig, d2 + rest2, status


@njit(cache=True, nogil=True)
def shortest_vector(B, delta, max_nodes):
    """Exact shortest nonzero vector of ``B Z^n``: ``(coeffs, d2, status)``."""
    m, n = B.shape
    Bred, U = lll(B, delta)
    t = np.zeros(m)
    R, tq, _ = qr_r(Bred, t)
    best_i = 0
    best_n2 = np.inf
    for i in range(n):
        s = 0.0
        for r in range(m):
            s += Bred[r, i] * Bred[r, i]
        if s < best_n2:
            best_n2 = s
            best_i = i
    x0 = np.zeros(n, dtype=np.int64)
    x0[best_i] = 1
    lo = np.full(n, -UNBOUNDED, dtype=np.int64)
    hi = np.full(n, UNBOUNDED, dtype=np.int64)
    _, orig, d2, _, status = search(R, tq, lo, hi, U, x0, best_n2, True, max_nodes)
    return orig, d2, status


@njit(cache=True, nogil=True)
def lll_babai_point(B, t, delta):
    """Babai nearest-plane on the LLL-reduced basis, in input coefficients."""
    n = B.shape[1]
    Bred, U = lll(B, delta)
    R, tq, _ = qr_r(Bred, t)
    lo = np.full(n, -UNBOUNDED, dtype=np.int64)
    hi = np.full(n, UNBOUNDED, dtype=np.int64)
    x, _ = babai(R, tq, lo, hi)
    return _imatvec(U, x)


# -- batched drivers (one basis per trial) ---------------------------------

@njit(cache=True, nogil=True)
def batch_closest(Bs, ts, lo, hi, reduce, delta, max_nodes):
    K, m, n = Bs.shape
    out = np.zeros((K, n), dtype=np.int64)
    status = np.zeros(K, dtype=np.int64)
    for i in range(K):
        orig, _, st = closest_point(Bs[i], ts[i], lo, hi, reduce, delta, max_nodes)
        out[i] = orig
        status[i] = st
    return out, status


@njit(cache=True, nogil=True)
def batch_lll_babai(Bs, ts, delta):
    K, m, n = Bs.shape
    out = np.zeros((K, n), dtype=np.int64)
    for i in range(K):
        out[i] = lll_babai_point(Bs[i], ts[i], delta)
    return out


@njit(cache=True, nogil=True)
def batch_shortest(Bs, delta, max_nodes):
    K = Bs.shape[0]
    d2 = np.zeros(K)
    status = np.zeros(K, dtype=np.int64)
    for i in range(K):
        _, d, st = shortest_vector(Bs[i], delta, max_nodes)
        d2[i] = d
        status[i] = st
    return d2, status
