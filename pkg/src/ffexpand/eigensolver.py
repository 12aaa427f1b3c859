"""Dense symmetric eigenvalue solver, implemented in-repo.

Householder reduction to tridiagonal form followed by the implicit-shift
QL iteration on the (d, e) pair. Only eigenvalues are produced; the
graphs this package studies never need eigenvectors.

Both stages are plain scalar algorithms. When numba is importable the
hot loops are jitted (single-threaded, so results stay deterministic);
otherwise a vectorised numpy reduction and a pure-Python QL run the same
arithmetic, just slower. The adjacency spectra here carry eigenvalues of
very high multiplicity, which occasionally makes the QL shift strategy
crawl; the sweep budget is sized for that.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["symmetric_eigenvalues", "tridiagonalize", "ql_eigenvalues"]

try:  # pragma: no cover - exercised whenever numba is installed
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]


def _tridiag_kernel(a, d, e):
    # Lower-triangle Householder reduction, in place. a is symmetric on
    # entry; only j <= i entries are referenced or written.
    n = a.shape[0]
    v = np.empty(n)
    w = np.empty(n)
    for k in range(n - 2):
        norm2 = 0.0
        for i in range(k + 1, n):
            norm2 += a[i, k] * a[i, k]
        norm = math.sqrt(norm2)
        if norm == 0.0:
            e[k] = 0.0
            continue
        x0 = a[k + 1, k]
        alpha = -norm if x0 >= 0.0 else norm
        vnorm2 = norm2 - 2.0 * alpha * x0 + alpha * alpha
        vnorm = math.sqrt(vnorm2)
        if vnorm == 0.0:
            e[k] = alpha
            continue
        inv = 1.0 / vnorm
        for i in range(k + 1, n):
            v[i] = a[i, k] * inv
        v[k + 1] = (x0 - alpha) * inv
        # w = A v on the trailing block, one pass over the lower triangle
        for i in range(k + 1, n):
            w[i] = 0.0
        for i in range(k + 1, n):
            vi = v[i]
            s = a[i, i] * vi
            for j in range(k + 1, i):
                s += a[i, j] * v[j]
                w[j] += a[i, j] * vi
            w[i] += s
        kappa = 0.0
        for i in range(k + 1, n):
            kappa += v[i] * w[i]
        for i in range(k + 1, n):
            w[i] -= kappa * v[i]
        for i in range(k + 1, n):
            vi = v[i]
            wi = w[i]
            for j in range(k + 1, i + 1):
                a[i, j] -= 2.0 * (vi * w[j] + wi * v[j])
        e[k] = alpha
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    for i in range(n):
        d[i] = a[i, i]


def _ql_kernel(d, e, max_sweeps):
    # d: diagonal (n), e: subdiagonal padded to length n with e[n-1] = 0.
    # Returns 0 on success, 1 when an eigenvalue exceeds the sweep budget.
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            sign = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sign)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


if _HAVE_NUMBA:  # pragma: no cover
    _tridiag_fast = njit(cache=False)(_tridiag_kernel)
    _ql_fast = njit(cache=False)(_ql_kernel)
else:  # pragma: no cover
    _tridiag_fast = None
    _ql_fast = _ql_kernel


def _tridiagonalize_numpy(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    e = np.zeros(n, dtype=np.float64)
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            e[k] = 0.0
            continue
        alpha = -math.copysign(norm, x[0] if x[0] != 0.0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        vnorm = float(np.linalg.norm(v))
        if vnorm == 0.0:
            e[k] = alpha
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * np.outer(v, w)
        sub -= 2.0 * np.outer(w, v)
        e[k] = alpha
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    d = np.diag(a).astype(np.float64).copy()
    return d, e[:max(n - 1, 0)]


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a symmetric matrix to tridiagonal (d, e); a is overwritten."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if _tridiag_fast is not None:
        d = np.empty(n, dtype=np.float64)
        e = np.zeros(n, dtype=np.float64)
        _tridiag_fast(a, d, e)
        return d, e[:max(n - 1, 0)]
    return _tridiagonalize_numpy(a)


def ql_eigenvalues(d: np.ndarray, e: np.ndarray, max_sweeps: int = 200) -> np.ndarray:
    """Eigenvalues of the symmetric tridiagonal matrix (d, e), ascending."""
    n = d.shape[0]
    dd = np.ascontiguousarray(d, dtype=np.float64).copy()
    ee = np.zeros(n, dtype=np.float64)
    ee[:len(e)] = e
    status = _ql_fast(dd, ee, max_sweeps)
    if status != 0:
        raise ArithmeticError("QL iteration exceeded the sweep budget")
    dd.sort()
    return dd


def symmetric_eigenvalues(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending. Destroys a."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return np.empty(0)
    if n == 1:
        return a[0, :1].copy()
    d, e = tridiagonalize(a)
    return ql_eigenvalues(d, e)
