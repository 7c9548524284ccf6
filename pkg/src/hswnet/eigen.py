"""Dense symmetric eigenvalue solver.

Householder reduction to tridiagonal form followed by the implicit-shift
QL iteration. Eigenvalues only; deterministic for a given input.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = np.finfo(float).eps


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce symmetric ``a`` to tridiagonal form by Householder reflections.

    Returns
    -------
    diag : (n,) ndarray
    offdiag : (n-1,) ndarray
        ``offdiag[k]`` couples ``diag[k]`` and ``diag[k+1]``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    offdiag = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = a[k + 1 :, k]
        norm = math.sqrt(float(x @ x))
        if norm == 0.0:
            offdiag[k] = 0.0
            continue
        alpha = -norm if x[0] >= 0 else norm
        v = x.copy()
        v[0] -= alpha
        v /= math.sqrt(float(v @ v))
        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        offdiag[k] = alpha
    if n >= 2:
        offdiag[n - 2] = a[n - 1, n - 2]
    return np.diag(a).copy(), offdiag


def tridiagonal_eigenvalues(diag, offdiag, max_iter: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL."""
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    if len(e) != n and n > 0:
        raise ValueError("offdiag must have length len(diag) - 1")
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise ArithmeticError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(sorted(d))


def eigvalsh(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of symmetric ``a``, ascending."""
    a = np.asarray(a, dtype=float)
    if a.shape == (1, 1):
        return a.reshape(1).copy()
    return tridiagonal_eigenvalues(*tridiagonalize(a))


def cluster(values, gap: float) -> list[tuple[float, int]]:
    """Group sorted values whose consecutive gaps are below ``gap``.

    Each cluster is reported as ``(mean, size)``.
    """
    values = sorted(float(v) for v in values)
    out: list[tuple[float, int]] = []
    group: list[float] = []
    for v in values:
        if group and v - group[-1] >= gap:
            out.append((math.fsum(group) / len(group), len(group)))
            group = []
        group.append(v)
    if group:
        out.append((math.fsum(group) / len(group), len(group)))
    return out
