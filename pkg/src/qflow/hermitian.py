"""Pointwise Hermitian linear algebra for (1,1)-forms.

Matrices are stored as complex arrays of shape ``(..., n, n)``; all routines
are batched over the leading axes so a whole grid is processed at once.
"""
from math import comb

import numpy as np

from . import symfun


class MetricError(ValueError):
    """The background metric is not positive definite."""


def _as_hermitian(X):
    X = np.asarray(X, dtype=complex)
    if X.ndim < 2 or X.shape[-1] != X.shape[-2]:
        raise ValueError(f"expected (..., n, n) matrices, got shape {X.shape}")
    return X


def _eig2(X):
    a = X[..., 0, 0].real
    d = X[..., 1, 1].real
    b = X[..., 0, 1]
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), np.abs(b))
    return np.stack([mean + rad, mean - rad], axis=-1)


def jacobi_eigh(X, tol=1e-13, max_sweeps=60):
    """Cyclic complex Jacobi rotations; returns ``(w, V)`` with X V = V diag(w).

    Eigenvalues are sorted descending and V's columns follow that order.
    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * |X|_F`` for every matrix in the batch.
    """
    X = _as_hermitian(X)
    n = X.shape[-1]
    batch = X.shape[:-2]
    A = X.reshape((-1, n, n)).copy()
    V = np.broadcast_to(np.eye(n, dtype=complex), A.shape).copy()
    scale = np.linalg.norm(A, axis=(-2, -1))
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A[:, offmask]) ** 2, axis=-1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                mag = np.abs(apq)
                phase = np.where(mag > 0, apq / np.where(mag > 0, mag, 1.0), 1.0)
                theta = 0.5 * np.arctan2(2.0 * mag, A[:, p, p].real - A[:, q, q].real)
                c = np.cos(theta)
                s = np.sin(theta)
                # J = diag(1, conj(phase)) on (p, q) followed by a real rotation
                J = np.broadcast_to(np.eye(n, dtype=complex), A.shape).copy()
                J[:, p, p] = c
                J[:, p, q] = -s
                J[:, q, p] = np.conj(phase) * s
                J[:, q, q] = np.conj(phase) * c
                A = np.conj(np.swapaxes(J, -1, -2)) @ A @ J
                V = V @ J
    w = np.real(np.diagonal(A, axis1=-2, axis2=-1))
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    V = np.take_along_axis(V, order[:, None, :], axis=-1)
    return w.reshape(batch + (n,)), V.reshape(batch + (n, n))


def _whiten(X, g):
    g = _as_hermitian(g)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise MetricError("metric is not positive definite") from exc
    Linv = np.linalg.inv(L)
    return Linv @ X @ np.conj(np.swapaxes(Linv, -1, -2))


def eigen_wrt_metric(X, g=None):
    """Eigenvalues of X with respect to g, sorted descending.

    ``g=None`` means the flat metric (identity). n = 2 uses the closed form;
    larger n goes through :func:`jacobi_eigh`.
    """
    X = _as_hermitian(X)
    if g is not None:
        X = _whiten(X, g)
    if X.shape[-1] == 2:
        return _eig2(X)
    return jacobi_eigh(X)[0]


def quotient_log(X, k, l, g=None):
    """log(S_k / S_l) of the eigenvalues of X with respect to g."""
    return symfun.f_value(eigen_wrt_metric(X, g), k, l)


def wedge_ratio(X, k, g=None):
    """Density of X^k ^ omega^(n-k) against omega^n, i.e. S_k(lambda) / C(n, k)."""
    X = _as_hermitian(X)
    n = X.shape[-1]
    if k == 0:
        out = np.ones(X.shape[:-2])
    else:
        out = symfun.elementary_sym(eigen_wrt_metric(X, g), k) / comb(n, k)
    return float(out) if np.ndim(out) == 0 else out
