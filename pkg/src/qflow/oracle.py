"""Brute-force references for the fast paths.

Nothing here calls into symfun/hermitian/field numerics except to obtain the
quantity under test; each oracle recomputes its answer from the definitions.
"""
from itertools import combinations, permutations
from math import factorial, prod

import numpy as np
from scipy.integrate import simpson

from . import symfun


def sym_enum(lam, k):
    """S_k(lam) as the literal sum over all k-subsets."""
    lam = [float(x) for x in lam]
    if len(lam) > 8:
        raise ValueError("enumeration oracle is limited to n <= 8")
    if not 0 <= k <= len(lam):
        raise ValueError(f"k={k} outside [0, {len(lam)}]")
    return float(sum(prod(lam[i] for i in idx) for idx in combinations(range(len(lam)), k)))


def _perm_sign(p):
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _leibniz_det(M):
    n = len(M)
    return sum(_perm_sign(p) * prod(M[r][p[r]] for r in range(n)) for p in permutations(range(n)))


def mixed_determinant(A, B, i, j, g=None):
    """Density of A^i ^ B^j ^ omega^(n-i-j) by direct determinant expansion.

    Sums det of every matrix whose rows are drawn i times from A, j times
    from B and the rest from g, divided by the multinomial count and det g.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = A.shape[0]
    G = np.eye(n, dtype=complex) if g is None else np.asarray(g, dtype=complex)
    if i < 0 or j < 0 or i + j > n:
        raise ValueError("need i, j >= 0 and i + j <= n")
    source = {"A": A, "B": B, "g": G}
    labels = "A" * i + "B" * j + "g" * (n - i - j)
    total = 0.0
    for assign in set(permutations(labels)):
        total += _leibniz_det([source[lab][r] for r, lab in enumerate(assign)])
    multinomial = factorial(n) // (factorial(i) * factorial(j) * factorial(n - i - j))
    return float((total / multinomial / _leibniz_det(list(G))).real)


def fd_check_gradient(lam, k, l, step=1e-6):
    """Worst deviation between f_gradient and centered differences of f_value."""
    if step <= 0:
        raise ValueError("step must be positive")
    lam = np.asarray(lam, dtype=float)
    grad = symfun.f_gradient(lam, k, l)
    for attempt in range(2):
        try:
            fd = np.empty_like(lam)
            for i in range(lam.size):
                e = np.zeros_like(lam)
                e[i] = step
                fd[i] = (symfun.f_value(lam + e, k, l) - symfun.f_value(lam - e, k, l)) / (2 * step)
            return float(np.max(np.abs(fd - grad)))
        except symfun.ConeViolation:
            if attempt:
                raise
            step /= 10.0


def _shift(u, axis, s):
    idx = (np.arange(u.shape[axis]) + s) % u.shape[axis]
    return np.take(u, idx, axis=axis)


def _hessian(geom, u):
    h2 = geom.h**2
    n = geom.n
    H = np.zeros(u.shape + (n, n), dtype=complex)

    def second(a, b):
        if a == b:
            return (_shift(u, a, 1) + _shift(u, a, -1) - 2 * u) / h2
        pp = _shift(_shift(u, a, 1), b, 1)
        mm = _shift(_shift(u, a, -1), b, -1)
        pm = _shift(_shift(u, a, 1), b, -1)
        mp = _shift(_shift(u, a, -1), b, 1)
        return (pp + mm - pm - mp) / (4 * h2)

    active = 1 if geom.toy else n
    for p in range(active):
        for q in range(active):
            xp, yp, xq, yq = 2 * p, 2 * p + 1, 2 * q, 2 * q + 1
            H[..., p, q] = 0.25 * (second(xp, xq) + second(yp, yq) + 1j * (second(xp, yq) - second(yp, xq)))
    return H


def _minor_density(X, l):
    """S_l of the eigenvalues as the sum of principal l x l minors, over C(n, l)."""
    n = X.shape[-1]
    if l == 0:
        return np.ones(X.shape[:-2])
    subsets = list(combinations(range(n), l))
    total = sum(np.linalg.det(X[..., list(s)][..., list(s), :]) for s in subsets)
    return np.real(total) / len(subsets)


def path_integral_J(geom, u, l, nodes=21):
    """J_l(u) as the composite Simpson rule in s of int u chi_{su}^l ^ omega^(n-l)."""
    if nodes < 3 or nodes % 2 == 0:
        raise ValueError("nodes must be odd and >= 3")
    u = np.asarray(u, dtype=float)
    H = _hessian(geom, u)
    s = np.linspace(0.0, 1.0, nodes)
    vals = [float(np.sum(u * _minor_density(geom.chi + si * H, l))) * geom.weight for si in s]
    return float(simpson(vals, x=s))
