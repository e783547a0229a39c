"""Elementary symmetric polynomials on eigenvalue tuples and the quotient operator.

Every function accepts a single tuple of shape ``(n,)`` or a batch of shape
``(..., n)``; results broadcast over the leading axes. Indices are 0-based.

The quotient operator is ``F(lam) = log S_k(lam) - log S_l(lam)`` on the
Garding cone ``Gamma_k = {lam : S_j(lam) > 0, j = 1..k}``.
"""
import numpy as np

MAX_DIM = 6


class DomainError(ValueError):
    """Argument outside the algebraic domain of an operation."""


class ConeViolation(ValueError):
    """Eigenvalues left the Garding cone.

    ``level`` is the first j with S_j <= tolerance; ``index`` is the flat
    batch position of the first offending tuple (None for a single tuple).
    """

    def __init__(self, level, index=None, value=None):
        self.level = level
        self.index = index
        self.value = value
        where = "" if index is None else f" at batch index {index}"
        super().__init__(f"S_{level} = {value!r} is not positive{where}")


def _as_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        raise DomainError("eigenvalue tuple must be at least 1-dimensional")
    if lam.shape[-1] > MAX_DIM:
        raise DomainError(f"n={lam.shape[-1]} exceeds the supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(lam)):
        raise DomainError("eigenvalues must be finite")
    return lam


def sym_polys(lam, kmax=None):
    """Return ``[S_0, ..., S_kmax]`` stacked on the last axis.

    Uses the truncated-product recurrence for prod_i (1 + lam_i x), which
    never forms power sums and so has no Newton-identity cancellation.
    """
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if kmax is None:
        kmax = n
    if not 0 <= kmax <= n:
        raise DomainError(f"kmax={kmax} outside [0, {n}]")
    e = np.zeros(lam.shape[:-1] + (kmax + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        li = lam[..., i]
        for j in range(min(i + 1, kmax), 0, -1):
            e[..., j] += li * e[..., j - 1]
    return e


def elementary_sym(lam, k):
    """S_k(lam); S_0 = 1 by the empty-product convention."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    out = sym_polys(lam, k)[..., k]
    return float(out) if out.ndim == 0 else out


def _check_excluded(excluded, n):
    excluded = tuple(int(i) for i in excluded)
    if len(set(excluded)) != len(excluded):
        raise DomainError(f"duplicate excluded indices {excluded}")
    for i in excluded:
        if not 0 <= i < n:
            raise DomainError(f"excluded index {i} outside [0, {n})")
    return excluded


def elementary_sym_excl(lam, k, excluded):
    """S_{k; i_1..i_s}(lam): S_k with the excluded entries set to zero.

    k = -1 and k = -2 return 0, k = 0 returns 1.
    """
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    excluded = _check_excluded(excluded, n)
    if k < -2 or k > n:
        raise DomainError(f"k={k} outside [-2, {n}]")
    if k < 0:
        out = np.zeros(lam.shape[:-1])
    else:
        masked = lam.copy()
        masked[..., list(excluded)] = 0.0
        out = sym_polys(masked, k)[..., k]
    return float(out) if out.ndim == 0 else out


def sym_polys_excl1(lam, kmax):
    """S_{j; i} for all j in [0, kmax] and every single excluded index i.

    Returns shape ``(..., n, kmax + 1)``: axis -2 is the excluded index.
    """
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    stacked = np.broadcast_to(lam[..., None, :], lam.shape[:-1] + (n, n)).copy()
    idx = np.arange(n)
    stacked[..., idx, idx] = 0.0
    return sym_polys(stacked, kmax)


def cone_tolerance(lam, j):
    lam = _as_lambda(lam)
    return 1e-12 * (1.0 + np.max(np.abs(lam), axis=-1)) ** j


def cone_levels_ok(lam, k):
    """Boolean array: True where S_1..S_k all exceed the cone tolerance."""
    lam = _as_lambda(lam)
    S = sym_polys(lam, k)
    ok = np.ones(lam.shape[:-1], dtype=bool)
    for j in range(1, k + 1):
        ok &= S[..., j] > cone_tolerance(lam, j)
    return ok


def in_gamma_k(lam, k):
    """Garding-cone membership; elementwise for batches."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside [1, {n}]")
    ok = cone_levels_ok(lam, k)
    return bool(ok) if ok.ndim == 0 else ok


def require_cone(lam, k, S=None):
    """Raise ConeViolation unless every tuple in ``lam`` is in Gamma_k."""
    lam = _as_lambda(lam)
    if S is None:
        S = sym_polys(lam, k)
    for j in range(1, k + 1):
        bad = ~(S[..., j] > cone_tolerance(lam, j))
        if np.any(bad):
            flat = int(np.flatnonzero(bad.ravel())[0]) if bad.ndim else None
            val = S[..., j].ravel()[flat] if flat is not None else S[..., j]
            raise ConeViolation(j, flat, float(val))


def _check_pair(k, l, n):
    if not 0 <= l < k <= n:
        raise DomainError(f"need 0 <= l < k <= n, got k={k}, l={l}, n={n}")


def f_value(lam, k, l):
    """log S_k - log S_l; raises ConeViolation outside Gamma_k."""
    lam = _as_lambda(lam)
    _check_pair(k, l, lam.shape[-1])
    S = sym_polys(lam, k)
    require_cone(lam, k, S)
    out = np.log(S[..., k]) - np.log(S[..., l])
    return float(out) if out.ndim == 0 else out


def f_gradient(lam, k, l):
    """Diagonal of dF/dX in the eigenframe: S_{k-1;i}/S_k - S_{l-1;i}/S_l."""
    lam = _as_lambda(lam)
    _check_pair(k, l, lam.shape[-1])
    S = sym_polys(lam, k)
    require_cone(lam, k, S)
    Sx = sym_polys_excl1(lam, k - 1)
    grad = Sx[..., k - 1] / S[..., k, None]
    if l >= 1:
        grad = grad - Sx[..., l - 1] / S[..., l, None]
    return grad


def f_pair_coefficient(lam, k, l, i, j):
    """S_{k-2;ij}/S_k - S_{l-2;ij}/S_l for an index pair i != j."""
    lam = _as_lambda(lam)
    n = lam.shape[-1]
    _check_pair(k, l, n)
    if i == j:
        raise DomainError("pair coefficient needs i != j")
    S = sym_polys(lam, k)
    require_cone(lam, k, S)
    out = elementary_sym_excl(lam, k - 2, (i, j)) / S[..., k]
    if l >= 2:
        out = out - elementary_sym_excl(lam, l - 2, (i, j)) / S[..., l]
    return float(out) if np.ndim(out) == 0 else out


def cone_margin(lam, k, tol=1e-12):
    """Largest r >= 0 with lam - r*(1,...,1) still in Gamma_k (0 if outside).

    Gamma_k + Gamma_n is contained in Gamma_k, so every point lam + v with
    v_i > -r stays in the cone.
    """
    lam = np.asarray(lam, dtype=float)
    if not in_gamma_k(lam, k):
        return 0.0
    lo, hi = 0.0, float(np.max(np.abs(lam))) + 1.0
    while hi - lo > tol * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if in_gamma_k(lam - mid, k):
            lo = mid
        else:
            hi = mid
    return lo
