"""The invariant c, the J_l functional, the normalization u_hat and the constant b."""
from dataclasses import dataclass
from math import comb

import numpy as np

from . import hermitian, symfun
from .field import TorusGeometry, chi_u, integrate, mixed_density, oscillation


class ConsistencyError(RuntimeError):
    """Pointwise and integral estimates of b disagree."""


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    l: int
    normalization_volume: float


def form_volume(geom: TorusGeometry, l, X=None):
    """Integral of X^l ^ omega^(n-l); X defaults to the background chi."""
    X = geom.chi if X is None else X
    return integrate(geom, hermitian.wedge_ratio(X, l))


def constant_c(geom: TorusGeometry, k, l):
    return form_volume(geom, k) / form_volume(geom, l)


def J_functional(geom: TorusGeometry, u, l, X=None) -> FunctionalValue:
    """Closed form of J_l along the straight path s -> s u.

    J_l(u) = 1/(l+1) sum_{i=0}^{l} int u chi_u^i ^ chi^(l-i) ^ omega^(n-l)

    ``X`` may pass a precomputed chi_u.
    """
    u = np.asarray(u, dtype=float)
    if X is None:
        X = chi_u(geom, u)
    total = 0.0
    for i in range(l + 1):
        total += integrate(geom, u, mixed_density(X, geom.chi, i, l - i))
    return FunctionalValue(total / (l + 1), l, form_volume(geom, l))


def normalize(geom: TorusGeometry, u, l):
    """u - J_l(u) / int chi^l ^ omega^(n-l)."""
    J = J_functional(geom, u, l)
    return np.asarray(u, dtype=float) - J.value / J.normalization_volume


def log_Psi(psi, n, k, l):
    return np.log(comb(n, k) / comb(n, l)) + np.log(psi)


def estimate_b(geom: TorusGeometry, u_hat, k, l, psi, strict=True):
    """Grid mean of F(chi_uhat) - log Psi, cross-checked against the integral form.

    The integral form is log(int chi_u^k ^ omega^(n-k) / int psi chi_u^l ^ omega^(n-l)).
    Both lie within the range of the pointwise values, so they must agree to
    within 5 osc + 10 h^2. With ``strict`` a disagreement raises
    ConsistencyError; otherwise ``(b, consistent)`` is returned.
    """
    X = chi_u(geom, u_hat)
    lam = hermitian.eigen_wrt_metric(X)
    resid = symfun.f_value(lam, k, l) - log_Psi(psi, geom.n, k, l)
    osc = oscillation(resid)
    if osc > 1e-4:
        raise ValueError(f"u_hat is not near-stationary (osc of rhs = {osc:.3g})")
    b = float(np.mean(resid))
    num = integrate(geom, symfun.elementary_sym(lam, k) / comb(geom.n, k))
    den = integrate(geom, psi, symfun.elementary_sym(lam, l) / comb(geom.n, l))
    b_int = float(np.log(num / den))
    consistent = abs(b - b_int) <= 5.0 * osc + 10.0 * geom.h**2
    if strict:
        if not consistent:
            raise ConsistencyError(f"pointwise b={b!r} vs integral b={b_int!r}")
        return b
    return b, consistent


def elliptic_residual(geom: TorusGeometry, u, k, l, psi, b, lam=None):
    """max |chi_u^k ^ omega^(n-k) - e^b psi chi_u^l ^ omega^(n-l)| as omega^n densities."""
    if lam is None:
        lam = hermitian.eigen_wrt_metric(chi_u(geom, u))
    S = symfun.sym_polys(lam, k)
    lhs = S[..., k] / comb(geom.n, k)
    rhs = np.exp(b) * psi * S[..., l] / comb(geom.n, l)
    return float(np.max(np.abs(lhs - rhs)))
