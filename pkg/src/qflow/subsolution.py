"""C-subsolution check and the pointwise theta dichotomy diagnostic.

The subsolution inequality k chi^(k-1) ^ omega^(n-k) > l psi chi^(l-1) ^ omega^(n-l)
compares two (n-1, n-1)-forms. Both are diagonal in the eigenframe of
chi_ubar, where the i-th entry reduces to S_{k-1;i}/C(n,k) against
psi S_{l-1;i}/C(n,l); the margin is the smallest such difference.
"""
from dataclasses import dataclass
from math import comb

import numpy as np

from . import hermitian, symfun
from .field import TorusGeometry, chi_u
from .functionals import log_Psi

THETA_GRID = 2.0 ** -np.arange(41)


@dataclass
class SubsolutionReport:
    pointwise_ok: np.ndarray
    min_margin: float
    theta_min: float
    lambda_gap: float

    @property
    def failures(self):
        return int(np.count_nonzero(~self.pointwise_ok))

    def summary(self):
        return {
            "min_margin": self.min_margin,
            "theta_min": self.theta_min,
            "lambda_gap": self.lambda_gap,
            "failures": self.failures,
        }


def _margins(lam, k, l, psi):
    n = lam.shape[-1]
    Sx = symfun.sym_polys_excl1(lam, k - 1)
    lhs = Sx[..., k - 1] / comb(n, k)
    if l >= 1:
        rhs = np.asarray(psi)[..., None] * Sx[..., l - 1] / comb(n, l)
    else:
        rhs = 0.0
    return np.min(lhs - rhs, axis=-1)


def pointwise_margin(lam, k, l, psi):
    """Subsolution margin per point; clipped to <= 0 where lam is outside Gamma_k."""
    margin = _margins(lam, k, l, psi)
    return np.where(symfun.cone_levels_ok(lam, k), margin, np.minimum(margin, 0.0))


def lambda_gap(lam, k, l, psi):
    """Largest lambda in {2^-j} keeping the inequality with chi_ubar - lambda g and e^lambda psi."""
    for lam_shift in THETA_GRID:
        m = pointwise_margin(lam - lam_shift, k, l, np.exp(lam_shift) * np.asarray(psi))
        if np.all(m > 0):
            return float(lam_shift)
    return 0.0


def dichotomy_theta(lam_x, sub_diag, dtu, k, l):
    """Largest theta in {2^-j, j = 0..40} for which one branch of the dichotomy holds.

    Branch one: sum_i F^{i ibar}(u - ubar)_{i ibar} - du/dt <= -theta (1 + sum F).
    Branch two: F^{1 1bar} X_{1 1bar} >= theta (1 + sum F), with X_{1 1bar} largest.
    ``lam_x`` must be sorted descending and ``sub_diag`` expressed in the same
    eigenframe. Returns 0 where neither branch holds at 2^-40.
    """
    lam_x = np.asarray(lam_x, dtype=float)
    if np.any(np.diff(lam_x, axis=-1) > 0):
        raise symfun.DomainError("eigenvalues must be sorted descending")
    F = symfun.f_gradient(lam_x, k, l)
    scale = 1.0 + np.sum(F, axis=-1)
    branch1 = np.sum(F * np.asarray(sub_diag), axis=-1) - np.asarray(dtu)
    branch2 = F[..., 0] * lam_x[..., 0]
    theta = np.zeros(np.shape(scale))
    for t in THETA_GRID[::-1]:
        ok = (branch1 <= -t * scale) | (branch2 >= t * scale)
        theta = np.where(ok, t, theta)
    return float(theta) if theta.ndim == 0 else theta


def theta_field(geom: TorusGeometry, u, u_bar, dtu, k, l):
    """dichotomy_theta at every grid point of a flow state."""
    X = chi_u(geom, u)
    w, V = hermitian.jacobi_eigh(X)
    D = X - chi_u(geom, u_bar)
    sub = np.real(np.einsum("...ji,...jk,...ki->...i", np.conj(V), D, V))
    return dichotomy_theta(w, sub, dtu, k, l)


def check_subsolution(geom: TorusGeometry, u_bar, k, l, psi, u=None, dtu=None):
    """Pointwise subsolution check of u_bar.

    theta_min is evaluated at the flow state ``u`` (default: the initial
    state u = 0 with its right-hand side).
    """
    psi = np.broadcast_to(np.asarray(psi, dtype=float), geom.shape)
    u_bar = np.asarray(u_bar, dtype=float)
    lam = hermitian.eigen_wrt_metric(chi_u(geom, u_bar))
    margin = pointwise_margin(lam, k, l, psi)
    ok = margin > 0
    if u is None:
        u = geom.zeros()
    theta_min = 0.0
    try:
        if dtu is None:
            lam_u = hermitian.eigen_wrt_metric(chi_u(geom, u))
            dtu = symfun.f_value(lam_u, k, l) - log_Psi(psi, geom.n, k, l)
        theta_min = float(np.min(theta_field(geom, u, u_bar, dtu, k, l)))
    except symfun.ConeViolation:
        pass
    return SubsolutionReport(ok, float(np.min(margin)), theta_min, lambda_gap(lam, k, l, psi))

