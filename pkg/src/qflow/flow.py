"""Explicit time integration of du/dt = log(S_k / S_l)(chi_u) - log Psi.

Psi = C(n,k)/C(n,l) * psi. The flow starts from u = 0 and is advanced with
Heun's method under a frozen-coefficient parabolic step bound.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field as dc_field
from math import inf

import numpy as np

from . import functionals, hermitian, symfun
from .field import TorusGeometry, chi_u, oscillation

log = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "dt", "min_dtu", "max_dtu", "osc_dtu", "J_l", "residual_inf", "b_est")

CONVERGED = "converged"
MAX_STEPS = "max_steps"
CONE_EXIT = "cone_exit"


class ConeExit(RuntimeError):
    """chi_u left Gamma_k at some grid point."""

    def __init__(self, level, point, message=""):
        self.level = level
        self.point = point
        super().__init__(message or f"chi_u left Gamma_{level} at {point}")


class NumericalBlowUp(FloatingPointError):
    pass


@dataclass
class FlowConfig:
    k: int
    l: int
    psi: np.ndarray
    cfl: float = 0.2
    stop_osc: float = 1e-8
    t_max: float = inf
    max_steps: int = 1_000_000
    snapshot_every: int = 1
    max_retries: int = 20
    # dichotomy diagnostic: sampled every theta_every steps when u_bar is set
    u_bar: np.ndarray | None = None
    theta_every: int = 0

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=float)
        if not 0 <= self.l < self.k:
            raise ValueError(f"need 0 <= l < k, got k={self.k}, l={self.l}")
        if not np.all(np.isfinite(self.psi)) or np.any(self.psi <= 0):
            raise ValueError("psi must be finite and positive everywhere")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl={self.cfl} must lie in (0, 1]")
        if self.stop_osc <= 0:
            raise ValueError("stop_osc must be positive")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")

    def log_Psi(self, n):
        cached = self.__dict__.get("_log_Psi")
        if cached is None or cached[0] != n:
            cached = (n, functionals.log_Psi(self.psi, n, self.k, self.l))
            self.__dict__["_log_Psi"] = cached
        return cached[1]


@dataclass(frozen=True)
class FlowState:
    u: np.ndarray
    t: float
    dtu: np.ndarray
    step_index: int = 0
    dt: float = 0.0
    # chi_u and its eigenvalues, cached from the rhs evaluation
    X: np.ndarray | None = dc_field(default=None, repr=False, compare=False)
    lam: np.ndarray | None = dc_field(default=None, repr=False, compare=False)


@dataclass
class FlowReport:
    series: np.ndarray
    final_u: np.ndarray
    final_u_hat: np.ndarray
    final_b: float
    decay_rate: float
    status: str
    residual: float = float("nan")
    b_consistent: bool = True
    message: str = ""
    theta_samples: list = dc_field(default_factory=list)

    def column(self, name):
        return self.series[:, SERIES_COLUMNS.index(name)]

    @property
    def steps(self):
        return len(self.series) - 1


def _cone_exit(geom, exc: symfun.ConeViolation):
    point = geom.point(exc.index) if exc.index is not None else None
    return ConeExit(exc.level, point)


def _evaluate(geom, config, u):
    X = chi_u(geom, u)
    lam = hermitian.eigen_wrt_metric(X)
    try:
        F = symfun.f_value(lam, config.k, config.l)
    except symfun.ConeViolation as exc:
        raise _cone_exit(geom, exc) from None
    except symfun.DomainError as exc:
        raise NumericalBlowUp(str(exc)) from None
    return X, lam, F - config.log_Psi(geom.n)


def rhs(geom: TorusGeometry, config: FlowConfig, u):
    """Pointwise F(chi_u) - log Psi; raises ConeExit with the offending point."""
    return _evaluate(geom, config, u)[2]


def stable_dt(geom: TorusGeometry, config: FlowConfig, u, lam=None):
    """cfl h^2 / (4 max sum_i F^{i ibar})."""
    if lam is None:
        lam = hermitian.eigen_wrt_metric(chi_u(geom, u))
    try:
        grad = symfun.f_gradient(lam, config.k, config.l)
    except symfun.ConeViolation as exc:
        raise _cone_exit(geom, exc) from None
    return config.cfl * geom.h**2 / (4.0 * float(np.max(np.sum(grad, axis=-1))))


def initial_state(geom: TorusGeometry, config: FlowConfig) -> FlowState:
    u = geom.zeros()
    X, lam, dtu = _evaluate(geom, config, u)
    return FlowState(u, 0.0, dtu, 0, 0.0, X, lam)


def step(geom: TorusGeometry, config: FlowConfig, state: FlowState) -> FlowState:
    """One Heun step; dt is halved on cone exit, at most ``max_retries`` times."""
    dt = stable_dt(geom, config, state.u, state.lam)
    k1 = state.dtu
    failure = None
    for _ in range(config.max_retries + 1):
        try:
            k2 = rhs(geom, config, state.u + dt * k1)
            u_new = state.u + 0.5 * dt * (k1 + k2)
            X, lam, dtu = _evaluate(geom, config, u_new)
        except ConeExit as exc:
            failure = exc
            dt *= 0.5
            continue
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(dtu))):
            raise NumericalBlowUp(f"non-finite values after step {state.step_index + 1}")
        return FlowState(u_new, state.t + dt, dtu, state.step_index + 1, dt, X, lam)
    raise failure


def monitor(geom: TorusGeometry, config: FlowConfig, state: FlowState):
    dtu = state.dtu
    b_est = float(np.mean(dtu))
    J = functionals.J_functional(geom, state.u, config.l, X=state.X).value
    res = functionals.elliptic_residual(
        geom, state.u, config.k, config.l, config.psi, b_est, lam=state.lam
    )
    return (state.t, state.dt, float(dtu.min()), float(dtu.max()), oscillation(dtu), J, res, b_est)


def _theta_min(geom, config, state):
    from .subsolution import theta_field

    return float(np.min(theta_field(geom, state.u, config.u_bar, state.dtu, config.k, config.l)))


def run(geom: TorusGeometry, config: FlowConfig) -> FlowReport:
    """Integrate from u = 0 until osc(du/dt) < stop_osc, t_max or max_steps."""
    if config.psi.shape != geom.shape:
        raise ValueError(f"psi shape {config.psi.shape} does not match geometry {geom.shape}")
    geom.validate_cone(config.k)
    sample_theta = config.u_bar is not None and config.theta_every > 0

    state = initial_state(geom, config)
    records = [monitor(geom, config, state)]
    thetas = []
    if sample_theta:
        thetas.append((0, 0.0, _theta_min(geom, config, state)))
    message = ""
    while True:
        if oscillation(state.dtu) < config.stop_osc:
            status = CONVERGED
            break
        if state.step_index >= config.max_steps or state.t >= config.t_max:
            status = MAX_STEPS
            break
        try:
            state = step(geom, config, state)
        except (ConeExit, NumericalBlowUp) as exc:
            status, message = CONE_EXIT, str(exc)
            log.warning("flow stopped at step %d: %s", state.step_index, exc)
            break
        records.append(monitor(geom, config, state))
        if sample_theta and state.step_index % config.theta_every == 0:
            thetas.append((state.step_index, state.t, _theta_min(geom, config, state)))

    series = np.array(records, dtype=float)
    u_hat = functionals.normalize(geom, state.u, config.l)
    report = FlowReport(
        series=series,
        final_u=state.u,
        final_u_hat=u_hat,
        final_b=float(np.mean(state.dtu)),
        decay_rate=float("nan"),
        status=status,
        message=message,
        theta_samples=thetas,
    )
    if status == CONVERGED:
        b, ok = functionals.estimate_b(geom, u_hat, config.k, config.l, config.psi, strict=False)
        report.final_b, report.b_consistent = b, ok
        try:
            report.decay_rate = estimate_decay_rate(report)
        except ValueError:
            pass
    report.residual = functionals.elliptic_residual(
        geom, u_hat, config.k, config.l, config.psi, report.final_b
    )
    return report


def decay_fit(t, osc):
    """Least-squares fit of log osc against t over the trailing half of usable records.

    Usable means t > 1 and osc > 1e-13; at least 10 are required. Returns
    ``(rate, r_squared)`` with rate = -slope.
    """
    t = np.asarray(t, dtype=float)
    osc = np.asarray(osc, dtype=float)
    keep = (t > 1.0) & (osc > 1e-13)
    t, osc = t[keep], osc[keep]
    if t.size < 10:
        raise ValueError(f"need >= 10 usable records past t = 1, have {t.size}")
    half = t.size // 2
    t, y = t[half:], np.log(osc[half:])
    if np.ptp(y) == 0.0:
        return 0.0, 1.0
    slope, intercept = np.polyfit(t, y, 1)
    ss_res = float(np.sum((y - (slope * t + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return -float(slope), 1.0 - ss_res / ss_tot


def estimate_decay_rate(report: FlowReport):
    return decay_fit(report.column("t"), report.column("osc_dtu"))[0]


def max_principle_slack(geom: TorusGeometry):
    return 1e-6 + 10.0 * geom.h**2


def maximum_principle_violations(report: FlowReport, geom: TorusGeometry):
    """Steps where max du/dt rose or min du/dt fell by more than slack * dt."""
    slack = max_principle_slack(geom) * report.column("dt")[1:]
    hi = report.column("max_dtu")
    lo = report.column("min_dtu")
    bad = (np.diff(hi) > slack) | (np.diff(lo) < -slack)
    return int(np.count_nonzero(bad))


def J_monotone_violations(report: FlowReport, tol=1e-8):
    return int(np.count_nonzero(np.diff(report.column("J_l")) > tol))


def write_series_csv(report: FlowReport, path, every=1):
    rows = list(range(0, len(report.series), every))
    if rows[-1] != len(report.series) - 1:
        rows.append(len(report.series) - 1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_COLUMNS)
        for i in rows:
            writer.writerow([repr(float(v)) for v in report.series[i]])
