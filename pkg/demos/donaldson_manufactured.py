"""Second-order convergence on a manufactured Donaldson-type solution.

n = 2, k = 2, l = 1 on chi = 2 omega. psi is built from the exact
u* = 0.05 sin(2 pi x1) sin(2 pi y1) so that (u*, b = 0) solves the elliptic
equation; the flow limit is compared against u* after normalization.
Pass --fine to add N = 32 (about a minute and a half).
"""
import math
import sys

import numpy as np

from qflow import flow, functionals, hermitian, symfun
from qflow.field import TorusGeometry, TrigPolynomial

ustar = TrigPolynomial.sin_sin(2, 0.05)
sizes = (8, 16, 32) if "--fine" in sys.argv else (8, 16)
errors = []
for N in sizes:
    geom = TorusGeometry(2, N, a=2.0, toy=True)
    lam = hermitian.eigen_wrt_metric(geom.chi + geom.sample_hessian(ustar))
    psi = symfun.elementary_sym(lam, 2) / (symfun.elementary_sym(lam, 1) / math.comb(2, 1))
    config = flow.FlowConfig(2, 1, psi, u_bar=geom.zeros(), theta_every=500)
    report = flow.run(geom, config)
    exact = functionals.normalize(geom, geom.sample(ustar), 1)
    err = float(np.max(np.abs(report.final_u_hat - exact)))
    errors.append(err)
    theta = min(th for _, _, th in report.theta_samples)
    print(
        f"N={N:3d}: {report.status}, {report.steps} steps, b = {report.final_b:+.2e}, "
        f"error = {err:.3e} ({err / geom.h**2:.3f} h^2), decay rate {report.decay_rate:.3f}, theta_min {theta}"
    )
    print(f"        max-principle violations {flow.maximum_principle_violations(report, geom)}, residual {report.residual:.2e}")
for a, b in zip(errors, errors[1:]):
    print(f"error ratio {a / b:.2f} (second order gives 4)")
