"""The subsolution hypothesis and the dichotomy diagnostic.

u_bar = 0 is a subsolution when the background form dominates psi in every
direction. As psi grows the margin shrinks and eventually turns negative.
"""
import numpy as np

from qflow import check_subsolution
from qflow.field import TorusGeometry, TrigPolynomial

geom = TorusGeometry(2, 16, a=2.0, rho=TrigPolynomial.sin_sin(2, 0.05), toy=True)
for level in (0.5, 2.0, 3.5, 4.5, 8.0):
    psi = np.full(geom.shape, level)
    rep = check_subsolution(geom, geom.zeros(), 2, 1, psi)
    verdict = "subsolution" if rep.min_margin > 0 else "fails"
    print(
        f"psi = {level:4.1f}: min margin {rep.min_margin:+.4f}, failures {rep.failures:3d}, "
        f"lambda gap {rep.lambda_gap:.4g}, theta_min {rep.theta_min:.4g}  -> {verdict}"
    )

# with l = 0 the right-hand side vanishes, so u_bar = 0 always qualifies
rep = check_subsolution(geom, geom.zeros(), 2, 0, np.full(geom.shape, 1e6))
print(f"l = 0, psi = 1e6: min margin {rep.min_margin:+.4f}")
