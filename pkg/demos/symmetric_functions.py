"""Elementary symmetric polynomials, the Garding cone and the quotient operator.

Walks through S_k on a few eigenvalue tuples, the cone test, and the
derivatives of F = log S_k - log S_l that drive the flow.
"""
import numpy as np

from qflow import oracle, symfun

lam = np.array([3.0, 2.0, -0.5])
print("lambda =", lam)
for k in range(4):
    print(f"  S_{k} = {symfun.elementary_sym(lam, k):8.4f}   (enumeration {oracle.sym_enum(lam, k):8.4f})")

# the cone is nested: Gamma_3 in Gamma_2 in Gamma_1
for k in (1, 2, 3):
    print(f"  in Gamma_{k}: {symfun.in_gamma_k(lam, k)}")

k, l = 2, 1
print(f"\nF = log S_{k} - log S_{l} at lambda: {symfun.f_value(lam, k, l):.6f}")
grad = symfun.f_gradient(lam, k, l)
print("F^{i ibar} =", np.round(grad, 6), "(all positive: the operator is elliptic)")
print("finite-difference check:", f"{oracle.fd_check_gradient(lam, k, l):.1e}")
print("pair coefficient (0, 1):", f"{symfun.f_pair_coefficient(lam, k, l, 0, 1):.6f}")

# concavity along a segment inside the cone
mu = np.array([1.0, 1.0, 1.0])
for s in np.linspace(0, 1, 5):
    mid = (1 - s) * lam + s * mu
    chord = (1 - s) * symfun.f_value(lam, k, l) + s * symfun.f_value(mu, k, l)
    print(f"  s={s:.2f}: F = {symfun.f_value(mid, k, l):+.5f} >= chord {chord:+.5f}")
