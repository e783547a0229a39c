"""Parabolic flow for complex Hessian quotient equations on the flat torus.

Solves du/dt = log(S_k / S_l)(chi_u) - log Psi from u = 0 and tracks the
normalized limit (u_hat, b) with chi_u^k ^ omega^(n-k) = e^b psi chi_u^l ^ omega^(n-l).
"""
from .field import TorusGeometry, TrigPolynomial, load_field, save_field
from .flow import FlowConfig, FlowReport, run
from .functionals import J_functional, constant_c, estimate_b, normalize
from .subsolution import check_subsolution
from .symfun import elementary_sym, f_gradient, f_value, in_gamma_k

__all__ = [
    "FlowConfig",
    "FlowReport",
    "J_functional",
    "TorusGeometry",
    "TrigPolynomial",
    "check_subsolution",
    "constant_c",
    "elementary_sym",
    "estimate_b",
    "f_gradient",
    "f_value",
    "in_gamma_k",
    "load_field",
    "normalize",
    "run",
    "save_field",
]
