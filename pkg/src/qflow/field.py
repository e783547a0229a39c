"""The discrete flat torus C^n / (Z + iZ)^n.

Scalar fields are plain float arrays of shape ``geometry.shape``; form fields
are complex arrays of shape ``geometry.shape + (n, n)``. Real coordinates are
ordered (x1, y1, ..., xn, yn) and z_j = x_j + i y_j, so that

    u_{j kbar} = 1/4 [(d_xj d_xk + d_yj d_yk) + i (d_xj d_yk - d_yj d_xk)] u.

In toy mode every field depends on (x1, y1) only; the grid is N x N while
the matrices stay n x n.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import comb, factorial
from pathlib import Path

import numpy as np

from . import hermitian, symfun

MAGIC = "QFLOW1"


@dataclass(frozen=True)
class TrigPolynomial:
    """Real trigonometric polynomial sum_m A_m cos(2 pi k_m . x + phi_m).

    ``modes`` is a tuple of ``(freq, amplitude, phase)`` with ``freq`` an
    integer tuple of length 2n over (x1, y1, ..., xn, yn).
    """

    modes: tuple = ()

    @classmethod
    def from_rows(cls, rows):
        return cls(tuple((tuple(int(f) for f in fr), float(a), float(ph)) for fr, a, ph in rows))

    @classmethod
    def sin_sin(cls, n, amplitude):
        """amplitude * sin(2 pi x1) sin(2 pi y1) as two cosine modes."""
        plus = (1, 1) + (0,) * (2 * n - 2)
        minus = (1, -1) + (0,) * (2 * n - 2)
        return cls(((minus, 0.5 * amplitude, 0.0), (plus, -0.5 * amplitude, 0.0)))

    def __add__(self, other):
        return TrigPolynomial(self.modes + other.modes)

    def scaled(self, s):
        return TrigPolynomial(tuple((f, s * a, ph) for f, a, ph in self.modes))

    def dim(self):
        lens = {len(f) for f, _, _ in self.modes}
        if len(lens) > 1:
            raise ValueError("modes have inconsistent frequency lengths")
        return lens.pop() // 2 if lens else None

    def _phase(self, coords, freq, phase):
        arg = phase
        for c, f in zip(coords, freq):
            if f:
                arg = arg + 2.0 * np.pi * f * c
        return arg

    def value(self, coords, shape):
        out = np.zeros(shape)
        for freq, amp, phase in self.modes:
            out += amp * np.cos(self._phase(coords, freq, phase))
        return out

    def complex_hessian(self, coords, shape, n):
        """Analytic u_{j kbar}: each mode contributes -pi^2 f conj(kappa_j) kappa_k."""
        out = np.zeros(shape + (n, n), dtype=complex)
        for freq, amp, phase in self.modes:
            kappa = np.array([freq[2 * j] + 1j * freq[2 * j + 1] for j in range(n)])
            if not np.any(kappa):
                continue
            outer = np.conj(kappa)[:, None] * kappa[None, :]
            f = amp * np.cos(self._phase(coords, freq, phase))
            out += -np.pi**2 * f[..., None, None] * outer
        return out


@dataclass(frozen=True)
class TorusGeometry:
    n: int
    N: int
    a: float = 1.0
    rho: TrigPolynomial = dc_field(default_factory=TrigPolynomial)
    toy: bool = False
    k: int | None = None

    def __post_init__(self):
        if self.n < 2 or self.n > 3:
            raise ValueError(f"grid dimension n={self.n} must be 2 or 3")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N={self.N} must be even and >= 8")
        if self.a <= 0:
            raise ValueError("chi scale a must be positive")
        self.check_trig(self.rho, "rho")
        if self.k is not None:
            self.validate_cone(self.k)

    def check_trig(self, trig, name="field"):
        d = trig.dim()
        if d is not None and d != self.n:
            raise ValueError(f"{name}: frequency vectors need {2 * self.n} entries")
        if self.toy:
            for freq, _, _ in trig.modes:
                if any(freq[2:]):
                    raise ValueError(f"{name}: toy mode allows (x1, y1) frequencies only")

    @property
    def h(self):
        return 1.0 / self.N

    @property
    def ndim_grid(self):
        return 2 if self.toy else 2 * self.n

    @property
    def shape(self):
        return (self.N,) * self.ndim_grid

    @property
    def weight(self):
        """Quadrature weight per point, with omega^n = n! dx1 dy1 ... dxn dyn."""
        return factorial(self.n) * self.h**self.ndim_grid

    @property
    def volume(self):
        return float(factorial(self.n))

    @cached_property
    def coords(self):
        x = np.arange(self.N) * self.h
        d = self.ndim_grid
        out = []
        for axis in range(2 * self.n):
            if axis < d:
                shp = [1] * d
                shp[axis] = self.N
                out.append(x.reshape(shp))
            else:
                out.append(np.zeros([1] * d))
        return out

    def sample(self, trig):
        self.check_trig(trig)
        return trig.value(self.coords, self.shape)

    def sample_hessian(self, trig):
        self.check_trig(trig)
        return trig.complex_hessian(self.coords, self.shape, self.n)

    @cached_property
    def chi(self):
        """chi = a * omega + ddbar(rho), with ddbar(rho) evaluated analytically."""
        return self.a * np.eye(self.n) + self.sample_hessian(self.rho)

    def point(self, flat_index):
        idx = np.unravel_index(flat_index, self.shape)
        return tuple(float(i) * self.h for i in idx)

    def validate_cone(self, k):
        lam = hermitian.eigen_wrt_metric(self.chi)
        ok = symfun.cone_levels_ok(lam, k)
        if not np.all(ok):
            flat = int(np.flatnonzero(~ok.ravel())[0])
            raise ValueError(f"chi is not in Gamma_{k} at grid point {self.point(flat)}")

    def zeros(self):
        return np.zeros(self.shape)


def _shift(u, axis, s):
    """Periodic shift: result[i] = u[i + s] along ``axis`` (s = +1 or -1)."""
    out = np.empty_like(u)
    src = [slice(None)] * u.ndim
    dst = [slice(None)] * u.ndim
    if s > 0:
        dst[axis], src[axis] = slice(None, -1), slice(1, None)
        out[tuple(dst)] = u[tuple(src)]
        dst[axis], src[axis] = slice(-1, None), slice(None, 1)
    else:
        dst[axis], src[axis] = slice(1, None), slice(None, -1)
        out[tuple(dst)] = u[tuple(src)]
        dst[axis], src[axis] = slice(None, 1), slice(-1, None)
    out[tuple(dst)] = u[tuple(src)]
    return out


def _d2(u, axis, h):
    return (_shift(u, axis, 1) - 2.0 * u + _shift(u, axis, -1)) / h**2


def _dmix(u, a, b, h):
    up = _shift(u, a, 1)
    um = _shift(u, a, -1)
    return (_shift(up, b, 1) - _shift(up, b, -1) - _shift(um, b, 1) + _shift(um, b, -1)) / (4.0 * h**2)


def complex_hessian(geom: TorusGeometry, u):
    """Second-order centered-difference u_{j kbar}, Hermitian at every point."""
    u = np.asarray(u, dtype=float)
    if u.shape != geom.shape:
        raise ValueError(f"field shape {u.shape} does not match geometry {geom.shape}")
    n, h = geom.n, geom.h
    H = np.zeros(geom.shape + (n, n), dtype=complex)
    active = 1 if geom.toy else n
    for j in range(active):
        xj, yj = 2 * j, 2 * j + 1
        H[..., j, j] = 0.25 * (_d2(u, xj, h) + _d2(u, yj, h))
        for m in range(j + 1, active):
            xm, ym = 2 * m, 2 * m + 1
            re = _dmix(u, xj, xm, h) + _dmix(u, yj, ym, h)
            im = _dmix(u, xj, ym, h) - _dmix(u, yj, xm, h)
            H[..., j, m] = 0.25 * (re + 1j * im)
            H[..., m, j] = 0.25 * (re - 1j * im)
    return H


def laplacian(geom: TorusGeometry, u):
    """Discrete flat Laplacian 4 * trace(u_{j jbar})."""
    return 4.0 * np.trace(complex_hessian(geom, u), axis1=-2, axis2=-1).real


def chi_u(geom: TorusGeometry, u):
    return geom.chi + complex_hessian(geom, u)


def _vandermonde_row(m, j):
    nodes = np.arange(m + 1, dtype=float)
    V = np.vander(nodes, m + 1, increasing=True)
    return np.linalg.inv(V)[j]


def mixed_density(A, B, i, j, g=None):
    """Density of A^i ^ B^j ^ omega^(n-i-j) against omega^n.

    Polarization by interpolation: q(t) = wedge_ratio(A + tB, i + j) is a
    degree i+j polynomial whose t^j coefficient is C(i+j, j) times the mixed
    density. Batched over leading axes of A and B.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = A.shape[-1]
    m = i + j
    if i < 0 or j < 0 or m > n:
        raise ValueError(f"need i, j >= 0 and i + j <= n, got {i}, {j}, n={n}")
    if j == 0:
        return hermitian.wedge_ratio(A, i, g)
    if i == 0:
        return hermitian.wedge_ratio(B, j, g)
    row = _vandermonde_row(m, j)
    acc = 0.0
    for t, w in enumerate(row):
        acc = acc + w * hermitian.wedge_ratio(A + t * B, m, g)
    return acc / comb(m, j)


def integrate(geom: TorusGeometry, f, density=None):
    """Periodic-grid quadrature of f * density * omega^n."""
    f = np.asarray(f, dtype=float)
    if f.shape != geom.shape:
        raise ValueError(f"field shape {f.shape} does not match geometry {geom.shape}")
    if density is not None:
        density = np.asarray(density, dtype=float)
        if density.shape != geom.shape:
            raise ValueError(f"density shape {density.shape} does not match geometry {geom.shape}")
        f = f * density
    return float(np.sum(f) * geom.weight)


def oscillation(f):
    f = np.asarray(f)
    return float(f.max() - f.min())


def save_field(path, geom: TorusGeometry, values, name):
    if not name or any(c.isspace() for c in name):
        raise ValueError("snapshot name must be non-empty without whitespace")
    values = np.asarray(values, dtype=float)
    if values.shape != geom.shape:
        raise ValueError("snapshot does not match geometry")
    header = f"{MAGIC} n={geom.n} N={geom.N} name={name}"
    if geom.toy:
        header += " toy=1"
    with open(path, "wb") as fh:
        fh.write((header + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def load_field(path):
    """Read a snapshot; returns ``(meta, values)`` with values already reshaped."""
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    parts = raw[:nl].decode("ascii").split()
    if not parts or parts[0] != MAGIC:
        raise ValueError(f"{path}: not a {MAGIC} snapshot")
    meta = dict(p.split("=", 1) for p in parts[1:])
    n, N = int(meta["n"]), int(meta["N"])
    toy = meta.get("toy") == "1"
    shape = (N,) * (2 if toy else 2 * n)
    values = np.frombuffer(raw[nl + 1:], dtype="<f8")
    if values.size != N ** len(shape):
        raise ValueError(f"{path}: expected {N ** len(shape)} values, found {values.size}")
    meta = {"n": n, "N": N, "name": meta.get("name", ""), "toy": toy}
    return meta, values.reshape(shape).astype(float)
